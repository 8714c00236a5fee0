#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mtsc/discrete.hpp"

namespace mtsc {

enum class Support { JointXY, MarginalX };

/// A soft reproduction symbol: a point on the probability simplex over
/// X x Y (joint-distortion networks) or over X alone (X-distortion networks).
class Reproduction {
 public:
  static Reproduction joint_xy(int m, int l, Dist q);
  static Reproduction marginal_x(int m, Dist q);

  Support kind() const { return kind_; }
  int m() const { return m_; }
  int l() const { return l_; }
  const Dist& q() const { return q_; }

  // Mass assigned to the realized symbol(s). y is ignored for MarginalX.
  double at(int x, int y = -1) const;
  Dist x_marginal() const;                    // JointXY only
  double cond_y_given_x(int x, int y) const;  // q(x,y)/q_X(x), JointXY only

 private:
  Reproduction(Support kind, int m, int l, Dist q);
  Support kind_;
  int m_;
  int l_;
  Dist q_;
};

/// A length-n sequence of reproductions of uniform support kind.
class ReproductionSeq {
 public:
  explicit ReproductionSeq(std::vector<Reproduction> items);
  std::size_t size() const { return items_.size(); }
  const Reproduction& operator[](std::size_t i) const { return items_[i]; }
  Support kind() const { return items_.front().kind(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<Reproduction> items_;
};

/// Total per-block distortion split into the X-marginal part and the
/// Y-given-X conditional part; the parts sum to the total.
struct DistortionSplit {
  double d_total = 0.0;
  double d_x = 0.0;
  double d_y_given_x = 0.0;
};

// log2(1/r(x,y)) or log2(1/r(x)); +infinity on zero reproduction mass.
double symbol_distortion(int x, std::optional<int> y, const Reproduction& r);

// (1/n) sum of per-position symbol distortions.
double sequence_distortion(std::span<const int> xs,
                           std::optional<std::span<const int>> ys,
                           const ReproductionSeq& rs);

// The posterior p(x,y|u) as a reproduction; the optimal estimator.
Reproduction optimal_estimator(const AuxJoint& a, int u);

// Exact E[log2 1/z(X,Y)] under the posterior estimator. Equals H(X,Y|U).
double expected_distortion(const AuxJoint& a);
// Same for a supplied estimator map u -> reproduction (size k).
double expected_distortion(const AuxJoint& a,
                           const std::vector<Reproduction>& per_u);

// Factor each z_i(x,y) = z_i(x) z_i(y|x) and split the realized distortion.
DistortionSplit decompose_distortion(const ReproductionSeq& rs,
                                     std::span<const int> xs,
                                     std::span<const int> ys);

enum class TypicalKind { Joint, MarginalX, CondYGivenX };

/// The enumerated distortion-typical set. ys is populated only for the
/// Joint kind.
struct TypicalSet {
  std::vector<std::vector<int>> xs;
  std::vector<std::vector<int>> ys;
  std::size_t size() const { return xs.size(); }
};

// All sequences whose sequence distortion against rs is <= budget + eps.
// cond_xs supplies the conditioning x-sequence for CondYGivenX.
TypicalSet distortion_typical_set(const ReproductionSeq& rs, double budget,
                                  double eps, TypicalKind kind,
                                  std::span<const int> cond_xs = {});

// Point-to-point rate-distortion under the erasure measure: (1-budget) H(d).
double erasure_rd(const Dist& d, double budget);

}  // namespace mtsc
