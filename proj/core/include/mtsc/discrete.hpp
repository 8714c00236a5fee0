#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mtsc/errors.hpp"

namespace mtsc {

// Tolerance for "entries sum to 1" checks on probability vectors.
inline constexpr double kProbTol = 1e-9;
// Entries below -kMassTol are rejected; entries in [-kMassTol, 0) are clamped.
inline constexpr double kMassTol = 1e-12;

inline double infinity() { return std::numeric_limits<double>::infinity(); }

// -log2(p), with zero mass mapping to +infinity.
inline double surprisal(double p) {
  return p > 0.0 ? -std::log2(p) : infinity();
}

/// A probability distribution on a finite alphabet.
class Dist {
 public:
  explicit Dist(std::vector<double> q);
  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  const std::vector<double>& values() const { return q_; }

 private:
  std::vector<double> q_;
};

// H(q) in bits, with 0*log 0 = 0.
double entropy(const Dist& d);

enum class Axis { X, Y };

/// A joint pmf p(x, y) on {0..m-1} x {0..l-1}, rows indexed by x.
class JointPmf {
 public:
  JointPmf(int m, int l, std::vector<double> p);

  int m() const { return m_; }
  int l() const { return l_; }
  double operator()(int x, int y) const { return p_[std::size_t(x) * l_ + y]; }
  const std::vector<double>& values() const { return p_; }

  Dist marginal_x() const;
  Dist marginal_y() const;
  Dist flattened() const;  // p(x,y) as a Dist over m*l symbols

 private:
  int m_ = 0;
  int l_ = 0;
  std::vector<double> p_;
};

// Checks shape and mass, renormalizes drift up to kProbTol, rejects the rest.
JointPmf validate_pmf(const std::vector<std::vector<double>>& raw);

double joint_entropy(const JointPmf& p);                    // H(X,Y)
double conditional_entropy(const JointPmf& p, Axis given);  // H(X|Y) or H(Y|X)
double mutual_information_xy(const JointPmf& p);            // I(X;Y)

// Bayes posterior over the other axis after observing one symbol.
Dist posterior(const JointPmf& p, Axis observed_axis, int symbol);

/// A conditional distribution p(u|y): `in` rows, `out` columns, row-stochastic.
struct AuxChannel {
  int in = 0;
  int out = 0;
  std::vector<double> w;

  double operator()(int y, int u) const { return w[std::size_t(y) * out + u]; }
};

// Row-stochasticity check with the usual clamping/renormalization rules.
AuxChannel validate_channel(int in, int out, std::vector<double> w);

enum class MiPair { YU, XU };

/// p(x,y,u) = p0(x,y) p(u|y): the Markov chain X - Y - U with |U| <= |Y|+2.
class AuxJoint {
 public:
  AuxJoint(JointPmf base, AuxChannel channel);

  const JointPmf& base() const { return base_; }
  const AuxChannel& channel() const { return ch_; }
  int m() const { return base_.m(); }
  int l() const { return base_.l(); }
  int k() const { return ch_.out; }

  double joint(int x, int y, int u) const { return base_(x, y) * ch_(y, u); }
  Dist u_marginal() const;
  Dist flattened() const;  // p(x,y,u) over m*l*k symbols
  // Posteriors given U = u; u must have positive probability.
  Dist posterior_xy_given_u(int u) const;
  Dist posterior_x_given_u(int u) const;

 private:
  JointPmf base_;
  AuxChannel ch_;
};

// I(Y;U) or I(X;U) in bits, computed from the derived joint.
double mutual_information(const AuxJoint& a, MiPair pair);

}  // namespace mtsc
