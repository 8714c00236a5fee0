#include "mtsc/region_jd.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mtsc {

namespace {

struct Entropies {
  double hxy;   // H(X|Y)
  double hyx;   // H(Y|X)
  double hx;    // H(X)
  double hy;    // H(Y)
  double hj;    // H(X,Y)
};

Entropies entropies(const JointPmf& p) {
  return Entropies{conditional_entropy(p, Axis::Y),
                   conditional_entropy(p, Axis::X),
                   entropy(p.marginal_x()), entropy(p.marginal_y()),
                   joint_entropy(p)};
}

bool nonnegative(const JdQuery& q) {
  return q.rx >= -kRegionTol && q.ry >= -kRegionTol && q.d >= -kRegionTol;
}

// A halfplane a*dx + b*dy >= c in the slack variables.
struct Constraint {
  double a, b, c;
};

}  // namespace

std::pair<bool, std::optional<SlackCertificate>> jd_contains_lp(
    const JointPmf& p, const JdQuery& q) {
  if (!nonnegative(q)) return {false, std::nullopt};
  const Entropies e = entropies(p);
  if (q.rx + q.ry + q.d < e.hj - kRegionTol) return {false, std::nullopt};

  // Feasibility of {dx, dy >= 0, dx >= H(X|Y)-Rx, dy >= H(Y|X)-Ry,
  // dx+dy <= D} by vertex enumeration: the polytope is bounded, so it is
  // nonempty iff some pairwise intersection of constraint boundaries
  // satisfies all constraints.
  const std::array<Constraint, 5> cs = {{{1.0, 0.0, 0.0},
                                         {0.0, 1.0, 0.0},
                                         {-1.0, -1.0, -q.d},
                                         {1.0, 0.0, e.hxy - q.rx},
                                         {0.0, 1.0, e.hyx - q.ry}}};
  bool feasible = false;
  for (std::size_t i = 0; i < cs.size() && !feasible; ++i) {
    for (std::size_t j = i + 1; j < cs.size() && !feasible; ++j) {
      const double det = cs[i].a * cs[j].b - cs[j].a * cs[i].b;
      if (std::abs(det) < 1e-14) continue;
      const double vx = (cs[i].c * cs[j].b - cs[j].c * cs[i].b) / det;
      const double vy = (cs[i].a * cs[j].c - cs[j].a * cs[i].c) / det;
      bool ok = true;
      for (const Constraint& c : cs)
        ok = ok && c.a * vx + c.b * vy >= c.c - kRegionTol;
      feasible = ok;
    }
  }
  if (!feasible) return {false, std::nullopt};
  return {true, SlackCertificate{std::max(0.0, e.hxy - q.rx),
                                 std::max(0.0, e.hyx - q.ry)}};
}

bool jd_contains_closed(const JointPmf& p, const JdQuery& q) {
  if (!nonnegative(q)) return false;
  const Entropies e = entropies(p);
  const double needed =
      std::max(0.0, e.hxy - q.rx) + std::max(0.0, e.hyx - q.ry);
  return needed <= q.d + kRegionTol &&
         q.rx + q.ry + q.d >= e.hj - kRegionTol;
}

bool sw_region_contains(const JointPmf& p, double rx, double ry, double d1,
                        double d2) {
  if (rx < -kRegionTol || ry < -kRegionTol || d1 < -kRegionTol ||
      d2 < -kRegionTol)
    return false;
  const Entropies e = entropies(p);
  return rx + d1 >= e.hxy - kRegionTol && ry + d2 >= e.hyx - kRegionTol &&
         rx + ry + d1 + d2 >= e.hj - kRegionTol;
}

CornerPair jd_corner_points(const JointPmf& p, double d) {
  const Entropies e = entropies(p);
  // Operational rates cannot be negative; the displayed formulas are
  // clamped at zero once d exceeds H(X,Y).
  CornerPair c;
  c.p1.rx = std::max(e.hxy - d, 0.0);
  c.p1.ry = std::max(std::min(e.hy, e.hy - (d - e.hxy)), 0.0);
  c.p2.rx = std::max(std::min(e.hx, e.hx - (d - e.hyx)), 0.0);
  c.p2.ry = std::max(e.hyx - d, 0.0);
  return c;
}

std::vector<RatePoint> jd_boundary(const JointPmf& p, double d, int samples) {
  if (samples < 2) throw ValidationError("jd_boundary: samples must be >= 2");
  const CornerPair c = jd_corner_points(p, d);
  std::vector<RatePoint> out;
  out.reserve(std::size_t(samples));
  for (int i = 0; i < samples; ++i) {
    const double t = double(i) / double(samples - 1);
    out.push_back(RatePoint{c.p1.rx + t * (c.p2.rx - c.p1.rx),
                            c.p1.ry + t * (c.p2.ry - c.p1.ry)});
  }
  return out;
}

double rd_logloss(const Dist& p_x, double d) {
  return std::max(entropy(p_x) - d, 0.0);
}

double wz_logloss(const JointPmf& p, double d) {
  return std::max(conditional_entropy(p, Axis::Y) - d, 0.0);
}

}  // namespace mtsc
