#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mtsc/discrete.hpp"

namespace mtsc {

/// A rate-distortion tuple to test against the X-distortion region.
struct XdQuery {
  double rx = 0.0;
  double ry = 0.0;
  double dx = 0.0;
};

struct XdOptions {
  int restarts = 32;
  double tol = 0.02;          // membership / solver-vs-oracle tolerance
  std::uint64_t seed = 0;
  int ladder_points = 20;     // lambda sweep resolution
  int bisection_iters = 36;
  int max_iters = 2000;       // per alternating-minimization solve
  double conv_tol = 1e-10;    // relative channel change at stationarity
};

/// Result of the boundary solve: an achievable upper bound on
/// g(R_y) = min { H(X|U) : I(Y;U) <= R_y, |U| <= |Y|+2 }, together with a
/// feasible channel achieving exactly the reported value.
struct XdSolution {
  double h_x_given_u = 0.0;
  double rate = 0.0;  // I(Y;U) of the returned channel
  AuxChannel channel;
  bool converged = true;
};

XdSolution xd_min_hxu(const JointPmf& p, double ry_budget,
                      const XdOptions& opts = {});

// Exhaustive minimum of H(X|U) over channels whose rows lie on a probability
// simplex lattice of the given step, subject to I(Y;U) <= ry_budget.
// u_count defaults to |Y|+1 (sufficient for the boundary); at most |Y|+2.
double xd_grid_oracle(const JointPmf& p, double ry_budget, double grid_step,
                      int u_count = 0);

// Same oracle evaluated at several budgets in one sweep over the lattice.
std::vector<double> xd_grid_oracle_sweep(const JointPmf& p,
                                         std::vector<double> budgets,
                                         double grid_step, int u_count = 0);

struct XdVerdict {
  bool contains = false;
  bool converged = true;
};

// true iff rx + dx >= g(ry) - tol, with g from xd_min_hxu.
XdVerdict xd_contains(const JointPmf& p, const XdQuery& q,
                      const XdOptions& opts = {});

struct CurvePoint {
  double ry_budget = 0.0;
  double min_h_x_given_u = 0.0;
  AuxChannel achieving;
};

/// Sampled boundary g(R_y) over [0, H(Y)]; values are post-processed to the
/// lower convex envelope and are nonincreasing in the budget.
struct TradeoffCurve {
  std::vector<CurvePoint> points;
};

TradeoffCurve xd_tradeoff_curve(const JointPmf& p, int samples,
                                const XdOptions& opts = {});

// Lower convex envelope of (xs, ys) evaluated back at xs. xs must be sorted.
std::vector<double> lower_convex_envelope(const std::vector<double>& xs,
                                          const std::vector<double>& ys);

}  // namespace mtsc
