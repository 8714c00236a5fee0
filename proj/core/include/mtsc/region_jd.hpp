#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mtsc/discrete.hpp"

namespace mtsc {

// Region boundaries are closed; membership is tested inclusively at this
// tolerance.
inline constexpr double kRegionTol = 1e-9;

/// A rate-distortion tuple to test against the joint-distortion region.
struct JdQuery {
  double rx = 0.0;
  double ry = 0.0;
  double d = 0.0;
};

/// Witnessing slack pair for a membership verdict.
struct SlackCertificate {
  double delta_x = 0.0;
  double delta_y = 0.0;
};

struct RatePoint {
  double rx = 0.0;
  double ry = 0.0;
};

/// The two extreme points of the region's dominant face at a given
/// distortion; time-sharing between them spans the face.
struct CornerPair {
  RatePoint p1;
  RatePoint p2;
};

// Membership by explicit feasibility search over the slack polytope
// (vertex enumeration); returns the minimal-slack witness when feasible.
std::pair<bool, std::optional<SlackCertificate>> jd_contains_lp(
    const JointPmf& p, const JdQuery& q);

// Membership by closed-form elimination of the slacks. Agrees with
// jd_contains_lp on every input.
bool jd_contains_closed(const JointPmf& p, const JdQuery& q);

// Split-message Slepian-Wolf region membership (slack messages d1, d2).
bool sw_region_contains(const JointPmf& p, double rx, double ry, double d1,
                        double d2);

CornerPair jd_corner_points(const JointPmf& p, double d);

// Samples the dominant face between the two corner points; every returned
// point is a member and both coordinates are boundary-tight.
std::vector<RatePoint> jd_boundary(const JointPmf& p, double d, int samples);

// Point-to-point rate-distortion under log-loss: max(H(X) - d, 0).
double rd_logloss(const Dist& p_x, double d);
// Same with decoder side information: max(H(X|Y) - d, 0).
double wz_logloss(const JointPmf& p, double d);

}  // namespace mtsc
