#include "mtsc/logloss.hpp"

#include <cstdint>
#include <string>

namespace mtsc {

Reproduction::Reproduction(Support kind, int m, int l, Dist q)
    : kind_(kind), m_(m), l_(l), q_(std::move(q)) {}

Reproduction Reproduction::joint_xy(int m, int l, Dist q) {
  if (m < 1 || l < 1) throw EmptyAlphabet("Reproduction: empty alphabet");
  if (q.size() != std::size_t(m) * l)
    throw ValidationError("Reproduction: simplex dimension must be m*l");
  return Reproduction(Support::JointXY, m, l, std::move(q));
}

Reproduction Reproduction::marginal_x(int m, Dist q) {
  if (m < 1) throw EmptyAlphabet("Reproduction: empty alphabet");
  if (q.size() != std::size_t(m))
    throw ValidationError("Reproduction: simplex dimension must be m");
  return Reproduction(Support::MarginalX, m, 0, std::move(q));
}

double Reproduction::at(int x, int y) const {
  if (x < 0 || x >= m_) throw ValidationError("Reproduction::at: x out of range");
  if (kind_ == Support::MarginalX) return q_[std::size_t(x)];
  if (y < 0 || y >= l_) throw ValidationError("Reproduction::at: y out of range");
  return q_[std::size_t(x) * l_ + y];
}

Dist Reproduction::x_marginal() const {
  if (kind_ != Support::JointXY)
    throw SupportMismatch("x_marginal: reproduction is not joint");
  std::vector<double> q(m_, 0.0);
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < l_; ++y) q[x] += q_[std::size_t(x) * l_ + y];
  return Dist(std::move(q));
}

double Reproduction::cond_y_given_x(int x, int y) const {
  if (kind_ != Support::JointXY)
    throw SupportMismatch("cond_y_given_x: reproduction is not joint");
  double mx = 0.0;
  for (int yy = 0; yy < l_; ++yy) mx += q_[std::size_t(x) * l_ + yy];
  if (mx <= 0.0) return 0.0;
  return q_[std::size_t(x) * l_ + y] / mx;
}

ReproductionSeq::ReproductionSeq(std::vector<Reproduction> items)
    : items_(std::move(items)) {
  if (items_.empty()) throw ValidationError("ReproductionSeq: n must be >= 1");
  for (const auto& r : items_) {
    if (r.kind() != items_.front().kind() || r.m() != items_.front().m() ||
        r.l() != items_.front().l())
      throw SupportMismatch("ReproductionSeq: mixed support kinds");
  }
}

double symbol_distortion(int x, std::optional<int> y, const Reproduction& r) {
  if (r.kind() == Support::JointXY) {
    if (!y)
      throw SupportMismatch("symbol_distortion: joint reproduction needs y");
    return surprisal(r.at(x, *y));
  }
  if (y) throw SupportMismatch("symbol_distortion: marginal reproduction given y");
  return surprisal(r.at(x));
}

double sequence_distortion(std::span<const int> xs,
                           std::optional<std::span<const int>> ys,
                           const ReproductionSeq& rs) {
  if (xs.size() != rs.size() || (ys && ys->size() != rs.size()))
    throw LengthMismatch("sequence_distortion: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    total += ys ? symbol_distortion(xs[i], (*ys)[i], rs[i])
                : symbol_distortion(xs[i], std::nullopt, rs[i]);
  }
  return total / double(rs.size());
}

Reproduction optimal_estimator(const AuxJoint& a, int u) {
  return Reproduction::joint_xy(a.m(), a.l(), a.posterior_xy_given_u(u));
}

double expected_distortion(const AuxJoint& a) {
  const Dist pu = a.u_marginal();
  double total = 0.0;
  for (int u = 0; u < a.k(); ++u) {
    if (pu[u] <= 0.0) continue;
    const Dist post = a.posterior_xy_given_u(u);
    for (int x = 0; x < a.m(); ++x)
      for (int y = 0; y < a.l(); ++y) {
        const double pxyu = a.joint(x, y, u);
        if (pxyu > 0.0) total += pxyu * surprisal(post[std::size_t(x) * a.l() + y]);
      }
  }
  return total;
}

double expected_distortion(const AuxJoint& a,
                           const std::vector<Reproduction>& per_u) {
  if (per_u.size() != std::size_t(a.k()))
    throw LengthMismatch("expected_distortion: estimator map must cover U");
  const Dist pu = a.u_marginal();
  double total = 0.0;
  for (int u = 0; u < a.k(); ++u) {
    if (pu[u] <= 0.0) continue;
    const Reproduction& r = per_u[std::size_t(u)];
    if (r.kind() != Support::JointXY || r.m() != a.m() || r.l() != a.l())
      throw SupportMismatch("expected_distortion: estimator has wrong support");
    for (int x = 0; x < a.m(); ++x)
      for (int y = 0; y < a.l(); ++y) {
        const double pxyu = a.joint(x, y, u);
        if (pxyu > 0.0) total += pxyu * surprisal(r.at(x, y));
      }
  }
  return total;
}

DistortionSplit decompose_distortion(const ReproductionSeq& rs,
                                     std::span<const int> xs,
                                     std::span<const int> ys) {
  if (rs.kind() != Support::JointXY)
    throw SupportMismatch("decompose_distortion: joint reproductions required");
  if (xs.size() != rs.size() || ys.size() != rs.size())
    throw LengthMismatch("decompose_distortion: length mismatch");
  double dx = 0.0, dyx = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].at(xs[i], ys[i]) <= 0.0)
      throw ZeroMassAtRealization(
          "decompose_distortion: zero mass at realized pair (total is "
          "+infinity, split undefined)");
    const double marg = rs[i].x_marginal()[std::size_t(xs[i])];
    dx += surprisal(marg);
    dyx += surprisal(rs[i].cond_y_given_x(xs[i], ys[i]));
  }
  const double n = double(rs.size());
  return DistortionSplit{(dx + dyx) / n, dx / n, dyx / n};
}

namespace {

// base^len with an enumeration cap; throws when the space is too large.
std::uint64_t checked_pow(int base, int len, std::uint64_t cap,
                          const char* what) {
  std::uint64_t v = 1;
  for (int i = 0; i < len; ++i) {
    if (v > cap / std::uint64_t(base))
      throw EnumerationTooLarge(std::string(what) +
                                ": sequence space exceeds enumeration guard");
    v *= std::uint64_t(base);
  }
  return v;
}

}  // namespace

TypicalSet distortion_typical_set(const ReproductionSeq& rs, double budget,
                                  double eps, TypicalKind kind,
                                  std::span<const int> cond_xs) {
  constexpr std::uint64_t kGuard = std::uint64_t(1) << 24;
  const int n = int(rs.size());
  const double threshold = double(n) * (budget + eps) + 1e-12;
  TypicalSet out;

  if (kind == TypicalKind::CondYGivenX && cond_xs.size() != rs.size())
    throw LengthMismatch("distortion_typical_set: conditioning sequence length");
  if (kind != TypicalKind::MarginalX && rs.kind() != Support::JointXY)
    throw SupportMismatch("distortion_typical_set: joint reproductions required");

  // Per-position alphabet and cost lookup for the requested kind.
  int base = 0;
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Reproduction& r = rs[std::size_t(i)];
    switch (kind) {
      case TypicalKind::Joint: {
        base = r.m() * r.l();
        cost[std::size_t(i)].resize(static_cast<std::size_t>(base));
        for (int x = 0; x < r.m(); ++x)
          for (int y = 0; y < r.l(); ++y)
            cost[std::size_t(i)][std::size_t(x) * r.l() + y] =
                surprisal(r.at(x, y));
        break;
      }
      case TypicalKind::MarginalX: {
        base = r.m();
        cost[std::size_t(i)].resize(static_cast<std::size_t>(base));
        for (int x = 0; x < r.m(); ++x)
          cost[std::size_t(i)][std::size_t(x)] =
              r.kind() == Support::JointXY ? surprisal(r.x_marginal()[std::size_t(x)])
                                           : surprisal(r.at(x));
        break;
      }
      case TypicalKind::CondYGivenX: {
        base = r.l();
        cost[std::size_t(i)].resize(static_cast<std::size_t>(base));
        for (int y = 0; y < r.l(); ++y)
          cost[std::size_t(i)][std::size_t(y)] =
              surprisal(r.cond_y_given_x(cond_xs[i], y));
        break;
      }
    }
  }

  checked_pow(base, n, kGuard, "distortion_typical_set");

  std::vector<int> seq(std::size_t(n), 0);
  while (true) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += cost[std::size_t(i)][std::size_t(seq[std::size_t(i)])];
      if (total > threshold) break;
    }
    if (total <= threshold) {
      if (kind == TypicalKind::Joint) {
        std::vector<int> xs(static_cast<std::size_t>(n));
        std::vector<int> ys(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          xs[std::size_t(i)] = seq[std::size_t(i)] / rs[0].l();
          ys[std::size_t(i)] = seq[std::size_t(i)] % rs[0].l();
        }
        out.xs.push_back(std::move(xs));
        out.ys.push_back(std::move(ys));
      } else {
        out.xs.push_back(seq);
      }
    }
    int i = n - 1;
    while (i >= 0 && ++seq[std::size_t(i)] == base) seq[std::size_t(i--)] = 0;
    if (i < 0) break;
  }
  return out;
}

double erasure_rd(const Dist& d, double budget) {
  if (budget < 0.0 || budget > 1.0)
    throw BudgetOutOfRange("erasure_rd: budget must lie in [0, 1]");
  return (1.0 - budget) * entropy(d);
}

}  // namespace mtsc
