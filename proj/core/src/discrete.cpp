#include "mtsc/discrete.hpp"

#include <algorithm>
#include <string>

namespace mtsc {

namespace {

// Shared mass check: rejects entries below -kMassTol, clamps tiny negatives,
// renormalizes when the total is within tol of 1.
std::vector<double> checked_mass(std::vector<double> q, double tol,
                                 const char* what) {
  if (q.empty()) throw EmptyAlphabet(std::string(what) + ": empty alphabet");
  double sum = 0.0;
  for (double& v : q) {
    if (v < -kMassTol)
      throw NegativeMass(std::string(what) + ": entry " + std::to_string(v) +
                         " is negative");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw NotNormalized(std::string(what) + ": entries sum to " +
                        std::to_string(sum));
  for (double& v : q) v /= sum;
  return q;
}

}  // namespace

Dist::Dist(std::vector<double> q)
    : q_(checked_mass(std::move(q), kProbTol, "Dist")) {}

double entropy(const Dist& d) {
  double h = 0.0;
  for (double q : d.values())
    if (q > 0.0) h -= q * std::log2(q);
  return h < 0.0 ? 0.0 : h;
}

JointPmf::JointPmf(int m, int l, std::vector<double> p) : m_(m), l_(l) {
  if (m < 1 || l < 1) throw EmptyAlphabet("JointPmf: alphabet sizes must be >= 1");
  if (p.size() != std::size_t(m) * std::size_t(l))
    throw ValidationError("JointPmf: entry count does not match m*l");
  p_ = checked_mass(std::move(p), kProbTol, "JointPmf");
}

JointPmf validate_pmf(const std::vector<std::vector<double>>& raw) {
  if (raw.empty() || raw.front().empty())
    throw EmptyAlphabet("validate_pmf: empty matrix");
  const std::size_t cols = raw.front().size();
  std::vector<double> flat;
  flat.reserve(raw.size() * cols);
  for (const auto& row : raw) {
    if (row.size() != cols)
      throw ValidationError("validate_pmf: matrix is not rectangular");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return JointPmf(int(raw.size()), int(cols), std::move(flat));
}

Dist JointPmf::marginal_x() const {
  std::vector<double> q(m_, 0.0);
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < l_; ++y) q[x] += (*this)(x, y);
  return Dist(std::move(q));
}

Dist JointPmf::marginal_y() const {
  std::vector<double> q(l_, 0.0);
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < l_; ++y) q[y] += (*this)(x, y);
  return Dist(std::move(q));
}

Dist JointPmf::flattened() const { return Dist(p_); }

double joint_entropy(const JointPmf& p) { return entropy(p.flattened()); }

double conditional_entropy(const JointPmf& p, Axis given) {
  const Dist marg = given == Axis::Y ? p.marginal_y() : p.marginal_x();
  const double h = joint_entropy(p) - entropy(marg);
  return h < 0.0 ? 0.0 : h;
}

double mutual_information_xy(const JointPmf& p) {
  const double i =
      entropy(p.marginal_x()) - conditional_entropy(p, Axis::Y);
  return i < 0.0 ? 0.0 : i;
}

Dist posterior(const JointPmf& p, Axis observed_axis, int symbol) {
  const int n_obs = observed_axis == Axis::Y ? p.l() : p.m();
  if (symbol < 0 || symbol >= n_obs)
    throw ValidationError("posterior: symbol out of range");
  const int n_other = observed_axis == Axis::Y ? p.m() : p.l();
  std::vector<double> q(n_other, 0.0);
  double mass = 0.0;
  for (int i = 0; i < n_other; ++i) {
    q[i] = observed_axis == Axis::Y ? p(i, symbol) : p(symbol, i);
    mass += q[i];
  }
  if (mass <= 0.0)
    throw ZeroProbabilityCondition(
        "posterior: conditioning symbol has zero probability");
  for (double& v : q) v /= mass;
  return Dist(std::move(q));
}

AuxChannel validate_channel(int in, int out, std::vector<double> w) {
  if (in < 1 || out < 1)
    throw EmptyAlphabet("AuxChannel: alphabet sizes must be >= 1");
  if (w.size() != std::size_t(in) * std::size_t(out))
    throw ValidationError("AuxChannel: entry count does not match in*out");
  for (int y = 0; y < in; ++y) {
    std::vector<double> row(w.begin() + std::size_t(y) * out,
                            w.begin() + std::size_t(y + 1) * out);
    row = checked_mass(std::move(row), kProbTol, "AuxChannel row");
    std::copy(row.begin(), row.end(), w.begin() + std::size_t(y) * out);
  }
  return AuxChannel{in, out, std::move(w)};
}

AuxJoint::AuxJoint(JointPmf base, AuxChannel channel)
    : base_(std::move(base)), ch_(std::move(channel)) {
  ch_ = validate_channel(ch_.in, ch_.out, std::move(ch_.w));
  if (ch_.in != base_.l())
    throw ValidationError("AuxJoint: channel rows must match |Y|");
  if (ch_.out > base_.l() + 2)
    throw ValidationError("AuxJoint: |U| exceeds |Y|+2");
}

Dist AuxJoint::u_marginal() const {
  std::vector<double> q(k(), 0.0);
  const Dist py = base_.marginal_y();
  for (int y = 0; y < l(); ++y)
    for (int u = 0; u < k(); ++u) q[u] += py[y] * ch_(y, u);
  return Dist(std::move(q));
}

Dist AuxJoint::flattened() const {
  std::vector<double> q;
  q.reserve(std::size_t(m()) * l() * k());
  for (int x = 0; x < m(); ++x)
    for (int y = 0; y < l(); ++y)
      for (int u = 0; u < k(); ++u) q.push_back(joint(x, y, u));
  return Dist(std::move(q));
}

Dist AuxJoint::posterior_xy_given_u(int u) const {
  if (u < 0 || u >= k()) throw ValidationError("posterior: u out of range");
  std::vector<double> q(std::size_t(m()) * l(), 0.0);
  double mass = 0.0;
  for (int x = 0; x < m(); ++x)
    for (int y = 0; y < l(); ++y) {
      q[std::size_t(x) * l() + y] = joint(x, y, u);
      mass += q[std::size_t(x) * l() + y];
    }
  if (mass <= 0.0)
    throw ZeroProbabilityCondition("posterior_xy_given_u: p(u) = 0");
  for (double& v : q) v /= mass;
  return Dist(std::move(q));
}

Dist AuxJoint::posterior_x_given_u(int u) const {
  const Dist xy = posterior_xy_given_u(u);
  std::vector<double> q(m(), 0.0);
  for (int x = 0; x < m(); ++x)
    for (int y = 0; y < l(); ++y) q[x] += xy[std::size_t(x) * l() + y];
  return Dist(std::move(q));
}

double mutual_information(const AuxJoint& a, MiPair pair) {
  // I = H(A) + H(U) - H(A,U) from the derived joint.
  const int n = pair == MiPair::YU ? a.l() : a.m();
  std::vector<double> joint(std::size_t(n) * a.k(), 0.0);
  for (int x = 0; x < a.m(); ++x)
    for (int y = 0; y < a.l(); ++y)
      for (int u = 0; u < a.k(); ++u) {
        const int i = pair == MiPair::YU ? y : x;
        joint[std::size_t(i) * a.k() + u] += a.joint(x, y, u);
      }
  std::vector<double> pa(n, 0.0), pu(a.k(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int u = 0; u < a.k(); ++u) {
      pa[i] += joint[std::size_t(i) * a.k() + u];
      pu[u] += joint[std::size_t(i) * a.k() + u];
    }
  const double mi = entropy(Dist(std::move(pa))) + entropy(Dist(std::move(pu))) -
                    entropy(Dist(std::move(joint)));
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace mtsc
