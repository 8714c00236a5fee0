#include "mtsc/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "mtsc/region_jd.hpp"
#include "mtsc/rng.hpp"

namespace mtsc {

namespace {

constexpr std::uint64_t kEnumGuard = std::uint64_t(1) << 20;
constexpr std::uint64_t kStreamSource = 1;
constexpr std::uint64_t kStreamBinMain = 2;
constexpr std::uint64_t kStreamBinX = 3;
constexpr std::uint64_t kStreamBinY = 4;
constexpr std::uint64_t kStreamCodebook = 5;
constexpr double kZ95 = 1.959963984540054;

void check_config(const SimConfig& cfg) {
  if (cfg.n < 1) throw ValidationError("SimConfig: n must be >= 1");
  if (!(cfg.eps > 0.0)) throw ValidationError("SimConfig: eps must be > 0");
  if (cfg.trials < 1) throw ValidationError("SimConfig: trials must be >= 1");
  if (!(cfg.clamp > 0.0)) throw ValidationError("SimConfig: clamp must be > 0");
}

std::uint64_t checked_space(int base, int len, const char* what) {
  std::uint64_t v = 1;
  for (int i = 0; i < len; ++i) {
    if (v > kEnumGuard / std::uint64_t(base))
      throw EnumerationTooLarge(std::string(what) +
                                ": sequence space exceeds the 2^20 guard");
    v *= std::uint64_t(base);
  }
  return v;
}

int ceil_log2(std::uint64_t space) {
  return space <= 1 ? 0 : std::bit_width(space - 1);
}

// Bin-index width: ceil(len*rate) bits, capped so the bin count never
// exceeds the sequence space.
int capped_bin_bits(int len, double rate_per_symbol, std::uint64_t space) {
  if (len <= 0) return 0;
  const int want = int(std::ceil(double(len) * rate_per_symbol - 1e-9));
  return std::clamp(want, 0, ceil_log2(space));
}

// i.i.d. sampling of (x, y) pairs from a joint pmf.
class SourceSampler {
 public:
  explicit SourceSampler(const JointPmf& p) : m_(p.m()), l_(p.l()) {
    cdf_.reserve(std::size_t(m_) * l_);
    double acc = 0.0;
    for (int x = 0; x < m_; ++x)
      for (int y = 0; y < l_; ++y) {
        acc += p(x, y);
        cdf_.push_back(acc);
      }
    cdf_.back() = 1.0;
  }

  void sample(int n, std::mt19937_64& rng, std::vector<int>& xs,
              std::vector<int>& ys) const {
    xs.resize(static_cast<std::size_t>(n));
    ys.resize(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const double u = uni(rng);
      const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      const int idx = int(it - cdf_.begin());
      xs[std::size_t(i)] = idx / l_;
      ys[std::size_t(i)] = idx % l_;
    }
  }

 private:
  int m_, l_;
  std::vector<double> cdf_;
};

struct TrialStats {
  double sum = 0.0, sumsq = 0.0;
  long trials = 0, errors = 0, clamped = 0, symbols = 0;

  void add(double block_mean, bool error, int clamped_syms, int total_syms) {
    sum += block_mean;
    sumsq += block_mean * block_mean;
    trials += 1;
    errors += error ? 1 : 0;
    clamped += clamped_syms;
    symbols += total_syms;
  }

  SimResult result(std::vector<double> rates) const {
    SimResult r;
    r.trials_run = int(trials);
    r.mean_distortion = sum / double(trials);
    r.block_error_rate = double(errors) / double(trials);
    r.clamped_fraction = symbols > 0 ? double(clamped) / double(symbols) : 0.0;
    if (trials > 1) {
      const double var =
          std::max(0.0, (sumsq - sum * sum / double(trials)) /
                            double(trials - 1));
      r.ci_halfwidth = kZ95 * std::sqrt(var / double(trials));
    }
    r.realized_rates = std::move(rates);
    return r;
  }
};

struct BlockScore {
  double mean = 0.0;
  int clamped = 0;
};

// Per-symbol clamp-aware scoring; a missing reproduction scores the clamp.
BlockScore score_block(const SoftBlock& block, std::span<const int> xs,
                       std::span<const int> ys, double clamp) {
  BlockScore s;
  for (std::size_t i = 0; i < block.size(); ++i) {
    double d;
    if (!block[i]) {
      d = clamp;
      ++s.clamped;
    } else {
      d = block[i]->kind() == Support::JointXY
              ? symbol_distortion(xs[i], ys[i], *block[i])
              : symbol_distortion(xs[i], std::nullopt, *block[i]);
      if (d > clamp) {
        d = clamp;
        ++s.clamped;
      }
    }
    s.mean += d;
  }
  s.mean /= double(block.size());
  return s;
}

// Unique-candidate search: among bin members passing the cost threshold,
// exactly one wins; a singleton bin decodes directly (vacuously unique);
// anything else is a decoding failure.
std::optional<std::uint64_t> unique_in_bin(
    const BinAssignment& bins, std::uint64_t bin,
    const std::function<double(std::uint64_t)>& cost, double threshold) {
  const std::vector<std::uint32_t> members = bins.members(bin);
  if (members.size() == 1) return members.front();
  std::optional<std::uint64_t> found;
  for (std::uint32_t cand : members) {
    if (cost(cand) <= threshold) {
      if (found) return std::nullopt;  // tie
      found = cand;
    }
  }
  return found;
}

Reproduction point_mass_x(int m, int x) {
  std::vector<double> q(std::size_t(m), 0.0);
  q[std::size_t(x)] = 1.0;
  return Reproduction::marginal_x(m, Dist(std::move(q)));
}

Reproduction point_mass_joint(int m, int l, int x, int y) {
  std::vector<double> q(std::size_t(m) * l, 0.0);
  q[std::size_t(x) * l + y] = 1.0;
  return Reproduction::joint_xy(m, l, Dist(std::move(q)));
}

std::vector<double> posterior_or_uniform(const JointPmf& p, Axis axis,
                                         int symbol) {
  const int n_other = axis == Axis::Y ? p.m() : p.l();
  try {
    return posterior(p, axis, symbol).values();
  } catch (const ZeroProbabilityCondition&) {
    return std::vector<double>(std::size_t(n_other), 1.0 / double(n_other));
  }
}

}  // namespace

BinAssignment::BinAssignment(std::uint64_t space, int bits, std::uint64_t seed)
    : space_(space), bits_(bits), seed_(seed) {
  if (space < 1) throw ValidationError("BinAssignment: empty space");
  if (bits < 0 || bits > 40)
    throw ValidationError("BinAssignment: bit width out of range");
  mask_ = bin_count() - 1;
  injective_ = space_ <= bin_count();
  if (injective_) {
    mul_ = splitmix64(seed) | 1;  // odd => bijective mod 2^bits
    add_ = splitmix64(seed + 1);
    inv_ = mul_;
    for (int i = 0; i < 6; ++i) inv_ *= 2 - mul_ * inv_;
  } else {
    // Hash binning; space is small enough to index members up front.
    if (space_ > kEnumGuard)
      throw EnumerationTooLarge("BinAssignment: space exceeds the 2^20 guard");
    std::vector<std::uint32_t> counts(bin_count() + 1, 0);
    for (std::uint64_t i = 0; i < space_; ++i) ++counts[bin_of(i) + 1];
    for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
    bucket_offsets_ = counts;
    bucket_items_.resize(space_);
    std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
    for (std::uint64_t i = 0; i < space_; ++i)
      bucket_items_[cursor[bin_of(i)]++] = std::uint32_t(i);
  }
}

std::uint64_t BinAssignment::bin_of(std::uint64_t seq) const {
  if (injective_) return (mul_ * seq + add_) & mask_;
  return splitmix64(seed_ ^ (seq * 0x9E3779B97F4A7C15ull)) & mask_;
}

std::vector<std::uint32_t> BinAssignment::members(std::uint64_t bin) const {
  if (injective_) {
    const std::uint64_t cand = (inv_ * (bin - add_)) & mask_;
    if (cand < space_) return {std::uint32_t(cand)};
    return {};
  }
  return std::vector<std::uint32_t>(
      bucket_items_.begin() + bucket_offsets_[bin],
      bucket_items_.begin() + bucket_offsets_[bin + 1]);
}

std::uint64_t pack_seq(std::span<const int> seq, int base) {
  std::uint64_t idx = 0;
  for (std::size_t i = seq.size(); i-- > 0;)
    idx = idx * std::uint64_t(base) + std::uint64_t(seq[i]);
  return idx;
}

void unpack_seq(std::uint64_t idx, int base, std::span<int> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = int(idx % std::uint64_t(base));
    idx /= std::uint64_t(base);
  }
}

// ---------------------------------------------------------------------------
// WzCode

WzCode::WzCode(JointPmf p, SimConfig cfg, double rate)
    : p_(std::move(p)), cfg_(cfg), rate_(rate) {
  check_config(cfg_);
  hxy_ = conditional_entropy(p_, Axis::Y);
  if (rate_ < 0.0) throw ValidationError("simulate_wz: rate must be >= 0");
  if (rate_ > hxy_ + cfg_.eps + kProbTol)
    throw ValidationError("simulate_wz: rate exceeds H(X|Y) + eps");
  const double frac = std::min(1.0, rate_ / (hxy_ + cfg_.eps));
  n1_ = std::min(cfg_.n, int(std::ceil(frac * cfg_.n - 1e-9)));
  const std::uint64_t space = checked_space(p_.m(), n1_, "simulate_wz");
  bits_ = capped_bin_bits(n1_, hxy_ + cfg_.eps, space);
  bins_ = BinAssignment(space, bits_, derive_seed(cfg_.seed, kStreamBinX, 0));
  threshold_ = double(n1_) * (hxy_ + cfg_.eps) + 1e-12;

  cost_.assign(std::size_t(p_.m()), std::vector<double>(static_cast<std::size_t>(p_.l())));
  for (int y = 0; y < p_.l(); ++y) {
    const std::vector<double> post = posterior_or_uniform(p_, Axis::Y, y);
    for (int x = 0; x < p_.m(); ++x) cost_[std::size_t(x)][std::size_t(y)] = surprisal(post[std::size_t(x)]);
    posterior_.push_back(Reproduction::marginal_x(p_.m(), Dist(post)));
  }
  for (int x = 0; x < p_.m(); ++x) point_.push_back(point_mass_x(p_.m(), x));
}

WzCode::Msg WzCode::encode(std::span<const int> xs) const {
  return Msg{bins_.bin_of(pack_seq(xs.subspan(0, std::size_t(n1_)), p_.m()))};
}

SoftBlock WzCode::decode(const Msg& msg, std::span<const int> ys,
                         bool& error) const {
  error = false;
  SoftBlock out(static_cast<std::size_t>(cfg_.n));
  std::vector<int> cand(static_cast<std::size_t>(n1_));
  std::optional<std::uint64_t> decoded;
  if (n1_ > 0) {
    auto cost = [&](std::uint64_t seq) {
      unpack_seq(seq, p_.m(), cand);
      double total = 0.0;
      for (int i = 0; i < n1_; ++i) {
        total += cost_[std::size_t(cand[std::size_t(i)])][std::size_t(ys[std::size_t(i)])];
        if (total > threshold_) break;
      }
      return total;
    };
    decoded = unique_in_bin(bins_, msg.bin, cost, threshold_);
    if (!decoded) error = true;
  }
  if (decoded) unpack_seq(*decoded, p_.m(), cand);
  for (int i = 0; i < cfg_.n; ++i) {
    if (i < n1_)
      out[std::size_t(i)] = decoded
                                ? std::optional<Reproduction>(point_[std::size_t(cand[std::size_t(i)])])
                                : std::nullopt;
    else
      out[std::size_t(i)] = posterior_[std::size_t(ys[std::size_t(i)])];
  }
  return out;
}

SimResult WzCode::run(std::vector<double>* per_trial) const {
  SourceSampler sampler(p_);
  TrialStats stats;
  std::vector<int> xs, ys;
  for (int t = 0; t < cfg_.trials; ++t) {
    std::mt19937_64 rng(derive_seed(cfg_.seed, kStreamSource, std::uint64_t(t)));
    sampler.sample(cfg_.n, rng, xs, ys);
    bool error = false;
    const SoftBlock block = decode(encode(xs), ys, error);
    const BlockScore s = score_block(block, xs, ys, cfg_.clamp);
    stats.add(s.mean, error, s.clamped, cfg_.n);
    if (per_trial) per_trial->push_back(s.mean);
  }
  return stats.result({realized_rate()});
}

// ---------------------------------------------------------------------------
// JdTimeshareCode

JdTimeshareCode::JdTimeshareCode(JointPmf p, SimConfig cfg, double d,
                                 double mix)
    : p_(std::move(p)), cfg_(cfg), d_(d), mix_(mix) {
  check_config(cfg_);
  if (d_ < 0.0) throw ValidationError("simulate_jd_timeshare: d must be >= 0");
  if (mix_ < 0.0 || mix_ > 1.0)
    throw ValidationError("simulate_jd_timeshare: mix must lie in [0, 1]");

  const double hx = entropy(p_.marginal_x());
  const double hy = entropy(p_.marginal_y());
  const double hxgy = conditional_entropy(p_, Axis::Y);
  const double hygx = conditional_entropy(p_, Axis::X);

  // Half 0 operates at corner P1 (Y lossless, X through the WZ machinery),
  // half 1 at P2 with the roles swapped.
  const CornerPair corners = jd_corner_points(p_, d_);
  const int nh = int(std::floor(mix_ * cfg_.n + 1e-9));
  const std::array<int, 2> begins = {0, nh};
  const std::array<int, 2> lens = {nh, cfg_.n - nh};
  const std::array<double, 2> side_budgets = {corners.p1.ry, corners.p2.rx};
  const std::array<double, 2> main_budgets = {corners.p1.rx, corners.p2.ry};

  for (int h = 0; h < 2; ++h) {
    Half& half = halves_[std::size_t(h)];
    half.begin = begins[std::size_t(h)];
    half.len = lens[std::size_t(h)];
    half.x_is_side = h == 1;
    half.side_base = half.x_is_side ? p_.m() : p_.l();
    half.main_base = half.x_is_side ? p_.l() : p_.m();
    if (half.len == 0) continue;

    const double h_side = half.x_is_side ? hx : hy;
    const double h_main_side = half.x_is_side ? hygx : hxgy;
    const double side_budget = side_budgets[std::size_t(h)];
    const double main_budget = main_budgets[std::size_t(h)];

    const double side_frac =
        std::min(1.0, side_budget / (h_side + cfg_.eps));
    half.ny = std::min(half.len,
                       int(std::ceil(side_frac * half.len - 1e-9)));

    // Typical-set index code for the side prefix.
    const std::uint64_t side_space =
        checked_space(half.side_base, half.ny, "simulate_jd_timeshare");
    const Dist side_marg = half.x_is_side ? p_.marginal_x() : p_.marginal_y();
    const double side_threshold =
        double(half.ny) * (h_side + cfg_.eps) + 1e-12;
    std::vector<int> buf(static_cast<std::size_t>(half.ny));
    for (std::uint64_t s = 0; s < side_space; ++s) {
      unpack_seq(s, half.side_base, buf);
      double total = 0.0;
      for (int i = 0; i < half.ny && total <= side_threshold; ++i)
        total += surprisal(side_marg[std::size_t(buf[std::size_t(i)])]);
      if (total <= side_threshold) half.typical.push_back(std::uint32_t(s));
    }
    if (half.typical.empty()) half.ny = 0;
    half.side_bits =
        half.ny == 0 ? 0 : ceil_log2(std::uint64_t(half.typical.size()));

    const double main_frac =
        std::min(1.0, main_budget / (h_main_side + cfg_.eps));
    half.nx = std::min(half.ny,
                       int(std::ceil(main_frac * half.ny - 1e-9)));
    const std::uint64_t main_space =
        checked_space(half.main_base, half.nx, "simulate_jd_timeshare");
    half.main_bits =
        capped_bin_bits(half.nx, h_main_side + cfg_.eps, main_space);
    half.main_bins =
        BinAssignment(main_space, half.main_bits,
                      derive_seed(cfg_.seed, kStreamBinMain, std::uint64_t(h)));
    half.main_threshold =
        double(half.nx) * (h_main_side + cfg_.eps) + 1e-12;
  }

  for (int x = 0; x < p_.m(); ++x)
    for (int y = 0; y < p_.l(); ++y)
      point_joint_.push_back(point_mass_joint(p_.m(), p_.l(), x, y));
  for (int y = 0; y < p_.l(); ++y) {
    const std::vector<double> post = posterior_or_uniform(p_, Axis::Y, y);
    std::vector<double> q(std::size_t(p_.m()) * p_.l(), 0.0);
    for (int x = 0; x < p_.m(); ++x) q[std::size_t(x) * p_.l() + y] = post[std::size_t(x)];
    soft_given_y_.push_back(Reproduction::joint_xy(p_.m(), p_.l(), Dist(std::move(q))));
  }
  for (int x = 0; x < p_.m(); ++x) {
    const std::vector<double> post = posterior_or_uniform(p_, Axis::X, x);
    std::vector<double> q(std::size_t(p_.m()) * p_.l(), 0.0);
    for (int y = 0; y < p_.l(); ++y) q[std::size_t(x) * p_.l() + y] = post[std::size_t(y)];
    soft_given_x_.push_back(Reproduction::joint_xy(p_.m(), p_.l(), Dist(std::move(q))));
  }
  prior_.push_back(Reproduction::joint_xy(p_.m(), p_.l(), p_.flattened()));

  cost_xgy_.assign(std::size_t(p_.m()), std::vector<double>(static_cast<std::size_t>(p_.l())));
  cost_ygx_.assign(std::size_t(p_.l()), std::vector<double>(static_cast<std::size_t>(p_.m())));
  for (int y = 0; y < p_.l(); ++y) {
    const std::vector<double> post = posterior_or_uniform(p_, Axis::Y, y);
    for (int x = 0; x < p_.m(); ++x) cost_xgy_[std::size_t(x)][std::size_t(y)] = surprisal(post[std::size_t(x)]);
  }
  for (int x = 0; x < p_.m(); ++x) {
    const std::vector<double> post = posterior_or_uniform(p_, Axis::X, x);
    for (int y = 0; y < p_.l(); ++y) cost_ygx_[std::size_t(y)][std::size_t(x)] = surprisal(post[std::size_t(y)]);
  }
}

JdTimeshareCode::Msg JdTimeshareCode::encode(std::span<const int> xs,
                                             std::span<const int> ys) const {
  Msg msg;
  for (int h = 0; h < 2; ++h) {
    const Half& half = halves_[std::size_t(h)];
    HalfMsg& out = msg.halves[std::size_t(h)];
    if (half.len == 0) continue;
    const std::span<const int> side =
        (half.x_is_side ? xs : ys).subspan(std::size_t(half.begin), std::size_t(half.ny));
    const std::span<const int> main =
        (half.x_is_side ? ys : xs).subspan(std::size_t(half.begin), std::size_t(half.nx));
    if (half.ny > 0) {
      const std::uint64_t packed = pack_seq(side, half.side_base);
      const auto it = std::lower_bound(half.typical.begin(),
                                       half.typical.end(), packed);
      if (it == half.typical.end() || *it != packed) {
        out.side_ok = false;
      } else {
        out.side_rank = std::uint64_t(it - half.typical.begin());
      }
    }
    if (half.nx > 0 && out.side_ok)
      out.main_bin = half.main_bins.bin_of(pack_seq(main, half.main_base));
  }
  return msg;
}

void JdTimeshareCode::decode_half(const Half& half, const HalfMsg& msg,
                                  SoftBlock& out, bool& error) const {
  if (half.len == 0) return;
  if (half.ny > 0 && !msg.side_ok) {
    // Atypical side sequence: everything that depended on it is lost; the
    // prior-mode tail is still emitted.
    error = true;
    for (int i = half.ny; i < half.len; ++i)
      out[std::size_t(half.begin + i)] = prior_.front();
    return;
  }
  std::vector<int> side(static_cast<std::size_t>(half.ny));
  if (half.ny > 0)
    unpack_seq(half.typical[std::size_t(msg.side_rank)], half.side_base, side);

  std::vector<int> main(static_cast<std::size_t>(half.nx));
  std::optional<std::uint64_t> decoded;
  if (half.nx > 0) {
    const auto& cost_tbl = half.x_is_side ? cost_ygx_ : cost_xgy_;
    std::vector<int> cand(static_cast<std::size_t>(half.nx));
    auto cost = [&](std::uint64_t seq) {
      unpack_seq(seq, half.main_base, cand);
      double total = 0.0;
      for (int i = 0; i < half.nx; ++i) {
        total += cost_tbl[std::size_t(cand[std::size_t(i)])][std::size_t(side[std::size_t(i)])];
        if (total > half.main_threshold) break;
      }
      return total;
    };
    decoded = unique_in_bin(half.main_bins, msg.main_bin, cost,
                            half.main_threshold);
    if (!decoded)
      error = true;
    else
      unpack_seq(*decoded, half.main_base, main);
  }

  for (int i = 0; i < half.len; ++i) {
    const std::size_t pos = std::size_t(half.begin + i);
    if (i < half.nx) {
      if (!decoded) continue;  // stays nullopt, scored at the clamp
      const int x = half.x_is_side ? side[std::size_t(i)] : main[std::size_t(i)];
      const int y = half.x_is_side ? main[std::size_t(i)] : side[std::size_t(i)];
      out[pos] = point_joint_[std::size_t(x) * p_.l() + y];
    } else if (i < half.ny) {
      const int s = side[std::size_t(i)];
      out[pos] = half.x_is_side ? soft_given_x_[std::size_t(s)]
                                : soft_given_y_[std::size_t(s)];
    } else {
      out[pos] = prior_.front();
    }
  }
}

SoftBlock JdTimeshareCode::decode(const Msg& msg, bool& error) const {
  error = false;
  SoftBlock out(static_cast<std::size_t>(cfg_.n));
  for (int h = 0; h < 2; ++h)
    decode_half(halves_[std::size_t(h)], msg.halves[std::size_t(h)], out, error);
  return out;
}

double JdTimeshareCode::rate_x() const {
  const double bits = double(halves_[0].main_bits + halves_[1].side_bits);
  return bits / double(cfg_.n);
}

double JdTimeshareCode::rate_y() const {
  const double bits = double(halves_[0].side_bits + halves_[1].main_bits);
  return bits / double(cfg_.n);
}

SimResult JdTimeshareCode::run(std::vector<double>* per_trial) const {
  SourceSampler sampler(p_);
  TrialStats stats;
  std::vector<int> xs, ys;
  for (int t = 0; t < cfg_.trials; ++t) {
    std::mt19937_64 rng(derive_seed(cfg_.seed, kStreamSource, std::uint64_t(t)));
    sampler.sample(cfg_.n, rng, xs, ys);
    bool error = false;
    const SoftBlock block = decode(encode(xs, ys), error);
    const BlockScore s = score_block(block, xs, ys, cfg_.clamp);
    stats.add(s.mean, error, s.clamped, cfg_.n);
    if (per_trial) per_trial->push_back(s.mean);
  }
  return stats.result({rate_x(), rate_y()});
}

// ---------------------------------------------------------------------------
// SmswCode

SmswCode::SmswCode(JointPmf p, SimConfig cfg, double d, double mix,
                   DistortionSplit split, SmswOptions opts)
    : p_(std::move(p)),
      cfg_(cfg),
      split_(split),
      inner_(p_, cfg, d, mix) {
  if (split_.d_x < 0.0 || split_.d_y_given_x < 0.0)
    throw ValidationError("simulate_smsw: split components must be >= 0");
  const std::uint64_t space_x = checked_space(p_.m(), cfg_.n, "simulate_smsw");
  const std::uint64_t space_y = checked_space(p_.l(), cfg_.n, "simulate_smsw");
  bits_x_ = opts.forced_extra_bits
                ? opts.forced_extra_bits->first
                : capped_bin_bits(cfg_.n, split_.d_x + 3.0 * cfg_.eps, space_x);
  bits_y_ = opts.forced_extra_bits
                ? opts.forced_extra_bits->second
                : capped_bin_bits(cfg_.n, split_.d_y_given_x + 3.0 * cfg_.eps,
                                  space_y);
  bins_x_ = BinAssignment(space_x, bits_x_, derive_seed(cfg_.seed, kStreamBinX, 1));
  bins_y_ = BinAssignment(space_y, bits_y_, derive_seed(cfg_.seed, kStreamBinY, 1));
}

SimResult SmswCode::run(std::vector<double>* per_trial) const {
  SourceSampler sampler(p_);
  TrialStats stats;
  std::vector<int> xs, ys;
  const double thr_x = double(cfg_.n) * (split_.d_x + cfg_.eps) - 1e-12;
  const double thr_y = double(cfg_.n) * (split_.d_y_given_x + cfg_.eps) - 1e-12;
  std::vector<std::vector<double>> marg(static_cast<std::size_t>(cfg_.n));
  for (int t = 0; t < cfg_.trials; ++t) {
    std::mt19937_64 rng(derive_seed(cfg_.seed, kStreamSource, std::uint64_t(t)));
    sampler.sample(cfg_.n, rng, xs, ys);
    bool inner_error = false;
    const SoftBlock block = inner_.decode(inner_.encode(xs, ys), inner_error);
    const BlockScore s = score_block(block, xs, ys, cfg_.clamp);

    bool error = inner_error;
    if (!error) {
      for (int i = 0; i < cfg_.n; ++i)
        marg[std::size_t(i)] = block[std::size_t(i)]->x_marginal().values();
      // Stage 1: the unique X^n in its bin within the marginal budget.
      std::vector<int> cand(static_cast<std::size_t>(cfg_.n));
      auto cost_x = [&](std::uint64_t seq) {
        unpack_seq(seq, p_.m(), cand);
        double total = 0.0;
        for (int i = 0; i < cfg_.n; ++i) {
          total += surprisal(marg[std::size_t(i)][std::size_t(cand[std::size_t(i)])]);
          if (total > thr_x) break;
        }
        return total;
      };
      const auto x_hat = unique_in_bin(
          bins_x_, bins_x_.bin_of(pack_seq(xs, p_.m())), cost_x, thr_x);
      if (!x_hat || *x_hat != pack_seq(xs, p_.m())) {
        error = true;
      } else {
        std::vector<int> xh(static_cast<std::size_t>(cfg_.n));
        unpack_seq(*x_hat, p_.m(), xh);
        // Stage 2: the unique Y^n within the conditional budget given x_hat.
        auto cost_y = [&](std::uint64_t seq) {
          unpack_seq(seq, p_.l(), cand);
          double total = 0.0;
          for (int i = 0; i < cfg_.n; ++i) {
            total += surprisal(block[std::size_t(i)]->cond_y_given_x(
                xh[std::size_t(i)], cand[std::size_t(i)]));
            if (total > thr_y) break;
          }
          return total;
        };
        const auto y_hat = unique_in_bin(
            bins_y_, bins_y_.bin_of(pack_seq(ys, p_.l())), cost_y, thr_y);
        if (!y_hat || *y_hat != pack_seq(ys, p_.l())) error = true;
      }
    }
    stats.add(s.mean, error, s.clamped, cfg_.n);
    if (per_trial) per_trial->push_back(error ? 1.0 : 0.0);
  }
  return stats.result({inner_.rate_x() + double(bits_x_) / double(cfg_.n),
                       inner_.rate_y() + double(bits_y_) / double(cfg_.n)});
}

// ---------------------------------------------------------------------------
// XdCode

XdCode::XdCode(JointPmf p, AuxChannel channel, SimConfig cfg, double dx)
    : aux_(std::move(p), std::move(channel)),
      cfg_(cfg),
      dx_(dx),
      prior_(Reproduction::marginal_x(aux_.m(), aux_.base().marginal_x())) {
  check_config(cfg_);
  if (dx_ < 0.0) throw ValidationError("simulate_xd: dx must be >= 0");
  const JointPmf& base = aux_.base();
  hxu_ = std::max(0.0, entropy(base.marginal_x()) -
                           mutual_information(aux_, MiPair::XU));
  rate_u_ = mutual_information(aux_, MiPair::YU);
  // H(Y,U) for the joint-typicality encoder.
  {
    std::vector<double> pyu;
    const Dist py = base.marginal_y();
    for (int y = 0; y < aux_.l(); ++y)
      for (int u = 0; u < aux_.k(); ++u)
        pyu.push_back(py[std::size_t(y)] * aux_.channel()(y, u));
    h_yu_ = entropy(Dist(std::move(pyu)));
  }

  y_bits_ = int(std::ceil(double(cfg_.n) * (rate_u_ + cfg_.eps) - 1e-9));
  if (y_bits_ < 0) y_bits_ = 0;
  if (y_bits_ > 22)
    throw EnumerationTooLarge("simulate_xd: codebook exceeds the guard");
  cb_size_ = std::uint64_t(1) << y_bits_;

  // Degenerate branch: dx >= H(X|U) is covered by posterior decoding alone.
  n1_ = dx_ >= hxu_ - 1e-12
            ? 0
            : int(std::floor((1.0 - dx_ / hxu_) * cfg_.n + 1e-9));
  const std::uint64_t space = checked_space(aux_.m(), n1_, "simulate_xd");
  x_bits_ = capped_bin_bits(n1_, hxu_ + 2.0 * cfg_.eps, space);
  x_bins_ = BinAssignment(space, x_bits_, derive_seed(cfg_.seed, kStreamBinX, 2));

  enc_threshold_ = double(cfg_.n) * (h_yu_ + cfg_.eps) + 1e-12;
  dec_threshold_ = double(n1_) * (hxu_ + cfg_.eps) + 1e-12;

  const Dist py = base.marginal_y();
  cost_yu_.assign(std::size_t(aux_.l()), std::vector<double>(static_cast<std::size_t>(aux_.k())));
  for (int y = 0; y < aux_.l(); ++y)
    for (int u = 0; u < aux_.k(); ++u)
      cost_yu_[std::size_t(y)][std::size_t(u)] =
          surprisal(py[std::size_t(y)] * aux_.channel()(y, u));

  const Dist pu = aux_.u_marginal();
  cost_xu_.assign(std::size_t(aux_.m()), std::vector<double>(static_cast<std::size_t>(aux_.k())));
  for (int u = 0; u < aux_.k(); ++u) {
    std::vector<double> post(std::size_t(aux_.m()),
                             1.0 / double(aux_.m()));
    if (pu[std::size_t(u)] > 0.0)
      post = aux_.posterior_x_given_u(u).values();
    for (int x = 0; x < aux_.m(); ++x)
      cost_xu_[std::size_t(x)][std::size_t(u)] = surprisal(post[std::size_t(x)]);
    posterior_u_.push_back(Reproduction::marginal_x(aux_.m(), Dist(post)));
  }
  for (int x = 0; x < aux_.m(); ++x) point_.push_back(point_mass_x(aux_.m(), x));

  // The fixed i.i.d. U^n codebook shared by all trials.
  codebook_.resize(std::size_t(cb_size_) * std::size_t(cfg_.n));
  std::vector<double> cdf(pu.values().begin(), pu.values().end());
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
  cdf.back() = 1.0;
  std::mt19937_64 rng(derive_seed(cfg_.seed, kStreamCodebook, 0));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < codebook_.size(); ++i) {
    const double u = uni(rng);
    codebook_[i] = std::uint8_t(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
}

XdCode::Msg XdCode::encode(std::span<const int> xs,
                           std::span<const int> ys) const {
  Msg msg;
  msg.enc_ok = false;
  for (std::uint64_t c = 0; c < cb_size_; ++c) {
    const std::uint8_t* cw = codebook_.data() + c * std::uint64_t(cfg_.n);
    double total = 0.0;
    for (int i = 0; i < cfg_.n; ++i) {
      total += cost_yu_[std::size_t(ys[std::size_t(i)])][std::size_t(cw[i])];
      if (total > enc_threshold_) break;
    }
    if (total <= enc_threshold_) {
      msg.u_index = c;
      msg.enc_ok = true;
      break;
    }
  }
  if (n1_ > 0)
    msg.x_bin = x_bins_.bin_of(pack_seq(xs.subspan(0, std::size_t(n1_)), aux_.m()));
  return msg;
}

SoftBlock XdCode::decode(const Msg& msg, bool& error) const {
  error = !msg.enc_ok;
  SoftBlock out(static_cast<std::size_t>(cfg_.n));
  const std::uint8_t* cw =
      msg.enc_ok ? codebook_.data() + msg.u_index * std::uint64_t(cfg_.n)
                 : nullptr;

  std::optional<std::uint64_t> decoded;
  if (n1_ > 0) {
    if (cw) {
      std::vector<int> cand(static_cast<std::size_t>(n1_));
      auto cost = [&](std::uint64_t seq) {
        unpack_seq(seq, aux_.m(), cand);
        double total = 0.0;
        for (int i = 0; i < n1_; ++i) {
          total += cost_xu_[std::size_t(cand[std::size_t(i)])][std::size_t(cw[i])];
          if (total > dec_threshold_) break;
        }
        return total;
      };
      decoded = unique_in_bin(x_bins_, msg.x_bin, cost, dec_threshold_);
    } else if (x_bins_.injective()) {
      // No codeword, but the bin index alone pins the prefix.
      const auto members = x_bins_.members(msg.x_bin);
      if (members.size() == 1) decoded = members.front();
    }
    if (!decoded) error = true;
  }

  std::vector<int> prefix(static_cast<std::size_t>(n1_));
  if (decoded) unpack_seq(*decoded, aux_.m(), prefix);
  for (int i = 0; i < cfg_.n; ++i) {
    if (i < n1_) {
      if (decoded) out[std::size_t(i)] = point_[std::size_t(prefix[std::size_t(i)])];
    } else {
      out[std::size_t(i)] =
          cw ? posterior_u_[std::size_t(cw[i])] : prior_;
    }
  }
  return out;
}

SimResult XdCode::run(std::vector<double>* per_trial) const {
  SourceSampler sampler(aux_.base());
  TrialStats stats;
  std::vector<int> xs, ys;
  for (int t = 0; t < cfg_.trials; ++t) {
    std::mt19937_64 rng(derive_seed(cfg_.seed, kStreamSource, std::uint64_t(t)));
    sampler.sample(cfg_.n, rng, xs, ys);
    bool error = false;
    const SoftBlock block = decode(encode(xs, ys), error);
    const BlockScore s = score_block(block, xs, {}, cfg_.clamp);
    stats.add(s.mean, error, s.clamped, cfg_.n);
    if (per_trial) per_trial->push_back(s.mean);
  }
  return stats.result({rate_x(), rate_y()});
}

// ---------------------------------------------------------------------------

SimResult simulate_wz(const JointPmf& p, const SimConfig& cfg, double rate,
                      std::vector<double>* per_trial) {
  return WzCode(p, cfg, rate).run(per_trial);
}

SimResult simulate_rd_point(const Dist& p_x, const SimConfig& cfg, double rate,
                            std::vector<double>* per_trial) {
  // A one-column joint pmf turns the WZ machinery into the point-to-point
  // code: the side information is constant.
  return WzCode(JointPmf(int(p_x.size()), 1, p_x.values()), cfg, rate)
      .run(per_trial);
}

SimResult simulate_jd_timeshare(const JointPmf& p, const SimConfig& cfg,
                                double d, double mix,
                                std::vector<double>* per_trial) {
  return JdTimeshareCode(p, cfg, d, mix).run(per_trial);
}

SimResult simulate_smsw(const JointPmf& p, const SimConfig& cfg, double d,
                        double mix, const DistortionSplit& split,
                        const SmswOptions& opts) {
  return SmswCode(p, cfg, d, mix, split, opts).run();
}

SimResult simulate_xd(const JointPmf& p, const AuxChannel& channel,
                      const SimConfig& cfg, double dx,
                      std::vector<double>* per_trial) {
  return XdCode(p, channel, cfg, dx).run(per_trial);
}

double repeat_for_peak(std::span<const double> samples, double budget,
                       double eps, int window) {
  if (samples.empty()) throw ValidationError("repeat_for_peak: no samples");
  if (window < 1 || std::size_t(window) > samples.size())
    throw ValidationError("repeat_for_peak: window out of range");
  double acc = 0.0;
  for (int i = 0; i < window; ++i) acc += samples[std::size_t(i)];
  long exceed = 0;
  const long windows = long(samples.size()) - window + 1;
  for (long w = 0;; ++w) {
    if (acc / double(window) > budget + eps) ++exceed;
    if (w + 1 >= windows) break;
    acc += samples[std::size_t(w + window)] - samples[std::size_t(w)];
  }
  return double(exceed) / double(windows);
}

}  // namespace mtsc
