#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mtsc/discrete.hpp"
#include "mtsc/logloss.hpp"

namespace mtsc {

/// Shared knobs for every Monte Carlo code simulation. eps is the slack used
/// for bin rates and typicality thresholds; clamp caps a single symbol's
/// scored distortion so a zero-mass event cannot destroy a mean.
struct SimConfig {
  int n = 1;
  double eps = 0.1;
  int trials = 1;
  std::uint64_t seed = 0;
  double clamp = 30.0;
};

struct SimResult {
  double mean_distortion = 0.0;
  double block_error_rate = 0.0;
  double clamped_fraction = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal approximation
  int trials_run = 0;
  std::vector<double> realized_rates;  // bits/symbol, per encoder

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Deterministic pseudorandom map from a sequence space onto 2^bits bins.
/// When the bin count covers the space the map is a seeded bijection, so
/// every bin holds at most one sequence; otherwise it is a seeded hash and
/// member lists are indexed up front.
class BinAssignment {
 public:
  BinAssignment() = default;
  BinAssignment(std::uint64_t space, int bits, std::uint64_t seed);

  int bits() const { return bits_; }
  std::uint64_t bin_count() const { return std::uint64_t(1) << bits_; }
  bool injective() const { return injective_; }
  std::uint64_t bin_of(std::uint64_t seq) const;
  std::vector<std::uint32_t> members(std::uint64_t bin) const;

 private:
  std::uint64_t space_ = 1;
  int bits_ = 0;
  std::uint64_t mask_ = 0;
  bool injective_ = true;
  std::uint64_t mul_ = 1, add_ = 0, inv_ = 1, seed_ = 0;
  std::vector<std::uint32_t> bucket_offsets_;
  std::vector<std::uint32_t> bucket_items_;
};

// Mixed-radix packing of symbol sequences; position 0 is least significant.
std::uint64_t pack_seq(std::span<const int> seq, int base);
void unpack_seq(std::uint64_t idx, int base, std::span<int> out);

/// Per-position soft outputs of a decoder; a missing entry marks a decoding
/// failure scored at the clamp value.
using SoftBlock = std::vector<std::optional<Reproduction>>;

/// Wyner-Ziv code under log-loss (decoder observes Y^n): time-shares a
/// Slepian-Wolf-binned lossless prefix against zero-rate posterior decoding.
class WzCode {
 public:
  WzCode(JointPmf p, SimConfig cfg, double rate);

  struct Msg {
    std::uint64_t bin = 0;
  };

  Msg encode(std::span<const int> xs) const;
  SoftBlock decode(const Msg& msg, std::span<const int> ys, bool& error) const;
  SimResult run(std::vector<double>* per_trial = nullptr) const;

  int lossless_len() const { return n1_; }
  double realized_rate() const { return double(bits_) / double(cfg_.n); }
  const JointPmf& pmf() const { return p_; }
  const SimConfig& config() const { return cfg_; }

 private:
  JointPmf p_;
  SimConfig cfg_;
  double rate_;
  double hxy_;
  int n1_ = 0;
  int bits_ = 0;
  BinAssignment bins_;
  double threshold_ = 0.0;
  std::vector<std::vector<double>> cost_;       // -log2 p(x|y)
  std::vector<Reproduction> posterior_;         // p(.|y) rows
  std::vector<Reproduction> point_;             // point masses on X
};

/// Claim-2 time-sharing code for the joint-distortion network: a P1-mode
/// prefix (side Y lossless, X through the WZ machinery) and a P2-mode
/// suffix with the roles swapped.
class JdTimeshareCode {
 public:
  JdTimeshareCode(JointPmf p, SimConfig cfg, double d, double mix);

  struct HalfMsg {
    std::uint64_t side_rank = 0;
    bool side_ok = true;
    std::uint64_t main_bin = 0;
  };
  struct Msg {
    std::array<HalfMsg, 2> halves;
  };

  Msg encode(std::span<const int> xs, std::span<const int> ys) const;
  SoftBlock decode(const Msg& msg, bool& error) const;
  SimResult run(std::vector<double>* per_trial = nullptr) const;

  double rate_x() const;
  double rate_y() const;
  const SimConfig& config() const { return cfg_; }

 private:
  struct Half {
    int begin = 0;
    int len = 0;
    bool x_is_side = false;
    int side_base = 0, main_base = 0;
    int ny = 0;  // side-lossless prefix length
    int nx = 0;  // main-lossless prefix length within the side prefix
    std::vector<std::uint32_t> typical;  // sorted typical side sequences
    int side_bits = 0;
    BinAssignment main_bins;
    int main_bits = 0;
    double main_threshold = 0.0;
  };

  void decode_half(const Half& h, const HalfMsg& msg, SoftBlock& out,
                   bool& error) const;

  JointPmf p_;
  SimConfig cfg_;
  double d_;
  double mix_;
  std::array<Half, 2> halves_;
  // Static reproductions: point masses, one-sided soft rows, and the prior.
  std::vector<Reproduction> point_joint_;    // m*l point masses
  std::vector<Reproduction> soft_given_y_;   // 1{y}*p(x|y)
  std::vector<Reproduction> soft_given_x_;   // 1{x}*p(y|x)
  std::vector<Reproduction> prior_;          // p(x,y)
  std::vector<std::vector<double>> cost_xgy_, cost_ygx_;
  std::vector<double> surp_x_, surp_y_;      // marginal surprisals
};

struct SmswOptions {
  // Overrides the Claim-1 extra-bin rates (split + 3 eps); used to drive the
  // bin count to 1 for the pigeonhole sanity direction.
  std::optional<std::pair<int, int>> forced_extra_bits;
};

/// Split-message Slepian-Wolf recovery on top of an embedded JD time-share
/// code: extra bins on X^n and Y^n, two-stage unique-distortion decoding.
class SmswCode {
 public:
  SmswCode(JointPmf p, SimConfig cfg, double d, double mix,
           DistortionSplit split, SmswOptions opts = {});

  SimResult run(std::vector<double>* per_trial = nullptr) const;
  int extra_bits_x() const { return bits_x_; }
  int extra_bits_y() const { return bits_y_; }

 private:
  JointPmf p_;
  SimConfig cfg_;
  DistortionSplit split_;
  JdTimeshareCode inner_;
  BinAssignment bins_x_, bins_y_;
  int bits_x_ = 0, bits_y_ = 0;
};

/// The appendix scheme for the X-distortion network: an i.i.d. U^n codebook
/// at the Y-encoder, binned X^n recovery, and time-sharing between lossless
/// operation and silent posterior decoding.
class XdCode {
 public:
  XdCode(JointPmf p, AuxChannel channel, SimConfig cfg, double dx);

  struct Msg {
    std::uint64_t u_index = 0;
    bool enc_ok = true;
    std::uint64_t x_bin = 0;
  };

  Msg encode(std::span<const int> xs, std::span<const int> ys) const;
  SoftBlock decode(const Msg& msg, bool& error) const;
  SimResult run(std::vector<double>* per_trial = nullptr) const;

  int lossless_len() const { return n1_; }
  double rate_x() const { return double(x_bits_) / double(cfg_.n); }
  double rate_y() const { return double(y_bits_) / double(cfg_.n); }
  double h_x_given_u() const { return hxu_; }

 private:
  AuxJoint aux_;
  SimConfig cfg_;
  double dx_;
  double hxu_ = 0.0, rate_u_ = 0.0, h_yu_ = 0.0;
  int n1_ = 0;
  int y_bits_ = 0;
  std::uint64_t cb_size_ = 0;
  std::vector<std::uint8_t> codebook_;
  BinAssignment x_bins_;
  int x_bits_ = 0;
  double enc_threshold_ = 0.0, dec_threshold_ = 0.0;
  std::vector<std::vector<double>> cost_yu_, cost_xu_;
  std::vector<Reproduction> posterior_u_;  // p(.|u)
  std::vector<Reproduction> point_;        // point masses on X
  Reproduction prior_;
};

SimResult simulate_wz(const JointPmf& p, const SimConfig& cfg, double rate,
                      std::vector<double>* per_trial = nullptr);
// The Y = empty specialization of simulate_wz.
SimResult simulate_rd_point(const Dist& p_x, const SimConfig& cfg, double rate,
                            std::vector<double>* per_trial = nullptr);
SimResult simulate_jd_timeshare(const JointPmf& p, const SimConfig& cfg,
                                double d, double mix,
                                std::vector<double>* per_trial = nullptr);
SimResult simulate_smsw(const JointPmf& p, const SimConfig& cfg, double d,
                        double mix, const DistortionSplit& split,
                        const SmswOptions& opts = {});
SimResult simulate_xd(const JointPmf& p, const AuxChannel& channel,
                      const SimConfig& cfg, double dx,
                      std::vector<double>* per_trial = nullptr);

// Empirical exceedance Pr{window-average > budget + eps} over rolling
// windows of `window` consecutive per-block distortions.
double repeat_for_peak(std::span<const double> samples, double budget,
                       double eps, int window);

}  // namespace mtsc
