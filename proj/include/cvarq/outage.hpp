#ifndef CVARQ_OUTAGE_HPP
#define CVARQ_OUTAGE_HPP

// Packet error (outage) probability of a Rayleigh block-fading codeword and
// its inverse, the rate R_eps supported at a target error probability.
//
// Four evaluation backends share one interface (OutageCurve):
//   ExactL1           closed form, single fading block only
//   GaussianFading    per-codeword mutual information ~ N(mu, sigma^2 / L)
//   MonteCarlo        common random numbers over seeded fading draws
//   FiniteBlocklength conditional-Gaussian information-spectrum model
//
// All rates are in bits/symbol; nats only appear inside the finite-blocklength
// evaluator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cvarq/channel.hpp"
#include "cvarq/random.hpp"
#include "cvarq/special.hpp"

namespace cvarq {

struct ExactL1 {};
struct GaussianFading {};
struct MonteCarlo {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};
struct FiniteBlocklength {
  int n = 200;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

using OutageModel = std::variant<ExactL1, GaussianFading, MonteCarlo, FiniteBlocklength>;

inline std::string model_name(const OutageModel& model) {
  struct Visitor {
    std::string operator()(const ExactL1&) const { return "exact"; }
    std::string operator()(const GaussianFading&) const { return "gaussian"; }
    std::string operator()(const MonteCarlo&) const { return "mc"; }
    std::string operator()(const FiniteBlocklength& m) const {
      return "finite-n" + std::to_string(m.n);
    }
  };
  return std::visit(Visitor{}, model);
}

/// Checks the pairing of a backend with a channel.
inline void validate_model(const OutageModel& model, const ChannelSpec& spec) {
  spec.validate();
  if (std::holds_alternative<ExactL1>(model) && spec.diversity_l != 1) {
    throw std::invalid_argument("ExactL1 outage model requires diversity_l = 1");
  }
  if (const auto* mc = std::get_if<MonteCarlo>(&model); mc && mc->samples == 0) {
    throw std::invalid_argument("MonteCarlo outage model requires samples >= 1");
  }
  if (const auto* fb = std::get_if<FiniteBlocklength>(&model)) {
    if (fb->samples == 0) {
      throw std::invalid_argument("FiniteBlocklength outage model requires samples >= 1");
    }
    if (fb->n < spec.diversity_l || fb->n % spec.diversity_l != 0) {
      throw std::invalid_argument("FiniteBlocklength: n must be a positive multiple of L");
    }
  }
}

/// A rate and the outage probability it incurs.
struct RateEpsPoint {
  double rate_bits = 0.0;
  double eps = 0.0;
};

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr double kEpsFloor = 1e-9;

namespace detail {

inline double require_open_probability(double eps, const char* who) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error(std::string(who) + ": eps must lie in (0, 1)");
  }
  return std::clamp(eps, kEpsFloor, 1.0 - kEpsFloor);
}

// Root of an increasing function by Newton steps kept inside a shrinking
// bisection bracket [lo, hi] with f(lo) <= target <= f(hi). `f` returns the
// pair (value, slope); `guess` seeds the first Newton step.
template <class F>
double solve_increasing(F f, double target, double lo, double hi, double guess) {
  double x = guess > lo && guess < hi ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [value, slope] = f(x);
    const double fx = value - target;
    if (fx == 0.0) {
      return x;
    }
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 1e-13 * (1.0 + std::abs(x))) {
      break;
    }
    double next = slope > 0.0 ? x - fx / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(x))) {
      return next;
    }
    x = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// 1 - exp(-(2^R - 1) / snr): the exponential CDF of a single fading block.
inline double outage_exact_l1(const ChannelSpec& spec, double rate_bits) {
  spec.validate();
  if (spec.diversity_l != 1) {
    throw std::invalid_argument("outage_exact_l1 requires diversity_l = 1");
  }
  if (rate_bits <= 0.0) {
    return 0.0;
  }
  return -std::expm1(-std::expm1(rate_bits * std::numbers::ln2) / spec.snr);
}

/// log2(1 - snr ln(1 - eps)), the inverse of outage_exact_l1.
inline double rate_exact_l1(const ChannelSpec& spec, double eps) {
  spec.validate();
  if (spec.diversity_l != 1) {
    throw std::invalid_argument("rate_exact_l1 requires diversity_l = 1");
  }
  eps = detail::require_open_probability(eps, "rate_exact_l1");
  return std::log1p(-spec.snr * std::log1p(-eps)) / std::numbers::ln2;
}

/// Q(sqrt(L) (mu - R) / sigma).
inline double outage_gaussian(const ChannelSpec& spec, const MiStats& stats, double rate_bits) {
  return gaussian_tail(std::sqrt(static_cast<double>(spec.diversity_l)) *
                       (stats.mu_bits - rate_bits) / stats.sigma_bits);
}

inline double outage_gaussian(const ChannelSpec& spec, double rate_bits) {
  spec.validate();
  return outage_gaussian(spec, mi_stats(spec.snr), rate_bits);
}

/// Rate under the Gaussian model; negative values are clamped to zero and
/// flagged.
struct ClampedRate {
  double rate_bits = 0.0;
  bool clamped = false;
};

inline ClampedRate rate_gaussian(const ChannelSpec& spec, const MiStats& stats, double eps) {
  eps = detail::require_open_probability(eps, "rate_gaussian");
  const double r = stats.mu_bits - gaussian_tail_inv(eps) * stats.sigma_bits /
                                       std::sqrt(static_cast<double>(spec.diversity_l));
  return r > 0.0 ? ClampedRate{r, false} : ClampedRate{0.0, true};
}

inline ClampedRate rate_gaussian(const ChannelSpec& spec, double eps) {
  spec.validate();
  return rate_gaussian(spec, mi_stats(spec.snr), eps);
}

/// Per-codeword average mutual information (bits) for each of `samples`
/// seeded draws of L fading gains.
inline std::vector<double> codeword_mutual_information(const ChannelSpec& spec,
                                                       std::size_t samples, std::uint64_t seed) {
  const auto L = static_cast<std::size_t>(spec.diversity_l);
  const auto gains = exponential_draws(seed, samples, L);
  std::vector<double> mi(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      acc += std::log2(1.0 + spec.snr * gains[k * L + i]);
    }
    mi[k] = acc / static_cast<double>(L);
  }
  return mi;
}

/// Direct Monte Carlo of P[(1/L) sum log2(1 + snr |h_i|^2) <= R] with the
/// binomial standard error.
inline Estimate outage_mc(const ChannelSpec& spec, double rate_bits, std::size_t samples,
                          std::uint64_t seed) {
  spec.validate();
  if (samples == 0) {
    throw std::invalid_argument("outage_mc: samples must be >= 1");
  }
  const auto mi = codeword_mutual_information(spec, samples, seed);
  const auto hits = std::count_if(mi.begin(), mi.end(), [&](double v) { return v <= rate_bits; });
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

namespace detail {

// Starting point for numerical inversion of the sampled backends.
inline double gaussian_guess(const ChannelSpec& spec, const MiStats& stats, double eps) {
  const double r = rate_gaussian(spec, stats, eps).rate_bits;
  return r > 0.0 ? r : 0.5 * stats.mu_bits * eps;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Backend curves. Each holds whatever it needs precomputed (statistics or a
// frozen sample set) so repeated outage/rate queries reuse common random
// numbers and are deterministic.

class ExactL1Curve {
 public:
  explicit ExactL1Curve(const ChannelSpec& spec) : spec_(spec) {
    validate_model(ExactL1{}, spec);
  }
  double outage(double rate_bits) const { return outage_exact_l1(spec_, rate_bits); }
  double rate(double eps) const { return rate_exact_l1(spec_, eps); }

 private:
  ChannelSpec spec_;
};

class GaussianCurve {
 public:
  explicit GaussianCurve(const ChannelSpec& spec) : spec_(spec), stats_(mi_stats(spec.snr)) {
    spec.validate();
  }
  double outage(double rate_bits) const { return outage_gaussian(spec_, stats_, rate_bits); }
  double rate(double eps) const { return rate_gaussian(spec_, stats_, eps).rate_bits; }
  const MiStats& stats() const { return stats_; }

 private:
  ChannelSpec spec_;
  MiStats stats_;
};

/// Average over samples k of P[log2(1 + snr G) <= t - offset_k], G ~ Exp(1):
/// the exponential CDF of one fading block, evaluated at a per-sample shift.
/// Offsets are kept sorted so samples that cannot contribute are skipped.
class ConditionalBlockCdf {
 public:
  ConditionalBlockCdf() = default;
  ConditionalBlockCdf(std::vector<double> offsets, double snr)
      : offsets_(std::move(offsets)), snr_(snr) {
    std::sort(offsets_.begin(), offsets_.end());
  }

  /// Value and derivative with respect to t.
  std::pair<double, double> value_and_slope(double t) const {
    double value = 0.0;
    double slope = 0.0;
    for (double s : offsets_) {
      if (s >= t) {
        break;
      }
      const double excess = std::expm1((t - s) * std::numbers::ln2);
      const double survive = std::exp(-excess / snr_);
      value += 1.0 - survive;
      slope += survive * (excess + 1.0);
    }
    const auto count = static_cast<double>(offsets_.size());
    return {value / count, slope * std::numbers::ln2 / (snr_ * count)};
  }

  double value(double t) const { return value_and_slope(t).first; }
  std::size_t size() const { return offsets_.size(); }

 private:
  std::vector<double> offsets_;
  double snr_ = 1.0;
};

/// Conditional Monte Carlo outage curve. For each draw the first L-1 block
/// terms are sampled and the last block is integrated out exactly through the
/// exponential CDF:
///   eps(R) = E[ 1 - exp(-(2^{L R - S} - 1) / snr) ; S < L R ],
///   S = sum_{i<L} log2(1 + snr |h_i|^2).
/// This is an unbiased estimator of the same outage probability that is
/// continuous and strictly increasing in R, so its inverse and the goodput
/// objective built on it are smooth. For L = 1 it is exact.
class MonteCarloCurve {
 public:
  MonteCarloCurve(const ChannelSpec& spec, std::size_t samples, std::uint64_t seed)
      : spec_(spec), stats_(mi_stats(spec.snr)) {
    validate_model(MonteCarlo{samples, seed}, spec);
    const auto L = static_cast<std::size_t>(spec.diversity_l);
    const auto gains = exponential_draws(seed, samples, L);
    std::vector<double> partial(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < L; ++i) {
        acc += std::log2(1.0 + spec.snr * gains[k * L + i]);
      }
      partial[k] = acc;
    }
    cdf_ = ConditionalBlockCdf(std::move(partial), spec.snr);
    ceiling_outage_ = outage(rate_ceiling());
  }

  double outage(double rate_bits) const { return cdf_.value(spec_.diversity_l * rate_bits); }

  /// Outage and its derivative with respect to the rate, in one pass.
  std::pair<double, double> outage_and_slope(double rate_bits) const {
    const auto [value, slope] = cdf_.value_and_slope(spec_.diversity_l * rate_bits);
    return {value, slope * spec_.diversity_l};
  }

  /// Inverse by safeguarded Newton/bisection over R in [0, mu + 10 sigma].
  double rate(double eps) const {
    eps = detail::require_open_probability(eps, "rate_mc");
    if (ceiling_outage_ < eps) {
      throw std::domain_error("rate_mc: eps unreachable within [0, mu + 10 sigma]");
    }
    return detail::solve_increasing([this](double r) { return outage_and_slope(r); }, eps, 0.0,
                                    rate_ceiling(), detail::gaussian_guess(spec_, stats_, eps));
  }

  double rate_ceiling() const { return stats_.mu_bits + 10.0 * stats_.sigma_bits; }
  const MiStats& stats() const { return stats_; }
  std::size_t samples() const { return cdf_.size(); }

 private:
  ChannelSpec spec_;
  MiStats stats_;
  ConditionalBlockCdf cdf_;
  double ceiling_outage_ = 0.0;
};

/// Finite-blocklength outage: conditioned on the L fading gains the
/// information density is Gaussian with mean (1/L) sum ln(1 + x_i) and
/// variance (1/L) sum 2 x_i / (n (1 + x_i)), x_i = snr |h_i|^2 (nats). The
/// conditional CDF is averaged over seeded fading draws.
class FiniteBlocklengthCurve {
 public:
  FiniteBlocklengthCurve(const ChannelSpec& spec, int n, std::size_t samples, std::uint64_t seed)
      : spec_(spec), stats_(mi_stats(spec.snr)) {
    validate_model(FiniteBlocklength{n, samples, seed}, spec);
    const auto L = static_cast<std::size_t>(spec.diversity_l);
    const auto gains = exponential_draws(seed, samples, L);
    mean_nats_.resize(samples);
    std_nats_.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      double info = 0.0;
      double var = 0.0;
      for (std::size_t i = 0; i < L; ++i) {
        const double x = spec.snr * gains[k * L + i];
        info += std::log1p(x);
        var += 2.0 * x / (static_cast<double>(n) * (1.0 + x));
      }
      mean_nats_[k] = info / static_cast<double>(L);
      std_nats_[k] = std::sqrt(var / static_cast<double>(L));
    }
  }

  /// Averaged conditional CDF with its sample standard error.
  Estimate estimate(double rate_bits) const {
    const double r = rate_bits * std::numbers::ln2;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < mean_nats_.size(); ++k) {
      const double p = conditional_outage(k, r);
      sum += p;
      sum_sq += p * p;
    }
    const auto count = static_cast<double>(mean_nats_.size());
    const double mean = sum / count;
    const double var = std::max(0.0, sum_sq / count - mean * mean);
    return {mean, std::sqrt(var / count)};
  }

  double outage(double rate_bits) const {
    const double r = rate_bits * std::numbers::ln2;
    double sum = 0.0;
    for (std::size_t k = 0; k < mean_nats_.size(); ++k) {
      sum += conditional_outage(k, r);
    }
    return sum / static_cast<double>(mean_nats_.size());
  }

  std::pair<double, double> outage_and_slope(double rate_bits) const {
    const double r = rate_bits * std::numbers::ln2;
    double value = 0.0;
    double slope = 0.0;
    for (std::size_t k = 0; k < mean_nats_.size(); ++k) {
      const double gap = mean_nats_[k] - r;
      if (std_nats_[k] == 0.0) {
        value += gap <= 0.0 ? 1.0 : 0.0;
        continue;
      }
      const double z = gap / std_nats_[k];
      value += gaussian_tail(z);
      slope += normal_pdf(z) / std_nats_[k];
    }
    const auto count = static_cast<double>(mean_nats_.size());
    return {value / count, slope * std::numbers::ln2 / count};
  }

  double rate(double eps) const {
    eps = detail::require_open_probability(eps, "rate_finite_n");
    double hi = stats_.mu_bits + 10.0 * stats_.sigma_bits;
    for (int i = 0; i < 60 && outage(hi) < eps; ++i) {
      hi *= 2.0;
    }
    if (outage(hi) < eps) {
      throw std::domain_error("rate_finite_n: eps unreachable");
    }
    return detail::solve_increasing([this](double x) { return outage_and_slope(x); }, eps, 0.0,
                                    hi, detail::gaussian_guess(spec_, stats_, eps));
  }

  const MiStats& stats() const { return stats_; }

 private:
  double conditional_outage(std::size_t k, double rate_nats) const {
    const double gap = mean_nats_[k] - rate_nats;
    if (std_nats_[k] == 0.0) {
      return gap <= 0.0 ? 1.0 : 0.0;
    }
    return gaussian_tail(gap / std_nats_[k]);
  }

  ChannelSpec spec_;
  MiStats stats_;
  std::vector<double> mean_nats_;
  std::vector<double> std_nats_;
};

/// Monte Carlo estimate of the finite-blocklength outage probability.
inline Estimate outage_finite_n(const ChannelSpec& spec, double rate_bits, int n,
                                std::size_t samples, std::uint64_t seed) {
  return FiniteBlocklengthCurve(spec, n, samples, seed).estimate(rate_bits);
}

/// Rate at which the Monte Carlo outage equals eps, on one frozen sample set.
inline double rate_mc(const ChannelSpec& spec, double eps, std::size_t samples,
                      std::uint64_t seed) {
  return MonteCarloCurve(spec, samples, seed).rate(eps);
}

/// Outage-versus-rate relation of a channel under a chosen backend.
class OutageCurve {
 public:
  OutageCurve(const ChannelSpec& spec, const OutageModel& model)
      : spec_(spec), model_(model), impl_(make(spec, model)) {}

  double outage(double rate_bits) const {
    return std::visit([&](const auto& c) { return c.outage(rate_bits); }, impl_);
  }
  double rate(double eps) const {
    return std::visit([&](const auto& c) { return c.rate(eps); }, impl_);
  }
  RateEpsPoint at_eps(double eps) const { return {rate(eps), eps}; }

  const ChannelSpec& spec() const { return spec_; }
  const OutageModel& model() const { return model_; }

 private:
  using Impl = std::variant<ExactL1Curve, GaussianCurve, MonteCarloCurve, FiniteBlocklengthCurve>;

  static Impl make(const ChannelSpec& spec, const OutageModel& model) {
    validate_model(model, spec);
    struct Builder {
      const ChannelSpec& spec;
      Impl operator()(const ExactL1&) const { return ExactL1Curve(spec); }
      Impl operator()(const GaussianFading&) const { return GaussianCurve(spec); }
      Impl operator()(const MonteCarlo& m) const { return MonteCarloCurve(spec, m.samples, m.seed); }
      Impl operator()(const FiniteBlocklength& m) const {
        return FiniteBlocklengthCurve(spec, m.n, m.samples, m.seed);
      }
    };
    return std::visit(Builder{spec}, model);
  }

  ChannelSpec spec_;
  OutageModel model_;
  Impl impl_;
};

}  // namespace cvarq

#endif  // CVARQ_OUTAGE_HPP
