#ifndef CVARQ_HARQ_HPP
#define CVARQ_HARQ_HPP

// Incremental-redundancy HARQ with at most M rounds per packet. Mutual
// information accumulates across rounds; a packet that is still undecodable
// after M rounds triggers a higher-layer restart with fresh fading.
//
// Notation: S_m is the cumulative per-round mutual information after m rounds,
// S_m = sum_{i<=m} (1/L) sum_j log2(1 + snr |h_ij|^2). The rounds consumed by
// one HARQ attempt are T = min{t : S_t > R_init}, or M if there is none.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cvarq/goodput.hpp"
#include "cvarq/outage.hpp"

namespace cvarq {

struct HarqSpec {
  int m_max = 1;
  double r_init = 1.0;

  void validate() const {
    if (m_max < 1) throw std::invalid_argument("HarqSpec: m_max must be >= 1");
    if (!(r_init > 0.0)) throw std::invalid_argument("HarqSpec: r_init must be positive");
  }
};

/// Goodput estimate of a HARQ configuration, with the pieces it is built from.
struct HarqEstimate {
  Estimate outage;
  Estimate expected_rounds;
  Estimate goodput;
};

/// Frozen set of seeded fading draws for M HARQ rounds. Sample k owns M*L
/// consecutive draws (round-major), so with the same seed its draws are
/// exactly those of a non-HARQ codeword with diversity M*L.
class HarqSampleSet {
 public:
  HarqSampleSet(const ChannelSpec& spec, int m_max, std::size_t samples, std::uint64_t seed)
      : spec_(spec), m_max_(m_max), samples_(samples) {
    spec.validate();
    HarqSpec{m_max, 1.0}.validate();
    if (samples == 0) throw std::invalid_argument("HarqSampleSet: samples must be >= 1");
    const auto L = static_cast<std::size_t>(spec.diversity_l);
    const auto M = static_cast<std::size_t>(m_max);
    const auto gains = exponential_draws(seed, samples, M * L);

    cumulative_.assign(M * samples, 0.0);
    std::vector<std::vector<double>> offsets(M, std::vector<double>(samples));
    for (std::size_t k = 0; k < samples; ++k) {
      double prefix = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        const double* g = &gains[(k * M + m) * L];
        double partial = 0.0;
        for (std::size_t j = 0; j + 1 < L; ++j) {
          partial += std::log2(1.0 + spec.snr * g[j]);
        }
        const double last = std::log2(1.0 + spec.snr * g[L - 1]);
        offsets[m][k] = static_cast<double>(L) * prefix + partial;
        prefix += (partial + last) / static_cast<double>(L);
        cumulative_[m * samples + k] = prefix;
      }
    }
    for (std::size_t m = 0; m < M; ++m) {
      smoothed_.emplace_back(std::move(offsets[m]), spec.snr);
    }
  }

  int m_max() const { return m_max_; }
  std::size_t samples() const { return samples_; }
  const ChannelSpec& spec() const { return spec_; }

  /// S_{m} for sample k, m in [1, M].
  double cumulative(int m, std::size_t k) const {
    return cumulative_[static_cast<std::size_t>(m - 1) * samples_ + k];
  }

  /// Rounds consumed by sample k at initial rate r.
  int rounds(std::size_t k, double r) const {
    int t = 1;
    while (t < m_max_ && cumulative(t, k) <= r) ++t;
    return t;
  }

  /// Direct estimates with standard errors: post-HARQ outage P[S_M <= r], mean
  /// rounds E[T] and goodput r (1 - eps) / E[T] (delta method on the ratio).
  HarqEstimate estimate(double r) const {
    const auto n = static_cast<double>(samples_);
    double fails = 0.0;
    double t_sum = 0.0;
    double t_sq = 0.0;
    for (std::size_t k = 0; k < samples_; ++k) {
      const int t = rounds(k, r);
      t_sum += t;
      t_sq += static_cast<double>(t) * t;
      if (cumulative(m_max_, k) <= r) fails += 1.0;
    }
    const double eps = fails / n;
    const double mean_t = t_sum / n;
    const double var_t = std::max(0.0, t_sq / n - mean_t * mean_t);
    const double eta = r * (1.0 - eps) / mean_t;

    // Residual Y - eta T with reward Y = r 1[S_M > r].
    double resid_sq = 0.0;
    for (std::size_t k = 0; k < samples_; ++k) {
      const double y = cumulative(m_max_, k) > r ? r : 0.0;
      const double e = y - eta * rounds(k, r);
      resid_sq += e * e;
    }
    const double eta_se = std::sqrt(resid_sq / n) / (mean_t * std::sqrt(n));
    return {{eps, std::sqrt(eps * (1.0 - eps) / n)},
            {mean_t, std::sqrt(var_t / n)},
            {eta, eta_se}};
  }

  /// Smoothed P[S_m <= r]: the last fading block of round m is integrated out
  /// analytically given everything else. Unbiased and continuous in r.
  double smoothed_cdf(int m, double r) const {
    return smoothed_[static_cast<std::size_t>(m - 1)].value(spec_.diversity_l * r);
  }

  double smoothed_outage(double r) const { return smoothed_cdf(m_max_, r); }

  /// E[T] = 1 + sum_{m<M} P[S_m <= r], smoothed.
  double smoothed_expected_rounds(double r) const {
    double t = 1.0;
    for (int m = 1; m < m_max_; ++m) t += smoothed_cdf(m, r);
    return t;
  }

  double smoothed_goodput(double r) const {
    return r * (1.0 - smoothed_outage(r)) / smoothed_expected_rounds(r);
  }

 private:
  ChannelSpec spec_;
  int m_max_;
  std::size_t samples_;
  std::vector<double> cumulative_;
  std::vector<ConditionalBlockCdf> smoothed_;
};

inline Estimate harq_outage(const ChannelSpec& spec, const HarqSpec& hs, std::size_t samples,
                            std::uint64_t seed) {
  hs.validate();
  return HarqSampleSet(spec, hs.m_max, samples, seed).estimate(hs.r_init).outage;
}

/// First-round outage: the non-HARQ outage at the initial rate under the
/// chosen backend.
inline double harq_first_round_outage(const ChannelSpec& spec, const HarqSpec& hs,
                                      const OutageModel& model) {
  hs.validate();
  return OutageCurve(spec, model).outage(hs.r_init);
}

inline Estimate harq_expected_rounds(const ChannelSpec& spec, const HarqSpec& hs,
                                     std::size_t samples, std::uint64_t seed) {
  hs.validate();
  return HarqSampleSet(spec, hs.m_max, samples, seed).estimate(hs.r_init).expected_rounds;
}

/// Renewal-reward goodput R_init (1 - eps) / E[T] on one shared sample set.
inline Estimate harq_goodput(const ChannelSpec& spec, const HarqSpec& hs, std::size_t samples,
                             std::uint64_t seed) {
  hs.validate();
  return HarqSampleSet(spec, hs.m_max, samples, seed).estimate(hs.r_init).goodput;
}

/// Slack allowed on rate comparisons between separately optimized Monte
/// Carlo objectives (bits/symbol).
inline constexpr double kHarqRateTolerance = 0.025;

struct HarqOptimum {
  double r_init_star = 0.0;
  double goodput_star = 0.0;
  SolverMetadata solver;
  // Upper bound check: r_init* / M against the optimal rate of a non-HARQ
  // codeword with diversity M*L.
  double bound_rate = 0.0;
  bool bound_holds = true;
};

/// Maximizes the smoothed HARQ goodput over r_init in (0, M (mu + 6 sigma /
/// sqrt(L))]: a coarse grid locates the peak, golden section refines it.
inline HarqOptimum optimize_initial_rate(const ChannelSpec& spec, int m_max, std::size_t samples,
                                         std::uint64_t seed) {
  const HarqSampleSet set(spec, m_max, samples, seed);
  const MiStats stats = mi_stats(spec.snr);
  const double hi =
      m_max * (stats.mu_bits + 6.0 * stats.sigma_bits / std::sqrt(double(spec.diversity_l)));
  auto objective = [&](double r) { return set.smoothed_goodput(r); };

  constexpr int grid = 64;
  int best = 1;
  double best_value = -1.0;
  for (int i = 1; i <= grid; ++i) {
    const double v = objective(hi * i / grid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo_b = hi * (best - 1) / grid;
  const double hi_b = hi * std::min(best + 1, grid) / grid;
  const auto found = golden_section_maximize(objective, lo_b, hi_b, 1e-5 * hi);

  HarqOptimum out;
  out.r_init_star = found.argmax;
  out.goodput_star = found.max;
  out.solver = {found.iterations, found.bracket_width, looks_unimodal(objective, hi / grid, hi)};

  const ChannelSpec wide{spec.snr, spec.diversity_l * m_max};
  out.bound_rate = optimize_eps(wide, MonteCarlo{samples, seed}).rate_star;
  out.bound_holds = out.r_init_star / m_max <= out.bound_rate + 2.0 * kHarqRateTolerance;
  return out;
}

}  // namespace cvarq

#endif  // CVARQ_HARQ_HPP
