#ifndef CVARQ_FIGURES_HPP
#define CVARQ_FIGURES_HPP

// Sweep data behind the standard plots. Each generator writes one CSV table;
// stochastic backends use MonteCarlo / FiniteBlocklength with the configured
// seed and sample count (default 1e5).

#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvarq/arq.hpp"
#include "cvarq/csv.hpp"
#include "cvarq/experiment.hpp"
#include "cvarq/goodput.hpp"
#include "cvarq/harq.hpp"

namespace cvarq {

inline constexpr std::size_t kFigureSamples = 100000;

namespace figures {

inline std::vector<double> range(double first, double last, double step) {
  std::vector<double> v;
  const int count = static_cast<int>(std::floor((last - first) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) v.push_back(first + i * step);
  return v;
}

/// Optimal eps versus SNR: Monte Carlo optimum and the Gaussian-model fixed point.
inline void fig2(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "eps_star_exactish", "eps_star_gaussian"}, cfg.seed, samples);
  for (int L : {2, 5, 10}) {
    for (double db : range(0, 20, 1)) {
      const ChannelSpec spec{db_to_linear(db), L};
      const auto mc = optimize_eps(spec, MonteCarlo{samples, cfg.seed});
      const double gauss = eps_star_gaussian(kappa(mi_stats(spec.snr), L));
      csv.row() << db << L << mc.eps_star << gauss;
    }
  }
}

/// Success probability and goodput versus rate at 10 dB.
inline void fig3(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "rate_bits", "success_prob", "goodput"}, cfg.seed, samples);
  const double db = 10.0;
  for (int L : {2, 5, 10}) {
    const OutageCurve curve({db_to_linear(db), L}, MonteCarlo{samples, cfg.seed});
    for (double r : range(0.05, 6.0, 0.05)) {
      const double success = 1.0 - curve.outage(r);
      csv.row() << db << L << r << success << r * success;
    }
  }
}

/// Goodput versus SNR at fixed eps and at the optimum.
inline void fig4(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "eps_label", "eps", "goodput"}, cfg.seed, samples);
  for (int L : {2, 10}) {
    for (double db : range(0, 30, 1)) {
      const OutageCurve curve({db_to_linear(db), L}, MonteCarlo{samples, cfg.seed});
      for (double eps : {0.1, 0.01, 0.001}) {
        csv.row() << db << L << format_number(eps) << eps << goodput(curve, eps);
      }
      const auto best = optimize_eps(curve);
      csv.row() << db << L << "optimal" << best.eps_star << best.goodput_star;
    }
  }
}

/// Finite-blocklength success probability versus rate, L = 10.
inline void fig5(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "n", "rate_bits", "success_prob"}, cfg.seed, samples);
  const int L = 10;
  for (double db : {0.0, 10.0}) {
    const ChannelSpec spec{db_to_linear(db), L};
    for (int n : {50, 200, 0}) {
      const OutageModel model =
          n ? OutageModel{FiniteBlocklength{n, samples, cfg.seed}} : OutageModel{MonteCarlo{samples, cfg.seed}};
      const OutageCurve curve(spec, model);
      for (double r : range(0.05, 5.0, 0.05)) {
        csv.row() << db << L << (n ? std::to_string(n) : std::string("inf")) << r
                  << 1.0 - curve.outage(r);
      }
    }
  }
}

/// Optimal eps versus SNR for finite and infinite blocklength.
inline void fig6(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "n", "eps_star", "rate_star", "goodput_star"}, cfg.seed,
                samples);
  for (int L : {2, 10}) {
    for (double db : range(0, 20, 2)) {
      const ChannelSpec spec{db_to_linear(db), L};
      for (int n : {200, 500, 0}) {
        const OutageModel model = n ? OutageModel{FiniteBlocklength{n, samples, cfg.seed}}
                                    : OutageModel{MonteCarlo{samples, cfg.seed}};
        const auto best = optimize_eps(spec, model);
        csv.row() << db << L << (n ? std::to_string(n) : std::string("inf")) << best.eps_star
                  << best.rate_star << best.goodput_star;
      }
    }
  }
}

/// Joint forward/feedback design versus SNR (L = 3, n = 200, d = 3, q = 1e-6
/// unless overridden).
inline void fig8(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  const DelayConstraint dc{cfg.d.value_or(3), cfg.q};
  CsvWriter csv(out,
                {"snr_db", "L", "lfb", "eps_star", "eps_fb_star", "f_star", "rate_bits", "xi_d",
                 "expected_rounds", "goodput", "ideal_goodput"},
                cfg.seed, samples);
  const int L = 3;
  for (int l_fb : {1, 2, 5}) {
    for (double db : range(0, 20, 5)) {
      const OutageCurve curve({db_to_linear(db), L}, MonteCarlo{samples, cfg.seed});
      const auto design = joint_optimize_noisy_fb(curve, l_fb, dc, cfg.n);
      const double ideal = delay_constrained_optimize(curve, dc).goodput_star;
      csv.row() << db << L << l_fb << design.eps << design.eps_fb << design.f << design.rate_bits
                << design.xi_d << design.expected_rounds << design.goodput << ideal;
    }
  }
}

/// Goodput versus eps with the best feedback length for each eps, 5 dB, L = 3.
inline void fig9(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  const DelayConstraint dc{cfg.d.value_or(3), cfg.q};
  CsvWriter csv(out,
                {"snr_db", "L", "lfb", "eps", "feasible", "f_best", "eps_fb", "eps_fb_max",
                 "goodput"},
                cfg.seed, samples);
  const double db = 5.0;
  const int L = 3;
  const OutageCurve curve({db_to_linear(db), L}, MonteCarlo{samples, cfg.seed});
  constexpr int points = 61;
  const double lo = kEpsSearchLow;
  const double hi = dc.eps_cap();
  for (int l_fb : {1, 2}) {
    const FeedbackTable table(curve.spec().snr, l_fb, dc.q);
    for (int i = 0; i < points; ++i) {
      const double eps = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
      const double eps_fb_max = max_feedback_error_for_loss(eps, dc);
      const auto design = best_feedback_design(eps, curve.rate(eps), table, dc, cfg.n);
      if (design) {
        csv.row() << db << L << l_fb << eps << true << design->f << design->eps_fb << eps_fb_max
                  << design->goodput;
      } else {
        csv.row() << db << L << l_fb << eps << false << 0 << 0.0 << eps_fb_max << 0.0;
      }
    }
  }
}

/// HARQ goodput versus initial rate; M = 1 is simple ARQ.
inline void fig10(const ExperimentConfig& cfg, std::ostream& out) {
  const auto samples = cfg.samples_or(kFigureSamples);
  CsvWriter csv(out, {"snr_db", "L", "M", "r_init", "goodput"}, cfg.seed, samples);
  const int L = 2;
  for (double db : {5.0, 10.0}) {
    for (int m : {1, 2, 3}) {
      const HarqSampleSet set({db_to_linear(db), L}, m, samples, cfg.seed);
      for (double r : range(0.1, 10.0, 0.1)) {
        csv.row() << db << L << m << r << set.smoothed_goodput(r);
      }
    }
  }
}

}  // namespace figures

using FigureFn = void (*)(const ExperimentConfig&, std::ostream&);

inline const std::map<std::string, FigureFn>& figure_registry() {
  static const std::map<std::string, FigureFn> registry = {
      {"fig2", figures::fig2}, {"fig3", figures::fig3}, {"fig4", figures::fig4},
      {"fig5", figures::fig5}, {"fig6", figures::fig6}, {"fig8", figures::fig8},
      {"fig9", figures::fig9}, {"fig10", figures::fig10},
  };
  return registry;
}

}  // namespace cvarq

#endif  // CVARQ_FIGURES_HPP
