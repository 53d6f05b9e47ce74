#ifndef CVARQ_GOODPUT_HPP
#define CVARQ_GOODPUT_HPP

// Ideal-setting goodput eta = R_eps (1 - eps) (unlimited retransmissions,
// perfect detection and feedback) and its maximization over eps.

#include <cmath>
#include <stdexcept>

#include "cvarq/golden.hpp"
#include "cvarq/outage.hpp"
#include "cvarq/special.hpp"

namespace cvarq {

inline constexpr double kEpsSearchLow = 1e-6;
inline constexpr double kEpsSearchHigh = 1.0 - 1e-6;
inline constexpr double kEpsSearchTol = 1e-5;

struct SolverMetadata {
  int iterations = 0;
  double bracket_width = 0.0;
  bool unimodal = true;
};

struct GoodputReport {
  double eps_star = 0.0;
  double rate_star = 0.0;
  double goodput_star = 0.0;
  OutageModel model;
  SolverMetadata solver;
};

inline double goodput(const OutageCurve& curve, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("goodput: eps must lie in (0, 1)");
  }
  return curve.rate(eps) * (1.0 - eps);
}

inline double goodput(const ChannelSpec& spec, double eps, const OutageModel& model) {
  return goodput(OutageCurve(spec, model), eps);
}

/// Maximizes R_eps (1 - eps) over eps in [lo, hi] by golden section. The
/// objective is concave for the Gaussian model and observed concave for the
/// others; a coarse-grid unimodality check is reported, never enforced.
inline GoodputReport optimize_eps(const OutageCurve& curve, double lo = kEpsSearchLow,
                                  double hi = kEpsSearchHigh) {
  auto objective = [&](double eps) { return curve.rate(eps) * (1.0 - eps); };
  const auto found = golden_section_maximize(objective, lo, hi, kEpsSearchTol);
  GoodputReport report;
  report.eps_star = found.argmax;
  report.rate_star = curve.rate(found.argmax);
  report.goodput_star = report.rate_star * (1.0 - report.eps_star);
  report.model = curve.model();
  report.solver = {found.iterations, found.bracket_width, looks_unimodal(objective, lo, hi)};
  return report;
}

inline GoodputReport optimize_eps(const ChannelSpec& spec, const OutageModel& model) {
  return optimize_eps(OutageCurve(spec, model));
}

/// Goodput-optimal error probability for a single fading block:
/// R* = W(snr) / ln 2 solves R 2^R ln 2 = snr, hence
/// eps* = 1 - exp(1/snr - 1/W(snr)).
inline double eps_star_l1_closed(double snr) {
  if (!(snr > 0.0)) {
    throw std::domain_error("eps_star_l1_closed: snr must be positive");
  }
  return -std::expm1(1.0 / snr - 1.0 / lambert_w0(snr));
}

/// Maximizer of (1 - kappa Q^{-1}(eps)) (1 - eps), the normalized Gaussian
/// goodput. Stationarity gives
///   Q^{-1}(eps) + (1 - eps) sqrt(2 pi) exp(Q^{-1}(eps)^2 / 2) = 1 / kappa,
/// whose left side is strictly decreasing in eps; solved by bisection.
inline double eps_star_gaussian(double kappa_val) {
  if (!(kappa_val > 0.0 && kappa_val < 1.0)) {
    throw std::domain_error("eps_star_gaussian: kappa must lie in (0, 1)");
  }
  const double target = 1.0 / kappa_val;
  auto lhs = [](double eps) {
    const double x = gaussian_tail_inv(eps);
    return x + (1.0 - eps) * kSqrt2Pi * std::exp(0.5 * x * x);
  };
  double lo = kEpsFloor;
  double hi = 1.0 - kEpsFloor;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Normalized Gaussian goodput (1 - kappa Q^{-1}(eps)) (1 - eps).
inline double gaussian_goodput_normalized(double kappa_val, double eps) {
  return (1.0 - kappa_val * gaussian_tail_inv(eps)) * (1.0 - eps);
}

}  // namespace cvarq

#endif  // CVARQ_GOODPUT_HPP
