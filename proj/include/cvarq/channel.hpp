#ifndef CVARQ_CHANNEL_HPP
#define CVARQ_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cvarq {

/// Average SNR (linear power ratio) and number of i.i.d. Rayleigh fading
/// blocks spanned by one codeword.
struct ChannelSpec {
  double snr = 1.0;
  int diversity_l = 1;

  void validate() const {
    if (!(snr > 0.0) || !std::isfinite(snr)) {
      throw std::invalid_argument("ChannelSpec: snr must be positive and finite");
    }
    if (diversity_l < 1) {
      throw std::invalid_argument("ChannelSpec: diversity_l must be >= 1");
    }
  }

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Mean and standard deviation of log2(1 + snr |h|^2), |h|^2 ~ Exp(1).
struct MiStats {
  double snr = 0.0;
  double mu_bits = 0.0;
  double sigma_bits = 0.0;
};

namespace detail {

// Integrates f(g) e^{-g} over [0, inf). log(1 + snr g) bends on the scale
// 1/snr, so [0, 40] is cut at geometrically spaced points starting well below
// that scale; each piece is then smooth enough for a shallow adaptive rule.
template <class F>
double exp_weighted_integral(F f, double snr) {
  using boost::math::quadrature::gauss_kronrod;
  auto weighted = [&](double g) { return f(g) * std::exp(-g); };
  constexpr unsigned depth = 12;
  constexpr double tol = 1e-13;
  double lo = 0.0;
  double hi = std::min(1e-3 / snr, 1e-3);
  double total = 0.0;
  while (lo < 40.0) {
    total += gauss_kronrod<double, 31>::integrate(weighted, lo, hi, depth, tol);
    lo = hi;
    hi = std::min(40.0, hi * 4.0);
  }
  total += gauss_kronrod<double, 31>::integrate(
      weighted, 40.0, std::numeric_limits<double>::infinity(), depth, tol);
  return total;
}

}  // namespace detail

/// Per-block mutual-information statistics by adaptive Gauss-Kronrod
/// quadrature against the exponential density of |h|^2.
inline MiStats mi_stats(double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw std::domain_error("mi_stats: snr must be positive and finite");
  }
  const auto info = [snr](double g) { return std::log2(1.0 + snr * g); };
  const double mu = detail::exp_weighted_integral(info, snr);
  const double var = detail::exp_weighted_integral(
      [&](double g) {
        const double dev = info(g) - mu;
        return dev * dev;
      },
      snr);
  return MiStats{snr, mu, std::sqrt(var)};
}

/// sigma / (mu sqrt(L)): the normalized spread of per-codeword mutual
/// information. Lies in (0, 1) for Rayleigh fading.
inline double kappa(const MiStats& stats, int diversity_l) {
  if (diversity_l < 1) {
    throw std::invalid_argument("kappa: diversity_l must be >= 1");
  }
  return stats.sigma_bits / (stats.mu_bits * std::sqrt(static_cast<double>(diversity_l)));
}

}  // namespace cvarq

#endif  // CVARQ_CHANNEL_HPP
