#ifndef CVARQ_SPECIAL_HPP
#define CVARQ_SPECIAL_HPP

// Scalar special functions used throughout the library: the principal branch
// of the Lambert W function and the standard normal tail Q with its inverse.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cvarq {

inline constexpr double kSqrt2Pi = 2.506628274631000502415765;

/// Standard normal density.
inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

/// Q(x) = P[N(0,1) > x].
inline double gaussian_tail(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace detail {

// Lower-tail normal quantile for p in (0, 0.5]; rational approximation
// (Acklam) followed by two Halley steps against erfc.
inline double lower_normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace detail

/// Inverse of gaussian_tail on (0, 1). Antisymmetric about p = 0.5.
inline double gaussian_tail_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("gaussian_tail_inv: p must lie in (0, 1)");
  }
  if (p == 0.5) {
    return 0.0;
  }
  // Q^{-1}(p) = -Phi^{-1}(p); evaluate on the smaller tail for precision.
  if (p < 0.5) {
    return -detail::lower_normal_quantile(p);
  }
  return detail::lower_normal_quantile(1.0 - p);
}

/// Derivative of Q^{-1}: -sqrt(2 pi) exp(Q^{-1}(p)^2 / 2).
inline double gaussian_tail_inv_derivative(double p) {
  const double x = gaussian_tail_inv(p);
  return -kSqrt2Pi * std::exp(0.5 * x * x);
}

/// Principal branch W0 of the Lambert W function: w e^w = x, w >= -1.
/// Halley iteration from a branch-point series near -1/e, log1p for moderate
/// arguments and the asymptotic log expansion for large ones.
inline double lambert_w0(double x) {
  constexpr double inv_e = 0.36787944117144232159552377016146;
  if (std::isnan(x) || x < -inv_e) {
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == -inv_e) {
    return -1.0;
  }
  if (std::isinf(x)) {
    return x;
  }

  double w;
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  } else if (x < 3.0) {
    w = std::log1p(x);
    if (x < 0.0) {
      w = x / (1.0 + x);
    }
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) {
      break;
    }
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) {
      break;
    }
  }
  return w < -1.0 ? -1.0 : w;
}

}  // namespace cvarq

#endif  // CVARQ_SPECIAL_HPP
