#ifndef CVARQ_GOLDEN_HPP
#define CVARQ_GOLDEN_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace cvarq {

struct SearchResult {
  double argmax = 0.0;
  double max = 0.0;
  int iterations = 0;
  double bracket_width = 0.0;
};

/// Golden-section maximization of a unimodal f on [lo, hi]; stops when the
/// bracket is narrower than tol.
template <class F>
SearchResult golden_section_maximize(F&& f, double lo, double hi, double tol,
                                     int max_iterations = 500) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol && it < max_iterations) {
    ++it;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc >= fd ? c : d;
  return {x, fc >= fd ? fc : fd, it, b - a};
}

/// True when the samples of f on an increasing grid rise then fall (within a
/// relative slack), i.e. show no interior local minimum.
template <class F>
bool looks_unimodal(F&& f, double lo, double hi, std::size_t points = 33, double slack = 1e-9) {
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = f(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  bool descending = false;
  for (std::size_t i = 1; i < points; ++i) {
    const double tol = slack * (1.0 + std::abs(v[i - 1]));
    if (v[i] < v[i - 1] - tol) {
      descending = true;
    } else if (descending && v[i] > v[i - 1] + tol) {
      return false;
    }
  }
  return true;
}

}  // namespace cvarq

#endif  // CVARQ_GOLDEN_HPP
