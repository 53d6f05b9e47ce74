#ifndef CVARQ_ARQ_HPP
#define CVARQ_ARQ_HPP

// Simple ARQ under practical constraints: CRC overhead against an
// undetected-error target, a per-packet round limit with a loss target, and
// noisy ACK/NACK feedback sent over its own Rayleigh-faded channel.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvarq/goodput.hpp"
#include "cvarq/outage.hpp"

namespace cvarq {

/// A constraint set admits no operating point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two algebraically equal evaluations disagreed.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// CRC

struct CrcConfig {
  int n = 200;     // codeword length, symbols
  int k = 0;       // parity bits
  double p = 1e-6; // undetected-error bound

  void validate() const {
    if (n < 1) throw std::invalid_argument("CrcConfig: n must be >= 1");
    if (k < 0) throw std::invalid_argument("CrcConfig: k must be >= 0");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("CrcConfig: p must lie in (0, 1)");
  }
};

struct CrcDesign {
  double eps_star = 0.0;
  int k_star = 0;
  double rate_bits = 0.0;
  double effective_goodput = 0.0;
};

/// Smallest k >= 0 with eps 2^-k <= p.
inline int min_crc_bits(double eps, double p) {
  if (!(p > 0.0)) throw std::domain_error("min_crc_bits: p must be positive");
  if (eps <= p) return 0;
  int k = static_cast<int>(std::ceil(std::log2(eps / p)));
  while (std::ldexp(eps, -k) > p) ++k;
  while (k > 0 && std::ldexp(eps, -(k - 1)) <= p) --k;
  return k;
}

/// Effective goodput (R_eps - k/n)(1 - eps) after CRC overhead.
inline double crc_goodput(const OutageCurve& curve, double eps, int k, int n) {
  return (curve.rate(eps) - static_cast<double>(k) / n) * (1.0 - eps);
}

inline constexpr int kMaxCrcBits = 256;

/// Joint choice of PHY error probability and CRC length. For each k the
/// feasible set is eps <= min(p 2^k, 1 - 1e-6); the objective is concave in
/// eps there, so a bounded golden search per k suffices.
inline CrcDesign crc_joint_optimize(const OutageCurve& curve, int n, double p) {
  CrcConfig{n, 0, p}.validate();
  CrcDesign best;
  bool found = false;
  for (int k = 0; k <= kMaxCrcBits; ++k) {
    const double cap = std::min(std::ldexp(p, k), kEpsSearchHigh);
    if (cap < kEpsSearchLow) {
      continue;
    }
    auto objective = [&](double eps) { return crc_goodput(curve, eps, k, n); };
    const auto r = golden_section_maximize(objective, kEpsSearchLow, cap, kEpsSearchTol * cap);
    // Bounded search may stop just inside an active cap.
    double eps = r.argmax;
    double value = r.max;
    if (const double at_cap = objective(cap); at_cap >= value) {
      eps = cap;
      value = at_cap;
    }
    if (value > 0.0 && (!found || value > best.effective_goodput)) {
      best = {eps, k, curve.rate(eps), value};
      found = true;
    }
    if (cap >= kEpsSearchHigh) {
      break;  // larger k only adds overhead
    }
  }
  if (!found) {
    throw InfeasibleError("crc_joint_optimize: no (eps, k) meets the undetected-error bound");
  }
  return best;
}

inline CrcDesign crc_joint_optimize(const ChannelSpec& spec, int n, double p,
                                    const OutageModel& model) {
  return crc_joint_optimize(OutageCurve(spec, model), n, p);
}

// ---------------------------------------------------------------------------
// Delay constraint

struct DelayConstraint {
  int d = 1;       // maximum ARQ rounds per packet
  double q = 0.01; // maximum lost-packet fraction

  void validate() const {
    if (d < 1) throw std::invalid_argument("DelayConstraint: d must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("DelayConstraint: q must lie in (0, 1)");
  }
  double eps_cap() const { return std::pow(q, 1.0 / d); }
};

/// With perfect feedback a packet is lost after d straight failures
/// (probability eps^d), so eps <= q^{1/d}. Goodput stays R_eps (1 - eps) and is
/// concave, hence the optimum is min(unconstrained eps*, q^{1/d}).
inline GoodputReport delay_constrained_optimize(const OutageCurve& curve,
                                                const DelayConstraint& dc) {
  dc.validate();
  GoodputReport report = optimize_eps(curve);
  const double cap = dc.eps_cap();
  if (report.eps_star > cap) {
    report.eps_star = cap;
    report.rate_star = curve.rate(cap);
    report.goodput_star = report.rate_star * (1.0 - cap);
  }
  return report;
}

inline GoodputReport delay_constrained_optimize(const ChannelSpec& spec, const DelayConstraint& dc,
                                                const OutageModel& model) {
  return delay_constrained_optimize(OutageCurve(spec, model), dc);
}

// ---------------------------------------------------------------------------
// Feedback channel

struct FeedbackSpec {
  int f = 1;       // acknowledgement symbols per packet
  int l_fb = 1;    // feedback diversity order
  double snr = 1.0;

  void validate() const {
    if (f < 1) throw std::invalid_argument("FeedbackSpec: f must be >= 1");
    if (l_fb < 1) throw std::invalid_argument("FeedbackSpec: l_fb must be >= 1");
    if (!(snr > 0.0)) throw std::invalid_argument("FeedbackSpec: snr must be positive");
  }
};

/// Average BPSK error probability after maximal-ratio combining of f symbols
/// spread over l_fb Rayleigh branches (f / l_fb repetitions per branch,
/// treated as a real-valued SNR multiplier).
inline double feedback_error_prob(double f, int l_fb, double snr) {
  const double gamma = f / l_fb * snr;
  const double nu = std::sqrt(gamma / (1.0 + gamma));
  // 1 - nu without cancellation.
  const double one_minus_nu = 1.0 / ((1.0 + gamma) * (1.0 + nu));
  const double base = 0.5 * one_minus_nu;
  const double up = 0.5 * (1.0 + nu);
  double sum = 0.0;
  double binom = 1.0;  // C(l_fb - 1 + j, j)
  double up_pow = 1.0;
  for (int j = 0; j < l_fb; ++j) {
    if (j > 0) {
      binom *= static_cast<double>(l_fb - 1 + j) / j;
      up_pow *= up;
    }
    sum += binom * up_pow;
  }
  return std::pow(base, l_fb) * sum;
}

inline double feedback_error_prob(const FeedbackSpec& fb) {
  fb.validate();
  return feedback_error_prob(static_cast<double>(fb.f), fb.l_fb, fb.snr);
}

/// Smallest f >= 1 whose feedback error probability is at most target.
inline int min_feedback_symbols(double snr, int l_fb, double target_eps_fb) {
  if (!(target_eps_fb > 0.0 && target_eps_fb < 0.5)) {
    throw std::domain_error("min_feedback_symbols: target must lie in (0, 0.5)");
  }
  FeedbackSpec{1, l_fb, snr}.validate();
  auto ok = [&](long long f) {
    return feedback_error_prob(static_cast<double>(f), l_fb, snr) <= target_eps_fb;
  };
  long long hi = 1;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > (1LL << 40)) {
      throw std::domain_error("min_feedback_symbols: target unreachable");
    }
  }
  long long lo = hi / 2;  // ok(lo) is false unless lo == 0
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return static_cast<int>(hi);
}

// ---------------------------------------------------------------------------
// Loss probability and expected rounds with noisy feedback

namespace detail {

// x^n with 0^0 = 1.
inline double pow0(double x, int n) { return n == 0 ? 1.0 : std::pow(x, n); }

inline void check_loss_args(double eps, double eps_fb, int d) {
  if (!(eps >= 0.0 && eps <= 1.0 && eps_fb >= 0.0 && eps_fb <= 1.0)) {
    throw std::domain_error("eps and eps_fb must lie in [0, 1]");
  }
  if (d < 1) throw std::invalid_argument("d must be >= 1");
}

}  // namespace detail

/// Loss as the sum over failure paths: a NACK->ACK flip after l failures
/// (l < d), or d failures with d - 1 intact NACKs.
inline double packet_loss_by_failures(double eps, double eps_fb, int d) {
  using detail::pow0;
  double xi = 0.0;
  for (int l = 1; l <= d - 1; ++l) {
    xi += pow0(eps, l) * pow0(1.0 - eps_fb, l - 1) * eps_fb;
  }
  return xi + pow0(eps, d) * pow0(1.0 - eps_fb, d - 1);
}

/// Loss as the complement of first decoding in round i after i-1 intact NACKs.
inline double packet_loss_by_successes(double eps, double eps_fb, int d) {
  using detail::pow0;
  double delivered = 0.0;
  for (int i = 1; i <= d; ++i) {
    delivered += (1.0 - eps) * pow0(eps, i - 1) * pow0(1.0 - eps_fb, i - 1);
  }
  return 1.0 - delivered;
}

inline constexpr double kLossIdentityTol = 1e-12;

/// Packet loss probability xi_d. Both path decompositions are evaluated and
/// must agree.
inline double packet_loss_prob(double eps, double eps_fb, int d) {
  detail::check_loss_args(eps, eps_fb, d);
  const double a = packet_loss_by_failures(eps, eps_fb, d);
  const double b = packet_loss_by_successes(eps, eps_fb, d);
  if (std::abs(a - b) > kLossIdentityTol) {
    throw ConsistencyError("packet_loss_prob: loss decompositions disagree");
  }
  return a;
}

/// Mean ARQ rounds per packet with feedback errors and a d-round cap
/// (0^0 = 1 throughout).
inline double expected_rounds(double eps, double eps_fb, int d) {
  detail::check_loss_args(eps, eps_fb, d);
  using detail::pow0;
  const double ok_fb = 1.0 - eps_fb;
  double total = 0.0;
  for (int i = 1; i <= d - 1; ++i) {
    double stop = pow0(eps, i) * pow0(ok_fb, i - 1) * eps_fb;
    for (int j = 1; j <= i; ++j) {
      stop += pow0(eps, j - 1) * pow0(ok_fb, j) * (1.0 - eps) * pow0(eps_fb, i - j);
    }
    total += i * stop;
  }
  double full = pow0(eps, d - 1) * pow0(ok_fb, d - 1);
  for (int j = 1; j <= d - 1; ++j) {
    full += pow0(eps, j - 1) * pow0(ok_fb, j - 1) * (1.0 - eps) * pow0(eps_fb, d - j);
  }
  return total + d * full;
}

/// Goodput n/(n+f) * R (1 - xi_d) / E[X].
inline double noisy_fb_goodput(double rate_bits, double eps, double eps_fb, int f, int d, int n) {
  if (n < 1 || f < 0) throw std::invalid_argument("noisy_fb_goodput: need n >= 1, f >= 0");
  const double overhead = static_cast<double>(n) / (n + f);
  return overhead * rate_bits * (1.0 - packet_loss_prob(eps, eps_fb, d)) /
         expected_rounds(eps, eps_fb, d);
}

inline double noisy_fb_goodput(const OutageCurve& curve, double eps, const FeedbackSpec& fb,
                               const DelayConstraint& dc, int n) {
  dc.validate();
  return noisy_fb_goodput(curve.rate(eps), eps, feedback_error_prob(fb), fb.f, dc.d, n);
}

inline double noisy_fb_goodput(const ChannelSpec& spec, double eps, const FeedbackSpec& fb,
                               const DelayConstraint& dc, int n, const OutageModel& model) {
  return noisy_fb_goodput(OutageCurve(spec, model), eps, fb, dc, n);
}

/// The two-part approximation eps * eps_fb <= q and eps <= q^{1/d}. Only a
/// diagnostic: it loosens as eps approaches q^{1/d}.
inline bool simplified_constraints_hold(double eps, double eps_fb, const DelayConstraint& dc) {
  return eps * eps_fb <= dc.q && eps <= dc.eps_cap();
}

/// Largest eps_fb with xi_d(eps, eps_fb) <= q; negative when even perfect
/// feedback violates the target.
inline double max_feedback_error_for_loss(double eps, const DelayConstraint& dc) {
  dc.validate();
  if (packet_loss_by_successes(eps, 0.0, dc.d) > dc.q) {
    return -1.0;
  }
  double lo = 0.0;
  double hi = 1.0;
  if (packet_loss_by_successes(eps, hi, dc.d) <= dc.q) {
    return hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (packet_loss_by_successes(eps, mid, dc.d) <= dc.q ? lo : hi) = mid;
  }
  return lo;
}

struct NoisyArqDesign {
  double eps = 0.0;
  double eps_fb = 0.0;
  int f = 0;
  double rate_bits = 0.0;
  double xi_d = 0.0;
  double expected_rounds = 1.0;
  double goodput = 0.0;
};

inline constexpr int kJointEpsGridPoints = 200;

/// eps_fb(f) for f = 1..f_max, where f_max is the first count with
/// eps_fb <= q. Larger f can never help, since the loss would already be met
/// by f_max and the overhead only grows.
class FeedbackTable {
 public:
  FeedbackTable(double snr, int l_fb, double q) {
    FeedbackSpec{1, l_fb, snr}.validate();
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("FeedbackTable: q must lie in (0, 1)");
    f_max_ = q < 0.5 ? min_feedback_symbols(snr, l_fb, q) : 1;
    table_.assign(static_cast<std::size_t>(f_max_) + 1, 0.0);
    for (int f = 1; f <= f_max_; ++f) {
      table_[static_cast<std::size_t>(f)] = feedback_error_prob(f, l_fb, snr);
    }
  }
  int f_max() const { return f_max_; }
  double eps_fb(int f) const { return table_[static_cast<std::size_t>(f)]; }

 private:
  int f_max_ = 1;
  std::vector<double> table_;
};

/// Best feedback length for a fixed forward eps with rate R_eps: maximizes
/// n/(n+f) R (1 - xi_d) / E[X] over f with xi_d <= q. Candidates that cannot
/// beat `floor` are skipped. Returns nullopt when nothing feasible beats it.
inline std::optional<NoisyArqDesign> best_feedback_design(double eps, double rate,
                                                          const FeedbackTable& table,
                                                          const DelayConstraint& dc, int n,
                                                          double floor = -1.0) {
  const int f_max = table.f_max();
  auto feasible = [&](int f) {
    return packet_loss_by_successes(eps, table.eps_fb(f), dc.d) <= dc.q;
  };
  if (!feasible(f_max)) return std::nullopt;
  // Feasibility is monotone in f, so bisect for the first feasible count.
  int f_lo = 0;
  int f_hi = f_max;
  while (f_hi - f_lo > 1) {
    const int mid = f_lo + (f_hi - f_lo) / 2;
    (feasible(mid) ? f_hi : f_lo) = mid;
  }
  std::optional<NoisyArqDesign> best;
  double bar = floor;
  for (int f = f_hi; f <= f_max; ++f) {
    // (1 - xi_d) / E[X] <= 1 bounds everything to the right.
    if (static_cast<double>(n) / (n + f) * rate <= bar) break;
    const double eps_fb = table.eps_fb(f);
    const double xi = packet_loss_prob(eps, eps_fb, dc.d);
    if (xi > dc.q) continue;
    const double rounds = expected_rounds(eps, eps_fb, dc.d);
    const double value = static_cast<double>(n) / (n + f) * rate * (1.0 - xi) / rounds;
    if (value > bar) {
      best = NoisyArqDesign{eps, eps_fb, f, rate, xi, rounds, value};
      bar = value;
    }
  }
  return best;
}

/// Largest eps in [lo, hi] with xi_d(eps, eps_fb) <= q, or nullopt when even
/// lo violates the target. xi_d is increasing in eps.
inline std::optional<double> max_eps_for_loss(double eps_fb, const DelayConstraint& dc, double lo,
                                              double hi) {
  auto ok = [&](double eps) { return packet_loss_by_successes(eps, eps_fb, dc.d) <= dc.q; };
  if (!ok(lo)) return std::nullopt;
  if (ok(hi)) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Joint forward/feedback design: maximize n/(n+f) R_eps (1 - xi_d) / E[X]
/// subject to the exact loss constraint xi_d <= q, eps in [1e-6, q^{1/d}].
/// Three candidate sets:
///   - a log grid of eps, each with its best f,
///   - for every useful f, the largest eps that still meets the loss target
///     (the optimum usually sits on this boundary),
///   - a golden-section refinement in eps around the incumbent at fixed f.
/// Ties go to the smaller f.
inline NoisyArqDesign joint_optimize_noisy_fb(const OutageCurve& curve, int l_fb,
                                              const DelayConstraint& dc, int n) {
  dc.validate();
  if (n < 1) throw std::invalid_argument("joint_optimize_noisy_fb: n must be >= 1");
  const FeedbackTable table(curve.spec().snr, l_fb, dc.q);
  const double lo = kEpsSearchLow;
  const double hi = std::max(lo, dc.eps_cap());

  std::optional<NoisyArqDesign> best;
  auto evaluate = [&](double eps, int f) -> std::optional<NoisyArqDesign> {
    const double eps_fb = table.eps_fb(f);
    const double xi = packet_loss_prob(eps, eps_fb, dc.d);
    if (xi > dc.q) return std::nullopt;
    const double rate = curve.rate(eps);
    const double rounds = expected_rounds(eps, eps_fb, dc.d);
    const double value = static_cast<double>(n) / (n + f) * rate * (1.0 - xi) / rounds;
    return NoisyArqDesign{eps, eps_fb, f, rate, xi, rounds, value};
  };
  auto offer = [&](const std::optional<NoisyArqDesign>& cand) {
    if (!cand) return;
    const bool better = !best || cand->goodput > best->goodput ||
                        (cand->goodput == best->goodput && cand->f < best->f);
    if (better) best = cand;
  };

  std::vector<double> grid(kJointEpsGridPoints);
  for (int i = 0; i < kJointEpsGridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (kJointEpsGridPoints - 1));
  }
  for (double eps : grid) {
    if (packet_loss_by_successes(eps, table.eps_fb(table.f_max()), dc.d) > dc.q) continue;
    offer(best_feedback_design(eps, curve.rate(eps), table, dc, n, best ? best->goodput : -1.0));
  }

  // Boundary candidates. R_eps <= R_hi bounds the goodput of any f.
  const double rate_hi = curve.rate(hi);
  for (int f = 1; f <= table.f_max(); ++f) {
    if (best && static_cast<double>(n) / (n + f) * rate_hi <= best->goodput) break;
    if (const auto eps = max_eps_for_loss(table.eps_fb(f), dc, lo, hi)) offer(evaluate(*eps, f));
  }
  if (!best) {
    throw InfeasibleError("joint_optimize_noisy_fb: no (eps, f) satisfies xi_d <= q");
  }

  // Local refinement at the incumbent f.
  const int f = best->f;
  const auto it = std::lower_bound(grid.begin(), grid.end(), best->eps);
  const auto idx = static_cast<std::size_t>(it - grid.begin());
  const double a = grid[idx > 0 ? idx - 1 : 0];
  const double b = std::min(grid[std::min(idx + 1, grid.size() - 1)],
                            max_eps_for_loss(table.eps_fb(f), dc, lo, hi).value_or(lo));
  if (b > a) {
    auto objective = [&](double eps) {
      const auto d = evaluate(eps, f);
      return d ? d->goodput : -1.0;
    };
    const auto found = golden_section_maximize(objective, a, b, 1e-9 * b);
    offer(evaluate(found.argmax, f));
  }
  return *best;
}

inline NoisyArqDesign joint_optimize_noisy_fb(const ChannelSpec& spec, int l_fb,
                                              const DelayConstraint& dc, int n,
                                              const OutageModel& model) {
  return joint_optimize_noisy_fb(OutageCurve(spec, model), l_fb, dc, n);
}

}  // namespace cvarq

#endif  // CVARQ_ARQ_HPP
