#ifndef CVARQ_SIM_HPP
#define CVARQ_SIM_HPP

// Packet-by-packet Monte Carlo of the ARQ protocols, written from the
// protocol rules and independent of the closed forms in arq.hpp and harq.hpp.
//
// Simple ARQ with a round cap d and noisy feedback, per packet:
//   - each round the transmitter sends the packet; a receiver that has not yet
//     decoded it tries again on fresh fading,
//   - the receiver answers ACK if it holds the packet, NACK otherwise,
//   - the answer is flipped with the feedback error probability,
//   - on a received ACK, or after round d, the transmitter moves on. A packet
//     the receiver never decoded is lost.
// A receiver that already decoded the packet recognizes the repeat and just
// re-sends ACK, so an ACK->NACK flip wastes one round.
//
// HARQ-IR: rounds accumulate mutual information until it exceeds R_init; after
// M failed rounds the attempt restarts from scratch until the packet gets
// through. Feedback is ideal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "cvarq/arq.hpp"
#include "cvarq/harq.hpp"
#include "cvarq/outage.hpp"
#include "cvarq/random.hpp"
#include "cvarq/special.hpp"

namespace cvarq {

enum class ForwardMode {
  kBernoulli,   // decoding succeeds w.p. 1 - eps from the analytic backend
  kFullFading,  // draw L gains per round and compare mutual information to R
};

struct SimConfig {
  ChannelSpec channel;
  double rate_bits = 1.0;
  DelayConstraint dc{1000000, 0.5};
  std::optional<FeedbackSpec> feedback;  // nullopt: ideal feedback, f = 0
  std::optional<HarqSpec> harq;
  std::size_t packets = 100000;
  std::uint64_t seed = 1;
  int n = 200;

  ForwardMode mode = ForwardMode::kBernoulli;
  OutageModel model = GaussianFading{};   // eps source in Bernoulli mode
  std::optional<double> forward_eps;      // overrides the backend
  std::optional<double> feedback_eps;     // overrides the feedback channel

  int f() const { return feedback ? feedback->f : 0; }
};

struct SimResult {
  std::uint64_t packets_offered = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t total_rounds = 0;
  double goodput_estimate = 0.0;
  double goodput_stderr = 0.0;
  double loss_rate = 0.0;
  double loss_rate_stderr = 0.0;
  double mean_rounds = 0.0;
  double mean_rounds_stderr = 0.0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

namespace detail {

// Sufficient statistics for per-packet reward y and cost x.
struct RatioMoments {
  double y = 0, x = 0, yy = 0, xx = 0, xy = 0;
  void add(double yi, double xi) {
    y += yi;
    x += xi;
    yy += yi * yi;
    xx += xi * xi;
    xy += xi * yi;
  }
};

inline void finalize(SimResult& out, const RatioMoments& m, double reward_per_delivery) {
  const auto n = static_cast<double>(out.packets_offered);
  const auto delivered = static_cast<double>(out.packets_delivered);
  const auto rounds = static_cast<double>(out.total_rounds);
  out.goodput_estimate = delivered * reward_per_delivery / rounds;
  const double eta = out.goodput_estimate;
  const double resid = std::max(0.0, m.yy - 2.0 * eta * m.xy + eta * eta * m.xx);
  out.goodput_stderr = std::sqrt(resid) / rounds;
  out.loss_rate = static_cast<double>(out.packets_lost) / n;
  out.loss_rate_stderr = std::sqrt(out.loss_rate * (1.0 - out.loss_rate) / n);
  out.mean_rounds = rounds / n;
  out.mean_rounds_stderr = std::sqrt(std::max(0.0, m.xx / n - out.mean_rounds * out.mean_rounds) / n);
}

inline double round_mutual_information(Variates& rng, const ChannelSpec& ch) {
  double acc = 0.0;
  for (int i = 0; i < ch.diversity_l; ++i) {
    acc += std::log2(1.0 + ch.snr * rng.exponential());
  }
  return acc / ch.diversity_l;
}

}  // namespace detail

inline SimResult simulate_simple_arq(const SimConfig& cfg) {
  if (cfg.harq) throw std::invalid_argument("simulate_simple_arq: config carries a HARQ spec");
  cfg.channel.validate();
  cfg.dc.validate();
  if (cfg.packets == 0) throw std::invalid_argument("simulate: packets must be >= 1");
  if (!(cfg.rate_bits > 0.0)) throw std::invalid_argument("simulate: rate_bits must be positive");
  if (cfg.n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  if (cfg.feedback) cfg.feedback->validate();

  double eps = 0.0;
  if (cfg.mode == ForwardMode::kBernoulli) {
    eps = cfg.forward_eps ? *cfg.forward_eps : OutageCurve(cfg.channel, cfg.model).outage(cfg.rate_bits);
  }
  const bool fading_feedback =
      cfg.mode == ForwardMode::kFullFading && cfg.feedback && !cfg.feedback_eps;
  const double eps_fb =
      cfg.feedback_eps ? *cfg.feedback_eps : (cfg.feedback ? feedback_error_prob(*cfg.feedback) : 0.0);

  auto decode = [&](Variates& rng) {
    if (cfg.mode == ForwardMode::kBernoulli) return !rng.bernoulli(eps);
    return detail::round_mutual_information(rng, cfg.channel) > cfg.rate_bits;
  };
  auto feedback_flipped = [&](Variates& rng) {
    if (!fading_feedback) return rng.bernoulli(eps_fb);
    // BPSK after maximal-ratio combining of f symbols over l_fb branches.
    const FeedbackSpec& fb = *cfg.feedback;
    double gain = 0.0;
    for (int i = 0; i < fb.l_fb; ++i) gain += rng.exponential();
    const double snr_eff = static_cast<double>(fb.f) / fb.l_fb * fb.snr * gain;
    return rng.bernoulli(gaussian_tail(std::sqrt(2.0 * snr_eff)));
  };

  SimResult out;
  out.packets_offered = cfg.packets;
  detail::RatioMoments moments;
  const double reward = cfg.rate_bits * cfg.n / (cfg.n + cfg.f());

  for (std::size_t first = 0, batch = 0; first < cfg.packets;
       first += kSamplesPerSubstream, ++batch) {
    Variates rng(substream_seed(cfg.seed, batch));
    const std::size_t last = std::min(cfg.packets, first + kSamplesPerSubstream);
    for (std::size_t p = first; p < last; ++p) {
      bool decoded = false;
      int rounds = 0;
      while (true) {
        ++rounds;
        if (!decoded) decoded = decode(rng);
        const bool ack_sent = decoded;
        const bool ack_seen = feedback_flipped(rng) ? !ack_sent : ack_sent;
        if (ack_seen || rounds >= cfg.dc.d) break;
      }
      out.total_rounds += static_cast<std::uint64_t>(rounds);
      if (decoded) {
        ++out.packets_delivered;
      } else {
        ++out.packets_lost;
      }
      moments.add(decoded ? reward : 0.0, rounds);
    }
  }
  detail::finalize(out, moments, reward);
  return out;
}

inline SimResult simulate_harq(const SimConfig& cfg) {
  if (!cfg.harq) throw std::invalid_argument("simulate_harq: config lacks a HARQ spec");
  cfg.channel.validate();
  cfg.harq->validate();
  if (cfg.packets == 0) throw std::invalid_argument("simulate: packets must be >= 1");
  const double r = cfg.harq->r_init;
  const int m_max = cfg.harq->m_max;

  SimResult out;
  out.packets_offered = cfg.packets;
  detail::RatioMoments moments;

  for (std::size_t first = 0, batch = 0; first < cfg.packets;
       first += kSamplesPerSubstream, ++batch) {
    Variates rng(substream_seed(cfg.seed, batch));
    const std::size_t last = std::min(cfg.packets, first + kSamplesPerSubstream);
    for (std::size_t p = first; p < last; ++p) {
      int rounds = 0;
      bool decoded = false;
      while (!decoded) {
        double accumulated = 0.0;
        for (int t = 0; t < m_max && !decoded; ++t) {
          ++rounds;
          accumulated += detail::round_mutual_information(rng, cfg.channel);
          decoded = accumulated > r;
        }
      }
      out.total_rounds += static_cast<std::uint64_t>(rounds);
      ++out.packets_delivered;
      moments.add(r, rounds);
    }
  }
  detail::finalize(out, moments, r);
  return out;
}

inline SimResult simulate(const SimConfig& cfg) {
  return cfg.harq ? simulate_harq(cfg) : simulate_simple_arq(cfg);
}

}  // namespace cvarq

#endif  // CVARQ_SIM_HPP
