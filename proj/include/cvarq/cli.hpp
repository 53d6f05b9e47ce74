#ifndef CVARQ_CLI_HPP
#define CVARQ_CLI_HPP

// Command-line front end. run_command() parses arguments, runs one
// subcommand and writes CSV to `out` (or --out). Errors go to `err` as
//   error: <kind>: <message>
// with exit code 2 for invalid-argument, 3 for infeasible, 1 for internal.

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cvarq/arq.hpp"
#include "cvarq/csv.hpp"
#include "cvarq/experiment.hpp"
#include "cvarq/figures.hpp"
#include "cvarq/goodput.hpp"
#include "cvarq/harq.hpp"
#include "cvarq/sim.hpp"

namespace cvarq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;

inline constexpr std::size_t kOutageSamples = 1000000;
inline constexpr std::size_t kOptimizerSamples = 100000;

namespace cli {

inline bool stochastic(const ExperimentConfig& c) { return c.model == "mc" || c.model == "finite"; }

inline CsvWriter writer(std::ostream& out, const ExperimentConfig& c, std::vector<std::string> cols,
                        std::size_t default_samples) {
  if (!stochastic(c)) return CsvWriter(out, std::move(cols));
  return CsvWriter(out, std::move(cols), c.seed, c.samples_or(default_samples));
}

inline void run_stats(const ExperimentConfig& c, std::ostream& out) {
  c.channel().validate();
  const MiStats s = mi_stats(c.snr());
  CsvWriter csv(out, {"snr_db", "snr", "L", "mu_bits", "sigma_bits", "kappa"});
  csv.row() << c.snr_db << c.snr() << c.diversity << s.mu_bits << s.sigma_bits
            << kappa(s, c.diversity);
}

inline void run_outage(const ExperimentConfig& c, std::ostream& out) {
  if (c.rate.has_value() == c.eps.has_value()) {
    throw std::invalid_argument("outage: pass exactly one of --rate or --eps");
  }
  const ChannelSpec spec = c.channel();
  const OutageModel model = c.outage_model(kOutageSamples);
  validate_model(model, spec);
  auto csv = writer(out, c, {"snr_db", "L", "model", "rate_bits", "eps", "std_error"},
                    kOutageSamples);
  const std::string name = model_name(model);
  if (c.eps) {
    // Inverse on a frozen sample set: no standard error is reported.
    const double r = OutageCurve(spec, model).rate(*c.eps);
    csv.row() << c.snr_db << c.diversity << name << r << *c.eps << "";
    return;
  }
  if (!(*c.rate >= 0.0)) throw std::invalid_argument("outage: rate must be non-negative");
  Estimate e;
  if (const auto* mc = std::get_if<MonteCarlo>(&model)) {
    e = outage_mc(spec, *c.rate, mc->samples, mc->seed);
  } else if (const auto* fb = std::get_if<FiniteBlocklength>(&model)) {
    e = outage_finite_n(spec, *c.rate, fb->n, fb->samples, fb->seed);
  } else {
    e = {OutageCurve(spec, model).outage(*c.rate), 0.0};
  }
  csv.row() << c.snr_db << c.diversity << name << *c.rate << e.value << e.std_error;
}

inline void run_optimize(const ExperimentConfig& c, std::ostream& out) {
  const OutageModel model = c.outage_model(kOptimizerSamples);
  const auto r = optimize_eps(c.channel(), model);
  auto csv = writer(out, c,
                    {"snr_db", "L", "model", "eps_star", "rate_star", "goodput_star", "iterations",
                     "bracket_width", "unimodal"},
                    kOptimizerSamples);
  csv.row() << c.snr_db << c.diversity << model_name(model) << r.eps_star << r.rate_star
            << r.goodput_star << r.solver.iterations << r.solver.bracket_width
            << r.solver.unimodal;
}

inline void run_crc(const ExperimentConfig& c, std::ostream& out) {
  const OutageModel model = c.outage_model(kOptimizerSamples);
  const auto r = crc_joint_optimize(c.channel(), c.n, c.p, model);
  auto csv = writer(out, c,
                    {"snr_db", "L", "model", "n", "p", "eps_star", "k_star", "rate_bits",
                     "effective_goodput"},
                    kOptimizerSamples);
  csv.row() << c.snr_db << c.diversity << model_name(model) << c.n << c.p << r.eps_star
            << r.k_star << r.rate_bits << r.effective_goodput;
}

inline void run_delay(const ExperimentConfig& c, std::ostream& out) {
  const OutageModel model = c.outage_model(kOptimizerSamples);
  const DelayConstraint dc{c.d.value_or(3), c.q};
  const auto r = delay_constrained_optimize(c.channel(), dc, model);
  auto csv = writer(out, c,
                    {"snr_db", "L", "model", "d", "q", "eps_cap", "eps_star", "rate_star",
                     "goodput_star"},
                    kOptimizerSamples);
  csv.row() << c.snr_db << c.diversity << model_name(model) << dc.d << dc.q << dc.eps_cap()
            << r.eps_star << r.rate_star << r.goodput_star;
}

inline void run_feedback(const ExperimentConfig& c, std::ostream& out) {
  if (c.joint) {
    const OutageModel model = c.outage_model(kOptimizerSamples);
    const DelayConstraint dc{c.d.value_or(3), c.q};
    const auto r = joint_optimize_noisy_fb(c.channel(), c.l_fb, dc, c.n, model);
    auto csv = writer(out, c,
                      {"snr_db", "L", "model", "lfb", "n", "d", "q", "eps_star", "eps_fb_star",
                       "f_star", "rate_bits", "xi_d", "expected_rounds", "goodput"},
                      kOptimizerSamples);
    csv.row() << c.snr_db << c.diversity << model_name(model) << c.l_fb << c.n << dc.d << dc.q
              << r.eps << r.eps_fb << r.f << r.rate_bits << r.xi_d << r.expected_rounds
              << r.goodput;
    return;
  }
  if (c.f.has_value() == c.target.has_value()) {
    throw std::invalid_argument("feedback: pass --joint, or exactly one of --f and --target");
  }
  if (c.f) {
    const FeedbackSpec fb{*c.f, c.l_fb, c.snr()};
    const double e = feedback_error_prob(fb);
    CsvWriter csv(out, {"snr_db", "lfb", "f", "eps_fb"});
    csv.row() << c.snr_db << c.l_fb << *c.f << e;
    return;
  }
  FeedbackSpec{1, c.l_fb, c.snr()}.validate();
  const int f = min_feedback_symbols(c.snr(), c.l_fb, *c.target);
  CsvWriter csv(out, {"snr_db", "lfb", "target", "f_min"});
  csv.row() << c.snr_db << c.l_fb << *c.target << f;
}

inline void run_harq(const ExperimentConfig& c, std::ostream& out) {
  const int m = c.m.value_or(2);
  const auto samples = c.samples_or(kOptimizerSamples);
  if (c.optimize) {
    const auto r = optimize_initial_rate(c.channel(), m, samples, c.seed);
    CsvWriter csv(out,
                  {"snr_db", "L", "m", "r_init_star", "goodput_star", "bound_rate", "bound_holds",
                   "iterations", "unimodal"},
                  c.seed, samples);
    csv.row() << c.snr_db << c.diversity << m << r.r_init_star << r.goodput_star << r.bound_rate
              << r.bound_holds << r.solver.iterations << r.solver.unimodal;
    return;
  }
  if (!c.rate) throw std::invalid_argument("harq: pass --rate (initial rate) or --optimize");
  const HarqSpec hs{m, *c.rate};
  hs.validate();
  const auto e = HarqSampleSet(c.channel(), m, samples, c.seed).estimate(hs.r_init);
  const double first = harq_first_round_outage(c.channel(), hs, c.outage_model(samples));
  CsvWriter csv(out,
                {"snr_db", "L", "m", "r_init", "eps", "eps_stderr", "expected_rounds",
                 "expected_rounds_stderr", "goodput", "goodput_stderr", "first_round_eps"},
                c.seed, samples);
  csv.row() << c.snr_db << c.diversity << m << hs.r_init << e.outage.value << e.outage.std_error
            << e.expected_rounds.value << e.expected_rounds.std_error << e.goodput.value
            << e.goodput.std_error << first;
}

inline void run_simulate(const ExperimentConfig& c, std::ostream& out) {
  if (!c.rate) throw std::invalid_argument("simulate: pass --rate");
  SimConfig s;
  s.channel = c.channel();
  s.rate_bits = *c.rate;
  s.dc = {c.d.value_or(1000000), c.q};
  if (c.f) s.feedback = FeedbackSpec{*c.f, c.l_fb, c.snr()};
  if (c.m) s.harq = HarqSpec{*c.m, *c.rate};
  s.packets = c.packets;
  s.seed = c.seed;
  s.n = c.n;
  s.mode = c.mode == "fading" ? ForwardMode::kFullFading : ForwardMode::kBernoulli;
  s.model = c.outage_model(kOutageSamples);
  s.forward_eps = c.eps;
  s.feedback_eps = c.eps_fb;
  const SimResult r = simulate(s);
  CsvWriter csv(out,
                {"snr_db", "L", "rate_bits", "packets_offered", "packets_delivered",
                 "packets_lost", "total_rounds", "goodput_estimate", "goodput_stderr",
                 "loss_rate", "loss_rate_stderr", "mean_rounds", "mean_rounds_stderr"},
                c.seed, c.packets);
  csv.row() << c.snr_db << c.diversity << *c.rate << r.packets_offered << r.packets_delivered
            << r.packets_lost << r.total_rounds << r.goodput_estimate << r.goodput_stderr
            << r.loss_rate << r.loss_rate_stderr << r.mean_rounds << r.mean_rounds_stderr;
}

inline void run_figure(const ExperimentConfig& c, std::ostream& out) {
  const auto& reg = figure_registry();
  const auto it = reg.find(c.figure);
  if (it == reg.end()) {
    throw std::invalid_argument("figure: unknown id '" + c.figure + "'");
  }
  it->second(c, out);
}

using CommandFn = void (*)(const ExperimentConfig&, std::ostream&);

inline const std::map<std::string, std::pair<CommandFn, const char*>>& commands() {
  static const std::map<std::string, std::pair<CommandFn, const char*>> table = {
      {"stats", {run_stats, "mutual-information mean, std and kappa"}},
      {"outage", {run_outage, "outage at --rate, or rate at --eps"}},
      {"optimize", {run_optimize, "goodput-optimal eps"}},
      {"crc", {run_crc, "joint eps and CRC length"}},
      {"delay", {run_delay, "optimal eps under a round cap"}},
      {"feedback", {run_feedback, "feedback error, length, or joint design"}},
      {"harq", {run_harq, "HARQ-IR estimates or optimal initial rate"}},
      {"simulate", {run_simulate, "packet-level protocol simulation"}},
      {"figure", {run_figure, "sweep data for a figure id"}},
  };
  return table;
}

}  // namespace cli

/// Parses `args` (without the program name) into a config: defaults, then the
/// --config file, then explicit flags.
inline ExperimentConfig parse_arguments(const std::vector<std::string>& args) {
  CLI::App app{"Coding versus ARQ in block-fading channels", "cvarq"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file");

  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::vector<CLI::Option*>> opts;
  for (const auto& [name, entry] : cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    subs[name] = sub;
    if (name == "figure") {
      sub->add_option("id", values["figure"], "fig2 fig3 fig4 fig5 fig6 fig8 fig9 fig10")
          ->required();
    }
    for (const auto& field : config_fields()) {
      if (field.key == "command" || field.key == "figure") continue;
      if (field.is_flag) {
        opts[name].push_back(sub->add_flag("--" + field.key, flags[field.key]));
      } else {
        opts[name].push_back(sub->add_option("--" + field.key, values[field.key]));
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);

  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file '" + config_path + "'");
    apply_config(cfg, in);
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cfg.command = name;
    if (name == "figure") cfg.figure = values["figure"];
    for (CLI::Option* opt : opts[name]) {
      if (opt->count() == 0) continue;
      const std::string key = opt->get_name().substr(2);
      set_config_value(cfg, key, flags.count(key) ? "true" : values[key]);
    }
  }
  return cfg;
}

/// Runs an already parsed configuration.
inline void execute(const ExperimentConfig& cfg, std::ostream& out) {
  const auto it = cli::commands().find(cfg.command);
  if (it == cli::commands().end()) {
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
  }
  if (cfg.out.empty()) {
    it->second.first(cfg, out);
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw std::invalid_argument("cannot open output file '" + cfg.out + "'");
  it->second.first(cfg, file);
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](const char* kind, const std::string& msg, int code) {
    err << "error: " << kind << ": " << msg << '\n';
    return code;
  };
  ExperimentConfig cfg;
  try {
    cfg = parse_arguments(args);
  } catch (const CLI::CallForHelp&) {
    out << "usage: cvarq [--config FILE] <command> [--key value ...]\ncommands:\n";
    for (const auto& [name, entry] : cli::commands()) out << "  " << name << "  " << entry.second << '\n';
    out << "keys:";
    for (const auto& field : config_fields()) {
      if (field.key != "command") out << " --" << field.key;
    }
    out << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("invalid-argument", e.what(), kExitInvalid);
  } catch (const std::exception& e) {
    return fail("invalid-argument", e.what(), kExitInvalid);
  }

  try {
    execute(cfg, out);
  } catch (const InfeasibleError& e) {
    return fail("infeasible", e.what(), kExitInfeasible);
  } catch (const ConsistencyError& e) {
    return fail("internal", e.what(), kExitInternal);
  } catch (const std::invalid_argument& e) {
    return fail("invalid-argument", e.what(), kExitInvalid);
  } catch (const std::domain_error& e) {
    return fail("invalid-argument", e.what(), kExitInvalid);
  } catch (const std::out_of_range& e) {
    return fail("invalid-argument", e.what(), kExitInvalid);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
  return kExitOk;
}

}  // namespace cvarq

#endif  // CVARQ_CLI_HPP
