#ifndef CVARQ_EXPERIMENT_HPP
#define CVARQ_EXPERIMENT_HPP

// Run configuration shared by the CLI and its config files. Every field has
// one textual key; the same key names the command-line flag (--key) and the
// config-file entry (key=value). emit() and parse() are inverses.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvarq/outage.hpp"

namespace cvarq {

struct ExperimentConfig {
  std::string command;
  std::string figure;
  double snr_db = 10.0;
  int diversity = 1;
  std::string model = "gaussian";  // exact | gaussian | mc | finite
  std::optional<std::size_t> samples;
  std::uint64_t seed = 1;
  int n = 200;
  std::optional<double> rate;
  std::optional<double> eps;
  double p = 1e-6;
  std::optional<int> d;
  double q = 1e-6;
  int l_fb = 1;
  std::optional<int> f;
  std::optional<double> target;
  std::optional<int> m;
  std::size_t packets = 100000;
  std::string mode = "bernoulli";  // bernoulli | fading
  std::optional<double> eps_fb;
  bool optimize = false;
  bool joint = false;
  std::string out;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  double snr() const { return db_to_linear(snr_db); }
  ChannelSpec channel() const { return {snr(), diversity}; }
  std::size_t samples_or(std::size_t fallback) const { return samples.value_or(fallback); }

  OutageModel outage_model(std::size_t default_samples) const {
    if (model == "exact") return ExactL1{};
    if (model == "gaussian") return GaussianFading{};
    if (model == "mc") return MonteCarlo{samples_or(default_samples), seed};
    if (model == "finite") return FiniteBlocklength{n, samples_or(default_samples), seed};
    throw std::invalid_argument("unknown model '" + model + "'");
  }
};

namespace detail {

inline std::string emit_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars<double> is available in libstdc++ 11.
    res = std::from_chars(first, last, value);
  } else {
    if (!text.empty() && text[0] == '-' && std::is_unsigned_v<T>) {
      throw std::invalid_argument(key + ": expected a non-negative integer, got '" + text + "'");
    }
    res = std::from_chars(first, last, value);
  }
  if (res.ec != std::errc{} || res.ptr != last || text.empty()) {
    throw std::invalid_argument(key + ": cannot parse '" + text + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + text + "'");
}

inline std::string one_of(const std::string& key, const std::string& text,
                          std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (text == a) return text;
  }
  throw std::invalid_argument(key + ": unsupported value '" + text + "'");
}

}  // namespace detail

struct ConfigField {
  std::string key;
  bool is_flag = false;  // boolean switch on the command line
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline const std::vector<ConfigField>& config_fields() {
  using C = ExperimentConfig;
  using detail::emit_double;
  using detail::parse_number;
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> v;
    auto text = [&](std::string key, std::string C::*member) {
      v.push_back({key, false, [member](const C& c) -> std::optional<std::string> {
                     if ((c.*member).empty()) return std::nullopt;
                     return c.*member;
                   },
                   [member](C& c, const std::string& s) { c.*member = s; }});
    };
    auto real = [&](std::string key, double C::*member) {
      v.push_back({key, false, [member](const C& c) -> std::optional<std::string> {
                     return emit_double(c.*member);
                   },
                   [member, key](C& c, const std::string& s) {
                     c.*member = parse_number<double>(key, s);
                   }});
    };
    auto opt_real = [&](std::string key, std::optional<double> C::*member) {
      v.push_back({key, false, [member](const C& c) -> std::optional<std::string> {
                     if (!(c.*member)) return std::nullopt;
                     return emit_double(*(c.*member));
                   },
                   [member, key](C& c, const std::string& s) {
                     c.*member = parse_number<double>(key, s);
                   }});
    };
    auto integer = [&](std::string key, auto C::*member) {
      using T = std::remove_reference_t<decltype(std::declval<C&>().*member)>;
      v.push_back({key, false, [member](const C& c) -> std::optional<std::string> {
                     return std::to_string(c.*member);
                   },
                   [member, key](C& c, const std::string& s) {
                     c.*member = parse_number<T>(key, s);
                   }});
    };
    auto opt_integer = [&](std::string key, auto C::*member) {
      using T = typename std::remove_reference_t<decltype(std::declval<C&>().*member)>::value_type;
      v.push_back({key, false, [member](const C& c) -> std::optional<std::string> {
                     if (!(c.*member)) return std::nullopt;
                     return std::to_string(*(c.*member));
                   },
                   [member, key](C& c, const std::string& s) {
                     c.*member = parse_number<T>(key, s);
                   }});
    };
    auto flag = [&](std::string key, bool C::*member) {
      v.push_back({key, true, [member](const C& c) -> std::optional<std::string> {
                     return (c.*member) ? "true" : "false";
                   },
                   [member, key](C& c, const std::string& s) {
                     c.*member = detail::parse_bool(key, s);
                   }});
    };

    text("command", &C::command);
    text("figure", &C::figure);
    real("snr-db", &C::snr_db);
    integer("L", &C::diversity);
    v.push_back({"model", false, [](const C& c) -> std::optional<std::string> { return c.model; },
                 [](C& c, const std::string& s) {
                   c.model = detail::one_of("model", s, {"exact", "gaussian", "mc", "finite"});
                 }});
    opt_integer("samples", &C::samples);
    integer("seed", &C::seed);
    integer("n", &C::n);
    opt_real("rate", &C::rate);
    opt_real("eps", &C::eps);
    real("p", &C::p);
    opt_integer("d", &C::d);
    real("q", &C::q);
    integer("lfb", &C::l_fb);
    opt_integer("f", &C::f);
    opt_real("target", &C::target);
    opt_integer("m", &C::m);
    integer("packets", &C::packets);
    v.push_back({"mode", false, [](const C& c) -> std::optional<std::string> { return c.mode; },
                 [](C& c, const std::string& s) {
                   c.mode = detail::one_of("mode", s, {"bernoulli", "fading"});
                 }});
    opt_real("eps-fb", &C::eps_fb);
    flag("optimize", &C::optimize);
    flag("joint", &C::joint);
    text("out", &C::out);
    return v;
  }();
  return fields;
}

inline void set_config_value(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
  for (const auto& field : config_fields()) {
    if (field.key == key) {
      field.set(cfg, value);
      return;
    }
  }
  throw std::invalid_argument("unknown configuration key '" + key + "'");
}

/// key=value lines, one per set field, in a fixed order.
inline std::string emit_config(const ExperimentConfig& cfg) {
  std::string text;
  for (const auto& field : config_fields()) {
    if (auto value = field.get(cfg)) text += field.key + "=" + *value + "\n";
  }
  return text;
}

/// Applies key=value lines onto `cfg`. Blank lines and '#' comments are
/// skipped; surrounding whitespace is trimmed.
inline void apply_config(ExperimentConfig& cfg, std::istream& in) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  apply_config(cfg, in);
  return cfg;
}

}  // namespace cvarq

#endif  // CVARQ_EXPERIMENT_HPP
