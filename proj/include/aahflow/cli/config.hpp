#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aahflow/dynamics.hpp"
#include "aahflow/grid.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/phase_state.hpp"

namespace aahflow::cli {

/// Bad flag, bad config key or missing command. Maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Portrait, Flow, Quantifiers, Equilibria, Scan, Threshold, Trajectory, Verify };
enum class OutputFormat { Csv, Json, Svg };

inline constexpr std::string_view kCommandNames[] = {"portrait", "flow",      "quantifiers", "equilibria",
                                                     "scan",     "threshold", "trajectory",  "verify"};

inline std::string_view to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Svg: return "svg";
  }
  return "csv";
}

/// lo:hi:n sample specification; node i sits at lo + (hi - lo) i / (n - 1).
struct RangeSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;
  std::vector<double> values() const { return linspace(lo, hi, n); }
};

struct RunConfig {
  std::optional<Command> command;
  double a = 1.0;
  double w = 0.4;
  double alpha = 0.5;
  PhaseGrid grid;
  RangeSpec alpha_range{0.0, 4.0, 81};
  RangeSpec a_range{0.5, 1.5, 41};
  Interval bracket{1.5, 3.5};
  double step = kDefaultStep;
  double horizon = kDefaultHorizon;
  std::optional<PhaseState> start;
  double offset = 0.3;
  FieldKind field = FieldKind::Quantum;
  int series_order = 32;
  std::optional<double> speed_threshold;
  bool exhaustive = false;
  std::optional<int> threads;
  std::string output = "-";
  std::optional<OutputFormat> format;
  std::string background = "div_j";
  std::string arrows = "velocity";
  std::size_t stride = 0;  // 0 picks a per-command default
  std::size_t seeds = 8;
  double classify_tolerance = 1e-9;
};

namespace detail {

inline double parse_real(std::string_view key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v)) {
    throw UsageError("--" + std::string(key) + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

inline long parse_integer(std::string_view key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (text.empty() || end != begin + text.size()) {
    throw UsageError("--" + std::string(key) + ": expected an integer, got '" + text + "'");
  }
  return v;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type from = 0;
  while (true) {
    const auto at = text.find(sep, from);
    parts.push_back(text.substr(from, at == std::string::npos ? std::string::npos : at - from));
    if (at == std::string::npos) break;
    from = at + 1;
  }
  return parts;
}

inline Interval parse_interval(std::string_view key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("--" + std::string(key) + ": expected lo:hi, got '" + text + "'");
  const Interval iv{parse_real(key, parts[0]), parse_real(key, parts[1])};
  if (!(iv.hi > iv.lo)) throw UsageError("--" + std::string(key) + ": need lo < hi");
  return iv;
}

inline RangeSpec parse_range(std::string_view key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--" + std::string(key) + ": expected lo:hi:n, got '" + text + "'");
  const double lo = parse_real(key, parts[0]);
  const double hi = parse_real(key, parts[1]);
  const long n = parse_integer(key, parts[2]);
  if (!(hi > lo)) throw UsageError("--" + std::string(key) + ": need lo < hi");
  if (n < 2) throw UsageError("--" + std::string(key) + ": need at least 2 samples");
  return {lo, hi, static_cast<std::size_t>(n)};
}

inline PhaseState parse_point(std::string_view key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--" + std::string(key) + ": expected x,k, got '" + text + "'");
  return {parse_real(key, parts[0]), parse_real(key, parts[1])};
}

inline std::size_t parse_count(std::string_view key, const std::string& text, long min) {
  const long v = parse_integer(key, text);
  if (v < min) throw UsageError("--" + std::string(key) + ": must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

inline double parse_positive(std::string_view key, const std::string& text) {
  const double v = parse_real(key, text);
  if (!(v > 0.0)) throw UsageError("--" + std::string(key) + ": must be positive");
  return v;
}

inline bool parse_bool(std::string_view key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw UsageError("--" + std::string(key) + ": expected true or false, got '" + text + "'");
}

template <std::size_t N>
std::string parse_choice(std::string_view key, const std::string& text, const std::string_view (&choices)[N]) {
  for (auto c : choices) {
    if (text == c) return text;
  }
  std::string list;
  for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
  throw UsageError("--" + std::string(key) + ": expected one of {" + list + "}, got '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

inline constexpr std::string_view kFormats[] = {"csv", "json", "svg"};
inline constexpr std::string_view kFields[] = {"classical", "quantum"};
inline constexpr std::string_view kBackgrounds[] = {"density", "div_j", "div_w"};
inline constexpr std::string_view kArrows[] = {"velocity", "current"};

/// Every configurable key, shared by the flag parser and the config file.
inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command",
       [](RunConfig& c, const std::string& v) {
         const auto name = parse_choice("command", v, kCommandNames);
         for (std::size_t i = 0; i < std::size(kCommandNames); ++i) {
           if (kCommandNames[i] == name) c.command = static_cast<Command>(i);
         }
       }},
      {"a", [](RunConfig& c, const std::string& v) { c.a = parse_positive("a", v); }},
      {"w", [](RunConfig& c, const std::string& v) { c.w = parse_real("w", v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = parse_positive("alpha", v); }},
      {"x-range", [](RunConfig& c, const std::string& v) { c.grid.x_range = parse_interval("x-range", v); }},
      {"k-range", [](RunConfig& c, const std::string& v) { c.grid.k_range = parse_interval("k-range", v); }},
      {"nx", [](RunConfig& c, const std::string& v) { c.grid.nx = parse_count("nx", v, 2); }},
      {"nk", [](RunConfig& c, const std::string& v) { c.grid.nk = parse_count("nk", v, 2); }},
      {"alpha-range",
       [](RunConfig& c, const std::string& v) {
         c.alpha_range = parse_range("alpha-range", v);
         if (c.alpha_range.lo < 0.0) throw UsageError("--alpha-range: alpha must be non-negative");
       }},
      {"a-range",
       [](RunConfig& c, const std::string& v) {
         c.a_range = parse_range("a-range", v);
         if (!(c.a_range.lo > 0.0)) throw UsageError("--a-range: a must be positive");
       }},
      {"bracket",
       [](RunConfig& c, const std::string& v) {
         c.bracket = parse_interval("bracket", v);
         if (!(c.bracket.lo > 0.0)) throw UsageError("--bracket: alpha must be positive");
       }},
      {"step", [](RunConfig& c, const std::string& v) { c.step = parse_positive("step", v); }},
      {"horizon", [](RunConfig& c, const std::string& v) { c.horizon = parse_positive("horizon", v); }},
      {"start", [](RunConfig& c, const std::string& v) { c.start = parse_point("start", v); }},
      {"offset", [](RunConfig& c, const std::string& v) { c.offset = parse_real("offset", v); }},
      {"field",
       [](RunConfig& c, const std::string& v) {
         c.field = parse_choice("field", v, kFields) == "classical" ? FieldKind::Classical : FieldKind::Quantum;
       }},
      {"n",
       [](RunConfig& c, const std::string& v) {
         const long n = parse_integer("n", v);
         if (n < 0 || n > kMaxSeriesOrder) {
           throw UsageError("--n: series order must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
         }
         c.series_order = static_cast<int>(n);
       }},
      {"speed-threshold",
       [](RunConfig& c, const std::string& v) {
         const double t = parse_real("speed-threshold", v);
         if (t < 0.0) throw UsageError("--speed-threshold: must be non-negative");
         c.speed_threshold = t;
       }},
      {"exhaustive", [](RunConfig& c, const std::string& v) { c.exhaustive = parse_bool("exhaustive", v); }},
      {"threads",
       [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_count("threads", v, 1)); }},
      {"output",
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw UsageError("--output: empty path");
         c.output = v;
       }},
      {"format",
       [](RunConfig& c, const std::string& v) {
         const auto f = parse_choice("format", v, kFormats);
         c.format = f == "csv" ? OutputFormat::Csv : f == "json" ? OutputFormat::Json : OutputFormat::Svg;
       }},
      {"background",
       [](RunConfig& c, const std::string& v) { c.background = parse_choice("background", v, kBackgrounds); }},
      {"arrows", [](RunConfig& c, const std::string& v) { c.arrows = parse_choice("arrows", v, kArrows); }},
      {"stride", [](RunConfig& c, const std::string& v) { c.stride = parse_count("stride", v, 1); }},
      {"seeds", [](RunConfig& c, const std::string& v) { c.seeds = parse_count("seeds", v, 1); }},
      {"classify-tolerance",
       [](RunConfig& c, const std::string& v) { c.classify_tolerance = parse_positive("classify-tolerance", v); }},
  };
  return table;
}

inline std::string json_scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw UsageError("config key '" + key + "': expected a string, number or boolean");
}

inline void validate(const RunConfig& c) {
  if (!c.command) throw UsageError("missing command; expected one of portrait, flow, quantifiers, equilibria, scan, "
                                   "threshold, trajectory, verify");
  if (c.horizon < c.step) throw UsageError("--horizon: must be at least --step");
}

}  // namespace detail

/// Applies one key=value pair; `key` uses the flag spelling without dashes.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw UsageError("unknown key '" + key + "'");
  it->second(cfg, value);
}

/// Flat JSON object of the same keys the command line accepts.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (detail::setters().count(key) == 0) throw UsageError("config file: unknown key '" + key + "'");
    apply_setting(cfg, key, detail::json_scalar_text(key, value));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("--config: " + std::string(e.what()));
  }
  apply_config_json(cfg, doc);
}

/// Defaults, then the config file, then explicit flags. Throws UsageError on
/// any malformed value. Returns nullopt when help was requested (text already
/// written to `out`).
inline std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Gaussian Wigner flow under the Aubry-Andre-Harper Hamiltonian", "aahflow"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> flags;
  const std::map<std::string, std::string> help = {
      {"a", "anisotropy a (enters as a^2)"},
      {"w", "linear drift w"},
      {"alpha", "Gaussian localization alpha > 0"},
      {"x-range", "x extent lo:hi"},
      {"k-range", "k extent lo:hi"},
      {"nx", "grid points along x"},
      {"nk", "grid points along k"},
      {"alpha-range", "scan alpha samples lo:hi:n"},
      {"a-range", "scan a samples lo:hi:n"},
      {"bracket", "threshold bisection bracket lo:hi"},
      {"step", "RK4 step"},
      {"horizon", "integration horizon"},
      {"start", "trajectory start x,k"},
      {"offset", "x offset of the default start from the equilibrium"},
      {"field", "classical or quantum"},
      {"n", "series truncation order"},
      {"speed-threshold", "mark grid points with |w| below this value"},
      {"exhaustive", "search the whole cell for equilibria"},
      {"threads", "worker count"},
      {"output", "output path, - for stdout"},
      {"format", "csv, json or svg"},
      {"background", "SVG background: density, div_j or div_w"},
      {"arrows", "SVG arrows: velocity or current"},
      {"stride", "keep every n-th sample (rows or arrows)"},
      {"seeds", "portrait seeds per energy sign"},
      {"classify-tolerance", "tolerance on trace and det"},
  };
  for (const auto& [key, text] : help) {
    if (key == "exhaustive") {
      flags[key] = app.add_flag("--exhaustive", text);
    } else {
      flags[key] = app.add_option("--" + key, raw[key], text);
    }
  }
  std::string config_path;
  auto* config_opt = app.add_option("--config", config_path, "JSON file of the same keys; flags take precedence");

  std::vector<CLI::App*> subs;
  for (auto name : kCommandNames) subs.push_back(app.add_subcommand(std::string(name)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  if (config_opt->count() > 0) apply_config_file(cfg, config_path);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) cfg.command = static_cast<Command>(i);
  }
  for (const auto& [key, opt] : flags) {
    if (opt->count() == 0) continue;
    apply_setting(cfg, key, key == "exhaustive" ? std::string("true") : raw[key]);
  }
  detail::validate(cfg);
  return cfg;
}

}  // namespace aahflow::cli
