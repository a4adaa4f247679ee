#include "qcayley/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qcayley::app {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Propagate: return "propagate";
    case Command::Optimize: return "optimize";
    case Command::OrderStudy: return "order-study";
    case Command::Bench: return "bench";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Propagate, Command::Optimize, Command::OrderStudy, Command::Bench}) {
    if (to_string(c) == name) return c;
  }
  throw ParameterError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Lattice: return "lattice";
    case ModelKind::Gpe: return "gpe";
    case ModelKind::Synthetic: return "synthetic";
  }
  return "unknown";
}

namespace {

ModelKind parse_model(std::string_view name) {
  for (ModelKind k : {ModelKind::Lattice, ModelKind::Gpe, ModelKind::Synthetic}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown model '" + std::string(name) +
                       "' (expected lattice, gpe or synthetic)");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::CrankNicolson: return to_string(Scheme::CrankNicolson);
    case Method::Cfc4: return to_string(Scheme::Cfc4);
    case Method::CayleyMagnus4: return to_string(Scheme::CayleyMagnus4);
    case Method::CfExp4: return to_string(Scheme::CfExp4);
    case Method::Caylpol: return "caylpol";
    case Method::Rkmk4: return "rkmk4";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::CrankNicolson, Method::Cfc4, Method::CayleyMagnus4, Method::CfExp4,
                   Method::Caylpol, Method::Rkmk4}) {
    if (to_string(m) == name) return m;
  }
  throw ParameterError("unknown method '" + std::string(name) +
                       "' (expected cn, cfc4, cayley_magnus4, cf_exp4, caylpol or rkmk4)");
}

bool is_linear_method(Method m) { return m != Method::Caylpol && m != Method::Rkmk4; }

Scheme linear_scheme(Method m) {
  switch (m) {
    case Method::CrankNicolson: return Scheme::CrankNicolson;
    case Method::Cfc4: return Scheme::Cfc4;
    case Method::CayleyMagnus4: return Scheme::CayleyMagnus4;
    case Method::CfExp4: return Scheme::CfExp4;
    default: break;
  }
  throw UsageError("method '" + std::string(to_string(m)) + "' is not a linear scheme");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest text that round-trips, so 0.1 prints as 0.1.
std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double to_double(const std::string& s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ParameterError("expected a finite number, got '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ParameterError("expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParameterError("expected true or false, got '" + s + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field number(T ExperimentConfig::*group, double T::*member) {
  return {[=](ExperimentConfig& c, const std::string& s) { (c.*group).*member = to_double(s); },
          [=](const ExperimentConfig& c) { return format_double((c.*group).*member); }};
}

template <typename T>
Field count(T ExperimentConfig::*group, Index T::*member) {
  return {[=](ExperimentConfig& c, const std::string& s) {
            (c.*group).*member = static_cast<Index>(to_integer(s));
          },
          [=](const ExperimentConfig& c) { return std::to_string((c.*group).*member); }};
}

template <typename T>
Field text(T ExperimentConfig::*group, std::string T::*member) {
  return {[=](ExperimentConfig& c, const std::string& s) { (c.*group).*member = s; },
          [=](const ExperimentConfig& c) { return (c.*group).*member; }};
}

template <typename T, typename Fn>
Field join(const std::vector<T>& (*view)(const ExperimentConfig&), Fn&& format,
           std::function<void(ExperimentConfig&, const std::string&)> set) {
  return {std::move(set), [view, format](const ExperimentConfig& c) {
            std::string out;
            for (const T& v : view(c)) out += (out.empty() ? "" : ",") + format(v);
            return out;
          }};
}

using Table = std::map<std::string, std::map<std::string, Field>>;

const Table& fields() {
  using C = ExperimentConfig;
  static const Table table = [] {
    Table t;
    t["model"]["kind"] = {
        [](C& c, const std::string& s) { c.model = parse_model(s); },
        [](const C& c) { return std::string(to_string(c.model)); }};
    t["grid"]["points"] = count(&C::grid, &GridSpec::points);
    t["grid"]["x_min"] = number(&C::grid, &GridSpec::x_min);
    t["grid"]["x_max"] = number(&C::grid, &GridSpec::x_max);
    t["lattice"]["v0"] = number(&C::lattice, &LatticeParams<double>::v0);
    t["lattice"]["spacing"] = number(&C::lattice, &LatticeParams<double>::lattice_spacing);
    t["lattice"]["trap_strength"] = number(&C::lattice, &LatticeParams<double>::trap_strength);
    t["lattice"]["control_scale"] = number(&C::lattice, &LatticeParams<double>::control_scale);
    t["gpe"]["coupling"] = number(&C::gpe, &GpeSpec::coupling);
    t["gpe"]["u_c"] = number(&C::gpe, &GpeSpec::u_c);
    t["synthetic"]["levels"] = count(&C::synthetic, &SyntheticSpec::levels);
    t["synthetic"]["channels"] = count(&C::synthetic, &SyntheticSpec::channels);
    t["synthetic"]["spacing"] = number(&C::synthetic, &SyntheticSpec::spacing);
    t["synthetic"]["model_seed"] = {
        [](C& c, const std::string& s) {
          const long long v = to_integer(s);
          if (v < 0) throw ParameterError("must be >= 0");
          c.synthetic.model_seed = static_cast<std::uint64_t>(v);
        },
        [](const C& c) { return std::to_string(c.synthetic.model_seed); }};
    t["time"]["t_final"] = number(&C::time, &TimeSpec::t_final);
    t["time"]["n_steps"] = count(&C::time, &TimeSpec::n_steps);
    t["run"]["methods"] = join<Method>(
        [](const C& c) -> const std::vector<Method>& { return c.methods; },
        [](Method m) { return std::string(to_string(m)); },
        [](C& c, const std::string& s) {
          c.methods.clear();
          for (const auto& name : split_list(s)) c.methods.push_back(parse_method(name));
        });
    t["run"]["seed"] = {
        [](C& c, const std::string& s) {
          const long long v = to_integer(s);
          if (v < 0) throw ParameterError("must be >= 0");
          c.seed = static_cast<std::uint64_t>(v);
        },
        [](const C& c) { return std::to_string(c.seed); }};
    t["state"]["initial_center"] = number(&C::state, &StateSpec::initial_center);
    t["state"]["initial_width"] = number(&C::state, &StateSpec::initial_width);
    t["state"]["target"] = text(&C::state, &StateSpec::target);
    t["state"]["target_center"] = number(&C::state, &StateSpec::target_center);
    t["state"]["target_width"] = number(&C::state, &StateSpec::target_width);
    t["control"]["amplitude"] = number(&C::control, &ControlSpec::amplitude);
    t["optimize"]["alpha"] = number(&C::optimize, &OptimizeSpec::alpha);
    t["optimize"]["initial_guess"] = text(&C::optimize, &OptimizeSpec::initial_guess);
    t["optimize"]["initial_amplitude"] = number(&C::optimize, &OptimizeSpec::initial_amplitude);
    t["optimize"]["epsilon"] = {
        [](C& c, const std::string& s) { c.optimize.settings.epsilon = to_double(s); },
        [](const C& c) { return format_double(c.optimize.settings.epsilon); }};
    t["optimize"]["max_iterations"] = {
        [](C& c, const std::string& s) {
          c.optimize.settings.max_iterations = static_cast<Index>(to_integer(s));
        },
        [](const C& c) { return std::to_string(c.optimize.settings.max_iterations); }};
    t["optimize"]["rule"] = {
        [](C& c, const std::string& s) { c.optimize.settings.rule = parse_update_rule(s); },
        [](const C& c) { return std::string(to_string(c.optimize.settings.rule)); }};
    t["optimize"]["sampling"] = {
        [](C& c, const std::string& s) {
          c.optimize.settings.sampling = parse_update_sampling(s);
        },
        [](const C& c) { return std::string(to_string(c.optimize.settings.sampling)); }};
    t["optimize"]["strict_monotonicity"] = {
        [](C& c, const std::string& s) { c.optimize.settings.strict_monotonicity = to_bool(s); },
        [](const C& c) {
          return std::string(c.optimize.settings.strict_monotonicity ? "true" : "false");
        }};
    t["caylpol"]["window"] = count(&C::caylpol, &CaylpolSpec::window);
    t["caylpol"]["startup"] = {
        [](C& c, const std::string& s) { c.caylpol.startup = parse_startup_scheme(s); },
        [](const C& c) { return std::string(to_string(c.caylpol.startup)); }};
    t["order_study"]["step_counts"] = join<Index>(
        [](const C& c) -> const std::vector<Index>& { return c.order.step_counts; },
        [](Index n) { return std::to_string(n); },
        [](C& c, const std::string& s) {
          c.order.step_counts.clear();
          for (const auto& v : split_list(s)) {
            c.order.step_counts.push_back(static_cast<Index>(to_integer(v)));
          }
        });
    t["order_study"]["t_final"] = number(&C::order, &OrderStudySpec::t_final);
    t["order_study"]["reference_steps"] = count(&C::order, &OrderStudySpec::reference_steps);
    t["bench"]["couplings"] = join<double>(
        [](const C& c) -> const std::vector<double>& { return c.bench.couplings; },
        format_double, [](C& c, const std::string& s) {
          c.bench.couplings.clear();
          for (const auto& v : split_list(s)) c.bench.couplings.push_back(to_double(v));
        });
    t["bench"]["repeats"] = count(&C::bench, &BenchSpec::repeats);
    return t;
  }();
  return table;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::string out = "command = " + std::string(to_string(command)) + "\n";
  for (const auto& [section, keys] : fields()) {
    for (const auto& [key, field] : keys) {
      out += section + "." + key + " = " + field.get(*this) + "\n";
    }
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a, 64-bit.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig default_config(Command command) {
  ExperimentConfig c;
  c.command = command;
  switch (command) {
    case Command::Propagate:
      c.methods = {Method::Cfc4};
      break;
    case Command::Optimize:
      c.methods = {Method::CfExp4, Method::CayleyMagnus4, Method::Cfc4};
      break;
    case Command::OrderStudy:
      c.methods = {Method::CrankNicolson, Method::Cfc4, Method::CayleyMagnus4, Method::CfExp4};
      break;
    case Command::Bench:
      c.model = ModelKind::Gpe;
      c.grid = {64, -5, 5};
      c.time = {1, 2000};
      c.state.initial_width = 1;
      c.methods = {Method::Caylpol, Method::Rkmk4};
      break;
  }
  return c;
}

ExperimentConfig parse_config(Command command, const std::string& ini_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParameterError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig config = default_config(command);
  const auto& table = fields();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ParameterError("config: key '" + section + "' must be inside a [section]");
    }
    const auto known = table.find(section);
    if (known == table.end()) throw ParameterError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      const auto field = known->second.find(key);
      if (field == known->second.end()) {
        throw ParameterError("config: unknown key '" + key + "' in [" + section + "]");
      }
      try {
        field->second.set(config, trim(value.data()));
      } catch (const std::invalid_argument& e) {
        throw ParameterError("config: [" + section + "] " + key + ": " + e.what());
      }
    }
  }
  return config;
}

ExperimentConfig load_config(Command command, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config: cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(command, buffer.str());
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw ParameterError("config: " + field + ": " + why);
  };
  if (c.methods.empty()) fail("[run] methods", "at least one method is required");
  if (c.workers < 1) fail("workers", "must be >= 1");
  if (c.grid.points < 8) fail("[grid] points", "must be >= 8");
  if (!(c.grid.x_min < c.grid.x_max)) fail("[grid] x_min", "must be < x_max");
  if (!(c.time.t_final > 0)) fail("[time] t_final", "must be > 0");
  if (c.time.n_steps < 1) fail("[time] n_steps", "must be >= 1");
  try {
    c.lattice.validate();
  } catch (const ParameterError& e) {
    fail("[lattice]", e.what());
  }
  if (!(c.gpe.coupling >= 0)) fail("[gpe] coupling", "must be >= 0");
  if (c.synthetic.levels < 2) fail("[synthetic] levels", "must be >= 2");
  if (c.synthetic.channels < 1) fail("[synthetic] channels", "must be >= 1");
  if (!(c.state.initial_width > 0)) fail("[state] initial_width", "must be > 0");
  if (c.state.target != "reference" && c.state.target != "gaussian") {
    fail("[state] target", "must be reference or gaussian");
  }
  if (c.model == ModelKind::Synthetic && c.state.target != "reference") {
    fail("[state] target", "the synthetic model only supports the reference target");
  }
  if (!(c.state.target_width > 0)) fail("[state] target_width", "must be > 0");
  if (c.caylpol.window < 2) fail("[caylpol] window", "must be >= 2");
  if (!(c.optimize.alpha > 0)) fail("[optimize] alpha", "must be > 0");
  if (c.optimize.initial_guess != "sin2" && c.optimize.initial_guess != "random") {
    fail("[optimize] initial_guess", "must be sin2 or random");
  }
  try {
    c.optimize.settings.validate();
  } catch (const ParameterError& e) {
    fail("[optimize]", e.what());
  }
  if (c.bench.repeats < 1) fail("[bench] repeats", "must be >= 1");

  const bool nonlinear = c.model == ModelKind::Gpe && c.gpe.coupling != 0;
  for (Method m : c.methods) {
    const std::string name(to_string(m));
    switch (c.command) {
      case Command::Optimize:
      case Command::OrderStudy:
        if (!is_linear_method(m)) fail("[run] methods", name + " is not a linear scheme");
        break;
      case Command::Propagate:
        if (nonlinear && is_linear_method(m)) {
          fail("[run] methods", name + " cannot integrate the nonlinear model (g > 0)");
        }
        break;
      case Command::Bench:
        if (c.model == ModelKind::Gpe && is_linear_method(m)) {
          fail("[run] methods", name + " cannot integrate the nonlinear model");
        }
        break;
    }
  }
  if (c.command == Command::Optimize && c.model == ModelKind::Gpe) {
    fail("[model] kind", "optimization supports linear models only");
  }
  if (c.command == Command::OrderStudy) {
    if (c.order.step_counts.size() < 2) fail("[order_study] step_counts", "needs two or more");
    for (Index n : c.order.step_counts) {
      if (n < 1) fail("[order_study] step_counts", "entries must be >= 1");
    }
    if (c.order.reference_steps < 1) fail("[order_study] reference_steps", "must be >= 1");
    if (!(c.order.t_final > 0)) fail("[order_study] t_final", "must be > 0");
  }
  if (c.command == Command::Bench && c.bench.couplings.empty()) {
    fail("[bench] couplings", "at least one value is required");
  }
  const bool uses_caylpol =
      std::find(c.methods.begin(), c.methods.end(), Method::Caylpol) != c.methods.end();
  if (uses_caylpol && c.time.n_steps < c.caylpol.window) {
    fail("[time] n_steps", "must be >= [caylpol] window");
  }
}

}  // namespace qcayley::app
