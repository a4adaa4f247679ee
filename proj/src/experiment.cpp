#include "qcayley/app/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qcayley/caylpol.hpp"
#include "qcayley/models/synthetic.hpp"

namespace qcayley::app {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point start) {
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

double max_norm_drift(const Trajectory<double>& traj, double weight) {
  const double n0 = norm(traj.states.front(), weight);
  double drift = 0;
  for (const auto& s : traj.states) drift = std::max(drift, std::abs(norm(s, weight) - n0));
  return drift;
}

/// Runs fn(0..count-1) on up to `workers` threads; results keep index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn fn) {
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) slots[i].emplace(fn(i));
  };
  std::vector<std::future<void>> pool;
  const auto threads = std::min<std::size_t>(count, static_cast<std::size_t>(workers));
  for (std::size_t t = 1; t < threads; ++t) pool.push_back(std::async(std::launch::async, drain));
  std::exception_ptr failure;
  try {
    drain();
  } catch (...) {
    failure = std::current_exception();
  }
  for (auto& f : pool) {
    try {
      f.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  fs::path path(const std::string& relative) {
    const fs::path p = root_ / relative;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
    files_.push_back(relative);
    return p;
  }

  void write_json(const std::string& relative, const json& j) {
    std::ofstream out(path(relative), std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write '" + (root_ / relative).string() + "'");
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_csv(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

json metadata(const ExperimentConfig& config) {
  return {{"command", std::string(to_string(config.command))},
          {"config_hash", hex_hash(config.hash())},
          {"seed", config.seed}};
}

ControlField<double> sin2_field(Index channels, double t_final, Index n_steps, double amplitude) {
  return ControlField<double>::sampled(channels, 0, t_final, n_steps, [amplitude](double t) {
    const double s = std::sin(t);
    return amplitude * s * s;
  });
}

}  // namespace

std::string hex_hash(std::uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Problem build_problem(const ExperimentConfig& c, std::optional<double> coupling) {
  Problem p;
  switch (c.model) {
    case ModelKind::Lattice: {
      Grid1D<double> grid(c.grid.points, c.grid.x_min, c.grid.x_max);
      p.h = lattice_model(grid, c.lattice);
      p.psi0 = gaussian_state(grid, c.state.initial_center, c.state.initial_width);
      p.grid = grid;
      break;
    }
    case ModelKind::Gpe: {
      Grid1D<double> grid(c.grid.points, c.grid.x_min, c.grid.x_max);
      p.h = gpe_model(grid, coupling.value_or(c.gpe.coupling));
      p.psi0 = gaussian_state(grid, c.state.initial_center, c.state.initial_width);
      p.grid = grid;
      break;
    }
    case ModelKind::Synthetic:
      p.h = synthetic_model<double>(c.synthetic.levels, c.synthetic.channels,
                                    c.synthetic.model_seed, c.synthetic.spacing);
      p.psi0 = Vector<double>::Zero(c.synthetic.levels);
      p.psi0(0) = 1;
      break;
  }
  return p;
}

ControlField<double> propagation_control(const ExperimentConfig& c, const Problem& p) {
  if (c.model == ModelKind::Gpe) {
    const double u_c = c.gpe.u_c;
    return ControlField<double>::sampled(p.h.control_count(), 0, c.time.t_final, c.time.n_steps,
                                         [u_c](double t) { return u_c * std::sin(t); });
  }
  return sin2_field(p.h.control_count(), c.time.t_final, c.time.n_steps, c.control.amplitude);
}

ControlField<double> initial_guess(const ExperimentConfig& c, const Problem& p) {
  const double a = c.optimize.initial_amplitude;
  if (c.optimize.initial_guess == "sin2") {
    return sin2_field(p.h.control_count(), c.time.t_final, c.time.n_steps, a);
  }
  ControlField<double> u(p.h.control_count(), 0, c.time.t_final, c.time.n_steps);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  for (Index n = 0; n < u.steps(); ++n) {
    for (Index j = 0; j < u.channels(); ++j) u(j, n) = a * normal(rng);
  }
  return u;
}

Vector<double> target_state(const ExperimentConfig& c, const Problem& p, Scheme scheme) {
  if (c.state.target == "gaussian") {
    if (!p.grid) throw ParameterError("a gaussian target needs a grid model");
    return gaussian_state(*p.grid, c.state.target_center, c.state.target_width);
  }
  return make_reference_target(p.h, scheme, p.psi0, c.time.n_steps, c.time.t_final);
}

Trajectory<double> integrate(const ExperimentConfig& c, const Problem& p, Method method) {
  const ControlField<double> u = propagation_control(c, p);
  if (is_linear_method(method)) return propagate(linear_scheme(method), p.h, u, p.psi0, true);
  const StateGenerator<double> a =
      make_generator(p.h, c.model == ModelKind::Gpe
                              ? sinusoidal_signal<double>(p.h.control_count(), c.gpe.u_c)
                              : piecewise_signal(u));
  const double h = c.time.t_final / double(c.time.n_steps);
  if (method == Method::Rkmk4) return rkmk4_integrate(a, p.psi0, 0.0, c.time.n_steps, h);
  return caylpol_integrate(a, p.psi0, 0.0, c.caylpol.window, c.time.n_steps, h,
                           c.caylpol.startup);
}

std::vector<PropagationRun> run_propagate(const ExperimentConfig& c) {
  const Problem p = build_problem(c);
  return parallel_map<PropagationRun>(c.methods.size(), c.workers, [&](std::size_t i) {
    const auto start = clock::now();
    const Trajectory<double> traj = integrate(c, p, c.methods[i]);
    const double wall = seconds_since(start);
    return PropagationRun{c.methods[i], traj.final_state(), max_norm_drift(traj, p.h.weight),
                          wall};
  });
}

std::vector<OptimizationRun> run_optimize(const ExperimentConfig& c) {
  const Problem p = build_problem(c);
  const ControlField<double> u0 = initial_guess(c, p);
  const auto w = CostWeights<double>::uniform(p.h.control_count(), c.optimize.alpha);
  return parallel_map<OptimizationRun>(c.methods.size(), c.workers, [&](std::size_t i) {
    KrotovSettings settings = c.optimize.settings;
    settings.scheme = linear_scheme(c.methods[i]);
    Vector<double> target = target_state(c, p, settings.scheme);
    KrotovRun<double> run = krotov_optimize(p.h, u0, p.psi0, target, w, settings);
    return OptimizationRun{c.methods[i], std::move(target), std::move(run)};
  });
}

OrderStudy run_order_study(const ExperimentConfig& c) {
  std::vector<Scheme> schemes;
  for (Method m : c.methods) schemes.push_back(linear_scheme(m));
  return rabi_order_study(schemes, c.order.step_counts, c.order.t_final, c.order.reference_steps);
}

std::vector<BenchRow> run_bench(const ExperimentConfig& c) {
  std::vector<std::optional<double>> couplings;
  if (c.model == ModelKind::Gpe) {
    couplings.assign(c.bench.couplings.begin(), c.bench.couplings.end());
  } else {
    couplings.push_back(std::nullopt);
  }
  const auto per_coupling = parallel_map<std::vector<BenchRow>>(
      couplings.size(), c.workers, [&](std::size_t i) {
        const Problem p = build_problem(c, couplings[i]);
        std::vector<BenchRow> rows;
        Vector<double> first;
        for (Method m : c.methods) {
          BenchRow row{couplings[i], m};
          Trajectory<double> traj;
          for (Index r = 0; r < c.bench.repeats; ++r) {
            const auto start = clock::now();
            traj = integrate(c, p, m);
            row.seconds.push_back(seconds_since(start));
          }
          row.median_seconds = median(row.seconds);
          row.per_step_seconds = row.median_seconds / double(c.time.n_steps);
          row.max_norm_drift = max_norm_drift(traj, p.h.weight);
          if (rows.empty()) first = traj.final_state();
          row.difference_to_first = norm<double>(traj.final_state() - first, p.h.weight);
          rows.push_back(std::move(row));
        }
        return rows;
      });
  std::vector<BenchRow> out;
  for (const auto& rows : per_coupling) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

void write_state_csv(const fs::path& path, const Problem& p, const Vector<double>& psi) {
  auto out = open_csv(path);
  out << "x,re,im,density\n";
  for (Index i = 0; i < psi.size(); ++i) {
    const double x = p.grid ? p.grid->x(i) : double(i);
    const double re = psi(i).real(), im = psi(i).imag();
    out << num(x) << ',' << num(re) << ',' << num(im) << ',' << num(re * re + im * im) << '\n';
  }
  close_csv(out, path);
}

void write_control_csv(const fs::path& path, const ControlField<double>& u) {
  auto out = open_csv(path);
  out << 't';
  for (Index j = 0; j < u.channels(); ++j) out << ",u_" << j + 1;
  out << '\n';
  for (Index n = 0; n < u.steps(); ++n) {
    out << num(u.time(n));
    for (Index j = 0; j < u.channels(); ++j) out << ',' << num(u(j, n));
    out << '\n';
  }
  close_csv(out, path);
}

ResultBundle run_experiment(const ExperimentConfig& c, const fs::path& out_dir) {
  validate(c);
  ResultBundle bundle;
  bundle.out_dir = out_dir;
  bundle.config_hash = c.hash();
  bundle.started_utc = utc_now();
  OutputDir dir(out_dir);
  const json meta = metadata(c);

  auto phase = clock::now();
  const auto end_phase = [&](const char* name) {
    bundle.phase_seconds.emplace_back(name, seconds_since(phase));
    phase = clock::now();
  };

  switch (c.command) {
    case Command::Propagate: {
      const auto runs = run_propagate(c);
      end_phase("compute");
      const Problem p = build_problem(c);
      write_control_csv(dir.path("control.csv"), propagation_control(c, p));
      write_state_csv(dir.path("state_initial.csv"), p, p.psi0);
      json summary = {{"runs", json::array()}};
      for (const auto& r : runs) {
        const std::string name(to_string(r.method));
        write_state_csv(dir.path("state_final_" + name + ".csv"), p, r.final_state);
        summary["runs"].push_back({{"method", name},
                                   {"wall_seconds", r.wall_seconds},
                                   {"max_norm_drift", r.max_norm_drift}});
      }
      summary["metadata"] = meta;
      dir.write_json("summary.json", summary);
      break;
    }
    case Command::Optimize: {
      const auto runs = run_optimize(c);
      end_phase("compute");
      const Problem p = build_problem(c);
      write_state_csv(dir.path("state_initial.csv"), p, p.psi0);
      json comparison = {{"schemes", json::array()}};
      double f_min = 1, f_max = 0;
      for (const auto& r : runs) {
        const std::string name(to_string(r.method));
        write_control_csv(dir.path(name + "/control.csv"), r.run.final_control());
        write_state_csv(dir.path(name + "/state_target.csv"), p, r.target);
        write_state_csv(dir.path(name + "/state_final.csv"), p, r.run.final_state);
        const fs::path conv = dir.path(name + "/convergence.csv");
        auto out = open_csv(conv);
        out << "iter,J,fidelity\n";
        for (const auto& rec : r.run.records) {
          out << rec.iteration << ',' << num(rec.cost) << ',' << num(rec.fidelity) << '\n';
        }
        close_csv(out, conv);
        const json entry = {{"scheme", name},
                            {"converged", r.run.converged},
                            {"iterations", r.run.iterations},
                            {"wall_seconds", r.run.wall_seconds},
                            {"final_fidelity", r.run.final_fidelity()},
                            {"final_cost", r.run.final_cost()},
                            {"stop_reason", std::string(to_string(r.run.stop_reason))},
                            {"diagnostics", r.run.diagnostics}};
        json summary = entry;
        summary["metadata"] = meta;
        dir.write_json(name + "/summary.json", summary);
        comparison["schemes"].push_back(entry);
        f_min = std::min(f_min, r.run.final_fidelity());
        f_max = std::max(f_max, r.run.final_fidelity());
      }
      comparison["fidelity_spread"] = f_max - f_min;
      comparison["metadata"] = meta;
      dir.write_json("comparison.json", comparison);
      break;
    }
    case Command::OrderStudy: {
      const OrderStudy study = run_order_study(c);
      end_phase("compute");
      const fs::path path = dir.path("order_study.csv");
      auto out = open_csv(path);
      out << "scheme,n_steps,dt,error\n";
      for (const auto& row : study.rows) {
        out << to_string(row.scheme) << ',' << row.n_steps << ',' << num(row.dt) << ','
            << num(row.error) << '\n';
      }
      close_csv(out, path);
      json summary = {{"slopes", json::object()}};
      for (const auto& [scheme, slope] : study.slopes) {
        summary["slopes"][std::string(to_string(scheme))] = slope;
      }
      summary["metadata"] = meta;
      dir.write_json("summary.json", summary);
      break;
    }
    case Command::Bench: {
      const auto rows = run_bench(c);
      end_phase("compute");
      json bench = {{"n_steps", c.time.n_steps},
                    {"repeats", c.bench.repeats},
                    {"rows", json::array()}};
      for (const auto& r : rows) {
        bench["rows"].push_back({{"coupling", r.coupling ? json(*r.coupling) : json(nullptr)},
                                 {"method", std::string(to_string(r.method))},
                                 {"seconds", r.seconds},
                                 {"median_seconds", r.median_seconds},
                                 {"per_step_seconds", r.per_step_seconds},
                                 {"max_norm_drift", r.max_norm_drift},
                                 {"difference_to_first", r.difference_to_first}});
      }
      bench["metadata"] = meta;
      dir.write_json("bench.json", bench);
      break;
    }
  }
  end_phase("write");
  bundle.finished_utc = utc_now();
  bundle.files = dir.files();

  json phases = json::object();
  for (const auto& [name, secs] : bundle.phase_seconds) phases[name] = secs;
  json manifest = {{"command", std::string(to_string(c.command))},
                   {"config_hash", hex_hash(bundle.config_hash)},
                   {"config", c.canonical()},
                   {"started_utc", bundle.started_utc},
                   {"finished_utc", bundle.finished_utc},
                   {"phase_seconds", phases},
                   {"files", bundle.files}};
  manifest["files"].push_back("manifest.json");
  dir.write_json("manifest.json", manifest);
  bundle.files.push_back("manifest.json");
  return bundle;
}

}  // namespace qcayley::app
