#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcayley/caylpol.hpp"
#include "qcayley/krotov.hpp"
#include "qcayley/models.hpp"

namespace qcayley::app {

enum class Command { Propagate, Optimize, OrderStudy, Bench };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

enum class ModelKind { Lattice, Gpe, Synthetic };

std::string_view to_string(ModelKind k);

/// Integrators the runner can dispatch to: the four linear schemes plus the
/// two nonlinear ones.
enum class Method { CrankNicolson, Cfc4, CayleyMagnus4, CfExp4, Caylpol, Rkmk4 };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
bool is_linear_method(Method m);
Scheme linear_scheme(Method m);

struct GridSpec {
  Index points = 512;
  double x_min = -40;
  double x_max = 40;
};

struct GpeSpec {
  double coupling = 1;
  double u_c = 1;
};

struct SyntheticSpec {
  Index levels = 8;
  Index channels = 1;
  std::uint64_t model_seed = 1234;
  double spacing = 0.5;
};

struct TimeSpec {
  double t_final = 10;
  Index n_steps = 2000;
};

struct StateSpec {
  double initial_center = 0;
  double initial_width = 2;
  /// "reference" (sin^2 recipe with the run's scheme) or "gaussian".
  std::string target = "reference";
  double target_center = 0;
  double target_width = 2;
};

/// Fixed control for propagate runs on the linear models:
/// u(t) = amplitude * sin^2(t) at step midpoints.
struct ControlSpec {
  double amplitude = 1;
};

struct OptimizeSpec {
  double alpha = 1e-3;
  /// "sin2": amplitude * sin^2(t); "random": amplitude * N(0, 1) per sample.
  std::string initial_guess = "sin2";
  double initial_amplitude = 0.1;
  KrotovSettings settings;
};

struct CaylpolSpec {
  Index window = 4;
  StartupScheme startup = StartupScheme::Rkmk4;
};

struct OrderStudySpec {
  std::vector<Index> step_counts{25, 50, 100, 200};
  double t_final = 1;
  Index reference_steps = 100000;
};

struct BenchSpec {
  std::vector<double> couplings{0, 0.5, 1, 2, 10, 20};
  Index repeats = 3;
};

struct ExperimentConfig {
  Command command = Command::Propagate;
  ModelKind model = ModelKind::Lattice;
  GridSpec grid;
  LatticeParams<double> lattice;
  GpeSpec gpe;
  SyntheticSpec synthetic;
  TimeSpec time;
  std::vector<Method> methods;
  StateSpec state;
  ControlSpec control;
  OptimizeSpec optimize;
  CaylpolSpec caylpol;
  OrderStudySpec order;
  BenchSpec bench;
  std::uint64_t seed = 0;
  int workers = 1;

  /// Every resolved setting as sorted `section.key = value` lines. Worker
  /// count is left out since it does not change results.
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Defaults for a command before any config file is applied.
ExperimentConfig default_config(Command command);

/// Applies an INI file on top of the command defaults. Unknown sections or
/// keys and malformed values throw ParameterError naming the field.
ExperimentConfig load_config(Command command, const std::filesystem::path& path);
ExperimentConfig parse_config(Command command, const std::string& ini_text);

/// Cross-field checks; run after command-line overrides.
void validate(const ExperimentConfig& config);

}  // namespace qcayley::app
