#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcayley/app/config.hpp"
#include "qcayley/experiments/order_study.hpp"

namespace qcayley::app {

/// Output directory or file could not be created or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Problem {
  ControlledHamiltonian<double> h;
  std::optional<Grid1D<double>> grid;  // empty for the synthetic model
  Vector<double> psi0;
};

/// Model and initial state described by the config. The GPE coupling is
/// taken from `coupling` when given, otherwise from [gpe] coupling.
Problem build_problem(const ExperimentConfig& config,
                      std::optional<double> coupling = std::nullopt);

/// The fixed control used by propagate on the linear models.
ControlField<double> propagation_control(const ExperimentConfig& config, const Problem& problem);

/// Krotov starting guess; the random guess is drawn from config.seed.
ControlField<double> initial_guess(const ExperimentConfig& config, const Problem& problem);

Vector<double> target_state(const ExperimentConfig& config, const Problem& problem,
                            Scheme scheme);

/// Full trajectory under one method. Linear schemes use the piecewise control
/// on linear models; the nonlinear methods use u_c sin(t) on the GPE model and
/// the piecewise control elsewhere.
Trajectory<double> integrate(const ExperimentConfig& config, const Problem& problem,
                             Method method);

struct PropagationRun {
  Method method;
  Vector<double> final_state;
  double max_norm_drift = 0;
  double wall_seconds = 0;
};

struct OptimizationRun {
  Method method;
  Vector<double> target;
  KrotovRun<double> run;
};

struct BenchRow {
  std::optional<double> coupling;
  Method method;
  std::vector<double> seconds;
  double median_seconds = 0;
  double per_step_seconds = 0;
  double max_norm_drift = 0;
  /// Weighted L2 distance of the final state from the first method's.
  double difference_to_first = 0;
};

std::vector<PropagationRun> run_propagate(const ExperimentConfig& config);
std::vector<OptimizationRun> run_optimize(const ExperimentConfig& config);
OrderStudy run_order_study(const ExperimentConfig& config);
std::vector<BenchRow> run_bench(const ExperimentConfig& config);

struct ResultBundle {
  std::filesystem::path out_dir;
  std::uint64_t config_hash = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::pair<std::string, double>> phase_seconds;
  /// Paths relative to out_dir, in write order.
  std::vector<std::string> files;
};

/// Runs the configured command and writes its files plus manifest.json.
ResultBundle run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// CSV writers; numbers use %.17g and rows end in '\n'.
void write_state_csv(const std::filesystem::path& path, const Problem& problem,
                     const Vector<double>& psi);
void write_control_csv(const std::filesystem::path& path, const ControlField<double>& u);

std::string hex_hash(std::uint64_t hash);

}  // namespace qcayley::app
