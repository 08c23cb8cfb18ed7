#pragma once

#include "secalloc/graph.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace secalloc {

/// Sorted distinct 1-based vertex ids.
class SortedVertexSet {
 public:
  SortedVertexSet() = default;
  explicit SortedVertexSet(std::vector<int> vertices);

  const std::vector<int>& ids() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }
  bool contains(int v) const;
  std::string to_string() const;  // "{2,5}"

  friend bool operator==(const SortedVertexSet&, const SortedVertexSet&) = default;
  friend auto operator<=>(const SortedVertexSet& a, const SortedVertexSet& b) {
    return a.ids_ <=> b.ids_;
  }

 private:
  std::vector<int> ids_;
};

struct AttackSet : SortedVertexSet {
  using SortedVertexSet::SortedVertexSet;
};

struct MonitorSet : SortedVertexSet {
  using SortedVertexSet::SortedVertexSet;
};

/// LTI system ẋ = a_mat·x + b_cols·ζ with performance outputs perf_mat·x and
/// monitored outputs monitor_mat·x. Initial condition is x(0) = 0 throughout.
struct SystemModel {
  Eigen::MatrixXd a_mat;
  Eigen::MatrixXd b_cols;
  Eigen::MatrixXd perf_mat;     // one row per performance output
  Eigen::MatrixXd monitor_mat;  // one row per monitored output
  std::vector<std::string> labels;  // one per state coordinate

  int state_dim() const { return static_cast<int>(a_mat.rows()); }
  int num_attacks() const { return static_cast<int>(b_cols.cols()); }
  int num_monitors() const { return static_cast<int>(monitor_mat.rows()); }
  int num_perf() const { return static_cast<int>(perf_mat.rows()); }
};

/// First-order consensus network under injection: a_mat = -L, one attack
/// column e_a per attacked vertex, performance = every state, monitors
/// measure the states of the monitor vertices.
SystemModel build_consensus_model(const Graph& g, const AttackSet& attack,
                                  const MonitorSet& monitors);

/// Second-order swing-equation parameters. susceptance_edges carry the line
/// susceptance magnitudes as weights.
struct SwingParams {
  std::vector<double> inertia;  // per bus, > 0
  std::vector<double> damping;  // per bus, >= 0
  std::vector<GraphEdge> susceptance_edges;

  int n_buses() const { return static_cast<int>(inertia.size()); }
  /// Bus connectivity as a Graph (weights = susceptances, or 1 if unit_weights).
  Graph topology(bool unit_weights = false) const;
};

/// Linearized swing network, state [angles; angular velocities]:
///   a_mat = [[0, I], [-M⁻¹L, -M⁻¹D]]
/// with L the susceptance-weighted Laplacian, M = diag(inertia),
/// D = diag(damping). An attack on bus a enters the acceleration equation as
/// (1/I_a)·e_a in the velocity block. Performance and monitor outputs are
/// angle coordinates.
SystemModel build_swing_model(const SwingParams& params, const AttackSet& attack,
                              const MonitorSet& monitors);

/// Bundled IEEE 14-bus parameters (14 buses, 20 lines). Looks for
/// ieee14.json under $SECALLOC_DATA_DIR, then the build-time data directory.
SwingParams load_ieee14();
SwingParams load_swing_params(const std::string& path);
void save_swing_params(const SwingParams& params, const std::string& path);

/// Vector-valued signal of time; channels = number of attack inputs.
class Waveform {
 public:
  Waveform() = default;

  static Waveform constant(Eigen::VectorXd level);
  /// Linear interpolation between columns sampled at t = 0, dt, 2·dt, ...;
  /// held constant beyond the last sample.
  static Waveform sampled(double dt, Eigen::MatrixXd samples);
  static Waveform from_function(int channels,
                                std::function<Eigen::VectorXd(double)> fn);

  Eigen::VectorXd at(double t) const { return fn_(t); }
  int channels() const { return channels_; }

 private:
  int channels_ = 0;
  std::function<Eigen::VectorXd(double)> fn_;
};

struct SimulateResult {
  Eigen::VectorXd time;             // sample instants 0, h, ..., T
  Eigen::MatrixXd perf_outputs;     // num_perf rows
  Eigen::MatrixXd monitor_outputs;  // num_monitors rows
  double perf_energy = 0.0;            // Σ_i (1/T)∫ y_i²
  Eigen::VectorXd monitor_energies;    // per monitor, (1/T)∫ y²
  double attack_energy = 0.0;          // (1/T)∫ ‖ζ‖²
  bool diverged = false;
  double blowup_time = 0.0;
};

/// Fixed-step RK4 integration of ẋ = a_mat·x + b_cols·ζ(t) from x(0) = 0.
/// Energies are time averages computed by the trapezoid rule on the grid.
SimulateResult simulate(const SystemModel& model, const Waveform& attack,
                        double horizon, double step = 1e-3);

}  // namespace secalloc
