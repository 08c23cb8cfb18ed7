#pragma once

#include "secalloc/sdp.hpp"
#include "secalloc/system_model.hpp"

#include <string>
#include <vector>

namespace secalloc {

struct ScenarioParams {
  double delta = 1.0;          // alarm threshold, > 0
  double attack_energy = 1.0;  // attacker energy budget, > 0
};

enum class WcaiStatus { optimal, infeasible, numerical_failure };

const char* to_string(WcaiStatus s);

/// Worst-case attack impact certificate: value = attack_energy*beta +
/// delta*sum(gammas) at the optimum, with storage-function matrix p_mat.
struct WcaiResult {
  double value = 0.0;
  double beta = 0.0;
  Eigen::VectorXd gammas;  // one per monitor row, in monitor row order
  Eigen::MatrixXd p_mat;
  WcaiStatus status = WcaiStatus::numerical_failure;
  double solve_time_s = 0.0;
  int iterations = 0;
  std::string message;
};

/// The dissipation LMI as a block SDP:
///   decision vars P ⪰ 0 (matrix), beta, gamma_m (scalars, floored at
///   positivity_floor);
///   [[A'P + PA + C'C - Σ γ_m c_m c_m', PB], [B'P, -beta·I]] ⪯ 0;
///   objective attack_energy·beta + delta·Σ γ_m.
sdp::Problem assemble_wcai_sdp(const SystemModel& model,
                               const ScenarioParams& params,
                               double positivity_floor = 1e-9);

/// Diagonal similarity scaling x -> D⁻¹x equalizing row/column norms of
/// a_mat (Osborne sweeps). Leaves the attack impact value invariant;
/// d_out receives D's diagonal for mapping certificates back.
SystemModel balance_states(const SystemModel& model, Eigen::VectorXd* d_out = nullptr);

/// Assemble (after balancing) and solve. p_mat is reported in the original
/// state coordinates.
WcaiResult solve_wcai(const SystemModel& model, const ScenarioParams& params,
                      const sdp::Options& options = {});

/// max( λ_max of the dissipation LMI at (P, beta, gammas), -λ_min(P) ).
/// Nonpositive (up to tolerance) for a valid certificate.
double certificate_residual(const SystemModel& model, const WcaiResult& result);

struct BoundCheck {
  double scale = 0.0;     // applied amplitude factor
  double achieved = 0.0;  // performance energy after rescaling
  double ratio = 0.0;     // achieved / bound
  bool violation = false;
};

struct BoundReport {
  std::vector<BoundCheck> trials;
  double best_ratio = 0.0;
  int violations = 0;
};

/// Rescales each trial attack maximally so the simulated stealth and energy
/// constraints hold, then checks achieved performance <= value·(1+1e-3).
BoundReport validate_bound(const SystemModel& model, const ScenarioParams& params,
                           const WcaiResult& result,
                           const std::vector<Waveform>& trial_attacks,
                           double horizon = 20.0, double step = 1e-3);

/// Scenario JSON: {"graph": <path or "ieee14">, "attack": [ids],
/// "monitor": [ids], "delta": x, "attack_energy": x}. A graph path builds the
/// consensus model; "ieee14" builds the swing model.
struct Scenario {
  SystemModel model;
  ScenarioParams params;
  AttackSet attack;
  MonitorSet monitor;
  std::string source;  // graph path or "ieee14"
};

Scenario load_scenario_json(const std::string& path);

}  // namespace secalloc
