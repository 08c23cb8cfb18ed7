#include "secalloc/wcai.hpp"

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace secalloc {

const char* to_string(WcaiStatus s) {
  switch (s) {
    case WcaiStatus::optimal: return "optimal";
    case WcaiStatus::infeasible: return "infeasible";
    case WcaiStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

sdp::Problem assemble_wcai_sdp(const SystemModel& model,
                               const ScenarioParams& params,
                               double positivity_floor) {
  if (!(params.delta > 0.0) || !(params.attack_energy > 0.0)) {
    throw std::invalid_argument("delta and attack_energy must be > 0");
  }
  const int d = model.state_dim();
  const int na = model.num_attacks();
  const int ns = model.num_monitors();
  if (d < 1 || na < 1 || ns < 1) {
    throw std::invalid_argument("model needs state, attack and monitor dimensions >= 1");
  }
  if (model.a_mat.cols() != d || model.b_cols.rows() != d ||
      model.perf_mat.cols() != d || model.monitor_mat.cols() != d) {
    throw std::invalid_argument("model matrix dimensions are inconsistent");
  }
  const int lmi = d + na;
  const int nb = 2 + 1 + ns;  // P cone, LMI, beta floor, gamma floors

  sdp::Problem prob;
  prob.block_dims = {d, lmi};
  for (int k = 0; k < 1 + ns; ++k) prob.block_dims.push_back(1);

  prob.f0.assign(static_cast<std::size_t>(nb), Eigen::MatrixXd());
  prob.f0[0] = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd f0_lmi = Eigen::MatrixXd::Zero(lmi, lmi);
  f0_lmi.topLeftCorner(d, d) = -model.perf_mat.transpose() * model.perf_mat;
  prob.f0[1] = f0_lmi;
  for (int k = 0; k < 1 + ns; ++k) {
    prob.f0[static_cast<std::size_t>(2 + k)] =
        Eigen::MatrixXd::Constant(1, 1, -positivity_floor);
  }

  // Storage-function matrix P: enters its own cone as P, and the LMI block
  // through -(Â'P̂ + P̂Â) with Â = [[A, B], [0, 0]].
  sdp::MatrixVar p_var;
  p_var.dim = d;
  p_var.g_maps.assign(static_cast<std::size_t>(nb), Eigen::MatrixXd());
  p_var.g_maps[0] = 0.5 * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(lmi, lmi);
  a_hat.topLeftCorner(d, d) = model.a_mat;
  a_hat.topRightCorner(d, na) = model.b_cols;
  p_var.g_maps[1] = -a_hat.transpose();
  // The certificate matrix can have free rays (directions that neither the
  // LMI nor the cone constrain), which make the central path drift. A trace
  // term far below solver tolerances pins it down; scaling it with the
  // objective keeps positive homogeneity in (delta, attack_energy) exact.
  double trace_reg = 1e-9 * (params.attack_energy + params.delta);
  p_var.objective = trace_reg * Eigen::MatrixXd::Identity(d, d);
  prob.matrix_vars.push_back(std::move(p_var));

  sdp::ScalarVar beta_var;
  beta_var.coeffs.assign(static_cast<std::size_t>(nb), Eigen::MatrixXd());
  Eigen::MatrixXd beta_lmi = Eigen::MatrixXd::Zero(lmi, lmi);
  beta_lmi.bottomRightCorner(na, na) = Eigen::MatrixXd::Identity(na, na);
  beta_var.coeffs[1] = beta_lmi;
  beta_var.coeffs[2] = Eigen::MatrixXd::Constant(1, 1, 1.0);
  beta_var.objective = params.attack_energy;
  prob.scalar_vars.push_back(std::move(beta_var));

  for (int k = 0; k < ns; ++k) {
    sdp::ScalarVar gamma_var;
    gamma_var.coeffs.assign(static_cast<std::size_t>(nb), Eigen::MatrixXd());
    Eigen::VectorXd c = model.monitor_mat.row(k).transpose();
    Eigen::MatrixXd gamma_lmi = Eigen::MatrixXd::Zero(lmi, lmi);
    gamma_lmi.topLeftCorner(d, d) = c * c.transpose();
    gamma_var.coeffs[1] = gamma_lmi;
    gamma_var.coeffs[static_cast<std::size_t>(3 + k)] =
        Eigen::MatrixXd::Constant(1, 1, 1.0);
    gamma_var.objective = params.delta;
    prob.scalar_vars.push_back(std::move(gamma_var));
  }
  return prob;
}

SystemModel balance_states(const SystemModel& model, Eigen::VectorXd* d_out) {
  const int n = model.state_dim();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd a = model.a_mat;
  for (int sweep = 0; sweep < 5; ++sweep) {
    for (int i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        row += a(i, j) * a(i, j);
        col += a(j, i) * a(j, i);
      }
      if (row <= 0.0 || col <= 0.0) continue;
      double f = std::sqrt(std::sqrt(row / col));  // damped Osborne update
      d(i) *= f;
      a.row(i) /= f;
      a.col(i) *= f;
    }
  }
  SystemModel out = model;
  out.a_mat = a;
  out.b_cols = d.cwiseInverse().asDiagonal() * model.b_cols;
  out.perf_mat = model.perf_mat * d.asDiagonal();
  out.monitor_mat = model.monitor_mat * d.asDiagonal();
  if (d_out) *d_out = d;
  return out;
}

namespace {

// Orthonormal basis of the (a, b)-reachable subspace via a Krylov sweep.
Eigen::MatrixXd reachable_basis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                double rank_tol = 1e-10) {
  const int d = static_cast<int>(a.rows());
  const int na = static_cast<int>(b.cols());
  Eigen::MatrixXd krylov(d, d * na);
  Eigen::MatrixXd block = b;
  for (int k = 0; k < d; ++k) {
    krylov.middleCols(k * na, na) = block;
    block = a * block;
    double norm = block.norm();
    if (norm > 0.0) block /= norm;  // keep powers from overflowing the scale
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(krylov, Eigen::ComputeThinU);
  double cutoff = rank_tol * svd.singularValues()(0);
  int rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > cutoff) {
    ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

// States outside the reachable subspace never get excited from x(0) = 0, so
// the impact value is that of the restricted model. This removes certificate
// directions that exist only to cover unreachable states; they make the
// interior-point endgame needlessly degenerate (graph automorphisms such as
// twin vertices produce them). Only sound for symmetric dynamics, where the
// lifted certificate can always be completed on the orthogonal block.
struct ReducedModel {
  SystemModel model;
  Eigen::MatrixXd v;  // d x r basis, empty when no reduction applies
  Eigen::MatrixXd u;  // d x (d-r) complement
};

ReducedModel try_reduce(const SystemModel& m) {
  ReducedModel out;
  out.model = m;
  if (!m.a_mat.isApprox(m.a_mat.transpose(), 1e-12)) {
    return out;
  }
  Eigen::MatrixXd v = reachable_basis(m.a_mat, m.b_cols);
  const int d = m.state_dim();
  const int r = static_cast<int>(v.cols());
  if (r >= d) {
    return out;
  }
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd q = qr.matrixQ();
  Eigen::MatrixXd u = q.rightCols(d - r);
  // The completion needs the unreachable block strictly stable.
  Eigen::MatrixXd a_u = u.transpose() * m.a_mat * u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a_u + a_u.transpose()),
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > -1e-9) {
    return out;
  }
  out.v = v;
  out.u = u;
  out.model.a_mat = v.transpose() * m.a_mat * v;
  out.model.b_cols = v.transpose() * m.b_cols;
  out.model.perf_mat = m.perf_mat * v;
  out.model.monitor_mat = m.monitor_mat * v;
  out.model.labels.assign(static_cast<std::size_t>(r), "z");
  return out;
}

// Completes a reduced certificate to the full space: P = V Pr V' + tau U U'.
Eigen::MatrixXd lift_certificate(const SystemModel& full, const WcaiResult& reduced,
                                 const Eigen::MatrixXd& v, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd base = v * reduced.p_mat * v.transpose();
  double tau = std::max(1.0, 4.0 * reduced.p_mat.norm());
  Eigen::MatrixXd best = base + tau * u * u.transpose();
  WcaiResult probe = reduced;
  double best_res = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    probe.p_mat = base + tau * u * u.transpose();
    double res = certificate_residual(full, probe);
    if (attempt == 0 || res < best_res) {
      best_res = res;
      best = probe.p_mat;
    }
    if (res <= 1e-8) break;
    tau *= 2.0;
  }
  return best;
}

}  // namespace

WcaiResult solve_wcai(const SystemModel& model, const ScenarioParams& params,
                      const sdp::Options& options) {
  Eigen::VectorXd d_diag;
  SystemModel balanced = balance_states(model, &d_diag);
  ReducedModel reduced = try_reduce(balanced);
  const bool did_reduce = reduced.v.size() != 0;
  sdp::Problem prob = assemble_wcai_sdp(reduced.model, params);
  sdp::Solution sol = sdp::solve(prob, options);

  WcaiResult r;
  r.solve_time_s = sol.solve_time_s;
  r.iterations = sol.iterations;
  r.message = sol.message;
  switch (sol.status) {
    case sdp::Status::optimal:
      r.status = WcaiStatus::optimal;
      break;
    case sdp::Status::infeasible:
      r.status = WcaiStatus::infeasible;
      break;
    default:
      r.status = WcaiStatus::numerical_failure;
      break;
  }
  if (r.status != WcaiStatus::optimal) {
    return r;
  }
  r.beta = sol.scalar_values(0);
  r.gammas = sol.scalar_values.tail(model.num_monitors());
  // Objective identity; excludes the sub-tolerance trace regularizer.
  r.value = params.attack_energy * r.beta + params.delta * r.gammas.sum();
  r.p_mat = sol.matrix_values[0];
  if (did_reduce) {
    r.p_mat = lift_certificate(balanced, r, reduced.v, reduced.u);
  }
  // P was solved in balanced coordinates x̂ = D⁻¹x: map back.
  r.p_mat = (d_diag.cwiseInverse().asDiagonal() * r.p_mat *
             d_diag.cwiseInverse().asDiagonal()).eval();
  return r;
}

double certificate_residual(const SystemModel& model, const WcaiResult& result) {
  const int d = model.state_dim();
  const int na = model.num_attacks();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d + na, d + na);
  m.topLeftCorner(d, d) = model.a_mat.transpose() * result.p_mat +
                          result.p_mat * model.a_mat +
                          model.perf_mat.transpose() * model.perf_mat;
  for (int k = 0; k < model.num_monitors(); ++k) {
    Eigen::VectorXd c = model.monitor_mat.row(k).transpose();
    m.topLeftCorner(d, d) -= result.gammas(k) * (c * c.transpose());
  }
  m.topRightCorner(d, na) = result.p_mat * model.b_cols;
  m.bottomLeftCorner(na, d) = m.topRightCorner(d, na).transpose();
  m.bottomRightCorner(na, na) = -result.beta * Eigen::MatrixXd::Identity(na, na);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lmi_eig(m, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eig(result.p_mat,
                                                       Eigen::EigenvaluesOnly);
  return std::max(lmi_eig.eigenvalues().maxCoeff(),
                  -p_eig.eigenvalues().minCoeff());
}

BoundReport validate_bound(const SystemModel& model, const ScenarioParams& params,
                           const WcaiResult& result,
                           const std::vector<Waveform>& trial_attacks,
                           double horizon, double step) {
  if (result.status != WcaiStatus::optimal) {
    throw std::invalid_argument("validate_bound needs an optimal certificate");
  }
  BoundReport report;
  for (const auto& attack : trial_attacks) {
    SimulateResult sim = simulate(model, attack, horizon, step);
    BoundCheck check;
    if (sim.diverged || sim.attack_energy <= 0.0) {
      check.scale = 0.0;
      check.achieved = 0.0;
    } else {
      double c2 = params.attack_energy / sim.attack_energy;
      for (int k = 0; k < sim.monitor_energies.size(); ++k) {
        if (sim.monitor_energies(k) > 0.0) {
          c2 = std::min(c2, params.delta / sim.monitor_energies(k));
        }
      }
      check.scale = std::sqrt(c2);
      check.achieved = c2 * sim.perf_energy;  // outputs scale linearly
    }
    check.ratio = check.achieved / std::max(result.value, 1e-300);
    check.violation = check.achieved > result.value * (1.0 + 1e-3);
    report.best_ratio = std::max(report.best_ratio, check.ratio);
    if (check.violation) ++report.violations;
    report.trials.push_back(check);
  }
  return report;
}

Scenario load_scenario_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  nlohmann::json j;
  in >> j;

  Scenario sc;
  sc.params.delta = j.value("delta", 1.0);
  sc.params.attack_energy = j.value("attack_energy", 1.0);
  sc.attack = AttackSet(j.at("attack").get<std::vector<int>>());
  sc.monitor = MonitorSet(j.at("monitor").get<std::vector<int>>());
  sc.source = j.at("graph").get<std::string>();

  if (sc.source == "ieee14") {
    sc.model = build_swing_model(load_ieee14(), sc.attack, sc.monitor);
  } else {
    std::filesystem::path gp(sc.source);
    if (!std::filesystem::exists(gp)) {
      std::filesystem::path beside = std::filesystem::path(path).parent_path() / gp;
      if (std::filesystem::exists(beside)) gp = beside;
    }
    Graph g = load_graph_json(gp.string());
    if (!is_connected(g)) {
      throw DisconnectedError("scenario graph must be connected");
    }
    sc.model = build_consensus_model(g, sc.attack, sc.monitor);
  }
  return sc;
}

}  // namespace secalloc
