#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace secalloc::sdp {

/// Symmetric matrix decision variable P (dim x dim) entering each block
/// through a one-sided map:  G_b * embed(P) + embed(P) * G_bᵀ,
/// where embed(P) places P in the top-left corner of the block. This is the
/// shape Lyapunov terms A'P + PA take, and it lets the Schur complement be
/// assembled without materializing one dense coefficient per matrix entry.
struct MatrixVar {
  int dim = 0;
  std::vector<Eigen::MatrixXd> g_maps;  // one per block; empty matrix = absent
  Eigen::MatrixXd objective;            // dim x dim symmetric; empty = zero
};

/// Scalar decision variable with a dense symmetric coefficient per block.
struct ScalarVar {
  std::vector<Eigen::MatrixXd> coeffs;  // one per block; empty matrix = zero
  double objective = 0.0;
};

/// Linear SDP in inequality (LMI) form over a block-diagonal cone:
///
///   minimize    Σ_g <matrix_vars[g].objective, P_g> + Σ_k scalar_obj_k u_k
///   subject to  F(P, u)[b] := f0[b] + Σ_g (G_{g,b} P̂_g + P̂_g G_{g,b}ᵀ)
///                                   + Σ_k u_k D_{k,b}   ⪰ 0   for every b.
///
/// 1x1 blocks express scalar inequalities.
struct Problem {
  std::vector<int> block_dims;
  std::vector<Eigen::MatrixXd> f0;  // one per block
  std::vector<MatrixVar> matrix_vars;
  std::vector<ScalarVar> scalar_vars;

  int num_blocks() const { return static_cast<int>(block_dims.size()); }
  int num_decision_vars() const;  // vech entries of matrix vars + scalars
  void validate() const;          // throws std::invalid_argument
};

enum class Status {
  optimal,
  infeasible,         // the LMI system admits no solution (Farkas ray found)
  unbounded,          // objective decreases without bound
  iteration_limit,
  numerical_failure,
};

const char* to_string(Status s);

struct Options {
  double tol_gap = 1e-7;   // relative primal-dual gap for status optimal
  double tol_feas = 1e-8;  // LMI slack residual (is F(y) - S == 0) for optimal
  // Stationarity of the conic multiplier. Looser than tol_feas: on problems
  // with degenerate optimal faces the multiplier residual bottoms out around
  // 1e-8..1e-7 while the gap (which already accounts for it through the
  // corrected dual bound) keeps certifying the objective value.
  double tol_stationarity = 1e-7;
  int max_iterations = 100;
  double huge_threshold = 1e9;  // ray / blow-up detection scale
  bool verbose = false;
};

struct Solution {
  Status status = Status::numerical_failure;
  std::vector<Eigen::MatrixXd> matrix_values;
  Eigen::VectorXd scalar_values;
  double objective = 0.0;               // value of the minimized objective
  std::vector<Eigen::MatrixXd> slack;   // F(P, u) per block at the solution
  std::vector<Eigen::MatrixXd> dual;    // conic multiplier X per block
  double rel_gap = 0.0;
  double primal_infeas = 0.0;  // stationarity residual of the multiplier
  double dual_infeas = 0.0;    // slack consistency residual
  int iterations = 0;
  double solve_time_s = 0.0;
  std::string message;
};

/// Primal-dual interior-point solve (HKM direction with Mehrotra
/// predictor-corrector). Deterministic: identical inputs give identical
/// iterates and results.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace secalloc::sdp
