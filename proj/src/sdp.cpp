#include "secalloc/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace secalloc::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration-limit";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "?";
}

int Problem::num_decision_vars() const {
  int m = 0;
  for (const auto& mv : matrix_vars) {
    m += mv.dim * (mv.dim + 1) / 2;
  }
  m += static_cast<int>(scalar_vars.size());
  return m;
}

void Problem::validate() const {
  if (block_dims.empty()) {
    throw std::invalid_argument("sdp: no blocks");
  }
  const auto nb = block_dims.size();
  if (f0.size() != nb) {
    throw std::invalid_argument("sdp: f0 must have one matrix per block");
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (block_dims[b] < 1) {
      throw std::invalid_argument("sdp: block dims must be >= 1");
    }
    if (f0[b].rows() != block_dims[b] || f0[b].cols() != block_dims[b]) {
      throw std::invalid_argument("sdp: f0 dimension mismatch");
    }
  }
  if (num_decision_vars() == 0) {
    throw std::invalid_argument("sdp: no decision variables");
  }
  for (const auto& mv : matrix_vars) {
    if (mv.dim < 1) {
      throw std::invalid_argument("sdp: matrix var dim must be >= 1");
    }
    if (mv.g_maps.size() != nb) {
      throw std::invalid_argument("sdp: matrix var needs one (possibly empty) map per block");
    }
    bool touched = false;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& g = mv.g_maps[b];
      if (g.size() == 0) continue;
      if (g.rows() != block_dims[b] || g.cols() != block_dims[b]) {
        throw std::invalid_argument("sdp: matrix var map must match block dim");
      }
      if (mv.dim > block_dims[b]) {
        throw std::invalid_argument("sdp: matrix var cannot exceed block dim it enters");
      }
      touched = true;
    }
    if (!touched) {
      throw std::invalid_argument("sdp: matrix var appears in no block");
    }
  }
  for (const auto& sv : scalar_vars) {
    if (sv.coeffs.size() != nb) {
      throw std::invalid_argument("sdp: scalar var needs one (possibly empty) coeff per block");
    }
    bool touched = false;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& d = sv.coeffs[b];
      if (d.size() == 0) continue;
      if (d.rows() != block_dims[b] || d.cols() != block_dims[b]) {
        throw std::invalid_argument("sdp: scalar coeff must match block dim");
      }
      touched = true;
    }
    if (!touched) {
      throw std::invalid_argument("sdp: scalar var appears in no block");
    }
  }
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// tr(E_ab * U * E_cd * V) for E_ab = e_a e_b' (+ e_b e_a' if a != b).
inline double esandwich(const MatrixXd& u, const MatrixXd& v, int a, int b,
                        int c, int d) {
  double s = u(b, c) * v(d, a);
  if (c != d) s += u(b, d) * v(c, a);
  if (a != b) {
    s += u(a, c) * v(d, b);
    if (c != d) s += u(a, d) * v(c, b);
  }
  return s;
}

// tr(E_ab * M)
inline double etrace(const MatrixXd& m, int a, int b) {
  return (a == b) ? m(a, a) : m(a, b) + m(b, a);
}

struct GroupData {
  int dim = 0;
  int offset = 0;                       // first decision index
  std::vector<std::pair<int, int>> pairs;  // (a <= b), column-major upper
  std::vector<MatrixXd> g;              // scaled maps, empty = absent
  double scale = 1.0;
};

struct ScalarData {
  int offset = 0;
  std::vector<MatrixXd> d;  // scaled coeffs, empty = absent
  double scale = 1.0;
};

class Ipm {
 public:
  Ipm(const Problem& p, const Options& o) : prob_(p), opts_(o) { setup(); }

  Solution run();

 private:
  const Problem& prob_;
  const Options& opts_;

  int nb_ = 0;  // blocks
  int m_ = 0;   // decision variables
  int total_dim_ = 0;
  std::vector<int> dims_;
  std::vector<MatrixXd> f0_;
  std::vector<GroupData> groups_;
  std::vector<ScalarData> scalars_;
  VectorXd c_;  // scaled objective

  // iterates
  std::vector<MatrixXd> x_, s_;
  VectorXd y_;

  void setup();
  // v_k = sum_b tr(F_k, z[b]) for arbitrary square z per block
  VectorXd apply_adjoint(const std::vector<MatrixXd>& z) const;
  // out[b] += sum_k dy_k F_k[b]
  void add_combination(const VectorXd& dy, std::vector<MatrixXd>& out) const;
  std::vector<MatrixXd> slack_of(const VectorXd& y) const;
  // alpha_max so that m + alpha*dm stays PSD, capped at 1, scaled by tau
  double step_length(const std::vector<MatrixXd>& mats,
                     const std::vector<MatrixXd>& dmats, double tau) const;

  Solution extract(Status status, int iters, double gap, double pinf,
                   double dinf, const std::string& message) const;
};

void Ipm::setup() {
  prob_.validate();
  nb_ = prob_.num_blocks();
  dims_ = prob_.block_dims;
  total_dim_ = 0;
  for (int d : dims_) total_dim_ += d;
  f0_.resize(static_cast<std::size_t>(nb_));
  for (int b = 0; b < nb_; ++b) {
    f0_[static_cast<std::size_t>(b)] = symmetrized(prob_.f0[static_cast<std::size_t>(b)]);
  }

  m_ = prob_.num_decision_vars();
  c_.setZero(m_);
  int offset = 0;
  for (const auto& mv : prob_.matrix_vars) {
    GroupData g;
    g.dim = mv.dim;
    g.offset = offset;
    for (int col = 0; col < mv.dim; ++col) {
      for (int row = 0; row <= col; ++row) {
        g.pairs.emplace_back(row, col);
      }
    }
    double norm = 0.0;
    g.g.resize(static_cast<std::size_t>(nb_));
    for (int b = 0; b < nb_; ++b) {
      const auto& map = mv.g_maps[static_cast<std::size_t>(b)];
      if (map.size() != 0) norm = std::max(norm, map.norm());
    }
    g.scale = std::max(norm, 1e-12);
    for (int b = 0; b < nb_; ++b) {
      const auto& map = mv.g_maps[static_cast<std::size_t>(b)];
      if (map.size() != 0) g.g[static_cast<std::size_t>(b)] = map / g.scale;
    }
    if (mv.objective.size() != 0) {
      MatrixXd q = symmetrized(mv.objective);
      for (std::size_t k = 0; k < g.pairs.size(); ++k) {
        auto [a, b] = g.pairs[k];
        c_(offset + static_cast<int>(k)) =
            ((a == b) ? q(a, a) : 2.0 * q(a, b)) / g.scale;
      }
    }
    offset += static_cast<int>(g.pairs.size());
    groups_.push_back(std::move(g));
  }
  for (const auto& sv : prob_.scalar_vars) {
    ScalarData s;
    s.offset = offset;
    double norm = 0.0;
    s.d.resize(static_cast<std::size_t>(nb_));
    for (int b = 0; b < nb_; ++b) {
      const auto& d = sv.coeffs[static_cast<std::size_t>(b)];
      if (d.size() != 0) norm += d.squaredNorm();
    }
    s.scale = std::max(std::sqrt(norm), 1e-12);
    for (int b = 0; b < nb_; ++b) {
      const auto& d = sv.coeffs[static_cast<std::size_t>(b)];
      if (d.size() != 0) s.d[static_cast<std::size_t>(b)] = symmetrized(d) / s.scale;
    }
    c_(offset) = sv.objective / s.scale;
    offset += 1;
    scalars_.push_back(std::move(s));
  }
}

VectorXd Ipm::apply_adjoint(const std::vector<MatrixXd>& z) const {
  VectorXd v = VectorXd::Zero(m_);
  for (const auto& g : groups_) {
    for (int b = 0; b < nb_; ++b) {
      const auto& gm = g.g[static_cast<std::size_t>(b)];
      if (gm.size() == 0) continue;
      const MatrixXd& zb = z[static_cast<std::size_t>(b)];
      MatrixXd lk = zb * gm + gm.transpose() * zb;  // tr(K_ab Z) via E-lookups
      for (std::size_t k = 0; k < g.pairs.size(); ++k) {
        auto [a, bb] = g.pairs[k];
        v(g.offset + static_cast<int>(k)) += etrace(lk, a, bb);
      }
    }
  }
  for (const auto& s : scalars_) {
    for (int b = 0; b < nb_; ++b) {
      const auto& d = s.d[static_cast<std::size_t>(b)];
      if (d.size() == 0) continue;
      v(s.offset) += (d.array() * z[static_cast<std::size_t>(b)].transpose().array()).sum();
    }
  }
  return v;
}

void Ipm::add_combination(const VectorXd& dy, std::vector<MatrixXd>& out) const {
  for (const auto& g : groups_) {
    MatrixXd yg = MatrixXd::Zero(g.dim, g.dim);
    for (std::size_t k = 0; k < g.pairs.size(); ++k) {
      auto [a, b] = g.pairs[k];
      yg(a, b) = dy(g.offset + static_cast<int>(k));
      yg(b, a) = yg(a, b);
    }
    for (int b = 0; b < nb_; ++b) {
      const auto& gm = g.g[static_cast<std::size_t>(b)];
      if (gm.size() == 0) continue;
      int sdim = dims_[static_cast<std::size_t>(b)];
      MatrixXd embedded = MatrixXd::Zero(sdim, sdim);
      embedded.topLeftCorner(g.dim, g.dim) = yg;
      out[static_cast<std::size_t>(b)] += gm * embedded + embedded * gm.transpose();
    }
  }
  for (const auto& s : scalars_) {
    for (int b = 0; b < nb_; ++b) {
      const auto& d = s.d[static_cast<std::size_t>(b)];
      if (d.size() == 0) continue;
      out[static_cast<std::size_t>(b)] += dy(s.offset) * d;
    }
  }
}

std::vector<MatrixXd> Ipm::slack_of(const VectorXd& y) const {
  std::vector<MatrixXd> f = f0_;
  add_combination(y, f);
  return f;
}

double Ipm::step_length(const std::vector<MatrixXd>& mats,
                        const std::vector<MatrixXd>& dmats, double tau) const {
  double alpha = 1.0 / tau;  // so that tau * alpha starts at 1
  for (int b = 0; b < nb_; ++b) {
    const MatrixXd& m = mats[static_cast<std::size_t>(b)];
    const MatrixXd& dm = dmats[static_cast<std::size_t>(b)];
    if (dims_[static_cast<std::size_t>(b)] == 1) {
      if (dm(0, 0) < 0.0) alpha = std::min(alpha, -m(0, 0) / dm(0, 0));
      continue;
    }
    Eigen::LLT<MatrixXd> llt(m);
    MatrixXd w;
    if (llt.info() == Eigen::Success) {
      w = llt.matrixL().solve(dm).transpose();
      w = llt.matrixL().solve(w);  // L^-1 dm L^-T
    } else {
      // Boundary iterate: fall back to a generalized eigen bound.
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
      VectorXd ev = es.eigenvalues().cwiseMax(1e-14);
      MatrixXd isqrt = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
      w = isqrt * dm * isqrt;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(w), Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return std::min(1.0, tau * alpha);
}

Solution Ipm::extract(Status status, int iters, double gap, double pinf,
                      double dinf, const std::string& message) const {
  Solution sol;
  sol.status = status;
  sol.iterations = iters;
  sol.rel_gap = gap;
  sol.primal_infeas = pinf;
  sol.dual_infeas = dinf;
  sol.message = message;
  sol.matrix_values.reserve(groups_.size());
  for (const auto& g : groups_) {
    MatrixXd p = MatrixXd::Zero(g.dim, g.dim);
    for (std::size_t k = 0; k < g.pairs.size(); ++k) {
      auto [a, b] = g.pairs[k];
      p(a, b) = y_(g.offset + static_cast<int>(k)) / g.scale;
      p(b, a) = p(a, b);
    }
    sol.matrix_values.push_back(std::move(p));
  }
  sol.scalar_values.resize(static_cast<Eigen::Index>(scalars_.size()));
  for (std::size_t k = 0; k < scalars_.size(); ++k) {
    sol.scalar_values(static_cast<Eigen::Index>(k)) = y_(scalars_[k].offset) / scalars_[k].scale;
  }
  sol.objective = c_.dot(y_);
  sol.slack = slack_of(y_);
  sol.dual = x_;
  return sol;
}

Solution Ipm::run() {
  auto t0 = std::chrono::steady_clock::now();

  const double norm_c = std::max(1.0, c_.lpNorm<Eigen::Infinity>());
  double norm_f0 = 0.0;
  for (const auto& f : f0_) norm_f0 = std::max(norm_f0, f.norm());

  const double eta_s = std::max({10.0, 1.5 * norm_f0, norm_c});
  const double eta_x = std::max(10.0, norm_c);

  x_.resize(static_cast<std::size_t>(nb_));
  s_.resize(static_cast<std::size_t>(nb_));
  for (int b = 0; b < nb_; ++b) {
    int d = dims_[static_cast<std::size_t>(b)];
    x_[static_cast<std::size_t>(b)] = eta_x * MatrixXd::Identity(d, d);
    s_[static_cast<std::size_t>(b)] = eta_s * MatrixXd::Identity(d, d);
  }
  y_.setZero(m_);

  const double init_trace_x = eta_x * total_dim_;
  double gap = 1.0, pinf = 1.0, dinf = 1.0;
  int it = 0;
  int stall_count = 0;
  double best_metric = std::numeric_limits<double>::infinity();
  VectorXd best_y;
  std::vector<MatrixXd> best_x, best_s;
  double best_gap = 1.0, best_pinf = 1.0, best_dinf = 1.0;

  auto finish = [&](Status st, const std::string& msg) {
    // On non-optimal exits report the best iterate seen, not the broken one.
    if (st != Status::optimal && best_y.size() == y_.size() &&
        best_metric < std::max({pinf, dinf, gap})) {
      y_ = best_y;
      x_ = best_x;
      s_ = best_s;
      gap = best_gap;
      pinf = best_pinf;
      dinf = best_dinf;
    }
    Solution sol = extract(st, it, gap, pinf, dinf, msg);
    sol.solve_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };

  for (it = 0; it < opts_.max_iterations; ++it) {
    // Residuals and merit.
    VectorXd ax = apply_adjoint(x_);
    VectorXd r_x = c_ - ax;
    std::vector<MatrixXd> r_slk = slack_of(y_);
    double dinf_num = 0.0;
    for (int b = 0; b < nb_; ++b) {
      r_slk[static_cast<std::size_t>(b)] -= s_[static_cast<std::size_t>(b)];
      dinf_num = std::max(dinf_num, r_slk[static_cast<std::size_t>(b)].norm());
    }
    double obj_y = c_.dot(y_);
    double obj_x = 0.0;
    double trace_x = 0.0;
    double comp = 0.0;  // <X, S>
    for (int b = 0; b < nb_; ++b) {
      obj_x -= (f0_[static_cast<std::size_t>(b)].array() *
                x_[static_cast<std::size_t>(b)].array()).sum();
      trace_x += x_[static_cast<std::size_t>(b)].trace();
      comp += (x_[static_cast<std::size_t>(b)].array() *
               s_[static_cast<std::size_t>(b)].array()).sum();
    }
    // Lagrange bound corrected for the stationarity residual; without the
    // r_x'y term the objective difference bottoms out at pinf * |y|.
    double obj_x_corr = obj_x + r_x.dot(y_);
    pinf = r_x.norm() / (1.0 + c_.norm());
    dinf = dinf_num / (1.0 + norm_f0);
    gap = std::max(comp, 0.0) / (1.0 + std::abs(obj_y) + std::abs(obj_x_corr));
    gap = std::max(gap, std::abs(obj_y - obj_x_corr) /
                            (1.0 + std::abs(obj_y) + std::abs(obj_x_corr)));

    if (opts_.verbose) {
      std::ostringstream os;
      os << "iter " << it << " obj " << obj_y << " / " << obj_x_corr << " pinf " << pinf
         << " dinf " << dinf << " gap " << gap << " |y| " << y_.norm() << " trX "
         << trace_x << " mu " << comp / total_dim_;
      // stderr keeps solver chatter out of machine-read stdout
      std::fprintf(stderr, "[sdp] %s\n", os.str().c_str());
    }

    if (pinf <= opts_.tol_stationarity && dinf <= opts_.tol_feas &&
        gap <= opts_.tol_gap) {
      return finish(Status::optimal, "converged");
    }

    // Farkas-style ray: X grows without bound while staying (relatively)
    // stationary with a negative objective pairing -> no feasible slack.
    if (trace_x > opts_.huge_threshold * std::max(1.0, init_trace_x)) {
      double ray_stat = ax.norm() / trace_x;
      double ray_obj = -obj_x / trace_x;  // <F0, X>/tr(X)
      if (ray_stat < 1e-7 * (1.0 + c_.norm()) && ray_obj < -1e-9) {
        return finish(Status::infeasible, "improving-ray certificate of LMI infeasibility");
      }
      return finish(Status::numerical_failure, "multiplier diverged without certificate");
    }
    if (obj_y < -opts_.huge_threshold * norm_c && dinf <= 1e-6) {
      return finish(Status::unbounded, "objective decreasing without bound");
    }

    double metric = std::max({pinf, dinf, gap});
    if (metric < 0.9 * best_metric) {
      stall_count = 0;
    } else {
      ++stall_count;
    }
    if (metric < best_metric) {
      best_metric = metric;
      best_y = y_;
      best_x = x_;
      best_s = s_;
      best_gap = gap;
      best_pinf = pinf;
      best_dinf = dinf;
    }
    if (stall_count > 25) {
      return finish(Status::numerical_failure, "stalled without reaching tolerances");
    }

    // Per-block kernels for the Schur complement.
    double mu = 0.0;
    for (int b = 0; b < nb_; ++b) {
      mu += (x_[static_cast<std::size_t>(b)].array() *
             s_[static_cast<std::size_t>(b)].array()).sum();
    }
    mu /= total_dim_;

    // S⁻¹ and the Nesterov-Todd scaling point W (W S W = X) per block,
    // through clamped eigendecompositions so late ill-conditioning does not
    // abort the run.
    std::vector<MatrixXd> sinv(static_cast<std::size_t>(nb_));
    std::vector<MatrixXd> w(static_cast<std::size_t>(nb_));
    for (int b = 0; b < nb_; ++b) {
      const MatrixXd& xb = x_[static_cast<std::size_t>(b)];
      const MatrixXd& sb = s_[static_cast<std::size_t>(b)];
      Eigen::SelfAdjointEigenSolver<MatrixXd> es_s(sb);
      double s_floor = 1e-15 * std::max(1.0, es_s.eigenvalues().cwiseAbs().maxCoeff());
      VectorXd s_ev = es_s.eigenvalues().cwiseMax(s_floor);
      sinv[static_cast<std::size_t>(b)] = es_s.eigenvectors() *
                                          s_ev.cwiseInverse().asDiagonal() *
                                          es_s.eigenvectors().transpose();
      Eigen::SelfAdjointEigenSolver<MatrixXd> es_x(xb);
      double x_floor = 1e-15 * std::max(1.0, es_x.eigenvalues().cwiseAbs().maxCoeff());
      VectorXd x_ev = es_x.eigenvalues().cwiseMax(x_floor);
      MatrixXd x_half = es_x.eigenvectors() * x_ev.cwiseSqrt().asDiagonal() *
                        es_x.eigenvectors().transpose();
      MatrixXd t = x_half * sb * x_half;
      Eigen::SelfAdjointEigenSolver<MatrixXd> es_t(symmetrized(t));
      double t_floor = 1e-15 * std::max(1.0, es_t.eigenvalues().cwiseAbs().maxCoeff());
      VectorXd t_ev = es_t.eigenvalues().cwiseMax(t_floor);
      MatrixXd t_isqrt = es_t.eigenvectors() *
                         t_ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                         es_t.eigenvectors().transpose();
      w[static_cast<std::size_t>(b)] = symmetrized(x_half * t_isqrt * x_half);
    }

    // Schur matrix M_ij = tr(F_i W F_j W).
    MatrixXd schur = MatrixXd::Zero(m_, m_);
    std::vector<std::vector<MatrixXd>> t_scalar(scalars_.size());
    for (std::size_t k = 0; k < scalars_.size(); ++k) {
      t_scalar[k].resize(static_cast<std::size_t>(nb_));
    }
    for (int b = 0; b < nb_; ++b) {
      const MatrixXd& wb = w[static_cast<std::size_t>(b)];
      // scalar kernels
      for (std::size_t k = 0; k < scalars_.size(); ++k) {
        const auto& d = scalars_[k].d[static_cast<std::size_t>(b)];
        if (d.size() == 0) continue;
        t_scalar[k][static_cast<std::size_t>(b)] = wb * d * wb;
      }
      // group-group
      for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        const auto& gg = groups_[gi].g[static_cast<std::size_t>(b)];
        if (gg.size() == 0) continue;
        MatrixXd wg = wb * gg;
        for (std::size_t hi = gi; hi < groups_.size(); ++hi) {
          const auto& hh = groups_[hi].g[static_cast<std::size_t>(b)];
          if (hh.size() == 0) continue;
          MatrixXd wh = (hi == gi) ? wg : MatrixXd(wb * hh);
          MatrixXd u3 = gg.transpose() * wh;            // G' W H
          MatrixXd v2 = hh.transpose() * wg;            // H' W G
          MatrixXd u4 = wg.transpose();                 // G' W
          MatrixXd v4 = wh.transpose();                 // H' W
          const MatrixXd& u1 = wh;                      // W H
          const MatrixXd& v1 = wg;                      // W G
          const MatrixXd& u2 = wb;                      // W
          const MatrixXd& v3 = wb;                      // W
          const auto& pi = groups_[gi].pairs;
          const auto& pj = groups_[hi].pairs;
          for (std::size_t i = 0; i < pi.size(); ++i) {
            auto [a, bb] = pi[i];
            std::size_t j0 = (hi == gi) ? i : 0;
            for (std::size_t j = j0; j < pj.size(); ++j) {
              auto [cc, dd] = pj[j];
              double v = esandwich(u1, v1, a, bb, cc, dd) +
                         esandwich(u2, v2, a, bb, cc, dd) +
                         esandwich(u3, v3, a, bb, cc, dd) +
                         esandwich(u4, v4, a, bb, cc, dd);
              int row = groups_[gi].offset + static_cast<int>(i);
              int col = groups_[hi].offset + static_cast<int>(j);
              schur(row, col) += v;
              if (row != col) schur(col, row) += v;
            }
          }
        }
        // group-scalar
        for (std::size_t k = 0; k < scalars_.size(); ++k) {
          const auto& tk = t_scalar[k][static_cast<std::size_t>(b)];
          if (tk.size() == 0) continue;
          MatrixXd lk = tk * gg + gg.transpose() * tk;
          for (std::size_t i = 0; i < groups_[gi].pairs.size(); ++i) {
            auto [a, bb] = groups_[gi].pairs[i];
            double v = etrace(lk, a, bb);
            int row = groups_[gi].offset + static_cast<int>(i);
            int col = scalars_[k].offset;
            schur(row, col) += v;
            schur(col, row) += v;
          }
        }
      }
      // scalar-scalar
      for (std::size_t i = 0; i < scalars_.size(); ++i) {
        const auto& di = scalars_[i].d[static_cast<std::size_t>(b)];
        if (di.size() == 0) continue;
        for (std::size_t j = i; j < scalars_.size(); ++j) {
          const auto& tj = t_scalar[j][static_cast<std::size_t>(b)];
          if (tj.size() == 0) continue;
          double v = (di.array() * tj.transpose().array()).sum();
          schur(scalars_[i].offset, scalars_[j].offset) += v;
          if (i != j) schur(scalars_[j].offset, scalars_[i].offset) += v;
        }
      }
    }

    // Jacobi-equilibrate the Schur system (its diagonal spans many orders of
    // magnitude near degenerate optima), add a proximal ridge, and keep an
    // eigenvalue-clamped fallback for when triangular solves lose the digits.
    VectorXd jac = schur.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    MatrixXd schur_eq = jac.asDiagonal() * schur * jac.asDiagonal();
    schur_eq.diagonal().array() += 1e-13;
    Eigen::LDLT<MatrixXd> schur_ldlt(schur_eq);
    bool ldlt_ok = schur_ldlt.info() == Eigen::Success;
    Eigen::SelfAdjointEigenSolver<MatrixXd> schur_eig;
    bool have_eig = false;
    auto schur_solve = [&](const VectorXd& rhs) -> VectorXd {
      VectorXd rhs_eq = jac.asDiagonal() * rhs;
      VectorXd z;
      if (ldlt_ok) {
        z = schur_ldlt.solve(rhs_eq);
        z += schur_ldlt.solve(rhs_eq - schur_eq * z);
        z += schur_ldlt.solve(rhs_eq - schur_eq * z);
      }
      if (!ldlt_ok ||
          (schur_eq * z - rhs_eq).norm() > 1e-8 * (1.0 + rhs_eq.norm())) {
        if (!have_eig) {
          schur_eig.compute(schur_eq);
          have_eig = true;
        }
        double clamp = 1e-14 * schur_eig.eigenvalues().cwiseAbs().maxCoeff();
        VectorXd ev = schur_eig.eigenvalues().cwiseMax(clamp);
        z = schur_eig.eigenvectors() *
            (ev.cwiseInverse().asDiagonal() *
             (schur_eig.eigenvectors().transpose() * rhs_eq));
      }
      return jac.asDiagonal() * z;
    };

    VectorXd tr_f_sinv = apply_adjoint(sinv);
    std::vector<MatrixXd> z1(static_cast<std::size_t>(nb_));
    for (int b = 0; b < nb_; ++b) {
      z1[static_cast<std::size_t>(b)] =
          w[static_cast<std::size_t>(b)] * r_slk[static_cast<std::size_t>(b)] *
          w[static_cast<std::size_t>(b)];
    }
    VectorXd a_z1 = apply_adjoint(z1);

    auto compute_direction = [&](double sigma_mu, VectorXd& dy,
                                 std::vector<MatrixXd>& ds,
                                 std::vector<MatrixXd>& dx) {
      VectorXd rhs = sigma_mu * tr_f_sinv - c_ - a_z1;
      dy = schur_solve(rhs);
      ds = r_slk;
      add_combination(dy, ds);
      dx.resize(static_cast<std::size_t>(nb_));
      for (int b = 0; b < nb_; ++b) {
        const auto& wb = w[static_cast<std::size_t>(b)];
        MatrixXd rhs_m = -x_[static_cast<std::size_t>(b)] -
                         wb * ds[static_cast<std::size_t>(b)] * wb;
        if (sigma_mu != 0.0) {
          rhs_m += sigma_mu * sinv[static_cast<std::size_t>(b)];
        }
        dx[static_cast<std::size_t>(b)] = symmetrized(rhs_m);
      }
    };

    // Predictor: pure affine step to gauge how much centering is needed.
    VectorXd dy_aff;
    std::vector<MatrixXd> ds_aff, dx_aff;
    compute_direction(0.0, dy_aff, ds_aff, dx_aff);
    double tau = 0.97;
    if (it < 3) {
      tau = 0.9;
    } else if (metric < 1e-3) {
      tau = 0.995;
    }
    double ap = step_length(x_, dx_aff, tau);
    double ad = step_length(s_, ds_aff, tau);
    double mu_aff = 0.0;
    for (int b = 0; b < nb_; ++b) {
      mu_aff += ((x_[static_cast<std::size_t>(b)] + ap * dx_aff[static_cast<std::size_t>(b)]).array() *
                 (s_[static_cast<std::size_t>(b)] + ad * ds_aff[static_cast<std::size_t>(b)]).array())
                    .sum();
    }
    mu_aff = std::max(mu_aff / total_dim_, 0.0);
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);
    if (std::min(ap, ad) < 0.2) {
      sigma = std::max(sigma, 0.5);  // re-center when progress shrinks
    }

    VectorXd dy;
    std::vector<MatrixXd> ds, dx;
    compute_direction(sigma * mu, dy, ds, dx);
    ap = step_length(x_, dx, tau);
    ad = step_length(s_, ds, tau);
    if (opts_.verbose) {
      std::fprintf(stderr, "[sdp]   sigma %.3e ap %.3e ad %.3e |dy| %.3e\n", sigma,
                   ap, ad, dy.norm());
    }
    if (ap < 1e-10 && ad < 1e-10) {
      return finish(Status::numerical_failure, "step length collapsed");
    }

    for (int b = 0; b < nb_; ++b) {
      x_[static_cast<std::size_t>(b)] =
          symmetrized(x_[static_cast<std::size_t>(b)] + ap * dx[static_cast<std::size_t>(b)]);
      s_[static_cast<std::size_t>(b)] =
          symmetrized(s_[static_cast<std::size_t>(b)] + ad * ds[static_cast<std::size_t>(b)]);
    }
    y_ += ad * dy;
  }

  return finish(Status::iteration_limit, "iteration limit reached");
}

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  Ipm ipm(problem, options);
  return ipm.run();
}

}  // namespace secalloc::sdp
