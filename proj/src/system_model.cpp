#include "secalloc/system_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace secalloc {

SortedVertexSet::SortedVertexSet(std::vector<int> vertices)
    : ids_(std::move(vertices)) {
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw std::invalid_argument("duplicate vertex id in set");
  }
  if (!ids_.empty() && ids_.front() < 1) {
    throw std::invalid_argument("vertex ids are 1-based");
  }
}

bool SortedVertexSet::contains(int v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

std::string SortedVertexSet::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(ids_[k]);
  }
  return s + "}";
}

SystemModel build_consensus_model(const Graph& g, const AttackSet& attack,
                                  const MonitorSet& monitors) {
  const int n = g.n();
  if (attack.size() < 1 || monitors.size() < 1) {
    throw std::invalid_argument("attack and monitor sets must be nonempty");
  }
  if (attack.ids().back() > n || monitors.ids().back() > n) {
    throw std::invalid_argument("vertex id out of range 1.." + std::to_string(n));
  }
  SystemModel m;
  m.a_mat = -laplacian(g);
  m.b_cols = Eigen::MatrixXd::Zero(n, attack.size());
  for (int k = 0; k < attack.size(); ++k) {
    m.b_cols(attack.ids()[static_cast<std::size_t>(k)] - 1, k) = 1.0;
  }
  m.perf_mat = Eigen::MatrixXd::Identity(n, n);
  m.monitor_mat = Eigen::MatrixXd::Zero(monitors.size(), n);
  for (int k = 0; k < monitors.size(); ++k) {
    m.monitor_mat(k, monitors.ids()[static_cast<std::size_t>(k)] - 1) = 1.0;
  }
  m.labels.reserve(static_cast<std::size_t>(n));
  for (int v = 1; v <= n; ++v) {
    m.labels.push_back("x" + std::to_string(v));
  }
  return m;
}

Graph SwingParams::topology(bool unit_weights) const {
  std::vector<GraphEdge> edges = susceptance_edges;
  if (unit_weights) {
    for (auto& e : edges) e.w = 1.0;
  }
  return Graph(n_buses(), std::move(edges));
}

SystemModel build_swing_model(const SwingParams& params, const AttackSet& attack,
                              const MonitorSet& monitors) {
  const int n = params.n_buses();
  if (n < 1 || static_cast<int>(params.damping.size()) != n) {
    throw std::invalid_argument("inertia/damping lists must have equal length >= 1");
  }
  for (int b = 0; b < n; ++b) {
    if (!(params.inertia[static_cast<std::size_t>(b)] > 0.0)) {
      throw std::invalid_argument("nonpositive inertia at bus " + std::to_string(b + 1));
    }
    if (params.damping[static_cast<std::size_t>(b)] < 0.0) {
      throw std::invalid_argument("negative damping at bus " + std::to_string(b + 1));
    }
  }
  if (attack.size() < 1 || monitors.size() < 1) {
    throw std::invalid_argument("attack and monitor sets must be nonempty");
  }
  if (attack.ids().back() > n || monitors.ids().back() > n) {
    throw std::invalid_argument("unknown bus: ids must lie in 1.." + std::to_string(n));
  }

  Graph topo = params.topology();
  Eigen::MatrixXd lap = laplacian(topo);
  Eigen::VectorXd inv_inertia(n);
  Eigen::VectorXd damping(n);
  for (int b = 0; b < n; ++b) {
    inv_inertia(b) = 1.0 / params.inertia[static_cast<std::size_t>(b)];
    damping(b) = params.damping[static_cast<std::size_t>(b)];
  }

  SystemModel m;
  // State ordering [angles; velocities].
  m.a_mat = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.a_mat.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  m.a_mat.bottomLeftCorner(n, n) = -(inv_inertia.asDiagonal() * lap);
  m.a_mat.bottomRightCorner(n, n) =
      (-inv_inertia.cwiseProduct(damping)).asDiagonal();

  m.b_cols = Eigen::MatrixXd::Zero(2 * n, attack.size());
  for (int k = 0; k < attack.size(); ++k) {
    int bus = attack.ids()[static_cast<std::size_t>(k)];
    m.b_cols(n + bus - 1, k) = inv_inertia(bus - 1);
  }

  m.perf_mat = Eigen::MatrixXd::Zero(n, 2 * n);
  m.perf_mat.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
  m.monitor_mat = Eigen::MatrixXd::Zero(monitors.size(), 2 * n);
  for (int k = 0; k < monitors.size(); ++k) {
    m.monitor_mat(k, monitors.ids()[static_cast<std::size_t>(k)] - 1) = 1.0;
  }

  m.labels.reserve(static_cast<std::size_t>(2 * n));
  for (int b = 1; b <= n; ++b) m.labels.push_back("theta" + std::to_string(b));
  for (int b = 1; b <= n; ++b) m.labels.push_back("omega" + std::to_string(b));
  return m;
}

namespace {

SwingParams swing_params_from_json(const nlohmann::json& j, const std::string& where) {
  SwingParams p;
  try {
    const auto& buses = j.at("buses");
    p.inertia.resize(buses.size());
    p.damping.resize(buses.size());
    for (const auto& b : buses) {
      int id = b.at("bus").get<int>();
      if (id < 1 || id > static_cast<int>(buses.size())) {
        throw std::runtime_error("bus id out of range");
      }
      p.inertia[static_cast<std::size_t>(id - 1)] = b.at("inertia").get<double>();
      p.damping[static_cast<std::size_t>(id - 1)] = b.at("damping").get<double>();
    }
    for (const auto& e : j.at("lines")) {
      p.susceptance_edges.push_back(
          {e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
  } catch (const std::exception& ex) {
    throw std::runtime_error("corrupted swing data in " + where + ": " + ex.what());
  }
  // Cross-checks double as corruption detection for the bundled asset.
  for (double i : p.inertia) {
    if (!(i > 0.0)) throw std::runtime_error("corrupted swing data in " + where +
                                             ": nonpositive inertia");
  }
  p.topology();  // validates edge list
  return p;
}

}  // namespace

SwingParams load_swing_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open swing data file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw std::runtime_error("corrupted swing data in " + path + ": " + ex.what());
  }
  return swing_params_from_json(j, path);
}

SwingParams load_ieee14() {
  std::vector<std::string> candidates;
  if (const char* env = std::getenv("SECALLOC_DATA_DIR")) {
    candidates.push_back(std::string(env) + "/ieee14.json");
  }
#ifdef SECALLOC_DATA_DIR
  candidates.push_back(std::string(SECALLOC_DATA_DIR) + "/ieee14.json");
#endif
  candidates.push_back("data/ieee14.json");
  for (const auto& path : candidates) {
    std::ifstream probe(path);
    if (probe) {
      SwingParams p = load_swing_params(path);
      if (p.n_buses() != 14 || p.susceptance_edges.size() != 20) {
        throw std::runtime_error("corrupted swing data in " + path +
                                 ": expected 14 buses and 20 lines");
      }
      return p;
    }
  }
  throw std::runtime_error("ieee14.json not found (set SECALLOC_DATA_DIR)");
}

void save_swing_params(const SwingParams& params, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["buses"] = nlohmann::json::array();
  for (int b = 1; b <= params.n_buses(); ++b) {
    j["buses"].push_back({{"bus", b},
                          {"inertia", params.inertia[static_cast<std::size_t>(b - 1)]},
                          {"damping", params.damping[static_cast<std::size_t>(b - 1)]}});
  }
  j["lines"] = nlohmann::json::array();
  for (const auto& e : params.susceptance_edges) {
    j["lines"].push_back({e.i, e.j, e.w});
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write swing data file: " + path);
  }
  out << j.dump(2) << "\n";
}

Waveform Waveform::constant(Eigen::VectorXd level) {
  Waveform w;
  w.channels_ = static_cast<int>(level.size());
  w.fn_ = [level = std::move(level)](double) { return level; };
  return w;
}

Waveform Waveform::sampled(double dt, Eigen::MatrixXd samples) {
  if (!(dt > 0.0) || samples.cols() < 1) {
    throw std::invalid_argument("sampled waveform needs dt > 0 and >= 1 sample");
  }
  Waveform w;
  w.channels_ = static_cast<int>(samples.rows());
  w.fn_ = [dt, samples = std::move(samples)](double t) -> Eigen::VectorXd {
    if (t <= 0.0) return samples.col(0);
    double pos = t / dt;
    auto last = static_cast<double>(samples.cols() - 1);
    if (pos >= last) return samples.col(samples.cols() - 1);
    auto lo = static_cast<Eigen::Index>(pos);
    double frac = pos - static_cast<double>(lo);
    return samples.col(lo) * (1.0 - frac) + samples.col(lo + 1) * frac;
  };
  return w;
}

Waveform Waveform::from_function(int channels,
                                 std::function<Eigen::VectorXd(double)> fn) {
  Waveform w;
  w.channels_ = channels;
  w.fn_ = std::move(fn);
  return w;
}

SimulateResult simulate(const SystemModel& model, const Waveform& attack,
                        double horizon, double step) {
  if (!(step > 0.0) || horizon < step) {
    throw std::invalid_argument("simulate needs step > 0 and horizon >= step");
  }
  if (attack.channels() != model.num_attacks()) {
    throw std::invalid_argument("waveform channel count does not match attack inputs");
  }
  const auto& a = model.a_mat;
  const auto& b = model.b_cols;
  const int steps = static_cast<int>(std::llround(horizon / step));
  const double t_end = static_cast<double>(steps) * step;

  SimulateResult r;
  r.time.resize(steps + 1);
  r.perf_outputs.resize(model.num_perf(), steps + 1);
  r.monitor_outputs.resize(model.num_monitors(), steps + 1);
  r.monitor_energies = Eigen::VectorXd::Zero(model.num_monitors());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.state_dim());
  auto deriv = [&](const Eigen::VectorXd& state, double t) -> Eigen::VectorXd {
    return a * state + b * attack.at(t);
  };

  double perf_acc = 0.0;
  Eigen::VectorXd mon_acc = Eigen::VectorXd::Zero(model.num_monitors());
  double att_acc = 0.0;

  for (int k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) * step;
    r.time(k) = t;
    Eigen::VectorXd yp = model.perf_mat * x;
    Eigen::VectorXd ym = model.monitor_mat * x;
    Eigen::VectorXd z = attack.at(t);
    r.perf_outputs.col(k) = yp;
    r.monitor_outputs.col(k) = ym;

    // Trapezoid rule: endpoints get half weight.
    double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    perf_acc += w * yp.squaredNorm();
    mon_acc += w * ym.cwiseAbs2();
    att_acc += w * z.squaredNorm();

    if (!x.allFinite()) {
      r.diverged = true;
      r.blowup_time = t;
      break;
    }
    if (k == steps) break;

    Eigen::VectorXd k1 = deriv(x, t);
    Eigen::VectorXd k2 = deriv(x + 0.5 * step * k1, t + 0.5 * step);
    Eigen::VectorXd k3 = deriv(x + 0.5 * step * k2, t + 0.5 * step);
    Eigen::VectorXd k4 = deriv(x + step * k3, t + step);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  double scale = step / t_end;  // trapezoid weight × (1/T)
  r.perf_energy = perf_acc * scale;
  r.monitor_energies = mon_acc * scale;
  r.attack_energy = att_acc * scale;
  return r;
}

}  // namespace secalloc
