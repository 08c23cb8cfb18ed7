#include "secalloc/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace secalloc {

Graph::Graph(int n, std::vector<GraphEdge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) {
    throw std::invalid_argument("graph needs at least one vertex");
  }
  adj_ = Eigen::MatrixXd::Zero(n_, n_);
  nbrs_.assign(static_cast<std::size_t>(n_), {});
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges_) {
    if (e.i < 1 || e.j > n_ || e.i >= e.j) {
      throw std::invalid_argument("edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) +
                                  ") violates 1 <= i < j <= n");
    }
    if (!(e.w > 0.0)) {
      throw std::invalid_argument("edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) +
                                  ") has nonpositive weight");
    }
    if (!seen.insert({e.i, e.j}).second) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(e.i) +
                                  "," + std::to_string(e.j) + ")");
    }
    adj_(e.i - 1, e.j - 1) = e.w;
    adj_(e.j - 1, e.i - 1) = e.w;
    nbrs_[static_cast<std::size_t>(e.i - 1)].push_back(e.j);
    nbrs_[static_cast<std::size_t>(e.j - 1)].push_back(e.i);
  }
  for (auto& nb : nbrs_) {
    std::sort(nb.begin(), nb.end());
  }
  std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) {
    return std::pair{a.i, a.j} < std::pair{b.i, b.j};
  });
}

Graph Graph::with_unit_weights() const {
  std::vector<GraphEdge> unit = edges_;
  for (auto& e : unit) {
    e.w = 1.0;
  }
  return Graph(n_, std::move(unit));
}

namespace {

// Uniform double in [0, 1) with an explicitly fixed bit recipe so that a
// given seed produces the same graph on every platform (the distribution
// classes in <random> are implementation-defined).
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Graph sample_er(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GraphEdge> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (unit_double(rng) < p) {
        edges.push_back({i, j, 1.0});
      }
    }
  }
  return Graph(n, std::move(edges));
}

}  // namespace

ErdosRenyiResult generate_erdos_renyi(int n, double p, RngSeed seed,
                                      int max_rejections) {
  if (n < 1) {
    throw std::invalid_argument("n must be >= 1");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("p must lie in [0, 1]");
  }
  for (int attempt = 0; attempt <= max_rejections; ++attempt) {
    std::uint64_t s = seed.value + static_cast<std::uint64_t>(attempt);
    Graph g = sample_er(n, p, s);
    if (is_connected(g)) {
      return ErdosRenyiResult{std::move(g), s, attempt};
    }
  }
  std::ostringstream msg;
  msg << "unconnectable parameters: no connected G(" << n << ", " << p
      << ") draw within " << max_rejections << " rejections";
  throw UnconnectableError(msg.str());
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const Eigen::MatrixXd& a = g.adjacency();
  Eigen::VectorXd deg = a.rowwise().sum();
  Eigen::MatrixXd l = -a;
  l.diagonal() += deg;
  return l;
}

bool is_connected(const Graph& g) {
  const int n = g.n();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::queue<int> frontier;
  frontier.push(1);
  visited[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int u : g.neighbors()[static_cast<std::size_t>(v - 1)]) {
      if (!visited[static_cast<std::size_t>(u - 1)]) {
        visited[static_cast<std::size_t>(u - 1)] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

Eigen::MatrixXi all_pairs_hop_distance(const Graph& g) {
  const int n = g.n();
  Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, -1);
  for (int s = 1; s <= n; ++s) {
    d(s - 1, s - 1) = 0;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      for (int u : g.neighbors()[static_cast<std::size_t>(v - 1)]) {
        if (d(s - 1, u - 1) < 0) {
          d(s - 1, u - 1) = d(s - 1, v - 1) + 1;
          frontier.push(u);
        }
      }
    }
    for (int t = 1; t <= n; ++t) {
      if (d(s - 1, t - 1) < 0) {
        throw DisconnectedError("disconnected: no path between vertices " +
                                std::to_string(s) + " and " +
                                std::to_string(t));
      }
    }
  }
  return d;
}

Graph graph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("n").get<int>();
  std::vector<GraphEdge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) {
      throw std::invalid_argument("graph edge must be [i, j, w]");
    }
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return Graph(n, std::move(edges));
}

std::string graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["n"] = g.n();
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({e.i, e.j, e.w});
  }
  return j.dump(2) + "\n";
}

Graph load_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open graph file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

void save_graph_json(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write graph file: " + path);
  }
  out << graph_to_json(g);
}

}  // namespace secalloc
