#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace secalloc {

/// Thrown when Erdos-Renyi generation cannot reach a connected graph
/// within the rejection cap (e.g. p = 0 with n >= 2).
class UnconnectableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by operations that require a connected graph.
class DisconnectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphEdge {
  int i = 0;       // 1-based endpoint, i < j
  int j = 0;
  double w = 1.0;  // strictly positive weight
};

/// Weighted undirected graph. Vertices are numbered 1..n in every interface
/// and file format; vertex v maps to matrix row/column v-1.
class Graph {
 public:
  Graph() = default;

  /// Validates 1 <= i < j <= n, w > 0, and no duplicate pairs.
  Graph(int n, std::vector<GraphEdge> edges);

  int n() const { return n_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }

  /// Symmetric nonnegative adjacency with zero diagonal.
  const Eigen::MatrixXd& adjacency() const { return adj_; }

  double weight(int i, int j) const { return adj_(i - 1, j - 1); }

  /// Neighbor ids (1-based, ascending) per vertex; index 0 is vertex 1.
  const std::vector<std::vector<int>>& neighbors() const { return nbrs_; }

  /// Same topology with every edge weight set to 1.
  Graph with_unit_weights() const;

 private:
  int n_ = 0;
  std::vector<GraphEdge> edges_;
  Eigen::MatrixXd adj_;
  std::vector<std::vector<int>> nbrs_;
};

struct RngSeed {
  std::uint64_t value = 0;
};

struct ErdosRenyiResult {
  Graph graph;
  std::uint64_t seed_used = 0;  // seed of the accepted attempt
  int rejections = 0;           // disconnected draws discarded before acceptance
};

/// G(n, p) with unit edge weights, deterministic per seed. Disconnected draws
/// are rejected and regenerated with seed+1, seed+2, ... so edge statistics
/// stay Bernoulli(p). Throws UnconnectableError after max_rejections.
ErdosRenyiResult generate_erdos_renyi(int n, double p, RngSeed seed,
                                      int max_rejections = 10000);

/// L = Delta - A. Symmetric with zero row sums.
Eigen::MatrixXd laplacian(const Graph& g);

/// True iff a traversal from vertex 1 reaches all vertices.
bool is_connected(const Graph& g);

/// Minimum edge counts between all pairs. Throws DisconnectedError.
Eigen::MatrixXi all_pairs_hop_distance(const Graph& g);

// JSON format: {"n": int, "edges": [[i, j, w], ...]} with 1-based i < j.
Graph graph_from_json(const std::string& text);
std::string graph_to_json(const Graph& g);
Graph load_graph_json(const std::string& path);
void save_graph_json(const Graph& g, const std::string& path);

}  // namespace secalloc
