#pragma once

#include "secalloc/graph.hpp"

#include <string>
#include <vector>

namespace secalloc {

enum class CentralityKind { degree, closeness, betweenness };

const char* to_string(CentralityKind kind);
CentralityKind centrality_kind_from_string(const std::string& name);

struct CentralityScores {
  CentralityKind kind = CentralityKind::degree;
  std::vector<double> values;  // values[v-1] is the score of vertex v
};

struct MonitorSetCandidate {
  std::vector<int> vertices;  // sorted ascending, 1-based
  double total_score = 0.0;
};

struct TopSets {
  std::vector<MonitorSetCandidate> sets;  // lexicographic order
  bool truncated = false;                 // true when the cap cut off ties
};

/// Weighted degree: row sums of the adjacency matrix.
CentralityScores degree_centrality(const Graph& g);

/// (n-1) / (sum of hop distances to all other vertices). Needs n >= 2.
CentralityScores closeness_centrality(const Graph& g);

/// Fraction of pairwise shortest paths through each vertex, hop-count
/// shortest paths, unordered pairs counted once, endpoints excluded.
CentralityScores betweenness_centrality(const Graph& g);

CentralityScores centrality(const Graph& g, CentralityKind kind);

/// Every size-budget vertex set whose total score ties the maximum, compared
/// with relative tolerance tie_rel_tol. At most cap sets are returned, in
/// lexicographic order, with truncated set when the cap cut the list short.
TopSets top_monitor_sets(const CentralityScores& scores, int budget,
                         int cap = 1000, double tie_rel_tol = 1e-9);

}  // namespace secalloc
