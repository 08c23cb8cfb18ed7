#include "secalloc/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace secalloc {

const char* to_string(CentralityKind kind) {
  switch (kind) {
    case CentralityKind::degree:
      return "degree";
    case CentralityKind::closeness:
      return "closeness";
    case CentralityKind::betweenness:
      return "betweenness";
  }
  return "?";
}

CentralityKind centrality_kind_from_string(const std::string& name) {
  if (name == "degree") return CentralityKind::degree;
  if (name == "closeness") return CentralityKind::closeness;
  if (name == "betweenness") return CentralityKind::betweenness;
  throw std::invalid_argument("unknown centrality kind: " + name);
}

CentralityScores degree_centrality(const Graph& g) {
  Eigen::VectorXd sums = g.adjacency().rowwise().sum();
  return {CentralityKind::degree,
          std::vector<double>(sums.data(), sums.data() + sums.size())};
}

CentralityScores closeness_centrality(const Graph& g) {
  const int n = g.n();
  if (n < 2) {
    throw std::invalid_argument("closeness centrality needs n >= 2");
  }
  Eigen::MatrixXi d = all_pairs_hop_distance(g);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    long total = 0;
    for (int u = 0; u < n; ++u) {
      total += d(v, u);
    }
    values[static_cast<std::size_t>(v)] =
        static_cast<double>(n - 1) / static_cast<double>(total);
  }
  return {CentralityKind::closeness, std::move(values)};
}

CentralityScores betweenness_centrality(const Graph& g) {
  const int n = g.n();
  if (!is_connected(g)) {
    throw DisconnectedError("disconnected: betweenness needs a connected graph");
  }
  std::vector<double> cb(static_cast<std::size_t>(n), 0.0);

  // Brandes dependency accumulation over hop-count shortest paths.
  std::vector<int> order;
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(n));
  std::vector<double> sigma(static_cast<std::size_t>(n));
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    order.clear();
    for (int v = 0; v < n; ++v) {
      preds[static_cast<std::size_t>(v)].clear();
      sigma[static_cast<std::size_t>(v)] = 0.0;
      dist[static_cast<std::size_t>(v)] = -1;
    }
    sigma[static_cast<std::size_t>(s)] = 1.0;
    dist[static_cast<std::size_t>(s)] = 0;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      order.push_back(v);
      for (int u1 : g.neighbors()[static_cast<std::size_t>(v)]) {
        int u = u1 - 1;
        if (dist[static_cast<std::size_t>(u)] < 0) {
          dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
          frontier.push(u);
        }
        if (dist[static_cast<std::size_t>(u)] ==
            dist[static_cast<std::size_t>(v)] + 1) {
          sigma[static_cast<std::size_t>(u)] += sigma[static_cast<std::size_t>(v)];
          preds[static_cast<std::size_t>(u)].push_back(v);
        }
      }
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int v = *it;
      for (int u : preds[static_cast<std::size_t>(v)]) {
        delta[static_cast<std::size_t>(u)] +=
            sigma[static_cast<std::size_t>(u)] / sigma[static_cast<std::size_t>(v)] *
            (1.0 + delta[static_cast<std::size_t>(v)]);
      }
      if (v != s) {
        cb[static_cast<std::size_t>(v)] += delta[static_cast<std::size_t>(v)];
      }
    }
  }
  // Each unordered pair was visited from both endpoints.
  for (double& v : cb) {
    v /= 2.0;
  }
  return {CentralityKind::betweenness, std::move(cb)};
}

CentralityScores centrality(const Graph& g, CentralityKind kind) {
  switch (kind) {
    case CentralityKind::degree:
      return degree_centrality(g);
    case CentralityKind::closeness:
      return closeness_centrality(g);
    case CentralityKind::betweenness:
      return betweenness_centrality(g);
  }
  throw std::logic_error("unreachable");
}

namespace {

struct TieEnumerator {
  const std::vector<double>& scores;
  int n;
  int budget;
  int cap;
  double floor;                          // accept sums >= floor
  std::vector<std::vector<double>> top;  // top[idx][r]: r largest in idx..n-1
  TopSets out;
  std::vector<int> chosen;
  bool done = false;

  void run() {
    chosen.reserve(static_cast<std::size_t>(budget));
    dfs(0, 0.0);
  }

  void dfs(int start, double sum) {
    if (done) return;
    if (static_cast<int>(chosen.size()) == budget) {
      if (static_cast<int>(out.sets.size()) == cap) {
        out.truncated = true;
        done = true;
        return;
      }
      std::vector<int> verts(chosen.size());
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        verts[k] = chosen[k] + 1;
      }
      out.sets.push_back({std::move(verts), sum});
      return;
    }
    int need = budget - static_cast<int>(chosen.size());
    for (int v = start; v <= n - need; ++v) {
      double bound = sum + scores[static_cast<std::size_t>(v)] +
                     top[static_cast<std::size_t>(v + 1)][static_cast<std::size_t>(need - 1)];
      if (bound >= floor) {
        chosen.push_back(v);
        dfs(v + 1, sum + scores[static_cast<std::size_t>(v)]);
        chosen.pop_back();
        if (done) return;
      }
    }
  }
};

}  // namespace

TopSets top_monitor_sets(const CentralityScores& scores, int budget, int cap,
                         double tie_rel_tol) {
  const int n = static_cast<int>(scores.values.size());
  if (budget < 1 || budget > n) {
    throw std::invalid_argument("budget must lie in 1..n");
  }
  if (cap < 1) {
    throw std::invalid_argument("cap must be >= 1");
  }

  // Best achievable total is the sum of the budget largest scores.
  std::vector<double> sorted = scores.values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double best = 0.0;
  for (int r = 0; r < budget; ++r) {
    best += sorted[static_cast<std::size_t>(r)];
  }
  double tol = tie_rel_tol * std::max(1.0, std::abs(best));

  // top[idx][r] = sum of the r largest scores among vertices idx..n-1.
  std::vector<std::vector<double>> top(static_cast<std::size_t>(n) + 1);
  for (int idx = n; idx >= 0; --idx) {
    std::vector<double> tail(scores.values.begin() + idx, scores.values.end());
    std::sort(tail.begin(), tail.end(), std::greater<>());
    auto& row = top[static_cast<std::size_t>(idx)];
    row.assign(static_cast<std::size_t>(budget) + 1, 0.0);
    for (int r = 1; r <= budget && r <= static_cast<int>(tail.size()); ++r) {
      row[static_cast<std::size_t>(r)] =
          row[static_cast<std::size_t>(r - 1)] + tail[static_cast<std::size_t>(r - 1)];
    }
  }

  TieEnumerator enumerator{scores.values, n, budget, cap, best - tol, std::move(top), {}, {}};
  enumerator.run();
  return std::move(enumerator.out);
}

}  // namespace secalloc
