#include "secalloc/graph.hpp"

#include "support/graph_oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <filesystem>
#include <fstream>

using namespace secalloc;

namespace {

Graph path3() { return Graph(3, {{1, 2, 1.0}, {2, 3, 1.0}}); }

Graph complete(int n) {
  std::vector<GraphEdge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.push_back({i, j, 1.0});
  return Graph(n, edges);
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("construction validates edges") {
  CHECK_THROWS_AS(Graph(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{2, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{3, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{1, 4, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{1, 2, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{1, 2, -2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{1, 2, 1.0}, {1, 2, 2.0}}), std::invalid_argument);
}

TEST_CASE("erdos-renyi p=1 yields the complete graph") {
  auto res = generate_erdos_renyi(4, 1.0, {123});
  CHECK(res.graph.edges().size() == 6);
  CHECK(res.rejections == 0);
}

TEST_CASE("erdos-renyi p=0 reports unconnectable parameters") {
  CHECK_THROWS_AS(generate_erdos_renyi(4, 0.0, {9}, 50), UnconnectableError);
  CHECK_THROWS_WITH_AS(generate_erdos_renyi(2, 0.0, {9}, 3),
                       doctest::Contains("unconnectable parameters"),
                       UnconnectableError);
  // A single vertex is connected even at p = 0.
  CHECK_NOTHROW(generate_erdos_renyi(1, 0.0, {9}, 0));
}

TEST_CASE("erdos-renyi is deterministic per seed") {
  auto a = generate_erdos_renyi(10, 0.5, {42});
  auto b = generate_erdos_renyi(10, 0.5, {42});
  CHECK(a.graph.adjacency() == b.graph.adjacency());
  CHECK(a.seed_used == b.seed_used);
  auto c = generate_erdos_renyi(10, 0.5, {43});
  CHECK(a.graph.adjacency() != c.graph.adjacency());
}

TEST_CASE("erdos-renyi adjacency is symmetric with zero diagonal") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    auto res = generate_erdos_renyi(12, 0.4, {seed});
    const auto& a = res.graph.adjacency();
    CHECK(a == a.transpose().eval());
    CHECK(a.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("laplacian matches the definition on small graphs") {
  Eigen::MatrixXd expect(3, 3);
  expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(laplacian(path3()) == expect);

  CHECK(laplacian(Graph(1, {})) == Eigen::MatrixXd::Zero(1, 1));

  Eigen::MatrixXd k3 = 2.0 * Eigen::MatrixXd::Identity(3, 3) -
                       (Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3));
  CHECK(laplacian(complete(3)) == k3);
}

TEST_CASE("laplacian rows sum to zero and connected graphs have positive fiedler value") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    for (int n : {5, 12, 20}) {
      auto res = generate_erdos_renyi(n, 0.5, {seed});
      Eigen::MatrixXd l = laplacian(res.graph);
      CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues()(1) > 1e-9);  // second-smallest
    }
  }
}

TEST_CASE("connectivity") {
  CHECK(is_connected(path3()));
  CHECK(is_connected(complete(5)));
  CHECK_FALSE(is_connected(Graph(2, {})));
  CHECK_FALSE(is_connected(Graph(4, {{1, 2, 1.0}, {3, 4, 1.0}})));
}

TEST_CASE("hop distances on named graphs") {
  auto d = all_pairs_hop_distance(path3());
  CHECK(d(0, 2) == 2);
  CHECK(d(2, 0) == 2);

  auto dk = all_pairs_hop_distance(complete(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(dk(i, j) == (i == j ? 0 : 1));

  CHECK_THROWS_AS(all_pairs_hop_distance(Graph(2, {})), DisconnectedError);
}

TEST_CASE("hop distances match floyd-warshall on random small graphs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (int n : {2, 4, 7}) {
      auto res = generate_erdos_renyi(n, 0.45, {seed * 100 + 17});
      auto d = all_pairs_hop_distance(res.graph);
      auto ref = graph_oracles::floyd_warshall_hops(res.graph);
      CHECK(d == ref);
      // metric properties
      CHECK(d == d.transpose().eval());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) CHECK(d(i, j) <= d(i, k) + d(k, j));
    }
  }
}

TEST_CASE("json round trip preserves the graph") {
  auto g = generate_erdos_renyi(8, 0.5, {77}).graph;
  std::string text = graph_to_json(g);
  Graph back = graph_from_json(text);
  CHECK(back.n() == g.n());
  CHECK(back.adjacency() == g.adjacency());

  auto tmp = std::filesystem::temp_directory_path() / "secalloc_graph_test.json";
  save_graph_json(g, tmp.string());
  Graph loaded = load_graph_json(tmp.string());
  CHECK(loaded.adjacency() == g.adjacency());
  std::filesystem::remove(tmp);
}

TEST_CASE("json loader rejects malformed input") {
  CHECK_THROWS(graph_from_json(R"({"n": 3, "edges": [[2, 1, 1.0]]})"));
  CHECK_THROWS(graph_from_json(R"({"n": 3, "edges": [[1, 2, -1.0]]})"));
  CHECK_THROWS(graph_from_json(R"({"n": 3, "edges": [[1, 2]]})"));
  CHECK_THROWS(graph_from_json(R"({"edges": []})"));
}

}  // TEST_SUITE
