#include <doctest.h>

#include <random>

#include "logbatch/kernels.hpp"
#include "logbatch/partition.hpp"
#include "oracles.hpp"

using namespace logbatch;

namespace {

LogVector to_sparse(const oracle::Dense& d) {
  std::vector<std::pair<std::uint32_t, double>> e;
  for (std::uint32_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) e.emplace_back(i, d[i]);
  }
  return make_vector(std::move(e));
}

std::vector<int> labels_of(const DbscanResult& r, std::size_t n) {
  std::vector<int> lab(n, -2);
  for (std::size_t c = 0; c < r.clusters.size(); ++c) {
    for (auto m : r.clusters[c]) lab[m] = static_cast<int>(c);
  }
  for (auto o : r.outliers) lab[o] = -1;
  return lab;
}

// Points near a handful of random directions, some zero vectors.
std::vector<oracle::Dense> random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = n_dist(rng);
  const int dim = dim_dist(rng);
  const int centers = 1 + static_cast<int>(u(rng) * 4);
  std::vector<oracle::Dense> c(static_cast<std::size_t>(centers), oracle::Dense(static_cast<std::size_t>(dim)));
  for (auto& v : c) {
    for (auto& x : v) x = u(rng) < 0.5 ? 0.0 : u(rng);
  }
  const double noise = u(rng) * 0.6;
  std::vector<oracle::Dense> pts;
  for (int i = 0; i < n; ++i) {
    oracle::Dense p = c[static_cast<std::size_t>(i) % c.size()];
    if (u(rng) < 0.05) {
      std::fill(p.begin(), p.end(), 0.0);
    } else {
      for (auto& x : p) {
        if (u(rng) < 0.3) x = std::max(0.0, x + (u(rng) - 0.5) * noise);
      }
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("dbscan: five identical vectors form one cluster") {
  std::vector<LogVector> v(5, make_vector({{0, 0.3}, {2, 0.1}}));
  const auto r = dbscan(v, 0.5, 5);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0] == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(r.outliers.empty());
}

TEST_CASE("dbscan: four identical plus one orthogonal are all noise") {
  std::vector<LogVector> v(4, make_vector({{0, 1.0}}));
  v.push_back(make_vector({{1, 1.0}}));
  const auto r = dbscan(v, 0.5, 5);
  CHECK(r.clusters.empty());
  CHECK(r.outliers == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("dbscan: zero vectors are noise") {
  std::vector<LogVector> v(6, make_vector({}));
  const auto r = dbscan(v, 1.0, 2);
  CHECK(r.clusters.empty());
  CHECK(r.outliers.size() == 6);
}

TEST_CASE("dbscan agrees with the brute-force reference") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto pts = random_instance(rng);
    std::vector<LogVector> sparse;
    for (const auto& p : pts) sparse.push_back(to_sparse(p));
    for (double eps : {0.1, 0.5, 1.0}) {
      for (int ms : {2, 5}) {
        const auto expect = oracle::dbscan_labels(pts, eps, ms);
        CHECK(labels_of(dbscan(sparse, eps, ms, false), pts.size()) == expect);
        CHECK(labels_of(dbscan(sparse, eps, ms, true), pts.size()) == expect);
      }
    }
  }
}

TEST_CASE("serial and parallel kernels agree") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto pts = random_instance(rng);
    std::vector<LogVector> sparse;
    for (const auto& p : pts) sparse.push_back(normalized(to_sparse(p)));
    for (double eps : {0.1, 0.5, 1.0}) {
      CHECK(kernels::serial::neighborhoods(sparse, eps) == kernels::parallel::neighborhoods(sparse, eps));
    }
    CHECK(kernels::serial::similarity_row(sparse, 0) == kernels::parallel::similarity_row(sparse, 0));
  }

  std::vector<LogRecord> recs;
  for (int i = 0; i < 300; ++i) {
    const auto s = "job " + std::to_string(i % 7) + " user u" + std::to_string(i % 13) + " state=ok";
    recs.push_back({static_cast<std::size_t>(i), s, s});
  }
  std::vector<TokenizedLog> logs;
  for (const auto& r : recs) logs.push_back(preprocess(r));
  const auto vocab = build_vocabulary(logs);
  const auto a = kernels::serial::vectorize_all(logs, vocab);
  const auto b = kernels::parallel::vectorize_all(logs, vocab);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].entries == b[i].entries);
    CHECK(a[i].norm == b[i].norm);
  }
}

TEST_CASE("schedule orders clusters by size then line id") {
  std::vector<LogRecord> recs;
  for (std::size_t i = 0; i < 17; ++i) recs.push_back({100 + i, "x", "x"});
  DbscanResult r;
  r.clusters = {{0, 1, 2}, {3, 4, 5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}};
  r.outliers = {15, 16};
  auto p = schedule(r, recs);
  REQUIRE(p.size() == 4);
  CHECK(p[0].size() == 7);
  CHECK(p[1].size() == 5);
  CHECK(p[2].size() == 3);
  CHECK(p[3].size() == 2);
  CHECK(p[3].is_outlier_group);
  CHECK_FALSE(p[0].is_outlier_group);

  r.outliers.clear();
  CHECK(schedule(r, recs).size() == 3);

  r.clusters = {{4, 5, 6, 7}, {0, 1, 2, 3}};
  p = schedule(r, recs);
  REQUIRE(p.size() == 2);
  CHECK(p[0].members.front() == 0);
}

TEST_CASE("passthrough windows") {
  Chunk c;
  for (std::size_t i = 0; i < 25; ++i) c.records.push_back({i, "x", "x"});
  auto p = passthrough_partition(c, 10);
  REQUIRE(p.size() == 3);
  CHECK(p[0].size() == 10);
  CHECK(p[2].size() == 5);
  CHECK(p[2].members.front() == 20);
  c.records.resize(10);
  CHECK(passthrough_partition(c, 10).size() == 1);
  c.records.clear();
  CHECK(passthrough_partition(c, 10).empty());
}
