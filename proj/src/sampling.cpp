#include "logbatch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "logbatch/errors.hpp"
#include "logbatch/kernels.hpp"

namespace logbatch {

namespace {

Batch make_batch(std::span<const std::string> candidates, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Batch b;
  b.indices = std::move(indices);
  for (auto i : b.indices) b.logs.push_back(candidates[i]);
  return b;
}

Batch take_all(std::span<const std::string> candidates) {
  std::vector<std::size_t> all(candidates.size());
  std::iota(all.begin(), all.end(), 0);
  return make_batch(candidates, std::move(all));
}

void check_inputs(std::span<const std::string> candidates, std::size_t k) {
  if (k == 0) throw ContractViolation("sampling: k must be >= 1");
  if (candidates.empty()) throw ContractViolation("sampling: no candidates");
}

}  // namespace

std::vector<std::size_t> dedupe(std::span<const std::string> contents) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < contents.size(); ++i) {
    if (seen.insert(contents[i]).second) out.push_back(i);
  }
  return out;
}

Batch dpp_sample(std::span<const std::string> candidates, std::span<const LogVector> vectors, std::size_t k,
                 std::uint64_t /*seed*/) {
  check_inputs(candidates, k);
  if (vectors.size() != candidates.size()) throw ContractViolation("dpp_sample: vectors/candidates size mismatch");
  const std::size_t n = candidates.size();
  if (n <= k) return take_all(candidates);

  const std::vector<LogVector> points(vectors.begin(), vectors.end());
  const double diag = 1.0 + kDppDiagonalJitter;
  std::vector<double> gain(n, diag);
  std::vector<std::vector<double>> chol(n);
  std::vector<bool> chosen(n, false);
  std::vector<std::size_t> selected;

  // All diagonal entries are equal, so the first pick is candidate 0.
  std::size_t j = 0;
  while (true) {
    chosen[j] = true;
    selected.push_back(j);
    if (selected.size() == k) break;
    const auto row = kernels::parallel::similarity_row(points, j);
    const double dj = std::sqrt(gain[j]);
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double lij = std::clamp(row[i], 0.0, 1.0);
      double proj = 0.0;
      for (std::size_t t = 0; t < chol[j].size(); ++t) proj += chol[j][t] * chol[i][t];
      const double e = (lij - proj) / dj;
      chol[i].push_back(e);
      gain[i] -= e * e;
    }
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i] && (best == n || gain[i] > gain[best])) best = i;
    }
    if (best == n || gain[best] < kDppMinGain) break;
    j = best;
  }
  for (std::size_t i = 0; i < n && selected.size() < k; ++i) {
    if (!chosen[i]) {
      chosen[i] = true;
      selected.push_back(i);
    }
  }
  return make_batch(candidates, std::move(selected));
}

Batch similarity_sample(std::span<const std::string> candidates, std::span<const LogVector> vectors, std::size_t k,
                        std::uint64_t /*seed*/) {
  check_inputs(candidates, k);
  if (vectors.size() != candidates.size()) throw ContractViolation("similarity_sample: size mismatch");
  const std::size_t n = candidates.size();
  if (n <= k) return take_all(candidates);

  std::vector<LogVector> points;
  points.reserve(n);
  std::size_t dim = 0;
  for (const auto& v : vectors) {
    points.push_back(normalized(v));
    if (!v.entries.empty()) dim = std::max<std::size_t>(dim, v.entries.back().first + 1);
  }
  const std::size_t clusters = (n + k - 1) / k;
  std::vector<std::vector<double>> centroid(clusters, std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < clusters; ++c) {
    for (const auto& [i, x] : points[c * n / clusters].entries) centroid[c][i] = x;
  }

  std::vector<std::size_t> assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> cnorm(clusters, 0.0);
    for (std::size_t c = 0; c < clusters; ++c) {
      for (double x : centroid[c]) cnorm[c] += x * x;
    }
    for (std::size_t p = 0; p < n; ++p) {
      double best = 0.0;
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < clusters; ++c) {
        double d = cnorm[c] + points[p].norm * points[p].norm;
        for (const auto& [i, x] : points[p].entries) d -= 2.0 * x * centroid[c][i];
        if (c == 0 || d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[p] = best_c;
    }
    std::vector<std::vector<double>> next(clusters, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> count(clusters, 0);
    for (std::size_t p = 0; p < n; ++p) {
      ++count[assign[p]];
      for (const auto& [i, x] : points[p].entries) next[assign[p]][i] += x;
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < clusters; ++c) {
      if (count[c] == 0) {
        next[c] = centroid[c];
        continue;
      }
      double shift = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        next[c][i] /= static_cast<double>(count[c]);
        shift += (next[c][i] - centroid[c][i]) * (next[c][i] - centroid[c][i]);
      }
      movement = std::max(movement, std::sqrt(shift));
    }
    centroid = std::move(next);
    if (movement < 1e-6) break;
  }

  std::vector<std::size_t> size(clusters, 0);
  for (auto a : assign) ++size[a];
  const auto largest =
      static_cast<std::size_t>(std::distance(size.begin(), std::max_element(size.begin(), size.end())));
  std::vector<std::size_t> picked;
  for (std::size_t p = 0; p < n && picked.size() < k; ++p) {
    if (assign[p] == largest) picked.push_back(p);
  }
  return make_batch(candidates, std::move(picked));
}

Batch random_sample(std::span<const std::string> candidates, std::size_t k, std::uint64_t seed) {
  check_inputs(candidates, k);
  const std::size_t n = candidates.size();
  if (n <= k) return take_all(candidates);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return make_batch(candidates, std::move(idx));
}

Batch sample(SamplingMethod method, std::span<const std::string> candidates, std::span<const LogVector> vectors,
             std::size_t k, std::uint64_t seed) {
  switch (method) {
    case SamplingMethod::diversity: return dpp_sample(candidates, vectors, k, seed);
    case SamplingMethod::similarity: return similarity_sample(candidates, vectors, k, seed);
    case SamplingMethod::random: return random_sample(candidates, k, seed);
  }
  throw ContractViolation("sample: unknown method");
}

}  // namespace logbatch
