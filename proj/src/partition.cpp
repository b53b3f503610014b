#include "logbatch/partition.hpp"

#include <algorithm>
#include <deque>

#include "logbatch/errors.hpp"
#include "logbatch/kernels.hpp"

namespace logbatch {

DbscanResult dbscan(const std::vector<LogVector>& vectors, double eps, int min_samples, bool use_parallel) {
  if (!(eps > 0.0)) throw ContractViolation("dbscan: eps must be > 0");
  if (min_samples < 1) throw ContractViolation("dbscan: min_samples must be >= 1");

  std::vector<LogVector> unit;
  unit.reserve(vectors.size());
  for (const auto& v : vectors) unit.push_back(normalized(v));

  const auto neighbours =
      use_parallel ? kernels::parallel::neighborhoods(unit, eps) : kernels::serial::neighborhoods(unit, eps);
  const auto min = static_cast<std::size_t>(min_samples);

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(unit.size(), kUnvisited);
  int next_cluster = 0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (label[i] != kUnvisited) continue;
    if (neighbours[i].size() < min) {
      label[i] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    label[i] = c;
    std::deque<std::size_t> frontier(neighbours[i].begin(), neighbours[i].end());
    while (!frontier.empty()) {
      const auto j = frontier.front();
      frontier.pop_front();
      if (label[j] == kNoise) label[j] = c;
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      if (neighbours[j].size() >= min) frontier.insert(frontier.end(), neighbours[j].begin(), neighbours[j].end());
    }
  }

  DbscanResult result;
  result.clusters.resize(static_cast<std::size_t>(next_cluster));
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] >= 0) {
      result.clusters[static_cast<std::size_t>(label[i])].push_back(i);
    } else {
      result.outliers.push_back(i);
    }
  }
  return result;
}

std::vector<Partition> schedule(const DbscanResult& result, std::span<const LogRecord> records) {
  const auto first_line = [&](const std::vector<std::size_t>& members) {
    std::size_t best = static_cast<std::size_t>(-1);
    for (auto m : members) best = std::min(best, records[m].line_id);
    return best;
  };
  std::vector<Partition> out;
  for (const auto& c : result.clusters) {
    if (!c.empty()) out.push_back(Partition{c, false});
  }
  std::stable_sort(out.begin(), out.end(), [&](const Partition& a, const Partition& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return first_line(a.members) < first_line(b.members);
  });
  if (!result.outliers.empty()) out.push_back(Partition{result.outliers, true});
  return out;
}

std::vector<Partition> passthrough_partition(const Chunk& chunk, std::size_t window) {
  if (window == 0) throw ContractViolation("passthrough_partition: window must be >= 1");
  std::vector<Partition> out;
  for (std::size_t start = 0; start < chunk.records.size(); start += window) {
    Partition p;
    const std::size_t end = std::min(chunk.records.size(), start + window);
    for (std::size_t i = start; i < end; ++i) p.members.push_back(i);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace logbatch
