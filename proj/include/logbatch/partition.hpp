#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "logbatch/ingest.hpp"
#include "logbatch/vectorize.hpp"

namespace logbatch {

/// Group of chunk records (by index into the chunk) presumed to share a template.
struct Partition {
  std::vector<std::size_t> members;
  bool is_outlier_group = false;

  std::size_t size() const { return members.size(); }
};

struct DbscanResult {
  // Clusters in discovery order; members ascending.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> outliers;
};

/// DBSCAN over L2-normalised copies of `vectors` with Euclidean distance.
/// A point is core when at least `min_samples` points (itself included) lie
/// within `eps`. Points are scanned in ascending index, so a border point
/// reachable from two clusters joins the one discovered first. Zero vectors
/// are always outliers.
DbscanResult dbscan(const std::vector<LogVector>& vectors, double eps, int min_samples, bool use_parallel = true);

/// Clusters by size descending (ties by smallest member line_id), then the
/// outliers as one final group when there are any.
std::vector<Partition> schedule(const DbscanResult& result, std::span<const LogRecord> records);

/// Arrival-order windows of `window` records; used when partitioning is off.
std::vector<Partition> passthrough_partition(const Chunk& chunk, std::size_t window);

}  // namespace logbatch
