#include <omp.h>

#include <exception>
#include <mutex>

#include "logbatch/kernels.hpp"

namespace logbatch::kernels::parallel {

std::vector<LogVector> vectorize_all(const std::vector<TokenizedLog>& logs, const Vocabulary& vocab) {
  std::vector<LogVector> out(logs.size());
  std::exception_ptr error;
  std::mutex error_mu;
  const auto n = static_cast<std::ptrdiff_t>(logs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = tfidf_vector(logs[static_cast<std::size_t>(i)], vocab);
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<std::vector<std::size_t>> neighborhoods(const std::vector<LogVector>& points, double eps) {
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t si = 0; si < n; ++si) {
    const auto i = static_cast<std::size_t>(si);
    if (points[i].is_zero()) continue;
    auto& row = out[i];
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (points[j].is_zero()) continue;
      if (squared_distance(points[i], points[j]) <= eps2) row.push_back(j);
    }
  }
  return out;
}

std::vector<double> similarity_row(const std::vector<LogVector>& points, std::size_t row) {
  std::vector<double> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = cosine_similarity(points[row], points[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace logbatch::kernels::parallel
