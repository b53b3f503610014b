#include "logbatch/kernels.hpp"

namespace logbatch::kernels::serial {

std::vector<LogVector> vectorize_all(const std::vector<TokenizedLog>& logs, const Vocabulary& vocab) {
  std::vector<LogVector> out;
  out.reserve(logs.size());
  for (const auto& log : logs) out.push_back(tfidf_vector(log, vocab));
  return out;
}

std::vector<std::vector<std::size_t>> neighborhoods(const std::vector<LogVector>& points, double eps) {
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_zero()) continue;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (points[j].is_zero()) continue;
      if (squared_distance(points[i], points[j]) <= eps2) out[i].push_back(j);
    }
  }
  return out;
}

std::vector<double> similarity_row(const std::vector<LogVector>& points, std::size_t row) {
  std::vector<double> out(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) out[j] = cosine_similarity(points[row], points[j]);
  return out;
}

}  // namespace logbatch::kernels::serial
