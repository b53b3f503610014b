#pragma once

#include <cstddef>
#include <vector>

#include "logbatch/vectorize.hpp"

// Data-parallel inner loops. `serial` is the reference; `parallel` runs the
// same per-element arithmetic under OpenMP and must produce identical output.
namespace logbatch::kernels {

namespace serial {

std::vector<LogVector> vectorize_all(const std::vector<TokenizedLog>& logs, const Vocabulary& vocab);

/// For every point, the ascending indices of points within Euclidean
/// distance `eps` (itself included). Zero vectors get empty neighbourhoods
/// and never appear in anyone else's.
std::vector<std::vector<std::size_t>> neighborhoods(const std::vector<LogVector>& points, double eps);

/// cosine_similarity(points[row], points[j]) for every j.
std::vector<double> similarity_row(const std::vector<LogVector>& points, std::size_t row);

}  // namespace serial

namespace parallel {

std::vector<LogVector> vectorize_all(const std::vector<TokenizedLog>& logs, const Vocabulary& vocab);
std::vector<std::vector<std::size_t>> neighborhoods(const std::vector<LogVector>& points, double eps);
std::vector<double> similarity_row(const std::vector<LogVector>& points, std::size_t row);

}  // namespace parallel

}  // namespace logbatch::kernels
