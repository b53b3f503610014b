#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "logbatch/preprocess.hpp"

namespace logbatch {

/// Masked-token vocabulary of one chunk. Indices follow first appearance.
struct Vocabulary {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::string> tokens;
  std::vector<std::size_t> doc_freq;
  std::size_t total_logs = 0;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::uint32_t> find(const std::string& token) const;
  double idf(std::uint32_t i) const;
};

/// Sparse non-negative vector; entries sorted by index, zeros omitted.
struct LogVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  double norm = 0.0;

  double at(std::uint32_t i) const;
  bool is_zero() const { return entries.empty(); }
};

/// Throws ContractViolation on empty input.
Vocabulary build_vocabulary(const std::vector<TokenizedLog>& logs);

/// TF-IDF bag-of-words vector with one-hot token vectors:
///   w_t = (c_t / N) * ln(#L / #L_t)
///   V_L = (1/N) * sum over the N token positions of w_t * e_t
/// so entry t equals (c_t / N) * w_t.
LogVector tfidf_vector(const TokenizedLog& log, const Vocabulary& vocab);

LogVector make_vector(std::vector<std::pair<std::uint32_t, double>> entries);
LogVector normalized(const LogVector& v);

double dot(const LogVector& a, const LogVector& b);
double squared_distance(const LogVector& a, const LogVector& b);

/// dot / (|a| |b|); 1 when both are zero vectors, 0 when exactly one is.
double cosine_similarity(const LogVector& a, const LogVector& b);

}  // namespace logbatch
