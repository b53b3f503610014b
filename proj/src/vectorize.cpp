#include "logbatch/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "logbatch/errors.hpp"

namespace logbatch {

std::optional<std::uint32_t> Vocabulary::find(const std::string& token) const {
  const auto it = index.find(token);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::uint32_t i) const {
  return std::log(static_cast<double>(total_logs) / static_cast<double>(doc_freq.at(i)));
}

double LogVector::at(std::uint32_t i) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), i,
                                   [](const auto& e, std::uint32_t k) { return e.first < k; });
  return (it != entries.end() && it->first == i) ? it->second : 0.0;
}

Vocabulary build_vocabulary(const std::vector<TokenizedLog>& logs) {
  if (logs.empty()) throw ContractViolation("build_vocabulary: no logs");
  Vocabulary vocab;
  vocab.total_logs = logs.size();
  std::vector<std::size_t> last_seen;
  for (std::size_t li = 0; li < logs.size(); ++li) {
    for (const auto& tok : logs[li].masked_tokens) {
      auto [it, inserted] = vocab.index.try_emplace(tok, static_cast<std::uint32_t>(vocab.tokens.size()));
      if (inserted) {
        vocab.tokens.push_back(tok);
        vocab.doc_freq.push_back(0);
        last_seen.push_back(static_cast<std::size_t>(-1));
      }
      const auto idx = it->second;
      if (last_seen[idx] != li) {
        last_seen[idx] = li;
        ++vocab.doc_freq[idx];
      }
    }
  }
  return vocab;
}

LogVector make_vector(std::vector<std::pair<std::uint32_t, double>> entries) {
  std::sort(entries.begin(), entries.end());
  std::erase_if(entries, [](const auto& e) { return e.second == 0.0; });
  LogVector v;
  v.entries = std::move(entries);
  double sq = 0.0;
  for (const auto& [i, x] : v.entries) sq += x * x;
  v.norm = std::sqrt(sq);
  return v;
}

LogVector tfidf_vector(const TokenizedLog& log, const Vocabulary& vocab) {
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& tok : log.masked_tokens) {
    const auto idx = vocab.find(tok);
    if (!idx) throw ContractViolation("tfidf_vector: token '" + tok + "' is not in the vocabulary");
    ++counts[*idx];
  }
  const double n = static_cast<double>(log.masked_tokens.size());
  std::vector<std::pair<std::uint32_t, double>> entries;
  entries.reserve(counts.size());
  for (const auto& [idx, c] : counts) {
    const double tf = static_cast<double>(c) / n;
    const double weight = tf * vocab.idf(idx);
    entries.emplace_back(idx, static_cast<double>(c) * weight / n);
  }
  return make_vector(std::move(entries));
}

LogVector normalized(const LogVector& v) {
  LogVector out = v;
  if (v.norm == 0.0) return out;
  for (auto& e : out.entries) e.second /= v.norm;
  double sq = 0.0;
  for (const auto& [i, x] : out.entries) sq += x * x;
  out.norm = std::sqrt(sq);
  return out;
}

double dot(const LogVector& a, const LogVector& b) {
  double sum = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

// Accumulates in ascending index order so the result equals a dense
// coordinate-by-coordinate sum bit for bit.
double squared_distance(const LogVector& a, const LogVector& b) {
  double sum = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double d = 0.0;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      d = ia->second;
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      d = ib->second;
      ++ib;
    } else {
      d = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    sum += d * d;
  }
  return sum;
}

double cosine_similarity(const LogVector& a, const LogVector& b) {
  if (a.norm == 0.0 || b.norm == 0.0) return (a.norm == 0.0 && b.norm == 0.0) ? 1.0 : 0.0;
  const double c = dot(a, b) / (a.norm * b.norm);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace logbatch
