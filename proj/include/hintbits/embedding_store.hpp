#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hintbits {

using WordIndex = std::uint32_t;

enum class DuplicatePolicy { kKeepFirst, kError };
enum class ZeroVectorPolicy { kDrop, kError };

struct LoadOptions {
  std::optional<std::size_t> vocab_limit;  // keep the first K data lines
  bool lowercase = true;
  DuplicatePolicy on_duplicate = DuplicatePolicy::kKeepFirst;
  ZeroVectorPolicy on_zero_vector = ZeroVectorPolicy::kDrop;
};

struct LoadStats {
  std::size_t lines_read = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t zero_vectors_dropped = 0;
  std::size_t blank_lines = 0;
};

// A query vector in the embedding space. Scores are inner products computed
// in double precision, so predictions are kept in double.
using Prediction = std::vector<double>;

// Immutable vocabulary plus a row-major table of unit-norm vectors. After
// construction it is safe to share across threads.
class EmbeddingStore {
 public:
  // Rows are normalized here; zero or non-finite rows are rejected.
  EmbeddingStore(std::vector<std::string> words, std::size_t dim,
                 const std::vector<double>& raw_rows, bool lowercase);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  bool lowercase() const { return lowercase_; }

  const std::string& word(WordIndex i) const { return words_.at(i); }
  const std::vector<std::string>& words() const { return words_; }

  std::span<const float> row(WordIndex i) const {
    return {vectors_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }

  // Index of `token` after applying the store's folding policy.
  std::optional<WordIndex> lookup(std::string_view token) const;

  double score(std::span<const double> prediction, WordIndex j) const;

  // Row `i` widened to double, the starting point for building predictions.
  Prediction row_as_prediction(WordIndex i) const;

 private:
  std::vector<std::string> words_;
  std::size_t dim_;
  std::vector<float> vectors_;
  std::unordered_map<std::string, WordIndex> index_;
  bool lowercase_;
};

struct LoadResult {
  EmbeddingStore store;
  LoadStats stats;
};

// Plain-text embedding format: one token followed by D numbers per line,
// single-space separated, no header. CRLF line endings are accepted.
LoadResult load_embeddings(std::istream& source, const LoadOptions& opts = {});
LoadResult load_embeddings_file(const std::string& path,
                                const LoadOptions& opts = {});

std::string fold_token(std::string_view token, bool lowercase);

// Sorted, de-duplicated set of indices removed from the candidate pool.
class ExclusionSet {
 public:
  ExclusionSet() = default;
  ExclusionSet(std::initializer_list<WordIndex> ids);
  explicit ExclusionSet(std::vector<WordIndex> ids);

  bool contains(WordIndex i) const;
  std::size_t size() const { return ids_.size(); }
  std::span<const WordIndex> ids() const { return ids_; }
  void insert(WordIndex i);

 private:
  std::vector<WordIndex> ids_;
};

// 1 + number of admissible candidates that beat the target. A candidate j
// beats the target when its score is higher, or equal with j < target.
std::size_t target_rank(const EmbeddingStore& store,
                        std::span<const double> prediction, WordIndex target,
                        const ExclusionSet& excluded);

struct RankQuery {
  Prediction prediction;
  WordIndex target = 0;
  ExclusionSet excluded;
};

// Evaluates every query, possibly on several threads. Output order matches
// input order. Throws QueryError naming the first failing position.
std::vector<std::size_t> rank_batch(const EmbeddingStore& store,
                                    std::span<const RankQuery> queries,
                                    unsigned threads = 1);

class QueryError : public std::invalid_argument {
 public:
  QueryError(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Runs fn(i) for i in [0, n) over up to `threads` workers using contiguous
// chunks. The first exception (by index) is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn);

}  // namespace hintbits

#include "hintbits/parallel_for.ipp"
