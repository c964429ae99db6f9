#include "hintbits/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "hintbits/errors.hpp"

namespace hintbits {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    const std::size_t end = std::min(line.find(' ', pos), line.size());
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

double parse_component(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  // from_chars rejects a leading '+', which some writers emit.
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InputError("line " + std::to_string(line_no) +
                     ": cannot parse number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw InputError("line " + std::to_string(line_no) +
                     ": non-finite value '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string fold_token(std::string_view token, bool lowercase) {
  std::string out(token);
  if (lowercase) {
    // ASCII only; multi-byte UTF-8 sequences pass through untouched.
    for (auto& ch : out) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
  }
  return out;
}

EmbeddingStore::EmbeddingStore(std::vector<std::string> words,
                               std::size_t dim,
                               const std::vector<double>& raw_rows,
                               bool lowercase)
    : words_(std::move(words)), dim_(dim), lowercase_(lowercase) {
  if (words_.empty()) throw PreconditionError("embedding store needs m >= 1");
  if (dim_ == 0) throw PreconditionError("embedding store needs d >= 1");
  if (raw_rows.size() != words_.size() * dim_) {
    throw PreconditionError("row table size does not match m * d");
  }
  vectors_.resize(raw_rows.size());
  for (std::size_t r = 0; r < words_.size(); ++r) {
    const double* src = raw_rows.data() + r * dim_;
    double sq = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (!std::isfinite(src[k])) {
        throw PreconditionError("non-finite entry in row " + std::to_string(r));
      }
      sq += src[k] * src[k];
    }
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw PreconditionError("row " + std::to_string(r) +
                              " cannot be normalized");
    }
    float* dst = vectors_.data() + r * dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      dst[k] = static_cast<float>(src[k] / norm);
    }
  }

  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    words_[i] = fold_token(words_[i], lowercase_);
    if (words_[i].empty()) throw PreconditionError("empty token");
    if (!index_.emplace(words_[i], static_cast<WordIndex>(i)).second) {
      throw PreconditionError("duplicate token '" + words_[i] + "'");
    }
  }
}

std::optional<WordIndex> EmbeddingStore::lookup(std::string_view token) const {
  auto it = index_.find(fold_token(token, lowercase_));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double EmbeddingStore::score(std::span<const double> prediction,
                             WordIndex j) const {
  const float* r = vectors_.data() + static_cast<std::size_t>(j) * dim_;
  double s = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) s += prediction[k] * r[k];
  return s;
}

Prediction EmbeddingStore::row_as_prediction(WordIndex i) const {
  auto r = row(i);
  return Prediction(r.begin(), r.end());
}

LoadResult load_embeddings(std::istream& source, const LoadOptions& opts) {
  if (opts.vocab_limit && *opts.vocab_limit == 0) {
    throw PreconditionError("vocab_limit must be >= 1");
  }

  LoadStats stats;
  std::vector<std::string> words;
  std::vector<double> rows;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t data_lines = 0;
  std::string line;
  std::vector<double> values;

  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) {
      ++stats.blank_lines;
      continue;
    }
    if (opts.vocab_limit && data_lines >= *opts.vocab_limit) break;
    ++data_lines;

    if (dim == 0) {
      if (fields.size() < 2) {
        throw InputError("line " + std::to_string(line_no) +
                         ": expected a token followed by at least one value");
      }
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw InputError("line " + std::to_string(line_no) +
                       ": inconsistent dimension (expected " +
                       std::to_string(dim) + ", found " +
                       std::to_string(fields.size() - 1) + ")");
    }

    values.clear();
    double sq = 0.0;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const double v = parse_component(fields[k], line_no);
      values.push_back(v);
      sq += v * v;
    }

    std::string token = fold_token(fields[0], opts.lowercase);
    if (sq == 0.0) {
      if (opts.on_zero_vector == ZeroVectorPolicy::kError) {
        throw InputError("line " + std::to_string(line_no) + ": zero vector for '" +
                         token + "'");
      }
      ++stats.zero_vectors_dropped;
      continue;
    }
    if (seen.count(token)) {
      if (opts.on_duplicate == DuplicatePolicy::kError) {
        throw InputError("line " + std::to_string(line_no) +
                         ": duplicate token '" + token + "'");
      }
      ++stats.duplicates_dropped;
      continue;
    }
    seen.emplace(token, words.size());
    words.push_back(std::move(token));
    rows.insert(rows.end(), values.begin(), values.end());
  }
  stats.lines_read = data_lines;

  if (words.empty()) {
    throw InputError(data_lines == 0 ? "empty embedding stream"
                                     : "no usable vectors in embedding stream");
  }
  return LoadResult{EmbeddingStore(std::move(words), dim, rows, opts.lowercase),
                    stats};
}

LoadResult load_embeddings_file(const std::string& path,
                                const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path);
  return load_embeddings(in, opts);
}

ExclusionSet::ExclusionSet(std::initializer_list<WordIndex> ids)
    : ExclusionSet(std::vector<WordIndex>(ids)) {}

ExclusionSet::ExclusionSet(std::vector<WordIndex> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool ExclusionSet::contains(WordIndex i) const {
  return std::binary_search(ids_.begin(), ids_.end(), i);
}

void ExclusionSet::insert(WordIndex i) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), i);
  if (it == ids_.end() || *it != i) ids_.insert(it, i);
}

std::size_t target_rank(const EmbeddingStore& store,
                        std::span<const double> prediction, WordIndex target,
                        const ExclusionSet& excluded) {
  const std::size_t m = store.size();
  if (prediction.size() != store.dim()) {
    throw PreconditionError("prediction dimension does not match the store");
  }
  if (target >= m) throw PreconditionError("target index out of range");
  for (WordIndex e : excluded.ids()) {
    if (e >= m) throw PreconditionError("excluded index out of range");
  }
  if (excluded.contains(target)) {
    throw PreconditionError("target is in the exclusion set");
  }

  const double target_score = store.score(prediction, target);
  // Excluded ids are sorted, so a single cursor walks them alongside j.
  auto skip = excluded.ids().begin();
  const auto skip_end = excluded.ids().end();
  std::size_t better = 0;
  for (WordIndex j = 0; j < m; ++j) {
    if (skip != skip_end && *skip == j) {
      ++skip;
      continue;
    }
    if (j == target) continue;
    const double s = store.score(prediction, j);
    if (s > target_score || (s == target_score && j < target)) ++better;
  }
  return better + 1;
}

QueryError::QueryError(std::size_t position, const std::string& what)
    : std::invalid_argument("query " + std::to_string(position) + ": " + what),
      position_(position) {}

std::vector<std::size_t> rank_batch(const EmbeddingStore& store,
                                    std::span<const RankQuery> queries,
                                    unsigned threads) {
  std::vector<std::size_t> ranks(queries.size(), 0);
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    try {
      ranks[i] = target_rank(store, queries[i].prediction, queries[i].target,
                             queries[i].excluded);
    } catch (const PreconditionError& e) {
      throw QueryError(i, e.what());
    }
  });
  return ranks;
}

}  // namespace hintbits
