#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hintbits/embedding_store.hpp"

namespace hintbits {

// "a is to target as alpha is to beta": the guess is built as
// a + beta - alpha.
struct AnalogyQuestion {
  std::string alpha;
  std::string beta;
  std::string a;
  std::vector<std::string> targets;
};

struct BoundQuestion {
  WordIndex alpha = 0;
  WordIndex beta = 0;
  WordIndex a = 0;
  std::vector<WordIndex> targets;
};

struct SubsetStats {
  std::size_t parsed = 0;
  std::size_t bound = 0;
  std::size_t skipped_oov = 0;
  std::size_t targets_dropped_oov = 0;  // OOV alternatives on bound questions
  std::size_t a_is_target = 0;          // a_idx among the targets (reported)
};

template <typename Question>
struct Subset {
  std::string label;
  std::vector<Question> questions;
  SubsetStats stats;
};

template <typename Question>
struct BasicTestSet {
  std::string name;
  std::vector<Subset<Question>> subsets;
};

using TestSet = BasicTestSet<AnalogyQuestion>;
using BoundTestSet = BasicTestSet<BoundQuestion>;

// Google analogy format: ": label" section lines, then "A B C D" item lines.
// Item A B C D maps to alpha=A, beta=B, a=C, targets={D}.
TestSet parse_gats(std::istream& source, std::string name = "gats");
TestSet parse_gats_file(const std::filesystem::path& path);

struct PairingPolicy {
  // Unset: every ordered pair of distinct lines. Set: at most K ordered
  // pairs per file, drawn uniformly without replacement.
  std::optional<std::size_t> sample_per_file;
  std::uint64_t seed = 0;
};

// The four BATS category labels, in report order.
const std::vector<std::string>& bats_category_labels();

// Parses one BATS pair file ("left<TAB>right[/right...]") into questions.
std::vector<AnalogyQuestion> bats_questions_from_pairs(
    std::istream& source, const PairingPolicy& policy,
    const std::string& origin = "<stream>");

// Directory layout: one sub-directory per category (matched by the category
// keyword in its name, case-insensitive), each holding pair files.
TestSet load_bats(const std::filesystem::path& root,
                  const PairingPolicy& policy = {});

BoundTestSet bind(const TestSet& raw, const EmbeddingStore& store);

}  // namespace hintbits
