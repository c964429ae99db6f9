#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hintbits/embedding_store.hpp"
#include "hintbits/infotheory.hpp"
#include "hintbits/testsets.hpp"

namespace hintbits {

inline constexpr double kDefaultBiasBits = -0.25;

struct GameConfig {
  double bias_bits = kDefaultBiasBits;
  std::optional<std::size_t> i0_m;  // unset: the store's vocabulary size
  std::uint64_t seed = 0;
  unsigned parallelism = 1;

  // Throws PreconditionError on bias > 0 or i0_m == 0.
  void validate() const;
  std::size_t resolve_i0_m(const EmbeddingStore& store) const;
};

// Which hint(s) a game uses to build the prediction.
enum class Hints { kProximity, kProximityAndOffset };

// The rank query for one question under one game: prediction, the roles
// removed from the candidate pool, and the acceptable targets.
struct GameQuery {
  Prediction prediction;
  ExclusionSet excluded;
  std::vector<WordIndex> targets;
};

GameQuery make_game_query(const EmbeddingStore& store, const BoundQuestion& q,
                          Hints hints);

// True when at least one acceptable target survives the game's exclusions.
bool is_evaluable(const BoundQuestion& q, Hints hints);

// Best rank over the acceptable targets; while one target is ranked the
// other acceptable targets are also withheld from the pool.
std::size_t question_rank(const EmbeddingStore& store, const GameQuery& query);

// Proximity only: prediction row(a), exclusions {a}.
std::vector<RankOutcome> run_single_hint(const EmbeddingStore& store,
                                         std::span<const BoundQuestion> questions,
                                         const GameConfig& cfg);

// Proximity plus offset: prediction row(a) + row(beta) - row(alpha),
// exclusions {a, alpha, beta}.
std::vector<RankOutcome> run_two_hints(const EmbeddingStore& store,
                                       std::span<const BoundQuestion> questions,
                                       const GameConfig& cfg);

struct SubsetMeta {
  std::string subset;
  std::size_t parsed = 0;
  std::size_t skipped = 0;
};

struct SubsetReport {
  std::string subset;
  std::size_t g = 0;
  std::size_t skipped = 0;
  double soft_acc1 = 0.0;
  double soft_acc2 = 0.0;
  double hard_acc1 = 0.0;
  double hard_acc2 = 0.0;
  double delta_i1 = 0.0;
  double delta_i2 = 0.0;
  double i0 = 0.0;
};

SubsetReport evaluate_subset(std::span<const RankOutcome> ranks1,
                             std::span<const RankOutcome> ranks2,
                             const GameConfig& cfg, std::size_t i0_m,
                             const SubsetMeta& meta);

// Pooled row over several subset reports. With count weights the result is
// the estimate over all questions pooled together: soft accuracies combine
// as weighted geometric means, hard accuracies as weighted arithmetic means,
// and the deltas as weighted means. With equal weights each subset counts
// once. Subsets with g == 0 are ignored.
enum class Weighting { kByCount, kUniform };
SubsetReport average_row(std::span<const SubsetReport> rows, Weighting weighting,
                         std::string label);

// |lhs - rhs| of delta_i1 + delta_i2 == i0 - log2(1/soft_acc2).
double report_identity_gap(const SubsetReport& r);

struct EvalResult {
  std::vector<SubsetReport> rows;
  std::size_t excluded_target_questions = 0;  // folded into `skipped`
  std::size_t i0_m = 0;
};

// Runs both games over every subset of a bound test set. Subsets with no
// evaluable question produce a row with g == 0 and NaN estimates.
EvalResult evaluate_test_set(const EmbeddingStore& store, const BoundTestSet& set,
                             const GameConfig& cfg);

// ---------------------------------------------------------------------------
// Random-hint simulation

struct CurvePoint {
  std::size_t g = 0;
  double hard_acc = 0.0;
  double soft_acc = 0.0;
};

// Per trial, target and hint are drawn independently and uniformly from
// {1..n}; the target's rank is its circular distance from the hint plus one.
// Trial i draws from a stream derived from (seed, i) only.
std::vector<CurvePoint> simulate_random_hint_game(
    std::size_t n, std::size_t g, std::uint64_t seed,
    std::span<const std::size_t> checkpoints);

// 1, 2, 5, 10, 20, 50, ... up to g, always ending at g.
std::vector<std::size_t> log_checkpoints(std::size_t g);

// ---------------------------------------------------------------------------
// Coarse paired-offset model

struct CoarseModel {
  EmbeddingStore store;
  Prediction phi;
  std::vector<std::pair<WordIndex, WordIndex>> pairs;  // (start, end)
  double noise_sigma = 0.0;
};

struct CoarseModelParams {
  std::size_t m = 2000;
  std::size_t d = 50;
  double phi_norm = 1.0;
  double noise_sigma = 0.01;  // per coordinate, absolute
  std::uint64_t seed = 1;
};

// Start vectors uniform on the unit sphere; end = unit(start + phi + noise).
CoarseModel generate_coarse_model(const CoarseModelParams& params);

struct OffsetOnlyResult {
  std::vector<RankOutcome> ranks;  // one per pair, in pair order
  double h_g_mean = 0.0;
  double bias_bits = 0.0;  // bias(m / 2)
  double info_gain_bits = 0.0;
};

// Offset hint without the start word: every word x yields a prediction
// unit(x + phi); a candidate v scores max_{x != v} <unit(x + phi), v>, and each
// pair's end word is ranked among all m candidates under that score.
OffsetOnlyResult run_offset_only(const CoarseModel& model, unsigned threads = 1);

}  // namespace hintbits
