#include "hintbits/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hintbits/errors.hpp"
#include "oracle.hpp"

using namespace hintbits;

namespace {

EmbeddingStore make_store(std::size_t d, std::vector<double> rows) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < rows.size() / d; ++i) words.push_back("w" + std::to_string(i));
  return EmbeddingStore(std::move(words), d, rows, false);
}

std::vector<RankOutcome> outcomes(std::initializer_list<std::size_t> ranks) {
  std::vector<RankOutcome> out;
  for (auto r : ranks) out.push_back({r});
  return out;
}

double chi_square_uniform(const std::vector<RankOutcome>& ranks, std::size_t n,
                          std::size_t bins) {
  std::vector<double> counts(bins, 0.0);
  for (const auto& r : ranks) counts[(r.o_t - 1) * bins / n] += 1.0;
  const double expected = static_cast<double>(ranks.size()) / static_cast<double>(bins);
  double chi = 0.0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

}  // namespace

TEST(SingleHint, NearestNeighbourIsRankOne) {
  auto s = make_store(2, {1, 0, 0.99, 0.1, 0, 1});
  const std::vector<BoundQuestion> qs = {{0, 0, 0, {1}}};
  EXPECT_EQ(run_single_hint(s, qs, {})[0].o_t, 1u);
}

TEST(SingleHint, HandComputedThreeWordStore) {
  // a=(1,0), t=(0.8,0.6), x=(0.9,0.436): from p1=a, x scores 0.9 > t's 0.8.
  auto s = make_store(2, {1, 0, 0.8, 0.6, 0.9, 0.436});
  const std::vector<BoundQuestion> qs = {{0, 0, 0, {1}}};
  EXPECT_EQ(run_single_hint(s, qs, {})[0].o_t, 2u);
}

TEST(TwoHints, ExactOffsetLandsOnTarget) {
  // alpha, beta, a, target = unit(a + beta - alpha), decoy
  auto s = make_store(3, {1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 1, 1, 0.2, 0.3, 0.9});
  const std::vector<BoundQuestion> qs = {{0, 1, 2, {3}}};
  EXPECT_EQ(run_two_hints(s, qs, {})[0].o_t, 1u);
  const auto q = make_game_query(s, qs[0], Hints::kProximityAndOffset);
  EXPECT_EQ(q.excluded.size(), 3u);
}

TEST(TwoHints, DuplicateRolesShrinkExclusionSet) {
  // alpha == a: exclusions {a, beta}; candidates are the other m - 2 words.
  std::mt19937_64 rng(8);
  const auto s = oracle::random_store(rng, 12, 4);
  const BoundQuestion q{3, 5, 3, {7}};
  const auto query = make_game_query(s, q, Hints::kProximityAndOffset);
  EXPECT_EQ(query.excluded.size(), 2u);
  const std::vector<BoundQuestion> qs = {q};
  const auto r = run_two_hints(s, qs, {})[0].o_t;
  EXPECT_GE(r, 1u);
  EXPECT_LE(r, 10u);
  EXPECT_EQ(r, oracle::game_rank(s, q, true));
}

TEST(Games, MultiTargetTakesBestRank) {
  // From p1 = (1,0): w1 scores 0.9, w2 0.8, w3 0.1.
  auto s = make_store(2, {1, 0, 0.9, 0.436, 0.8, 0.6, 0.1, 0.995});
  const std::vector<BoundQuestion> qs = {{0, 0, 0, {2, 3}}, {0, 0, 0, {3, 2}},
                                         {0, 0, 0, {3}}};
  const auto r = run_single_hint(s, qs, {});
  EXPECT_EQ(r[0].o_t, 2u);
  EXPECT_EQ(r[1].o_t, 2u);
  EXPECT_EQ(r[2].o_t, 3u);
  // While w1 is ranked, the other acceptable target w3 is withheld.
  auto q = make_game_query(s, {0, 0, 0, {3, 1}}, Hints::kProximity);
  EXPECT_EQ(question_rank(s, q), 1u);
}

TEST(Games, AllTargetsExcludedIsADefect) {
  auto s = make_store(2, {1, 0, 0, 1, 1, 1});
  const std::vector<BoundQuestion> qs = {{0, 1, 2, {2}}};
  EXPECT_FALSE(is_evaluable(qs[0], Hints::kProximity));
  EXPECT_THROW(run_single_hint(s, qs, {}), PreconditionError);
  const BoundQuestion q2{0, 1, 2, {1}};
  EXPECT_TRUE(is_evaluable(q2, Hints::kProximity));
  EXPECT_FALSE(is_evaluable(q2, Hints::kProximityAndOffset));
}

TEST(Games, MatchOracleAndIgnoreParallelism) {
  std::mt19937_64 rng(21);
  const auto s = oracle::random_store(rng, 50, 8);
  std::uniform_int_distribution<WordIndex> pick(0, 49);
  std::vector<BoundQuestion> qs;
  while (qs.size() < 60) {
    BoundQuestion q{pick(rng), pick(rng), pick(rng), {pick(rng)}};
    if (rng() % 3 == 0) q.targets.push_back(pick(rng));
    if (is_evaluable(q, Hints::kProximity) &&
        is_evaluable(q, Hints::kProximityAndOffset)) {
      qs.push_back(q);
    }
  }
  GameConfig cfg;
  const auto r1 = run_single_hint(s, qs, cfg);
  const auto r2 = run_two_hints(s, qs, cfg);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    EXPECT_EQ(r1[i].o_t, oracle::game_rank(s, qs[i], false));
    EXPECT_EQ(r2[i].o_t, oracle::game_rank(s, qs[i], true));
  }
  cfg.parallelism = 5;
  const auto p1 = run_single_hint(s, qs, cfg);
  const auto p2 = run_two_hints(s, qs, cfg);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    EXPECT_EQ(p1[i].o_t, r1[i].o_t);
    EXPECT_EQ(p2[i].o_t, r2[i].o_t);
  }
}

TEST(EvaluateSubset, PerfectGuesses) {
  GameConfig cfg;
  cfg.bias_bits = 0.0;
  const auto ones = outcomes({1, 1, 1, 1});
  const auto r = evaluate_subset(ones, ones, cfg, 1000, {"s", 5, 1});
  EXPECT_DOUBLE_EQ(r.soft_acc1, 1.0);
  EXPECT_DOUBLE_EQ(r.soft_acc2, 1.0);
  EXPECT_DOUBLE_EQ(r.hard_acc1, 1.0);
  EXPECT_DOUBLE_EQ(r.delta_i2, 0.0);
  EXPECT_NEAR(r.delta_i1, std::log2(1000.0), 1e-12);
  EXPECT_EQ(r.g, 4u);
  EXPECT_EQ(r.skipped, 1u);
}

TEST(EvaluateSubset, MatchesHandComputation) {
  GameConfig cfg;  // bias -0.25
  const auto r1 = outcomes({1, 2, 3});
  const auto r2 = outcomes({1, 1, 2});
  const auto r = evaluate_subset(r1, r2, cfg, 400000, {"s", 3, 0});
  const double h1 = (0 + std::log2(3.0) + std::log2(5.0)) / 3;
  const double h2 = std::log2(3.0) / 3;
  EXPECT_NEAR(r.soft_acc1, std::exp2(-h1 - 0.25), 1e-12);
  EXPECT_NEAR(r.soft_acc2, std::exp2(-h2 - 0.25), 1e-12);
  EXPECT_NEAR(r.hard_acc1, 1.0 / 3, 1e-15);
  EXPECT_NEAR(r.hard_acc2, 2.0 / 3, 1e-15);
  EXPECT_NEAR(r.delta_i1, std::log2(400000.0) - h1 - 0.25, 1e-12);
  EXPECT_NEAR(r.delta_i2, h1 - h2, 1e-12);
  EXPECT_LT(report_identity_gap(r), 1e-9);
}

TEST(EvaluateSubset, Errors) {
  GameConfig cfg;
  const auto r = outcomes({1, 2});
  EXPECT_THROW(evaluate_subset({}, {}, cfg, 10, {"s", 0, 0}), PreconditionError);
  EXPECT_THROW(evaluate_subset(r, outcomes({1}), cfg, 10, {"s", 2, 0}),
               PreconditionError);
  EXPECT_THROW(evaluate_subset(r, r, cfg, 10, {"s", 7, 0}), PreconditionError);
  cfg.bias_bits = 0.5;
  EXPECT_THROW(evaluate_subset(r, r, cfg, 10, {"s", 2, 0}), PreconditionError);
}

TEST(AverageRow, PooledEstimateAndIdentity) {
  GameConfig cfg;
  const auto a1 = outcomes({1, 2, 3}), a2 = outcomes({1, 1, 2});
  const auto b1 = outcomes({4, 9}), b2 = outcomes({2, 12});
  const std::vector<SubsetReport> rows = {
      evaluate_subset(a1, a2, cfg, 5000, {"a", 4, 1}),
      evaluate_subset(b1, b2, cfg, 5000, {"b", 2, 0})};
  const auto pooled1 = outcomes({1, 2, 3, 4, 9});
  const auto pooled2 = outcomes({1, 1, 2, 2, 12});
  const auto direct = evaluate_subset(pooled1, pooled2, cfg, 5000, {"all", 6, 1});
  const auto avg = average_row(rows, Weighting::kByCount, "weighted-average");
  EXPECT_EQ(avg.g, 5u);
  EXPECT_EQ(avg.skipped, 1u);
  EXPECT_NEAR(avg.soft_acc1, direct.soft_acc1, 1e-12);
  EXPECT_NEAR(avg.soft_acc2, direct.soft_acc2, 1e-12);
  EXPECT_NEAR(avg.hard_acc2, direct.hard_acc2, 1e-12);
  EXPECT_NEAR(avg.delta_i1, direct.delta_i1, 1e-12);
  EXPECT_NEAR(avg.delta_i2, direct.delta_i2, 1e-12);
  EXPECT_LT(report_identity_gap(avg), 1e-9);

  const auto flat = average_row(rows, Weighting::kUniform, "unweighted-average");
  EXPECT_NEAR(flat.delta_i2, (rows[0].delta_i2 + rows[1].delta_i2) / 2, 1e-12);
  EXPECT_LT(report_identity_gap(flat), 1e-9);
}

TEST(EvaluateTestSet, SkipsQuestionsWithExcludedTargets) {
  auto s = make_store(2, {1, 0, 0, 1, 1, 1, 0.5, 1, 1, 0.2});
  BoundTestSet set;
  set.subsets.push_back({"s", {{0, 1, 2, {3}}, {0, 1, 2, {1}}, {3, 4, 0, {2}}}, {}});
  set.subsets[0].stats.parsed = 4;  // one question was OOV at bind time
  const auto res = evaluate_test_set(s, set, {});
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].g, 2u);
  EXPECT_EQ(res.rows[0].skipped, 2u);
  EXPECT_EQ(res.excluded_target_questions, 1u);
  EXPECT_EQ(res.i0_m, 5u);
}

TEST(RandomHintGame, SingleSymbol) {
  const auto cps = log_checkpoints(1000);
  for (const auto& p : simulate_random_hint_game(1, 1000, 3, cps)) {
    EXPECT_DOUBLE_EQ(p.hard_acc, 1.0);
    EXPECT_DOUBLE_EQ(p.soft_acc, 1.0);
  }
}

TEST(RandomHintGame, ConvergesToOneOverN) {
  const auto cps = log_checkpoints(100000);
  const auto curve = simulate_random_hint_game(10, 100000, 7, cps);
  ASSERT_EQ(curve.back().g, 100000u);
  EXPECT_NEAR(curve.back().hard_acc, 0.1, 0.02);
  EXPECT_NEAR(curve.back().soft_acc, 0.1, 0.02);
}

TEST(RandomHintGame, HardAccuracyUnbiased) {
  // Mean over 400 runs of 200 trials: standard error sqrt(0.09/80000) ~ 0.0011.
  const std::vector<std::size_t> cps = {200};
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    total += simulate_random_hint_game(10, 200, seed, cps).front().hard_acc;
  }
  EXPECT_NEAR(total / 400, 0.1, 0.005);
}

TEST(RandomHintGame, DeterministicAndPrefixStable) {
  const auto cps = log_checkpoints(5000);
  const auto a = simulate_random_hint_game(7, 5000, 99, cps);
  const auto b = simulate_random_hint_game(7, 5000, 99, cps);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].hard_acc, b[i].hard_acc);
    EXPECT_EQ(a[i].soft_acc, b[i].soft_acc);
  }
  // Trial draws depend on (seed, index) only, so a shorter run is a prefix.
  const std::vector<std::size_t> short_cps = {50};
  const auto c = simulate_random_hint_game(7, 50, 99, short_cps);
  EXPECT_EQ(c.front().soft_acc, a[std::find_if(a.begin(), a.end(), [](auto& p) {
                                   return p.g == 50;
                                 }) - a.begin()].soft_acc);
}

TEST(RandomHintGame, Errors) {
  const std::vector<std::size_t> cps = {1};
  EXPECT_THROW(simulate_random_hint_game(0, 10, 1, cps), PreconditionError);
  EXPECT_THROW(simulate_random_hint_game(10, 0, 1, cps), PreconditionError);
  const std::vector<std::size_t> bad = {5, 3};
  EXPECT_THROW(simulate_random_hint_game(10, 10, 1, bad), PreconditionError);
  const std::vector<std::size_t> beyond = {11};
  EXPECT_THROW(simulate_random_hint_game(10, 10, 1, beyond), PreconditionError);
}

TEST(LogCheckpoints, Shape) {
  EXPECT_EQ(log_checkpoints(1), std::vector<std::size_t>{1});
  EXPECT_EQ(log_checkpoints(100),
            (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100}));
  EXPECT_EQ(log_checkpoints(30), (std::vector<std::size_t>{1, 2, 5, 10, 20, 30}));
}

TEST(CoarseModel, NoiselessEndWordsAreShiftedStarts) {
  CoarseModelParams p;
  p.m = 4;
  p.d = 5;
  p.noise_sigma = 0.0;
  const auto model = generate_coarse_model(p);
  ASSERT_EQ(model.pairs.size(), 2u);
  for (auto [start, end] : model.pairs) {
    const auto a = model.store.row(start);
    const auto b = model.store.row(end);
    std::vector<double> want(p.d);
    double sq = 0.0;
    for (std::size_t k = 0; k < p.d; ++k) {
      want[k] = a[k] + model.phi[k];
      sq += want[k] * want[k];
    }
    for (std::size_t k = 0; k < p.d; ++k) {
      EXPECT_NEAR(b[k], want[k] / std::sqrt(sq), 1e-6);
    }
  }
}

TEST(CoarseModel, StartVectorsNearlyOrthogonal) {
  CoarseModelParams p;  // m = 2000, d = 50
  const auto model = generate_coarse_model(p);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = i + 1; j < 200; ++j) {
      const auto a = model.store.row(model.pairs[i].first);
      const auto b = model.store.row(model.pairs[j].first);
      double dot = 0.0;
      for (std::size_t k = 0; k < p.d; ++k) dot += static_cast<double>(a[k]) * b[k];
      sum += dot;
      sq += dot * dot;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sd, 1.0 / std::sqrt(50.0), 0.02);
}

TEST(CoarseModel, SeedDeterminism) {
  CoarseModelParams p;
  p.m = 100;
  p.d = 10;
  p.seed = 17;
  const auto a = generate_coarse_model(p);
  const auto b = generate_coarse_model(p);
  for (WordIndex i = 0; i < a.store.size(); ++i) {
    for (std::size_t k = 0; k < p.d; ++k) EXPECT_EQ(a.store.row(i)[k], b.store.row(i)[k]);
  }
  p.seed = 18;
  const auto c = generate_coarse_model(p);
  EXPECT_NE(a.store.row(0)[0], c.store.row(0)[0]);
}

TEST(CoarseModel, Errors) {
  CoarseModelParams p;
  p.m = 7;
  EXPECT_THROW(generate_coarse_model(p), PreconditionError);
  p.m = 0;
  EXPECT_THROW(generate_coarse_model(p), PreconditionError);
  p.m = 10;
  p.noise_sigma = -1.0;
  EXPECT_THROW(generate_coarse_model(p), PreconditionError);
  p.noise_sigma = 0.0;
  p.d = 1;
  EXPECT_THROW(generate_coarse_model(p), PreconditionError);
}

TEST(OffsetOnly, TwoWordModelGivesOneBit) {
  CoarseModelParams p;
  p.m = 2;
  p.noise_sigma = 0.0;
  const auto res = run_offset_only(generate_coarse_model(p));
  ASSERT_EQ(res.ranks.size(), 1u);
  EXPECT_EQ(res.ranks[0].o_t, 1u);
  EXPECT_DOUBLE_EQ(res.info_gain_bits, 1.0);
}

TEST(OffsetOnly, RanksUniformOverHalfAndOneBit) {
  CoarseModelParams p;
  p.noise_sigma = 0.01 * p.phi_norm;
  const auto model = generate_coarse_model(p);
  const auto res = run_offset_only(model);
  const std::size_t half = p.m / 2;
  for (const auto& r : res.ranks) {
    EXPECT_GE(r.o_t, 1u);
    EXPECT_LE(r.o_t, half);
  }
  // chi-square, 9 degrees of freedom, 1% critical value 21.666
  EXPECT_LT(chi_square_uniform(res.ranks, half, 10), 21.666);
  EXPECT_NEAR(res.info_gain_bits, 1.0, 0.2);

  const auto threaded = run_offset_only(model, 4);
  for (std::size_t i = 0; i < res.ranks.size(); ++i) {
    EXPECT_EQ(threaded.ranks[i].o_t, res.ranks[i].o_t);
  }
  EXPECT_EQ(threaded.info_gain_bits, res.info_gain_bits);
}
