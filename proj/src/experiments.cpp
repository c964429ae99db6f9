#include "hintbits/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hintbits/errors.hpp"

namespace hintbits {

namespace {

// splitmix64 as a UniformRandomBitGenerator; cheap to construct per trial.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mix(seed);
  const std::uint64_t base = mix();
  SplitMix64 per_trial(base ^ (trial * 0xd1b54a32d192ed03ULL));
  per_trial();
  return per_trial;
}

std::vector<RankOutcome> run_game(const EmbeddingStore& store,
                                  std::span<const BoundQuestion> questions,
                                  const GameConfig& cfg, Hints hints) {
  cfg.validate();
  std::vector<RankOutcome> out(questions.size());
  parallel_for(questions.size(), cfg.parallelism, [&](std::size_t i) {
    const auto query = make_game_query(store, questions[i], hints);
    out[i].o_t = question_rank(store, query);
  });
  return out;
}

Prediction unit_sum(std::span<const float> row, std::span<const double> offset) {
  Prediction p(row.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    p[k] = row[k] + offset[k];
    sq += p[k] * p[k];
  }
  const double norm = std::sqrt(sq);
  if (norm > 0.0) {
    for (auto& x : p) x /= norm;
  }
  return p;
}

}  // namespace

void GameConfig::validate() const {
  if (!(bias_bits <= 0.0)) throw PreconditionError("bias must be <= 0");
  if (i0_m && *i0_m < 1) throw PreconditionError("i0_m must be >= 1");
}

std::size_t GameConfig::resolve_i0_m(const EmbeddingStore& store) const {
  return i0_m.value_or(store.size());
}

GameQuery make_game_query(const EmbeddingStore& store, const BoundQuestion& q,
                          Hints hints) {
  GameQuery query;
  query.targets = q.targets;
  query.prediction = store.row_as_prediction(q.a);
  if (hints == Hints::kProximity) {
    query.excluded = ExclusionSet{q.a};
    return query;
  }
  const auto beta = store.row(q.beta);
  const auto alpha = store.row(q.alpha);
  for (std::size_t k = 0; k < store.dim(); ++k) {
    query.prediction[k] += static_cast<double>(beta[k]) - alpha[k];
  }
  query.excluded = ExclusionSet{q.a, q.alpha, q.beta};
  return query;
}

bool is_evaluable(const BoundQuestion& q, Hints hints) {
  const ExclusionSet excluded = hints == Hints::kProximity
                                    ? ExclusionSet{q.a}
                                    : ExclusionSet{q.a, q.alpha, q.beta};
  return std::any_of(q.targets.begin(), q.targets.end(),
                     [&](WordIndex t) { return !excluded.contains(t); });
}

std::size_t question_rank(const EmbeddingStore& store, const GameQuery& query) {
  std::vector<WordIndex> live;
  for (WordIndex t : query.targets) {
    if (!query.excluded.contains(t)) live.push_back(t);
  }
  if (live.empty()) {
    throw PreconditionError("every acceptable target is excluded");
  }
  if (live.size() == 1) {
    return target_rank(store, query.prediction, live.front(), query.excluded);
  }
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (WordIndex t : live) {
    ExclusionSet excluded = query.excluded;
    for (WordIndex other : live) {
      if (other != t) excluded.insert(other);
    }
    best = std::min(best, target_rank(store, query.prediction, t, excluded));
  }
  return best;
}

std::vector<RankOutcome> run_single_hint(const EmbeddingStore& store,
                                         std::span<const BoundQuestion> questions,
                                         const GameConfig& cfg) {
  return run_game(store, questions, cfg, Hints::kProximity);
}

std::vector<RankOutcome> run_two_hints(const EmbeddingStore& store,
                                       std::span<const BoundQuestion> questions,
                                       const GameConfig& cfg) {
  return run_game(store, questions, cfg, Hints::kProximityAndOffset);
}

SubsetReport evaluate_subset(std::span<const RankOutcome> ranks1,
                             std::span<const RankOutcome> ranks2,
                             const GameConfig& cfg, std::size_t i0_m,
                             const SubsetMeta& meta) {
  cfg.validate();
  if (ranks1.empty() || ranks2.empty()) {
    throw PreconditionError("evaluate_subset needs non-empty rank sequences");
  }
  if (ranks1.size() != ranks2.size()) {
    throw PreconditionError("rank sequences differ in length");
  }
  if (meta.parsed != ranks1.size() + meta.skipped) {
    throw PreconditionError("parsed count must equal evaluated + skipped");
  }
  SubsetReport r;
  r.subset = meta.subset;
  r.g = ranks1.size();
  r.skipped = meta.skipped;
  r.soft_acc1 = soft_accuracy(naive_entropy(ranks1), cfg.bias_bits);
  r.soft_acc2 = soft_accuracy(naive_entropy(ranks2), cfg.bias_bits);
  r.hard_acc1 = hard_accuracy(ranks1);
  r.hard_acc2 = hard_accuracy(ranks2);
  r.i0 = base_information(i0_m);
  r.delta_i1 = delta_i1(r.soft_acc1, i0_m);
  r.delta_i2 = delta_i2(r.soft_acc1, r.soft_acc2);
  return r;
}

SubsetReport average_row(std::span<const SubsetReport> rows, Weighting weighting,
                         std::string label) {
  SubsetReport avg;
  avg.subset = std::move(label);
  double total = 0.0;
  double log_soft1 = 0.0, log_soft2 = 0.0;
  double hard1 = 0.0, hard2 = 0.0, d1 = 0.0, d2 = 0.0, i0 = 0.0;
  for (const auto& r : rows) {
    avg.skipped += r.skipped;
    if (r.g == 0) continue;
    avg.g += r.g;
    const double w =
        weighting == Weighting::kByCount ? static_cast<double>(r.g) : 1.0;
    total += w;
    log_soft1 += w * std::log2(r.soft_acc1);
    log_soft2 += w * std::log2(r.soft_acc2);
    hard1 += w * r.hard_acc1;
    hard2 += w * r.hard_acc2;
    d1 += w * r.delta_i1;
    d2 += w * r.delta_i2;
    i0 += w * r.i0;
  }
  if (total == 0.0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    avg.soft_acc1 = avg.soft_acc2 = avg.hard_acc1 = avg.hard_acc2 = nan;
    avg.delta_i1 = avg.delta_i2 = avg.i0 = nan;
    return avg;
  }
  avg.soft_acc1 = std::exp2(log_soft1 / total);
  avg.soft_acc2 = std::exp2(log_soft2 / total);
  avg.hard_acc1 = hard1 / total;
  avg.hard_acc2 = hard2 / total;
  avg.delta_i1 = d1 / total;
  avg.delta_i2 = d2 / total;
  avg.i0 = i0 / total;
  return avg;
}

double report_identity_gap(const SubsetReport& r) {
  return std::abs((r.delta_i1 + r.delta_i2) - (r.i0 - std::log2(1.0 / r.soft_acc2)));
}

EvalResult evaluate_test_set(const EmbeddingStore& store, const BoundTestSet& set,
                             const GameConfig& cfg) {
  cfg.validate();
  EvalResult result;
  result.i0_m = cfg.resolve_i0_m(store);
  for (const auto& subset : set.subsets) {
    std::vector<BoundQuestion> usable;
    usable.reserve(subset.questions.size());
    for (const auto& q : subset.questions) {
      if (is_evaluable(q, Hints::kProximity) &&
          is_evaluable(q, Hints::kProximityAndOffset)) {
        usable.push_back(q);
      } else {
        ++result.excluded_target_questions;
      }
    }
    SubsetMeta meta{subset.label, subset.stats.parsed,
                    subset.stats.parsed - usable.size()};
    if (usable.empty()) {
      SubsetReport empty;
      empty.subset = subset.label;
      empty.skipped = meta.skipped;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      empty.soft_acc1 = empty.soft_acc2 = empty.hard_acc1 = empty.hard_acc2 = nan;
      empty.delta_i1 = empty.delta_i2 = nan;
      empty.i0 = base_information(result.i0_m);
      result.rows.push_back(empty);
      continue;
    }
    const auto ranks1 = run_single_hint(store, usable, cfg);
    const auto ranks2 = run_two_hints(store, usable, cfg);
    result.rows.push_back(evaluate_subset(ranks1, ranks2, cfg, result.i0_m, meta));
  }
  return result;
}

std::vector<std::size_t> log_checkpoints(std::size_t g) {
  std::vector<std::size_t> out;
  if (g == 0) return out;
  for (std::size_t decade = 1; decade <= g; decade *= 10) {
    for (std::size_t step : {1, 2, 5}) {
      const std::size_t c = decade * step;
      if (c < g) out.push_back(c);
    }
    if (decade > g / 10) break;
  }
  out.push_back(g);
  return out;
}

std::vector<CurvePoint> simulate_random_hint_game(
    std::size_t n, std::size_t g, std::uint64_t seed,
    std::span<const std::size_t> checkpoints) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (g < 1) throw PreconditionError("g must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > g ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw PreconditionError("checkpoints must be strictly increasing in [1, g]");
    }
  }

  const double b = bias(n);
  std::vector<CurvePoint> curve;
  curve.reserve(checkpoints.size());
  std::uniform_int_distribution<std::size_t> face(0, n - 1);
  double log_sum = 0.0;
  std::size_t hits = 0;
  auto next = checkpoints.begin();
  for (std::size_t trial = 0; trial < g && next != checkpoints.end(); ++trial) {
    auto rng = trial_stream(seed, trial);
    const std::size_t target = face(rng);
    const std::size_t hint = face(rng);
    const std::size_t o_t = (target + n - hint) % n + 1;
    if (o_t == 1) ++hits;
    log_sum += point_information(effective_cardinality(o_t));
    const std::size_t done = trial + 1;
    if (done == *next) {
      const double gd = static_cast<double>(done);
      curve.push_back({done, static_cast<double>(hits) / gd,
                       soft_accuracy({log_sum / gd, done}, b)});
      ++next;
    }
  }
  return curve;
}

CoarseModel generate_coarse_model(const CoarseModelParams& params) {
  if (params.m < 2 || params.m % 2 != 0) {
    throw PreconditionError("coarse model needs an even m >= 2");
  }
  if (params.d < 2) throw PreconditionError("coarse model needs d >= 2");
  if (!(params.noise_sigma >= 0.0)) {
    throw PreconditionError("noise sigma must be >= 0");
  }
  if (!(params.phi_norm > 0.0)) throw PreconditionError("phi norm must be > 0");

  const std::size_t d = params.d;
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&] {
    Prediction v(d);
    double sq = 0.0;
    do {
      sq = 0.0;
      for (auto& x : v) {
        x = gauss(rng);
        sq += x * x;
      }
    } while (sq == 0.0);
    const double norm = std::sqrt(sq);
    for (auto& x : v) x /= norm;
    return v;
  };

  Prediction phi = random_unit();
  for (auto& x : phi) x *= params.phi_norm;

  const std::size_t half = params.m / 2;
  std::vector<std::string> words;
  words.reserve(params.m);
  std::vector<double> rows;
  rows.reserve(params.m * d);
  std::vector<std::pair<WordIndex, WordIndex>> pairs;
  pairs.reserve(half);
  for (std::size_t i = 0; i < half; ++i) {
    const Prediction start = random_unit();
    words.push_back("a" + std::to_string(i));
    rows.insert(rows.end(), start.begin(), start.end());
    words.push_back("b" + std::to_string(i));
    for (std::size_t k = 0; k < d; ++k) {
      const double noise = params.noise_sigma > 0.0 ? params.noise_sigma * gauss(rng) : 0.0;
      rows.push_back(start[k] + phi[k] + noise);
    }
    pairs.emplace_back(static_cast<WordIndex>(2 * i),
                       static_cast<WordIndex>(2 * i + 1));
  }

  return CoarseModel{EmbeddingStore(std::move(words), d, rows, false),
                     std::move(phi), std::move(pairs), params.noise_sigma};
}

OffsetOnlyResult run_offset_only(const CoarseModel& model, unsigned threads) {
  const auto& store = model.store;
  const std::size_t m = store.size();
  if (m < 2 || m % 2 != 0 || model.pairs.size() != m / 2) {
    throw PreconditionError("coarse model must hold m/2 pairs with even m >= 2");
  }
  if (model.phi.size() != store.dim()) {
    throw PreconditionError("offset dimension does not match the store");
  }

  std::vector<Prediction> predictions(m);
  parallel_for(m, threads, [&](std::size_t x) {
    predictions[x] = unit_sum(store.row(static_cast<WordIndex>(x)), model.phi);
  });

  std::vector<double> best(m);
  parallel_for(m, threads, [&](std::size_t v) {
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < m; ++x) {
      if (x == v) continue;
      s = std::max(s, store.score(predictions[x], static_cast<WordIndex>(v)));
    }
    best[v] = s;
  });

  OffsetOnlyResult result;
  result.ranks.reserve(model.pairs.size());
  for (const auto& [start, end] : model.pairs) {
    (void)start;
    std::size_t better = 0;
    for (std::size_t v = 0; v < m; ++v) {
      if (v == end) continue;
      if (best[v] > best[end] || (best[v] == best[end] && v < end)) ++better;
    }
    result.ranks.push_back({better + 1});
  }
  result.h_g_mean = naive_entropy(result.ranks).h_g_mean;
  result.bias_bits = bias(m / 2);
  result.info_gain_bits =
      base_information(m) - (result.h_g_mean - result.bias_bits);
  return result;
}

}  // namespace hintbits
