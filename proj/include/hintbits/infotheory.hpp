#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Rank-based entropy and accuracy estimators. All quantities are in bits.
//
// A guess that places the target at rank o_t (1 = best) is read as the
// target being the median of a uniform set of c = 2*o_t - 1 candidates.
// Averaging log2(c) over many guesses gives a naive entropy estimate that is
// biased low relative to log2 E{c}; `bias(n)` is that gap for a target
// uniform over n candidates and `soft_accuracy` undoes it.

namespace hintbits {

struct RankOutcome {
  std::size_t o_t = 1;
};

struct EntropyEstimate {
  double h_g_mean = 0.0;
  std::size_t g = 0;
};

struct DiceSpec {
  std::vector<double> true_dist;
  std::vector<double> model_dist;
};

std::size_t effective_cardinality(std::size_t o_t);
double point_information(std::size_t c);

// Mean of log2(2*o_t - 1). The sum is taken in input order and divided once.
EntropyEstimate naive_entropy(std::span<const RankOutcome> ranks);
EntropyEstimate naive_entropy(std::span<const std::size_t> ranks);

// (1/n) * sum_{k=1..n} log2((2k - 1) / n). Zero at n = 1, tends to
// 1 - log2(e) from above.
double bias(std::size_t n);

// 2^(-h + b), with b <= 0.
double soft_accuracy(const EntropyEstimate& h, double b);

double hard_accuracy(std::span<const RankOutcome> ranks);
double hard_accuracy(std::span<const std::size_t> ranks);

double base_information(std::size_t m);

// Information added by the first hint: log2(m) - log2(1/acc1).
double delta_i1(double acc1, std::size_t m);
// Information added by the second hint given the first. Signed, unclamped.
double delta_i2(double acc1, double acc2);

// A guesser always bets on the most likely face(s) of its model, splitting
// uniformly among ties. Returns its hit rate under the true distribution.
double expected_guesser_accuracy(const DiceSpec& spec);

}  // namespace hintbits
