#include "hintbits/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hintbits/errors.hpp"

namespace hintbits {

std::size_t effective_cardinality(std::size_t o_t) {
  if (o_t < 1) throw PreconditionError("rank o_t must be >= 1");
  return 2 * o_t - 1;
}

double point_information(std::size_t c) {
  if (c < 1) throw PreconditionError("cardinality must be >= 1");
  return std::log2(static_cast<double>(c));
}

EntropyEstimate naive_entropy(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw PreconditionError("naive_entropy of no outcomes");
  double sum = 0.0;
  for (std::size_t o : ranks) sum += point_information(effective_cardinality(o));
  return {sum / static_cast<double>(ranks.size()), ranks.size()};
}

EntropyEstimate naive_entropy(std::span<const RankOutcome> ranks) {
  if (ranks.empty()) throw PreconditionError("naive_entropy of no outcomes");
  double sum = 0.0;
  for (const auto& r : ranks) {
    sum += point_information(effective_cardinality(r.o_t));
  }
  return {sum / static_cast<double>(ranks.size()), ranks.size()};
}

double bias(std::size_t n) {
  if (n < 1) throw PreconditionError("bias needs n >= 1");
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    sum += std::log2(static_cast<double>(2 * k - 1) / nd);
  }
  return sum / nd;
}

double soft_accuracy(const EntropyEstimate& h, double b) {
  if (b > 0.0) throw PreconditionError("bias term must be <= 0");
  return std::exp2(-h.h_g_mean + b);
}

double hard_accuracy(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw PreconditionError("hard_accuracy of no outcomes");
  const auto hits = std::count(ranks.begin(), ranks.end(), std::size_t{1});
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double hard_accuracy(std::span<const RankOutcome> ranks) {
  if (ranks.empty()) throw PreconditionError("hard_accuracy of no outcomes");
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [](const RankOutcome& r) { return r.o_t == 1; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double base_information(std::size_t m) {
  if (m < 1) throw PreconditionError("vocabulary size must be >= 1");
  return std::log2(static_cast<double>(m));
}

double delta_i1(double acc1, std::size_t m) {
  if (!(acc1 > 0.0)) throw PreconditionError("acc1 must be > 0");
  return base_information(m) - std::log2(1.0 / acc1);
}

double delta_i2(double acc1, double acc2) {
  if (!(acc1 > 0.0) || !(acc2 > 0.0)) {
    throw PreconditionError("accuracies must be > 0");
  }
  return std::log2(1.0 / acc1) - std::log2(1.0 / acc2);
}

double expected_guesser_accuracy(const DiceSpec& spec) {
  const auto& p = spec.true_dist;
  const auto& q = spec.model_dist;
  if (p.empty() || p.size() != q.size()) {
    throw PreconditionError("dice distributions must be non-empty and equal length");
  }
  auto check = [](const std::vector<double>& d, const char* which) {
    double total = 0.0;
    for (double x : d) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw PreconditionError(std::string(which) + " has a negative entry");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw PreconditionError(std::string(which) + " does not sum to 1");
    }
  };
  check(p, "true_dist");
  check(q, "model_dist");

  const double best = *std::max_element(q.begin(), q.end());
  double hit = 0.0;
  std::size_t ties = 0;
  for (std::size_t f = 0; f < q.size(); ++f) {
    if (q[f] == best) {
      hit += p[f];
      ++ties;
    }
  }
  return hit / static_cast<double>(ties);
}

}  // namespace hintbits
