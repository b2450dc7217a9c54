#pragma once

#include <span>
#include <string>
#include <vector>

#include "kg/data.hpp"

namespace kg {

inline constexpr double kDefaultInverseThreshold = 0.8;

/// Relations r <= r_prime detected as mutual inverses. `forward` is the
/// fraction of distinct train triples (h, r, t) whose reverse (t, r_prime, h)
/// is in train; `backward` the same with the roles swapped. r == r_prime marks
/// a symmetric relation.
struct InversePair {
  RelationId r = 0;
  RelationId r_prime = 0;
  double forward = 0.0;
  double backward = 0.0;

  bool operator==(const InversePair&) const = default;
};

struct BiasReport {
  std::vector<InversePair> inverse_pairs;
  std::size_t trivial_test_count = 0;
  std::size_t test_size = 0;
  double trivial_test_percentage = 0.0;
};

/// Pairs whose coverage is >= threshold in both directions, sorted by (r, r_prime).
std::vector<InversePair> detect_inverse_pairs(std::span<const Triple> train, double threshold);

/// A test triple (h, r, t) is trivial when (t, r', h) is in train for some r'
/// paired with r. Each test triple counts at most once.
BiasReport count_trivial_test_triples(std::span<const Triple> train, std::span<const Triple> test,
                                      std::span<const InversePair> pairs);

BiasReport audit_bias(const TripleStore& store, double threshold = kDefaultInverseThreshold);

/// JSON: {"pairs":[{"r","r_prime","fwd","bwd"}], "trivial_count", "test_size", "trivial_pct"}
/// with trivial_pct written to two decimals.
std::string render_bias_json(const BiasReport& report, const Vocabulary& vocab);
std::string render_bias_summary(const BiasReport& report, const Vocabulary& vocab, double threshold);

}  // namespace kg
