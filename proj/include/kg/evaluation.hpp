#pragma once

#include <span>
#include <string>
#include <vector>

#include "kg/data.hpp"
#include "kg/score.hpp"

namespace kg {

enum class Protocol { filtered, raw };

struct RankResult {
  Triple triple;
  Side side = Side::tail;
  double rank = 1.0;  // tie-averaged, so possibly fractional
};

struct Metrics {
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  double mr = 0.0;
  double mrr = 0.0;
  std::size_t count = 0;  // number of rank results aggregated

  bool operator==(const Metrics&) const = default;
};

struct EvalReport {
  Metrics all;
  Metrics head;
  Metrics tail;
  std::size_t n_evaluated = 0;  // test triples; all.count == 2 * n_evaluated
  Protocol protocol = Protocol::filtered;
};

/// Rank of scores[true_id] among all candidates: 1 + #strictly greater +
/// #equal / 2. Candidates listed in `filtered_out` (other than true_id) are
/// excluded. `filtered_out` must not contain duplicates.
template <typename S>
double tie_averaged_rank(const VectorX<S>& scores, EntityId true_id, std::span<const EntityId> filtered_out) {
  const S target = scores[true_id];
  double greater = 0.0;
  double equal = 0.0;
  for (Eigen::Index e = 0; e < scores.size(); ++e) {
    if (e == true_id) continue;
    if (scores[e] > target) {
      greater += 1.0;
    } else if (scores[e] == target) {
      equal += 1.0;
    }
  }
  for (const EntityId e : filtered_out) {
    if (e == true_id) continue;
    if (scores[e] > target) {
      greater -= 1.0;
    } else if (scores[e] == target) {
      equal -= 1.0;
    }
  }
  return 1.0 + greater + equal / 2.0;
}

template <typename S>
RankResult rank_entity(const CandidateScorer<S>& scorer, const Triple& x, Side side, const KnownIndex& known,
                       Protocol protocol, VectorX<S>& scratch) {
  scorer.score_all(x, side, scratch);
  std::span<const EntityId> filtered;
  if (protocol == Protocol::filtered) filtered = side == Side::tail ? known.tails_of(x.h, x.r) : known.heads_of(x.r, x.t);
  const EntityId true_id = side == Side::tail ? x.t : x.h;
  return {x, side, tie_averaged_rank(scratch, true_id, filtered)};
}

/// Convenience form; builds a CandidateScorer per call.
template <typename S>
RankResult rank_entity(const ModelSpec& spec, const ModelParams<S>& params, const Triple& x, Side side,
                       const KnownIndex& known, Protocol protocol = Protocol::filtered) {
  const CandidateScorer<S> scorer(spec, params);
  VectorX<S> scratch;
  return rank_entity(scorer, x, side, known, protocol, scratch);
}

/// Threads used by evaluation: KGBENCH_THREADS if set and positive, else the
/// hardware concurrency.
unsigned evaluation_threads();

/// Head and tail rank for every triple, ordered (t0 head, t0 tail, t1 head, ...).
std::vector<RankResult> rank_all(const ModelSpec& spec, const ModelParams<float>& params,
                                 std::span<const Triple> triples, const KnownIndex& known, Protocol protocol,
                                 unsigned threads = 0);

Metrics metrics_from_ranks(std::span<const RankResult> ranks);
EvalReport report_from_ranks(std::span<const RankResult> ranks, Protocol protocol);

EvalReport evaluate(const ModelSpec& spec, const ModelParams<float>& params, std::span<const Triple> triples,
                    const KnownIndex& known, Protocol protocol = Protocol::filtered, unsigned threads = 0);

std::string report_to_json(const EvalReport& report, const std::string& model, const std::string& dataset);

struct LabeledReport {
  std::string model;
  std::string dataset;
  EvalReport report;
};

/// One tab-separated row per report in input order: model, dataset,
/// Hits@10 (percent, 2 decimals), MR (rounded), MRR (3 decimals).
std::string compare_reports(std::span<const LabeledReport> reports);
std::string format_table_row(const EvalReport& report);

}  // namespace kg
