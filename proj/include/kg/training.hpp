#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kg/data.hpp"
#include "kg/gradient.hpp"

namespace kg {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::int64_t batch_size = 10000;
  double learning_rate = 0.001;
  double weight_decay = 0.001;
  double dropout = 0.5;
  std::int64_t negatives_per_positive = 1;
  std::int64_t epochs = 100;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 0;  // 0 disables validation

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& config);

/// Positives (label 1) each followed by their corruptions (label 0).
struct LabeledBatch {
  std::vector<Triple> triples;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return triples.size(); }
};

inline constexpr int kMaxCorruptionRetries = 10;

/// Bernoulli corruption: replace the head with probability p_corrupt_head(r),
/// else the tail, by an entity different from the one replaced. Corruptions
/// that are known triples are redrawn up to kMaxCorruptionRetries times.
LabeledBatch sample_negatives(std::span<const Triple> positives, const RelationStats& stats,
                              const KnownIndex& known, std::int64_t num_entities, std::int64_t k,
                              std::mt19937_64& rng);

/// -log(sigmoid(f)) for y = 1, -log(1 - sigmoid(f)) for y = 0, overflow-free.
template <typename S>
S cross_entropy(S f, bool positive) {
  const S z = positive ? -f : f;
  return std::max(z, S(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <typename S>
S sigmoid(S f) {
  if (f >= S(0)) return S(1) / (S(1) + std::exp(-f));
  const S e = std::exp(f);
  return e / (S(1) + e);
}

/// Inverted dropout: each unit kept with probability 1 - p and scaled by 1/(1 - p).
template <typename S>
VectorX<S> dropout_mask(Eigen::Index size, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(1.0 - p);
  const S scale = static_cast<S>(1.0 / (1.0 - p));
  VectorX<S> mask(size);
  for (Eigen::Index i = 0; i < size; ++i) mask[i] = keep(rng) ? scale : S(0);
  return mask;
}

template <typename S>
struct LossAndGrads {
  S loss = S(0);
  GradientSet<S> grads;
};

namespace detail {

[[noreturn]] inline void throw_non_finite(std::size_t index, const Triple& x) {
  throw NumericError("non-finite score at batch index " + std::to_string(index) + " (" + std::to_string(x.h) + ", " +
                     std::to_string(x.r) + ", " + std::to_string(x.t) + ")");
}

inline constexpr std::size_t kMlpChunk = 256;

/// Hidden-layer kinds, a chunk of triples at a time as matrix products.
/// Masks are drawn per triple in batch order, as in the per-triple path.
template <typename S>
void mlp_batch_accumulate(const ModelSpec& spec, const ModelParams<S>& p, const LabeledBatch& batch, double dropout_p,
                          std::mt19937_64* dropout_rng, LossAndGrads<S>& res) {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index d = spec.dim;
  const Eigen::Index hidden = hidden_size(spec);
  const Eigen::Index width = mlp_input_width(spec);
  const bool use_dropout = dropout_rng != nullptr && dropout_p > 0.0;
  Mat in, pre, z, mask, dpre, din;
  for (std::size_t start = 0; start < batch.size(); start += kMlpChunk) {
    const auto n = static_cast<Eigen::Index>(std::min(kMlpChunk, batch.size() - start));
    in.resize(width, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Triple& x = batch.triples[start + static_cast<std::size_t>(c)];
      check_triple(p, x);
      in.col(c) = mlp_input(spec, p, x);
    }
    pre.noalias() = p.hidden * in;
    z = pre.cwiseMax(S(0));
    if (use_dropout) {
      mask.resize(hidden, n);
      for (Eigen::Index c = 0; c < n; ++c) mask.col(c) = dropout_mask<S>(hidden, dropout_p, *dropout_rng);
      z.array() *= mask.array();
    }
    const VectorX<S> f = (p.out.transpose() * z).transpose().array() + p.bias;

    VectorX<S> up(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const std::size_t i = start + static_cast<std::size_t>(c);
      if (!std::isfinite(f[c])) throw_non_finite(i, batch.triples[i]);
      const bool positive = batch.labels[i] != 0;
      up[c] = sigmoid(f[c]) - (positive ? S(1) : S(0));
      res.loss += cross_entropy(f[c], positive);
    }

    // d f / d pre = out where the unit is active, times its mask scale
    dpre = (pre.array() > S(0)).select(p.out.replicate(1, n), S(0));
    if (use_dropout) dpre.array() *= mask.array();
    dpre *= up.asDiagonal();
    res.grads.out.noalias() += z * up;
    res.grads.bias += up.sum();
    res.grads.hidden.noalias() += dpre * in.transpose();
    din.noalias() = p.hidden.transpose() * dpre;
    for (Eigen::Index c = 0; c < n; ++c) {
      const Triple& x = batch.triples[start + static_cast<std::size_t>(c)];
      if (spec.kind == ModelKind::ErMlp) {
        res.grads.entity.row(x.h) += din.col(c).segment(0, d);
        res.grads.relation.row(x.r) += din.col(c).segment(d, d);
        res.grads.entity.row(x.t) += din.col(c).segment(2 * d, d);
      } else {
        res.grads.entity.row(x.h) += din.col(c).segment(0, d);
        res.grads.entity.row(x.t) += din.col(c).segment(d, d);
        res.grads.relation.row(x.r) += din.col(c);
      }
    }
  }
}

}  // namespace detail

/// Summed cross-entropy over the batch plus weight_decay/2 * |W|^2 over the
/// MLP weight matrices (hidden and output). A fresh dropout mask is drawn per
/// triple when `dropout_rng` is given, the kind has a hidden layer and p > 0.
template <typename S>
LossAndGrads<S> batch_loss_and_grads(const ModelSpec& spec, const ModelParams<S>& params, const LabeledBatch& batch,
                                     double dropout_p, std::mt19937_64* dropout_rng, double weight_decay) {
  if (batch.triples.empty()) throw std::invalid_argument("batch_loss_and_grads: empty batch");
  if (batch.labels.size() != batch.triples.size()) throw std::invalid_argument("batch labels/triples length mismatch");

  LossAndGrads<S> res{S(0), GradientSet<S>::zeros_like(spec, params)};
  if (is_mlp(spec.kind)) {
    detail::mlp_batch_accumulate(spec, params, batch, dropout_p, dropout_rng, res);
  } else {
    for (std::size_t i = 0; i < batch.triples.size(); ++i) {
      const bool positive = batch.labels[i] != 0;
      S f_seen = S(0);
      score_and_accumulate(
          spec, params, batch.triples[i], static_cast<const VectorX<S>*>(nullptr),
          [&](S f) {
            f_seen = f;
            if (!std::isfinite(f)) return S(0);
            return sigmoid(f) - (positive ? S(1) : S(0));
          },
          res.grads);
      if (!std::isfinite(f_seen)) detail::throw_non_finite(i, batch.triples[i]);
      res.loss += cross_entropy(f_seen, positive);
    }
  }

  if (is_mlp(spec.kind) && weight_decay > 0.0) {
    const S wd = static_cast<S>(weight_decay);
    res.loss += wd / S(2) * (params.hidden.squaredNorm() + params.out.squaredNorm());
    res.grads.hidden += wd * params.hidden;
    res.grads.out += wd * params.out;
  }
  return res;
}

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename S>
struct AdamState {
  RowMatrixX<S> m_entity, v_entity;
  RowMatrixX<S> m_relation, v_relation;
  RowMatrixX<S> m_hidden, v_hidden;
  VectorX<S> m_out, v_out;
  S m_bias = S(0), v_bias = S(0);
  std::int64_t step = 0;

  static AdamState zeros_like(const ModelParams<S>& p) {
    AdamState s;
    s.m_entity = s.v_entity = RowMatrixX<S>::Zero(p.entity.rows(), p.entity.cols());
    s.m_relation = s.v_relation = RowMatrixX<S>::Zero(p.relation.rows(), p.relation.cols());
    s.m_hidden = s.v_hidden = RowMatrixX<S>::Zero(p.hidden.rows(), p.hidden.cols());
    s.m_out = s.v_out = VectorX<S>::Zero(p.out.size());
    return s;
  }
};

namespace detail {

template <typename S, typename Param, typename Grad, typename Moment>
void adam_update(Param&& theta, const Grad& g, Moment&& m, Moment&& v, S b1, S b2, S step_size, S bc2, S eps) {
  m = b1 * m + (S(1) - b1) * g;
  v = b2 * v + (S(1) - b2) * g.cwiseProduct(g);
  theta.array() -= step_size * m.array() / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace detail

/// One Adam step with bias correction. Only embedding rows present in the
/// gradient set update their moments; MLP weights are updated densely.
template <typename S>
void adam_step(ModelParams<S>& params, const GradientSet<S>& grads, AdamState<S>& state, const AdamConfig& cfg) {
  if (state.m_entity.rows() != params.entity.rows() || state.m_entity.cols() != params.entity.cols() ||
      state.m_relation.rows() != params.relation.rows() || state.m_relation.cols() != params.relation.cols() ||
      state.m_hidden.rows() != params.hidden.rows() || state.m_hidden.cols() != params.hidden.cols() ||
      state.m_out.size() != params.out.size())
    throw std::invalid_argument("adam_step: optimizer state shape differs from parameters");
  if (grads.entity.width() != params.entity.cols() || grads.relation.width() != params.relation.cols() ||
      grads.hidden.rows() != params.hidden.rows() || grads.hidden.cols() != params.hidden.cols() ||
      grads.out.size() != params.out.size())
    throw std::invalid_argument("adam_step: gradient shape differs from parameters");

  ++state.step;
  const S b1 = static_cast<S>(cfg.beta1);
  const S b2 = static_cast<S>(cfg.beta2);
  const S eps = static_cast<S>(cfg.epsilon);
  const double t = static_cast<double>(state.step);
  const S bc1 = static_cast<S>(1.0 - std::pow(cfg.beta1, t));
  const S bc2 = static_cast<S>(1.0 - std::pow(cfg.beta2, t));
  const S step_size = static_cast<S>(cfg.learning_rate) / bc1;

  for (std::size_t i = 0; i < grads.entity.size(); ++i) {
    const auto id = grads.entity.ids()[i];
    detail::adam_update(params.entity.row(id), grads.entity.row_at(i).transpose(), state.m_entity.row(id),
                        state.v_entity.row(id), b1, b2, step_size, bc2, eps);
  }
  for (std::size_t i = 0; i < grads.relation.size(); ++i) {
    const auto id = grads.relation.ids()[i];
    detail::adam_update(params.relation.row(id), grads.relation.row_at(i).transpose(), state.m_relation.row(id),
                        state.v_relation.row(id), b1, b2, step_size, bc2, eps);
  }
  if (params.out.size() > 0) {
    detail::adam_update(params.hidden, grads.hidden, state.m_hidden, state.v_hidden, b1, b2, step_size, bc2, eps);
    detail::adam_update(params.out, grads.out, state.m_out, state.v_out, b1, b2, step_size, bc2, eps);
    state.m_bias = b1 * state.m_bias + (S(1) - b1) * grads.bias;
    state.v_bias = b2 * state.v_bias + (S(1) - b2) * grads.bias * grads.bias;
    params.bias -= step_size * state.m_bias / (std::sqrt(state.v_bias / bc2) + eps);
  }
}

struct EpochRecord {
  std::int64_t epoch = 0;
  double loss = 0.0;  // objective per labeled triple
  std::optional<double> valid_mrr;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  ModelParams<float> params;
  ModelParams<float> best_params;  // highest validation MRR, or the final params
  std::optional<double> best_valid_mrr;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Deterministic for a given seed: parameters come from init_params(seed), and
/// shuffling, corruption and dropout use generators derived from it.
TrainResult train(const ModelSpec& spec, const TripleStore& store, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace kg
