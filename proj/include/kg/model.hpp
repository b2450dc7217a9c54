#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "kg/data.hpp"

namespace kg {

template <typename S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using RowMatrixX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ModelKind { TransE, DistMult, ComplEx, HolE, ErMlp, ErMlp2d };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::TransE,  ModelKind::DistMult, ModelKind::ComplEx,
                                               ModelKind::HolE,    ModelKind::ErMlp,    ModelKind::ErMlp2d};

std::string to_string(ModelKind kind);
/// Accepts the display names ("ER-MLP-2d") and lowercase aliases ("ermlp2d").
std::optional<ModelKind> parse_model_kind(const std::string& name);

enum class TranslationNorm { L1, L2 };

struct ModelSpec {
  ModelKind kind = ModelKind::ErMlp;
  std::int64_t dim = 100;
  std::int64_t hidden_multiplier = 10;
  TranslationNorm norm = TranslationNorm::L2;

  bool operator==(const ModelSpec&) const = default;
};

inline bool is_mlp(ModelKind kind) { return kind == ModelKind::ErMlp || kind == ModelKind::ErMlp2d; }

/// Real columns per entity row; ComplEx interleaves (re, im) per dimension.
inline std::int64_t entity_width(const ModelSpec& spec) {
  return spec.kind == ModelKind::ComplEx ? 2 * spec.dim : spec.dim;
}

inline std::int64_t relation_width(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::ComplEx:
    case ModelKind::ErMlp2d:
      return 2 * spec.dim;
    default:
      return spec.dim;
  }
}

inline std::int64_t hidden_size(const ModelSpec& spec) {
  return is_mlp(spec.kind) ? spec.hidden_multiplier * spec.dim : 0;
}

inline std::int64_t mlp_input_width(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::ErMlp:
      return 3 * spec.dim;
    case ModelKind::ErMlp2d:
      return 2 * spec.dim;
    default:
      return 0;
  }
}

/// Learnable arrays for one model. MLP members are empty for the
/// fixed-score-function kinds.
template <typename S>
struct ModelParams {
  RowMatrixX<S> entity;
  RowMatrixX<S> relation;
  RowMatrixX<S> hidden;  // H x input width
  VectorX<S> out;        // H
  S bias = S(0);

  std::int64_t num_entities() const { return entity.rows(); }
  std::int64_t num_relations() const { return relation.rows(); }

  template <typename T>
  ModelParams<T> cast() const {
    ModelParams<T> p;
    p.entity = entity.template cast<T>();
    p.relation = relation.template cast<T>();
    p.hidden = hidden.template cast<T>();
    p.out = out.template cast<T>();
    p.bias = static_cast<T>(bias);
    return p;
  }

  bool operator==(const ModelParams& o) const {
    return entity == o.entity && relation == o.relation && hidden == o.hidden && out == o.out && bias == o.bias;
  }
};

inline void check_spec(const ModelSpec& spec, std::int64_t num_entities, std::int64_t num_relations) {
  if (spec.dim < 1) throw std::invalid_argument("embedding dimension must be positive");
  if (num_entities < 1 || num_relations < 1) throw std::invalid_argument("entity and relation counts must be positive");
  if (is_mlp(spec.kind) && spec.hidden_multiplier < 1)
    throw std::invalid_argument("hidden multiplier must be positive");
}

/// Zero-filled parameters with the shapes implied by `spec`.
template <typename S>
ModelParams<S> zero_params(const ModelSpec& spec, std::int64_t num_entities, std::int64_t num_relations) {
  check_spec(spec, num_entities, num_relations);
  ModelParams<S> p;
  p.entity = RowMatrixX<S>::Zero(num_entities, entity_width(spec));
  p.relation = RowMatrixX<S>::Zero(num_relations, relation_width(spec));
  if (is_mlp(spec.kind)) {
    p.hidden = RowMatrixX<S>::Zero(hidden_size(spec), mlp_input_width(spec));
    p.out = VectorX<S>::Zero(hidden_size(spec));
  }
  return p;
}

/// Embeddings uniform on [-1, 1]; MLP weights Xavier-uniform; bias zero.
/// Draw order is entity rows, relation rows, hidden weights, output weights.
template <typename S>
ModelParams<S> init_params(const ModelSpec& spec, std::int64_t num_entities, std::int64_t num_relations,
                           std::uint64_t seed) {
  ModelParams<S> p = zero_params<S>(spec, num_entities, num_relations);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto fill = [&](auto& m, double bound) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<S>(bound * unit(rng));
  };
  fill(p.entity, 1.0);
  fill(p.relation, 1.0);
  if (is_mlp(spec.kind)) {
    const double h = static_cast<double>(hidden_size(spec));
    fill(p.hidden, std::sqrt(6.0 / (static_cast<double>(mlp_input_width(spec)) + h)));
    fill(p.out, std::sqrt(6.0 / (h + 1.0)));
  }
  return p;
}

/// Closed-form parameter count; the MLP kinds omit the scalar output bias.
std::int64_t param_count(const ModelSpec& spec, std::int64_t num_entities, std::int64_t num_relations);

/// Number of scalars actually allocated by `zero_params`/`init_params`.
std::int64_t param_census(const ModelSpec& spec, std::int64_t num_entities, std::int64_t num_relations);

template <typename S>
std::int64_t param_census(const ModelParams<S>& p) {
  const bool mlp = p.out.size() > 0;
  return p.entity.size() + p.relation.size() + p.hidden.size() + p.out.size() + (mlp ? 1 : 0);
}

}  // namespace kg
