#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#ifdef KG_HAVE_FFT
#include <unsupported/Eigen/FFT>
#endif

#include "kg/model.hpp"

namespace kg {

template <typename S>
using ConstVectorRef = Eigen::Ref<const VectorX<S>>;

/// [a * b]_k = sum_i a_i b_{(i + k) mod d}, evaluated directly in O(d^2).
template <typename S>
VectorX<S> circular_correlation(const ConstVectorRef<S>& a, const ConstVectorRef<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_correlation: length mismatch");
  const Eigen::Index d = a.size();
  VectorX<S> out = VectorX<S>::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    S acc = S(0);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index j = i + k < d ? i + k : i + k - d;
      acc += a[i] * b[j];
    }
    out[k] = acc;
  }
  return out;
}

#ifdef KG_HAVE_FFT
/// Same convention as `circular_correlation`, computed as ifft(conj(fft(a)) .* fft(b)).
template <typename S>
VectorX<S> circular_correlation_fft(const ConstVectorRef<S>& a, const ConstVectorRef<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_correlation_fft: length mismatch");
  const Eigen::Index d = a.size();
  // Eigen's kissfft backend crashes on length 1
  if (d == 1) return VectorX<S>::Constant(1, a[0] * b[0]);
  using CVec = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, 1>;
  // full complex spectrum: kissfft's real half-spectrum path misbehaves on odd sizes
  Eigen::FFT<S> fft;
  const CVec ac = a.template cast<std::complex<S>>();
  const CVec bc = b.template cast<std::complex<S>>();
  CVec fa, fb, res;
  fft.fwd(fa, ac);
  fft.fwd(fb, bc);
  const CVec prod = fa.conjugate().cwiseProduct(fb);
  fft.inv(res, prod);
  VectorX<S> out = res.real();
  return out;
}
#endif

namespace detail {

template <typename S>
void check_triple(const ModelParams<S>& p, const Triple& x) {
  if (x.h < 0 || x.h >= p.num_entities() || x.t < 0 || x.t >= p.num_entities())
    throw std::out_of_range("entity id out of range");
  if (x.r < 0 || x.r >= p.num_relations()) throw std::out_of_range("relation id out of range");
}

template <typename S>
void check_mask(const ModelSpec& spec, const VectorX<S>* mask) {
  if (!mask) return;
  if (!is_mlp(spec.kind)) throw std::invalid_argument("dropout mask supplied for a model without a hidden layer");
  if (mask->size() != hidden_size(spec)) throw std::invalid_argument("dropout mask length differs from hidden size");
}

/// Hidden-layer input: [h; r; t] for ER-MLP, [h; t] + r for ER-MLP-2d.
template <typename S>
VectorX<S> mlp_input(const ModelSpec& spec, const ModelParams<S>& p, const Triple& x) {
  const Eigen::Index d = spec.dim;
  VectorX<S> in(mlp_input_width(spec));
  if (spec.kind == ModelKind::ErMlp) {
    in.segment(0, d) = p.entity.row(x.h).transpose();
    in.segment(d, d) = p.relation.row(x.r).transpose();
    in.segment(2 * d, d) = p.entity.row(x.t).transpose();
  } else {
    in.segment(0, d) = p.entity.row(x.h).transpose();
    in.segment(d, d) = p.entity.row(x.t).transpose();
    in += p.relation.row(x.r).transpose();
  }
  return in;
}

template <typename S>
S complex_score(const ModelParams<S>& p, const Triple& x) {
  const auto h = p.entity.row(x.h);
  const auto r = p.relation.row(x.r);
  const auto t = p.entity.row(x.t);
  S acc = S(0);
  for (Eigen::Index i = 0; i + 1 < h.size(); i += 2) {
    const S hr = h[i], hi = h[i + 1], rr = r[i], ri = r[i + 1], tr = t[i], ti = t[i + 1];
    acc += (hr * rr - hi * ri) * tr + (hr * ri + hi * rr) * ti;
  }
  return acc;
}

}  // namespace detail

/// Triple score; higher is more plausible. `mask` is an optional inverted-dropout
/// mask on the hidden activations of the MLP kinds (training only).
template <typename S>
S score(const ModelSpec& spec, const ModelParams<S>& p, const Triple& x, const VectorX<S>* mask = nullptr) {
  detail::check_triple(p, x);
  detail::check_mask(spec, mask);
  switch (spec.kind) {
    case ModelKind::TransE: {
      const VectorX<S> v = (p.entity.row(x.h) + p.relation.row(x.r) - p.entity.row(x.t)).transpose();
      return spec.norm == TranslationNorm::L2 ? -v.norm() : -v.template lpNorm<1>();
    }
    case ModelKind::DistMult:
      return p.entity.row(x.h).cwiseProduct(p.relation.row(x.r)).dot(p.entity.row(x.t));
    case ModelKind::ComplEx:
      return detail::complex_score(p, x);
    case ModelKind::HolE: {
      const VectorX<S> h = p.entity.row(x.h).transpose();
      const VectorX<S> t = p.entity.row(x.t).transpose();
      return p.relation.row(x.r).dot(circular_correlation<S>(h, t).transpose());
    }
    case ModelKind::ErMlp:
    case ModelKind::ErMlp2d: {
      VectorX<S> z = (p.hidden * detail::mlp_input(spec, p, x)).cwiseMax(S(0));
      if (mask) z = z.cwiseProduct(*mask);
      return p.out.dot(z) + p.bias;
    }
  }
  throw std::logic_error("unhandled model kind");
}

enum class Side { head, tail };

/// Scores every entity as the replacement for one side of a query. Holds
/// per-model precomputations, so build one per (spec, params) and reuse it.
/// For the MLP kinds this caches two N_e x H projections of the entity table.
template <typename S>
class CandidateScorer {
 public:
  CandidateScorer(const ModelSpec& spec, const ModelParams<S>& params) : spec_(spec), p_(params) {
    if (is_mlp(spec.kind)) {
      const Eigen::Index d = spec.dim;
      const auto w_head = p_.hidden.leftCols(d);
      const auto w_tail = spec.kind == ModelKind::ErMlp ? p_.hidden.middleCols(2 * d, d) : p_.hidden.middleCols(d, d);
      head_proj_.noalias() = p_.entity * w_head.transpose();
      tail_proj_.noalias() = p_.entity * w_tail.transpose();
    }
  }

  /// scores[e] = f(h, r, e) when side == tail, f(e, r, t) when side == head.
  void score_all(const Triple& query, Side side, VectorX<S>& scores) const {
    detail::check_triple(p_, query);
    const Eigen::Index n = p_.num_entities();
    const auto& E = p_.entity;
    scores.resize(n);
    const bool tail = side == Side::tail;
    switch (spec_.kind) {
      case ModelKind::TransE: {
        // tail side: -||(h + r) - e||, head side: -||e - (t - r)||
        const VectorX<S> anchor = tail ? VectorX<S>((E.row(query.h) + p_.relation.row(query.r)).transpose())
                                       : VectorX<S>((E.row(query.t) - p_.relation.row(query.r)).transpose());
        for (Eigen::Index e = 0; e < n; ++e) {
          const auto diff = E.row(e).transpose() - anchor;
          scores[e] = spec_.norm == TranslationNorm::L2 ? -diff.norm() : -diff.template lpNorm<1>();
        }
        return;
      }
      case ModelKind::DistMult: {
        const VectorX<S> coef = (E.row(tail ? query.h : query.t).cwiseProduct(p_.relation.row(query.r))).transpose();
        scores.noalias() = E * coef;
        return;
      }
      case ModelKind::ComplEx: {
        const auto r = p_.relation.row(query.r);
        VectorX<S> coef(E.cols());
        if (tail) {
          const auto h = E.row(query.h);
          for (Eigen::Index i = 0; i + 1 < coef.size(); i += 2) {
            coef[i] = h[i] * r[i] - h[i + 1] * r[i + 1];
            coef[i + 1] = h[i] * r[i + 1] + h[i + 1] * r[i];
          }
        } else {
          const auto t = E.row(query.t);
          for (Eigen::Index i = 0; i + 1 < coef.size(); i += 2) {
            coef[i] = r[i] * t[i] + r[i + 1] * t[i + 1];
            coef[i + 1] = r[i] * t[i + 1] - r[i + 1] * t[i];
          }
        }
        scores.noalias() = E * coef;
        return;
      }
      case ModelKind::HolE: {
        const Eigen::Index d = spec_.dim;
        const auto r = p_.relation.row(query.r);
        VectorX<S> coef = VectorX<S>::Zero(d);
        if (tail) {
          // coefficient of t_j: sum_k r_k h_{(j - k) mod d}
          const auto h = E.row(query.h);
          for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k) coef[j] += r[k] * h[(j - k + d) % d];
        } else {
          // coefficient of h_i: sum_k r_k t_{(i + k) mod d}
          const VectorX<S> rv = r.transpose();
          const VectorX<S> tv = E.row(query.t).transpose();
          coef = circular_correlation<S>(rv, tv);
        }
        scores.noalias() = E * coef;
        return;
      }
      case ModelKind::ErMlp:
      case ModelKind::ErMlp2d: {
        const Eigen::Index d = spec_.dim;
        VectorX<S> base(p_.hidden.rows());
        const auto w_head = p_.hidden.leftCols(d);
        if (spec_.kind == ModelKind::ErMlp) {
          base.noalias() = p_.hidden.middleCols(d, d) * p_.relation.row(query.r).transpose();
          if (tail) {
            base.noalias() += head_proj_.row(query.h).transpose();
          } else {
            base.noalias() += tail_proj_.row(query.t).transpose();
          }
        } else {
          const auto w_tail = p_.hidden.middleCols(d, d);
          const auto r = p_.relation.row(query.r);
          base.noalias() = w_head * r.head(d).transpose();
          base.noalias() += w_tail * r.tail(d).transpose();
          if (tail) {
            base.noalias() += head_proj_.row(query.h).transpose();
          } else {
            base.noalias() += tail_proj_.row(query.t).transpose();
          }
        }
        const auto& proj = tail ? tail_proj_ : head_proj_;
        for (Eigen::Index e = 0; e < n; ++e) {
          scores[e] = (proj.row(e).transpose() + base).cwiseMax(S(0)).dot(p_.out) + p_.bias;
        }
        return;
      }
    }
  }

 private:
  ModelSpec spec_;
  const ModelParams<S>& p_;
  RowMatrixX<S> head_proj_;
  RowMatrixX<S> tail_proj_;
};

}  // namespace kg
