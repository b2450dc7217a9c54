#pragma once

#include <unordered_map>
#include <vector>

#include "kg/score.hpp"

namespace kg {

/// Gradient rows for a subset of an embedding table, in first-touch order.
template <typename S>
class SparseRows {
 public:
  SparseRows() = default;
  explicit SparseRows(Eigen::Index width) : width_(width) {}

  Eigen::Index width() const { return width_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::int32_t>& ids() const { return ids_; }
  const VectorX<S>& row_at(std::size_t slot) const { return rows_[slot]; }

  /// Gradient row for `id`, zero-initialized on first access.
  VectorX<S>& row(std::int32_t id) {
    auto [it, inserted] = slot_.try_emplace(id, ids_.size());
    if (inserted) {
      ids_.push_back(id);
      rows_.push_back(VectorX<S>::Zero(width_));
    }
    return rows_[it->second];
  }

  const VectorX<S>* find(std::int32_t id) const {
    const auto it = slot_.find(id);
    return it == slot_.end() ? nullptr : &rows_[it->second];
  }

 private:
  Eigen::Index width_ = 0;
  std::vector<std::int32_t> ids_;
  std::vector<VectorX<S>> rows_;
  std::unordered_map<std::int32_t, std::size_t> slot_;
};

/// Sparse gradient set: touched embedding rows plus dense MLP weights.
template <typename S>
struct GradientSet {
  SparseRows<S> entity;
  SparseRows<S> relation;
  RowMatrixX<S> hidden;
  VectorX<S> out;
  S bias = S(0);

  static GradientSet zeros_like(const ModelSpec& spec, const ModelParams<S>& p) {
    GradientSet g;
    g.entity = SparseRows<S>(p.entity.cols());
    g.relation = SparseRows<S>(p.relation.cols());
    if (is_mlp(spec.kind)) {
      g.hidden = RowMatrixX<S>::Zero(p.hidden.rows(), p.hidden.cols());
      g.out = VectorX<S>::Zero(p.out.size());
    }
    return g;
  }
};

/// Evaluates f(x), then adds upstream(f) * df/dtheta into `g`. Returns f.
template <typename S, typename Upstream>
S score_and_accumulate(const ModelSpec& spec, const ModelParams<S>& p, const Triple& x, const VectorX<S>* mask,
                       Upstream&& upstream_of_score, GradientSet<S>& g) {
  detail::check_triple(p, x);
  detail::check_mask(spec, mask);
  const auto h = p.entity.row(x.h);
  const auto r = p.relation.row(x.r);
  const auto t = p.entity.row(x.t);

  switch (spec.kind) {
    case ModelKind::TransE: {
      const VectorX<S> v = (h + r - t).transpose();
      VectorX<S> dv;
      S f;
      if (spec.norm == TranslationNorm::L2) {
        // gradient of -sqrt(|v|^2 + eps^2) stays finite at v = 0
        const S eps = S(1e-12);
        const S n = std::sqrt(v.squaredNorm() + eps * eps);
        f = -v.norm();
        dv = -v / n;
      } else {
        f = -v.template lpNorm<1>();
        dv = -v.unaryExpr([](S a) { return S((a > 0) - (a < 0)); });
      }
      const S up = upstream_of_score(f);
      g.entity.row(x.h) += up * dv;
      g.relation.row(x.r) += up * dv;
      g.entity.row(x.t) -= up * dv;
      return f;
    }
    case ModelKind::DistMult: {
      const S f = h.cwiseProduct(r).dot(t);
      const S up = upstream_of_score(f);
      g.entity.row(x.h) += up * r.cwiseProduct(t).transpose();
      g.relation.row(x.r) += up * h.cwiseProduct(t).transpose();
      g.entity.row(x.t) += up * h.cwiseProduct(r).transpose();
      return f;
    }
    case ModelKind::ComplEx: {
      const S f = detail::complex_score(p, x);
      const S up = upstream_of_score(f);
      const Eigen::Index w = h.size();
      VectorX<S> dh(w), dr(w), dt(w);
      for (Eigen::Index i = 0; i + 1 < w; i += 2) {
        const S hr = h[i], hi = h[i + 1], rr = r[i], ri = r[i + 1], tr = t[i], ti = t[i + 1];
        dh[i] = rr * tr + ri * ti;
        dh[i + 1] = rr * ti - ri * tr;
        dr[i] = hr * tr + hi * ti;
        dr[i + 1] = hr * ti - hi * tr;
        dt[i] = hr * rr - hi * ri;
        dt[i + 1] = hr * ri + hi * rr;
      }
      g.entity.row(x.h) += up * dh;
      g.relation.row(x.r) += up * dr;
      g.entity.row(x.t) += up * dt;
      return f;
    }
    case ModelKind::HolE: {
      const Eigen::Index d = spec.dim;
      const VectorX<S> hv = h.transpose();
      const VectorX<S> rv = r.transpose();
      const VectorX<S> tv = t.transpose();
      const VectorX<S> corr = circular_correlation<S>(hv, tv);
      const S f = rv.dot(corr);
      const S up = upstream_of_score(f);
      // d/dh_i = sum_k r_k t_{i+k};  d/dt_j = sum_k r_k h_{j-k}
      const VectorX<S> dh = circular_correlation<S>(rv, tv);
      VectorX<S> dt = VectorX<S>::Zero(d);
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) dt[j] += rv[k] * hv[(j - k + d) % d];
      g.entity.row(x.h) += up * dh;
      g.relation.row(x.r) += up * corr;
      g.entity.row(x.t) += up * dt;
      return f;
    }
    case ModelKind::ErMlp:
    case ModelKind::ErMlp2d: {
      const Eigen::Index d = spec.dim;
      const VectorX<S> in = detail::mlp_input(spec, p, x);
      const VectorX<S> pre = p.hidden * in;
      VectorX<S> z = pre.cwiseMax(S(0));
      if (mask) z = z.cwiseProduct(*mask);
      const S f = p.out.dot(z) + p.bias;
      const S up = upstream_of_score(f);

      VectorX<S> dpre = (pre.array() > S(0)).select(p.out, S(0));
      if (mask) dpre = dpre.cwiseProduct(*mask);
      dpre *= up;
      g.out += up * z;
      g.bias += up;
      g.hidden.noalias() += dpre * in.transpose();
      const VectorX<S> din = p.hidden.transpose() * dpre;
      if (spec.kind == ModelKind::ErMlp) {
        g.entity.row(x.h) += din.segment(0, d);
        g.relation.row(x.r) += din.segment(d, d);
        g.entity.row(x.t) += din.segment(2 * d, d);
      } else {
        g.entity.row(x.h) += din.segment(0, d);
        g.entity.row(x.t) += din.segment(d, d);
        g.relation.row(x.r) += din;
      }
      return f;
    }
  }
  throw std::logic_error("unhandled model kind");
}

/// upstream * d score / d theta for the parameters one triple touches.
template <typename S>
GradientSet<S> score_gradients(const ModelSpec& spec, const ModelParams<S>& p, const Triple& x, S upstream,
                               const VectorX<S>* mask = nullptr) {
  GradientSet<S> g = GradientSet<S>::zeros_like(spec, p);
  score_and_accumulate(spec, p, x, mask, [upstream](S) { return upstream; }, g);
  return g;
}

}  // namespace kg
