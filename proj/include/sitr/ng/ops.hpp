#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "sitr/ng/tensor.hpp"

namespace sitr::ng {

namespace detail {

// numpy-style right-aligned broadcasting.
inline Dims broadcast_dims(const Dims& a, const Dims& b) {
  std::size_t r = std::max(a.size(), b.size());
  Dims out(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    std::int64_t da = i < a.size() ? a[a.size() - 1 - i] : 1;
    std::int64_t db = i < b.size() ? b[b.size() - 1 - i] : 1;
    if (da != db && da != 1 && db != 1)
      throw shape_error("cannot broadcast " + dims_str(a) + " with " +
                        dims_str(b));
    out[r - 1 - i] = std::max(da, db);
  }
  return out;
}

inline std::vector<std::int64_t> strides_for(const Dims& dims) {
  std::vector<std::int64_t> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

// Strides of operand dims `d` viewed through broadcast result `out`;
// broadcast axes get stride 0.
inline std::vector<std::int64_t> bcast_strides(const Dims& d, const Dims& out) {
  std::vector<std::int64_t> base = strides_for(d);
  std::vector<std::int64_t> s(out.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t oi = out.size() - d.size() + i;
    s[oi] = (d[i] == 1 && out[oi] != 1) ? 0 : base[i];
  }
  return s;
}

// Walks the row-major index space of `out`, maintaining two strided offsets.
template <class F>
void for_each_pair(const Dims& out, const std::vector<std::int64_t>& sa,
                   const std::vector<std::int64_t>& sb, F&& f) {
  const int r = static_cast<int>(out.size());
  std::vector<std::int64_t> ctr(r, 0);
  std::int64_t a_off = 0, b_off = 0;
  const std::int64_t n = numel_of(out);
  for (std::int64_t i = 0; i < n; ++i) {
    f(i, a_off, b_off);
    for (int ax = r - 1; ax >= 0; --ax) {
      ++ctr[ax];
      a_off += sa[ax];
      b_off += sb[ax];
      if (ctr[ax] < out[ax]) break;
      a_off -= sa[ax] * out[ax];
      b_off -= sb[ax] * out[ax];
      ctr[ax] = 0;
    }
  }
}

template <class F>
void for_each_strided(const Dims& out, const std::vector<std::int64_t>& s,
                      std::int64_t base, F&& f) {
  static const std::vector<std::int64_t> kNone;
  std::vector<std::int64_t> zero(out.size(), 0);
  for_each_pair(out, s, zero,
                [&](std::int64_t i, std::int64_t off, std::int64_t) {
                  f(i, base + off);
                });
}

template <class S>
void record_if_needed(const Tensor<S>& out, std::function<void()> fn) {
  if (!out.requires_grad()) return;
  Tape<S>* tape = Tape<S>::active();
  if (tape) tape->record(out.node(), std::move(fn));
}

template <class S>
bool track(std::initializer_list<const Tensor<S>*> inputs) {
  if (Tape<S>::active() == nullptr) return false;
  for (const Tensor<S>* t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

// C[m,n] = or += A[m,k] * B[k,n]; i-k-j order vectorizes on the j loop.
template <class S>
void gemm(const S* a, const S* b, S* c, std::int64_t m, std::int64_t k,
          std::int64_t n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(S) * static_cast<std::size_t>(m * n));
  for (std::int64_t i = 0; i < m; ++i) {
    const S* arow = a + i * k;
    S* crow = c + i * n;
    for (std::int64_t p = 0; p < k; ++p) {
      const S av = arow[p];
      const S* brow = b + p * n;
      for (std::int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class S>
void transpose2d(const S* src, S* dst, std::int64_t rows, std::int64_t cols) {
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) dst[j * rows + i] = src[i * cols + j];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary ops with broadcasting.

template <class S, class Fwd, class Bwd>
Tensor<S> binary_op(const Tensor<S>& a, const Tensor<S>& b, Fwd fwd, Bwd bwd) {
  Dims od = detail::broadcast_dims(a.dims(), b.dims());
  bool rg = detail::track<S>({&a, &b});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  auto sa = detail::bcast_strides(a.dims(), od);
  auto sb = detail::bcast_strides(b.dims(), od);
  const S* pa = a.data().data();
  const S* pb = b.data().data();
  S* po = out.data().data();
  if (a.dims() == b.dims()) {
    const std::int64_t n = out.numel();
    for (std::int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i], pb[i]);
  } else {
    detail::for_each_pair(od, sa, sb,
                          [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
                            po[i] = fwd(pa[ia], pb[ib]);
                          });
  }
  detail::record_if_needed(out, [an = a.node(), bn = b.node(), on = out.node(),
                                 od, sa, sb, bwd]() {
    const S* g = on->grad.data();
    const S* pa = an->value.data();
    const S* pb = bn->value.data();
    bool da = an->requires_grad;
    bool db = bn->requires_grad;
    if (da) an->ensure_grad();
    if (db) bn->ensure_grad();
    detail::for_each_pair(od, sa, sb,
                          [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
                            auto [ga, gb] = bwd(pa[ia], pb[ib], g[i]);
                            if (da) an->grad[ia] += ga;
                            if (db) bn->grad[ib] += gb;
                          });
  });
  return out;
}

template <class S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b) {
  return binary_op(
      a, b, [](S x, S y) { return x + y; },
      [](S, S, S g) { return std::pair<S, S>(g, g); });
}

template <class S>
Tensor<S> sub(const Tensor<S>& a, const Tensor<S>& b) {
  return binary_op(
      a, b, [](S x, S y) { return x - y; },
      [](S, S, S g) { return std::pair<S, S>(g, -g); });
}

template <class S>
Tensor<S> mul(const Tensor<S>& a, const Tensor<S>& b) {
  return binary_op(
      a, b, [](S x, S y) { return x * y; },
      [](S x, S y, S g) { return std::pair<S, S>(g * y, g * x); });
}

template <class S>
Tensor<S> div(const Tensor<S>& a, const Tensor<S>& b) {
  return binary_op(
      a, b, [](S x, S y) { return x / y; },
      [](S x, S y, S g) {
        return std::pair<S, S>(g / y, -g * x / (y * y));
      });
}

// ---------------------------------------------------------------------------
// Elementwise unary ops.

template <class S, class Fwd, class Bwd>
Tensor<S> unary_op(const Tensor<S>& x, Fwd fwd, Bwd bwd) {
  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(x.dims(), rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  const std::int64_t n = x.numel();
  for (std::int64_t i = 0; i < n; ++i) po[i] = fwd(px[i]);
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), bwd]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    const S* px = xn->value.data();
    const S* po = on->value.data();
    const std::int64_t n = xn->numel();
    for (std::int64_t i = 0; i < n; ++i) xn->grad[i] += bwd(px[i], po[i], g[i]);
  });
  return out;
}

template <class S>
Tensor<S> scale(const Tensor<S>& x, S c) {
  return unary_op(
      x, [c](S v) { return v * c; }, [c](S, S, S g) { return g * c; });
}

template <class S>
Tensor<S> add_scalar(const Tensor<S>& x, S c) {
  return unary_op(
      x, [c](S v) { return v + c; }, [](S, S, S g) { return g; });
}

template <class S>
Tensor<S> neg(const Tensor<S>& x) {
  return scale(x, S(-1));
}

template <class S>
Tensor<S> relu(const Tensor<S>& x) {
  return unary_op(
      x, [](S v) { return v > S(0) ? v : S(0); },
      [](S v, S, S g) { return v > S(0) ? g : S(0); });
}

// Exact gaussian GELU: x * Phi(x).
template <class S>
Tensor<S> gelu(const Tensor<S>& x) {
  const S inv_sqrt2 = S(0.7071067811865475244);
  const S inv_sqrt2pi = S(0.3989422804014326779);
  return unary_op(
      x,
      [=](S v) {
        return S(0.5) * v * (S(1) + std::erf(v * inv_sqrt2));
      },
      [=](S v, S, S g) {
        S phi = S(0.5) * (S(1) + std::erf(v * inv_sqrt2));
        S pdf = inv_sqrt2pi * std::exp(S(-0.5) * v * v);
        return g * (phi + v * pdf);
      });
}

template <class S>
Tensor<S> exp_t(const Tensor<S>& x) {
  return unary_op(
      x, [](S v) { return std::exp(v); },
      [](S, S o, S g) { return g * o; });
}

template <class S>
Tensor<S> log_t(const Tensor<S>& x) {
  for (S v : x.data())
    if (!(v > S(0)))
      throw numeric_error("log requires strictly positive input, got " +
                          std::to_string(static_cast<double>(v)));
  return unary_op(
      x, [](S v) { return std::log(v); },
      [](S v, S, S g) { return g / v; });
}

template <class S>
Tensor<S> sqrt_t(const Tensor<S>& x) {
  for (S v : x.data())
    if (v < S(0))
      throw numeric_error("sqrt requires non-negative input, got " +
                          std::to_string(static_cast<double>(v)));
  return unary_op(
      x, [](S v) { return std::sqrt(v); },
      [](S, S o, S g) { return o > S(0) ? g / (S(2) * o) : S(0); });
}

// ---------------------------------------------------------------------------
// Matrix multiply with broadcast over leading batch dims.
// a: [*batch_a, m, k], b: [*batch_b, k, n] -> [*batch, m, n].

template <class S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.rank() < 2 || b.rank() < 2)
    throw shape_error("matmul needs rank >= 2, got " + dims_str(a.dims()) +
                      " and " + dims_str(b.dims()));
  const std::int64_t m = a.dim(a.rank() - 2);
  const std::int64_t k = a.dim(a.rank() - 1);
  const std::int64_t k2 = b.dim(b.rank() - 2);
  const std::int64_t n = b.dim(b.rank() - 1);
  if (k != k2)
    throw shape_error("matmul inner dims disagree: " + dims_str(a.dims()) +
                      " vs " + dims_str(b.dims()));
  Dims ba(a.dims().begin(), a.dims().end() - 2);
  Dims bb(b.dims().begin(), b.dims().end() - 2);
  Dims bd = detail::broadcast_dims(ba, bb);
  Dims od = bd;
  od.push_back(m);
  od.push_back(n);

  bool rg = detail::track<S>({&a, &b});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  auto sa = detail::bcast_strides(ba, bd);  // strides in matrix units
  auto sb = detail::bcast_strides(bb, bd);
  const S* pa = a.data().data();
  const S* pb = b.data().data();
  S* po = out.data().data();
  detail::for_each_pair(bd, sa, sb,
                        [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
                          detail::gemm(pa + ia * m * k, pb + ib * k * n,
                                       po + i * m * n, m, k, n, false);
                        });

  detail::record_if_needed(out, [an = a.node(), bn = b.node(), on = out.node(),
                                 bd, sa, sb, m, k, n]() {
    const S* pa = an->value.data();
    const S* pb = bn->value.data();
    const S* g = on->grad.data();
    bool da = an->requires_grad;
    bool db = bn->requires_grad;
    if (da) an->ensure_grad();
    if (db) bn->ensure_grad();
    std::vector<S> bt(static_cast<std::size_t>(k * n));
    std::vector<S> at(static_cast<std::size_t>(m * k));
    detail::for_each_pair(
        bd, sa, sb, [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
          const S* gc = g + i * m * n;
          if (da) {
            detail::transpose2d(pb + ib * k * n, bt.data(), k, n);
            detail::gemm(gc, bt.data(), an->grad.data() + ia * m * k, m, n, k,
                         true);
          }
          if (db) {
            detail::transpose2d(pa + ia * m * k, at.data(), m, k);
            detail::gemm(at.data(), gc, bn->grad.data() + ib * k * n, k, m, n,
                         true);
          }
        });
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reductions.

template <class S>
Tensor<S> sum_all(const Tensor<S>& x) {
  bool rg = detail::track<S>({&x});
  S acc = 0;
  for (S v : x.data()) acc += v;
  Tensor<S> out = Tensor<S>::from_vec({1}, {acc}, rg);
  detail::record_if_needed(out, [xn = x.node(), on = out.node()]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S g = on->grad[0];
    for (S& gi : xn->grad) gi += g;
  });
  return out;
}

template <class S>
Tensor<S> mean_all(const Tensor<S>& x) {
  bool rg = detail::track<S>({&x});
  S acc = 0;
  for (S v : x.data()) acc += v;
  const S inv = S(1) / static_cast<S>(x.numel());
  Tensor<S> out = Tensor<S>::from_vec({1}, {acc * inv}, rg);
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), inv]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S g = on->grad[0] * inv;
    for (S& gi : xn->grad) gi += g;
  });
  return out;
}

namespace detail {
inline int normalize_axis(int axis, int rank) {
  int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank)
    throw shape_error("axis " + std::to_string(axis) + " out of range for rank " +
                      std::to_string(rank));
  return a;
}
}  // namespace detail

template <class S>
Tensor<S> sum_axis(const Tensor<S>& x, int axis, bool keepdim = false) {
  const int ax = detail::normalize_axis(axis, x.rank());
  const Dims& xd = x.dims();
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < ax; ++i) outer *= xd[i];
  for (int i = ax + 1; i < x.rank(); ++i) inner *= xd[i];
  const std::int64_t len = xd[ax];

  Dims od;
  for (int i = 0; i < x.rank(); ++i) {
    if (i == ax) {
      if (keepdim) od.push_back(1);
    } else {
      od.push_back(xd[i]);
    }
  }
  if (od.empty()) od.push_back(1);

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t j = 0; j < len; ++j) {
      const S* row = px + (o * len + j) * inner;
      S* orow = po + o * inner;
      for (std::int64_t i = 0; i < inner; ++i) orow[i] += row[i];
    }
  detail::record_if_needed(out,
                           [xn = x.node(), on = out.node(), outer, len, inner]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t j = 0; j < len; ++j) {
        S* row = xn->grad.data() + (o * len + j) * inner;
        const S* grow = g + o * inner;
        for (std::int64_t i = 0; i < inner; ++i) row[i] += grow[i];
      }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Softmax over an axis, max-subtracted for stability.

template <class S>
Tensor<S> softmax(const Tensor<S>& x, int axis) {
  const int ax = detail::normalize_axis(axis, x.rank());
  const Dims& xd = x.dims();
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < ax; ++i) outer *= xd[i];
  for (int i = ax + 1; i < x.rank(); ++i) inner *= xd[i];
  const std::int64_t len = xd[ax];

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(xd, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t i = 0; i < inner; ++i) {
      const std::int64_t base = o * len * inner + i;
      S mx = px[base];
      for (std::int64_t j = 1; j < len; ++j)
        mx = std::max(mx, px[base + j * inner]);
      S denom = 0;
      for (std::int64_t j = 0; j < len; ++j) {
        S e = std::exp(px[base + j * inner] - mx);
        po[base + j * inner] = e;
        denom += e;
      }
      const S inv = S(1) / denom;
      for (std::int64_t j = 0; j < len; ++j) po[base + j * inner] *= inv;
    }
  detail::record_if_needed(out,
                           [xn = x.node(), on = out.node(), outer, len, inner]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* y = on->value.data();
    const S* g = on->grad.data();
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t i = 0; i < inner; ++i) {
        const std::int64_t base = o * len * inner + i;
        S dot = 0;
        for (std::int64_t j = 0; j < len; ++j)
          dot += g[base + j * inner] * y[base + j * inner];
        for (std::int64_t j = 0; j < len; ++j) {
          const std::int64_t p = base + j * inner;
          xn->grad[p] += y[p] * (g[p] - dot);
        }
      }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Layer normalization over the last axis with learnable gamma/beta.
// A constant row (zero variance) normalizes to zeros, so the output is beta.

template <class S>
Tensor<S> layernorm(const Tensor<S>& x, const Tensor<S>& gamma,
                    const Tensor<S>& beta, S eps = S(1e-5)) {
  const std::int64_t d = x.dim(x.rank() - 1);
  if (gamma.rank() != 1 || gamma.dim(0) != d || beta.rank() != 1 ||
      beta.dim(0) != d)
    throw shape_error("layernorm gamma/beta must be [" + std::to_string(d) +
                      "], got " + dims_str(gamma.dims()) + " and " +
                      dims_str(beta.dims()));
  const std::int64_t rows = x.numel() / d;
  bool rg = detail::track<S>({&x, &gamma, &beta});
  Tensor<S> out = Tensor<S>::zeros(x.dims(), rg);

  std::vector<S> xhat(static_cast<std::size_t>(x.numel()));
  std::vector<S> invstd(static_cast<std::size_t>(rows));
  const S* px = x.data().data();
  const S* pg = gamma.data().data();
  const S* pb = beta.data().data();
  S* po = out.data().data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const S* row = px + r * d;
    S mean = 0;
    for (std::int64_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<S>(d);
    S var = 0;
    for (std::int64_t j = 0; j < d; ++j) {
      S c = row[j] - mean;
      var += c * c;
    }
    var /= static_cast<S>(d);
    const S is = S(1) / std::sqrt(var + eps);
    invstd[static_cast<std::size_t>(r)] = is;
    for (std::int64_t j = 0; j < d; ++j) {
      S xh = (row[j] - mean) * is;
      xhat[static_cast<std::size_t>(r * d + j)] = xh;
      po[r * d + j] = xh * pg[j] + pb[j];
    }
  }
  detail::record_if_needed(out, [xn = x.node(), gn = gamma.node(),
                                 bn = beta.node(), on = out.node(),
                                 xhat = std::move(xhat),
                                 invstd = std::move(invstd), rows, d]() {
    const S* g = on->grad.data();
    const S* pg = gn->value.data();
    bool dx = xn->requires_grad;
    bool dg = gn->requires_grad;
    bool db = bn->requires_grad;
    if (dx) xn->ensure_grad();
    if (dg) gn->ensure_grad();
    if (db) bn->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r) {
      const S* grow = g + r * d;
      const S* xh = xhat.data() + r * d;
      if (dg || db) {
        for (std::int64_t j = 0; j < d; ++j) {
          if (dg) gn->grad[j] += grow[j] * xh[j];
          if (db) bn->grad[j] += grow[j];
        }
      }
      if (dx) {
        S sum_gy = 0, sum_gyx = 0;
        for (std::int64_t j = 0; j < d; ++j) {
          S gy = grow[j] * pg[j];
          sum_gy += gy;
          sum_gyx += gy * xh[j];
        }
        const S inv_d = S(1) / static_cast<S>(d);
        const S is = invstd[static_cast<std::size_t>(r)];
        for (std::int64_t j = 0; j < d; ++j) {
          S gy = grow[j] * pg[j];
          xn->grad[r * d + j] +=
              is * (gy - inv_d * sum_gy - xh[j] * inv_d * sum_gyx);
        }
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Masked log-sum-exp over the last axis. `mask` holds 0/1 weights (constant,
// never differentiated) and broadcasts from [n] or matches x exactly.
// Output keeps the last axis with extent 1.

template <class S>
Tensor<S> lse_masked_last(const Tensor<S>& x, const Tensor<S>& mask) {
  const std::int64_t n = x.dim(x.rank() - 1);
  const bool mask_is_row = mask.rank() == 1 && mask.dim(0) == n;
  if (!mask_is_row && mask.dims() != x.dims())
    throw shape_error("mask dims " + dims_str(mask.dims()) +
                      " incompatible with " + dims_str(x.dims()));
  const std::int64_t rows = x.numel() / n;
  Dims od = x.dims();
  od.back() = 1;

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  const S* px = x.data().data();
  const S* pm = mask.data().data();
  S* po = out.data().data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const S* row = px + r * n;
    const S* mrow = mask_is_row ? pm : pm + r * n;
    S mx = 0;
    bool any = false;
    for (std::int64_t j = 0; j < n; ++j) {
      if (mrow[j] == S(0)) continue;
      if (!any || row[j] > mx) mx = row[j];
      any = true;
    }
    if (!any)
      throw contract_error("masked log-sum-exp over an empty row " +
                           std::to_string(r));
    S acc = 0;
    for (std::int64_t j = 0; j < n; ++j)
      if (mrow[j] != S(0)) acc += std::exp(row[j] - mx);
    po[r] = mx + std::log(acc);
  }
  detail::record_if_needed(out, [xn = x.node(), mn = mask.node(),
                                 on = out.node(), rows, n, mask_is_row]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* px = xn->value.data();
    const S* pm = mn->value.data();
    const S* lse = on->value.data();
    const S* g = on->grad.data();
    for (std::int64_t r = 0; r < rows; ++r) {
      const S* mrow = mask_is_row ? pm : pm + r * n;
      for (std::int64_t j = 0; j < n; ++j) {
        if (mrow[j] == S(0)) continue;
        xn->grad[r * n + j] += g[r] * std::exp(px[r * n + j] - lse[r]);
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Shape ops.

template <class S>
Tensor<S> reshape(const Tensor<S>& x, Dims dims) {
  if (numel_of(dims) != x.numel())
    throw shape_error("reshape " + dims_str(x.dims()) + " -> " + dims_str(dims) +
                      " changes element count");
  bool rg = detail::track<S>({&x});
  Tensor<S> out =
      Tensor<S>::from_vec(std::move(dims), {x.data().begin(), x.data().end()}, rg);
  detail::record_if_needed(out, [xn = x.node(), on = out.node()]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const std::int64_t n = xn->numel();
    for (std::int64_t i = 0; i < n; ++i) xn->grad[i] += on->grad[i];
  });
  return out;
}

template <class S>
Tensor<S> permute(const Tensor<S>& x, const std::vector<int>& perm) {
  const int r = x.rank();
  if (static_cast<int>(perm.size()) != r)
    throw shape_error("permute order size " + std::to_string(perm.size()) +
                      " does not match rank " + std::to_string(r));
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  Dims od(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    if (perm[i] < 0 || perm[i] >= r || seen[perm[i]])
      throw shape_error("invalid permutation");
    seen[perm[i]] = true;
    od[i] = x.dim(perm[i]);
  }
  auto xs = detail::strides_for(x.dims());
  std::vector<std::int64_t> s(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) s[i] = xs[perm[i]];

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  detail::for_each_strided(od, s, 0, [&](std::int64_t i, std::int64_t ix) {
    po[i] = px[ix];
  });
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), od, s]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    detail::for_each_strided(od, s, 0, [&](std::int64_t i, std::int64_t ix) {
      xn->grad[ix] += g[i];
    });
  });
  return out;
}

template <class S>
Tensor<S> slice(const Tensor<S>& x, int axis, std::int64_t start,
                std::int64_t len) {
  const int ax = detail::normalize_axis(axis, x.rank());
  if (start < 0 || len <= 0 || start + len > x.dim(ax))
    throw shape_error("slice [" + std::to_string(start) + ", " +
                      std::to_string(start + len) + ") out of range for axis " +
                      std::to_string(ax) + " of " + dims_str(x.dims()));
  Dims od = x.dims();
  od[ax] = len;
  auto xs = detail::strides_for(x.dims());
  const std::int64_t base = start * xs[ax];

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros(od, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  detail::for_each_strided(od, xs, base, [&](std::int64_t i, std::int64_t ix) {
    po[i] = px[ix];
  });
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), od, xs, base]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    detail::for_each_strided(od, xs, base, [&](std::int64_t i, std::int64_t ix) {
      xn->grad[ix] += g[i];
    });
  });
  return out;
}

template <class S>
Tensor<S> concat(const std::vector<Tensor<S>>& parts, int axis) {
  if (parts.empty()) throw shape_error("concat of zero tensors");
  const int ax = detail::normalize_axis(axis, parts[0].rank());
  Dims od = parts[0].dims();
  std::int64_t total = 0;
  for (const auto& p : parts) {
    if (p.rank() != parts[0].rank())
      throw shape_error("concat rank mismatch");
    for (int i = 0; i < p.rank(); ++i)
      if (i != ax && p.dim(i) != od[i])
        throw shape_error("concat dims mismatch: " + dims_str(p.dims()) +
                          " vs " + dims_str(od));
    total += p.dim(ax);
  }
  od[ax] = total;

  bool rg = false;
  for (const auto& p : parts) rg = rg || detail::track<S>({&p});
  Tensor<S> out = Tensor<S>::zeros(od, rg);

  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < ax; ++i) outer *= od[i];
  for (int i = ax + 1; i < static_cast<int>(od.size()); ++i) inner *= od[i];

  S* po = out.data().data();
  std::int64_t offset = 0;
  std::vector<std::int64_t> offsets;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    const std::int64_t len = p.dim(ax);
    const S* pp = p.data().data();
    for (std::int64_t o = 0; o < outer; ++o)
      std::memcpy(po + (o * total + offset) * inner, pp + o * len * inner,
                  sizeof(S) * static_cast<std::size_t>(len * inner));
    offset += len;
  }
  if (rg) {
    std::vector<std::shared_ptr<Node<S>>> nodes;
    for (const auto& p : parts) nodes.push_back(p.node());
    detail::record_if_needed(out, [nodes, offsets, on = out.node(), outer,
                                   inner, total, ax]() {
      const S* g = on->grad.data();
      for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
        auto& n = nodes[pi];
        if (!n->requires_grad) continue;
        n->ensure_grad();
        const std::int64_t len = n->dims[static_cast<std::size_t>(ax)];
        for (std::int64_t o = 0; o < outer; ++o) {
          const S* gsrc = g + (o * total + offsets[pi]) * inner;
          S* gdst = n->grad.data() + o * len * inner;
          for (std::int64_t i = 0; i < len * inner; ++i) gdst[i] += gsrc[i];
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch <-> token layout. Images are [B, H, W, C]; tokens enumerate patches
// row-major over the patch grid, and each token stores its patch row-major
// as (py, px, c).

template <class S>
Tensor<S> patchify(const Tensor<S>& x, int patch) {
  if (x.rank() != 4)
    throw shape_error("patchify expects [B, H, W, C], got " + dims_str(x.dims()));
  const std::int64_t b = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  if (patch <= 0 || h % patch != 0 || w % patch != 0)
    throw shape_error("patch size " + std::to_string(patch) +
                      " does not divide " + dims_str(x.dims()));
  const std::int64_t gh = h / patch, gw = w / patch;
  const std::int64_t tokens = gh * gw, td = static_cast<std::int64_t>(patch) * patch * c;

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros({b, tokens, td}, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  for (std::int64_t bi = 0; bi < b; ++bi)
    for (std::int64_t gy = 0; gy < gh; ++gy)
      for (std::int64_t gx = 0; gx < gw; ++gx)
        for (std::int64_t py = 0; py < patch; ++py) {
          const S* src =
              px + ((bi * h + gy * patch + py) * w + gx * patch) * c;
          S* dst = po + (bi * tokens + gy * gw + gx) * td + py * patch * c;
          std::memcpy(dst, src, sizeof(S) * static_cast<std::size_t>(patch * c));
        }
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), b, h, w, c,
                                 patch, gh, gw, tokens, td]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    for (std::int64_t bi = 0; bi < b; ++bi)
      for (std::int64_t gy = 0; gy < gh; ++gy)
        for (std::int64_t gx = 0; gx < gw; ++gx)
          for (std::int64_t py = 0; py < patch; ++py) {
            S* dst = xn->grad.data() +
                     ((bi * h + gy * patch + py) * w + gx * patch) * c;
            const S* src =
                g + (bi * tokens + gy * gw + gx) * td + py * patch * c;
            for (std::int64_t i = 0; i < patch * c; ++i) dst[i] += src[i];
          }
  });
  return out;
}

template <class S>
Tensor<S> unpatchify(const Tensor<S>& x, int patch, std::int64_t h,
                     std::int64_t w, std::int64_t c) {
  if (x.rank() != 3)
    throw shape_error("unpatchify expects [B, N, P*P*C], got " +
                      dims_str(x.dims()));
  const std::int64_t b = x.dim(0), tokens = x.dim(1), td = x.dim(2);
  const std::int64_t gh = h / patch, gw = w / patch;
  if (h % patch != 0 || w % patch != 0 || tokens != gh * gw ||
      td != static_cast<std::int64_t>(patch) * patch * c)
    throw shape_error("unpatchify geometry mismatch for " + dims_str(x.dims()));

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros({b, h, w, c}, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  for (std::int64_t bi = 0; bi < b; ++bi)
    for (std::int64_t gy = 0; gy < gh; ++gy)
      for (std::int64_t gx = 0; gx < gw; ++gx)
        for (std::int64_t py = 0; py < patch; ++py) {
          const S* src =
              px + (bi * tokens + gy * gw + gx) * td + py * patch * c;
          S* dst = po + ((bi * h + gy * patch + py) * w + gx * patch) * c;
          std::memcpy(dst, src, sizeof(S) * static_cast<std::size_t>(patch * c));
        }
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), b, h, w, c,
                                 patch, gh, gw, tokens, td]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    for (std::int64_t bi = 0; bi < b; ++bi)
      for (std::int64_t gy = 0; gy < gh; ++gy)
        for (std::int64_t gx = 0; gx < gw; ++gx)
          for (std::int64_t py = 0; py < patch; ++py) {
            S* dst = xn->grad.data() +
                     (bi * tokens + gy * gw + gx) * td + py * patch * c;
            const S* src =
                g + ((bi * h + gy * patch + py) * w + gx * patch) * c;
            for (std::int64_t i = 0; i < patch * c; ++i) dst[i] += src[i];
          }
  });
  return out;
}

// ---------------------------------------------------------------------------
// im2col for stride-s, zero-padded convolutions on [B, H, W, C] images.
// Output: [B, Ho*Wo, k*k*C] with (ky, kx, c) row-major inside a column.

template <class S>
Tensor<S> im2col(const Tensor<S>& x, int ksize, int stride, int pad) {
  if (x.rank() != 4)
    throw shape_error("im2col expects [B, H, W, C], got " + dims_str(x.dims()));
  const std::int64_t b = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  const std::int64_t ho = (h + 2 * pad - ksize) / stride + 1;
  const std::int64_t wo = (w + 2 * pad - ksize) / stride + 1;
  if (ho <= 0 || wo <= 0)
    throw shape_error("im2col produces empty output for " + dims_str(x.dims()));
  const std::int64_t cols = static_cast<std::int64_t>(ksize) * ksize * c;

  bool rg = detail::track<S>({&x});
  Tensor<S> out = Tensor<S>::zeros({b, ho * wo, cols}, rg);
  const S* px = x.data().data();
  S* po = out.data().data();
  for (std::int64_t bi = 0; bi < b; ++bi)
    for (std::int64_t oy = 0; oy < ho; ++oy)
      for (std::int64_t ox = 0; ox < wo; ++ox) {
        S* dst = po + (bi * ho * wo + oy * wo + ox) * cols;
        for (int ky = 0; ky < ksize; ++ky) {
          const std::int64_t iy = oy * stride + ky - pad;
          for (int kx = 0; kx < ksize; ++kx) {
            const std::int64_t ix = ox * stride + kx - pad;
            S* cell = dst + (static_cast<std::int64_t>(ky) * ksize + kx) * c;
            if (iy >= 0 && iy < h && ix >= 0 && ix < w)
              std::memcpy(cell, px + ((bi * h + iy) * w + ix) * c,
                          sizeof(S) * static_cast<std::size_t>(c));
          }
        }
      }
  detail::record_if_needed(out, [xn = x.node(), on = out.node(), b, h, w, c,
                                 ho, wo, ksize, stride, pad, cols]() {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    const S* g = on->grad.data();
    for (std::int64_t bi = 0; bi < b; ++bi)
      for (std::int64_t oy = 0; oy < ho; ++oy)
        for (std::int64_t ox = 0; ox < wo; ++ox) {
          const S* src = g + (bi * ho * wo + oy * wo + ox) * cols;
          for (int ky = 0; ky < ksize; ++ky) {
            const std::int64_t iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < ksize; ++kx) {
              const std::int64_t ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= w) continue;
              const S* cell =
                  src + (static_cast<std::int64_t>(ky) * ksize + kx) * c;
              S* dst = xn->grad.data() + ((bi * h + iy) * w + ix) * c;
              for (std::int64_t i = 0; i < c; ++i) dst[i] += cell[i];
            }
          }
        }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Misc helpers.

template <class S>
void check_finite(const Tensor<S>& x, const std::string& context) {
  for (S v : x.data())
    if (!std::isfinite(static_cast<double>(v)))
      throw numeric_error("non-finite value in " + context);
}

// Stops gradient flow: value copy that never records.
template <class S>
Tensor<S> detach(const Tensor<S>& x) {
  return Tensor<S>::from_vec(x.dims(), {x.data().begin(), x.data().end()}, false);
}

}  // namespace sitr::ng
