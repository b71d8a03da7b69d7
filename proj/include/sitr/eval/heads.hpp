#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sitr/errors.hpp"
#include "sitr/ng/ops.hpp"
#include "sitr/rng.hpp"

namespace sitr::eval {

// Small named-parameter registry for downstream heads.
template <class S>
struct HeadState {
  std::vector<std::pair<std::string, ng::Tensor<S>>> params;
  std::unordered_map<std::string, int> index;

  ng::Tensor<S>& param(const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw contract_error("unknown parameter " + name);
    return params[it->second].second;
  }
  std::vector<ng::Tensor<S>> trainable() const {
    std::vector<ng::Tensor<S>> out;
    out.reserve(params.size());
    for (const auto& [n, t] : params) out.push_back(t);
    return out;
  }
};

namespace detail {

// He-scaled truncated-normal weights; biases zero.
template <class S>
void add_head_param(HeadState<S>& st, const std::string& name, ng::Dims dims,
                    std::uint64_t seed, std::int64_t fan_in) {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  std::vector<S> v(static_cast<std::size_t>(n), S(0));
  if (fan_in > 0) {
    Rng rng(Rng::mix({seed, Rng::hash_str(name)}));
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& x : v) x = static_cast<S>(rng.trunc_normal(stddev));
  }
  st.index[name] = static_cast<int>(st.params.size());
  st.params.emplace_back(
      name, ng::Tensor<S>::from_vec(std::move(dims), std::move(v),
                                    /*requires_grad=*/true));
}

template <class S>
ng::Tensor<S> conv_relu(const ng::Tensor<S>& x, HeadState<S>& st,
                        const std::string& name, int stride = 2, int k = 3,
                        int pad = 1) {
  const std::int64_t b = x.dims()[0], h = x.dims()[1], w = x.dims()[2];
  const std::int64_t ho = (h + 2 * pad - k) / stride + 1;
  const std::int64_t wo = (w + 2 * pad - k) / stride + 1;
  ng::Tensor<S> cols = ng::im2col(x, k, stride, pad);
  ng::Tensor<S> y =
      ng::add(ng::matmul(cols, st.param(name + "_w")), st.param(name + "_b"));
  const std::int64_t oc = st.param(name + "_b").dims()[0];
  return ng::relu(ng::reshape(y, {b, ho, wo, oc}));
}

template <class S>
ng::Tensor<S> global_avg_pool(const ng::Tensor<S>& x) {
  const std::int64_t b = x.dims()[0], h = x.dims()[1], w = x.dims()[2],
                     c = x.dims()[3];
  ng::Tensor<S> flat = ng::reshape(x, {b, h * w, c});
  return ng::reshape(ng::scale(ng::sum_axis(flat, 1, /*keepdim=*/false),
                               S(1) / static_cast<S>(h * w)),
                     {b, c});
}

}  // namespace detail

// Contact classifier over the frozen decoded normal map plus the class
// embedding: three stride-2 conv+relu stages (32/64/128 channels), global
// average pooling, concatenation with z, then a [256, 128, n_classes] MLP.
template <class S>
HeadState<S> init_classifier_head(int embed_dim, int n_classes,
                                  std::uint64_t seed) {
  if (n_classes < 1) throw config_error("classifier needs >= 1 class");
  HeadState<S> st;
  auto add = [&](const std::string& n, ng::Dims d, std::int64_t fan) {
    detail::add_head_param(st, n, std::move(d), seed, fan);
  };
  add("conv1_w", {3 * 3 * 3, 32}, 27);
  add("conv1_b", {32}, 0);
  add("conv2_w", {3 * 3 * 32, 64}, 288);
  add("conv2_b", {64}, 0);
  add("conv3_w", {3 * 3 * 64, 128}, 576);
  add("conv3_b", {128}, 0);
  add("fc1_w", {128 + embed_dim, 256}, 128 + embed_dim);
  add("fc1_b", {256}, 0);
  add("fc2_w", {256, 128}, 256);
  add("fc2_b", {128}, 0);
  add("fc3_w", {128, n_classes}, 128);
  add("fc3_b", {n_classes}, 0);
  return st;
}

template <class S>
ng::Tensor<S> classifier_forward(const ng::Tensor<S>& maps,
                                 const ng::Tensor<S>& z, HeadState<S>& st) {
  if (maps.rank() != 4 || maps.dims()[3] != 3)
    throw shape_error("classifier expects [B, H, W, 3] maps");
  ng::Tensor<S> x = detail::conv_relu(maps, st, "conv1");
  x = detail::conv_relu(x, st, "conv2");
  x = detail::conv_relu(x, st, "conv3");
  ng::Tensor<S> pooled = detail::global_avg_pool(x);
  ng::Tensor<S> cat =
      ng::concat(std::vector<ng::Tensor<S>>{pooled, z}, 1);
  ng::Tensor<S> h =
      ng::relu(ng::add(ng::matmul(cat, st.param("fc1_w")), st.param("fc1_b")));
  h = ng::relu(ng::add(ng::matmul(h, st.param("fc2_w")), st.param("fc2_b")));
  return ng::add(ng::matmul(h, st.param("fc3_w")), st.param("fc3_b"));
}

// Relative-pose regressor: the two frozen maps stack channel-wise (6 input
// channels); the output estimates pose(second) - pose(first) in mm.
template <class S>
HeadState<S> init_pose_head(std::uint64_t seed) {
  HeadState<S> st;
  auto add = [&](const std::string& n, ng::Dims d, std::int64_t fan) {
    detail::add_head_param(st, n, std::move(d), seed, fan);
  };
  add("conv1_w", {3 * 3 * 6, 32}, 54);
  add("conv1_b", {32}, 0);
  add("conv2_w", {3 * 3 * 32, 64}, 288);
  add("conv2_b", {64}, 0);
  add("conv3_w", {3 * 3 * 64, 128}, 576);
  add("conv3_b", {128}, 0);
  add("out_w", {128, 3}, 128);
  add("out_b", {3}, 0);
  return st;
}

template <class S>
ng::Tensor<S> pose_forward(const ng::Tensor<S>& map_pair, HeadState<S>& st) {
  if (map_pair.rank() != 4 || map_pair.dims()[3] != 6)
    throw shape_error("pose head expects [B, H, W, 6] stacked maps");
  ng::Tensor<S> x = detail::conv_relu(map_pair, st, "conv1");
  x = detail::conv_relu(x, st, "conv2");
  x = detail::conv_relu(x, st, "conv3");
  ng::Tensor<S> pooled = detail::global_avg_pool(x);
  return ng::add(ng::matmul(pooled, st.param("out_w")), st.param("out_b"));
}

// Mean cross-entropy of logits [B, n] against integer labels.
template <class S>
ng::Tensor<S> cross_entropy(const ng::Tensor<S>& logits,
                            const std::vector<int>& labels) {
  const auto& d = logits.dims();
  if (d.size() != 2) throw shape_error("cross_entropy expects [B, n] logits");
  const std::int64_t b = d[0], n = d[1];
  if (static_cast<std::int64_t>(labels.size()) != b)
    throw shape_error("label count must match the batch size");
  std::vector<S> ones(static_cast<std::size_t>(n), S(1));
  std::vector<S> onehot(static_cast<std::size_t>(b * n), S(0));
  for (std::int64_t i = 0; i < b; ++i) {
    if (labels[i] < 0 || labels[i] >= n)
      throw contract_error("label " + std::to_string(labels[i]) +
                           " out of range for " + std::to_string(n) +
                           " classes");
    onehot[i * n + labels[i]] = S(1);
  }
  ng::Tensor<S> lse = ng::lse_masked_last(
      logits, ng::Tensor<S>::from_vec({n}, std::move(ones)));
  ng::Tensor<S> picked = ng::sum_axis(
      ng::mul(logits, ng::Tensor<S>::from_vec({b, n}, std::move(onehot))), 1,
      /*keepdim=*/true);
  return ng::mean_all(ng::sub(lse, picked));
}

// Top-1 accuracy fraction; ties resolve to the lowest index.
template <class S>
double accuracy(const ng::Tensor<S>& logits, const std::vector<int>& labels) {
  const std::int64_t b = logits.dims()[0], n = logits.dims()[1];
  if (b == 0) throw contract_error("accuracy over an empty batch");
  auto v = logits.data();
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < b; ++i) {
    int best = 0;
    for (int j = 1; j < n; ++j)
      if (v[i * n + j] > v[i * n + best]) best = j;
    if (best == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(b);
}

}  // namespace sitr::eval
