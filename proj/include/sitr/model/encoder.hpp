#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sitr/errors.hpp"
#include "sitr/image.hpp"
#include "sitr/ng/ops.hpp"
#include "sitr/rng.hpp"

namespace sitr::model {

// Architecture of the calibration-conditioned tactile encoder.
struct EncoderConfig {
  int image_size = 224;
  int patch_size = 16;
  int embed_dim = 768;
  int depth = 12;
  int num_heads = 12;
  int calib_count = 18;  // K
  static constexpr int kChannels = 3;
  static constexpr int kEmbedOut = 128;

  int grid() const { return image_size / patch_size; }
  int n_tokens() const { return grid() * grid(); }  // per stream
  int seq_len() const {
    return 1 + n_tokens() + (calib_count > 0 ? n_tokens() : 0);
  }

  void validate() const;
  std::string to_json() const;
  static EncoderConfig from_json(const std::string& text);

  // Small configuration that exercises the same code path quickly.
  static EncoderConfig desk(int calib_count = 18) {
    EncoderConfig c;
    c.image_size = 64;
    c.patch_size = 8;
    c.embed_dim = 128;
    c.depth = 4;
    c.num_heads = 4;
    c.calib_count = calib_count;
    return c;
  }
};

// Fixed 2D sin-cos positional table, [N, embed_dim] row-major: for each grid
// cell, D/4 sin + D/4 cos of the x coordinate, then the same for y.
std::vector<double> build_pos_table(const EncoderConfig& cfg);

// Channel-concatenation of K calibration slices in descriptor order.
Image stack_calibration(const std::vector<Image>& slices);

// All learned tensors of the encoder, in a fixed named order so that
// optimizers, checkpoints, and parameter checksums agree.
template <class S>
struct EncoderState {
  EncoderConfig cfg;
  std::vector<std::pair<std::string, ng::Tensor<S>>> params;
  std::unordered_map<std::string, int> index;
  ng::Tensor<S> pos;  // fixed, not trained, rebuilt from cfg

  ng::Tensor<S>& param(const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw contract_error("unknown parameter " + name);
    return params[it->second].second;
  }
  const ng::Tensor<S>& param(const std::string& name) const {
    return const_cast<EncoderState*>(this)->param(name);
  }

  std::vector<ng::Tensor<S>> trainable() const {
    std::vector<ng::Tensor<S>> out;
    out.reserve(params.size());
    for (const auto& [name, t] : params) out.push_back(t);
    return out;
  }

  std::int64_t num_params() const {
    std::int64_t n = 0;
    for (const auto& [name, t] : params)
      n += static_cast<std::int64_t>(t.data().size());
    return n;
  }
};

namespace detail {

template <class S>
void add_param(EncoderState<S>& st, const std::string& name, ng::Dims dims,
               std::uint64_t seed, double stddev) {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  std::vector<S> v(static_cast<std::size_t>(n), S(0));
  if (stddev > 0) {
    Rng rng(Rng::mix({seed, Rng::hash_str(name)}));
    for (auto& x : v) x = static_cast<S>(rng.trunc_normal(stddev));
  } else if (stddev < 0) {  // layernorm gains start at one
    for (auto& x : v) x = S(1);
  }
  st.index[name] = static_cast<int>(st.params.size());
  st.params.emplace_back(
      name, ng::Tensor<S>::from_vec(std::move(dims), std::move(v),
                                    /*requires_grad=*/true));
}

}  // namespace detail

// Fresh parameters: weights and token embeddings truncated-normal(0.02),
// biases and layernorm shifts zero, layernorm gains one. Each tensor's draw
// stream is keyed by (seed, parameter name).
template <class S>
EncoderState<S> init_encoder(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  constexpr double kStd = 0.02;
  const std::int64_t d = cfg.embed_dim;
  const std::int64_t patch_in = static_cast<std::int64_t>(cfg.patch_size) *
                                cfg.patch_size * EncoderConfig::kChannels;
  EncoderState<S> st;
  st.cfg = cfg;
  auto add = [&](const std::string& name, ng::Dims dims, double stddev) {
    detail::add_param(st, name, std::move(dims), seed, stddev);
  };
  add("tactile_proj_w", {patch_in, d}, kStd);
  add("tactile_proj_b", {d}, 0);
  if (cfg.calib_count > 0) {
    add("calib_proj_w", {patch_in * cfg.calib_count, d}, kStd);
    add("calib_proj_b", {d}, 0);
  }
  add("class_token", {1, d}, kStd);
  add("type_embed", {2, d}, kStd);
  for (int b = 0; b < cfg.depth; ++b) {
    const std::string p = "block" + std::to_string(b) + "_";
    add(p + "ln1_g", {d}, -1);
    add(p + "ln1_b", {d}, 0);
    add(p + "q_w", {d, d}, kStd);
    add(p + "q_b", {d}, 0);
    add(p + "k_w", {d, d}, kStd);
    add(p + "k_b", {d}, 0);
    add(p + "v_w", {d, d}, kStd);
    add(p + "v_b", {d}, 0);
    add(p + "attn_out_w", {d, d}, kStd);
    add(p + "attn_out_b", {d}, 0);
    add(p + "ln2_g", {d}, -1);
    add(p + "ln2_b", {d}, 0);
    add(p + "mlp1_w", {d, 4 * d}, kStd);
    add(p + "mlp1_b", {4 * d}, 0);
    add(p + "mlp2_w", {4 * d, d}, kStd);
    add(p + "mlp2_b", {d}, 0);
  }
  add("final_ln_g", {d}, -1);
  add("final_ln_b", {d}, 0);
  add("normal_head_w", {d, static_cast<std::int64_t>(cfg.patch_size) *
                               cfg.patch_size * 3}, kStd);
  add("normal_head_b", {static_cast<std::int64_t>(cfg.patch_size) *
                        cfg.patch_size * 3}, 0);
  add("embed_head_w", {d, EncoderConfig::kEmbedOut}, kStd);
  add("embed_head_b", {EncoderConfig::kEmbedOut}, 0);

  std::vector<double> table = build_pos_table(cfg);
  std::vector<S> pos(table.begin(), table.end());
  st.pos = ng::Tensor<S>::from_vec({cfg.n_tokens(), d}, std::move(pos));
  return st;
}

template <class S>
struct TokenOutputs {
  ng::Tensor<S> z_out;     // [B, D]
  ng::Tensor<S> x_tokens;  // [B, N, D]
  ng::Tensor<S> c_tokens;  // [B, N, D]; empty handle when K = 0
  bool has_calib = false;
};

namespace detail {

template <class S>
ng::Tensor<S> linear(const ng::Tensor<S>& x, const ng::Tensor<S>& w,
                     const ng::Tensor<S>& b) {
  return ng::add(ng::matmul(x, w), b);
}

}  // namespace detail

// [B,H,W,3] tactile signal + [B,H,W,K*3] calibration stack -> [B, L, D]
// token sequence: [class, tactile patches, calibration patches], both patch
// streams sharing the positional table and carrying their own type embedding.
template <class S>
ng::Tensor<S> tokenize(const ng::Tensor<S>& signal, const ng::Tensor<S>& calib,
                       EncoderState<S>& st) {
  const EncoderConfig& cfg = st.cfg;
  const auto& sd = signal.dims();
  if (sd.size() != 4 || sd[1] != cfg.image_size || sd[2] != cfg.image_size ||
      sd[3] != EncoderConfig::kChannels)
    throw shape_error("tactile input does not match encoder config");
  const std::int64_t b = sd[0];
  const bool want_calib = cfg.calib_count > 0;
  if (want_calib) {
    if (!calib.defined())
      throw config_error("encoder expects a calibration stack");
    const auto& cd = calib.dims();
    if (cd.size() != 4 || cd[0] != b || cd[1] != cfg.image_size ||
        cd[2] != cfg.image_size ||
        cd[3] != static_cast<std::int64_t>(cfg.calib_count) * 3)
      throw config_error(
          "calibration stack does not match the encoder's calibration count");
  } else if (calib.defined() && calib.numel() != 0) {
    throw config_error("encoder configured without calibration tokens");
  }

  ng::Tensor<S> pos3 = ng::reshape(st.pos, {1, cfg.n_tokens(), cfg.embed_dim});
  ng::Tensor<S> type_tac = ng::reshape(
      ng::slice(st.param("type_embed"), 0, 0, 1), {1, 1, cfg.embed_dim});

  ng::Tensor<S> xt = ng::patchify(signal, cfg.patch_size);
  xt = detail::linear(xt, st.param("tactile_proj_w"),
                      st.param("tactile_proj_b"));
  xt = ng::add(ng::add(xt, pos3), type_tac);

  // Broadcast the class token across the batch.
  ng::Tensor<S> cls = ng::reshape(st.param("class_token"),
                                  {1, 1, cfg.embed_dim});
  ng::Tensor<S> cls_rows =
      ng::add(cls, ng::Tensor<S>::zeros({b, 1, cfg.embed_dim}));

  std::vector<ng::Tensor<S>> parts{cls_rows, xt};
  if (want_calib) {
    ng::Tensor<S> type_cal = ng::reshape(
        ng::slice(st.param("type_embed"), 0, 1, 1), {1, 1, cfg.embed_dim});
    ng::Tensor<S> ct = ng::patchify(calib, cfg.patch_size);
    ct = detail::linear(ct, st.param("calib_proj_w"),
                        st.param("calib_proj_b"));
    ct = ng::add(ng::add(ct, pos3), type_cal);
    parts.push_back(ct);
  }
  return ng::concat(parts, 1);
}

// Pre-norm transformer blocks (MHSA + 4x GELU MLP) and a final layernorm.
template <class S>
ng::Tensor<S> encode_tokens(const ng::Tensor<S>& seq, EncoderState<S>& st) {
  const EncoderConfig& cfg = st.cfg;
  const auto& dims = seq.dims();
  if (dims.size() != 3 || dims[2] != cfg.embed_dim)
    throw shape_error("token sequence must be [B, L, D]");
  const std::int64_t b = dims[0], l = dims[1], d = dims[2];
  const std::int64_t heads = cfg.num_heads, hd = d / heads;
  const S inv_sqrt = static_cast<S>(1.0 / std::sqrt(static_cast<double>(hd)));

  auto to_heads = [&](ng::Tensor<S> t) {
    t = ng::reshape(t, {b, l, heads, hd});
    return ng::permute(t, {0, 2, 1, 3});  // [B, H, L, hd]
  };

  ng::Tensor<S> x = seq;
  for (int blk = 0; blk < cfg.depth; ++blk) {
    const std::string p = "block" + std::to_string(blk) + "_";
    ng::Tensor<S> h = ng::layernorm(x, st.param(p + "ln1_g"),
                                    st.param(p + "ln1_b"));
    ng::Tensor<S> q =
        to_heads(detail::linear(h, st.param(p + "q_w"), st.param(p + "q_b")));
    ng::Tensor<S> k =
        to_heads(detail::linear(h, st.param(p + "k_w"), st.param(p + "k_b")));
    ng::Tensor<S> v =
        to_heads(detail::linear(h, st.param(p + "v_w"), st.param(p + "v_b")));
    ng::Tensor<S> scores =
        ng::matmul(ng::scale(q, inv_sqrt), ng::permute(k, {0, 1, 3, 2}));
    ng::Tensor<S> attn = ng::softmax(scores, 3);
    ng::Tensor<S> ctx = ng::matmul(attn, v);        // [B, H, L, hd]
    ctx = ng::permute(ctx, {0, 2, 1, 3});           // [B, L, H, hd]
    ctx = ng::reshape(ctx, {b, l, d});
    ctx = detail::linear(ctx, st.param(p + "attn_out_w"),
                         st.param(p + "attn_out_b"));
    x = ng::add(x, ctx);

    ng::Tensor<S> m = ng::layernorm(x, st.param(p + "ln2_g"),
                                    st.param(p + "ln2_b"));
    m = ng::gelu(detail::linear(m, st.param(p + "mlp1_w"),
                                st.param(p + "mlp1_b")));
    m = detail::linear(m, st.param(p + "mlp2_w"), st.param(p + "mlp2_b"));
    x = ng::add(x, m);
  }
  return ng::layernorm(x, st.param("final_ln_g"), st.param("final_ln_b"));
}

// Splits encoded tokens back into class / tactile / calibration streams.
template <class S>
TokenOutputs<S> encode(const ng::Tensor<S>& seq, EncoderState<S>& st) {
  ng::Tensor<S> out = encode_tokens(seq, st);
  const EncoderConfig& cfg = st.cfg;
  const std::int64_t b = out.dims()[0];
  if (out.dims()[1] != cfg.seq_len())
    throw shape_error("sequence length does not match the configuration");
  TokenOutputs<S> res;
  res.z_out = ng::reshape(ng::slice(out, 1, 0, 1), {b, cfg.embed_dim});
  res.x_tokens = ng::slice(out, 1, 1, cfg.n_tokens());
  if (cfg.calib_count > 0) {
    res.c_tokens = ng::slice(out, 1, 1 + cfg.n_tokens(), cfg.n_tokens());
    res.has_calib = true;
  }
  return res;
}

// Per-token linear projection of the tactile output tokens, reassembled to
// an H x W x 3 map. No normalization: the loss compares raw values against
// unit-norm targets.
template <class S>
ng::Tensor<S> decode_normal(const ng::Tensor<S>& x_tokens,
                            EncoderState<S>& st) {
  const EncoderConfig& cfg = st.cfg;
  const auto& dims = x_tokens.dims();
  if (dims.size() != 3 || dims[1] != cfg.n_tokens() ||
      dims[2] != cfg.embed_dim)
    throw shape_error("decode_normal expects [B, N, D] tactile tokens");
  ng::Tensor<S> y = detail::linear(x_tokens, st.param("normal_head_w"),
                                   st.param("normal_head_b"));
  return ng::unpatchify(y, cfg.patch_size, cfg.image_size, cfg.image_size, 3);
}

// Linear head to a unit-norm 128-d embedding.
template <class S>
ng::Tensor<S> embed_class(const ng::Tensor<S>& z_out, EncoderState<S>& st) {
  const auto& dims = z_out.dims();
  if (dims.size() != 2 || dims[1] != st.cfg.embed_dim)
    throw shape_error("embed_class expects [B, D] class tokens");
  ng::Tensor<S> e = detail::linear(z_out, st.param("embed_head_w"),
                                   st.param("embed_head_b"));
  ng::Tensor<S> norm =
      ng::sqrt_t(ng::sum_axis(ng::mul(e, e), 1, /*keepdim=*/true));
  return ng::div(e, ng::add_scalar(norm, static_cast<S>(1e-8)));
}

// The frozen interface downstream heads consume.
template <class S>
TokenOutputs<S> sitr_representation(const ng::Tensor<S>& signal,
                                    const ng::Tensor<S>& calib,
                                    EncoderState<S>& st) {
  return encode(tokenize(signal, calib, st), st);
}

}  // namespace sitr::model
