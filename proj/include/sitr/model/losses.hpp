#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "sitr/errors.hpp"
#include "sitr/log.hpp"
#include "sitr/ng/ops.hpp"

namespace sitr::model {

struct LossWeights {
  double lambda_normal = 1.0;
  double lambda_scl = 1.0;
  double tau = 0.07;

  void validate() const {
    if (tau <= 0) throw config_error("tau must be positive");
    if (lambda_normal < 0 || lambda_scl < 0)
      throw config_error("loss weights must be non-negative");
  }
};

// Mean squared error over every component of the predicted map.
template <class S>
ng::Tensor<S> normal_loss(const ng::Tensor<S>& pred,
                          const ng::Tensor<S>& target) {
  if (pred.dims() != target.dims())
    throw shape_error("normal_loss operands must share a shape");
  ng::Tensor<S> d = ng::sub(pred, target);
  return ng::mean_all(ng::mul(d, d));
}

// Supervised contrastive loss on precomputed logits[i][j] = z_i . z_j / tau.
// Per anchor i with positives P(i) = {j != i : label_j = label_i} and
// candidates A(i) = {j != i}:
//   L_i = logsumexp_{a in A(i)} logits[i][a] - mean_{p in P(i)} logits[i][p]
// averaged over anchors that have at least one positive; anchors without a
// positive are excluded and logged.
template <class S>
ng::Tensor<S> scl_from_logits(const ng::Tensor<S>& logits,
                              const std::vector<int>& labels) {
  const auto& dims = logits.dims();
  if (dims.size() != 2 || dims[0] != dims[1])
    throw shape_error("scl logits must be square [B, B]");
  const std::int64_t b = dims[0];
  if (static_cast<std::int64_t>(labels.size()) != b)
    throw shape_error("label count must match the batch size");
  if (b < 2) throw contract_error("contrastive loss needs a batch of >= 2");

  std::vector<S> not_self(static_cast<std::size_t>(b) * b, S(0));
  std::vector<S> pos(static_cast<std::size_t>(b) * b, S(0));
  std::vector<S> inv_p(static_cast<std::size_t>(b), S(0));
  std::vector<S> active(static_cast<std::size_t>(b), S(0));
  std::int64_t n_active = 0;
  for (std::int64_t i = 0; i < b; ++i) {
    std::int64_t np = 0;
    for (std::int64_t j = 0; j < b; ++j) {
      if (i == j) continue;
      not_self[i * b + j] = S(1);
      if (labels[j] == labels[i]) {
        pos[i * b + j] = S(1);
        ++np;
      }
    }
    if (np > 0) {
      inv_p[i] = S(1) / static_cast<S>(np);
      active[i] = S(1);
      ++n_active;
    }
  }
  if (n_active < b)
    log::warn("scl: skipped " + std::to_string(b - n_active) +
              " of " + std::to_string(b) + " anchors with no positive");
  if (n_active == 0) return ng::Tensor<S>::scalar(S(0));

  ng::Tensor<S> m_not_self = ng::Tensor<S>::from_vec({b, b}, not_self);
  ng::Tensor<S> m_pos = ng::Tensor<S>::from_vec({b, b}, pos);
  ng::Tensor<S> m_inv_p = ng::Tensor<S>::from_vec({b, 1}, inv_p);
  ng::Tensor<S> m_active = ng::Tensor<S>::from_vec({b, 1}, active);

  ng::Tensor<S> lse = ng::lse_masked_last(logits, m_not_self);
  ng::Tensor<S> pos_sum =
      ng::sum_axis(ng::mul(logits, m_pos), 1, /*keepdim=*/true);
  ng::Tensor<S> per = ng::sub(lse, ng::mul(pos_sum, m_inv_p));
  ng::Tensor<S> total = ng::sum_all(ng::mul(per, m_active));
  return ng::scale(total, S(1) / static_cast<S>(n_active));
}

// Temperature-scaled contrastive loss on (typically unit-norm) embeddings.
template <class S>
ng::Tensor<S> scl_loss(const ng::Tensor<S>& embeddings,
                       const std::vector<int>& labels, double tau) {
  if (tau <= 0) throw config_error("tau must be positive");
  if (embeddings.dims().size() != 2)
    throw shape_error("embeddings must be [B, E]");
  ng::Tensor<S> logits =
      ng::scale(ng::matmul(embeddings, ng::permute(embeddings, {1, 0})),
                static_cast<S>(1.0 / tau));
  return scl_from_logits(logits, labels);
}

template <class S>
ng::Tensor<S> total_loss(const ng::Tensor<S>& l_normal,
                         const ng::Tensor<S>& l_scl, const LossWeights& w) {
  w.validate();
  return ng::add(ng::scale(l_normal, static_cast<S>(w.lambda_normal)),
                 ng::scale(l_scl, static_cast<S>(w.lambda_scl)));
}

// Per-step training log row. One header, one row per optimizer step.
inline constexpr const char* kLossCsvHeader = "step,l_normal,l_scl,total";

inline std::string loss_csv_row(std::int64_t step, double l_normal,
                                double l_scl, double total) {
  std::ostringstream os;
  os.precision(10);
  os << step << ',' << l_normal << ',' << l_scl << ',' << total;
  return os.str();
}

}  // namespace sitr::model
