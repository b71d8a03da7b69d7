#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sitr/errors.hpp"

// Reverse-mode automatic differentiation over dense row-major tensors.
// Tensors are cheap shared handles; gradients live next to values on the
// shared node. A Tape, when active on the current thread, records one
// backward closure per differentiable op in execution order and replays
// them once in reverse.

namespace sitr::ng {

using Dims = std::vector<std::int64_t>;

inline std::int64_t numel_of(const Dims& dims) {
  std::int64_t n = 1;
  for (std::int64_t d : dims) n *= d;
  return n;
}

inline std::string dims_str(const Dims& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ", ";
    os << dims[i];
  }
  os << ']';
  return os.str();
}

template <class S>
struct Node {
  Dims dims;
  std::vector<S> value;
  std::vector<S> grad;  // sized lazily on first accumulation
  bool requires_grad = false;

  std::int64_t numel() const { return static_cast<std::int64_t>(value.size()); }

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), S(0));
  }
};

template <class S>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Dims dims, bool requires_grad = false) {
    return full(std::move(dims), S(0), requires_grad);
  }

  static Tensor full(Dims dims, S v, bool requires_grad = false) {
    auto n = std::make_shared<Node<S>>();
    n->dims = std::move(dims);
    validate_dims(n->dims);
    n->value.assign(static_cast<std::size_t>(numel_of(n->dims)), v);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor from_vec(Dims dims, std::vector<S> values,
                         bool requires_grad = false) {
    auto n = std::make_shared<Node<S>>();
    n->dims = std::move(dims);
    validate_dims(n->dims);
    if (numel_of(n->dims) != static_cast<std::int64_t>(values.size()))
      throw shape_error("tensor payload size " + std::to_string(values.size()) +
                        " does not match dims " + dims_str(n->dims));
    n->value = std::move(values);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor scalar(S v, bool requires_grad = false) {
    return from_vec({1}, {v}, requires_grad);
  }

  bool defined() const { return n_ != nullptr; }
  const Dims& dims() const { return node_ref().dims; }
  std::int64_t numel() const { return node_ref().numel(); }
  std::int64_t dim(int i) const { return node_ref().dims.at(i); }
  int rank() const { return static_cast<int>(node_ref().dims.size()); }

  std::span<S> data() { return {node_ref().value.data(), node_ref().value.size()}; }
  std::span<const S> data() const {
    return {node_ref().value.data(), node_ref().value.size()};
  }

  S item() const {
    if (numel() != 1)
      throw shape_error("item() on tensor with dims " + dims_str(dims()));
    return node_ref().value[0];
  }

  bool requires_grad() const { return n_ && n_->requires_grad; }

  // Gradient accumulated by the last backward pass; empty span until then.
  std::span<const S> grad() const {
    const Node<S>& n = node_ref();
    return {n.grad.data(), n.grad.size()};
  }

  void zero_grad() {
    if (n_ && !n_->grad.empty()) n_->grad.assign(n_->value.size(), S(0));
  }

  const std::shared_ptr<Node<S>>& node() const { return n_; }

  static Tensor wrap(std::shared_ptr<Node<S>> n) { return Tensor(std::move(n)); }

 private:
  explicit Tensor(std::shared_ptr<Node<S>> n) : n_(std::move(n)) {}

  Node<S>& node_ref() const {
    if (!n_) throw contract_error("operation on default-constructed tensor");
    return *n_;
  }

  static void validate_dims(const Dims& dims) {
    for (std::int64_t d : dims)
      if (d <= 0)
        throw shape_error("non-positive dimension in " + dims_str(dims));
  }

  std::shared_ptr<Node<S>> n_;
};

template <class S>
class Tape;

template <class S>
inline Tape<S>*& active_tape_slot() {
  static thread_local Tape<S>* slot = nullptr;
  return slot;
}

template <class S>
class Tape {
 public:
  Tape() {
    if (active_tape_slot<S>() != nullptr)
      throw contract_error("nested tapes are not supported");
    active_tape_slot<S>() = this;
  }

  ~Tape() { active_tape_slot<S>() = nullptr; }

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() { return active_tape_slot<S>(); }

  void record(std::shared_ptr<Node<S>> out, std::function<void()> backward) {
    records_.push_back({std::move(out), std::move(backward)});
  }

  std::size_t size() const { return records_.size(); }

  // Seeds d(loss)/d(loss) = 1 and replays recorded closures newest-first.
  // A tape can be consumed exactly once.
  void backward(const Tensor<S>& loss) {
    if (consumed_)
      throw contract_error("backward called twice on the same tape");
    if (loss.numel() != 1)
      throw shape_error("backward root must be scalar, got dims " +
                        dims_str(loss.dims()));
    consumed_ = true;
    loss.node()->ensure_grad();
    loss.node()->grad[0] = S(1);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
      if (it->out->grad.empty()) continue;  // not reachable from the root
      it->fn();
    }
  }

 private:
  struct Record {
    std::shared_ptr<Node<S>> out;
    std::function<void()> fn;
  };
  std::vector<Record> records_;
  bool consumed_ = false;
};

// Pauses recording for the lifetime of the guard; used for running
// statistics and other values that must stay out of the graph.
template <class S>
class NoGradGuard {
 public:
  NoGradGuard() : saved_(active_tape_slot<S>()) { active_tape_slot<S>() = nullptr; }
  ~NoGradGuard() { active_tape_slot<S>() = saved_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  Tape<S>* saved_;
};

}  // namespace sitr::ng
