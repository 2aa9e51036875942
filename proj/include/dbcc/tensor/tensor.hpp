#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "dbcc/common.hpp"

namespace dbcc {

using Shape = std::vector<int>;

inline std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= std::size_t(d);
  return n;
}

// Thread-local autodiff switch; inference paths run under NoGradGuard so
// no tape is built and intermediate buffers are freed eagerly.
struct GradMode {
  static bool& enabled() {
    static thread_local bool on = true;
    return on;
  }
};

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(GradMode::enabled()) { GradMode::enabled() = false; }
  ~NoGradGuard() { GradMode::enabled() = prev; }
};

template <typename T>
struct TensorNode {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated lazily
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;

  std::vector<T>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad;
  }
};

// Dense n-d float tensor with reverse-mode autodiff. Value semantics are
// shared-buffer: copies alias the same node, ops produce fresh nodes.
// A tensor written by an op is never mutated afterwards.
template <typename T>
class Tensor {
 public:
  using Node = TensorNode<T>;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0))
      : node_(std::make_shared<Node>()) {
    node_->shape = std::move(shape);
    node_->value.assign(numel(node_->shape), fill);
  }
  Tensor(Shape shape, std::vector<T> data) : node_(std::make_shared<Node>()) {
    if (numel(shape) != data.size())
      throw shape_error("tensor data length does not match shape");
    node_->shape = std::move(shape);
    node_->value = std::move(data);
  }

  static Tensor scalar(T v) { return Tensor(Shape{1}, std::vector<T>{v}); }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape[std::size_t(i)]; }
  int ndim() const { return int(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }

  T* data() { return node_->value.data(); }
  const T* data() const { return node_->value.data(); }
  std::vector<T>& values() { return node_->value; }
  const std::vector<T>& values() const { return node_->value; }

  T item() const {
    if (size() != 1) throw shape_error("item() requires a scalar tensor");
    return node_->value[0];
  }

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool b) {
    node_->requires_grad = b;
    return *this;
  }

  const std::vector<T>& grad() const { return node_->grad; }
  std::vector<T>& mutable_grad() { return node_->ensure_grad(); }
  void zero_grad() {
    if (!node_->grad.empty())
      std::fill(node_->grad.begin(), node_->grad.end(), T(0));
  }

  // Reverse-mode accumulation from a scalar loss. Grads accumulate across
  // repeated calls; callers zero them between steps.
  void backward() const {
    if (size() != 1) throw shape_error("backward() requires a scalar loss");
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    topo(node_.get(), seen, order);
    // Interior node grads are scratch space for this pass; only leaves
    // (parameters, inputs) accumulate across repeated calls.
    for (Node* n : order)
      if (n->backprop && !n->grad.empty())
        std::fill(n->grad.begin(), n->grad.end(), T(0));
    node_->ensure_grad()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* n = *it;
      if (n->backprop) n->backprop(*n);
    }
  }

  std::shared_ptr<Node> node() const { return node_; }

  bool all_finite() const {
    for (T v : node_->value)
      if (!std::isfinite(double(v))) return false;
    return true;
  }

 private:
  static void topo(Node* n, std::unordered_set<Node*>& seen,
                   std::vector<Node*>& order) {
    // Iterative DFS; tapes can be thousands of nodes deep.
    struct Frame {
      Node* node;
      std::size_t next;
    };
    std::vector<Frame> stack{{n, 0}};
    seen.insert(n);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < f.node->parents.size()) {
        Node* p = f.node->parents[f.next++].get();
        if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
      } else {
        order.push_back(f.node);
        stack.pop_back();
      }
    }
  }

  std::shared_ptr<Node> node_;
};

// Builds the output of an op: wires parents/backprop only when some input
// participates in the tape and grad mode is on.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value,
                      const std::vector<Tensor<T>>& inputs,
                      std::function<void(TensorNode<T>&)> backprop) {
  Tensor<T> out(std::move(shape), std::move(value));
  bool needs = false;
  if (GradMode::enabled())
    for (const auto& in : inputs)
      if (in.requires_grad()) needs = true;
  if (needs) {
    out.set_requires_grad(true);
    auto node = out.node();
    node->parents.reserve(inputs.size());
    for (const auto& in : inputs) node->parents.push_back(in.node());
    node->backprop = std::move(backprop);
  }
  return out;
}

}  // namespace dbcc
