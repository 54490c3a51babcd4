#pragma once

#include <functional>
#include <vector>

#include "tsgan/nn/tensor.hpp"

namespace tsgan::nn {

/// Reverse-mode autodiff tape. Ops append value nodes during the forward
/// pass; backward() walks the tape in reverse creation order. Gradients of
/// layer parameters are accumulated directly into the owning Parameter by
/// the op closures, so the tape only tracks activations.
class Tape {
public:
    using Id = int;

    /// Differentiable input node.
    Id input(Tensor value) { return push(std::move(value), {}, nullptr, true); }

    /// Non-differentiable node (targets, frozen inputs).
    Id constant(Tensor value) { return push(std::move(value), {}, nullptr, false); }

    const Tensor& val(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }

    /// Gradient of the last backward() root w.r.t. node `id`. Zero tensor if
    /// the node was never reached.
    const Tensor& grad(Id id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        ensure_grad(n);
        return n.grad;
    }

    bool tracks_grad(Id id) const {
        return nodes_[static_cast<std::size_t>(id)].needs_grad;
    }

    /// Seed d(root)/d(root) = 1 and propagate. `root` must be a scalar node.
    void backward(Id root);

    // --- op plumbing -------------------------------------------------------

    /// Append a node. `bwd(tape, self)` must route tape.grad(self) into the
    /// parents (and any captured parameters).
    Id push(Tensor value, std::vector<Id> parents,
            std::function<void(Tape&, Id)> bwd, bool force_grad = false);

    /// Add `g` (same shape as the node value) into the node's gradient.
    void accumulate(Id id, const Tensor& g);
    void accumulate(Id id, const double* g, std::int64_t n);

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool grad_alloc = false;
        bool needs_grad = false;
        std::vector<Id> parents;
        std::function<void(Tape&, Id)> bwd;
    };

    void ensure_grad(Node& n) {
        if (!n.grad_alloc) {
            n.grad = Tensor::zeros(n.value.shape);
            n.grad_alloc = true;
        }
    }

    std::vector<Node> nodes_;
};

}  // namespace tsgan::nn
