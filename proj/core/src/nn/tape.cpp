#include "tsgan/nn/tape.hpp"

namespace tsgan::nn {

Tape::Id Tape::push(Tensor value, std::vector<Id> parents,
                    std::function<void(Tape&, Id)> bwd, bool force_grad) {
    Node n;
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.bwd = std::move(bwd);
    n.needs_grad = force_grad;
    for (Id p : n.parents)
        if (nodes_[static_cast<std::size_t>(p)].needs_grad) n.needs_grad = true;
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

void Tape::accumulate(Id id, const Tensor& g) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    require(g.same_shape(n.value), "Tape::accumulate: gradient shape mismatch");
    ensure_grad(n);
    for (std::size_t i = 0; i < n.grad.v.size(); ++i) n.grad.v[i] += g.v[i];
}

void Tape::accumulate(Id id, const double* g, std::int64_t count) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    require(count == n.value.numel(), "Tape::accumulate: gradient size mismatch");
    ensure_grad(n);
    for (std::int64_t i = 0; i < count; ++i) n.grad.v[static_cast<std::size_t>(i)] += g[i];
}

void Tape::backward(Id root) {
    Node& r = nodes_[static_cast<std::size_t>(root)];
    require(r.value.numel() == 1, "Tape::backward: root must be scalar");
    ensure_grad(r);
    r.grad.v[0] = 1.0;
    for (Id id = root; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.needs_grad || !n.bwd || !n.grad_alloc) continue;
        n.bwd(*this, id);
    }
}

}  // namespace tsgan::nn
