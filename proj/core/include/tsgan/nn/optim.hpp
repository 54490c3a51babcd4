#pragma once

#include <vector>

#include "tsgan/nn/layers.hpp"

namespace tsgan::nn {

/// Adam with bias correction. Moments default to (0.5, 0.999), the usual
/// choice for adversarial training.
class Adam {
public:
    Adam(std::vector<Parameter*> params, double lr, double beta1 = 0.5,
         double beta2 = 0.999, double eps = 1e-8)
        : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void zero_grad() {
        for (Parameter* p : params_) p->zero_grad();
    }

    void step();

    double learning_rate() const { return lr_; }

private:
    std::vector<Parameter*> params_;
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
};

}  // namespace tsgan::nn
