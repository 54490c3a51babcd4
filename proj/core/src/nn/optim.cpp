#include "tsgan/nn/optim.hpp"

#include <cmath>

namespace tsgan::nn {

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, t_);
    const double bc2 = 1.0 - std::pow(b2_, t_);
    for (Parameter* p : params_) {
        p->ensure_grad();
        if (!p->adam_m.same_shape(p->value)) {
            p->adam_m = Tensor::zeros(p->value.shape);
            p->adam_v = Tensor::zeros(p->value.shape);
        }
        for (std::size_t i = 0; i < p->value.v.size(); ++i) {
            const double g = p->grad.v[i];
            p->adam_m.v[i] = b1_ * p->adam_m.v[i] + (1.0 - b1_) * g;
            p->adam_v.v[i] = b2_ * p->adam_v.v[i] + (1.0 - b2_) * g * g;
            const double mhat = p->adam_m.v[i] / bc1;
            const double vhat = p->adam_v.v[i] / bc2;
            p->value.v[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace tsgan::nn
