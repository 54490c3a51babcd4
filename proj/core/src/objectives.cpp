#include "tsgan/objectives.hpp"

#include <algorithm>

namespace tsgan {

namespace ops = nn::ops;
using nn::Tape;
using nn::Tensor;

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "l1") return LossMode::l1;
    if (s == "cwl1") return LossMode::cwl1;
    fail("unknown loss mode '" + s + "' (expected l1 or cwl1)");
}

std::string to_string(LossMode m) { return m == LossMode::l1 ? "l1" : "cwl1"; }

nn::Tensor weights_tensor(const WeightMap& w) {
    return Tensor({w.values.channels, w.values.height, w.values.width},
                  w.values.data);
}

Tape::Id wl1(Tape& t, Tape::Id pred, Tape::Id target, const Tensor& weights) {
    require(t.val(pred).numel() == t.val(target).numel(),
            "wl1: pred/target size mismatch");
    require(weights.numel() == t.val(pred).numel(), "wl1: weight size mismatch");
    double wsum = 0.0;
    for (double w : weights.v) {
        require(w >= 0.0, "wl1: weights must be nonnegative");
        wsum += w;
    }
    require(wsum > 0.0, "wl1: weight map sums to zero; weighted mean undefined");
    Tape::Id abs_err = ops::abs_act(t, ops::sub(t, pred, target));
    Tape::Id num = ops::dot_const(t, abs_err, weights);
    return ops::affine(t, num, 1.0 / wsum, 0.0);
}

Tape::Id total_cost(Tape& t, Tape::Id pred, Tape::Id target, const WeightMap& cwm,
                    double gamma) {
    require(cwm.kind == WeightKind::cwm, "total_cost: weight map must be a CWM");
    require(gamma >= 0.0, "total_cost: gamma must be nonnegative");
    const double mx =
        *std::max_element(cwm.values.data.begin(), cwm.values.data.end());
    if (mx == 0.0) {
        // identical SAR pair: both weighted means are undefined, use plain L1
        const Tensor uniform =
            Tensor::full({static_cast<int>(t.val(pred).numel())}, 1.0);
        return wl1(t, pred, target, uniform);
    }
    const WeightMap rcwm = compute_rcwm(cwm);
    Tape::Id rc = wl1(t, pred, target, weights_tensor(rcwm));
    Tape::Id cw = wl1(t, pred, target, weights_tensor(cwm));
    Tape::Id blend =
        ops::add(t, rc, ops::affine(t, cw, gamma, 0.0));
    return ops::affine(t, blend, 1.0 / (1.0 + gamma), 0.0);
}

Tape::Id bce_logits_real(Tape& t, Tape::Id logits) {
    // -log sigmoid(z) = softplus(-z)
    return ops::mean_all(t, ops::softplus(t, ops::affine(t, logits, -1.0, 0.0)));
}

Tape::Id bce_logits_fake(Tape& t, Tape::Id logits) {
    // -log(1 - sigmoid(z)) = softplus(z)
    return ops::mean_all(t, ops::softplus(t, logits));
}

std::pair<Tape::Id, Tape::Id> adversarial_losses(Tape& t, Tape::Id d_real,
                                                 Tape::Id d_fake) {
    require(t.val(d_real).same_shape(t.val(d_fake)),
            "adversarial_losses: score grid shape mismatch");
    Tape::Id g_loss = bce_logits_real(t, d_fake);  // generator wants fake -> 1
    Tape::Id d_loss = ops::affine(
        t, ops::add(t, bce_logits_real(t, d_real), bce_logits_fake(t, d_fake)),
        0.5, 0.0);
    return {g_loss, d_loss};
}

Tape::Id generator_objective(Tape& t, const LossConfig& cfg, Tape::Id adv,
                             Tape::Id rec) {
    return ops::add(t, adv, ops::affine(t, rec, cfg.lambda_rec, 0.0));
}

double wl1_value(const Tensor& pred, const Tensor& target, const Tensor& weights) {
    Tape t;
    Tape::Id p = t.constant(pred);
    Tape::Id y = t.constant(target);
    return t.val(wl1(t, p, y, weights)).v[0];
}

double total_cost_value(const Tensor& pred, const Tensor& target,
                        const WeightMap& cwm, double gamma) {
    Tape t;
    Tape::Id p = t.constant(pred);
    Tape::Id y = t.constant(target);
    return t.val(total_cost(t, p, y, cwm, gamma)).v[0];
}

std::pair<double, double> adversarial_losses_value(const Tensor& d_real,
                                                   const Tensor& d_fake) {
    Tape t;
    auto [g, d] = adversarial_losses(t, t.constant(d_real), t.constant(d_fake));
    return {t.val(g).v[0], t.val(d).v[0]};
}

}  // namespace tsgan
