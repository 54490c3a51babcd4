#pragma once

#include <utility>

#include "tsgan/changemap.hpp"
#include "tsgan/nn/ops.hpp"

namespace tsgan {

enum class LossMode { l1, cwl1 };

/// Reconstruction/adversarial balance and the change-weighting exponent.
struct LossConfig {
    double gamma = 4.0;        // change-weighted vs reversed-weighted balance
    double lambda_rec = 100.0; // reconstruction weight against the adversarial term
    LossMode mode = LossMode::cwl1;
};

LossMode loss_mode_from_string(const std::string& s);
std::string to_string(LossMode m);

/// Weighted mean absolute error: sum_i w_i |y_i - yhat_i| / sum_i w_i.
/// The weight tensor is a constant (not differentiated). Throws when the
/// weights sum to zero.
nn::Tape::Id wl1(nn::Tape& t, nn::Tape::Id pred, nn::Tape::Id target,
                 const nn::Tensor& weights);

/// (WL1 with RCWM + gamma * WL1 with CWM) / (1 + gamma). A CWM that is zero
/// everywhere (identical SAR pair) falls back to the plain unweighted L1.
nn::Tape::Id total_cost(nn::Tape& t, nn::Tape::Id pred, nn::Tape::Id target,
                        const WeightMap& cwm, double gamma);

/// Mean binary cross-entropy on logits, target 1 (softplus(-z)) or 0.
nn::Tape::Id bce_logits_real(nn::Tape& t, nn::Tape::Id logits);
nn::Tape::Id bce_logits_fake(nn::Tape& t, nn::Tape::Id logits);

/// (generator adversarial loss, discriminator loss) from the two score
/// grids: d pushes real->1 and fake->0, g pushes fake->1.
std::pair<nn::Tape::Id, nn::Tape::Id> adversarial_losses(nn::Tape& t,
                                                         nn::Tape::Id d_real,
                                                         nn::Tape::Id d_fake);

/// adv + lambda_rec * rec.
nn::Tape::Id generator_objective(nn::Tape& t, const LossConfig& cfg,
                                 nn::Tape::Id adv, nn::Tape::Id rec);

// Plain-value conveniences for tests and metrics code.
double wl1_value(const nn::Tensor& pred, const nn::Tensor& target,
                 const nn::Tensor& weights);
double total_cost_value(const nn::Tensor& pred, const nn::Tensor& target,
                        const WeightMap& cwm, double gamma);
std::pair<double, double> adversarial_losses_value(const nn::Tensor& d_real,
                                                   const nn::Tensor& d_fake);

/// WeightMap raster -> tensor view used by the loss builders.
nn::Tensor weights_tensor(const WeightMap& w);

}  // namespace tsgan
