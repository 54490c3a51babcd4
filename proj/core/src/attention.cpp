#include "tsgan/attention.hpp"

#include <cmath>

namespace tsgan {

namespace ops = nn::ops;
using nn::Tape;
using nn::Tensor;

SeBlock::SeBlock(std::string name, int channels, int reduction)
    : fc1(name + ".fc1", channels, std::max(channels / reduction, 1)),
      fc2(name + ".fc2", std::max(channels / reduction, 1), channels),
      channels_(channels),
      hidden_(std::max(channels / reduction, 1)) {}

void SeBlock::init(Rng& rng) {
    fc1.init(rng);
    fc2.init(rng);
}

void SeBlock::collect(std::vector<nn::Parameter*>& out) {
    fc1.collect(out);
    fc2.collect(out);
}

Tape::Id SeBlock::apply(Tape& t, Tape::Id f) {
    require(t.val(f).rank() == 3 && t.val(f).dim(0) == channels_,
            "SeBlock: channel mismatch");
    Tape::Id pooled = ops::global_avg_pool(t, f);
    Tape::Id h = ops::relu(t, fc1.apply(t, pooled));
    Tape::Id scales = ops::sigmoid(t, fc2.apply(t, h));
    return ops::scale_channels(t, f, scales);
}

// ---------------------------------------------------------------------------

GlamBlock::GlamBlock(std::string name, int channels, Options opts)
    : local_channel_conv(name + ".lc", opts.conv1d_kernel),
      local_reduce(name + ".lr", channels,
                   opts.reduced_channels > 0 ? opts.reduced_channels
                                             : std::max(channels / 8, 1),
                   1, 1, 0),
      local_dil1(name + ".ld1",
                 opts.reduced_channels > 0 ? opts.reduced_channels
                                           : std::max(channels / 8, 1),
                 opts.reduced_channels > 0 ? opts.reduced_channels
                                           : std::max(channels / 8, 1),
                 3, 1, 1, 1),
      local_dil3(name + ".ld3", local_dil1.in_channels(), local_dil1.in_channels(),
                 3, 1, 3, 3),
      local_dil5(name + ".ld5", local_dil1.in_channels(), local_dil1.in_channels(),
                 3, 1, 5, 5),
      local_collapse(name + ".lcol", 4 * local_dil1.in_channels(), 1, 1, 1, 0),
      global_key_conv(name + ".gk", opts.conv1d_kernel),
      global_query_conv(name + ".gq", opts.conv1d_kernel),
      spatial_key(name + ".sk", channels, local_dil1.in_channels(), 1, 1, 0),
      spatial_query(name + ".sq", channels, local_dil1.in_channels(), 1, 1, 0),
      spatial_value(name + ".sv", channels, channels, 1, 1, 0),
      fusion_logits(name + ".fuse"),
      channels_(channels),
      reduced_(local_dil1.in_channels()),
      opts_(opts) {
    fusion_logits.value = Tensor({3});
}

void GlamBlock::init(Rng& rng) {
    local_channel_conv.init(rng);
    local_reduce.init(rng);
    local_dil1.init(rng);
    local_dil3.init(rng);
    local_dil5.init(rng);
    local_collapse.init(rng);
    global_key_conv.init(rng);
    global_query_conv.init(rng);
    spatial_key.init(rng);
    spatial_query.init(rng);
    spatial_value.init(rng);
    std::fill(fusion_logits.value.v.begin(), fusion_logits.value.v.end(), 0.0);
}

void GlamBlock::collect(std::vector<nn::Parameter*>& out) {
    local_channel_conv.collect(out);
    local_reduce.collect(out);
    local_dil1.collect(out);
    local_dil3.collect(out);
    local_dil5.collect(out);
    local_collapse.collect(out);
    global_key_conv.collect(out);
    global_query_conv.collect(out);
    spatial_key.collect(out);
    spatial_query.collect(out);
    spatial_value.collect(out);
    out.push_back(&fusion_logits);
}

Tape::Id GlamBlock::local(Tape& t, Tape::Id f) {
    require(t.val(f).rank() == 3 && t.val(f).dim(0) == channels_,
            "GlamBlock::local: channel mismatch");
    // channel gate: pool -> 1-D conv -> sigmoid, residual embed
    Tape::Id gate = ops::sigmoid(
        t, local_channel_conv.apply(t, ops::global_avg_pool(t, f)));
    Tape::Id f_cl = ops::add(t, ops::scale_channels(t, f, gate), f);

    // spatial gate from the reduced projection at three dilation scales
    Tape::Id base = local_reduce.apply(t, f);
    Tape::Id cat = ops::concat_channels(
        t, {base, local_dil1.apply(t, base), local_dil3.apply(t, base),
            local_dil5.apply(t, base)});
    Tape::Id a_sl = ops::sigmoid(t, local_collapse.apply(t, cat));
    return ops::add(t, ops::mul_spatial(t, f_cl, a_sl), f_cl);
}

namespace {

double normalized_row_entropy(const Tensor& m) {
    const int rows = m.dim(0), cols = m.dim(1);
    if (cols < 2) return 1.0;
    double total = 0.0;
    for (int i = 0; i < rows; ++i) {
        double h = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double a = m.v[static_cast<std::size_t>(i) * cols + j];
            if (a > 0.0) h -= a * std::log(a);
        }
        total += h;
    }
    return total / (rows * std::log(static_cast<double>(cols)));
}

}  // namespace

Tape::Id GlamBlock::global(Tape& t, Tape::Id f) {
    const Tensor& fv = t.val(f);
    require(fv.rank() == 3 && fv.dim(0) == channels_,
            "GlamBlock::global: channel mismatch");
    const int c = channels_, h = fv.dim(1), w = fv.dim(2);
    const int hw = h * w;
    require(hw <= opts_.spatial_size_cap,
            "GlamBlock::global: spatial size " + std::to_string(hw) +
                " exceeds the attention cap " +
                std::to_string(opts_.spatial_size_cap) +
                "; apply GLAM at a deeper (smaller) feature level");

    // channel attention: positive key/query from the pooled descriptor
    Tape::Id pooled = ops::global_avg_pool(t, f);
    Tape::Id key_c = ops::sigmoid(t, global_key_conv.apply(t, pooled));
    Tape::Id query_c = ops::sigmoid(t, global_query_conv.apply(t, pooled));
    Tape::Id a_c = ops::softmax_rows(
        t, ops::matmul(t, ops::reshape(t, key_c, {c, 1}),
                       ops::reshape(t, query_c, {1, c})));
    channel_entropy_ = normalized_row_entropy(t.val(a_c));

    // value = the feature map itself, taken as hw x c
    Tape::Id value_c = ops::transpose2(t, ops::reshape(t, f, {c, hw}));
    Tape::Id g_c = ops::reshape(
        t, ops::transpose2(t, ops::matmul(t, value_c, a_c)), {c, h, w});
    Tape::Id f_cg = ops::mul(t, f, g_c);

    // spatial attention over positions; key/query reduced to c', value kept
    // at c channels so the attended map matches the feature shape
    Tape::Id key_s = ops::reshape(t, spatial_key.apply(t, f), {reduced_, hw});
    Tape::Id query_s = ops::reshape(t, spatial_query.apply(t, f), {reduced_, hw});
    Tape::Id value_s = ops::reshape(t, spatial_value.apply(t, f), {c, hw});
    Tape::Id a_s =
        ops::softmax_rows(t, ops::matmul(t, ops::transpose2(t, key_s), query_s));
    spatial_entropy_ = normalized_row_entropy(t.val(a_s));

    Tape::Id g_s = ops::reshape(t, ops::matmul(t, value_s, a_s), {c, h, w});
    return ops::add(t, ops::mul(t, f_cg, g_s), f_cg);
}

Tape::Id GlamBlock::fuse(Tape& t, Tape::Id f, Tape::Id f_local,
                         Tape::Id f_global) {
    const Tensor& fv = t.val(f);
    require(fv.same_shape(t.val(f_local)) && fv.same_shape(t.val(f_global)),
            "GlamBlock::fuse: shape mismatch");

    // softmax of the three logits (global, local, identity)
    const Tensor& lv = fusion_logits.value;
    double mx = std::max({lv.v[0], lv.v[1], lv.v[2]});
    double e0 = std::exp(lv.v[0] - mx), e1 = std::exp(lv.v[1] - mx),
           e2 = std::exp(lv.v[2] - mx);
    const double z = e0 + e1 + e2;
    const double wg = e0 / z, wl = e1 / z, wi = e2 / z;

    Tensor out(fv.shape);
    const Tensor& lvv = t.val(f_local);
    const Tensor& gvv = t.val(f_global);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = wg * gvv.v[i] + wl * lvv.v[i] + wi * fv.v[i];

    nn::Parameter* logits = &fusion_logits;
    return t.push(std::move(out), {f, f_local, f_global},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& fv2 = tt.val(f);
                      const Tensor& lv2 = tt.val(f_local);
                      const Tensor& gv2 = tt.val(f_global);
                      Tensor gf(fv2.shape), gl(fv2.shape), gg(fv2.shape);
                      double dwg = 0.0, dwl = 0.0, dwi = 0.0;
                      for (std::size_t i = 0; i < g.v.size(); ++i) {
                          gg.v[i] = wg * g.v[i];
                          gl.v[i] = wl * g.v[i];
                          gf.v[i] = wi * g.v[i];
                          dwg += g.v[i] * gv2.v[i];
                          dwl += g.v[i] * lv2.v[i];
                          dwi += g.v[i] * fv2.v[i];
                      }
                      // softmax jacobian back to the logits
                      const double dot = wg * dwg + wl * dwl + wi * dwi;
                      logits->ensure_grad();
                      logits->grad.v[0] += wg * (dwg - dot);
                      logits->grad.v[1] += wl * (dwl - dot);
                      logits->grad.v[2] += wi * (dwi - dot);
                      tt.accumulate(f, gf);
                      tt.accumulate(f_local, gl);
                      tt.accumulate(f_global, gg);
                  },
                  /*force_grad=*/true);
}

Tape::Id GlamBlock::apply(Tape& t, Tape::Id f) {
    Tape::Id f_l = local(t, f);
    Tape::Id f_g = global(t, f);
    return fuse(t, f, f_l, f_g);
}

}  // namespace tsgan
