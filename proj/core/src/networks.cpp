#include "tsgan/networks.hpp"

#include "tsgan/config.hpp"

namespace tsgan {

namespace ops = nn::ops;
using nn::Tape;
using nn::Tensor;

Variant variant_from_string(const std::string& s) {
    if (s == "tsgan_v1") return Variant::tsgan_v1;
    if (s == "tsgan_v2") return Variant::tsgan_v2;
    if (s == "tsgan_v3") return Variant::tsgan_v3;
    if (s == "de_pix2pix") return Variant::de_pix2pix;
    if (s == "pix2pix") return Variant::pix2pix;
    fail("unknown model variant '" + s + "'");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::tsgan_v1: return "tsgan_v1";
        case Variant::tsgan_v2: return "tsgan_v2";
        case Variant::tsgan_v3: return "tsgan_v3";
        case Variant::de_pix2pix: return "de_pix2pix";
        case Variant::pix2pix: return "pix2pix";
    }
    return "?";
}

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_int(int v) {
    int n = 0;
    while ((1 << n) < v) ++n;
    return n;
}

}  // namespace

void ModelSpec::validate() const {
    require(is_pow2(patch_size) && patch_size >= 64,
            "ModelSpec: patch_size must be a power of two >= 64");
    require(base_width >= 4, "ModelSpec: base_width must be at least 4");
    require(gamma >= 0.0, "ModelSpec: gamma must be nonnegative");
    if (variant == Variant::pix2pix)
        require(!use_s2_change_input,
                "ModelSpec: the plain translation baseline takes no change input");
}

std::string ModelSpec::describe() const {
    std::string s = to_string(variant);
    s += use_s2_change_input ? "+s2cm" : "-s2cm";
    s += "+" + to_string(loss_mode);
    return s;
}

ModelSpec model_spec_from_config(const KeyValueConfig& cfg) {
    ModelSpec spec;
    spec.variant = variant_from_string(cfg.get_string("variant", "tsgan_v1"));
    spec.use_s2_change_input =
        cfg.get_bool("s2_change_input", spec.variant != Variant::pix2pix);
    spec.loss_mode = loss_mode_from_string(cfg.get_string(
        "loss", spec.variant == Variant::pix2pix ? "l1" : "cwl1"));
    spec.gamma = cfg.get_double("gamma", 4.0);
    spec.base_width = cfg.get_int("base_width", 64);
    spec.patch_size = cfg.get_int("patch_size", 256);
    spec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// channel plan entry for stride-2 stage i: base * min(2^i, 8)
int plan_width(int base, int i) { return base * std::min(1 << i, 8); }

}  // namespace

UnetGenerator::UnetGenerator(const ModelSpec& spec) : spec_(spec) {
    spec_.validate();
    const int b = spec_.base_width;
    const int n = levels_ = spec_.has_entry_convs() ? log2_int(spec_.patch_size) - 1
                                                    : log2_int(spec_.patch_size);

    // encoder channels by level: level 0 is the entry output (temporal-
    // shifting family only), level j>0 the output of stride-2 stage j-1
    auto enc_ch = [&](int level) {
        return level == 0 ? b : plan_width(b, level - 1);
    };

    if (spec_.has_entry_convs()) {
        entry_sar_ = std::make_unique<nn::Conv2d>("g.sar.entry",
                                                  spec_.sar_in_channels(), b, 3, 1, 1);
        entry_opt_ = std::make_unique<nn::Conv2d>(
            "g.opt.entry", spec_.optical_in_channels(), b, 5, 1, 2);
    }

    auto build_downs = [&](const std::string& name, int raw_in) {
        std::vector<std::unique_ptr<DownBlock>> downs;
        for (int i = 0; i < n; ++i) {
            const int in_ch = i == 0
                                  ? (spec_.has_entry_convs() ? b : raw_in)
                                  : plan_width(b, i - 1);
            const int out_ch = plan_width(b, i);
            auto blk = std::make_unique<DownBlock>(DownBlock{
                nn::Conv2d(name + ".d" + std::to_string(i), in_ch, out_ch, 4, 2, 1),
                nullptr});
            if (i > 0 && i < n - 1)
                blk->norm = std::make_unique<nn::InstanceNorm>(
                    name + ".d" + std::to_string(i) + ".n", out_ch);
            downs.push_back(std::move(blk));
        }
        return downs;
    };

    if (spec_.dual_input()) downs_sar_ = build_downs("g.sar", spec_.sar_in_channels());
    downs_opt_ = build_downs("g.opt", spec_.optical_in_channels());

    const int deep_ch = plan_width(b, n - 1);
    if (spec_.use_glam()) {
        glam_sar_ = std::make_unique<GlamBlock>("g.glam_sar", deep_ch);
        glam_opt_ = std::make_unique<GlamBlock>("g.glam_opt", deep_ch);
    }
    const int bott_ch = spec_.dual_input() ? 2 * deep_ch : deep_ch;
    if (spec_.use_se()) se_ = std::make_unique<SeBlock>("g.se", bott_ch, 16);

    // decoder: upsample level L -> L-1, then concatenate every encoder's
    // level L-1 features. The lowest level handled by an up-block is 1 for
    // the baselines (whose final up emits the image) and 0 via the exit
    // conv for the temporal-shifting family.
    const int skips_per_level = spec_.dual_input() ? 2 : 1;
    const int lowest_skip = spec_.has_entry_convs() ? 0 : 1;
    int in_ch = bott_ch;
    for (int level = n; level >= 1; --level) {
        const bool final_up = !spec_.has_entry_convs() && level == 1;
        const int out_ch = final_up ? 1 : enc_ch(level - 1);
        auto up = std::make_unique<UpBlock>(UpBlock{
            nn::ConvTranspose2d("g.up" + std::to_string(level), in_ch, out_ch),
            nullptr});
        if (!final_up)
            up->norm = std::make_unique<nn::InstanceNorm>(
                "g.up" + std::to_string(level) + ".n", out_ch);
        ups_.push_back(std::move(up));
        if (level - 1 >= lowest_skip) {
            skip_res_.push_back(spec_.patch_size >> (level - 1));
            // construction-time wiring check: the decoder feature emerging at
            // level-1 must match the skip channel count it concatenates with
            require(out_ch == enc_ch(level - 1) || final_up,
                    "UnetGenerator: decoder/skip channel mismatch");
            in_ch = out_ch + skips_per_level * enc_ch(level - 1);
        }
    }
    if (spec_.has_entry_convs()) {
        exit_conv_ = std::make_unique<nn::Conv2d>("g.exit", in_ch, 1, 3, 1, 1);
    }

    Rng rng(spec_.seed * 0x9E3779B97F4A7C15ull + 0x1234567u);
    if (entry_sar_) entry_sar_->init(rng);
    if (entry_opt_) entry_opt_->init(rng);
    for (auto& d : downs_sar_) {
        d->conv.init(rng);
        if (d->norm) d->norm->init(rng);
    }
    for (auto& d : downs_opt_) {
        d->conv.init(rng);
        if (d->norm) d->norm->init(rng);
    }
    if (glam_sar_) glam_sar_->init(rng);
    if (glam_opt_) glam_opt_->init(rng);
    if (se_) se_->init(rng);
    for (auto& u : ups_) {
        u->deconv.init(rng);
        if (u->norm) u->norm->init(rng);
    }
    if (exit_conv_) exit_conv_->init(rng);
}

void UnetGenerator::collect(std::vector<nn::Parameter*>& out) {
    if (entry_sar_) entry_sar_->collect(out);
    if (entry_opt_) entry_opt_->collect(out);
    for (auto& d : downs_sar_) {
        d->conv.collect(out);
        if (d->norm) d->norm->collect(out);
    }
    for (auto& d : downs_opt_) {
        d->conv.collect(out);
        if (d->norm) d->norm->collect(out);
    }
    if (glam_sar_) glam_sar_->collect(out);
    if (glam_opt_) glam_opt_->collect(out);
    if (se_) se_->collect(out);
    for (auto& u : ups_) {
        u->deconv.collect(out);
        if (u->norm) u->norm->collect(out);
    }
    if (exit_conv_) exit_conv_->collect(out);
}

std::vector<Tape::Id> UnetGenerator::run_encoder(
    Tape& t, Tape::Id x, nn::Conv2d* entry,
    std::vector<std::unique_ptr<DownBlock>>& downs) {
    std::vector<Tape::Id> feats(static_cast<std::size_t>(levels_) + 1, -1);
    Tape::Id cur = x;
    if (entry) {
        cur = ops::leaky_relu(t, entry->apply(t, cur));
        feats[0] = cur;
    }
    for (int i = 0; i < levels_; ++i) {
        cur = downs[static_cast<std::size_t>(i)]->conv.apply(t, cur);
        if (downs[static_cast<std::size_t>(i)]->norm)
            cur = downs[static_cast<std::size_t>(i)]->norm->apply(t, cur);
        cur = ops::leaky_relu(t, cur);
        feats[static_cast<std::size_t>(i) + 1] = cur;
    }
    return feats;
}

Tape::Id UnetGenerator::apply(Tape& t, Tape::Id sar, Tape::Id optical) {
    const Tensor& ov = t.val(optical);
    require(ov.rank() == 3 && ov.dim(0) == spec_.optical_in_channels(),
            "generator: optical branch channel mismatch with the model flags");
    require(ov.dim(1) == spec_.patch_size && ov.dim(2) == spec_.patch_size,
            "generator: input spatial size must equal the configured patch size");
    if (spec_.dual_input()) {
        require(sar >= 0, "generator: this variant requires the SAR branch");
        const Tensor& sv = t.val(sar);
        require(sv.rank() == 3 && sv.dim(0) == spec_.sar_in_channels(),
                "generator: SAR branch channel mismatch with the model flags");
        require(sv.dim(1) == ov.dim(1) && sv.dim(2) == ov.dim(2),
                "generator: branch spatial sizes differ");
    } else {
        require(sar < 0, "generator: the translation baseline takes no SAR input");
    }

    std::vector<Tape::Id> enc_sar, enc_opt;
    if (spec_.dual_input())
        enc_sar = run_encoder(t, sar, entry_sar_.get(), downs_sar_);
    enc_opt = run_encoder(t, optical, entry_opt_.get(), downs_opt_);

    const std::size_t n = static_cast<std::size_t>(levels_);
    Tape::Id bott;
    if (spec_.dual_input()) {
        Tape::Id deep_sar = enc_sar[n];
        Tape::Id deep_opt = enc_opt[n];
        if (spec_.use_glam()) {
            deep_sar = glam_sar_->apply(t, deep_sar);
            deep_opt = glam_opt_->apply(t, deep_opt);
        }
        bott = ops::concat_channels(t, {deep_sar, deep_opt});
    } else {
        bott = enc_opt[n];
    }
    if (spec_.use_se()) bott = se_->apply(t, bott);

    const int lowest_skip = spec_.has_entry_convs() ? 0 : 1;
    Tape::Id cur = bott;
    std::size_t up_idx = 0;
    for (int level = levels_; level >= 1; --level, ++up_idx) {
        UpBlock& up = *ups_[up_idx];
        const bool final_up = !spec_.has_entry_convs() && level == 1;
        cur = up.deconv.apply(t, cur);
        if (final_up) return ops::tanh_act(t, cur);
        if (up.norm) cur = up.norm->apply(t, cur);
        cur = ops::relu(t, cur);
        if (level - 1 >= lowest_skip) {
            std::vector<Tape::Id> cat = {cur};
            if (spec_.dual_input())
                cat.push_back(enc_sar[static_cast<std::size_t>(level - 1)]);
            cat.push_back(enc_opt[static_cast<std::size_t>(level - 1)]);
            cur = ops::concat_channels(t, cat);
        }
    }
    return ops::tanh_act(t, exit_conv_->apply(t, cur));
}

Tensor UnetGenerator::forward(const GeneratorInput& in) {
    Tape t;
    Tape::Id sar = -1;
    if (spec_.dual_input()) sar = t.constant(in.sar_branch);
    Tape::Id opt = t.constant(in.optical_branch);
    return t.val(apply(t, sar, opt));
}

// ---------------------------------------------------------------------------
// Discriminator

PatchDiscriminator::PatchDiscriminator(const ModelSpec& spec) : spec_(spec) {
    const int b = spec_.base_width;
    auto block = [&](const std::string& name, int in_ch, int out_ch, int stride,
                     bool norm) {
        auto blk = std::make_unique<Block>(
            Block{nn::Conv2d(name, in_ch, out_ch, 4, stride, 1), nullptr});
        if (norm)
            blk->norm = std::make_unique<nn::InstanceNorm>(name + ".n", out_ch);
        return blk;
    };

    if (spec_.dual_input()) {
        // each stream: candidate stacked on one branch input, two stride-2 blocks
        stream_a_.push_back(block("d.a0", 1 + spec_.sar_in_channels(), b, 2, false));
        stream_a_.push_back(block("d.a1", b, 2 * b, 2, true));
        stream_b_.push_back(
            block("d.b0", 1 + spec_.optical_in_channels(), b, 2, false));
        stream_b_.push_back(block("d.b1", b, 2 * b, 2, true));
        trunk_.push_back(block("d.t0", 4 * b, 4 * b, 2, true));
        trunk_.push_back(block("d.t1", 4 * b, 8 * b, 1, true));
        trunk_.push_back(block("d.t2", 8 * b, 1, 1, false));
    } else {
        trunk_.push_back(
            block("d.t0", 1 + spec_.optical_in_channels(), b, 2, false));
        trunk_.push_back(block("d.t1", b, 2 * b, 2, true));
        trunk_.push_back(block("d.t2", 2 * b, 4 * b, 2, true));
        trunk_.push_back(block("d.t3", 4 * b, 8 * b, 1, true));
        trunk_.push_back(block("d.t4", 8 * b, 1, 1, false));
    }

    Rng rng(spec_.seed * 0x9E3779B97F4A7C15ull + 0x7654321u);
    for (auto* vec : {&stream_a_, &stream_b_, &trunk_})
        for (auto& blk : *vec) {
            blk->conv.init(rng);
            if (blk->norm) blk->norm->init(rng);
        }
}

void PatchDiscriminator::collect(std::vector<nn::Parameter*>& out) {
    for (auto* vec : {&stream_a_, &stream_b_, &trunk_})
        for (auto& blk : *vec) {
            blk->conv.collect(out);
            if (blk->norm) blk->norm->collect(out);
        }
}

std::vector<std::pair<int, int>> PatchDiscriminator::layer_geometry() const {
    std::vector<std::pair<int, int>> geom;
    if (spec_.dual_input()) {
        geom = {{4, 2}, {4, 2}};  // one stream's path to the fusion point
    }
    for (const auto& blk : trunk_) {
        (void)blk;
    }
    if (spec_.dual_input()) {
        geom.push_back({4, 2});
        geom.push_back({4, 1});
        geom.push_back({4, 1});
    } else {
        geom = {{4, 2}, {4, 2}, {4, 2}, {4, 1}, {4, 1}};
    }
    return geom;
}

Tape::Id PatchDiscriminator::apply(Tape& t, Tape::Id candidate, Tape::Id sar,
                                   Tape::Id optical) {
    const Tensor& cv = t.val(candidate);
    require(cv.rank() == 3 && cv.dim(0) == 1, "discriminator: candidate must be 1ch");
    const Tensor& ov = t.val(optical);
    require(cv.dim(1) == ov.dim(1) && cv.dim(2) == ov.dim(2),
            "discriminator: candidate/input spatial mismatch");

    auto run = [&](std::vector<std::unique_ptr<Block>>& blocks, Tape::Id x,
                   bool last_is_logits) {
        Tape::Id cur = x;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            cur = blocks[i]->conv.apply(t, cur);
            const bool last = last_is_logits && i + 1 == blocks.size();
            if (!last) {
                if (blocks[i]->norm) cur = blocks[i]->norm->apply(t, cur);
                cur = ops::leaky_relu(t, cur);
            }
        }
        return cur;
    };

    if (spec_.dual_input()) {
        require(sar >= 0, "discriminator: missing SAR branch input");
        const Tensor& sv = t.val(sar);
        require(sv.dim(1) == cv.dim(1) && sv.dim(2) == cv.dim(2),
                "discriminator: candidate/SAR spatial mismatch");
        Tape::Id a = run(stream_a_, ops::concat_channels(t, {candidate, sar}), false);
        Tape::Id b = run(stream_b_, ops::concat_channels(t, {candidate, optical}), false);
        return run(trunk_, ops::concat_channels(t, {a, b}), true);
    }
    require(sar < 0, "discriminator: single form takes no SAR input");
    return run(trunk_, ops::concat_channels(t, {optical, candidate}), true);
}

// ---------------------------------------------------------------------------

GanModel::GanModel(const ModelSpec& s)
    : spec(s),
      generator(std::make_unique<UnetGenerator>(s)),
      discriminator(std::make_unique<PatchDiscriminator>(s)) {}

std::vector<nn::Parameter*> GanModel::all_parameters() {
    std::vector<nn::Parameter*> out = generator->parameters();
    std::vector<nn::Parameter*> d = discriminator->parameters();
    out.insert(out.end(), d.begin(), d.end());
    return out;
}

}  // namespace tsgan
