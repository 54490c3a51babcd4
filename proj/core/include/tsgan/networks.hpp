#pragma once

#include <memory>
#include <optional>

#include "tsgan/attention.hpp"
#include "tsgan/objectives.hpp"

namespace tsgan {

enum class Variant { tsgan_v1, tsgan_v2, tsgan_v3, de_pix2pix, pix2pix };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

/// Architecture + ablation-row configuration. Attention flags derive from
/// the variant, so the v1/v2/v3 constraints hold by construction.
struct ModelSpec {
    Variant variant = Variant::tsgan_v1;
    bool use_s2_change_input = true;
    LossMode loss_mode = LossMode::cwl1;
    double gamma = 4.0;
    int base_width = 64;   // channel plan {b, 2b, 4b, 8b, 8b, ...}
    int patch_size = 256;  // power of two, >= 64
    std::uint64_t seed = 0;

    bool use_se() const {
        return variant == Variant::tsgan_v2 || variant == Variant::tsgan_v3;
    }
    bool use_glam() const { return variant == Variant::tsgan_v3; }
    bool dual_input() const { return variant != Variant::pix2pix; }
    bool has_entry_convs() const {
        return variant == Variant::tsgan_v1 || variant == Variant::tsgan_v2 ||
               variant == Variant::tsgan_v3;
    }
    int sar_in_channels() const {
        return dual_input() ? (use_s2_change_input ? 4 : 1) : 0;
    }
    int optical_in_channels() const {
        if (!dual_input()) return kOpticalBands;
        return kOpticalBands + (use_s2_change_input ? 3 : 0);
    }

    void validate() const;
    std::string describe() const;
};

ModelSpec model_spec_from_config(const class KeyValueConfig& cfg);

/// Network-side tensors in [-1,1]; the SAR branch is absent (0 channels)
/// for the plain translation baseline.
struct GeneratorInput {
    nn::Tensor sar_branch;      // {1|4, ps, ps} or empty
    nn::Tensor optical_branch;  // {6|9, ps, ps}
};

/// U-Net generator covering every variant: dual encoders with stride-1
/// entry convolutions (3x3 SAR, 5x5 optical) and a stride-1 3x3 exit for
/// the temporal-shifting family; plain stride-2 entries and a transposed
/// final layer for the translation baselines. Every decoder level receives
/// skip concatenations from all encoders at the matching resolution.
class UnetGenerator : public nn::Module {
public:
    explicit UnetGenerator(const ModelSpec& spec);

    /// sar must be -1 iff the variant has no SAR input.
    nn::Tape::Id apply(nn::Tape& t, nn::Tape::Id sar, nn::Tape::Id optical);

    /// Forward-only convenience on a private tape. Output {1, ps, ps} in [-1,1].
    nn::Tensor forward(const GeneratorInput& in);

    void collect(std::vector<nn::Parameter*>& out) override;

    const ModelSpec& spec() const { return spec_; }
    /// Spatial sizes of the skip tensors consumed by the decoder, deepest
    /// first; the last entry is the first skip connection of the net.
    const std::vector<int>& skip_resolutions() const { return skip_res_; }
    const GlamBlock* glam_sar() const { return glam_sar_.get(); }
    const GlamBlock* glam_opt() const { return glam_opt_.get(); }

private:
    struct DownBlock {
        nn::Conv2d conv;
        std::unique_ptr<nn::InstanceNorm> norm;
    };
    struct UpBlock {
        nn::ConvTranspose2d deconv;
        std::unique_ptr<nn::InstanceNorm> norm;
    };

    std::vector<std::unique_ptr<DownBlock>> build_encoder(const std::string& name,
                                                          int in_ch);
    std::vector<nn::Tape::Id> run_encoder(
        nn::Tape& t, nn::Tape::Id x, nn::Conv2d* entry,
        std::vector<std::unique_ptr<DownBlock>>& downs);

    ModelSpec spec_;
    int levels_;  // stride-2 stages per encoder
    std::unique_ptr<nn::Conv2d> entry_sar_, entry_opt_;
    std::vector<std::unique_ptr<DownBlock>> downs_sar_, downs_opt_;
    std::unique_ptr<GlamBlock> glam_sar_, glam_opt_;
    std::unique_ptr<SeBlock> se_;
    std::vector<std::unique_ptr<UpBlock>> ups_;
    std::unique_ptr<nn::Conv2d> exit_conv_;  // temporal-shifting family only
    std::vector<int> skip_res_;
};

/// PatchGAN discriminator emitting a grid of logits (30x30 for 256 inputs).
/// Dual form: two parallel encoders, candidate stacked on each branch input,
/// fused after the second block. Single form: the classic 70x70 patch
/// discriminator on (optical, candidate).
class PatchDiscriminator : public nn::Module {
public:
    explicit PatchDiscriminator(const ModelSpec& spec);

    nn::Tape::Id apply(nn::Tape& t, nn::Tape::Id candidate, nn::Tape::Id sar,
                       nn::Tape::Id optical);

    void collect(std::vector<nn::Parameter*>& out) override;

    /// (kernel, stride) of the convolution chain from input to one output
    /// score, for the receptive-field oracle.
    std::vector<std::pair<int, int>> layer_geometry() const;

private:
    struct Block {
        nn::Conv2d conv;
        std::unique_ptr<nn::InstanceNorm> norm;
    };
    ModelSpec spec_;
    std::vector<std::unique_ptr<Block>> stream_a_, stream_b_, trunk_;
};

/// Generator + discriminator pair with deterministic seeded initialization.
struct GanModel {
    explicit GanModel(const ModelSpec& spec);

    ModelSpec spec;
    std::unique_ptr<UnetGenerator> generator;
    std::unique_ptr<PatchDiscriminator> discriminator;

    std::vector<nn::Parameter*> all_parameters();
};

}  // namespace tsgan
