#pragma once

#include <memory>

#include "tsgan/nn/layers.hpp"

namespace tsgan {

/// Squeeze-and-excitation channel attention: global average pool, a
/// c -> c/r -> c bottleneck with rectifier and sigmoid, then per-channel
/// rescaling. Output shape equals input shape; scales lie in (0,1).
class SeBlock : public nn::Module {
public:
    SeBlock(std::string name, int channels, int reduction = 16);

    void init(Rng& rng);
    nn::Tape::Id apply(nn::Tape& t, nn::Tape::Id f);
    void collect(std::vector<nn::Parameter*>& out) override;

    int hidden_dim() const { return hidden_; }

    nn::Linear fc1, fc2;

private:
    int channels_, hidden_;
};

/// Global-Local Attention Module. The local path combines an
/// average-pool/1-D-conv channel gate with a multi-dilation spatial gate;
/// the global path runs softmax self-attention over channels and over
/// spatial positions; a 3-way softmax of learned scalars fuses
/// {global, local, identity}.
class GlamBlock : public nn::Module {
public:
    struct Options {
        int conv1d_kernel = 3;      // channel-attention 1-D kernel
        int reduced_channels = 0;   // c' for spatial branches; 0 = max(c/8, 1)
        int spatial_size_cap = 4096;  // largest h*w the hw x hw attention allows
    };

    GlamBlock(std::string name, int channels, Options opts = {});

    void init(Rng& rng);

    /// Local attention (channel gate then spatial gate, residual at both).
    nn::Tape::Id local(nn::Tape& t, nn::Tape::Id f);
    /// Global attention (channel then spatial softmax attention).
    nn::Tape::Id global(nn::Tape& t, nn::Tape::Id f);
    /// softmax(w_g, w_l, w) combination of global, local, and identity maps.
    nn::Tape::Id fuse(nn::Tape& t, nn::Tape::Id f, nn::Tape::Id f_local,
                      nn::Tape::Id f_global);
    /// fuse(f, local(f), global(f))
    nn::Tape::Id apply(nn::Tape& t, nn::Tape::Id f);

    void collect(std::vector<nn::Parameter*>& out) override;

    int reduced_channels() const { return reduced_; }

    /// Normalized mean row entropy (0..1) of the attention matrices from the
    /// most recent global() call; low spatial entropy flags the known
    /// single-point collapse failure across seeds.
    double last_channel_entropy() const { return channel_entropy_; }
    double last_spatial_entropy() const { return spatial_entropy_; }

    // local path
    nn::Conv1d local_channel_conv;
    nn::Conv2d local_reduce, local_dil1, local_dil3, local_dil5, local_collapse;
    // global path
    nn::Conv1d global_key_conv, global_query_conv;
    nn::Conv2d spatial_key, spatial_query, spatial_value;
    // fusion logits (w_g, w_l, w before softmax)
    nn::Parameter fusion_logits;

private:
    int channels_, reduced_;
    Options opts_;
    double channel_entropy_ = 0.0;
    double spatial_entropy_ = 0.0;
};

}  // namespace tsgan
