#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tsgan/nn/ops.hpp"

namespace tsgan::nn {

/// Learnable tensor plus its accumulated gradient and optimizer state.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m, adam_v;  // sized lazily by the optimizer

    explicit Parameter(std::string n = "") : name(std::move(n)) {}

    void ensure_grad() {
        if (!grad.same_shape(value)) grad = Tensor::zeros(value.shape);
    }
    void zero_grad() {
        ensure_grad();
        std::fill(grad.v.begin(), grad.v.end(), 0.0);
    }
    void accumulate(const Tensor& g) {
        ensure_grad();
        for (std::size_t i = 0; i < grad.v.size(); ++i) grad.v[i] += g.v[i];
    }
};

/// Anything owning parameters. Composite modules forward collect() to their
/// children so checkpointing and the optimizer see one flat list.
class Module {
public:
    virtual ~Module() = default;
    virtual void collect(std::vector<Parameter*>& out) = 0;

    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out;
        collect(out);
        return out;
    }
    void zero_grad() {
        for (Parameter* p : parameters()) p->zero_grad();
    }
    std::int64_t parameter_count() {
        std::int64_t n = 0;
        for (Parameter* p : parameters()) n += p->value.numel();
        return n;
    }
};

/// Draw N(0, std) weights; biases and norm shifts start at zero.
void init_normal(Parameter& p, Rng& rng, double stddev);

/// 2-D convolution over {c,h,w}, weight layout {co,ci,kh,kw}. im2col + GEMM,
/// chunked over output pixels to bound scratch memory.
class Conv2d : public Module {
public:
    Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride,
           int pad, int dilation = 1, bool bias = true);

    void init(Rng& rng, double stddev = 0.02);
    Tape::Id apply(Tape& t, Tape::Id x);
    void collect(std::vector<Parameter*>& out) override;

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

    Parameter weight, bias;

private:
    int in_ch_, out_ch_, k_, stride_, pad_, dil_;
    bool has_bias_;
};

/// 2-D transposed convolution (stride-2 upsampling), weight {ci,co,kh,kw}.
class ConvTranspose2d : public Module {
public:
    ConvTranspose2d(std::string name, int in_ch, int out_ch, int kernel = 4,
                    int stride = 2, int pad = 1, bool bias = true);

    void init(Rng& rng, double stddev = 0.02);
    Tape::Id apply(Tape& t, Tape::Id x);
    void collect(std::vector<Parameter*>& out) override;

    Parameter weight, bias;

private:
    int in_ch_, out_ch_, k_, stride_, pad_;
    bool has_bias_;
};

/// 1-D convolution over a length-n vector (single in/out channel), odd
/// kernel, zero padding preserving length. Used for GLAM channel attention.
class Conv1d : public Module {
public:
    Conv1d(std::string name, int kernel, bool bias = true);

    void init(Rng& rng, double stddev = 0.02);
    Tape::Id apply(Tape& t, Tape::Id x);
    void collect(std::vector<Parameter*>& out) override;

    Parameter weight, bias;

private:
    int k_;
    bool has_bias_;
};

/// Fully connected {in} -> {out}.
class Linear : public Module {
public:
    Linear(std::string name, int in_dim, int out_dim, bool bias = true);

    void init(Rng& rng, double stddev = 0.02);
    Tape::Id apply(Tape& t, Tape::Id x);
    void collect(std::vector<Parameter*>& out) override;

    Parameter weight, bias;

private:
    int in_, out_;
    bool has_bias_;
};

/// Instance normalization over each channel's h*w plane with learned gain
/// and shift. Batch-size independent, so gradient accumulation over a batch
/// equals true batched training.
class InstanceNorm : public Module {
public:
    InstanceNorm(std::string name, int channels, double eps = 1e-5);

    void init(Rng& rng);
    Tape::Id apply(Tape& t, Tape::Id x);
    void collect(std::vector<Parameter*>& out) override;

    Parameter gain, shift;

private:
    int c_;
    double eps_;
};

}  // namespace tsgan::nn
