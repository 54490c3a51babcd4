#include "tsgan/nn/layers.hpp"

#include <Eigen/Core>

#include <cmath>

namespace tsgan::nn {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>;
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

// scratch cap for im2col buffers (doubles)
constexpr std::int64_t kMaxColDoubles = std::int64_t(1) << 23;

/// Gather k*k patches for output pixels [pix0, pix0+npix) into a
/// (ci*k*k) x npix column matrix. Out-of-bounds taps read zero.
void im2col_chunk(const double* x, int ci, int h, int w, int k, int s, int p,
                  int d, int ow, int pix0, int npix, double* col) {
    const int kk = k * k;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < ci; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                double* row = col + (static_cast<std::size_t>(c) * kk + ky * k + kx) *
                                        npix;
                for (int i = 0; i < npix; ++i) {
                    const int pp = pix0 + i;
                    const int oy = pp / ow, ox = pp % ow;
                    const int iy = oy * s - p + ky * d;
                    const int ix = ox * s - p + kx * d;
                    row[i] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                 ? x[(static_cast<std::size_t>(c) * h + iy) * w + ix]
                                 : 0.0;
                }
            }
        }
    }
}

/// Scatter-add the inverse of im2col_chunk.
void col2im_add_chunk(const double* col, int ci, int h, int w, int k, int s,
                      int p, int d, int ow, int pix0, int npix, double* x) {
    const int kk = k * k;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < ci; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const double* row =
                    col + (static_cast<std::size_t>(c) * kk + ky * k + kx) * npix;
                for (int i = 0; i < npix; ++i) {
                    const int pp = pix0 + i;
                    const int oy = pp / ow, ox = pp % ow;
                    const int iy = oy * s - p + ky * d;
                    const int ix = ox * s - p + kx * d;
                    if (iy >= 0 && iy < h && ix >= 0 && ix < w)
                        x[(static_cast<std::size_t>(c) * h + iy) * w + ix] += row[i];
                }
            }
        }
    }
}

int chunk_pixels(int rows, std::int64_t total_pixels) {
    const std::int64_t cap = std::max<std::int64_t>(1, kMaxColDoubles / rows);
    return static_cast<int>(std::min<std::int64_t>(total_pixels, cap));
}

}  // namespace

void init_normal(Parameter& p, Rng& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& v : p.value.v) v = dist(rng);
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride,
               int pad, int dilation, bool bias)
    : weight(name + ".w"),
      bias(name + ".b"),
      in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      stride_(stride),
      pad_(pad),
      dil_(dilation),
      has_bias_(bias) {
    weight.value = Tensor({out_ch, in_ch, kernel, kernel});
    if (has_bias_) this->bias.value = Tensor({out_ch});
}

void Conv2d::init(Rng& rng, double stddev) { init_normal(weight, rng, stddev); }

void Conv2d::collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    if (has_bias_) out.push_back(&bias);
}

Tape::Id Conv2d::apply(Tape& t, Tape::Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 3 && xv.dim(0) == in_ch_,
            "Conv2d " + weight.name + ": input channel mismatch");
    const int h = xv.dim(1), w = xv.dim(2);
    const int oh = (h + 2 * pad_ - dil_ * (k_ - 1) - 1) / stride_ + 1;
    const int ow = (w + 2 * pad_ - dil_ * (k_ - 1) - 1) / stride_ + 1;
    require(oh >= 1 && ow >= 1, "Conv2d " + weight.name + ": input too small");

    const int rows = in_ch_ * k_ * k_;
    const std::int64_t ohw = static_cast<std::int64_t>(oh) * ow;
    const int chunk = chunk_pixels(rows, ohw);

    Tensor out({out_ch_, oh, ow});
    std::vector<double> col(static_cast<std::size_t>(rows) * chunk);
    ConstMatMap W(weight.value.v.data(), out_ch_, rows);
    for (std::int64_t pix0 = 0; pix0 < ohw; pix0 += chunk) {
        const int npix = static_cast<int>(std::min<std::int64_t>(chunk, ohw - pix0));
        im2col_chunk(xv.v.data(), in_ch_, h, w, k_, stride_, pad_, dil_, ow,
                     static_cast<int>(pix0), npix, col.data());
        ConstMatMap C(col.data(), rows, npix);
        // output pixels are contiguous, so write a strided block per channel
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>,
                   0, Eigen::OuterStride<>>
            Y(out.v.data() + pix0, out_ch_, npix, Eigen::OuterStride<>(ohw));
        Y.noalias() = W * C;
    }
    if (has_bias_) {
        for (int o = 0; o < out_ch_; ++o) {
            const double b = bias.value.v[static_cast<std::size_t>(o)];
            double* plane = out.v.data() + static_cast<std::size_t>(o) * ohw;
            for (std::int64_t i = 0; i < ohw; ++i) plane[i] += b;
        }
    }

    Conv2d* self_layer = this;
    const int ci = in_ch_, co = out_ch_, k = k_, s = stride_, p = pad_, d = dil_;
    const bool hb = has_bias_;
    return t.push(std::move(out), {x},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& xin = tt.val(x);
                      const std::int64_t pix_total = static_cast<std::int64_t>(oh) * ow;
                      const int rows2 = ci * k * k;
                      const int chunk2 = chunk_pixels(rows2, pix_total);

                      self_layer->weight.ensure_grad();
                      MatMap GW(self_layer->weight.grad.v.data(), co, rows2);
                      ConstMatMap W2(self_layer->weight.value.v.data(), co, rows2);

                      const bool need_dx = tt.tracks_grad(x);
                      Tensor gx;
                      if (need_dx) gx = Tensor::zeros(xin.shape);

                      std::vector<double> col2(static_cast<std::size_t>(rows2) * chunk2);
                      std::vector<double> dcol;
                      if (need_dx) dcol.resize(col2.size());

                      for (std::int64_t pix0 = 0; pix0 < pix_total; pix0 += chunk2) {
                          const int npix = static_cast<int>(
                              std::min<std::int64_t>(chunk2, pix_total - pix0));
                          im2col_chunk(xin.v.data(), ci, h, w, k, s, p, d, ow,
                                       static_cast<int>(pix0), npix, col2.data());
                          ConstMatMap C(col2.data(), rows2, npix);
                          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                         Eigen::Dynamic,
                                                         Eigen::RowMajor>,
                                     0, Eigen::OuterStride<>>
                              G(g.v.data() + pix0, co, npix,
                                Eigen::OuterStride<>(pix_total));
                          GW.noalias() += G * C.transpose();
                          if (need_dx) {
                              MatMap DC(dcol.data(), rows2, npix);
                              DC.noalias() = W2.transpose() * G;
                              col2im_add_chunk(dcol.data(), ci, h, w, k, s, p, d, ow,
                                               static_cast<int>(pix0), npix,
                                               gx.v.data());
                          }
                      }
                      if (hb) {
                          self_layer->bias.ensure_grad();
                          for (int o = 0; o < co; ++o) {
                              double acc = 0.0;
                              const double* plane =
                                  g.v.data() + static_cast<std::size_t>(o) * pix_total;
                              for (std::int64_t i = 0; i < pix_total; ++i)
                                  acc += plane[i];
                              self_layer->bias.grad.v[static_cast<std::size_t>(o)] +=
                                  acc;
                          }
                      }
                      if (need_dx) tt.accumulate(x, gx);
                  },
                  /*force_grad=*/true);
}

// ---------------------------------------------------------------------------
// ConvTranspose2d

ConvTranspose2d::ConvTranspose2d(std::string name, int in_ch, int out_ch,
                                 int kernel, int stride, int pad, bool bias)
    : weight(name + ".w"),
      bias(name + ".b"),
      in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      stride_(stride),
      pad_(pad),
      has_bias_(bias) {
    weight.value = Tensor({in_ch, out_ch, kernel, kernel});
    if (has_bias_) this->bias.value = Tensor({out_ch});
}

void ConvTranspose2d::init(Rng& rng, double stddev) {
    init_normal(weight, rng, stddev);
}

void ConvTranspose2d::collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    if (has_bias_) out.push_back(&bias);
}

Tape::Id ConvTranspose2d::apply(Tape& t, Tape::Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 3 && xv.dim(0) == in_ch_,
            "ConvTranspose2d " + weight.name + ": input channel mismatch");
    const int ih = xv.dim(1), iw = xv.dim(2);
    const int oh = (ih - 1) * stride_ - 2 * pad_ + k_;
    const int ow = (iw - 1) * stride_ - 2 * pad_ + k_;
    require(oh >= 1 && ow >= 1, "ConvTranspose2d: input too small");

    const int rows = out_ch_ * k_ * k_;
    const std::int64_t ihw = static_cast<std::int64_t>(ih) * iw;
    const int chunk = chunk_pixels(rows, ihw);

    Tensor out({out_ch_, oh, ow});
    std::vector<double> tmp(static_cast<std::size_t>(rows) * chunk);
    // weight matrix viewed (ci) x (co*k*k)
    ConstMatMap W(weight.value.v.data(), in_ch_, rows);
    for (std::int64_t pix0 = 0; pix0 < ihw; pix0 += chunk) {
        const int npix = static_cast<int>(std::min<std::int64_t>(chunk, ihw - pix0));
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>,
                   0, Eigen::OuterStride<>>
            X(xv.v.data() + pix0, in_ch_, npix, Eigen::OuterStride<>(ihw));
        MatMap T(tmp.data(), rows, npix);
        T.noalias() = W.transpose() * X;
        // scatter into the output: same index map as im2col over the output
        col2im_add_chunk(tmp.data(), out_ch_, oh, ow, k_, stride_, pad_, 1, iw,
                         static_cast<int>(pix0), npix, out.v.data());
    }
    const std::int64_t ohw = static_cast<std::int64_t>(oh) * ow;
    if (has_bias_) {
        for (int o = 0; o < out_ch_; ++o) {
            const double b = bias.value.v[static_cast<std::size_t>(o)];
            double* plane = out.v.data() + static_cast<std::size_t>(o) * ohw;
            for (std::int64_t i = 0; i < ohw; ++i) plane[i] += b;
        }
    }

    ConvTranspose2d* self_layer = this;
    const int ci = in_ch_, co = out_ch_, k = k_, s = stride_, p = pad_;
    const bool hb = has_bias_;
    return t.push(std::move(out), {x},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& xin = tt.val(x);
                      const int rows2 = co * k * k;
                      const std::int64_t in_pix = static_cast<std::int64_t>(ih) * iw;
                      const int chunk2 = chunk_pixels(rows2, in_pix);

                      self_layer->weight.ensure_grad();
                      MatMap GW(self_layer->weight.grad.v.data(), ci, rows2);
                      ConstMatMap W2(self_layer->weight.value.v.data(), ci, rows2);

                      const bool need_dx = tt.tracks_grad(x);
                      Tensor gx;
                      if (need_dx) gx = Tensor::zeros(xin.shape);

                      std::vector<double> coltmp(static_cast<std::size_t>(rows2) *
                                                 chunk2);
                      for (std::int64_t pix0 = 0; pix0 < in_pix; pix0 += chunk2) {
                          const int npix = static_cast<int>(
                              std::min<std::int64_t>(chunk2, in_pix - pix0));
                          // gather the output gradient taps seen by each input pixel
                          im2col_chunk(g.v.data(), co, oh, ow, k, s, p, 1, iw,
                                       static_cast<int>(pix0), npix, coltmp.data());
                          ConstMatMap CT(coltmp.data(), rows2, npix);
                          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                         Eigen::Dynamic,
                                                         Eigen::RowMajor>,
                                     0, Eigen::OuterStride<>>
                              X(xin.v.data() + pix0, ci, npix,
                                Eigen::OuterStride<>(in_pix));
                          GW.noalias() += X * CT.transpose();
                          if (need_dx) {
                              Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic,
                                                       Eigen::Dynamic,
                                                       Eigen::RowMajor>,
                                         0, Eigen::OuterStride<>>
                                  GX(gx.v.data() + pix0, ci, npix,
                                     Eigen::OuterStride<>(in_pix));
                              GX.noalias() = W2 * CT;
                          }
                      }
                      if (hb) {
                          self_layer->bias.ensure_grad();
                          const std::int64_t out_pix =
                              static_cast<std::int64_t>(oh) * ow;
                          for (int o = 0; o < co; ++o) {
                              double acc = 0.0;
                              const double* plane =
                                  g.v.data() + static_cast<std::size_t>(o) * out_pix;
                              for (std::int64_t i = 0; i < out_pix; ++i)
                                  acc += plane[i];
                              self_layer->bias.grad.v[static_cast<std::size_t>(o)] +=
                                  acc;
                          }
                      }
                      if (need_dx) tt.accumulate(x, gx);
                  },
                  /*force_grad=*/true);
}

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(std::string name, int kernel, bool bias)
    : weight(name + ".w"), bias(name + ".b"), k_(kernel), has_bias_(bias) {
    require(kernel % 2 == 1, "Conv1d: kernel must be odd");
    weight.value = Tensor({kernel});
    if (has_bias_) this->bias.value = Tensor({1});
}

void Conv1d::init(Rng& rng, double stddev) { init_normal(weight, rng, stddev); }

void Conv1d::collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    if (has_bias_) out.push_back(&bias);
}

Tape::Id Conv1d::apply(Tape& t, Tape::Id x) {
    const Tensor& xv = t.val(x);
    const int n = static_cast<int>(xv.numel());
    const int p = (k_ - 1) / 2;
    Tensor out(xv.shape);
    for (int i = 0; i < n; ++i) {
        double acc = has_bias_ ? bias.value.v[0] : 0.0;
        for (int j = 0; j < k_; ++j) {
            const int idx = i + j - p;
            if (idx >= 0 && idx < n)
                acc += weight.value.v[static_cast<std::size_t>(j)] *
                       xv.v[static_cast<std::size_t>(idx)];
        }
        out.v[static_cast<std::size_t>(i)] = acc;
    }
    Conv1d* self_layer = this;
    const int k = k_;
    const bool hb = has_bias_;
    return t.push(std::move(out), {x},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& xin = tt.val(x);
                      self_layer->weight.ensure_grad();
                      if (hb) self_layer->bias.ensure_grad();
                      Tensor gx(xin.shape);
                      for (int i = 0; i < n; ++i) {
                          const double gi = g.v[static_cast<std::size_t>(i)];
                          if (hb) self_layer->bias.grad.v[0] += gi;
                          for (int j = 0; j < k; ++j) {
                              const int idx = i + j - p;
                              if (idx >= 0 && idx < n) {
                                  self_layer->weight.grad
                                      .v[static_cast<std::size_t>(j)] +=
                                      gi * xin.v[static_cast<std::size_t>(idx)];
                                  gx.v[static_cast<std::size_t>(idx)] +=
                                      gi * self_layer->weight.value
                                               .v[static_cast<std::size_t>(j)];
                              }
                          }
                      }
                      if (tt.tracks_grad(x)) tt.accumulate(x, gx);
                  },
                  /*force_grad=*/true);
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(std::string name, int in_dim, int out_dim, bool bias)
    : weight(name + ".w"),
      bias(name + ".b"),
      in_(in_dim),
      out_(out_dim),
      has_bias_(bias) {
    weight.value = Tensor({out_dim, in_dim});
    if (has_bias_) this->bias.value = Tensor({out_dim});
}

void Linear::init(Rng& rng, double stddev) { init_normal(weight, rng, stddev); }

void Linear::collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    if (has_bias_) out.push_back(&bias);
}

Tape::Id Linear::apply(Tape& t, Tape::Id x) {
    const Tensor& xv = t.val(x);
    require(xv.numel() == in_, "Linear " + weight.name + ": input size mismatch");
    Tensor out({out_});
    for (int o = 0; o < out_; ++o) {
        double acc = has_bias_ ? bias.value.v[static_cast<std::size_t>(o)] : 0.0;
        const double* wr = weight.value.v.data() + static_cast<std::size_t>(o) * in_;
        for (int i = 0; i < in_; ++i) acc += wr[i] * xv.v[static_cast<std::size_t>(i)];
        out.v[static_cast<std::size_t>(o)] = acc;
    }
    Linear* self_layer = this;
    const int in_dim = in_, out_dim = out_;
    const bool hb = has_bias_;
    return t.push(std::move(out), {x},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& xin = tt.val(x);
                      self_layer->weight.ensure_grad();
                      if (hb) self_layer->bias.ensure_grad();
                      Tensor gx(xin.shape);
                      for (int o = 0; o < out_dim; ++o) {
                          const double go = g.v[static_cast<std::size_t>(o)];
                          if (hb) self_layer->bias.grad.v[static_cast<std::size_t>(o)] += go;
                          double* gwr = self_layer->weight.grad.v.data() +
                                        static_cast<std::size_t>(o) * in_dim;
                          const double* wr = self_layer->weight.value.v.data() +
                                             static_cast<std::size_t>(o) * in_dim;
                          for (int i = 0; i < in_dim; ++i) {
                              gwr[i] += go * xin.v[static_cast<std::size_t>(i)];
                              gx.v[static_cast<std::size_t>(i)] += go * wr[i];
                          }
                      }
                      if (tt.tracks_grad(x)) tt.accumulate(x, gx);
                  },
                  /*force_grad=*/true);
}

// ---------------------------------------------------------------------------
// InstanceNorm

InstanceNorm::InstanceNorm(std::string name, int channels, double eps)
    : gain(name + ".g"), shift(name + ".b"), c_(channels), eps_(eps) {
    gain.value = Tensor({channels});
    shift.value = Tensor({channels});
}

void InstanceNorm::init(Rng& rng) {
    std::normal_distribution<double> dist(1.0, 0.02);
    for (double& v : gain.value.v) v = dist(rng);
    std::fill(shift.value.v.begin(), shift.value.v.end(), 0.0);
}

void InstanceNorm::collect(std::vector<Parameter*>& out) {
    out.push_back(&gain);
    out.push_back(&shift);
}

Tape::Id InstanceNorm::apply(Tape& t, Tape::Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 3 && xv.dim(0) == c_,
            "InstanceNorm " + gain.name + ": channel mismatch");
    const std::int64_t hw = static_cast<std::int64_t>(xv.dim(1)) * xv.dim(2);
    Tensor out(xv.shape);
    for (int c = 0; c < c_; ++c) {
        const double* px = xv.v.data() + static_cast<std::size_t>(c) * hw;
        double* py = out.v.data() + static_cast<std::size_t>(c) * hw;
        double mu = 0.0;
        for (std::int64_t i = 0; i < hw; ++i) mu += px[i];
        mu /= static_cast<double>(hw);
        double var = 0.0;
        for (std::int64_t i = 0; i < hw; ++i) {
            const double e = px[i] - mu;
            var += e * e;
        }
        var /= static_cast<double>(hw);
        const double inv = 1.0 / std::sqrt(var + eps_);
        const double gc = gain.value.v[static_cast<std::size_t>(c)];
        const double bc = shift.value.v[static_cast<std::size_t>(c)];
        for (std::int64_t i = 0; i < hw; ++i) py[i] = gc * (px[i] - mu) * inv + bc;
    }
    InstanceNorm* self_layer = this;
    const int c_total = c_;
    const double eps = eps_;
    return t.push(std::move(out), {x},
                  [=](Tape& tt, Tape::Id self) {
                      const Tensor& g = tt.grad(self);
                      const Tensor& xin = tt.val(x);
                      const std::int64_t hw2 =
                          static_cast<std::int64_t>(xin.dim(1)) * xin.dim(2);
                      self_layer->gain.ensure_grad();
                      self_layer->shift.ensure_grad();
                      const bool need_dx = tt.tracks_grad(x);
                      Tensor gx;
                      if (need_dx) gx = Tensor::zeros(xin.shape);
                      for (int c = 0; c < c_total; ++c) {
                          const double* px =
                              xin.v.data() + static_cast<std::size_t>(c) * hw2;
                          const double* pg =
                              g.v.data() + static_cast<std::size_t>(c) * hw2;
                          double mu = 0.0;
                          for (std::int64_t i = 0; i < hw2; ++i) mu += px[i];
                          mu /= static_cast<double>(hw2);
                          double var = 0.0;
                          for (std::int64_t i = 0; i < hw2; ++i) {
                              const double e = px[i] - mu;
                              var += e * e;
                          }
                          var /= static_cast<double>(hw2);
                          const double inv = 1.0 / std::sqrt(var + eps);
                          const double gc =
                              self_layer->gain.value.v[static_cast<std::size_t>(c)];
                          double sum_g = 0.0, sum_gxhat = 0.0;
                          for (std::int64_t i = 0; i < hw2; ++i) {
                              const double xhat = (px[i] - mu) * inv;
                              sum_g += pg[i];
                              sum_gxhat += pg[i] * xhat;
                          }
                          self_layer->shift.grad.v[static_cast<std::size_t>(c)] +=
                              sum_g;
                          self_layer->gain.grad.v[static_cast<std::size_t>(c)] +=
                              sum_gxhat;
                          if (need_dx) {
                              double* pgx =
                                  gx.v.data() + static_cast<std::size_t>(c) * hw2;
                              const double mean_g = sum_g / static_cast<double>(hw2);
                              const double mean_gxhat =
                                  sum_gxhat / static_cast<double>(hw2);
                              for (std::int64_t i = 0; i < hw2; ++i) {
                                  const double xhat = (px[i] - mu) * inv;
                                  pgx[i] = gc * inv *
                                           (pg[i] - mean_g - xhat * mean_gxhat);
                              }
                          }
                      }
                      if (need_dx) tt.accumulate(x, gx);
                  },
                  /*force_grad=*/true);
}

}  // namespace tsgan::nn
