#include "tsgan/nn/ops.hpp"

#include <Eigen/Core>

#include <cmath>

namespace tsgan::nn::ops {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>;
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

template <typename Fwd, typename Dfdx>
Id unary_op(Tape& t, Id x, Fwd fwd, Dfdx dfdx) {
    const Tensor& xv = t.val(x);
    Tensor out(xv.shape);
    for (std::size_t i = 0; i < xv.v.size(); ++i) out.v[i] = fwd(xv.v[i]);
    return t.push(std::move(out), {x}, [x, dfdx](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& xin = tt.val(x);
        const Tensor& yout = tt.val(self);
        Tensor gx(xin.shape);
        for (std::size_t i = 0; i < gx.v.size(); ++i)
            gx.v[i] = g.v[i] * dfdx(xin.v[i], yout.v[i]);
        tt.accumulate(x, gx);
    });
}

}  // namespace

Id relu(Tape& t, Id x) {
    return unary_op(
        t, x, [](double v) { return v > 0.0 ? v : 0.0; },
        [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Id leaky_relu(Tape& t, Id x, double slope) {
    return unary_op(
        t, x, [slope](double v) { return v > 0.0 ? v : slope * v; },
        [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Id sigmoid(Tape& t, Id x) {
    return unary_op(
        t, x,
        [](double v) {
            return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                            : std::exp(v) / (1.0 + std::exp(v));
        },
        [](double, double y) { return y * (1.0 - y); });
}

Id tanh_act(Tape& t, Id x) {
    return unary_op(
        t, x, [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Id softplus(Tape& t, Id x) {
    return unary_op(
        t, x,
        [](double v) { return std::log1p(std::exp(-std::fabs(v))) + std::max(v, 0.0); },
        [](double v, double) {
            return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                            : std::exp(v) / (1.0 + std::exp(v));
        });
}

Id abs_act(Tape& t, Id x) {
    return unary_op(
        t, x, [](double v) { return std::fabs(v); },
        [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Id affine(Tape& t, Id x, double k, double c) {
    return unary_op(
        t, x, [k, c](double v) { return k * v + c; },
        [k](double, double) { return k; });
}

namespace {

Id binary_op(Tape& t, Id a, Id b, double (*fwd)(double, double), int mode) {
    const Tensor& av = t.val(a);
    const Tensor& bv = t.val(b);
    require(av.same_shape(bv), "nn: binary op shape mismatch");
    Tensor out(av.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = fwd(av.v[i], bv.v[i]);
    return t.push(std::move(out), {a, b}, [a, b, mode](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        if (mode == 0) {  // add
            tt.accumulate(a, g);
            tt.accumulate(b, g);
        } else if (mode == 1) {  // sub
            tt.accumulate(a, g);
            Tensor gb(g.shape);
            for (std::size_t i = 0; i < gb.v.size(); ++i) gb.v[i] = -g.v[i];
            tt.accumulate(b, gb);
        } else {  // mul
            const Tensor& av2 = tt.val(a);
            const Tensor& bv2 = tt.val(b);
            Tensor ga(g.shape), gb(g.shape);
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                ga.v[i] = g.v[i] * bv2.v[i];
                gb.v[i] = g.v[i] * av2.v[i];
            }
            tt.accumulate(a, ga);
            tt.accumulate(b, gb);
        }
    });
}

}  // namespace

Id add(Tape& t, Id a, Id b) {
    return binary_op(t, a, b, [](double x, double y) { return x + y; }, 0);
}
Id sub(Tape& t, Id a, Id b) {
    return binary_op(t, a, b, [](double x, double y) { return x - y; }, 1);
}
Id mul(Tape& t, Id a, Id b) {
    return binary_op(t, a, b, [](double x, double y) { return x * y; }, 2);
}

Id scale_channels(Tape& t, Id x, Id s) {
    const Tensor& xv = t.val(x);
    const Tensor& sv = t.val(s);
    require(xv.rank() == 3, "scale_channels: expected {c,h,w} input");
    const int c = xv.dim(0);
    const std::int64_t hw = static_cast<std::int64_t>(xv.dim(1)) * xv.dim(2);
    require(sv.numel() == c, "scale_channels: scale size must equal channels");

    Tensor out(xv.shape);
    for (int ch = 0; ch < c; ++ch) {
        const double sc = sv.v[static_cast<std::size_t>(ch)];
        const std::size_t base = static_cast<std::size_t>(ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i) out.v[base + i] = xv.v[base + i] * sc;
    }
    return t.push(std::move(out), {x, s}, [x, s, c, hw](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& xv2 = tt.val(x);
        const Tensor& sv2 = tt.val(s);
        Tensor gx(xv2.shape);
        Tensor gs(sv2.shape);
        for (int ch = 0; ch < c; ++ch) {
            const double sc = sv2.v[static_cast<std::size_t>(ch)];
            const std::size_t base = static_cast<std::size_t>(ch) * hw;
            double acc = 0.0;
            for (std::int64_t i = 0; i < hw; ++i) {
                gx.v[base + i] = g.v[base + i] * sc;
                acc += g.v[base + i] * xv2.v[base + i];
            }
            gs.v[static_cast<std::size_t>(ch)] = acc;
        }
        tt.accumulate(x, gx);
        tt.accumulate(s, gs);
    });
}

Id mul_spatial(Tape& t, Id x, Id m) {
    const Tensor& xv = t.val(x);
    const Tensor& mv = t.val(m);
    require(xv.rank() == 3, "mul_spatial: expected {c,h,w} input");
    const int c = xv.dim(0);
    const std::int64_t hw = static_cast<std::int64_t>(xv.dim(1)) * xv.dim(2);
    require(mv.numel() == hw, "mul_spatial: map size must equal h*w");

    Tensor out(xv.shape);
    for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = static_cast<std::size_t>(ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i)
            out.v[base + i] = xv.v[base + i] * mv.v[static_cast<std::size_t>(i)];
    }
    return t.push(std::move(out), {x, m}, [x, m, c, hw](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& xv2 = tt.val(x);
        const Tensor& mv2 = tt.val(m);
        Tensor gx(xv2.shape);
        Tensor gm(mv2.shape);
        for (int ch = 0; ch < c; ++ch) {
            const std::size_t base = static_cast<std::size_t>(ch) * hw;
            for (std::int64_t i = 0; i < hw; ++i) {
                gx.v[base + i] = g.v[base + i] * mv2.v[static_cast<std::size_t>(i)];
                gm.v[static_cast<std::size_t>(i)] += g.v[base + i] * xv2.v[base + i];
            }
        }
        tt.accumulate(x, gx);
        tt.accumulate(m, gm);
    });
}

Id reshape(Tape& t, Id x, std::vector<int> shape) {
    const Tensor& xv = t.val(x);
    require(Tensor::numel_of(shape) == xv.numel(), "reshape: element count mismatch");
    Tensor out(std::move(shape), xv.v);
    return t.push(std::move(out), {x}, [x](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        tt.accumulate(x, g.v.data(), g.numel());
    });
}

Id concat_channels(Tape& t, const std::vector<Id>& xs) {
    require(!xs.empty(), "concat_channels: no inputs");
    const Tensor& first = t.val(xs.front());
    require(first.rank() == 3, "concat_channels: expected {c,h,w} inputs");
    const int h = first.dim(1), w = first.dim(2);
    int c_total = 0;
    for (Id id : xs) {
        const Tensor& v = t.val(id);
        require(v.rank() == 3 && v.dim(1) == h && v.dim(2) == w,
                "concat_channels: spatial shape mismatch");
        c_total += v.dim(0);
    }
    Tensor out({c_total, h, w});
    std::size_t off = 0;
    for (Id id : xs) {
        const Tensor& v = t.val(id);
        std::copy(v.v.begin(), v.v.end(), out.v.begin() + off);
        off += v.v.size();
    }
    std::vector<Id> parents = xs;
    return t.push(std::move(out), parents, [xs](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        std::size_t off2 = 0;
        for (Id id : xs) {
            const Tensor& v = tt.val(id);
            tt.accumulate(id, g.v.data() + off2, v.numel());
            off2 += v.v.size();
        }
    });
}

Id transpose2(Tape& t, Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 2, "transpose2: expected a matrix");
    const int m = xv.dim(0), n = xv.dim(1);
    Tensor out({n, m});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out.v[static_cast<std::size_t>(j) * m + i] =
                xv.v[static_cast<std::size_t>(i) * n + j];
    return t.push(std::move(out), {x}, [x, m, n](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        Tensor gx({m, n});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                gx.v[static_cast<std::size_t>(i) * n + j] =
                    g.v[static_cast<std::size_t>(j) * m + i];
        tt.accumulate(x, gx);
    });
}

Id matmul(Tape& t, Id a, Id b) {
    const Tensor& av = t.val(a);
    const Tensor& bv = t.val(b);
    require(av.rank() == 2 && bv.rank() == 2 && av.dim(1) == bv.dim(0),
            "matmul: incompatible shapes");
    const int m = av.dim(0), k = av.dim(1), n = bv.dim(1);
    Tensor out({m, n});
    {
        ConstMatMap A(av.v.data(), m, k), B(bv.v.data(), k, n);
        MatMap C(out.v.data(), m, n);
        C.noalias() = A * B;
    }
    return t.push(std::move(out), {a, b}, [a, b, m, k, n](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& av2 = tt.val(a);
        const Tensor& bv2 = tt.val(b);
        ConstMatMap G(g.v.data(), m, n), A(av2.v.data(), m, k), B(bv2.v.data(), k, n);
        if (tt.tracks_grad(a)) {
            Tensor ga({m, k});
            MatMap GA(ga.v.data(), m, k);
            GA.noalias() = G * B.transpose();
            tt.accumulate(a, ga);
        }
        if (tt.tracks_grad(b)) {
            Tensor gb({k, n});
            MatMap GB(gb.v.data(), k, n);
            GB.noalias() = A.transpose() * G;
            tt.accumulate(b, gb);
        }
    });
}

Id softmax_rows(Tape& t, Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 2, "softmax_rows: expected a matrix");
    const int m = xv.dim(0), n = xv.dim(1);
    Tensor out(xv.shape);
    for (int i = 0; i < m; ++i) {
        const double* row = xv.v.data() + static_cast<std::size_t>(i) * n;
        double* orow = out.v.data() + static_cast<std::size_t>(i) * n;
        double mx = row[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            orow[j] = std::exp(row[j] - mx);
            sum += orow[j];
        }
        for (int j = 0; j < n; ++j) orow[j] /= sum;
    }
    return t.push(std::move(out), {x}, [x, m, n](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& y = tt.val(self);
        Tensor gx({m, n});
        for (int i = 0; i < m; ++i) {
            const double* gr = g.v.data() + static_cast<std::size_t>(i) * n;
            const double* yr = y.v.data() + static_cast<std::size_t>(i) * n;
            double dot = 0.0;
            for (int j = 0; j < n; ++j) dot += gr[j] * yr[j];
            double* gxr = gx.v.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) gxr[j] = yr[j] * (gr[j] - dot);
        }
        tt.accumulate(x, gx);
    });
}

Id global_avg_pool(Tape& t, Id x) {
    const Tensor& xv = t.val(x);
    require(xv.rank() == 3, "global_avg_pool: expected {c,h,w} input");
    const int c = xv.dim(0);
    const std::int64_t hw = static_cast<std::int64_t>(xv.dim(1)) * xv.dim(2);
    Tensor out({c});
    for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        const std::size_t base = static_cast<std::size_t>(ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i) acc += xv.v[base + i];
        out.v[static_cast<std::size_t>(ch)] = acc / static_cast<double>(hw);
    }
    return t.push(std::move(out), {x}, [x, c, hw](Tape& tt, Id self) {
        const Tensor& g = tt.grad(self);
        const Tensor& xv2 = tt.val(x);
        Tensor gx(xv2.shape);
        const double inv = 1.0 / static_cast<double>(hw);
        for (int ch = 0; ch < c; ++ch) {
            const double gv = g.v[static_cast<std::size_t>(ch)] * inv;
            const std::size_t base = static_cast<std::size_t>(ch) * hw;
            for (std::int64_t i = 0; i < hw; ++i) gx.v[base + i] = gv;
        }
        tt.accumulate(x, gx);
    });
}

Id sum_all(Tape& t, Id x) {
    const Tensor& xv = t.val(x);
    Tensor out = Tensor::scalar(xv.sum());
    return t.push(std::move(out), {x}, [x](Tape& tt, Id self) {
        const double g = tt.grad(self).v[0];
        const Tensor& xv2 = tt.val(x);
        Tensor gx(xv2.shape);
        for (double& v : gx.v) v = g;
        tt.accumulate(x, gx);
    });
}

Id mean_all(Tape& t, Id x) {
    const Tensor& xv = t.val(x);
    const double n = static_cast<double>(xv.numel());
    Tensor out = Tensor::scalar(xv.sum() / n);
    return t.push(std::move(out), {x}, [x, n](Tape& tt, Id self) {
        const double g = tt.grad(self).v[0] / n;
        const Tensor& xv2 = tt.val(x);
        Tensor gx(xv2.shape);
        for (double& v : gx.v) v = g;
        tt.accumulate(x, gx);
    });
}

Id dot_const(Tape& t, Id x, Tensor w) {
    const Tensor& xv = t.val(x);
    require(w.numel() == xv.numel(), "dot_const: weight size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.v.size(); ++i) acc += xv.v[i] * w.v[i];
    auto wp = std::make_shared<Tensor>(std::move(w));
    return t.push(Tensor::scalar(acc), {x}, [x, wp](Tape& tt, Id self) {
        const double g = tt.grad(self).v[0];
        Tensor gx(tt.val(x).shape);
        for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] = g * wp->v[i];
        tt.accumulate(x, gx);
    });
}

}  // namespace tsgan::nn::ops
