#include "tsgan/quality.hpp"

#include <cmath>
#include <limits>

namespace tsgan {

std::vector<double> SsimConfig::window() const {
    const int n = window_size;
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    const double half = (n - 1) / 2.0;
    double sum = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double dy = y - half, dx = x - half;
            const double g = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            w[y * n + x] = g;
            sum += g;
        }
    for (double& v : w) v /= sum;
    return w;
}

namespace {

void check_ssim_inputs(const Raster& x, const Raster& y, const SsimConfig& cfg) {
    require(x.same_shape(y), "ssim: shape mismatch");
    require(x.channels == 1, "ssim: expected single-band rasters");
    require(x.height >= cfg.window_size && x.width >= cfg.window_size,
            "ssim: raster smaller than the window");
}

}  // namespace

SsimMap ssim_map(const Raster& x, const Raster& y, const SsimConfig& cfg) {
    check_ssim_inputs(x, y, cfg);
    const int win = cfg.window_size;
    const int oh = x.height - win + 1, ow = x.width - win + 1;
    const std::vector<double> w = cfg.window();

    SsimMap out;
    out.values = Raster(1, oh, ow);
    out.center_offset = win / 2;

#pragma omp parallel for schedule(static)
    for (int jy = 0; jy < oh; ++jy) {
        for (int jx = 0; jx < ow; ++jx) {
            double mu_x = 0.0, mu_y = 0.0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    const double wi = w[dy * win + dx];
                    mu_x += wi * x.at(0, jy + dy, jx + dx);
                    mu_y += wi * y.at(0, jy + dy, jx + dx);
                }
            double var_x = 0.0, var_y = 0.0, cov = 0.0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    const double wi = w[dy * win + dx];
                    const double ex = x.at(0, jy + dy, jx + dx) - mu_x;
                    const double ey = y.at(0, jy + dy, jx + dx) - mu_y;
                    var_x += wi * ex * ex;
                    var_y += wi * ey * ey;
                    cov += wi * ex * ey;
                }
            const double num =
                (2.0 * mu_x * mu_y + cfg.c1) * (2.0 * cov + cfg.c2);
            const double den = (mu_x * mu_x + mu_y * mu_y + cfg.c1) *
                               (var_x + var_y + cfg.c2);
            out.values.at(0, jy, jx) = num / den;
        }
    }
    return out;
}

double mean_ssim(const Raster& x, const Raster& y, const SsimConfig& cfg) {
    const SsimMap m = ssim_map(x, y, cfg);
    double sum = 0.0;
    for (double v : m.values.data) sum += v;
    return sum / static_cast<double>(m.values.data.size());
}

double wssim(const Raster& x, const Raster& y, const WeightMap& kappa,
             const SsimConfig& cfg) {
    check_ssim_inputs(x, y, cfg);
    require(kappa.values.same_shape(x), "wssim: weight map shape mismatch");
    const SsimMap m = ssim_map(x, y, cfg);
    const int win = cfg.window_size;
    const std::vector<double> w = cfg.window();

    double num = 0.0, den = 0.0;
    for (int jy = 0; jy < m.values.height; ++jy)
        for (int jx = 0; jx < m.values.width; ++jx) {
            double kj = 0.0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx)
                    kj += w[dy * win + dx] * kappa.values.at(0, jy + dy, jx + dx);
            num += kj * m.values.at(0, jy, jx);
            den += kj;
        }
    require(den > 0.0, "wssim: weight map has no support");
    return num / den;
}

double psnr(const Raster& x, const Raster& y, double data_range) {
    require(x.same_shape(y), "psnr: shape mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double e = x.data[i] - y.data[i];
        mse += e * e;
    }
    mse /= static_cast<double>(x.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / mse);
}

double wpsnr(const Raster& x, const Raster& y, const WeightMap& weights,
             double data_range) {
    require(x.same_shape(y), "wpsnr: shape mismatch");
    require(weights.values.same_shape(x), "wpsnr: weight map shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double e = x.data[i] - y.data[i];
        const double w = weights.values.data[i];
        num += w * e * e;
        den += w;
    }
    require(den > 0.0, "wpsnr: weight map has no support");
    const double wmse = num / den;
    if (wmse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / wmse);
}

SampleMetrics split_metrics(const Raster& pred, const Raster& target,
                            const WeightMap& changed_mask,
                            const WeightMap& unchanged_mask,
                            const SsimConfig& cfg) {
    require(changed_mask.values.same_shape(pred) &&
                unchanged_mask.values.same_shape(pred),
            "split_metrics: mask shape mismatch");
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double c = changed_mask.values.data[i];
        const double u = unchanged_mask.values.data[i];
        require((c == 0.0 || c == 1.0) && (u == 0.0 || u == 1.0) && c + u == 1.0,
                "split_metrics: masks must partition the frame");
    }

    auto mask_sum = [](const WeightMap& m) {
        double s = 0.0;
        for (double v : m.values.data) s += v;
        return s;
    };

    SampleMetrics out;
    out.psnr = psnr(pred, target, cfg.data_range);
    out.ssim = mean_ssim(pred, target, cfg);
    if (mask_sum(changed_mask) > 0.0) {
        out.c_psnr = wpsnr(pred, target, changed_mask, cfg.data_range);
        out.c_ssim = wssim(pred, target, changed_mask, cfg);
    }
    if (mask_sum(unchanged_mask) > 0.0) {
        out.uc_psnr = wpsnr(pred, target, unchanged_mask, cfg.data_range);
        out.uc_ssim = wssim(pred, target, unchanged_mask, cfg);
    }
    return out;
}

void EvalCell::add(double v) {
    ++count_total;
    if (std::isfinite(v)) {
        mean += (v - mean) / ++count_finite;
    }
}

void EvalCell::add(const std::optional<double>& v) {
    if (v.has_value()) add(*v);
}

const EvalRow* EvalReport::find(const std::string& model,
                                const std::string& split) const {
    for (const EvalRow& r : rows)
        if (r.model == model && r.split == split) return &r;
    return nullptr;
}

}  // namespace tsgan
