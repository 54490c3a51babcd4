#include "tsgan/changemap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tsgan {

WeightMap compute_cwm(const SarPatch& s1_t1, const SarPatch& s1_t2) {
    require(s1_t1.values.same_shape(s1_t2.values), "compute_cwm: shape mismatch");
    WeightMap w;
    w.kind = WeightKind::cwm;
    w.values = Raster(1, s1_t1.height(), s1_t1.width());
    for (std::size_t i = 0; i < w.values.data.size(); ++i)
        w.values.data[i] = std::fabs(s1_t1.values.data[i] - s1_t2.values.data[i]);
    return w;
}

WeightMap compute_rcwm(const WeightMap& cwm) {
    require(cwm.kind == WeightKind::cwm, "compute_rcwm: input must be a CWM");
    const auto [mn_it, mx_it] =
        std::minmax_element(cwm.values.data.begin(), cwm.values.data.end());
    const double mn = *mn_it, mx = *mx_it;
    WeightMap w;
    w.kind = WeightKind::rcwm;
    w.values = cwm.values;
    for (double& v : w.values.data) v = mx - v + mn;
    return w;
}

OpticalChangeComposite compute_s2_change(const OpticalPatch& s2_t1,
                                         const OpticalPatch& s2_t2) {
    require(s2_t1.values.same_shape(s2_t2.values), "compute_s2_change: shape mismatch");
    require(s2_t1.values.channels == kOpticalBands,
            "compute_s2_change: expected 6-band optical input");
    const int h = s2_t1.height(), w = s2_t1.width();
    OpticalChangeComposite out;
    out.values = Raster(3, h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto delta = [&](int band) {
                return std::fabs(s2_t1.values.at(band, y, x) - s2_t2.values.at(band, y, x));
            };
            // bands: 0 R, 1 G, 2 B, 3 NIR, 4 SWIR1, 5 SWIR2
            out.values.at(0, y, x) = std::max({delta(0), delta(1), delta(2)});
            out.values.at(1, y, x) = delta(3);
            out.values.at(2, y, x) = std::max(delta(4), delta(5));
        }
    }
    return out;
}

OpticalChangeComposite reverse_composite(const OpticalChangeComposite& c) {
    OpticalChangeComposite out;
    out.values = c.values;
    for (double& v : out.values.data) v = 1.0 - v;
    return out;
}

double otsu_threshold(const Raster& values, int bins) {
    require(bins >= 2, "otsu_threshold: need at least two bins");
    const auto [mn_it, mx_it] =
        std::minmax_element(values.data.begin(), values.data.end());
    const double mn = *mn_it, mx = *mx_it;
    require(mx > mn, "otsu_threshold: constant input has no threshold");

    std::vector<std::size_t> hist(bins, 0);
    const double scale = bins / (mx - mn);
    for (double v : values.data) {
        int b = static_cast<int>((v - mn) * scale);
        hist[std::clamp(b, 0, bins - 1)]++;
    }

    const double total = static_cast<double>(values.data.size());
    double sum_all = 0.0;
    for (int b = 0; b < bins; ++b) sum_all += b * static_cast<double>(hist[b]);

    // maximize between-class variance over all cut positions
    double w0 = 0.0, sum0 = 0.0, best_var = -1.0;
    int best_cut = 0;
    for (int b = 0; b < bins - 1; ++b) {
        w0 += static_cast<double>(hist[b]);
        sum0 += b * static_cast<double>(hist[b]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0, mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_cut = b;
        }
    }
    // threshold at the upper edge of the best cut bin
    return mn + (best_cut + 1) / scale;
}

namespace {

using Mask = std::vector<std::uint8_t>;

Mask erode3(const Mask& src, int h, int w) {
    Mask out(src.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 1;
            for (int dy = -1; dy <= 1 && v; ++dy)
                for (int dx = -1; dx <= 1 && v; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w || !src[yy * w + xx])
                        v = 0;
                }
            out[y * w + x] = v;
        }
    return out;
}

Mask dilate3(const Mask& src, int h, int w) {
    Mask out(src.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 0;
            for (int dy = -1; dy <= 1 && !v; ++dy)
                for (int dx = -1; dx <= 1 && !v; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy >= 0 && yy < h && xx >= 0 && xx < w && src[yy * w + xx])
                        v = 1;
                }
            out[y * w + x] = v;
        }
    return out;
}

// flood-fill removal of 8-connected components below min_region pixels
void drop_small_components(Mask& m, int h, int w, int min_region) {
    std::vector<int> stack;
    std::vector<std::uint8_t> seen(m.size(), 0);
    for (int start = 0; start < h * w; ++start) {
        if (!m[start] || seen[start]) continue;
        stack.assign(1, start);
        seen[start] = 1;
        std::vector<int> comp;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            comp.push_back(p);
            const int y = p / w, x = p % w;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                    const int q = yy * w + xx;
                    if (m[q] && !seen[q]) {
                        seen[q] = 1;
                        stack.push_back(q);
                    }
                }
        }
        if (static_cast<int>(comp.size()) < min_region)
            for (int p : comp) m[p] = 0;
    }
}

}  // namespace

std::pair<WeightMap, WeightMap> hard_change_mask(const WeightMap& cwm,
                                                 const HardMaskOptions& opts) {
    require(cwm.kind == WeightKind::cwm, "hard_change_mask: input must be a CWM");
    const int h = cwm.values.height, w = cwm.values.width;

    WeightMap changed, unchanged;
    changed.kind = WeightKind::binary_changed;
    unchanged.kind = WeightKind::binary_unchanged;
    changed.values = Raster(1, h, w);
    unchanged.values = Raster(1, h, w);

    const auto [mn_it, mx_it] =
        std::minmax_element(cwm.values.data.begin(), cwm.values.data.end());
    Mask m(static_cast<std::size_t>(h) * w, 0);
    if (*mx_it - *mn_it >= opts.degenerate_range) {
        const double thr = otsu_threshold(cwm.values, opts.histogram_bins);
        for (std::size_t i = 0; i < m.size(); ++i)
            m[i] = cwm.values.data[i] >= thr ? 1 : 0;
        m = dilate3(erode3(m, h, w), h, w);  // opening
        m = erode3(dilate3(m, h, w), h, w);  // closing
        drop_small_components(m, h, w, opts.min_region);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        changed.values.data[i] = m[i] ? 1.0 : 0.0;
        unchanged.values.data[i] = m[i] ? 0.0 : 1.0;
    }
    return {std::move(changed), std::move(unchanged)};
}

}  // namespace tsgan
