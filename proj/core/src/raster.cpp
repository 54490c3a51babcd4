#include "tsgan/raster.hpp"

#include <algorithm>
#include <cmath>

namespace tsgan {

SarPatch normalize_sar(const Raster& raw_db, double clip_lo, double clip_hi) {
    require(raw_db.channels == 1, "normalize_sar: expected single-band input");
    require(clip_lo < clip_hi, "normalize_sar: clip_lo must be below clip_hi");

    SarPatch out;
    out.values = Raster(1, raw_db.height, raw_db.width);
    out.calibration = {clip_lo, clip_hi};
    const double span = clip_hi - clip_lo;
    for (std::size_t i = 0; i < raw_db.data.size(); ++i) {
        const double v = raw_db.data[i];
        if (!std::isfinite(v)) fail("normalize_sar: non-finite backscatter value");
        out.values.data[i] = (std::clamp(v, clip_lo, clip_hi) - clip_lo) / span;
    }
    return out;
}

Raster despeckle_stack(const SarStack& stack) {
    require(stack.count() >= 1, "despeckle_stack: empty stack");
    const Raster& first = stack.frames.front();
    Raster acc(1, first.height, first.width);
    for (const Raster& frame : stack.frames) {
        require(frame.same_shape(first), "despeckle_stack: frame shape mismatch");
        for (std::size_t i = 0; i < acc.data.size(); ++i) {
            const double db = frame.data[i];
            if (!std::isfinite(db)) fail("despeckle_stack: non-finite value");
            acc.data[i] += std::pow(10.0, db / 10.0);
        }
    }
    const double inv_n = 1.0 / stack.count();
    for (double& v : acc.data) v = 10.0 * std::log10(v * inv_n);
    return acc;
}

namespace {

std::vector<int> plan_axis(int extent, int patch_size) {
    const int n = (extent + patch_size - 1) / patch_size;  // ceil
    std::vector<int> starts(n);
    if (n == 1) {
        starts[0] = 0;
        return starts;
    }
    const double step = static_cast<double>(extent - patch_size) / (n - 1);
    for (int i = 0; i < n; ++i)
        starts[i] = static_cast<int>(round_half_away(i * step));
    starts.front() = 0;
    starts.back() = extent - patch_size;  // exact coverage regardless of rounding
    return starts;
}

}  // namespace

TileGrid plan_tiles(int extent_h, int extent_w, int patch_size) {
    require(patch_size >= 1, "plan_tiles: patch_size must be positive");
    require(extent_h >= patch_size && extent_w >= patch_size,
            "plan_tiles: extent smaller than patch size");
    TileGrid grid;
    grid.patch_size = patch_size;
    grid.starts_y = plan_axis(extent_h, patch_size);
    grid.starts_x = plan_axis(extent_w, patch_size);
    return grid;
}

namespace {

Raster crop(const Raster& src, int y0, int x0, int ps) {
    Raster out(src.channels, ps, ps);
    for (int c = 0; c < src.channels; ++c)
        for (int y = 0; y < ps; ++y)
            for (int x = 0; x < ps; ++x) out.at(c, y, x) = src.at(c, y0 + y, x0 + x);
    return out;
}

}  // namespace

BitemporalSample crop_sample(const BitemporalSample& full, int y0, int x0,
                             int patch_size, const std::string& sample_id) {
    require(y0 >= 0 && x0 >= 0 && y0 + patch_size <= full.height() &&
                x0 + patch_size <= full.width(),
            "crop_sample: window out of bounds");
    BitemporalSample out;
    out.s1_t1.values = crop(full.s1_t1.values, y0, x0, patch_size);
    out.s1_t1.calibration = full.s1_t1.calibration;
    out.s1_t2.values = crop(full.s1_t2.values, y0, x0, patch_size);
    out.s1_t2.calibration = full.s1_t2.calibration;
    out.s2_t1.values = crop(full.s2_t1.values, y0, x0, patch_size);
    out.s2_t2.values = crop(full.s2_t2.values, y0, x0, patch_size);
    out.true_change_mask = crop(full.true_change_mask, y0, x0, patch_size);
    out.sample_id = sample_id;
    out.roi_id = full.roi_id;
    return out;
}

}  // namespace tsgan
