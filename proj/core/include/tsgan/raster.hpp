#pragma once

#include <string>
#include <vector>

#include "tsgan/common.hpp"

namespace tsgan {

/// Dense planar raster: `channels` planes of `height` x `width`, row-major
/// within a plane. All pipeline math runs in double; files store float32.
struct Raster {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Raster() = default;
    Raster(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Raster& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

/// dB clip range a SAR patch was normalized with.
struct SarCalibration {
    double clip_lo_db = -25.0;
    double clip_hi_db = 0.0;
};

/// Single-band SAR backscatter patch, values normalized to [0,1].
struct SarPatch {
    Raster values;  // 1 channel
    SarCalibration calibration;

    int height() const { return values.height; }
    int width() const { return values.width; }
};

inline constexpr int kOpticalBands = 6;  // R, G, B, NIR, SWIR1, SWIR2

/// Six-band optical reflectance patch, values in [0,1].
struct OpticalPatch {
    Raster values;  // 6 channels

    int height() const { return values.height; }
    int width() const { return values.width; }
};

/// Paired SAR/optical patches at two dates plus the ground-truth change mask
/// (synthetic data only; mask values are 0/1).
struct BitemporalSample {
    SarPatch s1_t1;
    SarPatch s1_t2;
    OpticalPatch s2_t1;
    OpticalPatch s2_t2;
    Raster true_change_mask;  // 1 channel, {0,1}
    std::string sample_id;
    std::string roi_id;

    int height() const { return s1_t1.height(); }
    int width() const { return s1_t1.width(); }
};

/// Ordered stack of co-registered SAR frames in dB.
struct SarStack {
    std::vector<Raster> frames;  // each 1 channel, same shape

    int count() const { return static_cast<int>(frames.size()); }
};

/// Tile offsets covering one axis-aligned extent with patch_size tiles.
struct TileGrid {
    std::vector<int> starts_y;
    std::vector<int> starts_x;
    int patch_size = 0;
};

/// Clamp raw dB backscatter to [clip_lo, clip_hi] and scale onto [0,1].
/// Rejects non-finite input values.
SarPatch normalize_sar(const Raster& raw_db, double clip_lo, double clip_hi);

/// Temporal despeckle: average the stack in linear intensity and return dB.
/// output = 10*log10(mean_i 10^(frame_i/10)).
Raster despeckle_stack(const SarStack& stack);

/// Plan a minimal-overlap tiling of an extent. Per axis, n = ceil(extent /
/// patch_size) tiles at offsets round(i*(extent-patch_size)/(n-1)); the last
/// offset is forced to extent - patch_size so coverage is exact.
TileGrid plan_tiles(int extent_h, int extent_w, int patch_size);

/// Crop a patch_size window at (y0, x0) from every raster of the sample.
BitemporalSample crop_sample(const BitemporalSample& full, int y0, int x0,
                             int patch_size, const std::string& sample_id);

}  // namespace tsgan
