#pragma once

#include <utility>

#include "tsgan/raster.hpp"

namespace tsgan {

enum class WeightKind { cwm, rcwm, binary_changed, binary_unchanged, uniform };

/// Per-pixel nonnegative weights driving losses and metrics.
struct WeightMap {
    Raster values;  // 1 channel
    WeightKind kind = WeightKind::uniform;
};

/// False-color optical change composite fed to the networks:
/// R = max |dRGB|, G = |dNIR|, B = max(|dSWIR1|, |dSWIR2|).
struct OpticalChangeComposite {
    Raster values;  // 3 channels, [0,1]
};

/// CWM = |s1_t1 - s1_t2| per pixel, in [0,1].
WeightMap compute_cwm(const SarPatch& s1_t1, const SarPatch& s1_t2);

/// RCWM = max{CWM} - CWM + min{CWM}, per-patch extrema.
WeightMap compute_rcwm(const WeightMap& cwm);

OpticalChangeComposite compute_s2_change(const OpticalPatch& s2_t1,
                                         const OpticalPatch& s2_t2);

/// 1 - values per channel.
OpticalChangeComposite reverse_composite(const OpticalChangeComposite& c);

struct HardMaskOptions {
    int min_region = 8;             // drop connected components smaller than this
    double degenerate_range = 1e-3; // below this CWM range, report no change
    int histogram_bins = 256;       // Otsu histogram resolution
};

/// Threshold the CWM (Otsu), clean with 3x3 open/close, drop small
/// components; returns (binary_changed, binary_unchanged) partitioning the
/// frame. A near-constant CWM yields an all-unchanged mask.
std::pair<WeightMap, WeightMap> hard_change_mask(const WeightMap& cwm,
                                                 const HardMaskOptions& opts = {});

/// Otsu threshold over a histogram of `bins` bins spanning [min, max] of the
/// data. Exposed for the threshold-sweep oracle tests.
double otsu_threshold(const Raster& values, int bins);

}  // namespace tsgan
