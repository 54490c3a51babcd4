#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsgan/changemap.hpp"
#include "tsgan/raster.hpp"

namespace tsgan {

/// Windowed-SSIM configuration: 11x11 circular-symmetric Gaussian window
/// (sigma 1.5, unit sum) and the standard stability constants
/// C1 = (0.01 R)^2, C2 = (0.03 R)^2 for data range R.
struct SsimConfig {
    int window_size = 11;
    double sigma = 1.5;
    double data_range = 1.0;
    double c1 = 1e-4;
    double c2 = 9e-4;

    static SsimConfig for_range(double r) {
        SsimConfig cfg;
        cfg.data_range = r;
        cfg.c1 = (0.01 * r) * (0.01 * r);
        cfg.c2 = (0.03 * r) * (0.03 * r);
        return cfg;
    }

    /// Normalized window weights, row-major window_size^2 values.
    std::vector<double> window() const;
};

/// SSIM at every valid (unpadded) window position. values[j_y][j_x] is the
/// SSIM of the window whose top-left corner is (j_y, j_x); the window center
/// sits at (j_y + window_size/2, j_x + window_size/2).
struct SsimMap {
    Raster values;  // 1 x (h-win+1) x (w-win+1)
    int center_offset = 5;
};

SsimMap ssim_map(const Raster& x, const Raster& y, const SsimConfig& cfg);

/// Mean of the SSIM map (uniform window weights across positions).
double mean_ssim(const Raster& x, const Raster& y, const SsimConfig& cfg);

/// Change-weighted SSIM: per window j, K_j = sum_i w_i kappa_{j,i} over the
/// weight map, and WSSIM = sum_j K_j SSIM_j / sum_j K_j. Throws if the
/// weight map gives no support (sum K_j == 0).
double wssim(const Raster& x, const Raster& y, const WeightMap& kappa,
             const SsimConfig& cfg);

/// PSNR = 10 log10(R^2 / MSE). Identical inputs yield +infinity; callers
/// aggregating means must exclude the sentinel (see EvalCell).
double psnr(const Raster& x, const Raster& y, double data_range);

/// WPSNR = 10 log10(R^2 / WMSE) with WMSE = sum w e^2 / sum w.
double wpsnr(const Raster& x, const Raster& y, const WeightMap& weights,
             double data_range);

/// The six Table-1 style scalars for one sample. Changed-region metrics are
/// absent (not zero) when the changed mask is empty, and likewise for the
/// unchanged side.
struct SampleMetrics {
    double psnr = 0.0;
    double ssim = 0.0;
    std::optional<double> uc_psnr;
    std::optional<double> c_psnr;
    std::optional<double> uc_ssim;
    std::optional<double> c_ssim;
};

SampleMetrics split_metrics(const Raster& pred, const Raster& target,
                            const WeightMap& changed_mask,
                            const WeightMap& unchanged_mask,
                            const SsimConfig& cfg);

/// Aggregated metric cell: mean over finite per-sample values, with counts
/// so +inf PSNR sentinels are visible rather than silently averaged.
struct EvalCell {
    double mean = 0.0;
    int count_finite = 0;
    int count_total = 0;

    bool present() const { return count_finite > 0; }
    void add(double v);
    void add(const std::optional<double>& v);
};

/// One row of the evaluation table: a model evaluated on one split.
struct EvalRow {
    std::string model;
    std::string split;  // "whole", "fts", "bts"
    EvalCell psnr, uc_psnr, c_psnr, ssim, uc_ssim, c_ssim;
    int sample_count = 0;
};

/// Per-split metric table mirroring the published layout.
struct EvalReport {
    std::vector<EvalRow> rows;

    const EvalRow* find(const std::string& model, const std::string& split) const;
};

}  // namespace tsgan
