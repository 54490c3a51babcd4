#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsgan/raster.hpp"

namespace tsgan {

/// On-disk dataset layout (all multi-byte values little-endian):
///
///   <dir>/manifest.txt        dataset-level manifest, line oriented
///   <dir>/samples/<id>.bin    15 planar float32 planes: s1_t1, s1_t2,
///                             s2_t1 (6 bands), s2_t2 (6 bands), change mask
///   <dir>/samples/<id>.txt    sidecar: band names, shape, dtype, calibration
///
/// The manifest records the format version, sample ids, roi ids, split
/// assignment, and shapes; read_dataset refuses unknown versions and any
/// shape disagreement between manifest, sidecar, and payload size.
inline constexpr const char* kDatasetFormatVersion = "tsds-1";

struct DatasetEntry {
    std::string sample_id;
    std::string roi_id;
    std::string split;  // "train" or "test"
    int height = 0;
    int width = 0;
};

struct DatasetManifest {
    std::string format_version;
    std::vector<DatasetEntry> entries;
};

void write_dataset(const std::vector<BitemporalSample>& samples,
                   const std::vector<std::string>& splits, const std::string& dir);

DatasetManifest read_manifest(const std::string& dir);

/// Read every sample, or only those whose split matches `split` (empty = all).
std::vector<BitemporalSample> read_dataset(const std::string& dir,
                                           const std::string& split = "");

BitemporalSample read_sample(const std::string& dir, const DatasetEntry& entry);

/// FNV-1a fingerprint of the manifest file, recorded in run records.
std::uint64_t dataset_fingerprint(const std::string& dir);

/// Write one raster in the dataset payload encoding (planar float32 LE with
/// a text sidecar). Used by the changemap and report CLI paths.
void write_raster(const Raster& r, const std::string& path_base,
                  const std::vector<std::string>& band_names);

}  // namespace tsgan
