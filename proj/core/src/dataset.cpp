#include "tsgan/dataset.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace tsgan {

namespace {

const std::vector<std::string> kBandNames = {
    "s1_t1.vv",  "s1_t2.vv",   "s2_t1.r",    "s2_t1.g",     "s2_t1.b",
    "s2_t1.nir", "s2_t1.swir1", "s2_t1.swir2", "s2_t2.r",     "s2_t2.g",
    "s2_t2.b",   "s2_t2.nir",  "s2_t2.swir1", "s2_t2.swir2", "change_mask"};

void put_f32_le(std::ostream& os, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                          static_cast<unsigned char>((bits >> 8) & 0xff),
                          static_cast<unsigned char>((bits >> 16) & 0xff),
                          static_cast<unsigned char>((bits >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

double get_f32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) fail("dataset: truncated sample payload");
    const std::uint32_t bits = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                               (std::uint32_t(b[2]) << 16) |
                               (std::uint32_t(b[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
}

void write_planes(std::ostream& os, const Raster& r) {
    for (double v : r.data) put_f32_le(os, v);
}

void read_planes(std::istream& is, Raster& r) {
    for (double& v : r.data) v = get_f32_le(is);
}

std::string sidecar_text(const BitemporalSample& s) {
    std::ostringstream os;
    os << "sample_id: " << s.sample_id << "\n";
    os << "roi_id: " << s.roi_id << "\n";
    os << "dtype: float32-le\n";
    os << "planes: 15\n";
    os << "height: " << s.height() << "\n";
    os << "width: " << s.width() << "\n";
    os << "calibration_db: " << s.s1_t1.calibration.clip_lo_db << " "
       << s.s1_t1.calibration.clip_hi_db << "\n";
    os << "bands:";
    for (const auto& b : kBandNames) os << " " << b;
    os << "\n";
    return os.str();
}

struct SidecarInfo {
    int height = 0, width = 0, planes = 0;
    SarCalibration calibration;
};

SidecarInfo parse_sidecar(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), "dataset: missing sidecar " + path);
    SidecarInfo info;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "height:") ls >> info.height;
        else if (key == "width:") ls >> info.width;
        else if (key == "planes:") ls >> info.planes;
        else if (key == "calibration_db:")
            ls >> info.calibration.clip_lo_db >> info.calibration.clip_hi_db;
    }
    require(info.planes == 15, "dataset: sidecar plane count mismatch in " + path);
    return info;
}

}  // namespace

void write_dataset(const std::vector<BitemporalSample>& samples,
                   const std::vector<std::string>& splits, const std::string& dir) {
    require(!samples.empty(), "write_dataset: empty sample list");
    require(splits.size() == samples.size(),
            "write_dataset: one split label per sample required");

    fs::create_directories(fs::path(dir) / "samples");

    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    require(manifest.good(), "write_dataset: cannot open manifest for writing");
    manifest << "tsds-format-version: " << kDatasetFormatVersion << "\n";
    manifest << "sample_count: " << samples.size() << "\n";

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const BitemporalSample& s = samples[i];
        require(!s.sample_id.empty(), "write_dataset: sample without id");
        require(s.s1_t1.values.same_shape(s.s1_t2.values) &&
                    s.true_change_mask.same_shape(s.s1_t1.values) &&
                    s.s2_t1.values.channels == kOpticalBands &&
                    s.s2_t2.values.channels == kOpticalBands &&
                    s.s2_t1.values.height == s.height() &&
                    s.s2_t2.values.height == s.height(),
                "write_dataset: inconsistent raster shapes in " + s.sample_id);

        manifest << "sample: " << s.sample_id << " " << s.roi_id << " " << splits[i]
                 << " " << s.height() << " " << s.width() << "\n";

        const fs::path base = fs::path(dir) / "samples" / s.sample_id;
        std::ofstream bin(base.string() + ".bin", std::ios::binary);
        require(bin.good(), "write_dataset: cannot open payload for " + s.sample_id);
        write_planes(bin, s.s1_t1.values);
        write_planes(bin, s.s1_t2.values);
        write_planes(bin, s.s2_t1.values);
        write_planes(bin, s.s2_t2.values);
        write_planes(bin, s.true_change_mask);
        require(bin.good(), "write_dataset: short write for " + s.sample_id);

        std::ofstream side(base.string() + ".txt");
        side << sidecar_text(s);
    }
}

DatasetManifest read_manifest(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.txt");
    require(is.good(), "read_dataset: manifest not found in " + dir);
    DatasetManifest m;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "tsds-format-version:") {
            ls >> m.format_version;
        } else if (key == "sample:") {
            DatasetEntry e;
            ls >> e.sample_id >> e.roi_id >> e.split >> e.height >> e.width;
            require(!ls.fail(), "read_dataset: malformed manifest line: " + line);
            m.entries.push_back(e);
        }
    }
    require(m.format_version == kDatasetFormatVersion,
            "read_dataset: unknown dataset format version '" + m.format_version + "'");
    return m;
}

BitemporalSample read_sample(const std::string& dir, const DatasetEntry& entry) {
    const fs::path base = fs::path(dir) / "samples" / entry.sample_id;
    const SidecarInfo info = parse_sidecar(base.string() + ".txt");
    require(info.height == entry.height && info.width == entry.width,
            "read_dataset: shape mismatch between manifest and sidecar for " +
                entry.sample_id);

    const std::size_t expected_bytes =
        static_cast<std::size_t>(15) * entry.height * entry.width * 4;
    std::error_code ec;
    const auto actual = fs::file_size(base.string() + ".bin", ec);
    require(!ec, "read_dataset: missing payload for " + entry.sample_id);
    require(actual == expected_bytes,
            "read_dataset: payload size mismatch for " + entry.sample_id);

    std::ifstream bin(base.string() + ".bin", std::ios::binary);
    require(bin.good(), "read_dataset: cannot open payload for " + entry.sample_id);

    BitemporalSample s;
    s.sample_id = entry.sample_id;
    s.roi_id = entry.roi_id;
    s.s1_t1.values = Raster(1, entry.height, entry.width);
    s.s1_t2.values = Raster(1, entry.height, entry.width);
    s.s2_t1.values = Raster(kOpticalBands, entry.height, entry.width);
    s.s2_t2.values = Raster(kOpticalBands, entry.height, entry.width);
    s.true_change_mask = Raster(1, entry.height, entry.width);
    s.s1_t1.calibration = info.calibration;
    s.s1_t2.calibration = info.calibration;
    read_planes(bin, s.s1_t1.values);
    read_planes(bin, s.s1_t2.values);
    read_planes(bin, s.s2_t1.values);
    read_planes(bin, s.s2_t2.values);
    read_planes(bin, s.true_change_mask);
    return s;
}

std::vector<BitemporalSample> read_dataset(const std::string& dir,
                                           const std::string& split) {
    const DatasetManifest m = read_manifest(dir);
    std::vector<BitemporalSample> out;
    for (const DatasetEntry& e : m.entries) {
        if (!split.empty() && e.split != split) continue;
        out.push_back(read_sample(dir, e));
    }
    return out;
}

std::uint64_t dataset_fingerprint(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.txt", std::ios::binary);
    require(is.good(), "dataset_fingerprint: manifest not found in " + dir);
    std::ostringstream buf;
    buf << is.rdbuf();
    const std::string s = buf.str();
    return fnv1a64(s.data(), s.size());
}

void write_raster(const Raster& r, const std::string& path_base,
                  const std::vector<std::string>& band_names) {
    require(static_cast<int>(band_names.size()) == r.channels,
            "write_raster: one band name per channel required");
    std::ofstream bin(path_base + ".bin", std::ios::binary);
    require(bin.good(), "write_raster: cannot open " + path_base + ".bin");
    write_planes(bin, r);

    std::ofstream side(path_base + ".txt");
    side << "dtype: float32-le\n";
    side << "planes: " << r.channels << "\n";
    side << "height: " << r.height << "\n";
    side << "width: " << r.width << "\n";
    side << "bands:";
    for (const auto& b : band_names) side << " " << b;
    side << "\n";
}

}  // namespace tsgan
