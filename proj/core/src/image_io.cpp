#include "tsgan/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tsgan {

namespace {

unsigned char to_byte(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

void write_ppm(const Raster& r, const std::string& path) {
    require(r.channels == 1 || r.channels == 3,
            "write_ppm: expected 1 or 3 channels");
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "write_ppm: cannot open " + path);
    const bool color = r.channels == 3;
    os << (color ? "P6" : "P5") << "\n" << r.width << " " << r.height << "\n255\n";
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x) {
            if (color) {
                for (int c = 0; c < 3; ++c) os.put(to_byte(r.at(c, y, x)));
            } else {
                os.put(to_byte(r.at(0, y, x)));
            }
        }
}

void write_tile_row(const std::vector<Raster>& tiles, const std::string& path,
                    int gutter) {
    require(!tiles.empty(), "write_tile_row: no tiles");
    const int h = tiles.front().height;
    int w_total = gutter * (static_cast<int>(tiles.size()) + 1);
    for (const Raster& t : tiles) {
        require(t.height == h, "write_tile_row: tile height mismatch");
        w_total += t.width;
    }
    Raster canvas(3, h, w_total, 1.0);
    int x0 = gutter;
    for (const Raster& t : tiles) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < t.width; ++x)
                for (int c = 0; c < 3; ++c)
                    canvas.at(c, y, x0 + x) =
                        t.channels == 3 ? t.at(c, y, x) : t.at(0, y, x);
        x0 += t.width + gutter;
    }
    write_ppm(canvas, path);
}

}  // namespace tsgan
