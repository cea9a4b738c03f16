#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "hstrack/types.hpp"

namespace hstrack {

// One hyperspectral frame: height x width x bands reflectance values in [0,1].
// Band-sequential layout: data[(b*height + r)*width + c], so each band is a
// contiguous row-major plane.
struct HyperCube {
    int height = 0;
    int width = 0;
    int bands = 0;
    std::vector<double> data;

    HyperCube() = default;
    HyperCube(int h, int w, int d)
        : height(h), width(w), bands(d),
          data(static_cast<std::size_t>(h) * w * d, 0.0) {}

    double& at(int r, int c, int b) {
        return data[(static_cast<std::size_t>(b) * height + r) * width + c];
    }
    double at(int r, int c, int b) const {
        return data[(static_cast<std::size_t>(b) * height + r) * width + c];
    }

    double* band_ptr(int b) {
        return data.data() + static_cast<std::size_t>(b) * height * width;
    }
    const double* band_ptr(int b) const {
        return data.data() + static_cast<std::size_t>(b) * height * width;
    }

    std::size_t size() const { return data.size(); }

    bool operator==(const HyperCube&) const = default;
};

// One wavelength plane, values unchanged.
inline Mat2 band(const HyperCube& cube, int b) {
    if (b < 0 || b >= cube.bands) {
        throw std::out_of_range("band index " + std::to_string(b) +
                                " out of range [0, " + std::to_string(cube.bands) + ")");
    }
    Mat2 out(cube.height, cube.width);
    const double* src = cube.band_ptr(b);
    std::copy(src, src + out.size(), out.v.begin());
    return out;
}

// Single-band sub-cube (bands == 1); the grayscale-baseline input.
inline HyperCube select_band(const HyperCube& cube, int b) {
    Mat2 plane = band(cube, b);
    HyperCube out(cube.height, cube.width, 1);
    out.data = std::move(plane.v);
    return out;
}

// Extracts box.w x box.h x bands; pixels outside the frame replicate the
// nearest edge pixel, so any box position is valid.
inline HyperCube crop_window(const HyperCube& cube, const BoundingBox& box) {
    if (box.w < 1 || box.h < 1) {
        throw std::invalid_argument("crop_window: box extent must be >= 1");
    }
    HyperCube out(box.h, box.w, cube.bands);
    std::vector<int> col_map(box.w);
    for (int c = 0; c < box.w; ++c) {
        col_map[c] = std::clamp(box.x + c, 0, cube.width - 1);
    }
    for (int b = 0; b < cube.bands; ++b) {
        const double* src_plane = cube.band_ptr(b);
        double* dst = out.band_ptr(b);
        for (int r = 0; r < box.h; ++r) {
            const int sr = std::clamp(box.y + r, 0, cube.height - 1);
            const double* src = src_plane + static_cast<std::size_t>(sr) * cube.width;
            for (int c = 0; c < box.w; ++c) {
                *dst++ = src[col_map[c]];
            }
        }
    }
    return out;
}

// Writes a cube back into the frame at box position; the inverse of an
// interior crop_window. Out-of-frame destination pixels are dropped.
inline void paste_window(HyperCube& cube, const HyperCube& patch, const BoundingBox& box) {
    if (patch.bands != cube.bands || patch.width != box.w || patch.height != box.h) {
        throw std::invalid_argument("paste_window: patch/box shape mismatch");
    }
    for (int b = 0; b < cube.bands; ++b) {
        for (int r = 0; r < box.h; ++r) {
            const int dr = box.y + r;
            if (dr < 0 || dr >= cube.height) continue;
            for (int c = 0; c < box.w; ++c) {
                const int dc = box.x + c;
                if (dc < 0 || dc >= cube.width) continue;
                cube.at(dr, dc, b) = patch.at(r, c, b);
            }
        }
    }
}

} // namespace hstrack
