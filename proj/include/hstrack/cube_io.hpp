#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hstrack/cube.hpp"
#include "hstrack/types.hpp"

namespace hstrack {

enum class Dtype { u8, u16le, f32le };

inline int dtype_size(Dtype d) {
    switch (d) {
    case Dtype::u8: return 1;
    case Dtype::u16le: return 2;
    case Dtype::f32le: return 4;
    }
    return 0;
}

inline std::string dtype_name(Dtype d) {
    switch (d) {
    case Dtype::u8: return "u8";
    case Dtype::u16le: return "u16le";
    case Dtype::f32le: return "f32le";
    }
    return "?";
}

inline Dtype dtype_from_name(const std::string& s) {
    if (s == "u8") return Dtype::u8;
    if (s == "u16le") return Dtype::u16le;
    if (s == "f32le") return Dtype::f32le;
    throw IoError("unknown dtype '" + s + "' (expected u8, u16le or f32le)");
}

// Text header describing a raw BSQ sequence. `data` names the sibling binary.
struct SequenceHeader {
    int width = 0;
    int height = 0;
    int bands = 0;
    int frame_count = 0;
    Dtype dtype = Dtype::f32le;
    std::string data;
    std::vector<double> wavelengths; // optional, nm, strictly increasing

    std::size_t frame_bytes() const {
        return static_cast<std::size_t>(width) * height * bands * dtype_size(dtype);
    }
};

namespace detail {

inline void validate_header(const SequenceHeader& h) {
    if (h.width < 1 || h.height < 1) throw IoError("sequence header: width/height must be >= 1");
    if (h.bands < 1) throw IoError("sequence header: bands must be >= 1");
    if (h.frame_count < 1) throw IoError("sequence header: frames must be >= 1");
    if (h.data.empty()) throw IoError("sequence header: missing data file name");
    if (!h.wavelengths.empty()) {
        if (static_cast<int>(h.wavelengths.size()) != h.bands) {
            throw IoError("sequence header: wavelengths count != bands");
        }
        for (std::size_t i = 1; i < h.wavelengths.size(); ++i) {
            if (h.wavelengths[i] <= h.wavelengths[i - 1]) {
                throw IoError("sequence header: wavelengths must be strictly increasing");
            }
        }
    }
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void write_u32le(unsigned char* p, std::uint32_t v) {
    p[0] = static_cast<unsigned char>(v);
    p[1] = static_cast<unsigned char>(v >> 8);
    p[2] = static_cast<unsigned char>(v >> 16);
    p[3] = static_cast<unsigned char>(v >> 24);
}

} // namespace detail

inline SequenceHeader parse_sequence_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sequence header: " + path);
    SequenceHeader h;
    bool saw_width = false, saw_height = false, saw_bands = false, saw_frames = false,
         saw_dtype = false, saw_data = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        try {
            if (key == "width") { h.width = std::stoi(val); saw_width = true; }
            else if (key == "height") { h.height = std::stoi(val); saw_height = true; }
            else if (key == "bands") { h.bands = std::stoi(val); saw_bands = true; }
            else if (key == "frames") { h.frame_count = std::stoi(val); saw_frames = true; }
            else if (key == "dtype") { h.dtype = dtype_from_name(val); saw_dtype = true; }
            else if (key == "data") { h.data = val; saw_data = true; }
            else if (key == "wavelengths") {
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    h.wavelengths.push_back(std::stod(detail::trim(tok)));
                }
            } else {
                throw IoError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw IoError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw IoError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    if (!saw_width || !saw_height || !saw_bands || !saw_frames || !saw_dtype || !saw_data) {
        throw IoError(path + ": missing required key(s); need width, height, bands, frames, dtype, data");
    }
    detail::validate_header(h);
    return h;
}

inline void write_sequence_header(const std::string& path, const SequenceHeader& h) {
    detail::validate_header(h);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sequence header: " + path);
    out << "width = " << h.width << "\n"
        << "height = " << h.height << "\n"
        << "bands = " << h.bands << "\n"
        << "frames = " << h.frame_count << "\n"
        << "dtype = " << dtype_name(h.dtype) << "\n"
        << "data = " << h.data << "\n";
    if (!h.wavelengths.empty()) {
        out << "wavelengths = ";
        for (std::size_t i = 0; i < h.wavelengths.size(); ++i) {
            if (i) out << ",";
            out << h.wavelengths[i];
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

// Lazy frame source over a header + raw BSQ binary. Frames are decoded on
// demand; integer dtypes are scaled to [0,1] by the dtype max. Single
// consumer; random access by frame index.
class SequenceReader {
public:
    explicit SequenceReader(const std::string& header_path)
        : header_(parse_sequence_header(header_path)) {
        const auto dir = std::filesystem::path(header_path).parent_path();
        bin_path_ = (dir / header_.data).string();
        std::error_code ec;
        const auto actual = std::filesystem::file_size(bin_path_, ec);
        if (ec) throw IoError("cannot open sequence data: " + bin_path_);
        const std::size_t expected = header_.frame_bytes() * header_.frame_count;
        if (actual != expected) {
            throw IoError("sequence data " + bin_path_ + ": expected " +
                          std::to_string(expected) + " bytes, got " + std::to_string(actual));
        }
        in_.open(bin_path_, std::ios::binary);
        if (!in_) throw IoError("cannot open sequence data: " + bin_path_);
    }

    const SequenceHeader& header() const { return header_; }
    int frame_count() const { return header_.frame_count; }

    HyperCube read_frame(int i) {
        if (i < 0 || i >= header_.frame_count) {
            throw std::out_of_range("frame index " + std::to_string(i) + " out of range");
        }
        const std::size_t nbytes = header_.frame_bytes();
        buf_.resize(nbytes);
        in_.seekg(static_cast<std::streamoff>(nbytes) * i);
        in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(nbytes));
        if (in_.gcount() != static_cast<std::streamsize>(nbytes)) {
            throw IoError("short read from " + bin_path_ + " at frame " + std::to_string(i));
        }
        HyperCube cube(header_.height, header_.width, header_.bands);
        const std::size_t n = cube.size();
        const unsigned char* p = buf_.data();
        switch (header_.dtype) {
        case Dtype::u8:
            for (std::size_t k = 0; k < n; ++k) cube.data[k] = p[k] / 255.0;
            break;
        case Dtype::u16le:
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint16_t v = static_cast<std::uint16_t>(p[2 * k]) |
                                        (static_cast<std::uint16_t>(p[2 * k + 1]) << 8);
                cube.data[k] = v / 65535.0;
            }
            break;
        case Dtype::f32le:
            for (std::size_t k = 0; k < n; ++k) {
                const float f = std::bit_cast<float>(detail::read_u32le(p + 4 * k));
                if (!std::isfinite(f) || f < 0.0f || f > 1.0f) {
                    throw IoError(bin_path_ + ": frame " + std::to_string(i) +
                                  " contains a non-finite or out-of-[0,1] value");
                }
                cube.data[k] = static_cast<double>(f);
            }
            break;
        }
        return cube;
    }

private:
    SequenceHeader header_;
    std::string bin_path_;
    std::ifstream in_;
    std::vector<unsigned char> buf_;
};

namespace detail {

// Values are clamped to [0,1] on encode; for cubes that already satisfy the
// range invariant this is the identity, so round-trips stay byte-exact.
inline void encode_frame(const HyperCube& cube, Dtype dtype, std::vector<unsigned char>& out) {
    const std::size_t n = cube.size();
    out.resize(n * dtype_size(dtype));
    switch (dtype) {
    case Dtype::u8:
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = static_cast<unsigned char>(std::lround(std::clamp(cube.data[k], 0.0, 1.0) * 255.0));
        }
        break;
    case Dtype::u16le:
        for (std::size_t k = 0; k < n; ++k) {
            const auto v =
                static_cast<std::uint16_t>(std::lround(std::clamp(cube.data[k], 0.0, 1.0) * 65535.0));
            out[2 * k] = static_cast<unsigned char>(v);
            out[2 * k + 1] = static_cast<unsigned char>(v >> 8);
        }
        break;
    case Dtype::f32le:
        for (std::size_t k = 0; k < n; ++k) {
            const auto f = static_cast<float>(std::clamp(cube.data[k], 0.0, 1.0));
            write_u32le(out.data() + 4 * k, std::bit_cast<std::uint32_t>(f));
        }
        break;
    }
}

} // namespace detail

// Streams frames to a header + binary pair; header goes out up front so a
// partially written sequence is detectable by byte count.
class SequenceWriter {
public:
    SequenceWriter(const std::string& header_path, SequenceHeader header)
        : header_(std::move(header)) {
        const std::filesystem::path hp(header_path);
        if (header_.data.empty()) {
            header_.data = hp.stem().string() + ".bin";
        }
        write_sequence_header(header_path, header_);
        const auto bin = hp.parent_path() / header_.data;
        out_.open(bin, std::ios::binary | std::ios::trunc);
        if (!out_) throw IoError("cannot write sequence data: " + bin.string());
    }

    void write_frame(const HyperCube& cube) {
        if (cube.width != header_.width || cube.height != header_.height ||
            cube.bands != header_.bands) {
            throw std::invalid_argument("write_frame: cube shape does not match header");
        }
        detail::encode_frame(cube, header_.dtype, buf_);
        out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
        if (!out_) throw IoError("write failed on sequence data");
        ++written_;
    }

    // Frames written so far; must equal the header's frame count at the end.
    int written() const { return written_; }

    void close() {
        out_.close();
        if (written_ != header_.frame_count) {
            throw IoError("sequence writer closed after " + std::to_string(written_) +
                          " of " + std::to_string(header_.frame_count) + " frames");
        }
    }

private:
    SequenceHeader header_;
    std::ofstream out_;
    std::vector<unsigned char> buf_;
    int written_ = 0;
};

inline void write_sequence(const std::string& header_path, const std::vector<HyperCube>& frames,
                           Dtype dtype, std::vector<double> wavelengths = {}) {
    if (frames.empty()) throw std::invalid_argument("write_sequence: no frames");
    SequenceHeader h;
    h.width = frames[0].width;
    h.height = frames[0].height;
    h.bands = frames[0].bands;
    h.frame_count = static_cast<int>(frames.size());
    h.dtype = dtype;
    h.wavelengths = std::move(wavelengths);
    SequenceWriter w(header_path, h);
    for (const auto& f : frames) w.write_frame(f);
    w.close();
}

// Per-frame box CSV: header line `frame,x,y,w,h`, then 0-based rows in order.
inline void write_boxes_csv(const std::string& path, const std::vector<BoundingBox>& boxes) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write box file: " + path);
    out << "frame,x,y,w,h\n";
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        out << i << "," << boxes[i].x << "," << boxes[i].y << ","
            << boxes[i].w << "," << boxes[i].h << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

inline std::vector<BoundingBox> read_boxes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open box file: " + path);
    std::vector<BoundingBox> boxes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (lineno == 1 && t == "frame,x,y,w,h") continue;
        std::stringstream ss(t);
        std::string tok;
        long vals[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, tok, ',')) {
                throw IoError(path + ":" + std::to_string(lineno) + ": expected frame,x,y,w,h");
            }
            try {
                vals[k] = std::stol(detail::trim(tok));
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) + ": bad integer '" + tok + "'");
            }
        }
        if (vals[0] != static_cast<long>(boxes.size())) {
            throw IoError(path + ":" + std::to_string(lineno) + ": frame indices must be 0-based and consecutive");
        }
        boxes.push_back(BoundingBox{static_cast<int>(vals[1]), static_cast<int>(vals[2]),
                                    static_cast<int>(vals[3]), static_cast<int>(vals[4])});
    }
    return boxes;
}

} // namespace hstrack
