#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "iadiff/errors.hpp"
#include "iadiff/image.hpp"

namespace iadiff {

// Image file I/O.
//
// PGM (P5 binary / P2 ASCII, 8-bit) is used for display images; writing
// clamps to [0,255] and rounds to the nearest integer at output only.
// PFM ("Pf", single channel, 32-bit float) carries unclamped intermediates
// losslessly up to float precision. PFM rows are stored bottom-to-top and
// the scale sign encodes endianness, as usual for the format.

namespace detail {

inline std::string at_byte(const std::istream& in) {
    // tellg on a failed stream returns -1; report end-of-data instead.
    auto& s = const_cast<std::istream&>(in);
    const auto pos = s.tellg();
    if (pos < 0) return "at end of data";
    return "at byte " + std::to_string(static_cast<long long>(pos));
}

inline int header_token_int(std::istream& in, const std::string& path, const char* what) {
    // Skips whitespace and '#' comments, then reads one nonnegative integer.
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    long long v = 0;
    if (!(in >> v) || v < 0)
        throw data_error(path + ": malformed header, expected " + std::string(what) +
                         " " + at_byte(in));
    if (v > 1 << 24)
        throw data_error(path + ": implausible " + std::string(what) + " " +
                         std::to_string(v) + " " + at_byte(in));
    return static_cast<int>(v);
}

inline float swap_float(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    u = ((u & 0x000000FFu) << 24) | ((u & 0x0000FF00u) << 8) |
        ((u & 0x00FF0000u) >> 8) | ((u & 0xFF000000u) >> 24);
    std::memcpy(&f, &u, 4);
    return f;
}

inline void check_grid_size(const std::string& path, int w, int h) {
    if (w < 3 || h < 3)
        throw data_error(path + ": image is " + std::to_string(w) + "x" +
                         std::to_string(h) + ", need at least 3x3");
}

}  // namespace detail

/// Reads a PGM (P5/P2) or PFM ("Pf") file, dispatching on the magic bytes.
inline ImageGrid read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path + ": cannot open for reading");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in) throw data_error(path + ": truncated magic " + detail::at_byte(in));
    const std::string magic{m0, m1};

    if (magic == "P5" || magic == "P2") {
        const int w = detail::header_token_int(in, path, "width");
        const int h = detail::header_token_int(in, path, "height");
        const int maxval = detail::header_token_int(in, path, "max-value");
        detail::check_grid_size(path, w, h);
        if (maxval <= 0)
            throw data_error(path + ": malformed max-value " + std::to_string(maxval));
        if (maxval > 255)
            throw data_error(path + ": unsupported max-value " + std::to_string(maxval) +
                             " (only 8-bit PGM is supported)");
        const std::size_t n = static_cast<std::size_t>(w) * h;
        std::vector<double> px(n);
        const double scale = 255.0 / maxval;
        if (magic == "P5") {
            in.get();  // single whitespace after max-value
            std::vector<unsigned char> raw(n);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
            if (static_cast<std::size_t>(in.gcount()) != n)
                throw data_error(path + ": truncated P5 payload " + detail::at_byte(in) +
                                 " (" + std::to_string(in.gcount()) + " of " +
                                 std::to_string(n) + " bytes)");
            for (std::size_t i = 0; i < n; ++i) px[i] = raw[i] * scale;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const int v = detail::header_token_int(in, path, "P2 sample");
                if (v > maxval)
                    throw data_error(path + ": sample " + std::to_string(v) +
                                     " exceeds max-value " + std::to_string(maxval) + " " +
                                     detail::at_byte(in));
                px[i] = v * scale;
            }
        }
        return ImageGrid(w, h, std::move(px));
    }

    if (magic == "Pf") {
        const int w = detail::header_token_int(in, path, "width");
        const int h = detail::header_token_int(in, path, "height");
        double byte_order = 0.0;
        if (!(in >> byte_order) || byte_order == 0.0)
            throw data_error(path + ": malformed PFM scale " + detail::at_byte(in));
        detail::check_grid_size(path, w, h);
        in.get();  // single whitespace after scale
        const bool file_le = byte_order < 0.0;
        const bool host_le = (std::endian::native == std::endian::little);
        const std::size_t n = static_cast<std::size_t>(w) * h;
        std::vector<float> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
        if (static_cast<std::size_t>(in.gcount()) != n * 4)
            throw data_error(path + ": truncated PFM payload " + detail::at_byte(in) +
                             " (" + std::to_string(in.gcount()) + " of " +
                             std::to_string(n * 4) + " bytes)");
        std::vector<double> px(n);
        for (int y = 0; y < h; ++y) {
            const float* src = raw.data() + static_cast<std::size_t>(h - 1 - y) * w;
            double* dst = px.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                float f = src[x];
                if (file_le != host_le) f = detail::swap_float(f);
                dst[x] = static_cast<double>(f);
            }
        }
        return ImageGrid(w, h, std::move(px));
    }

    throw data_error(path + ": unsupported format, magic \"" + magic + "\"");
}

/// Writes binary PGM (P5, max-value 255). Values are clamped to [0,255]
/// and rounded to the nearest integer; this is the only place clamping
/// ever happens.
inline void write_pgm(const ImageGrid& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error(path + ": cannot open for writing");
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    const double* p = img.data();
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(p[i], 0.0, 255.0);
        raw[i] = static_cast<unsigned char>(std::lround(v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw data_error(path + ": write failed");
}

/// Writes single-channel little-endian PFM. Lossless round trip for values
/// representable as 32-bit floats; never clamps.
inline void write_pfm(const ImageGrid& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error(path + ": cannot open for writing");
    out << "Pf\n" << img.width() << " " << img.height() << "\n-1.0\n";
    const int w = img.width(), h = img.height();
    std::vector<float> rowbuf(w);
    const bool host_le = (std::endian::native == std::endian::little);
    for (int y = h - 1; y >= 0; --y) {
        const double* src = img.row(y);
        for (int x = 0; x < w; ++x) {
            float f = static_cast<float>(src[x]);
            if (!host_le) f = detail::swap_float(f);
            rowbuf[x] = f;
        }
        out.write(reinterpret_cast<const char*>(rowbuf.data()),
                  static_cast<std::streamsize>(w) * 4);
    }
    if (!out) throw data_error(path + ": write failed");
}

/// Writes PGM or PFM depending on the file extension (.pgm / .pfm).
inline void write_image(const ImageGrid& img, const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".pgm") {
        write_pgm(img, path);
    } else if (ext == ".pfm") {
        write_pfm(img, path);
    } else {
        throw data_error(path + ": unsupported output extension \"" + ext +
                         "\" (use .pgm or .pfm)");
    }
}

}  // namespace iadiff
