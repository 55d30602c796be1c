#include "usconf/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace usconf {

namespace {

void put_u32le(std::ostream& out, uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

uint32_t get_u32le(std::istream& in, const std::string& path) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw io_error("truncated raw map '" + path + "'");
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

// --- PGM (P5, binary, 8/16-bit grayscale) ---

int pgm_token(std::istream& in, const std::string& path) {
    // skips whitespace and '#' comments between header tokens
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            int value = 0;
            bool any = false;
            do {
                if (!std::isdigit(c)) throw io_error("malformed PGM header in '" + path + "'");
                value = value * 10 + (c - '0');
                any = true;
            } while ((c = in.get()) != EOF && !std::isspace(c));
            if (!any) break;
            return value;
        }
    }
    throw io_error("malformed PGM header in '" + path + "'");
}

ImageGrid load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw io_error("'" + path + "' is not a binary PGM (P5)");
    const int width = pgm_token(in, path);
    const int height = pgm_token(in, path);
    const int maxval = pgm_token(in, path);
    if (width <= 0 || height <= 0) throw io_error("zero dimension in '" + path + "'");
    if (maxval <= 0 || maxval > 65535) throw io_error("bad PGM maxval in '" + path + "'");

    const size_t n = static_cast<size_t>(width) * height;
    std::vector<float> samples(n);
    const float scale = 1.0f / static_cast<float>(maxval);
    if (maxval < 256) {
        std::vector<unsigned char> raw(n);
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n)))
            throw io_error("truncated PGM data in '" + path + "'");
        for (size_t i = 0; i < n; ++i) samples[i] = static_cast<float>(raw[i]) * scale;
    } else {
        std::vector<unsigned char> raw(n * 2); // 16-bit PGM samples are big-endian
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2)))
            throw io_error("truncated PGM data in '" + path + "'");
        for (size_t i = 0; i < n; ++i) {
            const unsigned v = static_cast<unsigned>(raw[2 * i]) << 8 | raw[2 * i + 1];
            samples[i] = static_cast<float>(v) * scale;
        }
    }
    return ImageGrid(height, width, ValueDomain::intensity, std::move(samples));
}

// --- PNG via libpng ---

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

ImageGrid load_png(const std::string& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp) throw io_error("cannot open '" + path + "'");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, r.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw io_error("'" + path + "' is not a PNG file");
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw io_error("libpng init failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(r.png))) throw io_error("failed to decode '" + path + "'");
    png_init_io(r.png, r.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const png_uint_32 width = png_get_image_width(r.png, r.info);
    const png_uint_32 height = png_get_image_height(r.png, r.info);
    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);
    if (width == 0 || height == 0) throw io_error("zero dimension in '" + path + "'");
    if (color_type != PNG_COLOR_TYPE_GRAY)
        throw io_error("'" + path + "' is not grayscale (color or paletted input rejected)");
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    png_read_update_info(r.png, r.info);

    const int depth = png_get_bit_depth(r.png, r.info);
    const float scale = depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    const size_t rowbytes = png_get_rowbytes(r.png, r.info);
    std::vector<unsigned char> row(rowbytes);
    std::vector<float> samples(static_cast<size_t>(width) * height);
    for (png_uint_32 i = 0; i < height; ++i) {
        png_read_row(r.png, row.data(), nullptr);
        if (depth == 16) {
            for (png_uint_32 j = 0; j < width; ++j) {
                const unsigned v = static_cast<unsigned>(row[2 * j]) << 8 | row[2 * j + 1];
                samples[static_cast<size_t>(i) * width + j] = static_cast<float>(v) * scale;
            }
        } else {
            for (png_uint_32 j = 0; j < width; ++j)
                samples[static_cast<size_t>(i) * width + j] = static_cast<float>(row[j]) * scale;
        }
    }
    png_read_end(r.png, nullptr);
    return ImageGrid(static_cast<int>(height), static_cast<int>(width), ValueDomain::intensity,
                     std::move(samples));
}

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void save_png16(const ImageGrid& grid, const std::string& path) {
    PngWriter w;
    w.fp = std::fopen(path.c_str(), "wb");
    if (!w.fp) throw io_error("cannot write '" + path + "'");
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw io_error("libpng init failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(w.png))) throw io_error("failed to encode '" + path + "'");
    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(grid.width()),
                 static_cast<png_uint_32>(grid.height()), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<unsigned char> row(static_cast<size_t>(grid.width()) * 2);
    for (int i = 0; i < grid.height(); ++i) {
        for (int j = 0; j < grid.width(); ++j) {
            const double v = std::clamp(static_cast<double>(grid.at(i, j)), 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::lround(v * 65535.0));
            row[2 * j] = static_cast<unsigned char>(q >> 8); // PNG stores big-endian
            row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

void save_raw_f32(const ImageGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write '" + path + "'");
    put_u32le(out, static_cast<uint32_t>(grid.height()));
    put_u32le(out, static_cast<uint32_t>(grid.width()));
    for (float v : grid.samples()) {
        const uint32_t bits = std::bit_cast<uint32_t>(v);
        put_u32le(out, bits);
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

void save_csv(const ImageGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc); // binary: LF endings everywhere
    if (!out) throw io_error("cannot write '" + path + "'");
    char buf[64];
    for (int i = 0; i < grid.height(); ++i) {
        for (int j = 0; j < grid.width(); ++j) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, grid.at(i, j),
                                           std::chars_format::general);
            out.write(buf, ptr - buf);
            if (j + 1 < grid.width()) out.put(',');
        }
        out.put('\n');
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

std::string extension_of(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

} // namespace

ImageGrid load_image(const std::string& path, ImageFormat format) {
    switch (format) {
    case ImageFormat::pgm: return load_pgm(path);
    case ImageFormat::png: return load_png(path);
    }
    throw io_error("unknown image format");
}

void save_map(const ImageGrid& grid, const std::string& path, MapFormat format) {
    grid.validate();
    switch (format) {
    case MapFormat::raw_f32: save_raw_f32(grid, path); return;
    case MapFormat::png16: save_png16(grid, path); return;
    case MapFormat::csv: save_csv(grid, path); return;
    }
    throw io_error("unknown map format");
}

ImageGrid load_map(const std::string& path, ValueDomain domain) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    const uint32_t height = get_u32le(in, path);
    const uint32_t width = get_u32le(in, path);
    if (height == 0 || width == 0 || height > (1u << 20) || width > (1u << 20))
        throw io_error("implausible dimensions in raw map '" + path + "'");
    const size_t n = static_cast<size_t>(height) * width;
    std::vector<float> samples(n);
    for (size_t i = 0; i < n; ++i) {
        const uint32_t bits = get_u32le(in, path);
        samples[i] = std::bit_cast<float>(bits);
    }
    return ImageGrid(static_cast<int>(height), static_cast<int>(width), domain, std::move(samples));
}

void save_pgm16(const ImageGrid& grid, const std::string& path) {
    grid.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "P5\n" << grid.width() << " " << grid.height() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(grid.width()) * 2);
    for (int i = 0; i < grid.height(); ++i) {
        for (int j = 0; j < grid.width(); ++j) {
            const double v = std::clamp(static_cast<double>(grid.at(i, j)), 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::lround(v * 65535.0));
            row[2 * j] = static_cast<unsigned char>(q >> 8);
            row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

ImageGrid load_image_auto(const std::string& path) {
    const std::string ext = extension_of(path);
    if (ext == "pgm") return load_image(path, ImageFormat::pgm);
    if (ext == "png") return load_image(path, ImageFormat::png);
    throw io_error("cannot infer image format of '" + path + "' (expected .pgm or .png)");
}

void save_map_auto(const ImageGrid& grid, const std::string& path) {
    const std::string ext = extension_of(path);
    if (ext == "raw") save_map(grid, path, MapFormat::raw_f32);
    else if (ext == "png") save_map(grid, path, MapFormat::png16);
    else if (ext == "csv") save_map(grid, path, MapFormat::csv);
    else if (ext == "pgm") save_pgm16(grid, path);
    else throw io_error("cannot infer output format of '" + path + "' (expected .raw, .png, .csv or .pgm)");
}

ImageGrid load_grid_auto(const std::string& path, ValueDomain raw_domain) {
    const std::string ext = extension_of(path);
    if (ext == "raw") return load_map(path, raw_domain);
    return load_image_auto(path);
}

} // namespace usconf
