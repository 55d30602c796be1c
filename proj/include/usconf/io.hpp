#pragma once

#include "usconf/image.hpp"

#include <stdexcept>
#include <string>

namespace usconf {

/// Filesystem / decode / encode failures. CLI maps these to exit code 2.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

enum class ImageFormat { pgm, png };
enum class MapFormat { raw_f32, png16, csv };

/// Loads an 8- or 16-bit grayscale image and normalizes samples to [0,1]
/// by the format's max value. Rejects color or paletted input.
ImageGrid load_image(const std::string& path, ImageFormat format);

/// Saves a grid. raw_f32: 8-byte header (two little-endian u32: height,
/// width) followed by row-major little-endian float32 samples. png16:
/// 16-bit grayscale, round(v * 65535). csv: one line per row, full
/// precision, '.' decimal separator, LF endings.
void save_map(const ImageGrid& grid, const std::string& path, MapFormat format);

/// Reads a raw_f32 file back; `domain` declares (and validates) the range.
ImageGrid load_map(const std::string& path, ValueDomain domain);

/// Writes a 16-bit binary PGM (P5). Lossy like png16: round(v * 65535).
void save_pgm16(const ImageGrid& grid, const std::string& path);

/// Picks pgm/png by file extension; anything else is an error.
ImageGrid load_image_auto(const std::string& path);

/// Picks raw_f32/png16/csv/pgm by file extension (.raw, .png, .csv, .pgm).
void save_map_auto(const ImageGrid& grid, const std::string& path);

/// Loads either an image (.pgm/.png, domain intensity) or a raw_f32 map.
ImageGrid load_grid_auto(const std::string& path, ValueDomain raw_domain);

} // namespace usconf
