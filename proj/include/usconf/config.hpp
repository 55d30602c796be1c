#pragma once

#include <optional>
#include <string>

namespace usconf {

/// Half-open rectangle in image coordinates: rows [row0,row1), cols [col0,col1).
struct Rect {
    int row0 = 0;
    int col0 = 0;
    int row1 = 0;
    int col1 = 0;

    int rows() const { return row1 - row0; }
    int cols() const { return col1 - col0; }
    bool inside(int height, int width) const {
        return row0 >= 0 && col0 >= 0 && row1 <= height && col1 <= width &&
               row0 < row1 && col0 < col1;
    }
};

/// Homogeneous-region selector for the q0 estimate: either a user rectangle
/// or `auto` (the 11x11 window with minimum variance of q).
struct Q0Region {
    bool automatic = true;
    Rect rect;
};

struct DenoiseConfig {
    int iterations = 20;
    double time_step = 0.1; // explicit scheme stable for dt <= 0.25
    Q0Region q0_region;
    double q0_decay_rho = 0.05;
    double canny_low = 0.1;   // fraction of max gradient magnitude
    double canny_high = 0.25; // fraction of max gradient magnitude
    double canny_sigma = 1.4;
    double c_canny = 0.3;
    int histogram_bins = 256;

    void validate() const;
};

/// Which sign convention the confidence calibration constant uses. The
/// printed formulas pair a negative exponent in the depth adjustment with a
/// positive exponent in the normalizer; `consistent` flips the normalizer so
/// a homogeneous image decays to exactly xi at the bottom row.
enum class CalibrationSign { as_printed, consistent };

struct ConfidenceConfig {
    double alpha = 2.0; // attenuation coefficient
    double beta = 1.0;  // gradient adjusting factor
    int kappa = 2;      // stencil half-width
    double sigma = 1.0; // stencil spread
    double xi = 0.1;    // bottom-row target for a homogeneous image
    CalibrationSign calibration_sign = CalibrationSign::as_printed;
    double epsilon_mean = 1e-6; // degenerate-mean guard
    DenoiseConfig denoise;

    void validate() const;
};

/// Strict plain-text config: one `key = value` per line, '#' comments,
/// blank lines ignored. Keys map 1:1 onto ConfidenceConfig / DenoiseConfig
/// fields; an unknown key is an error naming the key.
ConfidenceConfig parse_config_text(const std::string& text);
ConfidenceConfig load_config_file(const std::string& path);

/// Applies a single key/value pair. Throws std::invalid_argument with the
/// offending key on unknown keys or malformed values.
void apply_config_entry(ConfidenceConfig& cfg, const std::string& key, const std::string& value);

} // namespace usconf
