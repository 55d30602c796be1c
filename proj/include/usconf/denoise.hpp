#pragma once

#include "usconf/config.hpp"
#include "usconf/image.hpp"

namespace usconf {

/// Instantaneous coefficient of variation, the homogeneity detector driving
/// diffusion. Central-difference gradient, 4-neighbor Laplacian, replicated
/// borders; input samples are clamped to >= 1/255 before dividing and the
/// radicand is clamped to >= 0.
ImageGrid icov(const ImageGrid& image);

/// Diffusion coefficient c(q) against a homogeneous reference q0, scaled by
/// c_canny on edge pixels, clamped to [0,1].
ImageGrid diffusion_coefficient(const ImageGrid& q, double q0, const ImageGrid& edge_mask,
                                double c_canny);

/// Standard Canny detector (Gaussian blur, central-difference gradient,
/// non-maximum suppression, double-threshold hysteresis). Thresholds are
/// fractions of the maximum gradient magnitude. Output is binary {0,1}.
ImageGrid canny_edges(const ImageGrid& image, const DenoiseConfig& cfg);

/// One explicit diffusion step I + dt * div(c grad I), 4-neighbor
/// discretization with reflecting boundaries. Obeys the maximum principle
/// for dt <= 0.25 and c in [0,1].
ImageGrid diffuse_step(const ImageGrid& image, const ImageGrid& coeff, double dt);

/// q0 estimate: mean of q over the region (or over the minimum-variance
/// 11x11 window when automatic).
double estimate_q0(const ImageGrid& q, const Q0Region& region);

/// Binned CDF specification: remaps `source` so its histogram matches
/// `target`'s. Output values are per-bin means of the target samples, which
/// keeps a constant image a fixed point bit-exactly.
ImageGrid histogram_match(const ImageGrid& source, const ImageGrid& target, int bins);

/// Full speckle denoise: per iteration, estimate q0 (with exponential
/// decay), gate the diffusion coefficient with Canny edges, take one
/// explicit diffusion step and histogram-match back to the original input.
ImageGrid denoise(const ImageGrid& image, const DenoiseConfig& cfg);

} // namespace usconf
