#pragma once

// Independent, deliberately naive re-implementations used as test oracles.
// Everything here is transcribed straight from the underlying formulas with
// its own helpers (normal CDF by quadrature instead of erfc) and shares no
// code with the library implementation it checks.

#include "usconf/config.hpp"
#include "usconf/image.hpp"

#include <vector>

namespace oracles {

/// Standard normal CDF by adaptive Simpson quadrature of the density.
double normal_cdf(double x);

/// Lateral stencil weights, tail mass folded into the outermost taps.
std::vector<double> stencil(int kappa, double sigma);

/// Flattened (h-1) x a x (2k+1) relative-gradient field; entries whose
/// target column is out of range are 0 (1 in degenerate slices).
std::vector<double> relative_gradient(const usconf::ImageGrid& image, int kappa, double eps);

/// Depth-adjusted gradients; source rows are 1-based in the exponent.
std::vector<double> beer_lambert(const std::vector<double>& g, int rows, int cols, int kappa,
                                 double alpha, double beta, int height);

double gamma_coefficient(double alpha, int height, double xi, usconf::CalibrationSign sign);

/// Full naive propagation (no masks): relative gradient, depth adjustment,
/// edge weights, stencil sum with drop-and-renormalize borders.
std::vector<double> propagate(const usconf::ImageGrid& image, const usconf::ConfidenceConfig& cfg);

/// Closed-form bottom-row value for a homogeneous image.
double homogeneous_bottom(double alpha, int height, double xi, usconf::CalibrationSign sign);

/// Straight-line transcription of the instantaneous coefficient of
/// variation (central differences, 4-neighbor Laplacian, replicated
/// borders, input clamped to >= 1/255, radicand clamped to >= 0).
std::vector<double> icov(const usconf::ImageGrid& image);

} // namespace oracles
