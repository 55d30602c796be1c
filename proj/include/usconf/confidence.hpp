#pragma once

#include "usconf/config.hpp"
#include "usconf/image.hpp"

#include <optional>
#include <span>
#include <vector>

namespace usconf {

/// Discretized row-to-row diffraction kernel: 2*kappa+1 weights indexed by
/// lateral offset k in [-kappa, kappa]. Weights are normal-CDF bin masses
/// with the tail mass folded into k = +-kappa, so they sum to 1.
struct StencilWeights {
    int kappa = 0;
    std::vector<double> weights; // index k + kappa

    double at(int k) const { return weights[static_cast<size_t>(k + kappa)]; }
};

/// Samples the lateral weighting function. Rejects kappa < 0, sigma <= 0
/// and combinations where the folded tail outweighs the central tap
/// (sigma too large for kappa).
StencilWeights make_stencil(int kappa, double sigma);

/// Per-edge relative gradients g(s, j, d): source row s in [0, h-2],
/// source column j, lateral direction d in [-kappa, kappa]. Entries whose
/// target column j+d falls outside the image are 0 and never used by the
/// propagation (except in degenerate slices, which are filled with 1
/// wholesale).
struct RelativeGradientField {
    int rows = 0; // h - 1
    int cols = 0;
    int kappa = 0;
    std::vector<double> values;

    RelativeGradientField() = default;
    RelativeGradientField(int rows, int cols, int kappa, double fill = 0.0)
        : rows(rows), cols(cols), kappa(kappa),
          values(static_cast<size_t>(rows) * cols * (2 * kappa + 1), fill) {}

    size_t index(int s, int j, int d) const {
        return (static_cast<size_t>(s) * cols + j) * (2 * kappa + 1) + (d + kappa);
    }
    double at(int s, int j, int d) const { return values[index(s, j, d)]; }
    double& at(int s, int j, int d) { return values[index(s, j, d)]; }

    bool target_valid(int j, int d) const { return j + d >= 0 && j + d < cols; }
};

/// Row-to-row gradients normalized by the mean gradient of the same row and
/// direction. When `exclude` is given, terms touching a pixel with reverb
/// probability > 0.5 are omitted from the mean. A slice whose mean falls
/// below eps degenerates to g = 1.
RelativeGradientField relative_gradient(const ImageGrid& image, int kappa,
                                        const ProbMask* exclude, double eps);

/// Depth adjustment g' = g^beta * exp(-alpha * (i+1) / h), with i the
/// 1-based source row of the edge (field row s has i = s + 1, so the
/// deepest edge is scaled by exactly exp(-alpha)).
RelativeGradientField beer_lambert_adjust(const RelativeGradientField& g, double alpha,
                                          double beta, int height);

/// Beer-Lambert factor for one field row (0-based source row s).
double depth_factor(double alpha, int source_row, int height);

/// Calibration constant gamma = -ln(xi) / D. as_printed: D is the printed
/// normalizer sum_{i=1..h} exp(+alpha*i/h). consistent: D sums exactly the
/// depth factors the propagation applies, so a homogeneous image reaches
/// xi at the bottom row.
double gamma_coefficient(double alpha, int height, double xi, CalibrationSign sign);

/// w = exp(-gamma * g') in (0, 1].
double edge_weight(double g_adjusted, double gamma);

/// Per-edge propagation weights for an image: the composed pipeline
/// relative_gradient -> (artifact overrides when mask given) ->
/// beer_lambert_adjust -> edge_weight.
RelativeGradientField build_weight_field(const ImageGrid& image, const ConfidenceConfig& cfg,
                                         const ProbMask* mask);

/// Intensity confidence: first row 1, each next row the stencil-weighted,
/// edge-attenuated sum of the row above. Stencil taps falling outside the
/// image are dropped and the surviving weights renormalized.
ImageGrid propagate(const ImageGrid& image, const ConfidenceConfig& cfg,
                    const ProbMask* mask = nullptr);

/// Seeding hook for tests and the truncated variant: runs the same
/// propagation from an arbitrary first row (values need not lie in [0,1])
/// and returns the raw double map, row-major. `row_ceiling`, when non-empty,
/// clamps each computed row r to row_ceiling[r] before it feeds row r+1.
std::vector<double> propagate_rows(const ImageGrid& image, const ConfidenceConfig& cfg,
                                   const ProbMask* mask, std::span<const double> first_row,
                                   std::span<const double> row_ceiling = {});

} // namespace usconf
