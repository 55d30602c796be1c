#include "usconf/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usconf {

namespace {

bool is_needle(const ProbMask& m, int i, int j) { return m.needle.at(i, j) > 0.5f; }
bool is_reverb(const ProbMask& m, int i, int j) { return m.reverb.at(i, j) > 0.5f; }

} // namespace

NeedleEdgeMap needle_edge_map(const ProbMask& mask) {
    const int h = mask.needle.height();
    const int a = mask.needle.width();
    NeedleEdgeMap out;
    out.height = h;
    out.width = a;
    out.edge.assign(static_cast<size_t>(h) * a, 0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            if (!is_needle(mask, i, j)) continue;
            const bool boundary = (i == 0 || !is_needle(mask, i - 1, j)) ||
                                  (i == h - 1 || !is_needle(mask, i + 1, j)) ||
                                  (j == 0 || !is_needle(mask, i, j - 1)) ||
                                  (j == a - 1 || !is_needle(mask, i, j + 1));
            if (boundary) out.edge[static_cast<size_t>(i) * a + j] = 1;
        }
    }
    return out;
}

RelativeGradientField override_gradients(const RelativeGradientField& g, const ImageGrid& image,
                                         const ProbMask& mask, const NeedleEdgeMap& edges) {
    const int h = image.height();
    const int a = image.width();
    if (g.rows != h - 1 || g.cols != a)
        throw std::invalid_argument("override_gradients: field does not match image");
    mask.validate_against(image);
    if (edges.height != h || edges.width != a)
        throw std::invalid_argument("override_gradients: edge map does not match image");

    // largest straight-down gradient anywhere in the image
    double g_max = 0.0;
    for (int s = 0; s < h - 1; ++s)
        for (int j = 0; j < a; ++j)
            g_max = std::max(g_max, std::abs(static_cast<double>(image.at(s + 1, j)) - image.at(s, j)));

    RelativeGradientField out = g;
    for (int s = 0; s < h - 1; ++s) {
        double row_mean = -1.0; // computed lazily, full row, no exclusion
        for (int j = 0; j < a; ++j) {
            const bool needle = is_needle(mask, s, j);
            const bool reverb = is_reverb(mask, s, j);
            if (!needle && !reverb) continue;
            double value = 1.0;
            if (needle && edges.is_edge(s, j)) {
                if (row_mean < 0.0) {
                    double sum = 0.0;
                    for (int k = 0; k < a; ++k)
                        sum += std::abs(static_cast<double>(image.at(s + 1, k)) - image.at(s, k));
                    row_mean = sum / a;
                }
                // degenerate row mean falls back to the neutral gradient
                value = row_mean > 1e-12 ? g_max / row_mean : 1.0;
            }
            for (int d = -g.kappa; d <= g.kappa; ++d) out.at(s, j, d) = value;
        }
    }
    return out;
}

ImageGrid suppress_artifacts(const ImageGrid& confidence, const ProbMask& mask) {
    mask.validate_against(confidence);
    ImageGrid out = confidence;
    for (int i = 0; i < out.height(); ++i)
        for (int j = 0; j < out.width(); ++j)
            out.at(i, j) = static_cast<float>(out.at(i, j) * (1.0 - mask.reverb.at(i, j)));
    out.validate();
    return out;
}

} // namespace usconf
