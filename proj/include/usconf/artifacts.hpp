#pragma once

#include "usconf/confidence.hpp"
#include "usconf/image.hpp"

namespace usconf {

/// Marks, per needle pixel (probability > 0.5), whether it lies on the
/// boundary of the needle mask.
struct NeedleEdgeMap {
    int height = 0;
    int width = 0;
    std::vector<unsigned char> edge; // 1 = needle boundary pixel

    bool is_edge(int i, int j) const { return edge[static_cast<size_t>(i) * width + j] != 0; }
};

/// A needle pixel is Edge iff at least one 4-neighbor is not a needle pixel
/// (out-of-image neighbors count as not-needle).
NeedleEdgeMap needle_edge_map(const ProbMask& mask);

/// Remodels gradients for artifact pixels: needle Edge pixels take the
/// image's largest row-to-row gradient over their row's mean gradient,
/// interior needle pixels and reverb pixels take the neutral value 1.
/// Overrides apply to every stencil direction of the pixel's slice.
RelativeGradientField override_gradients(const RelativeGradientField& g, const ImageGrid& image,
                                         const ProbMask& mask, const NeedleEdgeMap& edges);

/// Final suppression: C~ = C * (1 - Seg), Seg the reverb probability.
ImageGrid suppress_artifacts(const ImageGrid& confidence, const ProbMask& mask);

} // namespace usconf
