#pragma once

#include "usconf/image.hpp"

namespace usconf {

/// Confidence-weighted fusion of two co-registered views:
/// out = (ca*a + cb*b) / (ca + cb), falling back to the plain mean where
/// the combined confidence is below eps. The result is clamped to the
/// per-pixel [min, max] of the inputs, so it is a convex combination even
/// after rounding.
ImageGrid fuse(const ImageGrid& img_a, const ImageGrid& conf_a, const ImageGrid& img_b,
               const ImageGrid& conf_b, double eps = 1e-12);

} // namespace usconf
