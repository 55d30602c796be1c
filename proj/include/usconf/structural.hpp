#pragma once

#include "usconf/confidence.hpp"
#include "usconf/image.hpp"

#include <string>
#include <vector>

namespace usconf {

/// Reference intensity confidence of a structure-free medium: the per-row
/// ceiling on achievable confidence for a given depth. row_max keeps the
/// propagation's double precision so truncating the phantom against its own
/// reference is a no-op; the float map is its rounding.
struct ReferenceMap {
    ImageGrid map;                // confidence
    std::vector<double> row_max;  // max of each row; non-increasing

    void validate() const;
};

/// Propagates the phantom image (no mask) and records per-row maxima.
ReferenceMap build_reference(const ImageGrid& phantom, const ConfidenceConfig& cfg);

/// Intensity propagation with the reference ceiling: each computed row is
/// clamped to the reference row maximum before it feeds the next row.
ImageGrid propagate_truncated(const ImageGrid& image, const ReferenceMap& ref,
                              const ConfidenceConfig& cfg, const ProbMask* mask = nullptr);

/// Structural confidence: the ratio adjusted/reference, clamped to [0,1].
ImageGrid structural_map(const ImageGrid& adjusted, const ReferenceMap& ref);

/// Reference persistence: raw_f32 with the row_max vector appended as one
/// extra row (entry i at column i where it fits; row_max is recomputed from
/// the map on load, so nothing is lost when h > width).
void save_reference(const ReferenceMap& ref, const std::string& path);
ReferenceMap load_reference(const std::string& path);

} // namespace usconf
