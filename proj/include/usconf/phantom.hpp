#pragma once

#include "usconf/eval.hpp"
#include "usconf/image.hpp"

#include <string>
#include <variant>
#include <vector>

namespace usconf {

/// One horizontal strongly-reflecting interface; everything below it in the
/// same columns is darkened by attenuation_drop.
struct ReflectorElement {
    int row = 0;
    int col0 = 0, col1 = 0; // half-open
    double intensity = 0.9;
    double attenuation_drop = 0.3;
};

/// Elliptic vessel: bright wall ring around a dark lumen.
struct VesselElement {
    int center_row = 0, center_col = 0;
    int radius_rows = 0, radius_cols = 0;
    double wall_intensity = 0.9;
    double lumen_intensity = 0.1;
};

/// Bright needle line with a decaying reverberation train below it. The
/// train pixels are artificial echoes: they are rendered on top of the
/// needle's shadow, not attenuated by it.
struct NeedleElement {
    int row = 0;
    int col0 = 0, col1 = 0;
    double intensity = 0.95;
    int reverb_period = 8;
    int reverb_count = 3;
    double reverb_decay = 0.5;
    double attenuation_drop = 0.5;
};

/// Columns where the probe has lost contact: near-zero from the top down.
struct DetachElement {
    int col0 = 0, col1 = 0;
};

using PhantomElement = std::variant<ReflectorElement, VesselElement, NeedleElement, DetachElement>;

struct PhantomSpec {
    int height = 0, width = 0;
    double background = 0.5;
    double speckle_std = 0.0; // std of the multiplicative factor
    unsigned long long seed = 0;
    std::vector<PhantomElement> elements;
};

struct GeneratedPhantom {
    ImageGrid image;
    ProbMask mask;
    std::vector<PatchSpec> patches;
};

/// Deterministic rendering: background, elements, shadows, reverberation
/// copies, then seeded multiplicative speckle, clamped to [0,1]. Also emits
/// ground-truth masks and A/B/C patch triples for the shadowing elements.
GeneratedPhantom generate(const PhantomSpec& spec);

/// Plain-text spec: `key = value` lines plus `element <kind> k=v ...` lines.
PhantomSpec parse_phantom_text(const std::string& text);
PhantomSpec load_phantom_spec(const std::string& path);

} // namespace usconf
