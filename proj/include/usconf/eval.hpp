#pragma once

#include "usconf/config.hpp"
#include "usconf/image.hpp"

#include <string>
#include <vector>

namespace usconf {

enum class PatchRole { A, B, C };
enum class PatchKind { reverberation, shadow };

const char* to_string(PatchRole role);
const char* to_string(PatchKind kind);

/// Labeled rectangular region for the evaluation protocol: A above the
/// structure, B inside the shadow/artifact, C artifact-free on the same
/// rows as B.
struct PatchSpec {
    PatchRole role = PatchRole::A;
    PatchKind kind = PatchKind::shadow;
    Rect rect;
};

/// Median of the samples in the patch (even count: mean of the two central
/// order statistics).
double patch_median(const ImageGrid& map, const PatchSpec& patch);

struct TripleResult {
    PatchKind kind = PatchKind::shadow;
    double intensity_a = 0.0, intensity_b = 0.0, intensity_c = 0.0;
    double structural_a = 0.0, structural_b = 0.0, structural_c = 0.0;
    bool intensity_ordering = false; // C_int(A) > C_int(C) > C_int(B)
    bool structural_gap = false;     // C_str(B) + margin <= min(A, C)
    bool structural_closeness = false; // |C_str(A) - C_str(C)| <= closeness
    bool all_pass() const { return intensity_ordering && structural_gap && structural_closeness; }
};

struct OrderingReport {
    double margin = 0.2;
    double closeness = 0.15;
    std::vector<TripleResult> triples;
    bool all_pass() const;
    std::string to_csv() const; // one row per triple per predicate
};

/// Groups patches into (A,B,C) triples by kind (n-th A with n-th B and C in
/// file order) and evaluates the design predicates on both maps. Incomplete
/// triples and B/C row-range mismatches are errors.
OrderingReport check_orderings(const ImageGrid& intensity, const ImageGrid& structural,
                               const std::vector<PatchSpec>& patches, double margin = 0.2,
                               double closeness = 0.15);

/// Patch CSV: header `role,kind,row0,col0,row1,col1`, half-open bounds.
std::vector<PatchSpec> load_patches_csv(const std::string& path);
void save_patches_csv(const std::vector<PatchSpec>& patches, const std::string& path);

} // namespace usconf
