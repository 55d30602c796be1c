#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace usconf {

/// What range a grid's samples are allowed to occupy.
enum class ValueDomain { intensity, confidence, probability, unconstrained };

const char* to_string(ValueDomain domain);

/// Row-major 2-D grid of scalar samples. The universal carrier for images,
/// confidence maps and masks. Samples are stored as 32-bit floats (the on-disk
/// raw format is float32 and round-trips must be bit-exact); numerical kernels
/// accumulate in double and write back.
class ImageGrid {
public:
    using value_type = float;

    ImageGrid() = default;
    ImageGrid(int height, int width, ValueDomain domain, float fill = 0.0f);
    ImageGrid(int height, int width, ValueDomain domain, std::vector<float> samples);

    int height() const { return height_; }
    int width() const { return width_; }
    ValueDomain domain() const { return domain_; }

    float at(int i, int j) const { return data_[static_cast<size_t>(i) * width_ + j]; }
    float& at(int i, int j) { return data_[static_cast<size_t>(i) * width_ + j]; }

    std::span<const float> samples() const { return data_; }
    std::span<float> samples() { return data_; }

    bool same_shape(const ImageGrid& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    /// Re-checks all invariants (dimensions, finiteness, domain range).
    /// Throws std::invalid_argument on violation. Constructors call this;
    /// code that mutates samples in place calls it again before handing the
    /// grid out.
    void validate() const;

    /// Same grid with a different declared domain (revalidates).
    ImageGrid with_domain(ValueDomain domain) const;

private:
    int height_ = 0;
    int width_ = 0;
    ValueDomain domain_ = ValueDomain::unconstrained;
    std::vector<float> data_;
};

/// Per-pixel probabilities for the needle and reverberation-artifact classes.
/// A pixel is nonzero in at most one of the two grids; combined() enforces
/// this by keeping the larger probability and zeroing the other (ties keep
/// the needle).
struct ProbMask {
    ImageGrid needle;
    ImageGrid reverb;

    static ProbMask combined(ImageGrid needle, ImageGrid reverb);

    void validate_against(const ImageGrid& image) const;
};

} // namespace usconf
