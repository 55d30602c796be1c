#include "usconf/image.hpp"

#include <stdexcept>
#include <utility>

namespace usconf {

const char* to_string(ValueDomain domain) {
    switch (domain) {
    case ValueDomain::intensity: return "intensity";
    case ValueDomain::confidence: return "confidence";
    case ValueDomain::probability: return "probability";
    case ValueDomain::unconstrained: return "unconstrained";
    }
    return "?";
}

ImageGrid::ImageGrid(int height, int width, ValueDomain domain, float fill)
    : height_(height), width_(width), domain_(domain),
      data_(height > 0 && width > 0 ? static_cast<size_t>(height) * width : 0, fill) {
    validate();
}

ImageGrid::ImageGrid(int height, int width, ValueDomain domain, std::vector<float> samples)
    : height_(height), width_(width), domain_(domain), data_(std::move(samples)) {
    validate();
}

void ImageGrid::validate() const {
    if (height_ < 2 || width_ < 2)
        throw std::invalid_argument("ImageGrid: dimensions must be at least 2x2, got " +
                                    std::to_string(height_) + "x" + std::to_string(width_));
    if (data_.size() != static_cast<size_t>(height_) * width_)
        throw std::invalid_argument("ImageGrid: sample count " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(height_) + "x" +
                                    std::to_string(width_));
    const bool bounded = domain_ != ValueDomain::unconstrained;
    for (float v : data_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("ImageGrid: non-finite sample");
        if (bounded && (v < 0.0f || v > 1.0f))
            throw std::invalid_argument("ImageGrid: sample " + std::to_string(v) +
                                        " outside [0,1] for domain " + to_string(domain_));
    }
}

ImageGrid ImageGrid::with_domain(ValueDomain domain) const {
    ImageGrid out = *this;
    out.domain_ = domain;
    out.validate();
    return out;
}

ProbMask ProbMask::combined(ImageGrid needle, ImageGrid reverb) {
    if (!needle.same_shape(reverb))
        throw std::invalid_argument("ProbMask: needle and reverb grids differ in shape");
    needle = needle.with_domain(ValueDomain::probability);
    reverb = reverb.with_domain(ValueDomain::probability);
    for (int i = 0; i < needle.height(); ++i) {
        for (int j = 0; j < needle.width(); ++j) {
            // Larger class wins; ties keep the needle.
            if (needle.at(i, j) >= reverb.at(i, j))
                reverb.at(i, j) = 0.0f;
            else
                needle.at(i, j) = 0.0f;
        }
    }
    return ProbMask{std::move(needle), std::move(reverb)};
}

void ProbMask::validate_against(const ImageGrid& image) const {
    if (!needle.same_shape(image) || !reverb.same_shape(image))
        throw std::invalid_argument("ProbMask: mask dimensions do not match image");
}

} // namespace usconf
