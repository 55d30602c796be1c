#include "usconf/structural.hpp"
#include "usconf/io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usconf {

namespace {

std::vector<float> float_row_maxima(const ImageGrid& map) {
    std::vector<float> out(static_cast<size_t>(map.height()));
    for (int i = 0; i < map.height(); ++i) {
        float m = map.at(i, 0);
        for (int j = 1; j < map.width(); ++j) m = std::max(m, map.at(i, j));
        out[static_cast<size_t>(i)] = m;
    }
    return out;
}

ImageGrid rows_to_grid(const std::vector<double>& rows, int h, int a) {
    std::vector<float> samples(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) samples[i] = static_cast<float>(rows[i]);
    return ImageGrid(h, a, ValueDomain::confidence, std::move(samples));
}

} // namespace

void ReferenceMap::validate() const {
    map.validate();
    if (static_cast<int>(row_max.size()) != map.height())
        throw std::invalid_argument("ReferenceMap: row_max length does not match map height");
    // float rounding is monotone, so the rounded ceiling must equal the
    // rounded map's per-row maximum
    const std::vector<float> expected = float_row_maxima(map);
    for (size_t i = 0; i < row_max.size(); ++i) {
        if (static_cast<float>(row_max[i]) != expected[i])
            throw std::invalid_argument("ReferenceMap: row_max is not the per-row maximum");
        if (i > 0 && row_max[i] > row_max[i - 1])
            throw std::invalid_argument("ReferenceMap: row_max must be non-increasing");
    }
}

ReferenceMap build_reference(const ImageGrid& phantom, const ConfidenceConfig& cfg) {
    phantom.validate();
    const int h = phantom.height();
    const int a = phantom.width();
    const std::vector<double> ones(static_cast<size_t>(a), 1.0);
    const std::vector<double> rows = propagate_rows(phantom, cfg, nullptr, ones);
    ReferenceMap ref;
    ref.map = rows_to_grid(rows, h, a);
    ref.row_max.resize(static_cast<size_t>(h));
    for (int i = 0; i < h; ++i) {
        double m = rows[static_cast<size_t>(i) * a];
        for (int j = 1; j < a; ++j) m = std::max(m, rows[static_cast<size_t>(i) * a + j]);
        ref.row_max[static_cast<size_t>(i)] = m;
    }
    return ref;
}

ImageGrid propagate_truncated(const ImageGrid& image, const ReferenceMap& ref,
                              const ConfidenceConfig& cfg, const ProbMask* mask) {
    image.validate();
    if (image.height() != ref.map.height())
        throw std::invalid_argument("propagate_truncated: image height does not match reference");
    const std::vector<double> ones(static_cast<size_t>(image.width()), 1.0);
    const std::vector<double> rows = propagate_rows(image, cfg, mask, ones, ref.row_max);
    return rows_to_grid(rows, image.height(), image.width());
}

ImageGrid structural_map(const ImageGrid& adjusted, const ReferenceMap& ref) {
    if (!adjusted.same_shape(ref.map))
        throw std::invalid_argument("structural_map: dimensions do not match reference");
    ImageGrid out = adjusted;
    for (int i = 0; i < out.height(); ++i) {
        for (int j = 0; j < out.width(); ++j) {
            const double r = ref.map.at(i, j);
            const double ratio = static_cast<double>(adjusted.at(i, j)) / r;
            out.at(i, j) = static_cast<float>(std::clamp(ratio, 0.0, 1.0));
        }
    }
    return out.with_domain(ValueDomain::confidence);
}

void save_reference(const ReferenceMap& ref, const std::string& path) {
    ref.validate();
    const int h = ref.map.height();
    const int a = ref.map.width();
    std::vector<float> samples(ref.map.samples().begin(), ref.map.samples().end());
    samples.resize(static_cast<size_t>(h + 1) * a, 0.0f);
    for (int i = 0; i < std::min(h, a); ++i)
        samples[static_cast<size_t>(h) * a + i] = static_cast<float>(ref.row_max[static_cast<size_t>(i)]);
    const ImageGrid file(h + 1, a, ValueDomain::unconstrained, std::move(samples));
    save_map(file, path, MapFormat::raw_f32);
}

ReferenceMap load_reference(const std::string& path) {
    const ImageGrid file = load_map(path, ValueDomain::unconstrained);
    const int h = file.height() - 1;
    const int a = file.width();
    if (h < 2) throw io_error("reference map '" + path + "' too small");
    std::vector<float> samples(static_cast<size_t>(h) * a);
    std::copy_n(file.samples().begin(), samples.size(), samples.begin());
    ReferenceMap ref;
    ref.map = ImageGrid(h, a, ValueDomain::confidence, std::move(samples));
    // the double ceiling does not persist in a float32 container; rebuild it
    // from the stored map and check the appended row agrees where it fits
    const std::vector<float> maxima = float_row_maxima(ref.map);
    ref.row_max.assign(maxima.begin(), maxima.end());
    for (int i = 0; i < std::min(h, a); ++i) {
        if (file.at(h, i) != maxima[static_cast<size_t>(i)])
            throw io_error("reference map '" + path + "' row_max row is inconsistent with the map");
    }
    return ref;
}

} // namespace usconf
