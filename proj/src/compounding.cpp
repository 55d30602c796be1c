#include "usconf/compounding.hpp"

#include <algorithm>
#include <stdexcept>

namespace usconf {

ImageGrid fuse(const ImageGrid& img_a, const ImageGrid& conf_a, const ImageGrid& img_b,
               const ImageGrid& conf_b, double eps) {
    if (!img_a.same_shape(conf_a) || !img_a.same_shape(img_b) || !img_a.same_shape(conf_b))
        throw std::invalid_argument("fuse: all four grids must share dimensions");
    for (const ImageGrid* c : {&conf_a, &conf_b})
        for (float v : c->samples())
            if (v < 0.0f || v > 1.0f)
                throw std::invalid_argument("fuse: confidence samples must be in [0,1]");

    ImageGrid out(img_a.height(), img_a.width(), ValueDomain::intensity);
    for (int i = 0; i < out.height(); ++i) {
        for (int j = 0; j < out.width(); ++j) {
            const double ia = img_a.at(i, j), ib = img_b.at(i, j);
            const double ca = conf_a.at(i, j), cb = conf_b.at(i, j);
            const double sum = ca + cb;
            const double v = sum < eps ? 0.5 * (ia + ib) : (ca * ia + cb * ib) / sum;
            out.at(i, j) = static_cast<float>(std::clamp(v, std::min(ia, ib), std::max(ia, ib)));
        }
    }
    out.validate();
    return out;
}

} // namespace usconf
