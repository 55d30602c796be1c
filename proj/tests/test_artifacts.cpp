#include "usconf/artifacts.hpp"
#include "usconf/confidence.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace usconf;
using testsupport::constant_image;
using testsupport::random_image;

namespace {

ProbMask zero_mask(int h, int a) {
    return ProbMask::combined(ImageGrid(h, a, ValueDomain::probability, 0.0f),
                              ImageGrid(h, a, ValueDomain::probability, 0.0f));
}

} // namespace

TEST_CASE("needle edge map: empty, block and singleton") {
    SUBCASE("empty mask has no edges") {
        const NeedleEdgeMap edges = needle_edge_map(zero_mask(5, 5));
        for (unsigned char e : edges.edge) CHECK(e == 0);
    }
    SUBCASE("3x3 block: border pixels are edges, center is not") {
        ImageGrid needle(5, 5, ValueDomain::probability, 0.0f);
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) needle.at(i, j) = 1.0f;
        const ProbMask mask =
            ProbMask::combined(needle, ImageGrid(5, 5, ValueDomain::probability, 0.0f));
        const NeedleEdgeMap edges = needle_edge_map(mask);
        int count = 0;
        for (unsigned char e : edges.edge) count += e;
        CHECK(count == 8);
        CHECK_FALSE(edges.is_edge(2, 2));
        CHECK(edges.is_edge(1, 1));
        CHECK(edges.is_edge(2, 1));
    }
    SUBCASE("a single needle pixel is an edge") {
        ImageGrid needle(4, 4, ValueDomain::probability, 0.0f);
        needle.at(2, 2) = 0.9f;
        const ProbMask mask =
            ProbMask::combined(needle, ImageGrid(4, 4, ValueDomain::probability, 0.0f));
        CHECK(needle_edge_map(mask).is_edge(2, 2));
    }
}

TEST_CASE("override gradients: identity without artifacts") {
    const ImageGrid img = random_image(8, 8, 21);
    const RelativeGradientField g = relative_gradient(img, 1, nullptr, 1e-6);
    const ProbMask mask = zero_mask(8, 8);
    const RelativeGradientField out = override_gradients(g, img, mask, needle_edge_map(mask));
    for (size_t i = 0; i < g.values.size(); ++i) CHECK(out.values[i] == g.values[i]);
}

TEST_CASE("override gradients: reverb pixels become neutral regardless of contrast") {
    ImageGrid img = constant_image(6, 6, 0.2f);
    img.at(3, 3) = 1.0f; // bright dot
    ImageGrid reverb(6, 6, ValueDomain::probability, 0.0f);
    reverb.at(3, 3) = 1.0f;
    const ProbMask mask =
        ProbMask::combined(ImageGrid(6, 6, ValueDomain::probability, 0.0f), reverb);
    const RelativeGradientField g = relative_gradient(img, 1, &mask, 1e-6);
    const RelativeGradientField out = override_gradients(g, img, mask, needle_edge_map(mask));
    for (int d = -1; d <= 1; ++d) CHECK(out.at(3, 3, d) == 1.0);
}

TEST_CASE("override gradients: needle edge takes max gradient over row mean") {
    // two-row image: largest gradient 0.8, row mean 0.1
    const ImageGrid img(2, 8, ValueDomain::intensity,
                        std::vector<float>{0.1f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f,
                                           0.9f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f});
    ImageGrid needle(2, 8, ValueDomain::probability, 0.0f);
    needle.at(0, 4) = 1.0f; // isolated needle pixel, hence an Edge pixel
    const ProbMask mask =
        ProbMask::combined(needle, ImageGrid(2, 8, ValueDomain::probability, 0.0f));
    const RelativeGradientField g = relative_gradient(img, 1, &mask, 1e-6);
    const RelativeGradientField out = override_gradients(g, img, mask, needle_edge_map(mask));
    for (int d = -1; d <= 1; ++d)
        CHECK(out.at(0, 4, d) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("override gradients: non-edge needle pixels become neutral") {
    ImageGrid needle(6, 6, ValueDomain::probability, 0.0f);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) needle.at(i, j) = 1.0f;
    const ProbMask mask =
        ProbMask::combined(needle, ImageGrid(6, 6, ValueDomain::probability, 0.0f));
    const ImageGrid img = random_image(6, 6, 3);
    const RelativeGradientField g = relative_gradient(img, 1, &mask, 1e-6);
    const RelativeGradientField out = override_gradients(g, img, mask, needle_edge_map(mask));
    CHECK(out.at(2, 2, 0) == 1.0); // interior of the block
    CHECK(out.at(1, 1, 0) > 0.0);
}

TEST_CASE("override gradients never produce negative values") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        const ImageGrid img = random_image(10, 10, 700 + seed);
        ImageGrid needle(10, 10, ValueDomain::probability, 0.0f);
        ImageGrid reverb(10, 10, ValueDomain::probability, 0.0f);
        std::mt19937 rng(seed);
        std::uniform_real_distribution<float> uni(0.0f, 1.0f);
        for (float& v : needle.samples()) v = uni(rng);
        for (float& v : reverb.samples()) v = uni(rng);
        const ProbMask mask = ProbMask::combined(needle, reverb);
        const RelativeGradientField g = relative_gradient(img, 2, &mask, 1e-6);
        const RelativeGradientField out = override_gradients(g, img, mask, needle_edge_map(mask));
        for (double v : out.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("suppress artifacts: pointwise product with (1 - Seg)") {
    ImageGrid conf = constant_image(4, 4, 0.6f, ValueDomain::confidence);
    ImageGrid reverb(4, 4, ValueDomain::probability, 0.0f);
    reverb.at(1, 1) = 0.5f;
    reverb.at(2, 2) = 1.0f;
    const ProbMask mask =
        ProbMask::combined(ImageGrid(4, 4, ValueDomain::probability, 0.0f), reverb);
    const ImageGrid out = suppress_artifacts(conf, mask);
    CHECK(out.at(0, 0) == 0.6f);                                // Seg = 0 keeps C
    CHECK(out.at(1, 1) == doctest::Approx(0.3).epsilon(1e-6));  // 0.6 * 0.5
    CHECK(out.at(2, 2) == 0.0f);                                // Seg = 1 zeroes
}

TEST_CASE("suppressed map is bounded by C and by 1 - Seg") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        const ImageGrid img = random_image(12, 12, 50 + seed);
        ImageGrid reverb(12, 12, ValueDomain::probability, 0.0f);
        std::mt19937 rng(seed * 3 + 1);
        std::uniform_real_distribution<float> uni(0.0f, 1.0f);
        for (float& v : reverb.samples()) v = uni(rng);
        const ProbMask mask =
            ProbMask::combined(ImageGrid(12, 12, ValueDomain::probability, 0.0f), reverb);
        const ImageGrid conf = propagate(img, ConfidenceConfig{}, &mask);
        const ImageGrid out = suppress_artifacts(conf, mask);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                CHECK(out.at(i, j) <= conf.at(i, j));
                // float rounding is monotone, so the bound holds exactly
                CHECK(out.at(i, j) <= static_cast<float>(1.0 - mask.reverb.at(i, j)));
            }
    }
}

TEST_CASE("all-zero mask leaves the pipeline bit-identical") {
    const ImageGrid img = random_image(14, 14, 9);
    const ConfidenceConfig cfg;
    const ProbMask mask = zero_mask(14, 14);
    const ImageGrid with_mask = suppress_artifacts(propagate(img, cfg, &mask), mask);
    const ImageGrid without = propagate(img, cfg, nullptr);
    for (size_t i = 0; i < with_mask.samples().size(); ++i)
        CHECK(with_mask.samples()[i] == without.samples()[i]);
}
