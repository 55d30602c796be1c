#include "usconf/eval.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <string>

using namespace usconf;
using testsupport::constant_image;

namespace {

// paints rectangles onto a constant map
ImageGrid painted(int h, int a, float bg, const std::vector<std::pair<Rect, float>>& boxes) {
    ImageGrid map(h, a, ValueDomain::confidence, bg);
    for (const auto& [r, v] : boxes)
        for (int i = r.row0; i < r.row1; ++i)
            for (int j = r.col0; j < r.col1; ++j) map.at(i, j) = v;
    return map;
}

} // namespace

TEST_CASE("patch median: constant and even-count rules") {
    const PatchSpec whole{PatchRole::A, PatchKind::shadow, {0, 0, 4, 4}};
    CHECK(patch_median(constant_image(4, 4, 0.7f, ValueDomain::confidence), whole) ==
          doctest::Approx(0.7).epsilon(1e-6));

    const ImageGrid strip(2, 4, ValueDomain::confidence,
                          std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f, 0.0f, 0.0f, 0.0f, 0.0f});
    const PatchSpec row{PatchRole::B, PatchKind::shadow, {0, 0, 1, 4}};
    CHECK(patch_median(strip, row) == doctest::Approx(0.25).epsilon(1e-6)); // mean of the central pair

    const PatchSpec odd{PatchRole::B, PatchKind::shadow, {0, 0, 1, 3}};
    CHECK(patch_median(strip, odd) == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("patch median: empty or out-of-bounds patch is an error") {
    const ImageGrid map = constant_image(4, 4, 0.5f, ValueDomain::confidence);
    CHECK_THROWS_AS((void)patch_median(map, PatchSpec{PatchRole::A, PatchKind::shadow, {2, 2, 2, 3}}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)patch_median(map, PatchSpec{PatchRole::A, PatchKind::shadow, {0, 0, 5, 2}}),
                    std::invalid_argument);
}

TEST_CASE("check orderings: constructed maps satisfy all predicates") {
    const Rect ra{2, 2, 6, 10};
    const Rect rb{10, 2, 16, 10};
    const Rect rc{10, 14, 16, 22};
    const std::vector<PatchSpec> patches{{PatchRole::A, PatchKind::shadow, ra},
                                         {PatchRole::B, PatchKind::shadow, rb},
                                         {PatchRole::C, PatchKind::shadow, rc}};
    const ImageGrid intensity =
        painted(20, 24, 0.5f, {{ra, 0.9f}, {rb, 0.4f}, {rc, 0.7f}});
    const ImageGrid structural =
        painted(20, 24, 0.9f, {{ra, 0.95f}, {rb, 0.6f}, {rc, 0.96f}});
    const OrderingReport report = check_orderings(intensity, structural, patches);
    REQUIRE(report.triples.size() == 1);
    CHECK(report.triples[0].intensity_ordering);
    CHECK(report.triples[0].structural_gap);
    CHECK(report.triples[0].structural_closeness);
    CHECK(report.all_pass());
    CHECK(report.triples[0].intensity_a == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("check orderings: a failed intensity ordering is reported") {
    const Rect ra{2, 2, 6, 10};
    const Rect rb{10, 2, 16, 10};
    const Rect rc{10, 14, 16, 22};
    const std::vector<PatchSpec> patches{{PatchRole::A, PatchKind::shadow, ra},
                                         {PatchRole::B, PatchKind::shadow, rb},
                                         {PatchRole::C, PatchKind::shadow, rc}};
    const ImageGrid intensity = painted(20, 24, 0.5f, {{ra, 0.5f}, {rb, 0.4f}, {rc, 0.7f}});
    const ImageGrid structural = painted(20, 24, 0.9f, {{ra, 0.95f}, {rb, 0.6f}, {rc, 0.96f}});
    const OrderingReport report = check_orderings(intensity, structural, patches);
    CHECK_FALSE(report.triples[0].intensity_ordering); // A=0.5 is not > C=0.7
    CHECK(report.triples[0].structural_gap);
    CHECK_FALSE(report.all_pass());
    const std::string csv = report.to_csv();
    CHECK(csv.find("intensity_ordering") != std::string::npos);
    CHECK(csv.find(",0\n") != std::string::npos);
}

TEST_CASE("check orderings: incomplete triple and row mismatch are errors") {
    const ImageGrid map = constant_image(20, 24, 0.5f, ValueDomain::confidence);
    const std::vector<PatchSpec> missing{{PatchRole::A, PatchKind::shadow, {0, 0, 2, 2}},
                                         {PatchRole::B, PatchKind::shadow, {4, 0, 6, 2}}};
    CHECK_THROWS_AS((void)check_orderings(map, map, missing), std::invalid_argument);

    const std::vector<PatchSpec> skewed{{PatchRole::A, PatchKind::shadow, {0, 0, 2, 2}},
                                        {PatchRole::B, PatchKind::shadow, {4, 0, 6, 2}},
                                        {PatchRole::C, PatchKind::shadow, {5, 4, 7, 6}}};
    CHECK_THROWS_AS((void)check_orderings(map, map, skewed), std::invalid_argument);
}

TEST_CASE("patches CSV round trip") {
    testsupport::TempDir tmp("patches");
    const std::vector<PatchSpec> patches{{PatchRole::A, PatchKind::reverberation, {1, 2, 3, 4}},
                                         {PatchRole::B, PatchKind::reverberation, {5, 2, 9, 4}},
                                         {PatchRole::C, PatchKind::reverberation, {5, 8, 9, 10}}};
    const std::string path = tmp.path("p.csv");
    save_patches_csv(patches, path);
    const auto back = load_patches_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[0].role == PatchRole::A);
    CHECK(back[1].kind == PatchKind::reverberation);
    CHECK(back[2].rect.col1 == 10);
}
