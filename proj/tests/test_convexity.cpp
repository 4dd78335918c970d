#include "doctest.h"

#include <cmath>

#include "cvxseg/convexity.hpp"
#include "cvxseg/errors.hpp"
#include "oracles.hpp"

using namespace cvxseg;

TEST_SUITE("convexity") {

TEST_CASE("squared distance transform is exact") {
    for (std::uint32_t seed : {5u, 6u, 7u}) {
        const BinaryMask mask = oracle::random_blob_mask(19, 14, seed);
        const ScalarField d = squared_distance_to_object(mask);
        for (int n = 0; n < 14; ++n)
            for (int m = 0; m < 19; ++m) {
                double best = 1e30;
                for (int nn = 0; nn < 14; ++nn)
                    for (int mm = 0; mm < 19; ++mm)
                        if (mask.is_object(mm, nn))
                            best = std::min(best, double((m - mm) * (m - mm) + (n - nn) * (n - nn)));
                CHECK(d(m, n) == best);
            }
    }
}

TEST_CASE("rectangles, digital lines and disks are convex; gaps and elbows are not") {
    BinaryMask rect(20, 15);
    for (int n = 3; n <= 10; ++n)
        for (int m = 4; m <= 13; ++m) rect(m, n) = 0;
    CHECK(is_mask_convex(rect));

    BinaryMask pixel(9, 9);
    pixel(4, 4) = 0;
    CHECK(is_mask_convex(pixel));

    BinaryMask diag(10, 10);
    for (int i = 0; i < 8; ++i) diag(i, i) = 0;
    CHECK(is_mask_convex(diag));

    BinaryMask gap(16, 5);
    gap(2, 2) = 0;
    gap(12, 2) = 0;  // hull midpoints are 4 px from the nearest object pixel
    CHECK_FALSE(is_mask_convex(gap));

    BinaryMask elbow(20, 20);
    for (int n = 2; n <= 16; ++n)
        for (int m = 2; m <= 4; ++m) elbow(m, n) = 0;
    for (int m = 2; m <= 16; ++m)
        for (int n = 14; n <= 16; ++n) elbow(m, n) = 0;
    CHECK_FALSE(is_mask_convex(elbow));

    BinaryMask disk(40, 40);
    for (int n = 0; n < 40; ++n)
        for (int m = 0; m < 40; ++m)
            if ((m - 19.5) * (m - 19.5) + (n - 19.5) * (n - 19.5) <= 100.0) disk(m, n) = 0;
    CHECK(is_mask_convex(disk));

    CHECK_THROWS_AS(is_mask_convex(BinaryMask(8, 8, 1)), EmptyObjectError);
}

TEST_CASE("tolerance widens what counts as convex") {
    BinaryMask nicked(24, 24);
    for (int n = 6; n <= 17; ++n)
        for (int m = 6; m <= 17; ++m) nicked(m, n) = 0;
    nicked(11, 6) = 1;  // one-pixel nick on the top edge
    CHECK(is_mask_convex(nicked, 1.0));
    CHECK_FALSE(is_mask_convex(nicked, 0.4));
}

TEST_CASE("laplacian violation is zero for cones and positive behind concavities") {
    const int M = 48, N = 48;
    ScalarField cone(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) cone(m, n) = std::hypot(m - 23.7, n - 22.2) - 11.0;
    const Region interior = Region::interior(M, N);
    CHECK(laplacian_violation(cone, interior) <= 1e-10);

    const SdfField crescent = sdf_from_mask(oracle::random_nonconvex_mask(48, 48, 3));
    PixelCoord worst;
    const double violation = laplacian_violation(crescent, interior, &worst);
    CHECK(violation > 0.1);
    CHECK(interior.contains(worst.m, worst.n));
    CHECK(-laplacian(crescent)(worst.m, worst.n) == doctest::Approx(violation));
}

TEST_CASE("sublevel oracle accepts disk SDFs and flags nonconvex shapes") {
    BinaryMask disk(48, 48);
    for (int n = 0; n < 48; ++n)
        for (int m = 0; m < 48; ++m)
            if ((m - 23.5) * (m - 23.5) + (n - 23.5) * (n - 23.5) <= 144.0) disk(m, n) = 0;
    const ConvexityReport ok =
        sublevel_convexity_oracle(sdf_from_mask(disk), {-5.0, -2.0, 0.0, 3.0, 7.0});
    CHECK(ok.mask_convex);
    CHECK(ok.all_convex());
    CHECK(ok.sublevels.size() == 5);

    const ConvexityReport bad = sublevel_convexity_oracle(
        sdf_from_mask(oracle::random_nonconvex_mask(48, 48, 9)), {0.0, 2.0});
    CHECK_FALSE(bad.mask_convex);
    CHECK_FALSE(bad.all_convex());
    CHECK(bad.max_violation > 0.1);
}

TEST_CASE("sublevel oracle treats empty sublevels as vacuously convex") {
    BinaryMask small(32, 32);
    for (int n = 14; n <= 17; ++n)
        for (int m = 14; m <= 17; ++m) small(m, n) = 0;
    const ConvexityReport report =
        sublevel_convexity_oracle(sdf_from_mask(small), {-10.0, 0.0});
    CHECK(report.sublevels[0].empty);
    CHECK(report.sublevels[0].convex);
    CHECK(report.sublevels[1].convex);
}

TEST_CASE("sublevel oracle rejects fields that are not signed distances") {
    ScalarField noise = oracle::random_field(32, 32, 17);
    noise *= 40.0;
    CHECK_THROWS(sublevel_convexity_oracle(noise, {0.0}));
}

TEST_CASE("Lemma-1 style property: convex polygon SDF sublevels stay convex") {
    for (std::uint32_t seed = 1; seed <= 10; ++seed) {
        const BinaryMask poly = oracle::random_convex_polygon_mask(48, 48, seed);
        REQUIRE(is_mask_convex(poly, 1.0));
        const SdfField phi = sdf_from_mask(poly);
        for (int level = -4; level <= 8; level += 2) {
            BinaryMask sub(48, 48);
            for (int n = 0; n < 48; ++n)
                for (int m = 0; m < 48; ++m) sub(m, n) = phi(m, n) <= level ? 0 : 1;
            if (sub.object_count() == 0) continue;
            CHECK(is_mask_convex(sub, 1.0));
        }
    }
}

}  // TEST_SUITE
