#include <doctest.h>

#include "toruslab/geometry_lab.hpp"

using namespace toruslab;

TEST_CASE("sector membership") {
    const SectorFamily family(2.0, 0.05);  // angle width 0.1, annulus around 20
    SUBCASE("window center belongs to exactly one sector") {
        const int alpha = 3;
        const double theta = (alpha + 0.5) * family.angle_width();
        const std::complex<double> z = std::polar(1.0 / family.h(), theta);
        for (int a = 0; a <= family.n_sectors(); ++a)
            CHECK(sector_membership(z, family, a) == (a == alpha));
    }
    SUBCASE("radius outside the annulus fails everywhere") {
        const double eps = family.epsilon();
        const std::complex<double> z =
            std::polar((1.0 + 2.0 * eps) / family.h(), 0.123);
        for (int a = 0; a <= family.n_sectors(); ++a)
            CHECK(!sector_membership(z, family, a));
    }
    SUBCASE("boundary angle belongs to the next sector") {
        const int alpha = 2;
        const double theta = (alpha + 1) * family.angle_width();
        const std::complex<double> z = std::polar(1.0 / family.h(), theta);
        CHECK(!sector_membership(z, family, alpha));
        CHECK(sector_membership(z, family, alpha + 1));
    }
    SUBCASE("quadrant annulus points land in exactly one sector") {
        const SectorFamily f = SectorFamily::rescaled(1.0 / 16.0);
        for (int i = 0; i < 200; ++i) {
            // interior radii; the exact metric boundary is not stable under
            // the polar round trip
            const double r = 1.0 - f.epsilon() + 2.0 * f.epsilon() * ((i % 17) + 0.5) / 18.0;
            const double th = (kPi / 2.0) * (i / 200.0);
            const std::complex<double> z = std::polar(r, th);
            int hits = 0;
            for (int a = 0; a <= f.n_sectors(); ++a)
                if (sector_membership(z, f, a)) ++hits;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("minkowski sum disjointness certificates") {
    const SectorFamily family = SectorFamily::rescaled(1.0 / 64.0);
    const double g = std::sqrt(family.epsilon()) / 8.0;
    SUBCASE("identical pairs intersect") {
        const SectorVerdict v = minkowski_disjointness(family, 2, 5, 2, 5, g);
        CHECK(v.kind == SectorVerdict::Kind::Intersect);
        CHECK(v.min_distance <= 1e-12);
    }
    SUBCASE("swapped pairs intersect") {
        const SectorVerdict v = minkowski_disjointness(family, 2, 5, 5, 2, g);
        CHECK(v.kind == SectorVerdict::Kind::Intersect);
    }
    SUBCASE("far quadruples are certified disjoint with positive margin") {
        // |a1-a3| + |a2-a4| = 14 and the swapped sum is 14 as well
        const SectorVerdict v = minkowski_disjointness(family, 0, 1, 7, 8, g);
        CHECK(v.kind == SectorVerdict::Kind::Disjoint);
        CHECK(v.margin > 0.0);
    }
    SUBCASE("symmetry of the verdict under pair swaps") {
        const SectorVerdict a = minkowski_disjointness(family, 0, 2, 6, 9, g);
        const SectorVerdict b = minkowski_disjointness(family, 2, 0, 9, 6, g);
        const SectorVerdict c = minkowski_disjointness(family, 6, 9, 0, 2, g);
        CHECK(a.kind == b.kind);
        CHECK(a.kind == c.kind);
    }
}

TEST_CASE("lemma geom brute force at a small epsilon") {
    LemmaGeomOptions opt;
    opt.threads = 4;
    opt.keep_records = true;
    const LemmaGeomReport rep = lemma_geom_bruteforce(1.0 / 8.0, opt);
    CHECK(rep.n_sectors == static_cast<int>(std::floor(kPi / (2.0 * std::sqrt(1.0 / 8.0)))));
    CHECK(rep.inconclusive == 0);
    CHECK(rep.q_min <= 12);
    // diagonal quadruples intersect with d = 0
    bool found_diag = false;
    for (const auto& r : rep.records)
        if (r.alphas[0] == r.alphas[2] && r.alphas[1] == r.alphas[3]) {
            CHECK(r.verdict.kind == SectorVerdict::Kind::Intersect);
            CHECK(r.d == 0);
            found_diag = true;
        }
    CHECK(found_diag);
}

TEST_CASE("lattice point counting in sectors") {
    SUBCASE("thin sectors obey the quadratic bound") {
        const SectorFamily family(1.0, 0.01);
        const auto [reports, total] = lattice_points_all_sectors(family);
        int sum = 0;
        for (const auto& r : reports) {
            CHECK(r.count <= 8.0 * r.quadratic_bound);
            sum += r.count;
        }
        CHECK(sum == total);
    }
    SUBCASE("empty sectors count zero") {
        const SectorFamily family(1.0, 0.01);
        bool found_empty = false;
        for (int a = 0; a <= family.n_sectors() && !found_empty; ++a)
            found_empty = lattice_points_in_sector(family, a).count == 0;
        CHECK(found_empty);
    }
    SUBCASE("anisotropic weight changes the counts consistently") {
        const SectorFamily family(2.0, 0.02);
        const auto [reports, total] = lattice_points_all_sectors(family, 2.0);
        int sum = 0;
        for (const auto& r : reports) sum += r.count;
        CHECK(sum == total);
    }
}

TEST_CASE("hitting fractions") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    const ObservationRegion strip({{0.0, kPi, 0.0, kTwoPi}});
    SUBCASE("vertical orbit inside the strip hits with fraction one") {
        const auto rep = hitting_fraction_rational(geom, 0, 1, {kPi / 2.0, 0.0}, strip, 100.0);
        CHECK(rep.fraction == doctest::Approx(1.0));
        CHECK(rep.exact);
    }
    SUBCASE("vertical orbit outside the strip never hits") {
        const auto rep =
            hitting_fraction_rational(geom, 0, 1, {3.0 * kPi / 2.0, 0.0}, strip, 100.0);
        CHECK(rep.fraction == doctest::Approx(0.0));
    }
    SUBCASE("horizontal orbit sees the strip half the time") {
        const auto rep = hitting_fraction_rational(geom, 1, 0, {0.1, 1.0}, strip, 1e4);
        CHECK(rep.fraction == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("rational fractions are periodic in T") {
        const auto r1 = hitting_fraction_rational(geom, 2, 3, {0.3, 0.4}, strip,
                                                  std::hypot(2 * kTwoPi, 3 * kTwoPi));
        const auto r2 = hitting_fraction_rational(geom, 2, 3, {0.3, 0.4}, strip,
                                                  2 * std::hypot(2 * kTwoPi, 3 * kTwoPi));
        CHECK(r1.fraction == doctest::Approx(r2.fraction).epsilon(1e-12));
    }
    SUBCASE("sampled fraction agrees with the exact one for rational slopes") {
        const auto exact = hitting_fraction_rational(geom, 1, 2, {0.5, 0.25}, strip, 1e3);
        const auto sampled = hitting_fraction_sampled(geom, std::atan2(2.0, 1.0),
                                                      {0.5, 0.25}, strip, 1e3, 1 << 16);
        CHECK(std::abs(exact.fraction - sampled.fraction) < 5e-3);
    }
    SUBCASE("golden-ratio direction equidistributes") {
        const ObservationRegion quarter({{0.0, kPi, 0.0, kPi}});
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        const auto rep = hitting_fraction_sampled(geom, std::atan(golden), {0.1, 0.2},
                                                  quarter, 2000.0, 1 << 18);
        CHECK(rep.fraction == doctest::Approx(0.25).epsilon(0.05));
    }
}

TEST_CASE("rational hitting lower bound") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("full torus gives delta = 1") {
        const auto rep =
            rational_hitting_lowerbound(geom, ObservationRegion::full(geom), 2, 4, 3);
        CHECK(rep.delta == doctest::Approx(1.0));
        CHECK(rep.directions > 0);
    }
    SUBCASE("thin strip misses axis orbits below the threshold") {
        const ObservationRegion thin({{0.0, 0.3, 0.0, kTwoPi}});
        // includes (0,1): vertical orbits at x0 outside the strip never hit
        const auto rep = rational_hitting_lowerbound(geom, thin, 1, 2, 4);
        CHECK(rep.delta == doctest::Approx(0.0));
    }
    SUBCASE("ball region with N from the proof gives positive delta") {
        // square stand-in of half-side eps around z0; N > 4 pi / eps
        const double eps = 1.2;
        const ObservationRegion ball({{2.0 - eps, 2.0 + eps, 3.0 - eps, 3.0 + eps}});
        const int N = static_cast<int>(std::ceil(4.0 * kPi / eps)) + 1;  // 12
        const auto rep = rational_hitting_lowerbound(geom, ball, N, N + 2, 3);
        CHECK(rep.delta > 0.0);
    }
}
