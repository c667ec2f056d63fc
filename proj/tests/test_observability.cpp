#include <doctest.h>

#include <set>

#include "toruslab/observability.hpp"

using namespace toruslab;

TEST_CASE("2d gramian") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("full torus gives exactly T times the identity") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 3);
        const double T = 0.9;
        auto [G, rep] = build_gramian(H, ObservationRegion::full(geom), T, 4 * 3 + 1);
        CHECK((G - T * Matrix::Identity(H.dimension(), H.dimension())).norm() < 1e-10);
        CHECK(rep.K == doctest::Approx(1.0 / T).epsilon(1e-10));
        CHECK(rep.lambda_max <= T * (1.0 + 1e-12));
    }
    SUBCASE("T -> 0 linearly recovers the region matrix") {
        CounterRng rng(3);
        const FourierField V = random_rough_potential(geom, 2, 0.51, 0.4, rng);
        const Hamiltonian2D H(geom, V, 2);
        const ObservationRegion half({{0.0, kPi, 0.0, kTwoPi}});
        const double T = 1e-7;
        auto [G, rep] = build_gramian(H, half, T, 4 * 2 + 1);
        const Matrix Momega = region_matrix_2d(geom, half, 2, 4 * 2 + 1);
        CHECK((G / T - Momega).norm() < 1e-5);
        (void)rep;
    }
    SUBCASE("quadratic form matches the time-quadrature oracle") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 4);
        const ObservationRegion half({{0.0, kPi, 0.0, kTwoPi}});
        const double T = 1.0;
        const int M = 4 * 4 + 1;
        auto [G, rep] = build_gramian(H, half, T, M);
        CHECK(rep.lambda_min > 0.0);
        CHECK(rep.lambda_max <= T * (1.0 + 1e-10));
        CounterRng rng(7);
        for (int trial = 0; trial < 3; ++trial) {
            Vector u(H.dimension());
            for (int i = 0; i < H.dimension(); ++i) u(i) = rng.next_complex_gaussian();
            const double closed = (u.adjoint() * G * u)(0).real();
            const double quad = observed_energy_quadrature(H, half, T, M, u, 4000);
            CHECK(closed == doctest::Approx(quad).epsilon(1e-5));
        }
    }
}

TEST_CASE("observability constants across cutoffs") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    const ObservationRegion half({{0.0, kPi, 0.0, kTwoPi}});
    SUBCASE("full torus gives K = 1/T at every cutoff") {
        const auto seq = observability_constant(geom, FourierField(geom, 0),
                                                ObservationRegion::full(geom), 2.0,
                                                {1, 2, 3});
        for (const auto& rep : seq.reports)
            CHECK(rep.K == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("K(N) is nondecreasing for V = 0") {
        const auto seq =
            observability_constant(geom, FourierField(geom, 0), half, 1.0, {1, 2, 3, 4});
        CHECK(seq.monotone);
        for (size_t i = 1; i < seq.reports.size(); ++i)
            CHECK(seq.reports[i].K >= seq.reports[i - 1].K * (1.0 - 1e-12));
    }
    SUBCASE("shrinking the region increases K") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 3);
        auto [G1, r1] = build_gramian(H, half, 1.0, 13);
        auto [G2, r2] =
            build_gramian(H, ObservationRegion({{0.0, kPi / 2, 0.0, kTwoPi}}), 1.0, 13);
        CHECK(r2.K >= r1.K * (1.0 - 1e-9));
    }
    SUBCASE("K is invariant under rotations of degenerate eigenvector blocks") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 2);
        const int M = 4 * 2 + 1;
        const Matrix Momega = region_matrix_2d(geom, half, 2, M);
        const EigenSystem& es = H.eigen();

        auto gramian_with = [&](const Matrix& Phi) {
            const Matrix R = Phi.adjoint() * Momega * Phi;
            Matrix G(H.dimension(), H.dimension());
            for (int a = 0; a < H.dimension(); ++a)
                for (int b = 0; b < H.dimension(); ++b)
                    G(a, b) = R(a, b) *
                              phase_integral(es.eigenvalues(a) - es.eigenvalues(b), 1.0);
            Eigen::SelfAdjointEigenSolver<Matrix> s(((G + Matrix(G.adjoint())) / 2).eval());
            return 1.0 / s.eigenvalues().minCoeff();
        };
        const double base = gramian_with(es.eigenvectors);
        // rotate inside a degenerate block (the four lambda = 1 eigenvectors)
        Matrix Phi = es.eigenvectors;
        int lo = -1, hi = -1;
        for (int i = 0; i < H.dimension(); ++i)
            if (std::abs(es.eigenvalues(i) - 1.0) < 1e-9) {
                if (lo < 0) lo = i;
                hi = i;
            }
        REQUIRE(hi - lo == 3);
        Matrix rot = Matrix::Identity(4, 4);
        const double c = std::cos(0.7), s = std::sin(0.7);
        rot(0, 0) = c; rot(0, 2) = -s; rot(2, 0) = s; rot(2, 2) = c;
        Phi.block(0, lo, H.dimension(), 4) = Phi.block(0, lo, H.dimension(), 4) * rot;
        CHECK(gramian_with(Phi) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("shell observability") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    const Hamiltonian2D H(geom, FourierField(geom, 0), 6);
    const ObservationRegion quarter({{0.0, kPi, 0.0, kPi}});
    SUBCASE("huge rho recovers the whole-space constant") {
        auto [G, full] = build_gramian(H, quarter, 1.0, 25);
        const auto shells = shell_observability_scan(
            H, {SpectralProjectorSpec(0.5, 1e9, ChiProfile::sharp_open())}, quarter, 1.0,
            25);
        REQUIRE(shells.size() == 1);
        CHECK(shells[0].shell_dimension == H.dimension());
        CHECK(shells[0].gramian.K == doctest::Approx(full.K).epsilon(1e-10));
    }
    SUBCASE("sharp free shell dimension matches direct enumeration") {
        const double h = 0.2, rho = 0.2;
        const auto shells = shell_observability_scan(
            H, {SpectralProjectorSpec(h, rho, ChiProfile::sharp_open())}, quarter, 1.0,
            25);
        int expect = 0;
        for (int n1 = -6; n1 <= 6; ++n1)
            for (int n2 = -6; n2 <= 6; ++n2)
                if (std::abs(h * h * geom.weighted_norm_sq({n1, n2}) - 1.0) < rho)
                    ++expect;
        REQUIRE(shells.size() == 1);
        CHECK(shells[0].shell_dimension == expect);
        CHECK(shells[0].gramian.K > 0.0);
    }
    SUBCASE("empty shell is skipped") {
        const auto shells = shell_observability_scan(
            H, {SpectralProjectorSpec(0.01, 1e-4, ChiProfile::sharp_open())}, quarter,
            1.0, 25);
        CHECK(shells[0].skipped);
    }
}

TEST_CASE("direction frames") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("axis directions") {
        const DirectionFrame f01 = direction_frame(geom, 0, 1);
        CHECK(f01.Xi0[0] == doctest::Approx(0.0));
        CHECK(f01.Xi0[1] == doctest::Approx(1.0));
        CHECK(f01.b == doctest::Approx(kTwoPi));
        CHECK(f01.a == doctest::Approx(kTwoPi));
        CHECK(std::abs(std::remainder(f01.gamma_shift, kTwoPi)) < 1e-12);

        const DirectionFrame f10 = direction_frame(geom, 1, 0);
        CHECK(f10.Xi0[0] == doctest::Approx(1.0));
        CHECK(f10.b == doctest::Approx(kTwoPi));
    }
    SUBCASE("(1,2) has b = 2 pi sqrt 5 and a b = AB") {
        const DirectionFrame f = direction_frame(geom, 1, 2);
        CHECK(f.b == doctest::Approx(kTwoPi * std::sqrt(5.0)).epsilon(1e-12));
        CHECK(f.a == doctest::Approx(kTwoPi / std::sqrt(5.0)).epsilon(1e-12));
        CHECK(f.a * f.b == doctest::Approx(geom.area()).epsilon(1e-12));
        CHECK(f.bezout_s * 1 - f.bezout_r * 2 == 1);
    }
    SUBCASE("pullback shift identity on random trigonometric fields") {
        const TorusGeometry aniso(kTwoPi, 3.1);
        CounterRng rng(5);
        const FourierField u = random_rough_potential(aniso, 3, 0.3, 1.0, rng);
        for (const auto [p, q] : {std::pair{1, 2}, {2, -1}, {3, 1}, {0, 1}}) {
            const DirectionFrame f = direction_frame(aniso, p, q);
            for (int i = 0; i < 5; ++i) {
                const double x = rng.uniform(0.0, f.a), y = rng.uniform(0.0, f.b);
                auto pullback = [&](double xx, double yy) {
                    return u.evaluate(xx * f.Xi0_perp[0] + yy * f.Xi0[0],
                                      xx * f.Xi0_perp[1] + yy * f.Xi0[1]);
                };
                CHECK(std::abs(pullback(x + f.a, y) - pullback(x, y - f.gamma_shift)) <
                      1e-9);
                CHECK(std::abs(pullback(x, y + f.b) - pullback(x, y)) < 1e-9);
            }
        }
    }
    SUBCASE("non-coprime directions rejected") {
        CHECK_THROWS_AS(direction_frame(geom, 2, 4), std::invalid_argument);
    }
}

TEST_CASE("averaged potential") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("potential independent of the flow direction maps to its profile") {
        // frame (0,1): flow along y; V = 2 cos x1 survives untouched
        const FourierField V =
            field_from_plain_coeffs(geom, 1, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}});
        const DirectionFrame f = direction_frame(geom, 0, 1);
        const AveragedPotential W = averaged_potential(V, f, 64);
        CHECK(W.period == doctest::Approx(kTwoPi));
        // W(x) = 2 cos(2 pi x / a) = 2 cos x
        CHECK(std::abs(W.coeffs.at(1) - cxd(1.0)) < 1e-12);
        CHECK(std::abs(W.coeffs.at(-1) - cxd(1.0)) < 1e-12);
        CHECK(W.quadrature_residual < 1e-9);
        CHECK(W.periodicity_residual < 1e-9);
    }
    SUBCASE("non-resonant single mode averages to zero") {
        const FourierField V =
            field_from_plain_coeffs(geom, 2, {{{1, 2}, 1.0}, {{-1, -2}, 1.0}});
        const DirectionFrame f = direction_frame(geom, 1, 2);
        const AveragedPotential W = averaged_potential(V, f, 64);
        CHECK(W.coeffs.empty());
        CHECK(W.quadrature_residual < 1e-9);
    }
    SUBCASE("only the resonant line survives for frame (1,2)") {
        // modes (2,-1) resonate (orthogonal to (1,2)); (1,0) does not
        const FourierField V = field_from_plain_coeffs(
            geom, 2, {{{2, -1}, 1.0}, {{-2, 1}, 1.0}, {{1, 0}, 1.0}, {{-1, 0}, 1.0}});
        const DirectionFrame f = direction_frame(geom, 1, 2);
        const AveragedPotential W = averaged_potential(V, f, 256);
        REQUIRE(W.coeffs.size() == 2);
        CHECK(std::abs(W.coeffs.at(1) - cxd(1.0)) < 1e-12);
        CHECK(std::abs(W.coeffs.at(-1) - cxd(1.0)) < 1e-12);
        CHECK(W.quadrature_residual < 1e-9);
    }
    SUBCASE("averaging contracts with constant 1/sqrt(b)") {
        CounterRng rng(9);
        const DirectionFrame f = direction_frame(geom, 1, 2);
        for (int trial = 0; trial < 5; ++trial) {
            const FourierField V1 = random_rough_potential(geom, 4, 0.4, 1.0, rng);
            const FourierField V2 = random_rough_potential(geom, 4, 0.4, 0.7, rng);
            const AveragedPotential W1 = averaged_potential(V1, f, 64);
            const AveragedPotential W2 = averaged_potential(V2, f, 64);
            double diff_sq = 0.0;
            std::set<int> keys;
            for (const auto& [m, c] : W1.coeffs) keys.insert(m);
            for (const auto& [m, c] : W2.coeffs) keys.insert(m);
            for (const int m : keys) {
                const cxd c1 = W1.coeffs.count(m) ? W1.coeffs.at(m) : cxd(0.0);
                const cxd c2 = W2.coeffs.count(m) ? W2.coeffs.at(m) : cxd(0.0);
                diff_sq += std::norm(c1 - c2);
            }
            const double lhs = std::sqrt(f.a * diff_sq);  // ||W1 - W2||_{L^2(0,a)}
            const double rhs = (V1 - V2).norm() / std::sqrt(f.b);
            CHECK(lhs <= rhs * (1.0 + 1e-10));
        }
    }
}
