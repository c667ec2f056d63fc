#include <doctest.h>

#include "toruslab/rng.hpp"
#include "toruslab/spectral2d.hpp"

using namespace toruslab;

TEST_CASE("hamiltonian structure") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("free spectrum on the 3x3 box") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 1);
        const auto& ev = H.eigen().eigenvalues;
        const double expect[9] = {0, 1, 1, 1, 1, 2, 2, 2, 2};
        for (int i = 0; i < 9; ++i) CHECK(ev(i) == doctest::Approx(expect[i]).epsilon(1e-12));
    }
    SUBCASE("constant potential shifts the spectrum") {
        const double c = 0.37;
        const FourierField V = field_from_plain_coeffs(geom, 0, {{{0, 0}, c}});
        const Hamiltonian2D H(geom, V, 2);
        const Hamiltonian2D H0(geom, FourierField(geom, 0), 2);
        for (int i = 0; i < H.dimension(); ++i)
            CHECK(H.eigen().eigenvalues(i) ==
                  doctest::Approx(H0.eigen().eigenvalues(i) + c).epsilon(1e-12));
    }
    SUBCASE("separable potential ground state against a larger cutoff") {
        const FourierField V = field_from_plain_coeffs(
            geom, 1, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, 1.0}});
        const Hamiltonian2D H6(geom, V, 6);
        const Hamiltonian2D H12(geom, V, 12);
        CHECK(H6.eigen().eigenvalues(0) ==
              doctest::Approx(H12.eigen().eigenvalues(0)).epsilon(1e-9));
    }
    SUBCASE("non-real potential rejected") {
        FourierField bad(geom, 1);
        bad.set({1, 0}, cxd(1.0, 0.0));  // missing conjugate partner
        CHECK_THROWS_AS(Hamiltonian2D(geom, bad, 2), std::invalid_argument);
    }
}

TEST_CASE("eigenbasis propagator") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    CounterRng rng(17);
    const FourierField V = random_rough_potential(geom, 3, 0.7, 1.0, rng);
    const Hamiltonian2D H(geom, V, 3);
    const FourierField u0 = random_field(geom, 3, rng);

    SUBCASE("identity at t = 0") { CHECK((propagate(H, u0, 0.0) - u0).norm() < 1e-12); }
    SUBCASE("norm preserved over [0, 10]") {
        for (const double t : {0.5, 2.0, 10.0})
            CHECK(std::abs(propagate(H, u0, t).norm() - u0.norm()) < 1e-10);
    }
    SUBCASE("free flow phases") {
        const Hamiltonian2D H0(geom, FourierField(geom, 0), 3);
        const FourierField ut = propagate(H0, u0, 0.9);
        for (const auto& [n, c] : u0.coefficients()) {
            const cxd expect = c * std::polar(1.0, -0.9 * geom.weighted_norm_sq(n));
            CHECK(std::abs(ut.at(n) - expect) < 1e-12);
        }
    }
}

TEST_CASE("split step cross validation") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    SUBCASE("exact for V = 0") {
        CounterRng rng(5);
        const FourierField u0 = random_field(geom, 3, rng);
        const FourierField V(geom, 0);
        const Hamiltonian2D H(geom, V, 3 + 4);
        const FourierField a = split_step(geom, V, u0, 0.7, 3, 3 + 4);
        const FourierField b = propagate(H, u0, 0.7);
        CHECK((a - b).norm() < 1e-12);
    }
    SUBCASE("exact global phase for constant V") {
        CounterRng rng(6);
        const FourierField u0 = random_field(geom, 2, rng);
        const FourierField V = field_from_plain_coeffs(geom, 0, {{{0, 0}, 0.83}});
        FourierField expected = u0;
        expected *= std::polar(1.0, -0.83 * 0.5);
        // free phases on top
        const Hamiltonian2D H(geom, V, 6);
        const FourierField a = split_step(geom, V, u0, 0.5, 4, 6);
        const FourierField b = propagate(H, u0, 0.5);
        CHECK((a - b).norm() < 1e-11);
    }
    SUBCASE("unitary and second order for V = 2 cos x") {
        CounterRng rng(7);
        const FourierField u0 = random_field(geom, 3, rng);
        const FourierField V =
            field_from_plain_coeffs(geom, 1, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}});
        const int Hw = 3 + 2 * 1 + 4;
        const Hamiltonian2D H(geom, V, Hw);
        const double t = 0.1;
        const FourierField exact = propagate(H, u0, t);
        double prev = 0.0;
        std::vector<double> errs;
        for (const int steps : {8, 16, 32}) {
            const FourierField s = split_step(geom, V, u0, t, steps, Hw);
            CHECK(std::abs(s.norm() - u0.norm()) < 1e-10);
            errs.push_back((s - exact).norm());
            (void)prev;
        }
        CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.2));
        CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("undersized grid flagged") {
        CounterRng rng(8);
        const FourierField u0 = random_field(geom, 3, rng);
        const FourierField V =
            field_from_plain_coeffs(geom, 2, {{{2, 0}, 0.5}, {{-2, 0}, 0.5}});
        CHECK_THROWS_AS(split_step(geom, V, u0, 0.1, 2, 3), std::invalid_argument);
    }
}

TEST_CASE("spectral projector") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    CounterRng rng(23);
    SUBCASE("huge rho acts as the identity") {
        const FourierField V = random_rough_potential(geom, 2, 0.6, 0.5, rng);
        const Hamiltonian2D H(geom, V, 3);
        const FourierField u0 = random_field(geom, 3, rng);
        const SpectralProjectorSpec spec(0.5, 1e6, ChiProfile::sharp_open());
        CHECK((spectral_projector(H, spec, u0) - u0).norm() < 1e-11);
    }
    SUBCASE("sharp free filter keeps exactly the announced modes") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 6);
        const double h = 1.0 / 5.0, rho = 0.2;
        const SpectralProjectorSpec spec(h, rho, ChiProfile::sharp_open());
        FourierField u0(geom, 6);
        for (int n1 = -6; n1 <= 6; ++n1)
            for (int n2 = -6; n2 <= 6; ++n2) u0.set({n1, n2}, 1.0);
        const FourierField out = spectral_projector(H, spec, u0);
        for (int n1 = -6; n1 <= 6; ++n1)
            for (int n2 = -6; n2 <= 6; ++n2) {
                const double w = geom.weighted_norm_sq({n1, n2});
                const bool keep = std::abs(h * h * w - 1.0) < rho;
                const cxd got = out.at({n1, n2});
                if (keep)
                    CHECK(std::abs(got - 1.0) < 1e-10);
                else
                    CHECK(std::abs(got) < 1e-10);
            }
    }
    SUBCASE("sharp profile is exactly idempotent") {
        const FourierField V = random_rough_potential(geom, 2, 0.6, 0.4, rng);
        const Hamiltonian2D H(geom, V, 3);
        const FourierField u0 = random_field(geom, 3, rng);
        const SpectralProjectorSpec spec(0.4, 0.5, ChiProfile::sharp_open());
        const FourierField once = spectral_projector(H, spec, u0);
        const FourierField twice = spectral_projector(H, spec, once);
        CHECK((once - twice).norm() < 1e-11);
    }
    SUBCASE("eigenvector at the shell center is fixed") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 3);
        FourierField u0(geom, 3);
        u0.set({1, 0}, 1.0);  // lambda = 1
        const SpectralProjectorSpec spec(1.0 - 1e-9, 0.3);  // h^2 lambda = 1
        CHECK((spectral_projector(H, spec, u0) - u0).norm() < 1e-9);
    }
    SUBCASE("projector commutes with the flow") {
        const FourierField V = random_rough_potential(geom, 2, 0.6, 0.8, rng);
        const Hamiltonian2D H(geom, V, 3);
        const FourierField u0 = random_field(geom, 3, rng);
        const SpectralProjectorSpec spec(0.45, 0.4);
        const FourierField a = spectral_projector(H, spec, propagate(H, u0, 0.7));
        const FourierField b = propagate(H, spectral_projector(H, spec, u0), 0.7);
        CHECK((a - b).norm() < 1e-10);
    }
}

TEST_CASE("duhamel residual") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    CounterRng rng(31);
    SUBCASE("vanishes for V = 0") {
        const Hamiltonian2D H(geom, FourierField(geom, 0), 3);
        const FourierField u0 = random_field(geom, 3, rng);
        CHECK(duhamel_residual(H, u0, 0.8, 4) < 1e-12);
    }
    SUBCASE("constant potential closes under quadrature refinement") {
        const FourierField V = field_from_plain_coeffs(geom, 0, {{{0, 0}, 1.1}});
        const Hamiltonian2D H(geom, V, 2);
        const FourierField u0 = random_field(geom, 2, rng);
        const double r4 = duhamel_residual(H, u0, 1.0, 4);
        const double r8 = duhamel_residual(H, u0, 1.0, 8);
        CHECK(r8 < 1e-9);
        CHECK(r8 <= r4);
    }
    SUBCASE("refinement decays at the quadrature order") {
        const FourierField V =
            field_from_plain_coeffs(geom, 1, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}});
        const Hamiltonian2D H(geom, V, 3);
        const FourierField u0 = random_field(geom, 3, rng);
        const double r2 = duhamel_residual(H, u0, 0.5, 2);
        const double r4 = duhamel_residual(H, u0, 0.5, 4);
        if (r4 > 1e-13) {
            const double order = std::log2(r2 / r4);
            CHECK(order >= 3.0);
        }
    }
}

TEST_CASE("littlewood-paley truncation") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    CounterRng rng(37);
    const FourierField V = random_rough_potential(geom, 8, 0.51, 1.0, rng);
    SUBCASE("large j reproduces V") {
        const FourierField Vj = littlewood_paley_truncate(V, 6);
        CHECK((Vj - V).norm() < 1e-13);
    }
    SUBCASE("sharp j = 0 keeps |n|^2 <= 1 (closed cut)") {
        const FourierField Vj = littlewood_paley_truncate(V, 0, ChiProfile::sharp_closed());
        for (const auto& [n, c] : V.coefficients()) {
            const bool keep = geom.weighted_norm_sq(n) <= 1.0;
            CHECK(std::abs(Vj.at(n) - (keep ? c : cxd(0.0))) < 1e-14);
        }
    }
    SUBCASE("tail is monotone in j") {
        double prev = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 5; ++j) {
            const double tail = (littlewood_paley_truncate(V, j) - V).norm();
            CHECK(tail <= prev * (1.0 + 1e-12));
            prev = tail;
        }
    }
}

TEST_CASE("propagator lipschitz in the potential") {
    const TorusGeometry geom(kTwoPi, kTwoPi);
    CounterRng rng(41);
    SUBCASE("zero distance for identical potentials") {
        const FourierField V = random_rough_potential(geom, 2, 0.6, 0.7, rng);
        const Hamiltonian2D H(geom, V, 3);
        const FourierField u0 = random_field(geom, 3, rng);
        const LipschitzReport rep = propagator_lipschitz(H, H, u0, 1.0, 8);
        CHECK(rep.max_difference < 1e-12);
    }
    SUBCASE("constant shift closed form |e^{-itc} - 1|") {
        const double c = 0.42, T = 1.0;
        const FourierField V0(geom, 0);
        const FourierField Vc = field_from_plain_coeffs(geom, 0, {{{0, 0}, c}});
        const Hamiltonian2D H0(geom, V0, 2), Hc(geom, Vc, 2);
        CounterRng r2(43);
        const FourierField u0 = random_field(geom, 2, r2);
        const LipschitzReport rep = propagator_lipschitz(H0, Hc, u0, T, 16);
        double expect = 0.0;
        for (int s = 1; s <= 16; ++s)
            expect = std::max(expect, std::abs(std::polar(1.0, -T * s / 16.0 * c) - 1.0));
        CHECK(rep.max_difference == doctest::Approx(expect * u0.norm()).epsilon(1e-10));
    }
}
