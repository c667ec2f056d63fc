#include "toruslab/spectral2d.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

Hamiltonian2D::Hamiltonian2D(TorusGeometry geometry, FourierField potential, int cutoff)
    : geom_(geometry), V_(std::move(potential)), N_(cutoff) {
    if (N_ < 0) throw std::invalid_argument("Hamiltonian2D: cutoff >= 0");
    if (!(V_.geometry() == geom_))
        throw std::invalid_argument("Hamiltonian2D: potential geometry mismatch");
    if (!V_.hermitian_symmetric())
        throw std::invalid_argument("Hamiltonian2D: potential is not real");

    const int d = dimension();
    const double inv_sqrt_area = 1.0 / std::sqrt(geom_.area());
    H_ = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const LatticePoint n = point_of(a);
        H_(a, a) = geom_.weighted_norm_sq(n);
    }
    // Toeplitz potential block: vhat(n - m) with vhat = c / sqrt(AB).
    for (const auto& [m, c] : V_.coefficients()) {
        const cxd v = c * inv_sqrt_area;
        for (int a = 0; a < d; ++a) {
            const LatticePoint na = point_of(a);
            const LatticePoint nb{na.n1 - m.n1, na.n2 - m.n2};
            if (std::abs(nb.n1) <= N_ && std::abs(nb.n2) <= N_) H_(a, index(nb)) += v;
        }
    }
}

const EigenSystem& Hamiltonian2D::eigen() const {
    if (!eigen_ready_) {
        eigen_ = eigendecompose(H_);
        eigen_ready_ = true;
    }
    return eigen_;
}

Vector Hamiltonian2D::to_vector(const FourierField& u) const {
    Vector v = Vector::Zero(dimension());
    for (const auto& [n, c] : u.coefficients()) {
        if (std::abs(n.n1) > N_ || std::abs(n.n2) > N_)
            throw std::invalid_argument("Hamiltonian2D::to_vector: mode outside box");
        v(index(n)) = c;
    }
    return v;
}

FourierField Hamiltonian2D::to_field(const Vector& v) const {
    FourierField out(geom_, N_);
    for (int a = 0; a < dimension(); ++a)
        if (v(a) != cxd(0.0)) out.set(point_of(a), v(a));
    return out;
}

Hamiltonian2D build_hamiltonian(const TorusGeometry& geometry, const FourierField& V,
                                int cutoff) {
    return Hamiltonian2D(geometry, V, cutoff);
}

FourierField field_from_plain_coeffs(const TorusGeometry& geom, int cutoff,
                                     const std::map<LatticePoint, cxd>& plain) {
    FourierField out(geom, cutoff);
    const double s = std::sqrt(geom.area());
    for (const auto& [n, a] : plain) out.set(n, a * s);
    return out;
}

FourierField random_rough_potential(const TorusGeometry& geom, int cutoff, double eps,
                                    double l2_norm, CounterRng& rng) {
    FourierField V(geom, cutoff);
    // Fill the upper half of the box, mirror conjugates for realness.
    for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
        for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
            if (n1 < 0 || (n1 == 0 && n2 <= 0)) continue;
            const double w = std::sqrt(1.0 + double(n1) * n1 + double(n2) * n2);
            const cxd c = rng.next_complex_gaussian() * std::pow(w, -1.0 - eps);
            V.set({n1, n2}, c);
            V.set({-n1, -n2}, std::conj(c));
        }
    }
    const double norm = V.norm();
    if (norm > 0.0 && l2_norm > 0.0) V *= l2_norm / norm;
    return V;
}

FourierField random_field(const TorusGeometry& geom, int cutoff, CounterRng& rng) {
    FourierField u(geom, cutoff);
    for (int n1 = -cutoff; n1 <= cutoff; ++n1)
        for (int n2 = -cutoff; n2 <= cutoff; ++n2)
            u.set({n1, n2}, rng.next_complex_gaussian());
    const double norm = u.norm();
    if (norm > 0.0) u *= 1.0 / norm;
    return u;
}

FourierField propagate(const Hamiltonian2D& H, const FourierField& u0, double t) {
    const EigenSystem& es = H.eigen();
    Vector w = es.eigenvectors.adjoint() * H.to_vector(u0);
    for (int a = 0; a < es.dimension(); ++a) w(a) *= std::polar(1.0, -t * es.eigenvalues(a));
    return H.to_field(es.eigenvectors * w);
}

FourierField split_step(const TorusGeometry& geom, const FourierField& V,
                        const FourierField& u0, double t, int steps,
                        int mode_halfwidth) {
    if (steps < 1) throw std::invalid_argument("split_step: steps >= 1");
    if (!(V.geometry() == geom) || !(u0.geometry() == geom))
        throw std::invalid_argument("split_step: geometry mismatch");
    int Hw = mode_halfwidth;
    if (Hw < 0) Hw = u0.cutoff() + 2 * V.cutoff() + 4;
    if (Hw < u0.cutoff() + V.cutoff())
        throw std::invalid_argument("split_step: grid too small, products alias");
    const int M = 2 * Hw + 1;
    const double dt = t / steps;

    // Potential phase samples e^{-i dt V(z)}; V real so the synthesis is
    // real up to roundoff.
    GridFunction vgrid = synthesize_grid(V, M);
    std::vector<cxd> phase(vgrid.values().size());
    for (size_t i = 0; i < phase.size(); ++i)
        phase[i] = std::polar(1.0, -dt * vgrid.values()[i].real());

    // Half kinetic phases on the mode box.
    FourierField state(geom, Hw);
    for (const auto& [n, c] : u0.coefficients()) state.set(n, c);
    auto half_kinetic = [&](FourierField& f) {
        FourierField next(geom, Hw);
        for (const auto& [n, c] : f.coefficients())
            next.set(n, c * std::polar(1.0, -0.5 * dt * geom.weighted_norm_sq(n)));
        f = std::move(next);
    };

    for (int s = 0; s < steps; ++s) {
        half_kinetic(state);
        GridFunction g = synthesize_grid(state, M);
        for (size_t i = 0; i < phase.size(); ++i) g.values()[i] *= phase[i];
        state = analyze_grid(g, Hw);
        half_kinetic(state);
    }
    return state;
}

std::vector<double> projector_weights(const Hamiltonian2D& H,
                                      const SpectralProjectorSpec& spec) {
    const EigenSystem& es = H.eigen();
    std::vector<double> w(es.dimension());
    const double h2 = spec.h * spec.h;
    for (int a = 0; a < es.dimension(); ++a)
        w[a] = spec.chi((h2 * es.eigenvalues(a) - 1.0) / spec.rho);
    return w;
}

FourierField spectral_projector(const Hamiltonian2D& H, const SpectralProjectorSpec& spec,
                                const FourierField& u0) {
    const EigenSystem& es = H.eigen();
    const std::vector<double> w = projector_weights(H, spec);
    Vector coeffs = es.eigenvectors.adjoint() * H.to_vector(u0);
    for (int a = 0; a < es.dimension(); ++a) coeffs(a) *= w[a];
    return H.to_field(es.eigenvectors * coeffs);
}

namespace {

// P_N(V u): alias-free grid product analyzed back onto the cutoff box.
FourierField truncated_product(const TorusGeometry& geom, const FourierField& V,
                               const FourierField& u, int cutoff) {
    (void)geom;
    const int M = 2 * (V.cutoff() + u.cutoff()) + 1;
    GridFunction vg = synthesize_grid(V, M);
    GridFunction ug = synthesize_grid(u, M);
    for (size_t i = 0; i < ug.values().size(); ++i)
        ug.values()[i] *= vg.values()[i];
    return analyze_grid(ug, cutoff);
}

}  // namespace

double duhamel_residual(const Hamiltonian2D& H, const FourierField& u0, double t,
                        int panels, int points) {
    if (panels < 1) throw std::invalid_argument("duhamel_residual: panels >= 1");
    const TorusGeometry& geom = H.geometry();
    const int N = H.cutoff();

    auto free_flow = [&](const FourierField& f, double dt) {
        FourierField out(geom, N);
        for (const auto& [n, c] : f.coefficients())
            out.set(n, c * std::polar(1.0, -dt * geom.weighted_norm_sq(n)));
        return out;
    };

    FourierField target = propagate(H, u0, t);
    FourierField acc(geom, N);
    for (const auto& [s, w] : composite_gauss(t, panels, points)) {
        const FourierField us = propagate(H, u0, s);
        FourierField g = free_flow(truncated_product(geom, H.potential(), us, N), t - s);
        g *= w;
        acc += g;
    }
    acc *= cxd(0.0, -1.0);  // 1/i
    FourierField residual = target - free_flow(u0, t);
    residual = residual - acc;
    return residual.norm();
}

FourierField littlewood_paley_truncate(const FourierField& V, int j,
                                       const ChiProfile& chi) {
    if (j < 0) throw std::invalid_argument("littlewood_paley_truncate: j >= 0");
    const double scale = std::pow(2.0, -2.0 * j);
    FourierField out(V.geometry(), V.cutoff());
    for (const auto& [n, c] : V.coefficients()) {
        const double w = chi(scale * V.geometry().weighted_norm_sq(n));
        if (w != 0.0) out.set(n, c * w);
    }
    return out;
}

LipschitzReport propagator_lipschitz(const Hamiltonian2D& HV, const Hamiltonian2D& HVn,
                                     const FourierField& u0, double T, int samples) {
    if (HV.cutoff() != HVn.cutoff())
        throw std::invalid_argument("propagator_lipschitz: cutoffs differ");
    LipschitzReport rep;
    rep.potential_distance = (HV.potential() - HVn.potential()).norm();
    for (int s = 1; s <= samples; ++s) {
        const double t = T * s / samples;
        const FourierField diff = propagate(HV, u0, t) - propagate(HVn, u0, t);
        rep.max_difference = std::max(rep.max_difference, diff.norm());
    }
    const double denom = rep.potential_distance * u0.norm();
    rep.ratio = denom > 0.0 ? rep.max_difference / denom : 0.0;
    return rep;
}

}  // namespace toruslab
