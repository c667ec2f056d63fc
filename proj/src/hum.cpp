#include "toruslab/hum.hpp"

#include <cmath>

namespace toruslab {

namespace {

// CG for Hermitian positive semidefinite systems.
struct CgResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
    double relative_residual = 0.0;
};

CgResult conjugate_gradient(const Matrix& A, const Vector& b, double tol, int max_iter,
                            bool jacobi) {
    const int d = static_cast<int>(b.size());
    Vector precond = Vector::Ones(d);
    if (jacobi)
        for (int i = 0; i < d; ++i) {
            const double aii = A(i, i).real();
            precond(i) = aii > 0.0 ? 1.0 / aii : 1.0;
        }

    CgResult res;
    res.x = Vector::Zero(d);
    Vector r = b;
    Vector z = precond.asDiagonal() * r;
    Vector p = z;
    cxd rz = r.dot(z);  // Eigen dot conjugates the first argument
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    for (int it = 0; it < max_iter; ++it) {
        const Vector Ap = A * p;
        const cxd denom = p.dot(Ap);
        if (std::abs(denom) == 0.0) break;
        const cxd alpha = rz / denom;
        res.x += alpha * p;
        r -= alpha * Ap;
        ++res.iterations;
        res.relative_residual = r.norm() / bnorm;
        if (res.relative_residual <= tol) {
            res.converged = true;
            break;
        }
        z = precond.asDiagonal() * r;
        const cxd rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return res;
}

}  // namespace

ControlSolution synthesize_control(const Hamiltonian2D& H, const ObservationRegion& region,
                                   double T, const FourierField& u0, int M,
                                   const HumOptions& options) {
    auto [G, report] = build_gramian(H, region, T, M);
    ControlSolution sol{FourierField(H.geometry(), H.cutoff())};
    sol.gramian = report;

    const Vector u0v = H.to_vector(u0);
    const Vector b = cxd(0.0, -1.0) * u0v;
    const int max_iter = options.max_iterations > 0 ? options.max_iterations : H.dimension();
    const CgResult cg = conjugate_gradient(G, b, options.cg_tol, max_iter,
                                           options.jacobi_preconditioner);
    sol.cg_iterations = cg.iterations;
    sol.converged = cg.converged || u0v.norm() == 0.0;
    sol.phi = H.to_field(cg.x);
    sol.cost = std::max(0.0, (cg.x.adjoint() * G * cg.x)(0).real());
    // u(T) = U(T)(u0 - i G phi); the bracket equals -i times the CG residual.
    sol.terminal_norm = (u0v - cxd(0.0, 1.0) * (G * cg.x)).norm();
    return sol;
}

double verify_terminal(const Hamiltonian2D& H, const ObservationRegion& region, double T,
                       const ControlSolution& solution, const FourierField& u0, int M,
                       int steps, int points) {
    if (steps < 1) throw std::invalid_argument("verify_terminal: steps >= 1");
    const Matrix Momega = region_matrix_2d(H.geometry(), region, H.cutoff(), M);
    const EigenSystem& es = H.eigen();
    const Vector phi_e = es.eigenvectors.adjoint() * H.to_vector(solution.phi);

    // u(T) = U(T) u0 - i sum_q w_q U(T - s_q) 1_Omega U(s_q) phi, assembled in
    // the eigenbasis: U(-s) M U(s) applied pointwise per node.
    Vector acc = Vector::Zero(H.dimension());
    Vector tmp(H.dimension());
    for (const auto& [s, w] : composite_gauss(T, steps, points)) {
        for (int a = 0; a < es.dimension(); ++a)
            tmp(a) = phi_e(a) * std::polar(1.0, -s * es.eigenvalues(a));
        Vector f_modes = Momega * (es.eigenvectors * tmp);
        Vector f_e = es.eigenvectors.adjoint() * f_modes;
        for (int a = 0; a < es.dimension(); ++a)
            f_e(a) *= std::polar(1.0, s * es.eigenvalues(a));
        acc += w * f_e;
    }
    const Vector u0_e = es.eigenvectors.adjoint() * H.to_vector(u0);
    // Global U(T) is unitary, so ||u(T)|| = ||u0 - i acc|| in eigencoords.
    return (u0_e - cxd(0.0, 1.0) * acc).norm();
}

CostBoundCheck control_cost_bound_check(const ControlSolution& solution,
                                        const GramianReport& report,
                                        const FourierField& u0) {
    CostBoundCheck out;
    out.cost = solution.cost;
    // <G phi, phi> = <-i u0, phi> when G phi = -i u0.
    cxd inner(0.0);
    for (const auto& [n, c] : solution.phi.coefficients())
        inner += std::conj(c) * (cxd(0.0, -1.0) * u0.at(n));
    out.duality_residual = std::abs(solution.cost - inner.real());
    out.bound = report.K * u0.norm_sq();
    const double scale = std::max(1.0, std::abs(solution.cost));
    out.pass = out.duality_residual <= 1e-8 * scale &&
               solution.cost <= out.bound + 1e-8 * scale;
    return out;
}

GridFunction control_sample(const Hamiltonian2D& H, const ObservationRegion& region,
                            const ControlSolution& solution, double t, int M) {
    const FourierField ut = propagate(H, solution.phi, t);
    auto [grid, norm] = restrict_to_region(ut, region, M);
    (void)norm;
    return grid;
}

}  // namespace toruslab
