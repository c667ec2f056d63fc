#pragma once

#include "toruslab/observability.hpp"

namespace toruslab {

/// HUM minimizer and diagnostics. With U(t) = e^{-itH} and the control
/// f(s) = 1_Omega U(s) phi, Duhamel gives u(T) = U(T)(u0 - i G phi), so phi
/// solves G phi = -i u0 and the terminal norm equals the solve residual.
struct ControlSolution {
    FourierField phi;
    double terminal_norm = 0.0;  // ||u(T)|| predicted by the normal equation
    double cost = 0.0;           // <G phi, phi> = ||f||^2_{L^2([0,T] x Omega)}
    int cg_iterations = 0;
    bool converged = true;
    GramianReport gramian;

    explicit ControlSolution(FourierField phi_) : phi(std::move(phi_)) {}
};

struct HumOptions {
    double cg_tol = 1e-10;  // relative residual target
    int max_iterations = 0; // 0 -> dimension
    bool jacobi_preconditioner = false;
};

/// Conjugate-gradient solve of the Hermitian PSD normal equation.
ControlSolution synthesize_control(const Hamiltonian2D& H, const ObservationRegion& region,
                                   double T, const FourierField& u0, int M,
                                   const HumOptions& options = {});

/// Independent terminal check: integrates i u' = H u + 1_Omega U(t) phi with
/// composite Gauss quadrature (`points` nodes per panel; 1 -> midpoint,
/// order 2) and returns ||u(T)||. M must match the Gramian grid so both
/// sides use the same discrete indicator.
double verify_terminal(const Hamiltonian2D& H, const ObservationRegion& region, double T,
                       const ControlSolution& solution, const FourierField& u0, int M,
                       int steps, int points = 1);

struct CostBoundCheck {
    bool pass = false;
    double cost = 0.0;
    double duality_residual = 0.0;  // |cost - Re<-i u0, phi>|
    double bound = 0.0;             // K ||u0||^2
};

/// cost = Re<-i u0, phi> and cost <= K ||u0||^2 (HUM duality).
CostBoundCheck control_cost_bound_check(const ControlSolution& solution,
                                        const GramianReport& report,
                                        const FourierField& u0);

/// Control sample f(t) = 1_Omega U(t) phi on the M-grid (vanishes outside
/// Omega bit-exactly).
GridFunction control_sample(const Hamiltonian2D& H, const ObservationRegion& region,
                            const ControlSolution& solution, double t, int M);

}  // namespace toruslab
