#pragma once

#include <optional>

#include "toruslab/spectral2d.hpp"

namespace toruslab {

/// Galerkin matrix of the indicator 1_Omega on the M x M grid, Toeplitz in
/// the mode difference. Pre: M >= 4N+1 so products of two box modes are
/// alias-free.
Matrix region_matrix_2d(const TorusGeometry& geom, const ObservationRegion& region,
                        int cutoff, int M);

/// Observability Gramian G_{ab} = <1_Omega phi_b, phi_a> iota(l_a - l_b, T)
/// in the eigenbasis of H; Hermitian PSD with lambda_max <= T.
std::pair<Matrix, GramianReport> build_gramian(const Hamiltonian2D& H,
                                               const ObservationRegion& region, double T,
                                               int M);

/// time-quadrature oracle: int_0^T ||1_Omega e^{-itH} u||^2 dt by the
/// trapezoid rule with `steps` steps (independent of the iota closed form).
double observed_energy_quadrature(const Hamiltonian2D& H, const ObservationRegion& region,
                                  double T, int M, const Vector& u, int steps);

struct ObservabilitySequence {
    std::vector<GramianReport> reports;  // one per cutoff in ascending order
    bool monotone = true;                // K(N) nondecreasing
    double stabilization_ratio = 0.0;    // K(N_max) / K(N_prev)
};

/// K(N) across ascending cutoffs with a common region grid (M = 4 max(N) + 1),
/// so for V = 0 each Gramian is a principal submatrix of the next.
ObservabilitySequence observability_constant(const TorusGeometry& geom,
                                             const FourierField& V,
                                             const ObservationRegion& region, double T,
                                             const std::vector<int>& cutoffs);

struct ShellReport {
    double h = 0.0;
    double rho = 0.0;
    int shell_dimension = 0;
    GramianReport gramian;
    bool skipped = false;  // empty shell
};

/// Gramian restricted to the range of the (sharp-profile) projector for each
/// spec; K_shell = 1 / lambda_min of the restricted block.
std::vector<ShellReport> shell_observability_scan(const Hamiltonian2D& H,
                                                  const std::vector<SpectralProjectorSpec>& specs,
                                                  const ObservationRegion& region, double T,
                                                  int M);

/// Rational-direction frame on the torus: Xi0 = (pA, qB)/b with
/// b = sqrt(p^2 A^2 + q^2 B^2), covering rectangle [0,a] x [0,b] of area
/// a b = AB, and the pullback shift identity
///   F*u(x + a, y) = F*u(x, y - gamma_shift)
/// for every lattice-periodic u, where F(x,y) = x Xi0_perp + y Xi0.
struct DirectionFrame {
    int p = 0, q = 0;                  // coprime direction
    std::array<double, 2> Xi0{};       // unit direction
    std::array<double, 2> Xi0_perp{};  // unit normal (-qB, pA)/b
    double a = 0.0;                    // transverse period, a b = AB
    double b = 0.0;                    // geodesic period sqrt(p^2A^2+q^2B^2)
    double gamma_shift = 0.0;          // (r p A^2 + s q B^2)/b
    int bezout_r = 0, bezout_s = 0;    // s p - r q = 1
};

DirectionFrame direction_frame(const TorusGeometry& geom, int p, int q);

/// W(x) = (1/b) int_0^b F*V(x, y) dy, an a-periodic profile. coeffs are
/// plain: W(x) = sum_m coeffs[m] e^{2 pi i m x / a}; only modes of V with
/// frequency orthogonal to Xi0 survive.
struct AveragedPotential {
    double period = 0.0;
    std::map<int, cxd> coeffs;
    double quadrature_residual = 0.0;   // resonance formula vs y-quadrature
    double periodicity_residual = 0.0;  // W(x + a) vs W(x) on samples
};

AveragedPotential averaged_potential(const FourierField& V, const DirectionFrame& frame,
                                     int quad);

}  // namespace toruslab
