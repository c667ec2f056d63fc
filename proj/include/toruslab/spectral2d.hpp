#pragma once

#include <Eigen/Dense>

#include "toruslab/rng.hpp"
#include "toruslab/spectral1d.hpp"  // EigenSystem, Matrix, Vector
#include "toruslab/torus.hpp"

namespace toruslab {

/// Semiclassical shell cutoff chi((h^2 lambda - 1) / rho).
struct SpectralProjectorSpec {
    double h = 0.0;
    double rho = 0.0;
    ChiProfile chi = ChiProfile::smooth();

    SpectralProjectorSpec(double h_, double rho_, ChiProfile chi_ = ChiProfile::smooth())
        : h(h_), rho(rho_), chi(chi_) {
        if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("projector: h in (0,1)");
        if (!(rho > 0.0)) throw std::invalid_argument("projector: rho > 0");
    }
};

/// Galerkin matrix of -Delta + V on the cutoff box: H_{nm} =
/// delta_{nm} weighted_norm_sq(n) + vhat(n-m), where vhat are the plain
/// coefficients of V(z) = sum vhat(m) e^{i frequency(m).z}. V is passed as a
/// FourierField in the orthonormal convention, so vhat = c / sqrt(AB).
class Hamiltonian2D {
  public:
    Hamiltonian2D(TorusGeometry geometry, FourierField potential, int cutoff);

    const TorusGeometry& geometry() const { return geom_; }
    const FourierField& potential() const { return V_; }
    int cutoff() const { return N_; }
    int dimension() const { return (2 * N_ + 1) * (2 * N_ + 1); }
    const Matrix& matrix() const { return H_; }
    const EigenSystem& eigen() const;

    int index(LatticePoint n) const {
        return (n.n1 + N_) * (2 * N_ + 1) + (n.n2 + N_);
    }
    LatticePoint point_of(int idx) const {
        const int d = 2 * N_ + 1;
        return {idx / d - N_, idx % d - N_};
    }

    Vector to_vector(const FourierField& u) const;
    FourierField to_field(const Vector& v) const;

  private:
    TorusGeometry geom_;
    FourierField V_;
    int N_;
    Matrix H_;
    mutable EigenSystem eigen_;
    mutable bool eigen_ready_ = false;
};

Hamiltonian2D build_hamiltonian(const TorusGeometry& geometry, const FourierField& V,
                                int cutoff);

/// Field with plain coefficients a_n, i.e. u(z) = sum a_n e^{i frequency(n).z}.
FourierField field_from_plain_coeffs(const TorusGeometry& geom, int cutoff,
                                     const std::map<LatticePoint, cxd>& plain);

/// Random real potential with |c_n| ~ <n>^{-1-eps} tails, normalized to
/// l2_norm in L^2. eps -> 0 leaves the field in L^2 but not in L^inf.
FourierField random_rough_potential(const TorusGeometry& geom, int cutoff, double eps,
                                    double l2_norm, CounterRng& rng);

/// Random complex field on the full cutoff box (unit-normalized).
FourierField random_field(const TorusGeometry& geom, int cutoff, CounterRng& rng);

/// e^{-itH} u0 via the eigendecomposition. Norm preserved to roundoff.
FourierField propagate(const Hamiltonian2D& H, const FourierField& u0, double t);

/// Strang splitting: exact free flight on coefficients alternated with the
/// exact potential phase on the grid. The state lives on the mode box of
/// half-width `mode_halfwidth` (default u0.cutoff() + 2 V.cutoff() + 4) with
/// the matched (2H+1)-point grid, so every step is exactly unitary.
FourierField split_step(const TorusGeometry& geom, const FourierField& V,
                        const FourierField& u0, double t, int steps,
                        int mode_halfwidth = -1);

/// chi((h^2 lambda_a - 1)/rho) applied to the eigencomponents of u0.
FourierField spectral_projector(const Hamiltonian2D& H, const SpectralProjectorSpec& spec,
                                const FourierField& u0);

/// Eigenvalue filter weights of the projector (diagnostics / shell selection).
std::vector<double> projector_weights(const Hamiltonian2D& H,
                                      const SpectralProjectorSpec& spec);

/// || e^{-itH}u0 - e^{it Delta}u0 - (1/i) int_0^t e^{i(t-s)Delta} (V u(s)) ds ||
/// with composite Gauss-Legendre in s (`panels` panels of `points` nodes) and
/// alias-free grid multiplication for V u(s).
double duhamel_residual(const Hamiltonian2D& H, const FourierField& u0, double t,
                        int panels, int points = 3);

/// V_j: multiplies vhat(n) by chi(2^{-2j} weighted_norm_sq(n)).
FourierField littlewood_paley_truncate(const FourierField& V, int j,
                                       const ChiProfile& chi = ChiProfile::smooth());

struct LipschitzReport {
    double max_difference = 0.0;   // max_t ||(U_V - U_Vn) u0||
    double potential_distance = 0.0;  // ||V - Vn||_{L^2}
    double ratio = 0.0;            // max_difference / (distance * ||u0||)
};

/// Flow-map Lipschitz data for the pair (V, Vn) at common cutoff.
LipschitzReport propagator_lipschitz(const Hamiltonian2D& HV, const Hamiltonian2D& HVn,
                                     const FourierField& u0, double T, int samples);

}  // namespace toruslab
