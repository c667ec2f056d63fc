#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "toruslab/numerics.hpp"
#include "toruslab/reports.hpp"

namespace toruslab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Union of half-open intervals [a, b) inside [0, 2 pi).
class Region1D {
  public:
    struct Interval {
        double a, b;
    };

    Region1D() = default;
    explicit Region1D(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
        for (const auto& iv : intervals_)
            if (!(iv.b > iv.a)) throw std::invalid_argument("Region1D: need b > a");
    }
    static Region1D full() { return Region1D({{0.0, kTwoPi}}); }

    bool empty() const { return intervals_.empty(); }
    const std::vector<Interval>& intervals() const { return intervals_; }
    bool contains(double x) const {
        for (const auto& iv : intervals_)
            if (x >= iv.a && x < iv.b) return true;
        return false;
    }

  private:
    std::vector<Interval> intervals_;
};

/// Eigendecomposition of a Hermitian Galerkin matrix, eigenvalues ascending,
/// eigenvector columns orthonormal.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;

    int dimension() const { return static_cast<int>(eigenvalues.size()); }
};

EigenSystem eigendecompose(const Matrix& hermitian);

/// Galerkin matrix of -(d/dx + ik)^2 + W on [0, 2 pi) at cutoff N:
/// H_{nm} = delta_{nm} (n+k)^2 + hat W(n - m), n, m in [-N, N].
class FloquetOperator1D {
  public:
    FloquetOperator1D(double k, std::map<int, cxd> potential_coeffs, int cutoff);

    double k() const { return k_; }
    int cutoff() const { return N_; }
    int dimension() const { return 2 * N_ + 1; }
    const std::map<int, cxd>& potential() const { return potential_; }
    const Matrix& matrix() const { return H_; }
    const EigenSystem& eigen() const;

    int index(int n) const { return n + N_; }  // mode -> matrix index

    /// ||W||_{L^2(0,2pi)} from the coefficients (plain e^{imx} convention).
    double potential_l2() const;

  private:
    double k_;
    int N_;
    std::map<int, cxd> potential_;
    Matrix H_;
    mutable EigenSystem eigen_;
    mutable bool eigen_ready_ = false;
};

FloquetOperator1D build_floquet(double k, const std::map<int, cxd>& potential_coeffs,
                                int cutoff);

/// e^{-itH} v0 through the eigendecomposition; preserves the l^2 norm.
Vector propagate_floquet(const FloquetOperator1D& op, const Vector& v0, double t);

/// Both sides of the free-flow L^inf_x L^2_t identity over one time period,
/// plus the a-priori bound 4 * 2 pi * sum |c_n|^2.
///
/// lhs evaluates sup_x of the time power of sum c_n e^{-it(n+k)^2 + inx} by
/// pair enumeration, using the resonance orthogonality of the phases: pairs
/// with (n+k)^2 != (m+k)^2 average to zero (exactly over [0,2pi] when 2k is
/// an integer; in the almost-periodic mean otherwise). rhs groups modes into
/// the resonance classes +-(m+k) = n+k and sums squared class sums. The sup
/// is taken over an 8N-point x-grid and confirmed on the doubled grid.
struct DispersiveIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double parseval_bound = 0.0;  // 4 * 2 pi * sum |c_n|^2
    double sup_refinement_delta = 0.0;
};

DispersiveIdentity free_dispersive_identity(const std::map<int, cxd>& coeffs, double k);

/// ||e^{-itH} v0||_{L^inf_x L^2_t([0,T])} by grid sampling in x and
/// trapezoid quadrature over t_samples times.
double dispersive_mixed_norm(const FloquetOperator1D& op, const Vector& v0, double T,
                             int x_samples, int t_samples);

/// Galerkin matrix of the indicator 1_omega on the M-point grid (exact for
/// the full circle; quadrature with O(1/M) boundary error otherwise).
Matrix region_matrix_1d(const Region1D& omega, int cutoff, int M);

/// Observability Gramian G_{ab} = <1_omega phi_b, phi_a> iota(l_a - l_b, T)
/// in the eigenbasis of op, with K0 = 1 / lambda_min(G).
std::pair<Matrix, GramianReport> build_gramian_1d(const FloquetOperator1D& op,
                                                  const Region1D& omega, double T, int M);

GramianReport observability_constant_1d(const FloquetOperator1D& op, const Region1D& omega,
                                        double T, int M);

/// Solves (H - tau) u = g and reports ||u|| / (<tau>^{-1/2} ||g|| + ||u||_{L^2(omega)}).
/// tau within 1e-8 of an eigenvalue is nudged by 1e-6 and flagged.
StationaryCheck stationary_check_1d(const FloquetOperator1D& op, double tau,
                                    const Vector& g, const Region1D& omega, int M);

}  // namespace toruslab
