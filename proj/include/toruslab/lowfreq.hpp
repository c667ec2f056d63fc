#pragma once

#include "toruslab/rng.hpp"
#include "toruslab/spectral1d.hpp"

namespace toruslab {

/// Abstract observed system: P phi_n = lambda_n phi_n with orthonormal
/// eigenvector columns, a bounded observation operator A (||A|| <= 1 for
/// indicator observations) and a horizon T.
struct ModelSystem {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // columns phi_n in the ambient basis
    Matrix A;
    double T = 0.0;

    int dimension() const { return static_cast<int>(eigenvalues.size()); }

    /// Observation Gramian over [t0, t1] in the ambient basis.
    Matrix gramian(double t0, double t1) const;

    /// 1 / lambda_min of the full-window Gramian.
    double gramian_constant() const;
};

/// Model from a 1D Floquet operator observed through 1_omega on the M-grid.
ModelSystem model_from_floquet(const FloquetOperator1D& op, const Region1D& omega,
                               double T, int M);

/// P-based Sobolev norm (sum <lambda_n>^{2s} |<phi, phi_n>|^2)^{1/2}.
double hp_norm(const ModelSystem& model, const Vector& phi, double s);

struct ClusterDecomposition {
    std::vector<double> mu;                // distinct eigenvalues, ascending
    std::vector<std::vector<int>> members; // eigenvector indices per cluster
    int r1 = 0;  // clusters with mu <= N
    int r2 = 0;  // clusters with mu <= M
    double N = 0.0, M = 0.0;
    bool boundary_ambiguity = false;  // a cluster straddles N or M within tol
};

ClusterDecomposition cluster_spectrum(const ModelSystem& model, double N, double M,
                                      double cluster_tol = 1e-9);

/// lambda_min of the Gram matrix of t -> e^{i mu_r t} over [T/2, 3T/4];
/// positive for distinct frequencies.
double exp_gram_min(const std::vector<double>& mu, double T);

struct VandermondeSigma {
    std::vector<cxd> sigma;   // max |sigma_p| = 1 after rescaling
    double K5 = 0.0;          // min over the high clusters of |sum sigma_p e^{i mu_r p tau}|
    double tau = 0.0;
    double zero_residual = 0.0;  // max over the low clusters (should be ~0)
    bool tau_perturbed = false;
};

/// Solves sum_p sigma_p e^{i mu_r p tau} = (0 for r <= r1, 1 for r > r1)
/// with tau = T / (10 r2), then rescales to max |sigma_p| = 1.
VandermondeSigma vandermonde_sigma(const std::vector<double>& mu, int r1, double T);

struct WeakObservabilityFit {
    double C1 = 0.0;
    double C2 = 0.0;
    double eps = 2.0;
    int trials = 0;
    double worst_violation = 0.0;  // max over test set of lhs - rhs (<= 0 after inflation)
};

/// Empirical certification of ||phi||^2 <= C1 int_0^{T/4} ||A U phi||^2 + C2
/// ||phi||^2_{H^{-eps}} over random phi and all eigenvectors; the fitted C2
/// is inflated by 10%.
WeakObservabilityFit certify_weak_observability(const ModelSystem& model, double eps,
                                                int trials, CounterRng& rng,
                                                double C1_override = 0.0);

struct AssemblyReport {
    double eps = 0.0, C1 = 0.0, C2 = 0.0;
    double N = 0.0, M = 0.0;
    int r1 = 0, r2 = 0;
    double tau = 0.0;
    double K2 = 0.0;  // max stationary constant over low clusters
    double K3 = 0.0;  // exponential Gram floor
    double K4 = 0.0;  // cross-term tail scale (bound = K4 / M)
    double K5 = 0.0;  // Vandermonde floor
    double K6 = 0.0;  // pre-tail lower-bound factor
    double beta = 0.0;
    double tail = 0.0;  // K4 / (m M), kept <= 1/2
    double K_assembled = 0.0;
    double K_gramian = 0.0;
    bool success = false;
    std::string note;
};

/// Full constant chain: N from (2 C2)^{1/eps}, cluster split, measured
/// per-cluster stationary constants, exponential Gram floor, Vandermonde
/// construction, explicit cross-term tail with a C^3 plateau window, and the
/// final certificate K with ||phi||^2 <= K int_0^T ||A U phi||^2 dt.
AssemblyReport assemble_constant(const ModelSystem& model, double eps, double C1,
                                 double C2);

struct EliminationCheck {
    double worst_ratio = 0.0;  // max ||phi||^2 / observed energy
    double K = 0.0;
    bool pass = false;
    int tested = 0;
};

/// Checks the final inequality on `trials` random vectors plus every
/// eigenvector.
EliminationCheck verify_elimination(const ModelSystem& model, double K, int trials,
                                    CounterRng& rng);

}  // namespace toruslab
