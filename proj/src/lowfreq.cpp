#include "toruslab/lowfreq.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

Matrix ModelSystem::gramian(double t0, double t1) const {
    const Matrix R = eigenvectors.adjoint() * (A.adjoint() * A) * eigenvectors;
    const int d = dimension();
    Matrix G(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            G(a, b) = R(a, b) * phase_integral(eigenvalues(a) - eigenvalues(b), t0, t1);
    Matrix out = eigenvectors * G * eigenvectors.adjoint();
    return ((out + Matrix(out.adjoint())) / 2.0).eval();
}

double ModelSystem::gramian_constant() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gramian(0.0, T));
    const double lmin = es.eigenvalues().minCoeff();
    return lmin > 0.0 ? 1.0 / lmin : 0.0;
}

ModelSystem model_from_floquet(const FloquetOperator1D& op, const Region1D& omega,
                               double T, int M) {
    ModelSystem model;
    const EigenSystem& es = op.eigen();
    model.eigenvalues = es.eigenvalues;
    model.eigenvectors = es.eigenvectors;
    // Indicator observation: A = M_omega^{1/2} would also do; the Galerkin
    // matrix itself is Hermitian with 0 <= M <= I, and ||A phi||^2 enters
    // through A*A, so take the PSD square root to keep A*A = M_omega exact.
    const Matrix Momega = region_matrix_1d(omega, op.cutoff(), M);
    Eigen::SelfAdjointEigenSolver<Matrix> sa(Momega);
    Eigen::VectorXd vals = sa.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    model.A = sa.eigenvectors() * vals.asDiagonal() * sa.eigenvectors().adjoint();
    model.T = T;
    return model;
}

double hp_norm(const ModelSystem& model, const Vector& phi, double s) {
    const Vector coords = model.eigenvectors.adjoint() * phi;
    double acc = 0.0;
    for (int n = 0; n < model.dimension(); ++n)
        acc += std::pow(bracket(model.eigenvalues(n)), 2.0 * s) * std::norm(coords(n));
    return std::sqrt(acc);
}

ClusterDecomposition cluster_spectrum(const ModelSystem& model, double N, double M,
                                      double cluster_tol) {
    if (!(N < M)) throw std::invalid_argument("cluster_spectrum: need N < M");
    ClusterDecomposition out;
    out.N = N;
    out.M = M;
    const int d = model.dimension();
    const double scale = std::max(1.0, std::abs(model.eigenvalues(d - 1)));
    const double tol = cluster_tol * scale;
    for (int n = 0; n < d; ++n) {
        const double l = model.eigenvalues(n);
        if (!out.mu.empty() && std::abs(l - out.mu.back()) <= tol) {
            out.members.back().push_back(n);
            continue;
        }
        out.mu.push_back(l);
        out.members.push_back({n});
    }
    for (size_t r = 0; r < out.mu.size(); ++r) {
        if (out.mu[r] <= N) out.r1 = static_cast<int>(r) + 1;
        if (out.mu[r] <= M) out.r2 = static_cast<int>(r) + 1;
        if (std::abs(out.mu[r] - N) <= tol || std::abs(out.mu[r] - M) <= tol)
            out.boundary_ambiguity = true;
    }
    return out;
}

double exp_gram_min(const std::vector<double>& mu, double T) {
    const int r = static_cast<int>(mu.size());
    if (r == 0) throw std::invalid_argument("exp_gram_min: empty frequency list");
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            if (mu[i] == mu[j])
                throw std::invalid_argument("exp_gram_min: duplicate frequencies");
    Matrix G(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            G(i, j) = phase_integral(mu[i] - mu[j], T / 2.0, 3.0 * T / 4.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(((G + Matrix(G.adjoint())) / 2.0).eval());
    return es.eigenvalues().minCoeff();
}

VandermondeSigma vandermonde_sigma(const std::vector<double>& mu, int r1, double T) {
    const int r2 = static_cast<int>(mu.size());
    if (r1 < 0 || r1 > r2) throw std::invalid_argument("vandermonde_sigma: bad r1");
    if (r2 == 0) throw std::invalid_argument("vandermonde_sigma: empty mu");
    VandermondeSigma out;
    const double tau0 = T / (10.0 * r2);

    auto nodes_ok = [&](double tau) {
        for (int i = 0; i < r2; ++i)
            for (int j = i + 1; j < r2; ++j) {
                const double phase = (mu[i] - mu[j]) * tau / kTwoPi;
                if (std::abs(phase - std::round(phase)) < 1e-10) return false;
            }
        return true;
    };
    double tau = tau0;
    if (!nodes_ok(tau)) {
        bool found = false;
        for (int j = 1; j <= 20 && !found; ++j) {
            for (const double sign : {1.0, -1.0}) {
                const double cand = tau0 * (1.0 + sign * j * 5e-5);
                if (nodes_ok(cand)) {
                    tau = cand;
                    out.tau_perturbed = true;
                    found = true;
                    break;
                }
            }
        }
        if (!found)
            throw std::runtime_error("vandermonde_sigma: node collision unresolved");
    }
    out.tau = tau;

    Matrix V(r2, r2);
    Vector b(r2);
    for (int r = 0; r < r2; ++r) {
        const cxd x = std::polar(1.0, mu[r] * tau);
        cxd xp = x;
        for (int p = 0; p < r2; ++p) {
            V(r, p) = xp;  // power p+1
            xp *= x;
        }
        b(r) = r < r1 ? 0.0 : 1.0;
    }
    Vector sigma = V.fullPivLu().solve(b);
    double maxabs = 0.0;
    for (int p = 0; p < r2; ++p) maxabs = std::max(maxabs, std::abs(sigma(p)));
    if (maxabs == 0.0) maxabs = 1.0;
    sigma /= maxabs;

    out.sigma.assign(sigma.data(), sigma.data() + r2);
    out.K5 = std::numeric_limits<double>::infinity();
    for (int r = 0; r < r2; ++r) {
        cxd acc(0.0);
        const cxd x = std::polar(1.0, mu[r] * tau);
        cxd xp = x;
        for (int p = 0; p < r2; ++p) {
            acc += sigma(p) * xp;
            xp *= x;
        }
        if (r < r1)
            out.zero_residual = std::max(out.zero_residual, std::abs(acc));
        else
            out.K5 = std::min(out.K5, std::abs(acc));
    }
    if (r1 == r2) out.K5 = 1.0;  // no high cluster to floor
    return out;
}

WeakObservabilityFit certify_weak_observability(const ModelSystem& model, double eps,
                                                int trials, CounterRng& rng,
                                                double C1_override) {
    WeakObservabilityFit fit;
    fit.eps = eps;
    fit.trials = trials;
    const Matrix G4 = model.gramian(0.0, model.T / 4.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(G4);
    const double lmax = es.eigenvalues().maxCoeff();
    fit.C1 = C1_override > 0.0 ? C1_override : 2.0 / lmax;

    const int d = model.dimension();
    auto needed_C2 = [&](const Vector& phi) {
        const double lhs = phi.squaredNorm() - fit.C1 * (phi.adjoint() * G4 * phi)(0).real();
        if (lhs <= 0.0) return 0.0;
        const double hneg = hp_norm(model, phi, -eps);
        return lhs / (hneg * hneg);
    };
    double c2 = 0.0;
    for (int n = 0; n < d; ++n) c2 = std::max(c2, needed_C2(model.eigenvectors.col(n)));
    for (int t = 0; t < trials; ++t) {
        Vector phi(d);
        for (int i = 0; i < d; ++i) phi(i) = rng.next_complex_gaussian();
        c2 = std::max(c2, needed_C2(phi));
    }
    fit.C2 = 1.1 * c2;

    // report the residual violation with the inflated pair (expected <= 0)
    double worst = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < d; ++n) {
        const Vector phi = model.eigenvectors.col(n);
        const double lhs = phi.squaredNorm() - fit.C1 * (phi.adjoint() * G4 * phi)(0).real();
        const double h = hp_norm(model, phi, -eps);
        worst = std::max(worst, lhs - fit.C2 * h * h);
    }
    fit.worst_violation = worst;
    return fit;
}

AssemblyReport assemble_constant(const ModelSystem& model, double eps, double C1,
                                 double C2) {
    AssemblyReport rep;
    rep.eps = eps;
    rep.C1 = C1;
    rep.C2 = C2;
    rep.K_gramian = model.gramian_constant();
    const double T = model.T;
    const int d = model.dimension();
    const double lambda_top = model.eigenvalues(d - 1);

    rep.N = std::pow(2.0 * C2, 1.0 / eps);
    if (rep.N >= lambda_top) {
        rep.note = "N exceeds the truncated spectrum; weak inequality too lossy";
        return rep;
    }

    const double anorm = model.A.operatorNorm();
    const PlateauWindow eta(T / 4.0, T / 2.0, 3.0 * T / 4.0, 15.0 * T / 16.0);
    const double eta_d4 = eta.d4_l1();

    // Candidate thresholds M: midpoints between distinct eigenvalues above N,
    // plus one past the spectrum (empty tail, K4 = 0).
    std::vector<double> candidates;
    for (int n = 0; n < d - 1; ++n) {
        const double mid = 0.5 * (model.eigenvalues(n) + model.eigenvalues(n + 1));
        if (mid > rep.N && model.eigenvalues(n + 1) - model.eigenvalues(n) > 1e-9)
            candidates.push_back(mid);
    }
    candidates.push_back(lambda_top + 1.0);

    for (const double Mcand : candidates) {
        const ClusterDecomposition clusters = cluster_spectrum(model, rep.N, Mcand);
        if (clusters.r1 == 0) continue;  // nothing below N; chain trivial elsewhere
        rep.M = Mcand;
        rep.r1 = clusters.r1;
        rep.r2 = clusters.r2;

        // K2: per-cluster stationary constants C(lambda) = 1/sigma_min(A Phi_l).
        double K2 = 0.0;
        for (int r = 0; r < clusters.r1; ++r) {
            Matrix block(d, static_cast<int>(clusters.members[r].size()));
            for (size_t c = 0; c < clusters.members[r].size(); ++c)
                block.col(static_cast<int>(c)) =
                    model.eigenvectors.col(clusters.members[r][c]);
            const Matrix Ab = model.A * block;
            Eigen::JacobiSVD<Matrix> svd(Ab);
            const double smin = svd.singularValues().minCoeff();
            if (smin <= 0.0) {
                K2 = 0.0;
                break;
            }
            K2 = std::max(K2, 1.0 / smin);
        }
        if (K2 == 0.0) {
            rep.note = "unobservable low cluster (sigma_min = 0)";
            continue;
        }
        rep.K2 = K2;

        std::vector<double> mu_low(clusters.mu.begin(), clusters.mu.begin() + clusters.r1);
        rep.K3 = exp_gram_min(mu_low, T);

        std::vector<double> mu_all(clusters.mu.begin(), clusters.mu.begin() + clusters.r2);
        const VandermondeSigma vs = vandermonde_sigma(mu_all, clusters.r1, T);
        rep.K5 = vs.K5;
        rep.tau = vs.tau;
        if (!(rep.K5 > 0.0)) continue;

        // Cross-term tail: 2 ||A||^2 sum_{l_n <= N} sum_{l_m > M} |hat eta(l_n - l_m)|.
        double cross = 0.0;
        for (int n = 0; n < d; ++n) {
            if (model.eigenvalues(n) > rep.N) continue;
            for (int m = 0; m < d; ++m) {
                if (model.eigenvalues(m) <= Mcand) continue;
                const double gap = std::abs(model.eigenvalues(m) - model.eigenvalues(n));
                const double bound = std::min(15.0 * T / 16.0 - T / 4.0,
                                              eta_d4 / std::pow(gap, 4));
                cross += 2.0 * anorm * anorm * bound;
            }
        }
        rep.K4 = cross * Mcand;

        const double m_const = std::min(1.0 / (2.0 * C1), rep.K3 / (K2 * K2));
        rep.tail = cross / m_const;
        if (rep.tail > 0.5) continue;  // M not large enough; try the next candidate

        rep.beta = rep.r2 * std::sqrt(2.0 * C1) / rep.K5;
        const double denom =
            std::pow(1.0 + std::sqrt(T) * anorm * rep.beta, 2) / m_const +
            rep.beta * rep.beta;
        rep.K6 = 1.0 / std::sqrt(denom);
        rep.K_assembled = denom / (1.0 - rep.tail);
        rep.success = true;
        return rep;
    }
    if (rep.note.empty()) rep.note = "no admissible M threshold";
    return rep;
}

EliminationCheck verify_elimination(const ModelSystem& model, double K, int trials,
                                    CounterRng& rng) {
    if (!(K > 0.0)) throw std::invalid_argument("verify_elimination: K > 0");
    EliminationCheck out;
    out.K = K;
    const Matrix G = model.gramian(0.0, model.T);
    auto ratio = [&](const Vector& phi) {
        const double obs = (phi.adjoint() * G * phi)(0).real();
        return obs > 0.0 ? phi.squaredNorm() / obs : std::numeric_limits<double>::infinity();
    };
    const int d = model.dimension();
    for (int n = 0; n < d; ++n) {
        out.worst_ratio = std::max(out.worst_ratio, ratio(model.eigenvectors.col(n)));
        ++out.tested;
    }
    for (int t = 0; t < trials; ++t) {
        Vector phi(d);
        for (int i = 0; i < d; ++i) phi(i) = rng.next_complex_gaussian();
        out.worst_ratio = std::max(out.worst_ratio, ratio(phi));
        ++out.tested;
    }
    out.pass = out.worst_ratio <= K * (1.0 + 1e-8);
    return out;
}

}  // namespace toruslab
