#include "toruslab/spectral1d.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

EigenSystem eigendecompose(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

FloquetOperator1D::FloquetOperator1D(double k, std::map<int, cxd> potential_coeffs,
                                     int cutoff)
    : k_(k), N_(cutoff), potential_(std::move(potential_coeffs)) {
    if (k_ < 0.0 || k_ >= 1.0)
        throw std::invalid_argument("FloquetOperator1D: k must lie in [0,1)");
    if (N_ < 0) throw std::invalid_argument("FloquetOperator1D: cutoff >= 0");
    for (const auto& [m, w] : potential_) {
        const auto it = potential_.find(-m);
        const cxd wneg = it == potential_.end() ? cxd(0.0) : it->second;
        if (std::abs(std::conj(w) - wneg) > 1e-12 * std::max(1.0, std::abs(w)))
            throw std::invalid_argument("FloquetOperator1D: potential is not real");
    }
    const int d = dimension();
    H_ = Matrix::Zero(d, d);
    for (int n = -N_; n <= N_; ++n) {
        H_(index(n), index(n)) = (n + k_) * (n + k_);
        for (int m = -N_; m <= N_; ++m) {
            const auto it = potential_.find(n - m);
            if (it != potential_.end()) H_(index(n), index(m)) += it->second;
        }
    }
}

const EigenSystem& FloquetOperator1D::eigen() const {
    if (!eigen_ready_) {
        eigen_ = eigendecompose(H_);
        eigen_ready_ = true;
    }
    return eigen_;
}

double FloquetOperator1D::potential_l2() const {
    double s = 0.0;
    for (const auto& [m, w] : potential_) s += std::norm(w);
    return std::sqrt(kTwoPi * s);
}

FloquetOperator1D build_floquet(double k, const std::map<int, cxd>& potential_coeffs,
                                int cutoff) {
    return FloquetOperator1D(k, potential_coeffs, cutoff);
}

Vector propagate_floquet(const FloquetOperator1D& op, const Vector& v0, double t) {
    if (v0.size() != op.dimension())
        throw std::invalid_argument("propagate_floquet: dimension mismatch");
    const EigenSystem& es = op.eigen();
    Vector w = es.eigenvectors.adjoint() * v0;
    for (int a = 0; a < es.dimension(); ++a) w(a) *= std::polar(1.0, -t * es.eigenvalues(a));
    return es.eigenvectors * w;
}

DispersiveIdentity free_dispersive_identity(const std::map<int, cxd>& coeffs, double k) {
    DispersiveIdentity out;
    double sum_sq = 0.0;
    int max_abs_n = 0;
    for (const auto& [n, c] : coeffs) {
        sum_sq += std::norm(c);
        max_abs_n = std::max(max_abs_n, std::abs(n));
    }
    out.parseval_bound = 4.0 * kTwoPi * sum_sq;

    // Resonant pairs: (n+k)^2 = (m+k)^2, i.e. m = n or m = -n-2k (2k integer).
    const double two_k = 2.0 * k;
    const bool half_integer = std::abs(two_k - std::round(two_k)) < 1e-12;
    const int shift = static_cast<int>(std::round(two_k));

    auto lhs_at = [&](double x) {
        cxd acc(0.0);
        for (const auto& [n, cn] : coeffs) {
            acc += std::norm(cn);  // diagonal pairs
            if (half_integer) {
                const int m = -n - shift;
                if (m != n) {
                    const auto it = coeffs.find(m);
                    if (it != coeffs.end())
                        acc += cn * std::conj(it->second) * std::polar(1.0, (n - m) * x);
                }
            }
        }
        return kTwoPi * acc.real();
    };

    auto rhs_at = [&](double x) {
        // Group coefficients into classes by the representative value of
        // +-(m+k) = n+k; each class has at most two members.
        double acc = 0.0;
        for (const auto& [n, cn] : coeffs) {
            cxd cls = cn * std::polar(1.0, n * x);
            bool counted_twice = false;
            if (half_integer) {
                const int m = -n - shift;
                if (m == n) {
                    // self-paired mode; class is a singleton
                } else {
                    if (m > n) {
                        const auto it = coeffs.find(m);
                        if (it != coeffs.end())
                            cls += it->second * std::polar(1.0, m * x);
                    } else {
                        // already counted when iterating over the partner
                        counted_twice = coeffs.count(m) > 0;
                    }
                }
            }
            if (!counted_twice) acc += std::norm(cls);
        }
        return kTwoPi * acc;
    };

    auto sup_over_grid = [&](const auto& f, int points) {
        double m = 0.0;
        for (int j = 0; j < points; ++j) m = std::max(m, f(kTwoPi * j / points));
        return m;
    };

    const int base = std::max(8 * max_abs_n, 64);
    const double lhs1 = sup_over_grid(lhs_at, base);
    const double lhs2 = sup_over_grid(lhs_at, 2 * base);
    const double rhs1 = sup_over_grid(rhs_at, base);
    const double rhs2 = sup_over_grid(rhs_at, 2 * base);
    out.lhs = std::max(lhs1, lhs2);
    out.rhs = std::max(rhs1, rhs2);
    out.sup_refinement_delta = std::max(std::abs(lhs2 - lhs1), std::abs(rhs2 - rhs1));
    return out;
}

double dispersive_mixed_norm(const FloquetOperator1D& op, const Vector& v0, double T,
                             int x_samples, int t_samples) {
    const EigenSystem& es = op.eigen();
    const int N = op.cutoff();
    Vector w0 = es.eigenvectors.adjoint() * v0;

    // Accumulate int_0^T |u(t,x)|^2 dt per x node (trapezoid in t).
    std::vector<double> power(x_samples, 0.0);
    Vector modes(op.dimension());
    for (int s = 0; s <= t_samples; ++s) {
        const double t = T * s / t_samples;
        Vector w = w0;
        for (int a = 0; a < es.dimension(); ++a)
            w(a) *= std::polar(1.0, -t * es.eigenvalues(a));
        modes = es.eigenvectors * w;
        const double wt = (s == 0 || s == t_samples) ? 0.5 : 1.0;
        for (int j = 0; j < x_samples; ++j) {
            const double x = kTwoPi * j / x_samples;
            cxd u(0.0);
            for (int n = -N; n <= N; ++n)
                u += modes(op.index(n)) * std::polar(1.0, n * x);
            power[j] += wt * std::norm(u);
        }
    }
    const double dt = T / t_samples;
    double best = 0.0;
    for (double p : power) best = std::max(best, p * dt);
    // the basis carries 1/sqrt(2 pi)
    return std::sqrt(best / kTwoPi);
}

Matrix region_matrix_1d(const Region1D& omega, int cutoff, int M) {
    if (omega.empty()) throw std::invalid_argument("region_matrix_1d: empty region");
    if (M < 2 * cutoff + 1)
        throw std::invalid_argument("region_matrix_1d: M < 2N+1 aliases mode products");
    const int d = 2 * cutoff + 1;
    // Toeplitz in the mode difference.
    std::vector<cxd> diag(4 * cutoff + 1, cxd(0.0));
    for (int j = 0; j < M; ++j) {
        const double x = kTwoPi * j / M;
        if (!omega.contains(x)) continue;
        for (int dm = -2 * cutoff; dm <= 2 * cutoff; ++dm)
            diag[dm + 2 * cutoff] += std::polar(1.0, dm * x);
    }
    Matrix out(d, d);
    for (int n = -cutoff; n <= cutoff; ++n)
        for (int m = -cutoff; m <= cutoff; ++m)
            out(n + cutoff, m + cutoff) = diag[(m - n) + 2 * cutoff] / double(M);
    return out;
}

namespace {

GramianReport summarize_gramian(const Matrix& G, double T, int cutoff,
                                const std::string& region_label) {
    GramianReport rep;
    rep.dimension = static_cast<int>(G.rows());
    rep.T = T;
    rep.cutoff = cutoff;
    rep.region = region_label;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.lambda_max = es.eigenvalues().maxCoeff();
    rep.numerical_failure = rep.lambda_min < -1e-10 * std::max(1.0, rep.lambda_max);
    rep.K = rep.lambda_min > 0.0 ? 1.0 / rep.lambda_min : 0.0;
    return rep;
}

}  // namespace

std::pair<Matrix, GramianReport> build_gramian_1d(const FloquetOperator1D& op,
                                                  const Region1D& omega, double T, int M) {
    if (omega.empty()) throw std::invalid_argument("build_gramian_1d: empty region");
    if (!(T > 0.0)) throw std::invalid_argument("build_gramian_1d: T > 0");
    const EigenSystem& es = op.eigen();
    const Matrix Momega = region_matrix_1d(omega, op.cutoff(), M);
    const Matrix R = es.eigenvectors.adjoint() * Momega * es.eigenvectors;
    const int d = op.dimension();
    Matrix G(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            G(a, b) = R(a, b) * phase_integral(es.eigenvalues(a) - es.eigenvalues(b), T);
    // back to mode coordinates, hermitized against roundoff
    G = (es.eigenvectors * G * es.eigenvectors.adjoint()).eval();
    G = ((G + Matrix(G.adjoint())) / 2.0).eval();
    return {G, summarize_gramian(G, T, op.cutoff(), "intervals")};
}

GramianReport observability_constant_1d(const FloquetOperator1D& op, const Region1D& omega,
                                        double T, int M) {
    return build_gramian_1d(op, omega, T, M).second;
}

StationaryCheck stationary_check_1d(const FloquetOperator1D& op, double tau,
                                    const Vector& g, const Region1D& omega, int M) {
    StationaryCheck out;
    const EigenSystem& es = op.eigen();
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < es.dimension(); ++a)
        dist = std::min(dist, std::abs(es.eigenvalues(a) - tau));
    out.eigenvalue_distance = dist;
    double tau_eff = tau;
    if (dist < 1e-8) {
        tau_eff += 1e-6;
        out.shifted = true;
    }
    out.tau = tau_eff;

    const int d = op.dimension();
    const Matrix A = op.matrix() - tau_eff * Matrix::Identity(d, d);
    const Vector u = A.partialPivLu().solve(g);
    out.solve_residual = (A * u - g).norm();

    const Matrix Momega = region_matrix_1d(omega, op.cutoff(), M);
    const double omega_norm = std::sqrt(std::max(0.0, (u.adjoint() * Momega * u)(0).real()));
    const double denom = std::pow(bracket(tau_eff), -0.5) * g.norm() + omega_norm;
    out.ratio = denom > 0.0 ? u.norm() / denom : 0.0;
    return out;
}

}  // namespace toruslab
