#include "toruslab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace toruslab {

Matrix region_matrix_2d(const TorusGeometry& geom, const ObservationRegion& region,
                        int cutoff, int M) {
    if (region.empty()) throw std::invalid_argument("region_matrix_2d: empty region");
    if (M < 4 * cutoff + 1)
        throw std::invalid_argument("region_matrix_2d: need M >= 4N+1");
    const int N = cutoff;
    const int D = 4 * N + 1;  // difference range per axis

    // T(d) = (1/M^2) sum_{grid in Omega} e^{2 pi i (d1 j + d2 k)/M}, separable
    // per column of the indicator.
    std::vector<cxd> diff(static_cast<size_t>(D) * D, cxd(0.0));
    std::vector<cxd> col(D);
    for (int j = 0; j < M; ++j) {
        const double x = j * geom.period_x() / M;
        std::fill(col.begin(), col.end(), cxd(0.0));
        bool any = false;
        for (int k = 0; k < M; ++k) {
            const double y = k * geom.period_y() / M;
            if (!region.contains(x, y)) continue;
            any = true;
            const cxd step = std::polar(1.0, kTwoPi * 1.0 * k / M);
            // accumulate e^{2 pi i d2 k / M} for all d2 at once
            cxd phase = std::polar(1.0, -kTwoPi * double(2 * N) * k / M);
            for (int d2 = -2 * N; d2 <= 2 * N; ++d2) {
                col[d2 + 2 * N] += phase;
                phase *= step;
            }
        }
        if (!any) continue;
        for (int d1 = -2 * N; d1 <= 2 * N; ++d1) {
            const cxd rowphase = std::polar(1.0, kTwoPi * double(d1) * j / M);
            cxd* out = &diff[static_cast<size_t>(d1 + 2 * N) * D];
            for (int i = 0; i < D; ++i) out[i] += rowphase * col[i];
        }
    }
    const double inv = 1.0 / (static_cast<double>(M) * M);

    const int d = (2 * N + 1) * (2 * N + 1);
    Matrix out(d, d);
    auto point_of = [N](int idx) {
        const int w = 2 * N + 1;
        return LatticePoint{idx / w - N, idx % w - N};
    };
    for (int a = 0; a < d; ++a) {
        const LatticePoint na = point_of(a);
        for (int b = 0; b < d; ++b) {
            const LatticePoint nb = point_of(b);
            const int d1 = nb.n1 - na.n1, d2 = nb.n2 - na.n2;
            out(a, b) = diff[static_cast<size_t>(d1 + 2 * N) * D + (d2 + 2 * N)] * inv;
        }
    }
    return out;
}

namespace {

GramianReport summarize(const Matrix& G, double T, int cutoff, const std::string& label) {
    GramianReport rep;
    rep.dimension = static_cast<int>(G.rows());
    rep.T = T;
    rep.cutoff = cutoff;
    rep.region = label;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.lambda_max = es.eigenvalues().maxCoeff();
    rep.numerical_failure = rep.lambda_min < -1e-10 * std::max(1.0, rep.lambda_max);
    rep.K = rep.lambda_min > 0.0 ? 1.0 / rep.lambda_min : 0.0;
    return rep;
}

// Gramian with rows/columns indexed by the eigenvectors of H.
Matrix gramian_eigen_basis(const Hamiltonian2D& H, const Matrix& Momega, double T) {
    const EigenSystem& es = H.eigen();
    const Matrix R = es.eigenvectors.adjoint() * Momega * es.eigenvectors;
    const int d = H.dimension();
    Matrix G(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            G(a, b) = R(a, b) * phase_integral(es.eigenvalues(a) - es.eigenvalues(b), T);
    return ((G + Matrix(G.adjoint())) / 2.0).eval();
}

// Same operator on the Galerkin mode coordinates (what callers quadratic-form
// against and what the HUM normal equation is written in).
Matrix gramian_mode_basis(const Hamiltonian2D& H, const Matrix& Momega, double T) {
    const EigenSystem& es = H.eigen();
    Matrix G = es.eigenvectors * gramian_eigen_basis(H, Momega, T) *
               es.eigenvectors.adjoint();
    return ((G + Matrix(G.adjoint())) / 2.0).eval();
}

}  // namespace

std::pair<Matrix, GramianReport> build_gramian(const Hamiltonian2D& H,
                                               const ObservationRegion& region, double T,
                                               int M) {
    if (!(T > 0.0)) throw std::invalid_argument("build_gramian: T > 0");
    const Matrix Momega = region_matrix_2d(H.geometry(), region, H.cutoff(), M);
    Matrix G = gramian_mode_basis(H, Momega, T);
    return {G, summarize(G, T, H.cutoff(), "rectangles")};
}

double observed_energy_quadrature(const Hamiltonian2D& H, const ObservationRegion& region,
                                  double T, int M, const Vector& u, int steps) {
    const Matrix Momega = region_matrix_2d(H.geometry(), region, H.cutoff(), M);
    const EigenSystem& es = H.eigen();
    const Vector w0 = es.eigenvectors.adjoint() * u;
    double acc = 0.0;
    Vector w(w0.size()), modes(w0.size());
    for (int s = 0; s <= steps; ++s) {
        const double t = T * s / steps;
        for (int a = 0; a < es.dimension(); ++a)
            w(a) = w0(a) * std::polar(1.0, -t * es.eigenvalues(a));
        modes = es.eigenvectors * w;
        const double val = (modes.adjoint() * Momega * modes)(0).real();
        acc += (s == 0 || s == steps) ? 0.5 * val : val;
    }
    return acc * T / steps;
}

ObservabilitySequence observability_constant(const TorusGeometry& geom,
                                             const FourierField& V,
                                             const ObservationRegion& region, double T,
                                             const std::vector<int>& cutoffs) {
    if (cutoffs.empty() || !std::is_sorted(cutoffs.begin(), cutoffs.end()))
        throw std::invalid_argument("observability_constant: need ascending cutoffs");
    ObservabilitySequence seq;
    const int M = 4 * cutoffs.back() + 1;
    for (const int N : cutoffs) {
        const Hamiltonian2D H(geom, V, N);
        const Matrix Momega = region_matrix_2d(geom, region, N, M);
        const Matrix G = gramian_eigen_basis(H, Momega, T);  // spectrum only
        seq.reports.push_back(summarize(G, T, N, "rectangles"));
    }
    for (size_t i = 1; i < seq.reports.size(); ++i)
        if (seq.reports[i].K < seq.reports[i - 1].K * (1.0 - 1e-9)) seq.monotone = false;
    if (seq.reports.size() >= 2)
        seq.stabilization_ratio =
            seq.reports.back().K / seq.reports[seq.reports.size() - 2].K;
    return seq;
}

std::vector<ShellReport> shell_observability_scan(const Hamiltonian2D& H,
                                                  const std::vector<SpectralProjectorSpec>& specs,
                                                  const ObservationRegion& region, double T,
                                                  int M) {
    const Matrix Momega = region_matrix_2d(H.geometry(), region, H.cutoff(), M);
    const Matrix G = gramian_eigen_basis(H, Momega, T);  // shell selection is eigen-indexed
    std::vector<ShellReport> out;
    for (const auto& spec : specs) {
        ShellReport rep;
        rep.h = spec.h;
        rep.rho = spec.rho;
        const std::vector<double> w = projector_weights(H, spec);
        std::vector<int> keep;
        for (int a = 0; a < static_cast<int>(w.size()); ++a)
            if (w[a] > 0.5) keep.push_back(a);
        rep.shell_dimension = static_cast<int>(keep.size());
        if (keep.empty()) {
            rep.skipped = true;
            out.push_back(rep);
            continue;
        }
        Matrix Gs(keep.size(), keep.size());
        for (size_t i = 0; i < keep.size(); ++i)
            for (size_t j = 0; j < keep.size(); ++j) Gs(i, j) = G(keep[i], keep[j]);
        rep.gramian = summarize(Gs, T, H.cutoff(), "shell");
        out.push_back(rep);
    }
    return out;
}

namespace {

// x a + y b = gcd(a, b) for a, b >= 0
void extended_euclid(long a, long b, long& x, long& y) {
    if (b == 0) {
        x = 1;
        y = 0;
        return;
    }
    long x1, y1;
    extended_euclid(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
}

}  // namespace

DirectionFrame direction_frame(const TorusGeometry& geom, int p, int q) {
    if (std::gcd(std::abs(p), std::abs(q)) != 1)
        throw std::invalid_argument("direction_frame: (p,q) must be coprime");
    const double A = geom.period_x();
    const double B = geom.period_y();
    DirectionFrame f;
    f.p = p;
    f.q = q;
    f.b = std::hypot(p * A, q * B);
    f.Xi0 = {p * A / f.b, q * B / f.b};
    f.Xi0_perp = {-q * B / f.b, p * A / f.b};
    f.a = A * B / f.b;

    // s p - r q = 1 via extended Euclid, then shift (r,s) += t (p,q) to the
    // minimal |r| + |s| representative.
    long x, y;
    extended_euclid(std::abs(p), std::abs(q), x, y);
    if (p < 0) x = -x;
    if (q < 0) y = -y;  // now x p + y q = 1
    long s = x, r = -y;
    const double t0 = -(double(r) * p + double(s) * q) / (double(p) * p + double(q) * q);
    long best_r = r, best_s = s;
    for (long t = llround(t0) - 2; t <= llround(t0) + 2; ++t) {
        const long rr = r + t * p, ss = s + t * q;
        if (std::labs(rr) + std::labs(ss) < std::labs(best_r) + std::labs(best_s)) {
            best_r = rr;
            best_s = ss;
        }
    }
    f.bezout_r = static_cast<int>(best_r);
    f.bezout_s = static_cast<int>(best_s);
    f.gamma_shift = (double(f.bezout_r) * p * A * A + double(f.bezout_s) * q * B * B) / f.b;
    return f;
}

AveragedPotential averaged_potential(const FourierField& V, const DirectionFrame& frame,
                                     int quad) {
    AveragedPotential out;
    out.period = frame.a;
    const double inv_sqrt_area = 1.0 / std::sqrt(V.geometry().area());

    // Resonance extraction: mode kappa survives iff kappa . (p, q) = 0,
    // i.e. kappa = t (q, -p); its x-frequency is -2 pi t / a.
    int max_t = 0;
    for (const auto& [n, c] : V.coefficients()) {
        if (n.n1 * frame.p + n.n2 * frame.q != 0) continue;
        // n = t (q, -p): recover t from whichever component is nonzero
        const int t = frame.q != 0 ? n.n1 / frame.q : n.n2 / -frame.p;
        out.coeffs[-t] += c * inv_sqrt_area;
        max_t = std::max(max_t, std::abs(t));
    }

    // Quadrature cross-check: the y-integrand has frequencies 2 pi l / b with
    // |l| <= N (|p| + |q|); the midpoint rule is exact once quad exceeds that.
    const int min_quad = V.cutoff() * (std::abs(frame.p) + std::abs(frame.q)) + 2;
    const int Q = std::max(quad, min_quad);
    auto w_quad = [&](double x) {
        cxd acc(0.0);
        for (int j = 0; j < Q; ++j) {
            const double yy = (j + 0.5) * frame.b / Q;
            const double zx = x * frame.Xi0_perp[0] + yy * frame.Xi0[0];
            const double zy = x * frame.Xi0_perp[1] + yy * frame.Xi0[1];
            acc += V.evaluate(zx, zy);
        }
        return acc / double(Q);
    };
    auto w_formula = [&](double x) {
        cxd acc(0.0);
        for (const auto& [m, c] : out.coeffs) acc += c * std::polar(1.0, kTwoPi * m * x / frame.a);
        return acc;
    };
    for (int i = 0; i < 7; ++i) {
        const double x = frame.a * (0.137 + 0.119 * i);
        const cxd q1 = w_quad(x);
        out.quadrature_residual = std::max(out.quadrature_residual,
                                           std::abs(q1 - w_formula(x)));
        out.periodicity_residual = std::max(out.periodicity_residual,
                                            std::abs(w_quad(x + frame.a) - q1));
    }
    return out;
}

}  // namespace toruslab
