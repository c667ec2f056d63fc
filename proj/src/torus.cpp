#include "toruslab/torus.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

FourierField& FourierField::operator+=(const FourierField& other) {
    if (!(geom_ == other.geom_))
        throw std::invalid_argument("FourierField::operator+=: geometry mismatch");
    cutoff_ = std::max(cutoff_, other.cutoff_);
    for (const auto& [n, c] : other.coeffs_) {
        const cxd v = at(n) + c;
        if (v == cxd(0.0))
            coeffs_.erase(n);
        else
            coeffs_[n] = v;
    }
    return *this;
}

namespace {

// Separable evaluation: bucket coefficients by n2, sweep the x phase per
// bucket, then the y phase once per distinct n2. Cost O(|supp| M + M^2 D2)
// with D2 the number of distinct n2 values.
void synthesize_into(const FourierField& field, GridFunction& grid) {
    const int M = grid.samples_per_axis();
    const auto& geom = field.geometry();
    std::map<int, std::vector<std::pair<int, cxd>>> rows;  // n2 -> [(n1, c)]
    for (const auto& [n, c] : field.coefficients()) rows[n.n2].push_back({n.n1, c});

    const double inv_sqrt_area = 1.0 / std::sqrt(geom.area());
    std::vector<cxd> partial(M);  // per n2: sum over n1 of c e^{2 pi i n1 j / M}
    for (const auto& [n2, row] : rows) {
        std::fill(partial.begin(), partial.end(), cxd(0.0));
        for (const auto& [n1, c] : row) {
            const cxd step = std::polar(1.0, kTwoPi * n1 / M);
            cxd phase(1.0);
            for (int j = 0; j < M; ++j) {
                partial[j] += c * phase;
                phase *= step;
            }
        }
        const cxd step_y = std::polar(1.0, kTwoPi * n2 / M);
        for (int j = 0; j < M; ++j) {
            const cxd base = partial[j] * inv_sqrt_area;
            cxd phase(1.0);
            for (int k = 0; k < M; ++k) {
                grid.at(j, k) += base * phase;
                phase *= step_y;
            }
        }
    }
}

}  // namespace

GridFunction synthesize_grid(const FourierField& field, int M) {
    if (M < 2 * field.cutoff() + 1)
        throw std::invalid_argument("synthesize_grid: M < 2N+1 aliases the field");
    GridFunction grid(field.geometry(), M);
    synthesize_into(field, grid);
    return grid;
}

FourierField analyze_grid(const GridFunction& grid, int cutoff) {
    const int M = grid.samples_per_axis();
    if (M < 2 * cutoff + 1)
        throw std::invalid_argument("analyze_grid: M < 2N+1 aliases the box");
    const auto& geom = grid.geometry();
    FourierField out(geom, cutoff);

    // c_n = (AB/M^2) sum_z u(z) conj(e_n(z)); separable in the two axes.
    const int D = 2 * cutoff + 1;
    std::vector<cxd> partial(static_cast<size_t>(M) * D);  // (j, n2) sums over k
    for (int j = 0; j < M; ++j) {
        for (int dn2 = 0; dn2 < D; ++dn2) {
            const int n2 = dn2 - cutoff;
            const cxd step = std::polar(1.0, -kTwoPi * n2 / M);
            cxd phase(1.0);
            cxd acc(0.0);
            for (int k = 0; k < M; ++k) {
                acc += grid.at(j, k) * phase;
                phase *= step;
            }
            partial[static_cast<size_t>(j) * D + dn2] = acc;
        }
    }
    const double scale = std::sqrt(geom.area()) / (static_cast<double>(M) * M);
    for (int dn1 = 0; dn1 < D; ++dn1) {
        const int n1 = dn1 - cutoff;
        const cxd step = std::polar(1.0, -kTwoPi * n1 / M);
        for (int dn2 = 0; dn2 < D; ++dn2) {
            cxd phase(1.0);
            cxd acc(0.0);
            for (int j = 0; j < M; ++j) {
                acc += partial[static_cast<size_t>(j) * D + dn2] * phase;
                phase *= step;
            }
            const cxd c = acc * scale;
            if (std::abs(c) > 0.0) out.set({n1, dn2 - cutoff}, c);
        }
    }
    return out;
}

double lp_norm(const FourierField& field, double p, int oversample) {
    const int N = field.cutoff();
    const bool is2 = p == 2.0;
    const bool is4 = p == 4.0;
    const bool is43 = std::abs(p - 4.0 / 3.0) < 1e-12;
    const bool isinf = std::isinf(p);
    if (!is2 && !is4 && !is43 && !isinf)
        throw std::invalid_argument("lp_norm: p must be 2, 4/3, 4 or inf");
    if (is43 && oversample < 4)
        throw std::invalid_argument("lp_norm: p=4/3 requires oversample >= 4");
    if (is4 && oversample < 2)
        throw std::invalid_argument("lp_norm: p=4 requires oversample >= 2 (M >= 4N+1)");

    int M = std::max(2, oversample) * (2 * N + 1) + 1;
    if (is4) M = std::max(M, 4 * N + 1);
    const GridFunction grid = synthesize_grid(field, M);

    if (isinf) {
        double m = 0.0;
        for (const cxd& v : grid.values()) m = std::max(m, std::abs(v));
        return m;
    }
    const double cell = field.geometry().area() / (static_cast<double>(M) * M);
    double acc = 0.0;
    for (const cxd& v : grid.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * cell, 1.0 / p);
}

std::pair<GridFunction, double> restrict_to_region(const FourierField& field,
                                                   const ObservationRegion& region,
                                                   int M) {
    if (region.empty())
        throw std::invalid_argument("restrict_to_region: empty region");
    GridFunction grid = synthesize_grid(field, M);
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k) {
            const auto z = grid.point(j, k);
            if (!region.contains(z[0], z[1])) grid.at(j, k) = cxd(0.0);
        }
    return {grid, std::sqrt(grid.quadrature_norm_sq())};
}

}  // namespace toruslab
