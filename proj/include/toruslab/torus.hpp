#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "toruslab/numerics.hpp"

namespace toruslab {

/// Dual-lattice point (n1, n2).
struct LatticePoint {
    int n1 = 0;
    int n2 = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
    friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
    LatticePoint operator-() const { return {-n1, -n2}; }
};

/// Rectangular torus R^2 / (A Z x B Z). Frequencies are physical,
/// frequency(n) = (2 pi n1 / A, 2 pi n2 / B), so e^{i frequency(n).z} is
/// periodic for every aspect ratio.
class TorusGeometry {
  public:
    TorusGeometry(double period_x, double period_y) : A_(period_x), B_(period_y) {
        if (!(A_ > 0.0) || !(B_ > 0.0))
            throw std::invalid_argument("TorusGeometry: periods must be positive");
    }

    double period_x() const { return A_; }
    double period_y() const { return B_; }
    double area() const { return A_ * B_; }

    std::array<double, 2> frequency(LatticePoint n) const {
        return {kTwoPi * n.n1 / A_, kTwoPi * n.n2 / B_};
    }

    /// |frequency(n)|^2; the dual-lattice weight.
    double weighted_norm_sq(LatticePoint n) const {
        const auto f = frequency(n);
        return f[0] * f[0] + f[1] * f[1];
    }

    friend bool operator==(const TorusGeometry&, const TorusGeometry&) = default;

  private:
    double A_, B_;
};

class GridFunction;

/// Finitely supported Fourier coefficients on the dual lattice, in the
/// orthonormal convention e_n(z) = e^{i frequency(n).z} / sqrt(AB).
/// Absent keys are zero; Parseval gives ||u||_{L^2}^2 = sum |c_n|^2.
class FourierField {
  public:
    using CoeffMap = std::map<LatticePoint, cxd>;

    explicit FourierField(TorusGeometry geometry, int cutoff = 0)
        : geom_(geometry), cutoff_(cutoff) {
        if (cutoff < 0) throw std::invalid_argument("FourierField: cutoff >= 0");
    }

    const TorusGeometry& geometry() const { return geom_; }
    int cutoff() const { return cutoff_; }
    const CoeffMap& coefficients() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }

    void set(LatticePoint n, cxd value) {
        if (std::abs(n.n1) > cutoff_ || std::abs(n.n2) > cutoff_)
            throw std::invalid_argument("FourierField::set: point outside cutoff box");
        if (value == cxd(0.0, 0.0))
            coeffs_.erase(n);
        else
            coeffs_[n] = value;
    }

    cxd at(LatticePoint n) const {
        const auto it = coeffs_.find(n);
        return it == coeffs_.end() ? cxd(0.0) : it->second;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [n, c] : coeffs_) s += std::norm(c);
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    /// Pointwise value sum_n c_n e_n(z).
    cxd evaluate(double x, double y) const {
        cxd acc(0.0);
        for (const auto& [n, c] : coeffs_) {
            const auto f = geom_.frequency(n);
            acc += c * std::polar(1.0, f[0] * x + f[1] * y);
        }
        return acc / std::sqrt(geom_.area());
    }

    FourierField& operator*=(cxd s) {
        for (auto& [n, c] : coeffs_) c *= s;
        return *this;
    }
    FourierField& operator+=(const FourierField& other);
    friend FourierField operator-(FourierField a, const FourierField& b) {
        FourierField nb = b;
        nb *= -1.0;
        a += nb;
        return a;
    }

    /// True when coefficients satisfy c(-n) = conj(c(n)) within tol (real field).
    bool hermitian_symmetric(double tol = 1e-12) const {
        for (const auto& [n, c] : coeffs_)
            if (std::abs(std::conj(c) - at(-n)) > tol) return false;
        return true;
    }

  private:
    TorusGeometry geom_;
    int cutoff_;
    CoeffMap coeffs_;
};

/// Samples on the M x M uniform grid z_{jk} = (j A / M, k B / M), row-major in j.
class GridFunction {
  public:
    GridFunction(TorusGeometry geometry, int samples_per_axis)
        : geom_(geometry), M_(samples_per_axis),
          values_(static_cast<size_t>(M_) * M_, cxd(0.0)) {
        if (M_ < 1) throw std::invalid_argument("GridFunction: M >= 1");
    }

    const TorusGeometry& geometry() const { return geom_; }
    int samples_per_axis() const { return M_; }
    cxd& at(int j, int k) { return values_[static_cast<size_t>(j) * M_ + k]; }
    cxd at(int j, int k) const { return values_[static_cast<size_t>(j) * M_ + k]; }
    const std::vector<cxd>& values() const { return values_; }
    std::vector<cxd>& values() { return values_; }

    std::array<double, 2> point(int j, int k) const {
        return {j * geom_.period_x() / M_, k * geom_.period_y() / M_};
    }

    /// Rectangle-rule value of int |u|^p (p = 2 here): (AB/M^2) sum |u|^2.
    double quadrature_norm_sq() const {
        double s = 0.0;
        for (const cxd& v : values_) s += std::norm(v);
        return s * geom_.area() / (static_cast<double>(M_) * M_);
    }

  private:
    TorusGeometry geom_;
    int M_;
    std::vector<cxd> values_;
};

/// Union of half-open axis rectangles [x0,x1) x [y0,y1) inside one
/// fundamental domain; overlaps are allowed and counted once.
class ObservationRegion {
  public:
    struct Rect {
        double x0, x1, y0, y1;
    };

    ObservationRegion() = default;
    explicit ObservationRegion(std::vector<Rect> rects) : rects_(std::move(rects)) {
        for (const auto& r : rects_)
            if (!(r.x1 > r.x0) || !(r.y1 > r.y0))
                throw std::invalid_argument("ObservationRegion: rectangles need positive area");
    }

    static ObservationRegion full(const TorusGeometry& g) {
        return ObservationRegion({{0.0, g.period_x(), 0.0, g.period_y()}});
    }

    bool empty() const { return rects_.empty(); }
    const std::vector<Rect>& rectangles() const { return rects_; }

    bool contains(double x, double y) const {
        for (const auto& r : rects_)
            if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) return true;
        return false;
    }

  private:
    std::vector<Rect> rects_;
};

// --- torus-core operations ---

/// Exact inverse transform onto the M x M grid. Pre: M >= 2 cutoff + 1 so the
/// field is alias-free on the grid.
GridFunction synthesize_grid(const FourierField& field, int M);

/// Rectangle-rule forward transform back to a cutoff box. Exact (to roundoff)
/// when the grid holds an alias-free synthesis of a degree <= (M-1)/2 field.
FourierField analyze_grid(const GridFunction& grid, int cutoff);

/// Quadrature L^p norm for p in {2, 4/3, 4, inf}. Exact rectangle rule for
/// p in {2, 4}; for p = 4/3 the integrand is not polynomial and `oversample`
/// (>= 4) fixes the grid at M = oversample*(2N+1)+1. p = inf is the max of
/// |u| over the same grid.
double lp_norm(const FourierField& field, double p, int oversample = 4);

/// Pointwise product 1_Omega u on the M-grid together with the quadrature
/// L^2(Omega) norm.
std::pair<GridFunction, double> restrict_to_region(const FourierField& field,
                                                   const ObservationRegion& region,
                                                   int M);

}  // namespace toruslab
