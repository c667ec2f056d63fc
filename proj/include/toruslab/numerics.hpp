#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

namespace toruslab {

using cxd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Oscillatory window integral  iota(d, T) = \int_0^T e^{i d t} dt.
/// Closed form (e^{idT} - 1)/(id) degenerates as d -> 0; below |d|T < 1e-4
/// the Taylor series in (dT) is used instead.
inline cxd phase_integral(double d, double T) {
    const double x = d * T;
    if (std::abs(x) < 1e-4) {
        // T * (1 + ix/2 - x^2/6 - i x^3/24 + x^4/120)
        const cxd ix(0.0, x);
        return T * (1.0 + ix / 2.0 - x * x / 6.0 - ix * (x * x) / 24.0 +
                    x * x * x * x / 120.0);
    }
    const cxd num = std::polar(1.0, x) - 1.0;
    return num / cxd(0.0, d);
}

/// \int_{t0}^{t1} e^{i d t} dt.
inline cxd phase_integral(double d, double t0, double t1) {
    return std::polar(1.0, d * t0) * phase_integral(d, t1 - t0);
}

/// Nodes and weights of n-point Gauss-Legendre on [-1, 1], n <= 5.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
    switch (n) {
        case 1: return {{0.0}, {2.0}};
        case 2: {
            const double a = 1.0 / std::sqrt(3.0);
            return {{-a, a}, {1.0, 1.0}};
        }
        case 3: {
            const double a = std::sqrt(3.0 / 5.0);
            return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
        }
        case 4: {
            const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
            const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
            return {{-b, -a, a, b}, {wb, wa, wa, wb}};
        }
        case 5: {
            const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
        }
        default: throw std::invalid_argument("gauss_legendre: order must be 1..5");
    }
}

/// Composite Gauss-Legendre nodes over [0, T]: `panels` panels of `points`
/// nodes each. Returns (node, weight) pairs.
inline std::vector<std::pair<double, double>> composite_gauss(double T, int panels,
                                                              int points) {
    if (panels < 1) throw std::invalid_argument("composite_gauss: panels >= 1");
    const GaussRule rule = gauss_legendre(points);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(panels) * rule.nodes.size());
    const double h = T / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (size_t i = 0; i < rule.nodes.size(); ++i)
            out.emplace_back(mid + 0.5 * h * rule.nodes[i], 0.5 * h * rule.weights[i]);
    }
    return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope: need >= 2 matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// C^2 cutoff profile on the line. Smooth: 1 on [-1/2,1/2], quintic decay
/// to 0 outside (-1,1). SharpOpen: indicator of |x| < 1. SharpClosed:
/// indicator of |x| <= 1.
class ChiProfile {
  public:
    enum class Kind { Smooth, SharpOpen, SharpClosed };

    explicit ChiProfile(Kind kind = Kind::Smooth) : kind_(kind) {}
    static ChiProfile smooth() { return ChiProfile(Kind::Smooth); }
    static ChiProfile sharp_open() { return ChiProfile(Kind::SharpOpen); }
    static ChiProfile sharp_closed() { return ChiProfile(Kind::SharpClosed); }

    Kind kind() const { return kind_; }
    bool sharp() const { return kind_ != Kind::Smooth; }

    double operator()(double x) const {
        const double a = std::abs(x);
        switch (kind_) {
            case Kind::SharpOpen: return a < 1.0 ? 1.0 : 0.0;
            case Kind::SharpClosed: return a <= 1.0 ? 1.0 : 0.0;
            case Kind::Smooth: break;
        }
        if (a <= 0.5) return 1.0;
        if (a >= 1.0) return 0.0;
        const double s = 2.0 * a - 1.0;  // in (0,1)
        const double smoothstep = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
        return 1.0 - smoothstep;
    }

    std::string_view name() const {
        switch (kind_) {
            case Kind::Smooth: return "smooth";
            case Kind::SharpOpen: return "sharp_open";
            case Kind::SharpClosed: return "sharp_closed";
        }
        return "?";
    }

  private:
    Kind kind_;
};

/// C^3 plateau window: 0 outside (t_lo, t_hi), 1 on [p_lo, p_hi], septic
/// smoothstep edges. eval_d4 gives the (piecewise) fourth derivative used
/// for Fourier decay bounds.
class PlateauWindow {
  public:
    PlateauWindow(double t_lo, double p_lo, double p_hi, double t_hi)
        : t_lo_(t_lo), p_lo_(p_lo), p_hi_(p_hi), t_hi_(t_hi) {
        if (!(t_lo < p_lo && p_lo < p_hi && p_hi < t_hi))
            throw std::invalid_argument("PlateauWindow: need t_lo < p_lo < p_hi < t_hi");
    }

    double operator()(double t) const {
        if (t <= t_lo_ || t >= t_hi_) return 0.0;
        if (t >= p_lo_ && t <= p_hi_) return 1.0;
        if (t < p_lo_) return step((t - t_lo_) / (p_lo_ - t_lo_));
        return step((t_hi_ - t) / (t_hi_ - p_hi_));
    }

    /// L1 norm of the 4th derivative (numerical, fine midpoint rule).
    double d4_l1() const {
        auto leg = [](double w) {
            // int_0^1 |s''''(u)| du / w^3 for the septic smoothstep edge of width w.
            const int n = 20000;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u = (i + 0.5) / n;
                acc += std::abs(step_d4(u)) / n;
            }
            return acc / (w * w * w);
        };
        return leg(p_lo_ - t_lo_) + leg(t_hi_ - p_hi_);
    }

    /// |hat eta(d)| <= min(measure, d4_l1 / d^4)  with hat eta(d) = int eta e^{-idt}.
    double fourier_bound(double d) const {
        const double mass = (t_hi_ - t_lo_);
        if (d == 0.0) return mass;
        return std::min(mass, d4_l1() / std::pow(std::abs(d), 4));
    }

  private:
    static double step(double u) {
        // Septic smoothstep: C^3, s(0)=0, s(1)=1.
        const double u4 = u * u * u * u;
        return u4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
    }
    static double step_d4(double u) {
        return 840.0 + u * (-10080.0 + u * (25200.0 - 16800.0 * u));
    }

    double t_lo_, p_lo_, p_hi_, t_hi_;
};

/// FNV-1a over bytes; used for config hashes and derived seeds.
inline uint64_t fnv1a(std::string_view bytes, uint64_t seed = 1469598103934665603ull) {
    uint64_t h = seed;
    for (const char c : bytes) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

/// Run body(i) for i in [0, n) over `threads` workers (block partition,
/// deterministic assignment). threads <= 1 runs inline.
inline void parallel_for(int64_t n, int threads, const std::function<void(int64_t)>& body) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int64_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace toruslab
