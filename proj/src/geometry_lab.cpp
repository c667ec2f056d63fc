#include "toruslab/geometry_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_map>

namespace toruslab {

SectorFamily::SectorFamily(double kappa, double h, Variant variant)
    : kappa_(kappa), h_(h), eps_(kappa * kappa * h * h), variant_(variant) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("SectorFamily: h in (0,1)");
    if (!(kappa > 0.0)) throw std::invalid_argument("SectorFamily: kappa > 0");
    angle_width_ = h_ * kappa_;
    n_sectors_ = static_cast<int>(std::floor(kPi / (2.0 * angle_width_)));
    if (variant_ == Variant::Radius) {
        r_lo_ = (1.0 - eps_) / h_;
        r_hi_ = (1.0 + eps_) / h_;
    } else {
        r_lo_ = std::sqrt(std::max(0.0, 1.0 - eps_)) / h_;
        r_hi_ = std::sqrt(1.0 + eps_) / h_;
    }
}

SectorFamily::SectorFamily(double kappa, double h, Variant v, double r_lo, double r_hi,
                           double angle_width)
    : kappa_(kappa), h_(h), eps_(kappa * kappa * h * h), variant_(v), r_lo_(r_lo),
      r_hi_(r_hi), angle_width_(angle_width) {
    n_sectors_ = static_cast<int>(std::floor(kPi / (2.0 * angle_width_)));
}

SectorFamily SectorFamily::rescaled(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("SectorFamily::rescaled: eps in (0,1)");
    const double se = std::sqrt(eps);
    // kappa h = sqrt(eps) and kappa^2 h^2 = eps by construction; the radius
    // window is the unit annulus | |z| - 1 | <= eps.
    return SectorFamily(1.0, se, Variant::Radius, 1.0 - eps, 1.0 + eps, se);
}

bool SectorFamily::contains(std::complex<double> z, int alpha) const {
    if (z.real() < 0.0 || z.imag() < 0.0) return false;
    const double r = std::abs(z);
    if (r < r_lo_ || r > r_hi_) return false;
    if (r == 0.0) return false;
    const double arg = std::atan2(z.imag(), z.real());
    return arg >= alpha * angle_width_ && arg < (alpha + 1) * angle_width_;
}

int SectorFamily::sector_of(std::complex<double> z) const {
    if (z.real() < 0.0 || z.imag() < 0.0) return -1;
    const double r = std::abs(z);
    if (r < r_lo_ || r > r_hi_ || r == 0.0) return -1;
    const double arg = std::atan2(z.imag(), z.real());
    const int alpha = static_cast<int>(std::floor(arg / angle_width_));
    return alpha <= n_sectors_ ? alpha : -1;
}

bool sector_membership(std::complex<double> z, const SectorFamily& family, int alpha) {
    return family.contains(z, alpha);
}

namespace {

using Cloud = std::vector<std::complex<double>>;

// Polar samples of sector alpha with covering radius <= cover.
Cloud sample_sector(const SectorFamily& family, int alpha, double cover) {
    const double spacing = cover * std::sqrt(2.0);
    const double r_lo = family.radius_lo(), r_hi = family.radius_hi();
    const double th_lo = alpha * family.angle_width();
    const double th_hi = std::min((alpha + 1) * family.angle_width(), kPi / 2.0);
    const int nr = std::max(2, static_cast<int>(std::ceil((r_hi - r_lo) / spacing)) + 1);
    const int nt =
        std::max(2, static_cast<int>(std::ceil((th_hi - th_lo) * r_hi / spacing)) + 1);
    Cloud out;
    out.reserve(static_cast<size_t>(nr) * nt);
    for (int i = 0; i < nr; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / (nr - 1);
        for (int j = 0; j < nt; ++j) {
            const double th = th_lo + (th_hi - th_lo) * j / (nt - 1);
            out.push_back(std::polar(r, th));
        }
    }
    return out;
}

struct CellKey {
    int64_t x, y;
    bool operator==(const CellKey&) const = default;
};
struct CellHash {
    size_t operator()(const CellKey& k) const {
        return std::hash<int64_t>()(k.x * 1000003ll ^ k.y);
    }
};

CellKey key_of(std::complex<double> z, double cell) {
    return {static_cast<int64_t>(std::floor(z.real() / cell)),
            static_cast<int64_t>(std::floor(z.imag() / cell))};
}

// Pairwise sums of two sector clouds, deduplicated on a cell/2 lattice
// (extra displacement <= cell * sqrt(2)/4, folded into the 4 grid_step margin).
Cloud sum_cloud(const Cloud& a, const Cloud& b, double cell) {
    std::unordered_map<CellKey, std::complex<double>, CellHash> snap;
    snap.reserve(a.size() * 4);
    const double half = cell / 2.0;
    for (const auto& za : a)
        for (const auto& zb : b) {
            const std::complex<double> s = za + zb;
            snap.emplace(key_of(s, half), s);
        }
    Cloud out;
    out.reserve(snap.size());
    for (const auto& [k, v] : snap) out.push_back(v);
    return out;
}

struct BBox {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    void add(std::complex<double> z) {
        xlo = std::min(xlo, z.real());
        xhi = std::max(xhi, z.real());
        ylo = std::min(ylo, z.imag());
        yhi = std::max(yhi, z.imag());
    }
    BBox operator+(const BBox& o) const {  // Minkowski sum
        return {xlo + o.xlo, xhi + o.xhi, ylo + o.ylo, yhi + o.yhi};
    }
    double distance(const BBox& o) const {
        const double dx = std::max({0.0, o.xlo - xhi, xlo - o.xhi});
        const double dy = std::max({0.0, o.ylo - yhi, ylo - o.yhi});
        return std::hypot(dx, dy);
    }
};

// Exact axis bounds of a first-quadrant polar cell.
BBox sector_bbox(const SectorFamily& family, int alpha) {
    const double th_lo = alpha * family.angle_width();
    const double th_hi = std::min((alpha + 1) * family.angle_width(), kPi / 2.0);
    const double r_lo = family.radius_lo(), r_hi = family.radius_hi();
    return {r_lo * std::cos(th_hi), r_hi * std::cos(th_lo), r_lo * std::sin(th_lo),
            r_hi * std::sin(th_hi)};
}

double min_distance(const Cloud& a, const Cloud& b, double radius) {
    // Grid hash on the larger cloud; exact min when it is <= radius.
    const Cloud& big = a.size() >= b.size() ? a : b;
    const Cloud& small = a.size() >= b.size() ? b : a;
    std::unordered_map<CellKey, std::vector<std::complex<double>>, CellHash> hash;
    hash.reserve(big.size());
    for (const auto& z : big) hash[key_of(z, radius)].push_back(z);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : small) {
        const CellKey k = key_of(z, radius);
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = hash.find({k.x + dx, k.y + dy});
                if (it == hash.end()) continue;
                for (const auto& w : it->second)
                    best = std::min(best, std::abs(z - w));
            }
        if (best == 0.0) break;
    }
    return best;
}

}  // namespace

SectorVerdict minkowski_disjointness(const SectorFamily& family, int a1, int a2, int a3,
                                     int a4, double grid_step) {
    if (!(grid_step > 0.0))
        throw std::invalid_argument("minkowski_disjointness: grid_step > 0");
    SectorVerdict v;
    v.grid_step = grid_step;

    // Interval prefilter: the Minkowski-sum boxes bound the true sum sets with
    // no sampling slack, so a positive box distance certifies disjointness
    // outright.
    const BBox sumbox1 = sector_bbox(family, a1) + sector_bbox(family, a2);
    const BBox sumbox2 = sector_bbox(family, a3) + sector_bbox(family, a4);
    const double exact_gap = sumbox1.distance(sumbox2);
    if (exact_gap > 0.0) {
        v.kind = SectorVerdict::Kind::Disjoint;
        v.min_distance = exact_gap;
        v.margin = exact_gap;
        return v;
    }

    const double cover = grid_step / 2.0;
    const Cloud s1 = sample_sector(family, a1, cover);
    const Cloud s2 = sample_sector(family, a2, cover);
    const Cloud s3 = sample_sector(family, a3, cover);
    const Cloud s4 = sample_sector(family, a4, cover);
    if ((s1.size() * s2.size() + s3.size() * s4.size()) > size_t(64) * 1000 * 1000) {
        v.kind = SectorVerdict::Kind::Unknown;  // sampling budget exceeded
        return v;
    }
    const Cloud sum1 = sum_cloud(s1, s2, grid_step);
    const Cloud sum2 = sum_cloud(s3, s4, grid_step);

    const double search = 8.0 * grid_step;
    const double m = min_distance(sum1, sum2, search);
    if (std::isinf(m)) {
        // no pair within the search radius: min distance exceeds it
        v.kind = SectorVerdict::Kind::Disjoint;
        v.min_distance = search;
        v.margin = search - 4.0 * grid_step;
        return v;
    }
    v.min_distance = m;
    v.margin = m - 4.0 * grid_step;
    if (m <= 1e-12) {
        v.kind = SectorVerdict::Kind::Intersect;
    } else if (v.margin > 0.0) {
        v.kind = SectorVerdict::Kind::Disjoint;
    } else {
        v.kind = SectorVerdict::Kind::Unknown;
    }
    return v;
}

LemmaGeomReport lemma_geom_bruteforce(double epsilon, const LemmaGeomOptions& options) {
    LemmaGeomReport rep;
    rep.epsilon = epsilon;
    rep.q_assumed = options.q_assumed;
    const SectorFamily family = SectorFamily::rescaled(epsilon);
    rep.n_sectors = family.n_sectors();
    const int S = family.n_sectors();

    // Canonical quadruples: pairs unordered, pair order immaterial.
    struct Quad {
        int a1, a2, a3, a4, d;
    };
    std::vector<Quad> quads;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a <= S; ++a)
        for (int b = a; b <= S; ++b) pairs.push_back({a, b});
    for (size_t i = 0; i < pairs.size(); ++i)
        for (size_t j = i; j < pairs.size(); ++j) {
            const auto [a1, a2] = pairs[i];
            const auto [a3, a4] = pairs[j];
            const int d = std::min(std::abs(a1 - a3) + std::abs(a2 - a4),
                                   std::abs(a1 - a4) + std::abs(a2 - a3));
            quads.push_back({a1, a2, a3, a4, d});
        }

    const double g0 =
        options.initial_grid_step > 0.0 ? options.initial_grid_step : std::sqrt(epsilon) / 8.0;

    std::vector<QuadrupleRecord> records(quads.size());
    std::vector<int> refinements(quads.size(), 0);
    parallel_for(static_cast<int64_t>(quads.size()), options.threads, [&](int64_t qi) {
        const Quad& q = quads[qi];
        double g = g0;
        SectorVerdict verdict = minkowski_disjointness(family, q.a1, q.a2, q.a3, q.a4, g);
        int level = 0;
        // Only cells violating both alternatives need a disjointness
        // certificate; near-diagonal overlapping cells stay conservatively
        // counted toward Q_min.
        while (verdict.kind == SectorVerdict::Kind::Unknown &&
               q.d > options.q_assumed && level < options.max_refinements) {
            g /= 4.0;
            ++level;
            verdict = minkowski_disjointness(family, q.a1, q.a2, q.a3, q.a4, g);
        }
        records[qi] = {{q.a1, q.a2, q.a3, q.a4}, q.d, verdict};
        refinements[qi] = level;
    });

    for (size_t qi = 0; qi < quads.size(); ++qi) {
        const QuadrupleRecord& r = records[qi];
        rep.refinements_used = std::max(rep.refinements_used, refinements[qi]);
        const bool violating = r.d > options.q_assumed;
        if (violating) {
            ++rep.violating_total;
            if (r.verdict.kind == SectorVerdict::Kind::Disjoint)
                ++rep.violating_certified;
            else if (r.verdict.kind == SectorVerdict::Kind::Unknown)
                ++rep.inconclusive;
        }
        // Conservative: anything not certified disjoint counts toward q_min.
        if (r.verdict.kind != SectorVerdict::Kind::Disjoint)
            rep.q_min = std::max(rep.q_min, r.d);
    }
    if (options.keep_records) rep.records = std::move(records);
    return rep;
}

SectorCountReport lattice_points_in_sector(const SectorFamily& family, int alpha,
                                           double gamma) {
    SectorCountReport rep;
    rep.alpha = alpha;
    rep.rectangle_bound = (1.0 + family.kappa()) * (1.0 + 3.0 * family.kappa() *
                                                              family.kappa() * family.h());
    rep.quadratic_bound = (1.0 + family.kappa()) * (1.0 + family.kappa());
    const int box = static_cast<int>(std::ceil(family.radius_hi() /
                                               std::sqrt(std::min(1.0, gamma)))) + 1;
    const double sg = std::sqrt(gamma);
    for (int n1 = 0; n1 <= box; ++n1)
        for (int n2 = 0; n2 <= box; ++n2) {
            const std::complex<double> z(n1, sg * n2);
            if (family.contains(z, alpha)) ++rep.count;
        }
    return rep;
}

std::pair<std::vector<SectorCountReport>, int> lattice_points_all_sectors(
    const SectorFamily& family, double gamma) {
    std::vector<SectorCountReport> out;
    for (int alpha = 0; alpha <= family.n_sectors(); ++alpha)
        out.push_back(lattice_points_in_sector(family, alpha, gamma));
    // quadrant-annulus total by direct enumeration
    const int box = static_cast<int>(std::ceil(family.radius_hi() /
                                               std::sqrt(std::min(1.0, gamma)))) + 1;
    const double sg = std::sqrt(gamma);
    int total = 0;
    for (int n1 = 0; n1 <= box; ++n1)
        for (int n2 = 0; n2 <= box; ++n2) {
            const std::complex<double> z(n1, sg * n2);
            if (z.real() == 0.0 && z.imag() == 0.0) continue;
            const double r = std::abs(z);
            if (r >= family.radius_lo() && r <= family.radius_hi()) ++total;
        }
    return {out, total};
}

namespace {

double wrap(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    return y;
}

}  // namespace

HittingReport hitting_fraction_rational(const TorusGeometry& geom, int p, int q,
                                        std::array<double, 2> z0,
                                        const ObservationRegion& region, double T) {
    if (std::gcd(std::abs(p), std::abs(q)) != 1)
        throw std::invalid_argument("hitting_fraction_rational: (p,q) coprime");
    const double A = geom.period_x(), B = geom.period_y();
    const double b = std::hypot(p * A, q * B);
    HittingReport rep;
    rep.direction = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    rep.z0 = z0;
    rep.horizon = T;
    rep.exact = true;

    // sigma = s / b in [0, sigma_max]; position (x0 + sigma p A, y0 + sigma q B).
    const double sigma_max = std::min(1.0, T / b);

    std::vector<double> breaks{0.0, sigma_max};
    auto add_breaks = [&](double coord0, int mult, double period, double boundary) {
        if (mult == 0) return;
        // sigma with coord0 + sigma * mult * period = boundary (mod period)
        const double base = (boundary - coord0) / period;
        for (int j = -std::abs(mult) - 1; j <= std::abs(mult) + 1; ++j) {
            const double sigma = (base + j) / mult;
            if (sigma > 0.0 && sigma < sigma_max) breaks.push_back(sigma);
        }
    };
    for (const auto& r : region.rectangles()) {
        add_breaks(z0[0], p, A, r.x0);
        add_breaks(z0[0], p, A, r.x1);
        add_breaks(z0[1], q, B, r.y0);
        add_breaks(z0[1], q, B, r.y1);
    }
    std::sort(breaks.begin(), breaks.end());
    double inside = 0.0;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double len = breaks[i + 1] - breaks[i];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const double x = wrap(z0[0] + mid * p * A, A);
        const double y = wrap(z0[1] + mid * q * B, B);
        if (region.contains(x, y)) inside += len;
    }
    rep.fraction = sigma_max > 0.0 ? inside / sigma_max : 0.0;
    return rep;
}

HittingReport hitting_fraction_sampled(const TorusGeometry& geom, double angle,
                                       std::array<double, 2> z0,
                                       const ObservationRegion& region, double T,
                                       int samples) {
    HittingReport rep;
    rep.direction = "angle=" + std::to_string(angle);
    rep.z0 = z0;
    rep.horizon = T;
    const double cx = std::cos(angle), cy = std::sin(angle);
    auto fraction = [&](int n) {
        int64_t inside = 0;
        for (int i = 0; i < n; ++i) {
            const double s = T * (i + 0.5) / n;
            const double x = wrap(z0[0] + s * cx, geom.period_x());
            const double y = wrap(z0[1] + s * cy, geom.period_y());
            if (region.contains(x, y)) ++inside;
        }
        return static_cast<double>(inside) / n;
    };
    const double f1 = fraction(samples);
    const double f2 = fraction(2 * samples);
    rep.fraction = f2;
    rep.refinement_delta = std::abs(f2 - f1);
    return rep;
}

HittingLowerBound rational_hitting_lowerbound(const TorusGeometry& geom,
                                              const ObservationRegion& region, int N,
                                              int norm_cap, int z_grid) {
    if (N > norm_cap)
        throw std::invalid_argument("rational_hitting_lowerbound: N <= norm_cap");
    HittingLowerBound out;
    out.delta = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= norm_cap; ++p) {
        for (int q = -norm_cap; q <= norm_cap; ++q) {
            if (p == 0 && q <= 0) continue;
            if (std::gcd(p, std::abs(q)) != 1) continue;
            const double norm = std::hypot(p, q);
            if (norm < N || norm > norm_cap) continue;
            ++out.directions;
            for (int i = 0; i < z_grid; ++i)
                for (int j = 0; j < z_grid; ++j) {
                    const std::array<double, 2> z0{(i + 0.5) * geom.period_x() / z_grid,
                                                   (j + 0.5) * geom.period_y() / z_grid};
                    const double b = std::hypot(p * geom.period_x(), q * geom.period_y());
                    const HittingReport rep =
                        hitting_fraction_rational(geom, p, q, z0, region, b);
                    if (rep.fraction < out.delta) {
                        out.delta = rep.fraction;
                        out.worst_p = p;
                        out.worst_q = q;
                        out.worst_z0 = z0;
                    }
                }
        }
    }
    if (out.directions == 0) out.delta = 0.0;
    return out;
}

}  // namespace toruslab
