#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "toruslab/torus.hpp"

namespace toruslab {

/// Angular decomposition of the first-quadrant annulus into sectors of
/// angle width h kappa. Variant Radius uses |h|z| - 1| <= kappa^2 h^2,
/// RadiusSq uses |h^2|z|^2 - 1| <= kappa^2 h^2. The rescaled family
/// (unit-radius annulus, angle width sqrt(eps)) drives Appendix-style
/// brute force.
class SectorFamily {
  public:
    enum class Variant { Radius, RadiusSq };

    SectorFamily(double kappa, double h, Variant variant = Variant::Radius);

    /// Rescaled family: | |z| - 1 | <= eps, angle windows of width sqrt(eps).
    static SectorFamily rescaled(double eps);

    double kappa() const { return kappa_; }
    double h() const { return h_; }
    double epsilon() const { return eps_; }
    Variant variant() const { return variant_; }
    int n_sectors() const { return n_sectors_; }  // indices 0..n_sectors()
    double angle_width() const { return angle_width_; }

    double radius_lo() const { return r_lo_; }
    double radius_hi() const { return r_hi_; }

    bool contains(std::complex<double> z, int alpha) const;

    /// Sector alpha of a point in the quadrant annulus, or -1.
    int sector_of(std::complex<double> z) const;

  private:
    SectorFamily(double kappa, double h, Variant v, double r_lo, double r_hi,
                 double angle_width);

    double kappa_, h_, eps_;
    Variant variant_;
    double r_lo_, r_hi_, angle_width_;
    int n_sectors_;
};

bool sector_membership(std::complex<double> z, const SectorFamily& family, int alpha);

struct SectorVerdict {
    enum class Kind { Intersect, Disjoint, Unknown };
    Kind kind = Kind::Unknown;
    double min_distance = 0.0;  // over sampled sum clouds
    double margin = 0.0;        // min_distance - 4 grid_step (when Disjoint)
    double grid_step = 0.0;
};

/// Sampled certificate for (A_{a1}+A_{a2}) vs (A_{a3}+A_{a4}): each sector is
/// sampled with covering radius grid_step/2, sums are compared by
/// nearest-neighbor search, and a positive m - 4 grid_step certifies
/// disjointness (each true sum moves at most 2 grid_step under sampling).
SectorVerdict minkowski_disjointness(const SectorFamily& family, int a1, int a2, int a3,
                                     int a4, double grid_step);

struct QuadrupleRecord {
    std::array<int, 4> alphas{};
    int d = 0;  // min(|a1-a3|+|a2-a4|, |a1-a4|+|a2-a3|)
    SectorVerdict verdict;
};

struct LemmaGeomReport {
    double epsilon = 0.0;
    int n_sectors = 0;
    int q_assumed = 12;
    int q_min = 0;                 // max d over intersecting (or unresolved) quadruples
    int violating_total = 0;       // d > q_assumed under both alternatives
    int violating_certified = 0;   // of those, certified disjoint
    int inconclusive = 0;          // violating cells still unknown
    int refinements_used = 0;
    double q_min_bound = 2.0 * (kPi + 2.5) + 1.0;
    std::vector<QuadrupleRecord> records;  // canonical quadruples only
};

struct LemmaGeomOptions {
    int q_assumed = 12;
    int max_refinements = 2;
    double initial_grid_step = 0.0;  // 0 -> sqrt(eps)/8
    bool keep_records = false;
    int threads = 1;
};

/// Exhaustive scan of all sector quadruples at the given eps for the
/// rescaled family.
LemmaGeomReport lemma_geom_bruteforce(double epsilon, const LemmaGeomOptions& options = {});

struct SectorCountReport {
    int alpha = 0;
    int count = 0;
    double rectangle_bound = 0.0;  // (1 + kappa)(1 + 3 kappa^2 h)
    double quadratic_bound = 0.0;  // (1 + kappa)^2
};

/// Exact integer points of Z^2 in sector alpha of the (unrescaled) family,
/// with the anisotropic weight |n|^2 = n1^2 + gamma n2^2.
SectorCountReport lattice_points_in_sector(const SectorFamily& family, int alpha,
                                           double gamma = 1.0);

/// All sectors at once plus the quadrant-annulus total (partition check).
std::pair<std::vector<SectorCountReport>, int> lattice_points_all_sectors(
    const SectorFamily& family, double gamma = 1.0);

struct HittingReport {
    std::string direction;
    std::array<double, 2> z0{};
    double horizon = 0.0;
    double fraction = 0.0;
    double refinement_delta = 0.0;
    bool exact = false;  // rational-direction breakpoint integration
};

/// Time fraction the orbit z0 + s zeta (mod lattice) spends in Omega for the
/// rational lattice direction zeta = (pA, qB)/b; exact breakpoint sweep over
/// one period (or the [0, T] prefix when T is shorter).
HittingReport hitting_fraction_rational(const TorusGeometry& geom, int p, int q,
                                        std::array<double, 2> z0,
                                        const ObservationRegion& region, double T);

/// Sampled fraction for an arbitrary direction angle, with a doubled-sample
/// refinement delta.
HittingReport hitting_fraction_sampled(const TorusGeometry& geom, double angle,
                                       std::array<double, 2> z0,
                                       const ObservationRegion& region, double T,
                                       int samples);

struct HittingLowerBound {
    double delta = 0.0;
    int worst_p = 0, worst_q = 0;
    std::array<double, 2> worst_z0{};
    int directions = 0;
};

/// min over coprime directions with N <= sqrt(p^2+q^2) <= norm_cap and over a
/// z_grid x z_grid lattice of starts of the exact periodic-orbit fraction.
HittingLowerBound rational_hitting_lowerbound(const TorusGeometry& geom,
                                              const ObservationRegion& region, int N,
                                              int norm_cap, int z_grid);

}  // namespace toruslab
