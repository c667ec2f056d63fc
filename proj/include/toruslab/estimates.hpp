#pragma once

#include "toruslab/observability.hpp"
#include "toruslab/spectral2d.hpp"

namespace toruslab {

/// Spectral annulus B(kappa, h) = { n : |h^2 |n|^2 - 1| <= kappa^2 h^2 },
/// enumerated exactly inside the search box |n_i| <= box.
struct AnnulusBand {
    double kappa = 0.0;
    double h = 0.0;
    std::vector<LatticePoint> members;
    bool box_sufficient = true;
};

AnnulusBand annulus_band(const TorusGeometry& geom, double kappa, double h, int box);

struct ZygmundScanConfig {
    std::vector<double> kappas;
    std::vector<double> hs;
    int trials = 200;
    uint64_t seed = 1;
    double small_regime_cap = 0.25;  // skip points with kappa h beyond this
    int threads = 1;
};

/// ||u||_4 / ||u||_2 normalized by the constant-function value (AB)^{-1/4},
/// so a single mode scores exactly 1. L^4 by the exact rectangle rule.
std::vector<RatioReport> zygmund_scan(const TorusGeometry& geom,
                                      const ZygmundScanConfig& config);

/// Replay one zygmund trial from its witness seed.
double zygmund_trial_ratio(const TorusGeometry& geom, const AnnulusBand& band,
                           uint64_t witness_seed);

struct ResolventPoint {
    cxd tau;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double worst_residual = 0.0;   // ||(H - tau)u - f|| / ||f||
    double condition = 0.0;        // max / min |lambda - tau|
    uint64_t witness_seed = 0;
};

/// ||(H - tau)^{-1} f||_4 / ||f||_{4/3} over random f per tau; requires
/// |Im tau| >= 1.
std::vector<ResolventPoint> resolvent_ratio_scan(const Hamiltonian2D& H,
                                                 const std::vector<cxd>& taus, int trials,
                                                 uint64_t seed, int oversample = 4);

/// Forcing profile for the inhomogeneous flow: f(t, z) = g(t) F(z) with
/// g = 1 or g = cos(omega t).
struct SourceSpec {
    FourierField field;
    double omega = 0.0;
    bool cosine = false;

    double g(double t) const { return cosine ? std::cos(omega * t) : 1.0; }
    double l1_time(double T) const;  // int_0^T |g|
};

struct StrichartzReport {
    double linf_l2 = 0.0;     // sup_t ||u(t)||_{L^2}
    double l4_l2t = 0.0;      // || ||u(., z)||_{L^2_t} ||_{L^4_z}
    double data_norm = 0.0;   // ||v0|| + ||F|| ||g||_{L^1(0,T)}
    double linf_ratio = 0.0;
    double l4_ratio = 0.0;
};

/// Solves (i d/dt - H) u = f, u(0) = v0, exactly per eigenmode (closed-form
/// Duhamel for the supported profiles); mixed norms by trapezoid in t over
/// t_samples and the exact L^4 grid in z.
StrichartzReport strichartz_ratio(const Hamiltonian2D& H, const FourierField& v0,
                                  const SourceSpec& f, double T, int t_samples);

/// Random real 1D potential with <m>^{-1-eps} tails, plain coefficients,
/// normalized in L^2(0, 2 pi).
std::map<int, cxd> random_rough_potential_1d(int cutoff, double eps, double l2_norm,
                                             CounterRng& rng);

struct DispersivePoint {
    double T = 0.0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    uint64_t witness_seed = 0;
};

/// 1D dispersive ratios ||u||_{L^inf_x L^2_t} / ((1+sqrt T)(1+||W||_2)||u0||)
/// over random (W, u0, k) draws for each horizon T.
std::vector<DispersivePoint> dispersive_scan_1d(const std::vector<double>& horizons,
                                                int cutoff, int trials, uint64_t seed);

}  // namespace toruslab
