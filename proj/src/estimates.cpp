#include "toruslab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toruslab/spectral1d.hpp"

namespace toruslab {

AnnulusBand annulus_band(const TorusGeometry& geom, double kappa, double h, int box) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("annulus_band: h in (0,1)");
    if (kappa < 0.0) throw std::invalid_argument("annulus_band: kappa >= 0");
    AnnulusBand band;
    band.kappa = kappa;
    band.h = h;
    const double h2 = h * h;
    const double eps = kappa * kappa * h2;
    // roundoff guard: at kappa = 0 the window is a single floating value and
    // h*h alone costs a couple of ulps
    const double slack = 64.0 * std::numeric_limits<double>::epsilon();
    for (int n1 = -box; n1 <= box; ++n1)
        for (int n2 = -box; n2 <= box; ++n2) {
            if (std::abs(h2 * geom.weighted_norm_sq({n1, n2}) - 1.0) <= eps + slack)
                band.members.push_back({n1, n2});
        }
    // The annulus reaches |freq| = sqrt(1+eps)/h; the box is sufficient when
    // it covers that radius on both axes.
    const double reach = std::sqrt(1.0 + eps) / h;
    const double need = reach * std::max(geom.period_x(), geom.period_y()) / kTwoPi;
    band.box_sufficient = box >= static_cast<int>(std::ceil(need));
    return band;
}

namespace {

// Exact ||u||_4 on the M-grid for a band-supported field, M >= 4 max|n_i| + 1.
// The normalized ratio is geometry-free (the volume factors cancel).
double band_l4_ratio(const std::vector<LatticePoint>& band,
                     const std::vector<cxd>& coeffs) {
    int deg = 0;
    for (const auto& n : band) deg = std::max({deg, std::abs(n.n1), std::abs(n.n2)});
    const int M = 4 * deg + 1;

    // Separable synthesis grouped by n2 (the band is sparse in the box).
    std::map<int, std::vector<std::pair<int, cxd>>> rows;
    double sum_sq = 0.0;
    for (size_t i = 0; i < band.size(); ++i) {
        rows[band[i].n2].push_back({band[i].n1, coeffs[i]});
        sum_sq += std::norm(coeffs[i]);
    }
    std::vector<cxd> grid(static_cast<size_t>(M) * M, cxd(0.0));
    std::vector<cxd> partial(M);
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
        const cxd step = std::polar(1.0, kTwoPi * n2 / M);
        for (int j = 0; j < M; ++j) {
            cxd phase(1.0);
            const cxd base = partial[j];
            cxd* out = &grid[static_cast<size_t>(j) * M];
            for (int k = 0; k < M; ++k) {
                out[k] += base * phase;
                phase *= step;
            }
        }
    }
    // Volume normalization: with u = sum c_n e_n the grid above holds
    // sqrt(AB) u, and the normalized ratio (AB)^{1/4}||u||_4/||u||_2 equals
    // ( (1/M^2) sum |g|^4 )^{1/4} / sqrt(sum |c|^2) for g the plain sum.
    double quart = 0.0;
    for (const cxd& v : grid) {
        const double a = std::norm(v);
        quart += a * a;
    }
    quart /= static_cast<double>(M) * M;
    return std::pow(quart, 0.25) / std::sqrt(sum_sq);
}

}  // namespace

double zygmund_trial_ratio(const TorusGeometry& geom, const AnnulusBand& band,
                           uint64_t witness_seed) {
    (void)geom;
    CounterRng rng(witness_seed);
    std::vector<cxd> coeffs(band.members.size());
    for (auto& c : coeffs) c = rng.next_complex_gaussian();
    return band_l4_ratio(band.members, coeffs);
}

std::vector<RatioReport> zygmund_scan(const TorusGeometry& geom,
                                      const ZygmundScanConfig& config) {
    std::vector<RatioReport> out;
    const CounterRng root(config.seed);
    uint64_t point_label = 0;
    for (const double h : config.hs) {
        for (const double kappa : config.kappas) {
            ++point_label;
            RatioReport rep;
            std::ostringstream name;
            name << "kappa=" << kappa << ",h=" << h;
            rep.parameter = name.str();
            if (kappa * h > config.small_regime_cap) {
                rep.skipped = true;
                rep.note = "kappa h beyond small-regime cap";
                out.push_back(rep);
                continue;
            }
            const int box =
                static_cast<int>(std::ceil(std::sqrt(1.0 + kappa * kappa * h * h) / h *
                                           std::max(geom.period_x(), geom.period_y()) /
                                           kTwoPi)) + 1;
            const AnnulusBand band = annulus_band(geom, kappa, h, box);
            if (band.members.empty()) {
                rep.skipped = true;
                rep.note = "empty band";
                out.push_back(rep);
                continue;
            }
            rep.trials = config.trials;
            std::vector<double> ratios(config.trials, 0.0);
            std::vector<uint64_t> seeds(config.trials);
            for (int t = 0; t < config.trials; ++t)
                seeds[t] = root.substream(point_label, static_cast<uint64_t>(t)).seed();
            parallel_for(config.trials, config.threads, [&](int64_t t) {
                ratios[t] = zygmund_trial_ratio(geom, band, seeds[t]);
            });
            double best = -1.0, mean = 0.0;
            for (int t = 0; t < config.trials; ++t) {
                mean += ratios[t];
                if (ratios[t] > best) {
                    best = ratios[t];
                    rep.witness_seed = seeds[t];
                }
            }
            rep.max_ratio = best;
            rep.mean_ratio = mean / config.trials;
            out.push_back(rep);
        }
    }
    return out;
}

std::vector<ResolventPoint> resolvent_ratio_scan(const Hamiltonian2D& H,
                                                 const std::vector<cxd>& taus, int trials,
                                                 uint64_t seed, int oversample) {
    for (const cxd& tau : taus)
        if (std::abs(tau.imag()) < 1.0)
            throw std::invalid_argument("resolvent_ratio_scan: need |Im tau| >= 1");
    const EigenSystem& es = H.eigen();
    const CounterRng root(seed);
    std::vector<ResolventPoint> out;
    for (size_t ti = 0; ti < taus.size(); ++ti) {
        ResolventPoint pt;
        pt.tau = taus[ti];
        double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
        for (int a = 0; a < es.dimension(); ++a) {
            const double d = std::abs(cxd(es.eigenvalues(a)) - pt.tau);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        pt.condition = dmax / dmin;
        double mean = 0.0;
        for (int t = 0; t < trials; ++t) {
            CounterRng rng = root.substream(ti + 1, static_cast<uint64_t>(t));
            const uint64_t trial_seed = rng.seed();
            FourierField f(H.geometry(), H.cutoff());
            for (int n1 = -H.cutoff(); n1 <= H.cutoff(); ++n1)
                for (int n2 = -H.cutoff(); n2 <= H.cutoff(); ++n2)
                    f.set({n1, n2}, rng.next_complex_gaussian());
            const Vector fv = H.to_vector(f);
            Vector w = es.eigenvectors.adjoint() * fv;
            for (int a = 0; a < es.dimension(); ++a)
                w(a) /= (cxd(es.eigenvalues(a)) - pt.tau);
            const Vector uv = es.eigenvectors * w;
            const double residual = ((H.matrix() - pt.tau * Matrix::Identity(
                                          H.dimension(), H.dimension())) * uv - fv).norm() /
                                    fv.norm();
            pt.worst_residual = std::max(pt.worst_residual, residual);
            const FourierField u = H.to_field(uv);
            const double ratio = lp_norm(u, 4.0, 2) / lp_norm(f, 4.0 / 3.0, oversample);
            mean += ratio;
            if (ratio > pt.max_ratio) {
                pt.max_ratio = ratio;
                pt.witness_seed = trial_seed;
            }
        }
        pt.mean_ratio = trials > 0 ? mean / trials : 0.0;
        out.push_back(pt);
    }
    return out;
}

double SourceSpec::l1_time(double T) const {
    if (!cosine || omega == 0.0) return T;
    const int Q = 20000;
    double acc = 0.0;
    for (int i = 0; i < Q; ++i) acc += std::abs(g((i + 0.5) * T / Q));
    return acc * T / Q;
}

StrichartzReport strichartz_ratio(const Hamiltonian2D& H, const FourierField& v0,
                                  const SourceSpec& f, double T, int t_samples) {
    if (!(T > 0.0)) throw std::invalid_argument("strichartz_ratio: T > 0");
    const EigenSystem& es = H.eigen();
    const int d = es.dimension();
    const Vector v0e = es.eigenvectors.adjoint() * H.to_vector(v0);
    const Vector fe = es.eigenvectors.adjoint() * H.to_vector(f.field);

    // u_a(t) = e^{-it l_a} (v0_a - i F_a int_0^t e^{is l_a} g(s) ds)
    auto duhamel_weight = [&](double lambda, double t) -> cxd {
        if (!f.cosine) return phase_integral(lambda, t);
        return 0.5 * (phase_integral(lambda + f.omega, t) +
                      phase_integral(lambda - f.omega, t));
    };

    const int N = H.cutoff();
    const int M = 4 * N + 1;
    std::vector<double> power(static_cast<size_t>(M) * M, 0.0);
    StrichartzReport rep;
    Vector mode(d);
    for (int s = 0; s <= t_samples; ++s) {
        const double t = T * s / t_samples;
        Vector ue(d);
        for (int a = 0; a < d; ++a) {
            const cxd duh = cxd(0.0, -1.0) * fe(a) * duhamel_weight(es.eigenvalues(a), t);
            ue(a) = std::polar(1.0, -t * es.eigenvalues(a)) * (v0e(a) + duh);
        }
        mode = es.eigenvectors * ue;
        rep.linf_l2 = std::max(rep.linf_l2, mode.norm());
        const GridFunction g = synthesize_grid(H.to_field(mode), M);
        const double wt = (s == 0 || s == t_samples) ? 0.5 : 1.0;
        for (size_t i = 0; i < power.size(); ++i)
            power[i] += wt * std::norm(g.values()[i]);
    }
    const double dt = T / t_samples;
    const double cell = H.geometry().area() / (static_cast<double>(M) * M);
    double quart = 0.0;
    for (const double p : power) {
        const double val = p * dt;  // int |u(t,z)|^2 dt at z
        quart += val * val;
    }
    rep.l4_l2t = std::pow(quart * cell, 0.25);
    rep.data_norm = v0.norm() + f.field.norm() * f.l1_time(T);
    if (rep.data_norm > 0.0) {
        rep.linf_ratio = rep.linf_l2 / rep.data_norm;
        rep.l4_ratio = rep.l4_l2t / rep.data_norm;
    }
    return rep;
}

std::map<int, cxd> random_rough_potential_1d(int cutoff, double eps, double l2_norm,
                                             CounterRng& rng) {
    std::map<int, cxd> W;
    for (int m = 1; m <= cutoff; ++m) {
        const cxd c = rng.next_complex_gaussian() * std::pow(1.0 + m, -1.0 - eps);
        W[m] = c;
        W[-m] = std::conj(c);
    }
    double norm_sq = 0.0;
    for (const auto& [m, c] : W) norm_sq += std::norm(c);
    const double norm = std::sqrt(kTwoPi * norm_sq);
    if (norm > 0.0 && l2_norm > 0.0)
        for (auto& [m, c] : W) c *= l2_norm / norm;
    return W;
}

std::vector<DispersivePoint> dispersive_scan_1d(const std::vector<double>& horizons,
                                                int cutoff, int trials, uint64_t seed) {
    const CounterRng root(seed);
    std::vector<DispersivePoint> out;
    for (size_t hi = 0; hi < horizons.size(); ++hi) {
        DispersivePoint pt;
        pt.T = horizons[hi];
        double mean = 0.0;
        for (int t = 0; t < trials; ++t) {
            CounterRng rng = root.substream(hi + 1, static_cast<uint64_t>(t));
            const uint64_t trial_seed = rng.seed();
            const double k = rng.next_double();
            const auto W = random_rough_potential_1d(cutoff, 0.51, rng.uniform(0.2, 2.0), rng);
            const FloquetOperator1D op(k, W, cutoff);
            Vector v0(op.dimension());
            for (int i = 0; i < op.dimension(); ++i) v0(i) = rng.next_complex_gaussian();
            v0.normalize();
            const double mixed =
                dispersive_mixed_norm(op, v0, pt.T, 8 * cutoff, 256);
            const double denom = (1.0 + std::sqrt(pt.T)) * (1.0 + op.potential_l2());
            const double ratio = mixed / denom;
            mean += ratio;
            if (ratio > pt.max_ratio) {
                pt.max_ratio = ratio;
                pt.witness_seed = trial_seed;
            }
        }
        pt.mean_ratio = trials > 0 ? mean / trials : 0.0;
        out.push_back(pt);
    }
    return out;
}

}  // namespace toruslab
