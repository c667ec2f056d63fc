#include "toruslab/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "toruslab/estimates.hpp"
#include "toruslab/geometry_lab.hpp"
#include "toruslab/hum.hpp"
#include "toruslab/lowfreq.hpp"
#include "toruslab/observability.hpp"

namespace toruslab::cli {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::filesystem::path& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);  // binary keeps LF endings
    if (!impl_->out) throw std::runtime_error("CsvWriter: cannot open " + path.string());
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        const std::string& f = fields[i];
        const bool quote = f.find_first_of(",\"\n\r") != std::string::npos;
        if (quote) {
            impl_->out << '"';
            for (const char c : f) {
                if (c == '"') impl_->out << '"';
                impl_->out << c;
            }
            impl_->out << '"';
        } else {
            impl_->out << f;
        }
        if (i + 1 < fields.size()) impl_->out << ',';
    }
    impl_->out << '\n';
}

namespace {

TorusGeometry parse_geometry(const json& config) {
    double A = kTwoPi, B = kTwoPi;
    if (config.contains("geometry")) {
        A = config["geometry"].value("A", kTwoPi);
        B = config["geometry"].value("B", kTwoPi);
    }
    return {A, B};
}

ObservationRegion parse_region(const json& config, const TorusGeometry& geom) {
    if (!config.contains("region")) return ObservationRegion::full(geom);
    std::vector<ObservationRegion::Rect> rects;
    for (const auto& r : config["region"])
        rects.push_back({r.at(0).get<double>(), r.at(1).get<double>(),
                         r.at(2).get<double>(), r.at(3).get<double>()});
    return ObservationRegion(std::move(rects));
}

Region1D parse_omega(const json& config) {
    if (!config.contains("omega")) return Region1D::full();
    std::vector<Region1D::Interval> ivs;
    for (const auto& r : config["omega"])
        ivs.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    return Region1D(std::move(ivs));
}

FourierField potential_from_file(const TorusGeometry& geom, int cutoff,
                                 const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("potential file not found: " + path);
    std::map<LatticePoint, cxd> plain;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.find("n1") != std::string::npos) {
            first = false;
            continue;  // header
        }
        first = false;
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != 4)
            throw std::invalid_argument("potential file needs n1,n2,re,im columns");
        plain[{static_cast<int>(vals[0]), static_cast<int>(vals[1])}] = {vals[2], vals[3]};
    }
    return field_from_plain_coeffs(geom, cutoff, plain);
}

FourierField parse_potential(const json& config, const TorusGeometry& geom, int cutoff,
                             uint64_t seed) {
    if (!config.contains("potential")) return FourierField(geom, cutoff);
    const json& p = config["potential"];
    const int vcut = p.value("cutoff", cutoff);
    if (p.contains("preset")) {
        const std::string name = p["preset"].get<std::string>();
        if (name == "zero") return FourierField(geom, vcut);
        if (name == "cos-x")  // 2 cos x1
            return field_from_plain_coeffs(geom, vcut, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}});
        if (name == "cos-cos")  // 2 cos x1 + 2 cos x2
            return field_from_plain_coeffs(
                geom, vcut,
                {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, 1.0}});
        throw std::invalid_argument("unknown potential preset: " + name);
    }
    if (p.contains("file")) return potential_from_file(geom, vcut, p["file"].get<std::string>());
    if (p.contains("random")) {
        CounterRng rng(p["random"].value("seed", seed));
        return random_rough_potential(geom, vcut, p["random"].value("eps", 0.51),
                                      p["random"].value("norm", 1.0), rng);
    }
    throw std::invalid_argument("potential needs preset, file or random");
}

FourierField parse_u0(const json& config, const TorusGeometry& geom, int cutoff,
                      uint64_t seed) {
    const std::string spec = config.value("u0", "mode(1,1)");
    if (spec.rfind("mode(", 0) == 0) {
        const size_t comma = spec.find(',');
        const int n1 = std::stoi(spec.substr(5, comma - 5));
        const int n2 = std::stoi(spec.substr(comma + 1, spec.size() - comma - 2));
        FourierField u(geom, cutoff);
        u.set({n1, n2}, 1.0);
        return u;
    }
    if (spec == "random") {
        CounterRng rng(seed);
        return random_field(geom, cutoff, rng);
    }
    throw std::invalid_argument("unknown u0 spec: " + spec);
}

// --- per-command runners; each fills summary and may write detail.csv ---

int cmd_simulate(const json& config, const std::filesystem::path& out,
                 json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const int N = config.value("cutoff", 4);
    const uint64_t seed = config.value("seed", 1);
    const FourierField V = parse_potential(config, geom, N, seed);
    const FourierField u0 = parse_u0(config, geom, N, seed);
    const double T = config.value("T", 1.0);
    const int steps = config.value("steps", 32);
    const Hamiltonian2D H(geom, V, N);

    CsvWriter csv(out / "detail.csv");
    csv.row({"t", "norm", "drift"});
    double drift = 0.0;
    for (int s = 0; s <= steps; ++s) {
        const double t = T * s / steps;
        const double norm = propagate(H, u0, t).norm();
        drift = std::max(drift, std::abs(norm - u0.norm()));
        csv.row({format_double(t), format_double(norm), format_double(drift)});
    }
    summary["norm_drift"] = drift;
    summary["dimension"] = H.dimension();
    return drift <= 1e-10 ? 0 : 1;
}

int cmd_gramian(const json& config, const std::filesystem::path& out, json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const int N = config.value("cutoff", 4);
    const uint64_t seed = config.value("seed", 1);
    const FourierField V = parse_potential(config, geom, N, seed);
    const ObservationRegion region = parse_region(config, geom);
    const double T = config.value("T", 1.0);
    const int M = config.value("M", 4 * N + 1);
    const Hamiltonian2D H(geom, V, N);
    auto [G, rep] = build_gramian(H, region, T, M);

    summary["K"] = rep.K;
    summary["lambda_min"] = rep.lambda_min;
    summary["lambda_max"] = rep.lambda_max;
    summary["dimension"] = rep.dimension;
    summary["numerical_failure"] = rep.numerical_failure;

    CsvWriter csv(out / "detail.csv");
    csv.row({"quantity", "value"});
    csv.row({"K", format_double(rep.K)});
    csv.row({"lambda_min", format_double(rep.lambda_min)});
    csv.row({"lambda_max", format_double(rep.lambda_max)});
    return (!rep.numerical_failure && rep.lambda_min > 0.0) ? 0 : 1;
}

int cmd_control(const json& config, const std::filesystem::path& out, json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const int N = config.value("cutoff", 4);
    const uint64_t seed = config.value("seed", 1);
    const FourierField V = parse_potential(config, geom, N, seed);
    const ObservationRegion region = parse_region(config, geom);
    const double T = config.value("T", 1.0);
    const int M = config.value("M", 4 * N + 1);
    const FourierField u0 = parse_u0(config, geom, N, seed);
    const Hamiltonian2D H(geom, V, N);

    const ControlSolution sol = synthesize_control(H, region, T, u0, M);
    const double verified = verify_terminal(H, region, T, sol, u0, M,
                                            config.value("verify_steps", 2048), 2);
    const CostBoundCheck cost = control_cost_bound_check(sol, sol.gramian, u0);

    summary["cost"] = sol.cost;
    summary["terminal_norm"] = sol.terminal_norm;
    summary["verified_terminal_norm"] = verified;
    summary["cg_iterations"] = sol.cg_iterations;
    summary["K"] = sol.gramian.K;
    summary["cost_bound_pass"] = cost.pass;

    // t, grid_x, grid_y, Re f, Im f
    const int t_samples = config.value("control_samples", 8);
    const int Mexp = config.value("export_grid", 2 * N + 1);
    CsvWriter csv(out / "detail.csv");
    csv.row({"t", "grid_x", "grid_y", "re_f", "im_f"});
    for (int s = 0; s <= t_samples; ++s) {
        const double t = T * s / t_samples;
        const GridFunction g = control_sample(H, region, sol, t, Mexp);
        for (int j = 0; j < Mexp; ++j)
            for (int k = 0; k < Mexp; ++k) {
                const auto z = g.point(j, k);
                csv.row({format_double(t), format_double(z[0]), format_double(z[1]),
                         format_double(g.at(j, k).real()), format_double(g.at(j, k).imag())});
            }
    }
    const double tol = config.value("tol", 1e-8);
    return (sol.converged && verified <= tol * std::max(1e-300, u0.norm()) && cost.pass)
               ? 0
               : 1;
}

int cmd_scan_zygmund(const json& config, const std::filesystem::path& out, json& summary,
                     int threads) {
    const TorusGeometry geom = parse_geometry(config);
    ZygmundScanConfig scan;
    scan.kappas = config.value("kappas", std::vector<double>{1, 2, 4, 8});
    scan.hs = config.value("hs", std::vector<double>{1.0 / 32, 1.0 / 64});
    scan.trials = config.value("trials", 200);
    scan.seed = config.value("seed", 1);
    scan.threads = threads;
    const auto reports = zygmund_scan(geom, scan);

    CsvWriter csv(out / "detail.csv");
    csv.row({"parameter", "trials", "max_ratio", "mean_ratio", "witness_seed", "skipped"});
    std::vector<double> logk, logr;
    double global_max = 0.0;
    for (const auto& r : reports) {
        csv.row({r.parameter, std::to_string(r.trials), format_double(r.max_ratio),
                 format_double(r.mean_ratio), std::to_string(r.witness_seed),
                 r.skipped ? "1" : "0"});
        global_max = std::max(global_max, r.max_ratio);
    }
    // growth exponent of max ratio vs (1+kappa) per h, pooled
    for (size_t hi = 0; hi < scan.hs.size(); ++hi)
        for (size_t ki = 0; ki < scan.kappas.size(); ++ki) {
            const auto& r = reports[hi * scan.kappas.size() + ki];
            if (r.skipped || r.max_ratio <= 0.0) continue;
            logk.push_back(std::log(1.0 + scan.kappas[ki]));
            logr.push_back(std::log(r.max_ratio));
        }
    const double exponent = logk.size() >= 2 ? fit_slope(logk, logr) : 0.0;
    summary["growth_exponent"] = exponent;
    summary["max_ratio"] = global_max;
    summary["points"] = reports.size();
    return exponent <= config.value("exponent_cap", 0.65) ? 0 : 1;
}

int cmd_scan_resolvent(const json& config, const std::filesystem::path& out,
                       json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const int N = config.value("cutoff", 10);
    const uint64_t seed = config.value("seed", 1);
    const FourierField V = parse_potential(config, geom, N, seed);
    const Hamiltonian2D H(geom, V, N);
    std::vector<cxd> taus;
    for (const double re : config.value("re_taus", std::vector<double>{10, 40, 160, 640}))
        taus.push_back({re, config.value("im_tau", 1.0)});
    const auto points =
        resolvent_ratio_scan(H, taus, config.value("trials", 50), seed);

    CsvWriter csv(out / "detail.csv");
    csv.row({"re_tau", "im_tau", "max_ratio", "mean_ratio", "condition", "residual"});
    for (const auto& p : points)
        csv.row({format_double(p.tau.real()), format_double(p.tau.imag()),
                 format_double(p.max_ratio), format_double(p.mean_ratio),
                 format_double(p.condition), format_double(p.worst_residual)});
    summary["first_max_ratio"] = points.front().max_ratio;
    summary["last_max_ratio"] = points.back().max_ratio;
    const bool pass = points.back().max_ratio <=
                      config.value("trend_cap", 1.5) * points.front().max_ratio;
    summary["no_upward_trend"] = pass;
    return pass ? 0 : 1;
}

int cmd_scan_dispersive(const json& config, const std::filesystem::path& out,
                        json& summary) {
    const auto horizons = config.value("horizons", std::vector<double>{1.0, 2.0, 4.0});
    const auto points = dispersive_scan_1d(horizons, config.value("cutoff", 12),
                                           config.value("trials", 40),
                                           config.value("seed", 1));
    CsvWriter csv(out / "detail.csv");
    csv.row({"T", "max_ratio", "mean_ratio", "witness_seed"});
    double worst = 0.0;
    for (const auto& p : points) {
        csv.row({format_double(p.T), format_double(p.max_ratio),
                 format_double(p.mean_ratio), std::to_string(p.witness_seed)});
        worst = std::max(worst, p.max_ratio);
    }
    summary["max_ratio"] = worst;
    // ratios already normalize by (1+sqrt T): no growth expected across T
    const bool pass =
        points.back().max_ratio <= config.value("trend_cap", 2.0) * points.front().max_ratio;
    summary["no_growth"] = pass;
    return pass ? 0 : 1;
}

int cmd_verify_geom(const json& config, const std::filesystem::path& out, json& summary,
                    int threads) {
    LemmaGeomOptions opt;
    opt.q_assumed = config.value("Q", 12);
    opt.threads = threads;
    opt.keep_records = config.value("csv_records", false);
    const double eps = config.value("epsilon", 1.0 / 16.0);
    const LemmaGeomReport rep = lemma_geom_bruteforce(eps, opt);
    summary["epsilon"] = rep.epsilon;
    summary["N_sectors"] = rep.n_sectors;
    summary["Q_min"] = rep.q_min;
    summary["inconclusive_count"] = rep.inconclusive;
    summary["violating_total"] = rep.violating_total;
    summary["violating_certified"] = rep.violating_certified;
    if (opt.keep_records) {
        CsvWriter csv(out / "detail.csv");
        csv.row({"a1", "a2", "a3", "a4", "d", "verdict", "min_distance", "margin"});
        for (const auto& r : rep.records) {
            const char* verdict = r.verdict.kind == SectorVerdict::Kind::Intersect
                                      ? "intersect"
                                      : r.verdict.kind == SectorVerdict::Kind::Disjoint
                                            ? "disjoint"
                                            : "unknown";
            csv.row({std::to_string(r.alphas[0]), std::to_string(r.alphas[1]),
                     std::to_string(r.alphas[2]), std::to_string(r.alphas[3]),
                     std::to_string(r.d), verdict, format_double(r.verdict.min_distance),
                     format_double(r.verdict.margin)});
        }
    }
    const bool pass = rep.inconclusive == 0 &&
                      rep.q_min <= static_cast<int>(std::floor(rep.q_min_bound));
    return pass ? 0 : 1;
}

int cmd_scan_shells(const json& config, const std::filesystem::path& out, json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const int N = config.value("cutoff", 8);
    const uint64_t seed = config.value("seed", 1);
    const FourierField V = parse_potential(config, geom, N, seed);
    const ObservationRegion region = parse_region(config, geom);
    const double T = config.value("T", 1.0);
    const double rho = config.value("rho", 0.2);
    const Hamiltonian2D H(geom, V, N);
    std::vector<SpectralProjectorSpec> specs;
    for (const double h : config.value("hs", std::vector<double>{1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6}))
        specs.push_back({h, rho, ChiProfile::sharp_open()});
    const auto reports = shell_observability_scan(H, specs, region, T, 4 * N + 1);

    CsvWriter csv(out / "detail.csv");
    csv.row({"h", "rho", "dimension", "K_shell", "skipped"});
    double kmax = 0.0;
    std::vector<double> ks;
    for (const auto& r : reports) {
        csv.row({format_double(r.h), format_double(r.rho),
                 std::to_string(r.shell_dimension), format_double(r.gramian.K),
                 r.skipped ? "1" : "0"});
        if (!r.skipped) {
            kmax = std::max(kmax, r.gramian.K);
            ks.push_back(r.gramian.K);
        }
    }
    summary["K_max"] = kmax;
    summary["shells"] = ks.size();
    bool finite = !ks.empty();
    for (const double k : ks) finite = finite && k > 0.0 && std::isfinite(k);
    summary["all_finite"] = finite;
    return finite ? 0 : 1;
}

int cmd_lowfreq(const json& config, const std::filesystem::path& out, json& summary) {
    const int N = config.value("cutoff", 6);
    const double T = config.value("T", kTwoPi);
    const double k = config.value("k", 0.0);
    const Region1D omega = parse_omega(config);
    const int M = config.value("M", 8 * N + 1);
    std::map<int, cxd> W;  // free model by default
    const FloquetOperator1D op(k, W, N);
    const ModelSystem model = model_from_floquet(op, omega, T, M);

    CounterRng rng(config.value("seed", 1));
    const WeakObservabilityFit fit =
        certify_weak_observability(model, config.value("eps", 2.0), 500, rng);
    const AssemblyReport rep = assemble_constant(model, fit.eps, fit.C1, fit.C2);
    summary["N"] = rep.N;
    summary["M"] = rep.M;
    summary["r1"] = rep.r1;
    summary["r2"] = rep.r2;
    summary["tau"] = rep.tau;
    summary["K2"] = rep.K2;
    summary["K3"] = rep.K3;
    summary["K4"] = rep.K4;
    summary["K5"] = rep.K5;
    summary["K6"] = rep.K6;
    summary["K_assembled"] = rep.K_assembled;
    summary["K_gramian"] = rep.K_gramian;
    summary["success"] = rep.success;

    CsvWriter csv(out / "detail.csv");
    csv.row({"quantity", "value"});
    csv.row({"K_assembled", format_double(rep.K_assembled)});
    csv.row({"K_gramian", format_double(rep.K_gramian)});

    if (!rep.success) return 1;
    const EliminationCheck check = verify_elimination(model, rep.K_assembled, 200, rng);
    summary["verify_worst_ratio"] = check.worst_ratio;
    summary["verify_pass"] = check.pass;
    return check.pass && rep.K_assembled >= rep.K_gramian ? 0 : 1;
}

int cmd_hitting(const json& config, const std::filesystem::path& out, json& summary) {
    const TorusGeometry geom = parse_geometry(config);
    const ObservationRegion region = parse_region(config, geom);
    CsvWriter csv(out / "detail.csv");
    csv.row({"direction", "z0x", "z0y", "fraction", "refinement_delta", "exact"});

    json fractions = json::array();
    if (config.contains("rational")) {
        for (const auto& item : config["rational"]) {
            const int p = item.at("p").get<int>();
            const int q = item.at("q").get<int>();
            std::array<double, 2> z0{item.value("x0", 0.0), item.value("y0", 0.0)};
            const auto rep = hitting_fraction_rational(geom, p, q, z0, region,
                                                       config.value("T", 1e4));
            csv.row({rep.direction, format_double(z0[0]), format_double(z0[1]),
                     format_double(rep.fraction), "0", "1"});
            fractions.push_back(rep.fraction);
        }
    }
    if (config.contains("angle")) {
        const double angle = config["angle"].get<double>();
        std::array<double, 2> z0{config.value("x0", 0.1), config.value("y0", 0.2)};
        const auto rep = hitting_fraction_sampled(geom, angle, z0, region,
                                                  config.value("T", 1e4),
                                                  config.value("samples", 1 << 20));
        csv.row({rep.direction, format_double(z0[0]), format_double(z0[1]),
                 format_double(rep.fraction), format_double(rep.refinement_delta), "0"});
        summary["sampled_fraction"] = rep.fraction;
    }
    if (config.contains("lowerbound")) {
        const json& lb = config["lowerbound"];
        const auto rep = rational_hitting_lowerbound(geom, region, lb.value("N", 8),
                                                     lb.value("cap", 12),
                                                     lb.value("z_grid", 4));
        summary["delta"] = rep.delta;
        summary["directions"] = rep.directions;
        if (!(rep.delta > 0.0)) return 1;
    }
    summary["fractions"] = fractions;
    return 0;
}

}  // namespace

int run(const json& config, const std::filesystem::path& out_dir, int threads,
        bool verbose) {
    json summary;
    try {
        if (!config.contains("command")) {
            std::cerr << "config missing 'command'\n";
            return 2;
        }
        std::filesystem::create_directories(out_dir);
        const std::string command = config["command"].get<std::string>();
        summary["command"] = command;
        summary["config_hash"] = fnv1a(config.dump());
        summary["seed"] = config.value("seed", 1);

        int code = 2;
        if (command == "simulate")
            code = cmd_simulate(config, out_dir, summary);
        else if (command == "gramian")
            code = cmd_gramian(config, out_dir, summary);
        else if (command == "control")
            code = cmd_control(config, out_dir, summary);
        else if (command == "scan-zygmund")
            code = cmd_scan_zygmund(config, out_dir, summary, threads);
        else if (command == "scan-resolvent")
            code = cmd_scan_resolvent(config, out_dir, summary);
        else if (command == "scan-dispersive")
            code = cmd_scan_dispersive(config, out_dir, summary);
        else if (command == "verify-geom")
            code = cmd_verify_geom(config, out_dir, summary, threads);
        else if (command == "scan-shells")
            code = cmd_scan_shells(config, out_dir, summary);
        else if (command == "lowfreq")
            code = cmd_lowfreq(config, out_dir, summary);
        else if (command == "hitting")
            code = cmd_hitting(config, out_dir, summary);
        else {
            std::cerr << "unknown command: " << command << "\n";
            return 2;
        }

        summary["pass"] = code == 0;
        std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";
        if (verbose) std::cout << summary.dump(2) << "\n";
        return code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_config_file(const std::string& config_path, const std::string& out_dir,
                    int threads, bool verbose) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 2;
    }
    json config;
    try {
        in >> config;
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    return run(config, out_dir, threads, verbose);
}

}  // namespace toruslab::cli
