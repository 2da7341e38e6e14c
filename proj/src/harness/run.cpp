#include "glcoef/harness/run.hpp"

#include "glcoef/harness/csv.hpp"
#include "glcoef/numeric.hpp"
#include "glcoef/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace glcoef::harness {
namespace {

constexpr std::size_t kBlock = 1024;

const std::vector<std::pair<Subcommand, std::string>>& names() {
    static const std::vector<std::pair<Subcommand, std::string>> v{
        {Subcommand::check, "check"},         {Subcommand::spectral, "spectral"},
        {Subcommand::bias, "bias"},           {Subcommand::walk, "walk"},
        {Subcommand::edgeworth, "edgeworth"}, {Subcommand::berry_esseen, "berry-esseen"},
        {Subcommand::sandwich, "sandwich"},
    };
    return v;
}

std::filesystem::path out_file(const ExperimentConfig& cfg, const char* name) { return cfg.out_dir / name; }

BiasOptions bias_options(const ExperimentConfig& cfg) { return {cfg.b_tol, cfg.b_max_iter}; }

int run_check(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    RngStream rng = experiment_stream(cfg.seed, "check");
    const auto rep = check_conditions(model, cfg.moment_epsilon, cfg.moment_samples, cfg.check_steps, cfg.check_reps,
                                      rng);
    CsvWriter w(out_file(cfg, "check.csv"),
                {"model_id", "moment_epsilon", "moment_estimate", "moment_std_error", "moment_samples",
                 "moment_overflows", "proximality_slope", "proximality_slope_error", "proximality_detected",
                 "irreducibility_flag", "n_steps", "n_reps", "seed"});
    w.row({model.id(), rep.moment_epsilon, rep.moment_estimate, rep.moment_std_error,
           static_cast<std::uint64_t>(rep.moment_samples), static_cast<std::uint64_t>(rep.moment_overflows),
           rep.proximality_slope, rep.proximality_slope_error, rep.proximality_detected, rep.irreducibility_flag,
           static_cast<std::uint64_t>(rep.n_steps), static_cast<std::uint64_t>(rep.n_reps), cfg.seed});
    w.close();
    log << "check: moment " << rep.moment_estimate << " +- " << rep.moment_std_error << ", proximality slope "
        << rep.proximality_slope << (rep.proximality_detected ? "" : " (proximality not detected)")
        << ", irreducibility " << (rep.irreducibility_flag ? "plausible" : "invariant lines found") << "\n";
    return 0;
}

int run_spectral(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    const ProjectiveGrid grid(cfg.m);
    const auto opts = cfg.spectral_options();
    CsvWriter w(out_file(cfg, "spectral.csv"), {"model_id", "s", "m", "kappa", "Lambda", "Lambda1", "Lambda2",
                                                "Lambda3", "residual", "iters", "seed"});
    for (double s : cfg.s_list) {
        const auto spec = solve_spectral(model, s, grid, opts);
        w.row({model.id(), s, static_cast<std::int64_t>(cfg.m), spec.kappa, spec.Lambda, spec.Lambda1, spec.Lambda2,
               spec.Lambda3, spec.residual, static_cast<std::uint64_t>(spec.iters), cfg.seed});
        log << "spectral: s=" << s << " kappa=" << spec.kappa << " Lambda'=" << spec.Lambda1
            << " Lambda''=" << spec.Lambda2 << " Lambda'''=" << spec.Lambda3 << "\n";
    }
    w.close();
    return 0;
}

int run_bias(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    const ProjectiveGrid grid(cfg.m);
    auto opts = cfg.spectral_options();
    opts.derivatives = false;
    const auto phis = config_phis(cfg, grid);
    const auto x = ProjectivePoint::from_angle(cfg.x_theta);
    const auto y = DualPoint::from_angle(cfg.y_theta);
    CsvWriter w(out_file(cfg, "bias.csv"),
                {"model_id", "s", "x_theta", "y_theta", "phi_id", "b_value", "d_value", "iters", "seed"});
    for (double s : cfg.s_list) {
        const BiasSolver solver(model, s, grid, opts);
        for (const auto& phi : phis) {
            const auto b = solver.b_values(phi, bias_options(cfg));
            const double bx = interpolate(grid, b.values, x.angle());
            const double d = solver.d(y, phi);
            w.row({model.id(), s, cfg.x_theta, cfg.y_theta, phi.id, bx, d, static_cast<std::uint64_t>(b.iters),
                   cfg.seed});
            log << "bias: s=" << s << " phi=" << phi.id << " b=" << bx << " d=" << d << "\n";
        }
    }
    w.close();
    return 0;
}

int run_walk(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    RngStream rng = experiment_stream(cfg.seed, "walk");
    const int d = model.dimension();
    Vector v0 = Vector::Zero(d), f = Vector::Zero(d);
    v0(0) = std::cos(cfg.x_theta);
    v0(1) = std::sin(cfg.x_theta);
    f(0) = std::cos(cfg.y_theta);
    f(1) = std::sin(cfg.y_theta);
    const ProjectivePoint x0(v0);
    const DualPoint y(f);
    CsvWriter w(out_file(cfg, "walk.csv"), {"step", "S_n", "theta", "log_delta", "seed"});
    const auto rec = walk_observed(model, x0, y, cfg.walk_steps, rng,
                                   [&](std::size_t k, const Matrix&, const WalkState& st) {
                                       const auto& u = st.direction();
                                       const ProjectivePoint xk(u);
                                       w.row({static_cast<std::uint64_t>(k), st.cocycle_sum(),
                                              line_angle(u(0), u(1)), log_delta(xk, y), cfg.seed});
                                   });
    w.close();
    log << "walk: n=" << rec.n << " S_n=" << rec.S << " S_n/n=" << rec.S / static_cast<double>(rec.n)
        << " log_coeff=" << rec.log_coeff() << "\n";
    return 0;
}

int run_edgeworth(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    const ProjectiveGrid grid(cfg.m);
    const auto opts = cfg.spectral_options();
    const auto phi = config_phis(cfg, grid).front();
    const auto x = ProjectivePoint::from_angle(cfg.x_theta);
    const auto y = DualPoint::from_angle(cfg.y_theta);
    const auto ts = t_grid(cfg.t_min, cfg.t_max, cfg.t_points);
    CsvWriter w(out_file(cfg, "ecdf.csv"), {"model_id", "s", "n", "t", "ecdf", "phi_ref", "edgeworth_ref", "seed"});
    for (std::size_t si = 0; si < cfg.s_list.size(); ++si) {
        const double s = cfg.s_list[si];
        const auto in = edgeworth_inputs(model, s, grid, opts, x, y, phi, bias_options(cfg));
        const auto samples = sample_coefficients(model, in, grid, x, y, phi, cfg.n_list, cfg.n_mc,
                                                 experiment_stream(cfg.seed, "coefficients", si), cfg.thread_count());
        for (const auto& cs : samples) {
            const auto ecdf = checkpoint_ecdf(cs);
            const auto p = in.params(cs.n);
            for (double t : ts)
                w.row({model.id(), s, static_cast<std::uint64_t>(cs.n), t, ecdf(t), in.mass * normal_cdf(t),
                       edgeworth_coeff_cdf(p, t), cfg.seed});
            log << "edgeworth: s=" << s << " n=" << cs.n << " written " << ts.size() << " t-points\n";
        }
    }
    w.close();
    return 0;
}

int run_berry_esseen(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = berry_esseen_experiment(cfg);
    CsvWriter w(out_file(cfg, "berry_esseen.csv"),
                {"model_id", "s", "n", "N_mc", "ks_phi", "ks_edgeworth", "ks_phi_sqrtn", "seed"});
    for (const auto& r : rows) {
        w.row({r.model_id, r.s, static_cast<std::uint64_t>(r.n), static_cast<std::uint64_t>(r.n_mc), r.ks_phi,
               r.ks_edgeworth, r.ks_phi_sqrtn, r.seed});
        log << "berry-esseen: s=" << r.s << " n=" << r.n << " ks_phi=" << r.ks_phi << " ks_edgeworth=" << r.ks_edgeworth
            << " sqrt(n) ks_phi=" << r.ks_phi_sqrtn << "\n";
    }
    w.close();
    return 0;
}

int run_sandwich(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& model = cfg.require_model();
    const ProjectiveGrid grid(cfg.m);
    const auto opts = cfg.spectral_options();
    const auto phi = config_phis(cfg, grid).front();
    for (double v : phi.values)
        if (v < 0.0) throw ConfigError("config key 'experiment.phi': the sandwich needs a nonnegative phi");
    const auto x = ProjectivePoint::from_angle(cfg.x_theta);
    const auto y = DualPoint::from_angle(cfg.y_theta);
    CsvWriter w(out_file(cfg, "sandwich.csv"),
                {"model_id", "s", "n", "t", "k", "F", "upper", "lower", "se_F", "se_upper", "se_lower", "ok", "W_n",
                 "w_tol", "seed"});
    int status = 0;
    for (std::size_t si = 0; si < cfg.s_list.size(); ++si) {
        const double s = cfg.s_list[si];
        const auto spec = solve_spectral(model, s, grid, opts);
        for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
            const std::size_t n = cfg.n_list[ni];
            if (n < 18) throw ConfigError("config key 'experiment.n': the sandwich needs n >= 18");
            const PartitionScheme scheme(n, cfg.A);
            TiltOptions to;
            to.threads = cfg.thread_count();
            const auto rep = sandwich_diagnostic(model, spec, grid, scheme, x, y, phi, cfg.t, cfg.n_mc,
                                                 experiment_stream(cfg.seed, "sandwich", si * 1000 + ni), to);
            for (const auto& r : rep.rows)
                w.row({model.id(), s, static_cast<std::uint64_t>(n), cfg.t, static_cast<std::int64_t>(r.k), r.F,
                       r.upper, r.lower, r.se_F, r.se_upper, r.se_lower, r.ok, rep.W_n, rep.w_tol, cfg.seed});
            log << "sandwich: s=" << s << " n=" << n << " M_n=" << rep.M_n << " W_n=" << rep.W_n
                << (rep.ok() ? " holds" : " VIOLATED") << "\n";
            if (!rep.ok()) status = 2;
        }
    }
    w.close();
    return status;
}

} // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name) {
    for (const auto& [cmd, n] : names())
        if (n == name) return cmd;
    return std::nullopt;
}

std::string to_string(Subcommand cmd) {
    for (const auto& [c, n] : names())
        if (c == cmd) return n;
    return "unknown";
}

RngStream experiment_stream(std::uint64_t seed, std::string_view experiment, std::uint64_t index) {
    return RngStream(seed, {tag_of(experiment), index});
}

std::vector<GridFunction> config_phis(const ExperimentConfig& cfg, const ProjectiveGrid& grid) {
    if (cfg.phi == "const") return {constant_function(grid, 1.0, "const")};
    const int modes = std::stoi(cfg.phi.substr(5));
    RngStream rng = experiment_stream(cfg.seed, "phi");
    std::vector<GridFunction> out;
    for (int i = 0; i < cfg.n_phi; ++i) {
        auto f = random_trig_function(grid, modes, rng, "trig" + std::to_string(i));
        // Shift to be nonnegative so the same phi feeds the sandwich and ECDF runs.
        const double lo = *std::min_element(f.values.begin(), f.values.end());
        if (lo < 0.0)
            for (auto& v : f.values) v -= lo;
        out.push_back(std::move(f));
    }
    return out;
}

EdgeworthParams EdgeworthInputs::params(std::size_t n) const {
    EdgeworthParams p;
    p.drift = spec.Lambda1;
    p.sigma = spec.sigma();
    p.skew = spec.Lambda3;
    p.bias_b = b;
    p.bias_d = d;
    p.mass = mass;
    p.n = n;
    return p;
}

EdgeworthInputs edgeworth_inputs(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                                 const SpectralOptions& opts, const ProjectivePoint& x, const DualPoint& y,
                                 const GridFunction& phi, const BiasOptions& bias) {
    SpectralOptions o = opts;
    o.derivatives = true;
    const BiasSolver solver(model, s, grid, o);
    EdgeworthInputs in;
    in.spec = solver.spectral();
    const auto b = solver.b_values(phi, bias);
    in.b = interpolate(grid, b.values, x.angle());
    in.b_iters = b.iters;
    in.d = solver.d(y, phi);
    in.mass = solver.mass(phi);
    return in;
}

std::vector<CheckpointSamples> sample_coefficients(const MatrixModel& model, const EdgeworthInputs& in,
                                                   const ProjectiveGrid& grid, const ProjectivePoint& x,
                                                   const DualPoint& y, const GridFunction& phi,
                                                   const std::vector<std::size_t>& horizons, std::size_t n_mc,
                                                   const RngStream& rng, unsigned threads) {
    if (horizons.empty()) throw DomainError("sample_coefficients needs at least one horizon");
    if (!std::is_sorted(horizons.begin(), horizons.end())) throw DomainError("horizons must be increasing");
    const auto& spec = in.spec;
    const double drift = spec.Lambda1;
    const double sigma = spec.sigma();
    const bool const_phi =
        std::all_of(phi.values.begin(), phi.values.end(), [&](double v) { return v == phi.values.front(); });
    const bool unit = spec.s == 0.0 && const_phi && phi.values.front() == 1.0;
    const std::size_t H = horizons.size();

    std::vector<CheckpointSamples> out(H);
    std::vector<std::vector<double>> log_w(H);
    for (std::size_t c = 0; c < H; ++c) {
        out[c].n = horizons[c];
        out[c].unit_weights = unit;
        out[c].z.resize(n_mc);
        if (!unit) {
            out[c].weight.resize(n_mc);
            log_w[c].resize(n_mc);
        }
    }
    const std::size_t n_blocks = (n_mc + kBlock - 1) / kBlock;
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        RngStream st = rng.split(b);
        const std::size_t lo = b * kBlock, hi = std::min(n_mc, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            WalkState ws(x);
            std::size_t done = 0;
            for (std::size_t c = 0; c < H; ++c) {
                for (; done < horizons[c]; ++done) ws.step(model.sample(st));
                const ProjectivePoint xn = ws.point();
                const double S = ws.cocycle_sum();
                const double ld = log_delta(xn, y);
                const double n = static_cast<double>(horizons[c]);
                out[c].z[i] = (S + ld - n * drift) / (sigma * std::sqrt(n));
                if (!unit) {
                    log_w[c][i] = path_weight(spec, grid, x, xn, S, horizons[c]).log_w;
                    out[c].weight[i] = interpolate(grid, phi.values, xn.angle());
                }
            }
        }
    });
    for (std::size_t c = 0; c < H; ++c) {
        auto& cs = out[c];
        cs.degenerate = static_cast<std::size_t>(
            std::count_if(cs.z.begin(), cs.z.end(), [](double z) { return !std::isfinite(z); }));
        if (unit) continue;
        const double shift = *std::max_element(log_w[c].begin(), log_w[c].end());
        std::vector<double> w(n_mc);
        for (std::size_t i = 0; i < n_mc; ++i) w[i] = std::exp(log_w[c][i] - shift);
        const double mean_w = pairwise_sum(w) / static_cast<double>(n_mc);
        for (std::size_t i = 0; i < n_mc; ++i) cs.weight[i] *= w[i] / mean_w;
    }
    return out;
}

EcdfTable checkpoint_ecdf(const CheckpointSamples& cs) {
    if (cs.unit_weights) return EcdfTable(cs.z);
    return EcdfTable(cs.z, cs.weight, static_cast<double>(cs.z.size()));
}

std::vector<BerryEsseenRow> berry_esseen_experiment(const ExperimentConfig& cfg) {
    const auto& model = cfg.require_model();
    const ProjectiveGrid grid(cfg.m);
    const auto opts = cfg.spectral_options();
    const auto phi = config_phis(cfg, grid).front();
    const auto x = ProjectivePoint::from_angle(cfg.x_theta);
    const auto y = DualPoint::from_angle(cfg.y_theta);
    std::vector<BerryEsseenRow> rows;
    for (std::size_t si = 0; si < cfg.s_list.size(); ++si) {
        const double s = cfg.s_list[si];
        const auto in = edgeworth_inputs(model, s, grid, opts, x, y, phi, bias_options(cfg));
        const auto samples = sample_coefficients(model, in, grid, x, y, phi, cfg.n_list, cfg.n_mc,
                                                 experiment_stream(cfg.seed, "coefficients", si), cfg.thread_count());
        for (const auto& cs : samples) {
            const auto ecdf = checkpoint_ecdf(cs);
            const auto p = in.params(cs.n);
            BerryEsseenRow r;
            r.model_id = model.id();
            r.s = s;
            r.n = cs.n;
            r.n_mc = cfg.n_mc;
            r.ks_phi = ecdf_ks(ecdf, [&](double t) { return in.mass * normal_cdf(t); });
            r.ks_edgeworth = ecdf_ks(ecdf, [&](double t) { return edgeworth_coeff_cdf(p, t); });
            r.ks_phi_sqrtn = std::sqrt(static_cast<double>(cs.n)) * r.ks_phi;
            r.seed = cfg.seed;
            rows.push_back(r);
        }
    }
    return rows;
}

int run(const ExperimentConfig& cfg, Subcommand cmd, std::ostream& log) {
    switch (cmd) {
    case Subcommand::check: return run_check(cfg, log);
    case Subcommand::spectral: return run_spectral(cfg, log);
    case Subcommand::bias: return run_bias(cfg, log);
    case Subcommand::walk: return run_walk(cfg, log);
    case Subcommand::edgeworth: return run_edgeworth(cfg, log);
    case Subcommand::berry_esseen: return run_berry_esseen(cfg, log);
    case Subcommand::sandwich: return run_sandwich(cfg, log);
    }
    return 1;
}

} // namespace glcoef::harness
