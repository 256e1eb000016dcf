#include "sncc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"

#include "sncc/entanglement.hpp"
#include "sncc/filters.hpp"
#include "sncc/grid.hpp"
#include "sncc/output.hpp"
#include "sncc/spectra.hpp"
#include "sncc/spectral_estimate.hpp"
#include "sncc/trajectory.hpp"
#include "sncc/verify.hpp"

namespace sncc {

using nlohmann::json;

namespace {

struct CurveCase {
    Theory theory;
    ThermalBath bath;
    std::optional<double> temperature_K;
    std::string tag;
};

std::vector<CurveCase> curve_cases(const RunConfig& cfg) {
    std::vector<CurveCase> out;
    for (Theory t : cfg.theories)
        for (ThermalBath b : cfg.baths) {
            if (cfg.temp_ladder_K.empty()) {
                out.push_back({t, b, std::nullopt, to_string(t) + "_" + to_string(b)});
                continue;
            }
            for (std::size_t k = 0; k < cfg.temp_ladder_K.size(); ++k)
                out.push_back({t, b, cfg.temp_ladder_K[k], to_string(t) + "_" + to_string(b) + "_t" + std::to_string(k)});
        }
    return out;
}

WorkingParams case_params(const RunConfig& cfg, const CurveCase& c) {
    PhysicalParams p = cfg.params;
    p.theory = c.theory;
    p.bath = c.bath;
    if (c.temperature_K) p.theta_T = temperature_to_theta_T(*c.temperature_K);
    return derive_working_params(p);
}

json case_meta(const CurveCase& c, const WorkingParams& wp) {
    json m;
    m["theory"] = to_string(c.theory);
    m["bath"] = to_string(c.bath);
    m["temperature_K"] = c.temperature_K ? json(*c.temperature_K) : json(nullptr);
    m["theta_T"] = wp.theta_T;
    m["working_params"] = {{"omega_m", wp.omega_m},   {"gamma_m", wp.gamma_m}, {"omega_q", wp.omega_q},
                           {"omega_grav", wp.omega_grav}, {"lambda", wp.lambda}, {"lambda_tilde", wp.lambda_tilde},
                           {"theta", wp.theta},       {"theta_T", wp.theta_T}};
    return m;
}

void report(std::ostream& out, const std::vector<std::string>& files) {
    for (const auto& f : files) out << f << '\n';
}

void run_spectrum(const RunConfig& cfg, std::ostream& out) {
    if (cfg.params.protocol != Protocol::SelfGravity)
        throw ConfigError("spectrum: self-gravity parameters required (use negativity for mutual gravity)");
    for (const CurveCase& c : curve_cases(cfg)) {
        const WorkingParams wp = case_params(cfg, c);
        Table t;
        t.name = "spectrum_" + c.tag;
        t.columns = {"freq_hz", "S", "shot_backaction", "bath", "sn_line", "det_V", "det_V_closed"};
        t.meta = case_meta(c, wp);
        for (double w : make_grid(*cfg.grid, wp)) {
            const SpectrumParts s = spectrum_self_parts(wp, w);
            const SelfCovariance v = covariance_self(wp, w);
            t.rows.push_back({w / kTwoPi, s.total, s.shot_backaction, s.bath, s.sn_line, v.det, v.det_closed});
        }
        report(out, write_table(cfg, t));
    }
}

void run_negativity(const RunConfig& cfg, std::ostream& out) {
    if (cfg.params.protocol != Protocol::MutualGravity)
        throw ConfigError("negativity: mutual-gravity parameters required");
    for (const CurveCase& c : curve_cases(cfg)) {
        const WorkingParams wp = case_params(cfg, c);
        Table t;
        t.name = "negativity_" + c.tag;
        t.columns = {"freq_hz", "N", "eps_N", "Sigma", "det_sigma"};
        t.meta = case_meta(c, wp);
        if (c.theory == Theory::SN && wp.thermal_force() > 0.0)
            t.meta["bath_extrapolated"] = "thermal force added per mirror with the single-mirror pattern";
        for (double w : make_grid(*cfg.grid, wp)) {
            const NegativityResult n = log_negativity_from_map(mutual_output_map(wp, w));
            t.rows.push_back({w / kTwoPi, n.n_raw, n.eps_n, n.sigma, n.det});
        }
        report(out, write_table(cfg, t));
    }
}

double zscore(double mean, double expected, double se) { return se > 0.0 ? (mean - expected) / se : 0.0; }

void run_trajectory(const RunConfig& cfg, std::ostream& out) {
    PhysicalParams p = cfg.params;
    p.theory = cfg.theories.front();
    p.bath = cfg.baths.front();
    if (!cfg.temp_ladder_K.empty()) p.theta_T = temperature_to_theta_T(cfg.temp_ladder_K.front());
    const WorkingParams wp = derive_working_params(p);
    const EnsembleConfig& e = cfg.ensemble;
    const bool mutual = wp.protocol == Protocol::MutualGravity;
    const CurveCase cc{p.theory, p.bath, cfg.temp_ladder_K.empty() ? std::nullopt : std::optional(cfg.temp_ladder_K.front()), ""};

    RecordSpec rs;
    rs.samples = e.samples;
    rs.dt = e.dt;
    rs.seed = cfg.seed;
    rs.integrator = e.integrator;

    if (e.trajectories > 1 && e.segment == 0) throw ConfigError("trajectory: an ensemble needs a periodogram segment");
    if (e.segment > 0 && e.samples < e.segment)
        throw ConfigError("trajectory: duration too short for the requested spectral resolution");

    std::optional<MeasurementRecord> rec;
    if (e.trajectories == 1) {
        rec = simulate_record(wp, rs, 0);
        Table t;
        t.name = "record";
        t.columns = {"time_s"};
        for (const auto& ch : rec->channels) t.columns.push_back(ch);
        t.meta = case_meta(cc, wp);
        t.meta["dt"] = rec->dt;
        t.meta["duration_s"] = rec->duration();
        t.meta["channel_seeds"] = rec->channel_seeds;
        t.meta["normalization"] = "samples scaled so a white record has two-sided density 1";
        t.meta["integrator"] = to_string(e.integrator);
        for (std::size_t k = 0; k < rec->samples[0].size(); ++k) {
            std::vector<double> row{static_cast<double>(k) * rec->dt};
            for (const auto& ch : rec->samples) row.push_back(ch[k]);
            t.rows.push_back(std::move(row));
        }
        report(out, write_table(cfg, t));
    }
    if (e.segment == 0) return;

    SpectrumEstimate est;
    try {
        if (e.trajectories == 1) {
            est = estimate_spectrum(*rec, e.segment);
        } else {
            EnsembleSpec es;
            es.trajectories = e.trajectories;
            es.samples = e.samples;
            es.segment = e.segment;
            es.dt = e.dt;
            es.seed = cfg.seed;
            es.integrator = e.integrator;
            es.threads = e.threads;
            est = ensemble_spectrum(wp, es);
        }
    } catch (const RecordTooShort& ex) {
        throw ConfigError(std::string("trajectory: duration too short for the requested spectral resolution: ") +
                          ex.what());
    }

    Table t;
    t.name = "periodogram";
    t.meta = case_meta(cc, wp);
    t.meta["dt"] = e.dt;
    t.meta["segment"] = e.segment;
    t.meta["averages"] = est.units;
    t.meta["integrator"] = to_string(e.integrator);
    const std::size_t bins = est.omega.size();
    if (!mutual) {
        t.columns = {"freq_hz", "S_mean", "S_se", "S_expected", "z"};
        t.meta["expected"] = "exact expectation of the windowed estimator for the analytic spectrum";
        const std::vector<double> ex = expected_periodogram(self_line_shape(wp), e.dt, e.segment);
        for (std::size_t k = 0; k < bins; ++k) {
            const double m = est.auto_mean[0][k], se = est.auto_se[0][k];
            t.rows.push_back({est.omega[k] / kTwoPi, m, se, ex[k], zscore(m, ex[k], se)});
        }
    } else {
        t.columns = {"freq_hz", "SA_mean", "SA_se",     "SB_mean",  "SB_se",    "SAB_re",   "SAB_re_se",
                     "SAB_im",  "SAB_im_se", "S_analytic", "SAB_re_analytic", "SAB_im_analytic", "zA", "zB",
                     "zAB_re",  "zAB_im"};
        t.meta["expected"] = "analytic spectra at the bin centre times the sample-averaging response";
        for (std::size_t k = 0; k < bins; ++k) {
            const double w = est.omega[k];
            const double x = 0.5 * w * e.dt;
            const double h = x == 0.0 ? 1.0 : std::pow(std::sin(x) / x, 2);
            const auto [saa, sab] = mutual_record_spectra(wp, w);
            const double sa = 1.0 + (saa - 1.0) * h;
            const cplx cab = sab * h;
            const double ma = est.auto_mean[0][k], mb = est.auto_mean[1][k];
            const cplx mc = est.cross_mean[k];
            t.rows.push_back({w / kTwoPi, ma, est.auto_se[0][k], mb, est.auto_se[1][k], mc.real(),
                              est.cross_se_re[k], mc.imag(), est.cross_se_im[k], sa, cab.real(), cab.imag(),
                              zscore(ma, sa, est.auto_se[0][k]), zscore(mb, sa, est.auto_se[1][k]),
                              zscore(mc.real(), cab.real(), est.cross_se_re[k]),
                              zscore(mc.imag(), cab.imag(), est.cross_se_im[k])});
        }
    }
    report(out, write_table(cfg, t));
}

void run_filters(const RunConfig& cfg, std::ostream& out) {
    PhysicalParams p = cfg.params;
    p.theory = cfg.theories.front();
    p.bath = cfg.baths.front();
    if (!cfg.temp_ladder_K.empty()) p.theta_T = temperature_to_theta_T(cfg.temp_ladder_K.front());
    const WorkingParams wp = derive_working_params(p);
    const bool mutual = wp.protocol == Protocol::MutualGravity;
    const CurveCase cc{p.theory, p.bath, cfg.temp_ladder_K.empty() ? std::nullopt : std::optional(cfg.temp_ladder_K.front()), ""};
    const std::vector<double> grid = make_grid(*cfg.grid, wp);
    const FilterModel f(wp);

    for (const std::string& label : cfg.filters) {
        std::function<cplx(double)> k;
        if (label == "wiener") {
            k = [&](double w) { return f.wiener(w); };
        } else if (label == "kalman_full") {
            k = [&](double w) { return f.kalman_full(w); };
        } else if (label == "kalman_quantum") {
            k = [&](double w) { return f.kalman_quantum(w); };
        } else if (label == "k_aa" || label == "k_ab") {
            if (!mutual) throw ConfigError("filters: " + label + " needs mutual-gravity parameters");
            const WorkingParams w2 = with_theta(wp, std::numbers::pi / 2);
            k = [w2, label](double w) {
                const MutualFilters m = mutual_filters(w2, w);
                return label == "k_aa" ? m.k_aa : m.k_ab;
            };
        } else {
            throw ConfigError("filters: unknown filter '" + label + "' (wiener, kalman_full, kalman_quantum, k_aa, k_ab)");
        }
        const FilterFrequencyResponse r = sample_filter(label, grid, k);
        Table t;
        t.name = "filter_" + label;
        t.columns = {"freq_hz", "re_K", "im_K", "abs_K"};
        t.meta = case_meta(cc, wp);
        t.meta["filter"] = label;
        t.meta["units"] = "reduced (hbar = M = 1): K maps the record onto the position estimate";
        if (label == "k_aa" || label == "k_ab") t.meta["theta_used"] = std::numbers::pi / 2;
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.rows.push_back({grid[i] / kTwoPi, r.value[i].real(), r.value[i].imag(), std::abs(r.value[i])});
        report(out, write_table(cfg, t));
    }
}

int run_verify_cmd(const RunConfig& cfg, std::ostream& out) {
    VerifyOptions o;
    o.draws = cfg.verify.draws;
    o.grid_points = cfg.verify.grid_points;
    o.seed = cfg.seed;
    o.perturb_beta = cfg.verify.perturb_beta;
    const VerifyReport rep = run_verify(o);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string file = "verify_report.json";
    const fs::path path = fs::path(cfg.out_dir) / file;
    write_text(path.string(), rep.to_json().dump(2) + "\n");
    Table t;
    t.name = "verify_report";
    t.meta = {{"identities", rep.identities.size()}, {"passed", rep.passed()}};
    write_text(path.string() + ".meta.json", sidecar(cfg, t, file).dump(2) + "\n");

    out << std::left << std::setw(24) << "identity" << std::setw(14) << "max_residual" << std::setw(10)
        << "tolerance" << "status\n";
    for (const auto& r : rep.identities) {
        out << std::setw(24) << r.name << std::setw(14) << std::setprecision(3) << std::scientific << r.max_residual
            << std::setw(10) << std::setprecision(0) << r.tolerance << (r.passed ? "pass" : "FAIL") << '\n';
    }
    out << std::defaultfloat << std::setprecision(6);
    out << "roots:\n";
    for (const auto& row : rep.root_table) out << "  " << row.dump() << '\n';
    out << path.string() << '\n';
    return rep.passed() ? kExitOk : kExitVerify;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("SNCC_OUT_DIR"); env && *env) return env;
    return "sncc_out";
}

}  // namespace

RunConfig resolve_config(RunConfig cfg) {
    if (!cfg.params_given) {
        cfg.params = cfg.subcommand == "negativity" ? table2_params() : table1_params();
        cfg.params_given = true;
    }
    validate_config(cfg);
    if (cfg.theories.empty()) {
        if (cfg.subcommand == "spectrum" || cfg.subcommand == "negativity") cfg.theories = {Theory::SN, Theory::QG};
        else cfg.theories = {cfg.params.theory};
    }
    if (cfg.baths.empty()) cfg.baths = {cfg.params.bath};
    bool any_bath = false;
    for (ThermalBath b : cfg.baths) any_bath |= b != ThermalBath::None;
    for (double t : cfg.temp_ladder_K)
        if (t > 0.0 && !any_bath) throw ConfigError("a temperature ladder needs a thermal bath (--bath quantum|classical)");
    const WorkingParams wp = derive_working_params(cfg.params);
    if (!cfg.grid) cfg.grid = default_grid(wp);
    if (cfg.ensemble.dt == 0.0) cfg.ensemble.dt = max_stable_dt(wp);
    if (cfg.filters.empty()) {
        if (wp.protocol == Protocol::MutualGravity) cfg.filters = {"wiener", "k_aa", "k_ab"};
        else cfg.filters = {"wiener", "kalman_full", "kalman_quantum"};
    }
    if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
    return cfg;
}

int execute(const RunConfig& cfg, std::ostream& out) {
    try {
        if (cfg.subcommand == "spectrum") run_spectrum(cfg, out);
        else if (cfg.subcommand == "negativity") run_negativity(cfg, out);
        else if (cfg.subcommand == "trajectory") run_trajectory(cfg, out);
        else if (cfg.subcommand == "filters") run_filters(cfg, out);
        else if (cfg.subcommand == "verify") return run_verify_cmd(cfg, out);
        else throw ConfigError("unknown subcommand: '" + cfg.subcommand + "'");
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conditional dynamics of gravitationally coupled optomechanical systems", "sncc"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_path, preset, protocol, grid, integrator, out_dir;
    std::vector<std::string> theories, baths, filters, emit;
    std::vector<double> ladder;
    std::optional<double> theta, lambda, dt, perturb;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trajectories, samples, segment, draws, grid_points;
    std::optional<unsigned> threads;
    bool no_refine = false;

    app.add_option("--config", config_path, "JSON run config, or a sidecar to replay")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "base parameters")->check(CLI::IsMember({"table1", "table2"}));
    app.add_option("--theory", theories, "sn, qg (comma list)")->delimiter(',')->check(CLI::IsMember({"sn", "qg"}));
    app.add_option("--bath", baths, "none, quantum, classical (comma list)")
        ->delimiter(',')
        ->check(CLI::IsMember({"none", "quantum", "classical"}));
    app.add_option("--protocol", protocol, "self or mutual")->check(CLI::IsMember({"self", "mutual"}));
    app.add_option("--theta", theta, "homodyne angle [rad]");
    app.add_option("--lambda", lambda, "measurement strength [rad/s]");
    app.add_option("--temp-ladder", ladder, "temperatures [K] (comma list)")->delimiter(',');
    app.add_option("--grid", grid, "MIN:MAX:N[:log|:lin] in Hz");
    app.add_flag("--no-refine", no_refine, "no extra points around the resonances");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trajectories", trajectories, "ensemble size");
    app.add_option("--samples", samples, "samples per trajectory");
    app.add_option("--segment", segment, "periodogram length");
    app.add_option("--dt", dt, "sample interval [s]");
    app.add_option("--integrator", integrator, "exact or euler-maruyama")->check(CLI::IsMember({"exact", "euler-maruyama", "em"}));
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_option("--draws", draws, "verify: random parameter draws");
    app.add_option("--grid-points", grid_points, "verify: points per frequency grid");
    app.add_option("--perturb-beta", perturb, "verify: relative perturbation of beta (negative control)");
    app.add_option("--filter", filters, "filters: wiener, kalman_full, kalman_quantum, k_aa, k_ab")->delimiter(',');
    app.add_option("--emit", emit, "csv, json (comma list)")->delimiter(',')->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_dir, "output directory (default $SNCC_OUT_DIR or ./sncc_out)");

    app.add_subcommand("spectrum", "record spectra and det V curves (self gravity)");
    app.add_subcommand("negativity", "logarithmic negativity curves (mutual gravity)");
    app.add_subcommand("trajectory", "measurement records and ensemble periodograms");
    app.add_subcommand("verify", "identity suites over random parameter draws");
    app.add_subcommand("filters", "sampled filter responses");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "sncc: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!app.get_subcommands().empty()) cfg.subcommand = app.get_subcommands().front()->get_name();
        if (cfg.subcommand.empty()) throw ConfigError("no subcommand given");
        if (!preset.empty()) {
            cfg.params = preset_params(preset);
            cfg.params_given = true;
        }
        if (!protocol.empty()) {
            const Protocol pr = protocol_from_string(protocol);
            if (!cfg.params_given) {
                cfg.params = pr == Protocol::SelfGravity ? table1_params() : table2_params();
                cfg.params_given = true;
            }
            cfg.params.protocol = pr;
        }
        if (!cfg.params_given) {
            cfg.params = cfg.subcommand == "negativity" ? table2_params() : table1_params();
            cfg.params_given = true;
        }
        if (theta) cfg.params.theta = *theta;
        if (lambda) {
            cfg.params.lambda = *lambda;
            cfg.params.alpha.reset();
        }
        if (!theories.empty()) {
            cfg.theories.clear();
            for (const auto& t : theories) cfg.theories.push_back(theory_from_string(t));
            if (cfg.theories.size() == 1) cfg.params.theory = cfg.theories.front();
        }
        if (!baths.empty()) {
            cfg.baths.clear();
            for (const auto& b : baths) cfg.baths.push_back(bath_from_string(b));
            if (cfg.baths.size() == 1) cfg.params.bath = cfg.baths.front();
        }
        if (!ladder.empty()) cfg.temp_ladder_K = ladder;
        if (!grid.empty()) cfg.grid = parse_grid(grid);
        if (no_refine) {
            if (!cfg.grid) cfg.grid = default_grid(derive_working_params(cfg.params));
            cfg.grid->refine = false;
        }
        if (seed) cfg.seed = *seed;
        if (trajectories) cfg.ensemble.trajectories = *trajectories;
        if (samples) cfg.ensemble.samples = *samples;
        if (segment) cfg.ensemble.segment = *segment;
        if (dt) cfg.ensemble.dt = *dt;
        if (!integrator.empty()) cfg.ensemble.integrator = integrator_from_string(integrator);
        if (threads) cfg.ensemble.threads = *threads;
        if (draws) cfg.verify.draws = *draws;
        if (grid_points) cfg.verify.grid_points = *grid_points;
        if (perturb) cfg.verify.perturb_beta = *perturb;
        if (!filters.empty()) cfg.filters = filters;
        if (!emit.empty()) cfg.emit = emit;
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        return execute(resolve_config(cfg), out);
    } catch (const ConfigError& e) {
        err << "sncc: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "sncc: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "sncc: error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace sncc
