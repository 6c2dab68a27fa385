// Command-line front end: generation, exact oracles, phase diagram,
// decomposition pipeline, and the experiment harness. One binary, subcommand
// dispatch; exit 0 on success, 2 on parameter errors, 3 on capacity errors.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyco/decomposition.hpp"
#include "hyco/enumeration.hpp"
#include "hyco/experiments.hpp"
#include "hyco/hypergraph.hpp"
#include "hyco/moments.hpp"
#include "hyco/phase.hpp"
#include "hyco/planted.hpp"

using nlohmann::json;

namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("HYCO_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return unsigned(v);
    }
    return 1;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw hyco::parameter_error("cannot open output file: " + path);
    os << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

hyco::Hypergraph load_hypergraph(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw hyco::parameter_error("cannot open hypergraph file: " + path);
    return hyco::parse_hypergraph(is);
}

hyco::Coloring load_coloring(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw hyco::parameter_error("cannot open coloring file: " + path);
    return hyco::parse_coloring(is);
}

hyco::Thresholds pick_thresholds(const std::string& profile, unsigned k) {
    if (profile == "paper") return hyco::Thresholds::paper_defaults(k);
    if (profile == "scaled") return hyco::Thresholds::scaled(k);
    throw hyco::parameter_error("unknown threshold profile: " + profile);
}

// d from either an explicit value or an offset from the critical line,
// d/k = 2^{k-1} ln2 - ln2 + c with c given in units of ln2.
double resolve_d(std::optional<double> d, std::optional<double> c_over_ln2, unsigned k) {
    if (d && c_over_ln2)
        throw hyco::parameter_error("give either --d or --c-over-ln2, not both");
    if (d) return *d;
    if (c_over_ln2) {
        const double ln2 = std::log(2.0);
        return double(k) * (std::ldexp(ln2, int(k) - 1) - ln2 + *c_over_ln2 * ln2);
    }
    throw hyco::parameter_error("one of --d or --c-over-ln2 is required");
}

std::string regime_name(const hyco::Regime& r) {
    switch (r.kind) {
    case hyco::Regime::Kind::below_line: return "below_line";
    case hyco::Regime::Kind::transition_line: return "transition_line";
    case hyco::Regime::Kind::indeterminate_band: return "indeterminate_band";
    }
    return "?";
}

json report_json(const hyco::ExperimentReport& rep) { return rep.to_json(); }

std::string report_text(const hyco::ExperimentReport& rep, const std::string& format) {
    if (format == "json") return dump(report_json(rep));
    std::ostringstream os;
    os << std::setprecision(17);
    rep.write_csv(os);
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random hypergraph 2-coloring toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // allow global flags like --threads after the subcommand

    unsigned threads = default_threads();
    app.add_option("--threads", threads, "worker thread count (env HYCO_THREADS)")
        ->capture_default_str();

    std::string out = "-", format = "json";
    std::uint64_t seed = 1;

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a random hypergraph");
    std::string gen_model = "gnm";
    std::uint32_t gen_n = 0;
    unsigned gen_k = 3;
    std::optional<double> gen_d;
    std::optional<std::uint64_t> gen_m;
    double gen_beta = 0.0;
    bool gen_balanced = false;
    std::string gen_sigma_out;
    gen->add_option("--model", gen_model, "gnp | gnm | gnm_rep | planted")
        ->capture_default_str();
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--k", gen_k, "edge arity")->required();
    gen->add_option("--d", gen_d, "mean-degree parameter");
    gen->add_option("--m", gen_m, "edge count (alternative to --d)");
    gen->add_option("--beta", gen_beta, "inverse temperature (planted model)");
    gen->add_flag("--balanced", gen_balanced, "condition planted coloring on balance");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", out, "output path (- for stdout)");
    gen->add_option("--sigma-out", gen_sigma_out, "planted coloring output path");

    // ---- exact ----
    auto* exact = app.add_subcommand("exact", "exact partition function by enumeration");
    std::string exact_in, exact_selector = "all";
    double exact_beta = 0.0, exact_eps = 0.1;
    std::uint32_t exact_cap = hyco::default_enumeration_cap;
    exact->add_option("--in", exact_in, "hypergraph file")->required();
    exact->add_option("--beta", exact_beta, "inverse temperature")->required();
    exact->add_option("--selector", exact_selector, "all | balanced | imbalanced | energy-window")
        ->capture_default_str();
    exact->add_option("--eps", exact_eps, "selector fraction")->capture_default_str();
    exact->add_option("--cap", exact_cap, "enumeration cap")->capture_default_str();
    exact->add_option("--out", out, "output path");

    // ---- cluster ----
    auto* cluster = app.add_subcommand("cluster", "exact cluster size around a coloring");
    std::string cluster_in, cluster_sigma;
    double cluster_beta = 0.0, cluster_theta = 2.0 / 3.0;
    std::uint32_t cluster_cap = hyco::default_enumeration_cap;
    cluster->add_option("--in", cluster_in, "hypergraph file")->required();
    cluster->add_option("--coloring", cluster_sigma, "reference coloring file")->required();
    cluster->add_option("--beta", cluster_beta, "inverse temperature")->required();
    cluster->add_option("--theta", cluster_theta, "overlap threshold")->capture_default_str();
    cluster->add_option("--cap", cluster_cap, "enumeration cap")->capture_default_str();
    cluster->add_option("--out", out, "output path");

    // ---- moments ----
    auto* moments = app.add_subcommand("moments", "exact moment closed forms");
    std::uint32_t mom_n = 0;
    unsigned mom_k = 3;
    double mom_d = 0.0, mom_beta = 0.0;
    std::optional<double> mom_alpha;
    moments->add_option("--n", mom_n, "vertex count")->required();
    moments->add_option("--k", mom_k, "edge arity")->required();
    moments->add_option("--d", mom_d, "mean-degree parameter")->required();
    moments->add_option("--beta", mom_beta, "inverse temperature")->required();
    moments->add_option("--alpha", mom_alpha, "overlap fraction for the second moment");
    moments->add_option("--out", out, "output path");

    // ---- phase ----
    auto* phase = app.add_subcommand("phase", "phase point: sigma, bound, gap, regime");
    unsigned ph_k = 3;
    std::optional<double> ph_d, ph_c;
    double ph_beta = 0.0, ph_band = -1.0;
    phase->add_option("--k", ph_k, "edge arity")->required();
    phase->add_option("--d", ph_d, "mean-degree parameter");
    phase->add_option("--c-over-ln2", ph_c, "offset from the critical line, units of ln2");
    phase->add_option("--beta", ph_beta, "inverse temperature")->required();
    phase->add_option("--band", ph_band, "indeterminate band width (default k^4 2^-k)");
    phase->add_option("--out", out, "output path");

    // ---- scan-alpha ----
    auto* scan = app.add_subcommand("scan-alpha", "grid of Lambda and derivatives");
    unsigned sc_k = 3;
    std::optional<double> sc_d, sc_c;
    double sc_beta = 0.0;
    std::size_t sc_points = 2001;
    scan->add_option("--k", sc_k, "edge arity")->required();
    scan->add_option("--d", sc_d, "mean-degree parameter");
    scan->add_option("--c-over-ln2", sc_c, "offset from the critical line, units of ln2");
    scan->add_option("--beta", sc_beta, "inverse temperature")->required();
    scan->add_option("--points", sc_points, "grid resolution")->capture_default_str();
    scan->add_option("--out", out, "output path (CSV)");

    // ---- beta-crit ----
    auto* bcrit = app.add_subcommand("beta-crit", "critical inverse temperature");
    unsigned bc_k = 3;
    std::optional<double> bc_d, bc_c;
    double bc_tol = 1e-12;
    bcrit->add_option("--k", bc_k, "edge arity")->required();
    bcrit->add_option("--d", bc_d, "mean-degree parameter");
    bcrit->add_option("--c-over-ln2", bc_c, "offset from the critical line, units of ln2");
    bcrit->add_option("--tol", bc_tol, "bisection tolerance on sigma")->capture_default_str();
    bcrit->add_option("--out", out, "output path");

    // ---- decompose ----
    auto* dec = app.add_subcommand("decompose", "core/backbone/rest/free decomposition");
    std::string dec_in, dec_sigma, dec_profile = "paper";
    double dec_beta = 0.0, dec_d = 0.0;
    bool dec_trace = false;
    dec->add_option("--in", dec_in, "hypergraph file")->required();
    dec->add_option("--coloring", dec_sigma, "coloring file")->required();
    dec->add_option("--beta", dec_beta, "inverse temperature")->required();
    dec->add_option("--d", dec_d, "mean-degree parameter (metadata only)");
    dec->add_option("--thresholds", dec_profile, "paper | scaled")->capture_default_str();
    dec->add_flag("--trace", dec_trace, "include the peel trace");
    dec->add_option("--out", out, "output path");

    // ---- census ----
    auto* census = app.add_subcommand("census", "planted decomposition census");
    std::uint32_t ce_n = 0;
    unsigned ce_k = 3;
    double ce_d = 0.0, ce_beta = 0.0;
    std::size_t ce_trials = 10;
    std::string ce_profile = "paper";
    census->add_option("--n", ce_n, "vertex count")->required();
    census->add_option("--k", ce_k, "edge arity")->required();
    census->add_option("--d", ce_d, "mean-degree parameter")->required();
    census->add_option("--beta", ce_beta, "inverse temperature")->required();
    census->add_option("--trials", ce_trials, "trial count")->capture_default_str();
    census->add_option("--seed", seed, "RNG seed");
    census->add_option("--thresholds", ce_profile, "paper | scaled")->capture_default_str();
    census->add_option("--format", format, "json | csv")->capture_default_str();
    census->add_option("--out", out, "output path");

    // ---- gap-scan ----
    auto* gap = app.add_subcommand("gap-scan", "condensation gap along a beta grid");
    std::uint32_t gp_n = 0;
    unsigned gp_k = 3;
    std::optional<double> gp_d, gp_c;
    double gp_lo = 0.0, gp_hi = 0.0;
    std::size_t gp_points = 11, gp_trials = 1;
    std::string gp_profile = "paper";
    gap->add_option("--n", gp_n, "vertex count")->required();
    gap->add_option("--k", gp_k, "edge arity")->required();
    gap->add_option("--d", gp_d, "mean-degree parameter");
    gap->add_option("--c-over-ln2", gp_c, "offset from the critical line, units of ln2");
    gap->add_option("--beta-min", gp_lo, "grid start")->required();
    gap->add_option("--beta-max", gp_hi, "grid end")->required();
    gap->add_option("--points", gp_points, "grid size")->capture_default_str();
    gap->add_option("--trials", gp_trials, "trials per grid point")->capture_default_str();
    gap->add_option("--seed", seed, "RNG seed");
    gap->add_option("--thresholds", gp_profile, "paper | scaled")->capture_default_str();
    gap->add_option("--format", format, "json | csv")->capture_default_str();
    gap->add_option("--out", out, "output path");

    // ---- planted-null ----
    auto* pn = app.add_subcommand("planted-null", "planted vs null free entropy");
    std::uint32_t pn_n = 0;
    unsigned pn_k = 3;
    double pn_d = 0.0, pn_beta = 0.0;
    std::size_t pn_trials = 100;
    pn->add_option("--n", pn_n, "vertex count")->required();
    pn->add_option("--k", pn_k, "edge arity")->required();
    pn->add_option("--d", pn_d, "mean-degree parameter")->required();
    pn->add_option("--beta", pn_beta, "inverse temperature")->required();
    pn->add_option("--trials", pn_trials, "trial count")->capture_default_str();
    pn->add_option("--seed", seed, "RNG seed");
    pn->add_option("--format", format, "json | csv")->capture_default_str();
    pn->add_option("--out", out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            double d;
            if (gen_m) {
                if (gen_d) throw hyco::parameter_error("give either --d or --m, not both");
                d = double(*gen_m) * double(gen_k) / double(gen_n);
            } else if (gen_d) {
                d = *gen_d;
            } else {
                throw hyco::parameter_error("one of --d or --m is required");
            }
            const hyco::ModelParams params{d, gen_k, gen_beta, gen_n};
            std::ostringstream hg;
            if (gen_model == "planted") {
                const hyco::PlantedInstance inst =
                    hyco::gen_planted(d, gen_k, gen_n, gen_beta, seed, gen_balanced);
                hyco::write_hypergraph(hg, inst.hypergraph);
                std::ostringstream cs;
                hyco::write_coloring(cs, inst.sigma);
                if (gen_sigma_out.empty())
                    throw hyco::parameter_error("planted model requires --sigma-out");
                write_text(gen_sigma_out, cs.str());
                write_text(out, hg.str());
                std::cerr << "planted n=" << gen_n << " k=" << gen_k
                          << " m=" << inst.hypergraph.m() << " seed=" << seed << "\n";
                return 0;
            }
            hyco::Model model;
            if (gen_model == "gnp") model = hyco::Model::gnp;
            else if (gen_model == "gnm") model = hyco::Model::gnm;
            else if (gen_model == "gnm_rep") model = hyco::Model::gnm_rep;
            else throw hyco::parameter_error("unknown model: " + gen_model);
            const hyco::Hypergraph h = hyco::generate(model, params, seed);
            hyco::write_hypergraph(hg, h);
            write_text(out, hg.str());
            std::cerr << gen_model << " n=" << gen_n << " k=" << gen_k
                      << " m=" << h.m() << " seed=" << seed << "\n";
            return 0;
        }

        if (*exact) {
            const hyco::Hypergraph h = load_hypergraph(exact_in);
            const hyco::SpectrumTable t =
                hyco::spectrum(h, hyco::SpectrumMode::magnetization, nullptr,
                               exact_cap, threads);
            hyco::RestrictionSelector sel = hyco::RestrictionSelector::all();
            if (exact_selector == "balanced")
                sel = hyco::RestrictionSelector::balanced();
            else if (exact_selector == "imbalanced")
                sel = hyco::RestrictionSelector::imbalanced(exact_eps);
            else if (exact_selector == "energy-window")
                sel = hyco::RestrictionSelector::energy_window(exact_eps);
            else if (exact_selector != "all")
                throw hyco::parameter_error("unknown selector: " + exact_selector);
            const double log_z = hyco::partition_log(t, exact_beta, sel);
            json j{{"schema", "exact-v1"},
                   {"n", h.n()},
                   {"k", h.k()},
                   {"m", h.m()},
                   {"beta", exact_beta},
                   {"selector", exact_selector},
                   {"log_z", log_z},
                   {"empty_selection", log_z == hyco::neg_inf}};
            if (log_z == hyco::neg_inf) j["log_z"] = "-inf";
            write_text(out, dump(j));
            std::cerr << "logZ = " << std::setprecision(17) << log_z << "\n";
            return 0;
        }

        if (*cluster) {
            const hyco::Hypergraph h = load_hypergraph(cluster_in);
            const hyco::Coloring sigma = load_coloring(cluster_sigma);
            const hyco::SpectrumTable t = hyco::spectrum(
                h, hyco::SpectrumMode::overlap, &sigma, cluster_cap, threads);
            const double c = hyco::cluster_log(t, cluster_beta, cluster_theta);
            json j{{"schema", "cluster-v1"},
                   {"n", h.n()},
                   {"k", h.k()},
                   {"m", h.m()},
                   {"beta", cluster_beta},
                   {"theta", cluster_theta},
                   {"cluster_log", c},
                   {"energy", hyco::monochromatic_count(h, sigma)}};
            write_text(out, dump(j));
            std::cerr << "cluster_log = " << std::setprecision(17) << c << "\n";
            return 0;
        }

        if (*moments) {
            const hyco::ModelParams params{mom_d, mom_k, mom_beta, mom_n};
            json j{{"schema", "moments-v1"},
                   {"n", mom_n},
                   {"k", mom_k},
                   {"d", mom_d},
                   {"m", params.m()},
                   {"beta", mom_beta},
                   {"first_moment_log", hyco::first_moment_log(params)}};
            if (mom_alpha) {
                j["alpha"] = *mom_alpha;
                j["second_moment_alpha_log"] =
                    hyco::second_moment_alpha_log(params, *mom_alpha);
                j["lambda_asymptotic_log"] =
                    hyco::lambda_asymptotic_log(params, *mom_alpha);
            }
            write_text(out, dump(j));
            std::cerr << "first_moment_log = " << std::setprecision(17)
                      << double(j["first_moment_log"]) << "\n";
            return 0;
        }

        if (*phase) {
            const double d = resolve_d(ph_d, ph_c, ph_k);
            const hyco::PhasePoint p = hyco::phase_point(d, ph_k, ph_beta, ph_band);
            const hyco::CondensationGap g = hyco::condensation_gap(d, ph_k, ph_beta);
            json j{{"schema", "phase-v1"},
                   {"d", d},
                   {"k", ph_k},
                   {"beta", ph_beta},
                   {"c", hyco::crit_offset(d, ph_k)},
                   {"sigma", p.sigma_value},
                   {"phi_upper", p.phi_upper_value},
                   {"gap", g.gap},
                   {"minus_sigma_2k", g.minus_sigma_2k},
                   {"gap_extrapolated", g.extrapolated},
                   {"regime", regime_name(p.regime)}};
            if (p.regime.beta_c) j["beta_c"] = *p.regime.beta_c;
            write_text(out, dump(j));
            std::cerr << "regime = " << regime_name(p.regime) << "\n";
            return 0;
        }

        if (*scan) {
            const double d = resolve_d(sc_d, sc_c, sc_k);
            std::ostringstream os;
            os << std::setprecision(17) << "alpha,lambda,d1,d2,s\n";
            for (std::size_t i = 0; i < sc_points; ++i) {
                const double a = -1.0 + 2.0 * double(i) / double(sc_points - 1);
                const hyco::LambdaEval e = hyco::lambda_eval(d, sc_k, sc_beta, a);
                os << a << ',' << e.value << ',' << e.d1 << ',' << e.d2 << ','
                   << e.s << '\n';
            }
            write_text(out, os.str());
            const hyco::SecondMomentVerdict v = hyco::second_moment_verdict(
                d, sc_k, sc_beta, std::max<std::size_t>(sc_points, 1000));
            const char* name =
                v.kind == hyco::SecondMomentVerdict::Kind::global_max_at_zero
                    ? "global_max_at_zero"
                    : (v.kind == hyco::SecondMomentVerdict::Kind::violated_at
                           ? "violated_at"
                           : "inconclusive");
            std::cerr << "verdict = " << name << "\n";
            return 0;
        }

        if (*bcrit) {
            const double d = resolve_d(bc_d, bc_c, bc_k);
            const auto root = hyco::beta_crit_root(d, bc_k, bc_tol);
            const hyco::Regime regime = hyco::classify_regime(d, bc_k);
            json j{{"schema", "beta-crit-v1"},
                   {"d", d},
                   {"k", bc_k},
                   {"c", hyco::crit_offset(d, bc_k)},
                   {"regime", regime_name(regime)}};
            if (root) {
                j["beta_c"] = root->beta_c;
                j["bracket_width"] = root->bracket_width;
                j["expansion"] = hyco::beta_crit_expansion(d, bc_k);
            } else {
                j["beta_c"] = nullptr;
            }
            write_text(out, dump(j));
            std::cerr << (root ? "root found" : "no root (c <= 0)") << "\n";
            return 0;
        }

        if (*dec) {
            const hyco::Hypergraph h = load_hypergraph(dec_in);
            const hyco::Coloring sigma = load_coloring(dec_sigma);
            const hyco::Thresholds th = pick_thresholds(dec_profile, h.k());
            const hyco::Decomposition dd = hyco::decompose(h, sigma, th);
            const hyco::ClusterEstimate est =
                hyco::cluster_log_estimate(h, dec_beta, dd, th);
            json j{{"schema", "decompose-v1"},
                   {"n", h.n()},
                   {"k", h.k()},
                   {"beta", dec_beta},
                   {"core", dd.core_size},
                   {"backbone", dd.backbone_size},
                   {"rest", dd.rest_size},
                   {"free", dd.free_size},
                   {"energy", dd.energy},
                   {"lower", est.lower},
                   {"upper", est.upper},
                   {"point", est.point},
                   {"overlap_feasible", est.overlap_feasible},
                   {"cluster_overlap", th.cluster_overlap}};
            if (dec_trace) {
                json tr = json::array();
                for (const auto& ev : dd.peel_trace)
                    tr.push_back({{"v", ev.v},
                                  {"rule", ev.rule == hyco::PeelRule::cr1 ? "CR1" : "CR2"}});
                j["trace"] = tr;
            }
            write_text(out, dump(j));
            std::cerr << "core=" << dd.core_size << " backbone=" << dd.backbone_size
                      << " rest=" << dd.rest_size << " free=" << dd.free_size << "\n";
            return 0;
        }

        if (*census) {
            const hyco::Thresholds th = pick_thresholds(ce_profile, ce_k);
            const hyco::ExperimentReport rep = hyco::decomposition_census(
                ce_n, ce_k, ce_d, ce_beta, ce_trials, seed, th, {}, threads);
            write_text(out, report_text(rep, format));
            std::cerr << "census trials=" << ce_trials
                      << " mean core/n=" << rep.aggregates.at("mean_core_frac") << "\n";
            return 0;
        }

        if (*gap) {
            const double d = resolve_d(gp_d, gp_c, gp_k);
            if (gp_points < 2 || !(gp_hi > gp_lo))
                throw hyco::parameter_error("gap-scan needs beta-max > beta-min, points >= 2");
            std::vector<double> grid(gp_points);
            for (std::size_t i = 0; i < gp_points; ++i)
                grid[i] = gp_lo + (gp_hi - gp_lo) * double(i) / double(gp_points - 1);
            const hyco::Thresholds th = pick_thresholds(gp_profile, gp_k);
            const hyco::ExperimentReport rep = hyco::condensation_scan(
                d, gp_k, grid, gp_n, gp_trials, seed, th, threads);
            write_text(out, report_text(rep, format));
            std::cerr << "gap-scan points=" << gp_points << " trials=" << gp_trials << "\n";
            return 0;
        }

        if (*pn) {
            const hyco::ExperimentReport rep = hyco::planted_vs_null(
                pn_n, pn_k, pn_d, pn_beta, pn_trials, seed, threads);
            write_text(out, report_text(rep, format));
            std::cerr << "planted-null verdict=" << rep.verdicts.at("difference") << "\n";
            return 0;
        }
    } catch (const hyco::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const hyco::parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
