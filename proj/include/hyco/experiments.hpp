#ifndef HYCO_EXPERIMENTS_HPP
#define HYCO_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hyco/decomposition.hpp"
#include "hyco/enumeration.hpp"
#include "hyco/hypergraph.hpp"
#include "hyco/moments.hpp"
#include "hyco/phase.hpp"
#include "hyco/planted.hpp"
#include "hyco/rng.hpp"

namespace hyco {

// Empirical stand-ins for the unquantified asymptotic terms. Single versioned
// table: tightening a band is a data change.
struct CalibrationBands {
    int version = 1;
    double core_fraction_min = 0.9;     // core/n lower bound
    double rest_fraction_lo = 0.5;      // x 2^{-k}
    double rest_fraction_hi = 2.0;      // x 2^{-k}
    double rest_minus_free_max = 0.75;  // x 2^{-k}
    double cluster_point_band = 75.0;   // x 4^{-k}
    double lambda2_zero_band = 1.0;     // x k^3 2^{-k}
    double gap_identity_band = 1.0;     // x k^5 4^{-k}
};

struct ExperimentReport {
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, double> parameters;
    std::vector<std::map<std::string, double>> trials;
    std::map<std::string, double> aggregates;
    std::map<std::string, std::string> verdicts;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = "report-v1";
        j["name"] = name;
        j["seed"] = seed;
        j["parameters"] = parameters;
        j["trials"] = trials;
        j["aggregates"] = aggregates;
        j["verdicts"] = verdicts;
        // wall_seconds stays out: serialized reports are byte-reproducible
        return j;
    }

    // Long-format CSV: one row per trial, columns sorted by field name.
    void write_csv(std::ostream& os) const {
        std::map<std::string, bool> cols;
        for (const auto& t : trials)
            for (const auto& [key, _] : t) cols[key] = true;
        os << "trial";
        for (const auto& [key, _] : cols) os << ',' << key;
        os << '\n';
        for (std::size_t i = 0; i < trials.size(); ++i) {
            os << i;
            for (const auto& [key, _] : cols) {
                auto it = trials[i].find(key);
                os << ',';
                if (it != trials[i].end()) os << it->second;
            }
            os << '\n';
        }
    }
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

// Standard error = sample s.d. / sqrt(trials), the one estimator used everywhere.
inline double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

// Deterministic parallel trial map: results stored by trial index, each trial
// seeded from child_seed(seed, i), so thread count never changes output.
template <class Fn>
void run_trials(std::size_t trials, unsigned threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < trials; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < trials; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

} // namespace detail

// Sample mean of exact Z over with-replacement draws vs the closed form.
inline ExperimentReport mc_first_moment_check(std::uint32_t n, unsigned k, double d,
                                              double beta, std::size_t trials,
                                              std::uint64_t seed,
                                              unsigned threads = 1) {
    detail::Timer timer;
    ExperimentReport rep;
    rep.name = "mc_first_moment_check";
    rep.seed = seed;
    const ModelParams params{d, k, beta, n};
    rep.parameters = {{"n", double(n)}, {"k", double(k)}, {"d", d},
                      {"beta", beta},   {"m", double(params.m())},
                      {"trials", double(trials)}};

    std::vector<double> zs(trials);
    rep.trials.resize(trials);
    detail::run_trials(trials, threads, [&](std::size_t i) {
        const std::uint64_t cs = child_seed(seed, i);
        const Hypergraph h = generate(Model::gnm_rep, params, cs);
        const SpectrumTable t = spectrum(h, SpectrumMode::magnetization);
        zs[i] = std::exp(partition_log(t, beta));
        rep.trials[i] = {{"seed", double(cs)}, {"z", zs[i]}};
    });
    const double mean = detail::mean_of(zs);
    const double se = detail::stderr_of(zs);
    const double expected = std::exp(first_moment_log(params));
    rep.aggregates = {{"mean_z", mean},
                      {"stderr_z", se},
                      {"expected_z", expected},
                      {"deviation_se", se > 0 ? (mean - expected) / se : 0.0}};
    if (trials < 2)
        rep.verdicts["first_moment"] = "insufficient_statistics";
    else
        rep.verdicts["first_moment"] =
            std::abs(mean - expected) <= 4.0 * se + 1e-12 * expected ? "pass"
                                                                     : "fail";
    rep.wall_seconds = timer.seconds();
    return rep;
}

// Mean free entropy density over gnp draws vs the annealed upper bound.
inline ExperimentReport free_entropy_vs_bound(std::uint32_t n, unsigned k, double d,
                                              double beta, std::size_t trials,
                                              std::uint64_t seed,
                                              unsigned threads = 1) {
    detail::Timer timer;
    ExperimentReport rep;
    rep.name = "free_entropy_vs_bound";
    rep.seed = seed;
    const ModelParams params{d, k, beta, n};
    rep.parameters = {{"n", double(n)}, {"k", double(k)}, {"d", d},
                      {"beta", beta},   {"trials", double(trials)}};

    std::vector<double> fs(trials);
    rep.trials.resize(trials);
    detail::run_trials(trials, threads, [&](std::size_t i) {
        const std::uint64_t cs = child_seed(seed, i);
        const Hypergraph h = generate(Model::gnp, params, cs);
        const SpectrumTable t = spectrum(h, SpectrumMode::magnetization);
        fs[i] = partition_log(t, beta) / double(n);
        rep.trials[i] = {{"seed", double(cs)},
                         {"free_entropy", fs[i]},
                         {"m", double(h.m())}};
    });
    const double mean = detail::mean_of(fs);
    const double se = detail::stderr_of(fs);
    const double bound = phi_upper(d, k, beta);
    rep.aggregates = {{"mean_free_entropy", mean},
                      {"stderr", se},
                      {"phi_upper", bound},
                      {"deficit", bound - mean}};
    rep.verdicts["upper_bound"] = mean <= bound + 4.0 * se ? "pass" : "fail";
    rep.wall_seconds = timer.seconds();
    return rep;
}

// Planted instances -> decomposition fractions against the calibration bands.
inline ExperimentReport decomposition_census(std::uint32_t n, unsigned k, double d,
                                             double beta, std::size_t trials,
                                             std::uint64_t seed,
                                             const Thresholds& th,
                                             const CalibrationBands& bands = {},
                                             unsigned threads = 1) {
    detail::Timer timer;
    ExperimentReport rep;
    rep.name = "decomposition_census";
    rep.seed = seed;
    rep.parameters = {{"n", double(n)}, {"k", double(k)}, {"d", d},
                      {"beta", beta},   {"trials", double(trials)},
                      {"bands_version", double(bands.version)}};

    std::vector<double> core_f(trials), rest_f(trials), free_gap(trials),
        points(trials);
    rep.trials.resize(trials);
    detail::run_trials(trials, threads, [&](std::size_t i) {
        const std::uint64_t cs = child_seed(seed, i);
        const PlantedInstance inst = gen_planted(d, k, n, beta, cs, true);
        const Decomposition dec = decompose(inst.hypergraph, inst.sigma, th);
        const ClusterEstimate est =
            cluster_log_estimate(inst.hypergraph, beta, dec, th);
        core_f[i] = double(dec.core_size) / double(n);
        rest_f[i] = double(dec.rest_size) / double(n);
        free_gap[i] = double(dec.rest_size - dec.free_size) / double(n);
        points[i] = est.point;
        rep.trials[i] = {{"seed", double(cs)},
                         {"core_frac", core_f[i]},
                         {"backbone_frac", double(dec.backbone_size) / double(n)},
                         {"rest_frac", rest_f[i]},
                         {"free_frac", double(dec.free_size) / double(n)},
                         {"energy", double(dec.energy)},
                         {"lower", est.lower},
                         {"upper", est.upper},
                         {"point", est.point}};
    });
    const double twok = std::ldexp(1.0, -int(k));
    rep.aggregates = {{"mean_core_frac", detail::mean_of(core_f)},
                      {"mean_rest_frac", detail::mean_of(rest_f)},
                      {"mean_rest_minus_free_frac", detail::mean_of(free_gap)},
                      {"mean_point", detail::mean_of(points)},
                      {"stderr_core_frac", detail::stderr_of(core_f)},
                      {"stderr_rest_frac", detail::stderr_of(rest_f)}};
    bool core_ok = true, rest_ok = true, gap_ok = true;
    for (std::size_t i = 0; i < trials; ++i) {
        core_ok = core_ok && core_f[i] >= bands.core_fraction_min;
        rest_ok = rest_ok && rest_f[i] >= bands.rest_fraction_lo * twok &&
                  rest_f[i] <= bands.rest_fraction_hi * twok;
        gap_ok = gap_ok && free_gap[i] <= bands.rest_minus_free_max * twok;
    }
    rep.verdicts["core_band"] = core_ok ? "pass" : "fail";
    rep.verdicts["rest_band"] = rest_ok ? "pass" : "fail";
    rep.verdicts["rest_minus_free_band"] = gap_ok ? "pass" : "fail";
    rep.wall_seconds = timer.seconds();
    return rep;
}

// Analytic gap along a beta grid next to the measured decomposition-based
// cluster-point estimate minus phi_upper; locates the empirical sign change.
inline ExperimentReport condensation_scan(double d, unsigned k,
                                          const std::vector<double>& beta_grid,
                                          std::uint32_t n, std::size_t trials,
                                          std::uint64_t seed, const Thresholds& th,
                                          unsigned threads = 1) {
    detail::Timer timer;
    ExperimentReport rep;
    rep.name = "condensation_scan";
    rep.seed = seed;
    rep.parameters = {{"n", double(n)}, {"k", double(k)}, {"d", d},
                      {"trials", double(trials)},
                      {"grid_points", double(beta_grid.size())}};

    const std::size_t total = beta_grid.size() * trials;
    std::vector<double> measured(total);
    rep.trials.resize(total);
    detail::run_trials(total, threads, [&](std::size_t idx) {
        const std::size_t bi = idx / trials, ti = idx % trials;
        const double beta = beta_grid[bi];
        const std::uint64_t cs = child_seed(seed, idx);
        const PlantedInstance inst = gen_planted(d, k, n, beta, cs, true);
        const Decomposition dec = decompose(inst.hypergraph, inst.sigma, th);
        const ClusterEstimate est =
            cluster_log_estimate(inst.hypergraph, beta, dec, th);
        measured[idx] = est.point - phi_upper(d, k, beta);
        rep.trials[idx] = {{"seed", double(cs)},
                           {"beta", beta},
                           {"trial", double(ti)},
                           {"measured_gap", measured[idx]},
                           {"analytic_gap", condensation_gap(d, k, beta).gap}};
    });

    double analytic_cross = neg_inf, measured_cross = neg_inf;
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
        const double beta = beta_grid[bi];
        if (analytic_cross == neg_inf && condensation_gap(d, k, beta).gap >= 0)
            analytic_cross = beta;
        std::vector<double> here(measured.begin() + bi * trials,
                                 measured.begin() + (bi + 1) * trials);
        if (measured_cross == neg_inf && detail::mean_of(here) >= 0)
            measured_cross = beta;
    }
    rep.aggregates = {{"analytic_sign_change", analytic_cross},
                      {"measured_sign_change", measured_cross}};
    const auto root = beta_crit_root(d, k);
    if (root) rep.aggregates["beta_crit_root"] = root->beta_c;
    rep.wall_seconds = timer.seconds();
    return rep;
}

// Distributional comparison of the free entropy under the null and planted
// models at the same (n, k, d, beta). Reports, never decides.
inline ExperimentReport planted_vs_null(std::uint32_t n, unsigned k, double d,
                                        double beta, std::size_t trials,
                                        std::uint64_t seed, unsigned threads = 1) {
    detail::Timer timer;
    ExperimentReport rep;
    rep.name = "planted_vs_null";
    rep.seed = seed;
    const ModelParams params{d, k, beta, n};
    rep.parameters = {{"n", double(n)}, {"k", double(k)}, {"d", d},
                      {"beta", beta},   {"trials", double(trials)}};

    std::vector<double> nulls(trials), planteds(trials);
    rep.trials.resize(trials);
    detail::run_trials(trials, threads, [&](std::size_t i) {
        const std::uint64_t cs = child_seed(seed, i);
        const Hypergraph hn = generate(Model::gnm, params, cs);
        const SpectrumTable tn = spectrum(hn, SpectrumMode::magnetization);
        nulls[i] = partition_log(tn, beta) / double(n);
        const PlantedInstance inst = gen_planted(d, k, n, beta, child_seed(cs, 1));
        const SpectrumTable tp =
            spectrum(inst.hypergraph, SpectrumMode::magnetization);
        planteds[i] = partition_log(tp, beta) / double(n);
        rep.trials[i] = {{"seed", double(cs)},
                         {"null_free_entropy", nulls[i]},
                         {"planted_free_entropy", planteds[i]}};
    });
    const double mn = detail::mean_of(nulls), mp = detail::mean_of(planteds);
    const double sen = detail::stderr_of(nulls), sep = detail::stderr_of(planteds);
    const double joint_se = std::sqrt(sen * sen + sep * sep);
    const double lo = std::max(*std::min_element(nulls.begin(), nulls.end()),
                               *std::min_element(planteds.begin(), planteds.end()));
    const double hi = std::min(*std::max_element(nulls.begin(), nulls.end()),
                               *std::max_element(planteds.begin(), planteds.end()));
    rep.aggregates = {{"mean_null", mn},
                      {"mean_planted", mp},
                      {"mean_difference", mp - mn},
                      {"joint_stderr", joint_se},
                      {"support_overlap", std::max(0.0, hi - lo)}};
    rep.verdicts["difference"] =
        std::abs(mp - mn) <= 4.0 * joint_se ? "within_4se" : "separated";
    rep.wall_seconds = timer.seconds();
    return rep;
}

} // namespace hyco

#endif
