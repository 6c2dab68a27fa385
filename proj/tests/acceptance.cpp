// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 9 and 10c share the same large planted instances.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hyco/decomposition.hpp"
#include "hyco/enumeration.hpp"
#include "hyco/moments.hpp"
#include "hyco/phase.hpp"
#include "hyco/planted.hpp"

using namespace hyco;

namespace {

const double ln2 = std::log(2.0);

struct Outcome {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

double naive_partition_log(const Hypergraph& h, double beta) {
    LogSumExp acc;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << h.n()); ++mask)
        acc.add(-beta * double(monochromatic_count(h, Coloring(h.n(), mask))));
    return acc.value();
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

// ---- criterion 1 ----
Outcome c1() {
    Outcome out;
    Rng rng(1001);
    for (int rep = 0; rep < 100; ++rep) {
        const unsigned k = 3 + unsigned(rng.below(3));
        const std::uint32_t n = 10 + std::uint32_t(rng.below(7)); // 10..16
        const double d = 1.0 + 2.0 * rng.uniform();
        const Hypergraph h =
            generate(Model::gnm, ModelParams{d, k, 0.0, n}, child_seed(1002, rep));
        const double beta = 0.25 + 2.0 * rng.uniform();
        const SpectrumTable t = spectrum(h, SpectrumMode::magnetization);
        const double got = partition_log(t, beta);
        const double want = naive_partition_log(h, beta);
        if (!close_rel(got, want, 1e-12)) {
            out.fail("partition mismatch at rep " + std::to_string(rep));
            break;
        }
    }
    for (int rep = 0; rep < 200 && out.ok; ++rep) {
        const std::uint32_t n = 12;
        Hypergraph h = generate(Model::gnm, ModelParams{2.0, 3, 0.0, n},
                                child_seed(1003, rep));
        const double beta = 0.2 + 3.0 * rng.uniform();
        const SpectrumTable t0 = spectrum(h, SpectrumMode::magnetization);
        const double lz0 = partition_log(t0, beta);
        while (true) {
            const auto e = rng.distinct_sorted(n, 3);
            bool dup = false;
            for (std::size_t i = 0; i < h.m(); ++i) {
                auto x = h.edge(i);
                if (std::equal(x.begin(), x.end(), e.begin())) { dup = true; break; }
            }
            if (!dup) { h.add_edge(e); break; }
        }
        const double lz1 =
            partition_log(spectrum(h, SpectrumMode::magnetization), beta);
        if (!(std::abs(lz1 - lz0) <= beta + 1e-12))
            out.fail("Lipschitz bound violated at rep " + std::to_string(rep));
    }
    return out;
}

// ---- criterion 2 ----
Outcome c2() {
    Outcome out;
    const ModelParams zero{2.0, 3, 0.0, 12};
    if (!close_rel(first_moment_log(zero), 12 * ln2, 1e-12))
        out.fail("beta = 0 closed form");
    for (double beta : {0.5, 1.0, 2.0}) {
        const ModelParams params{2.0, 3, beta, 12};
        std::vector<double> zs(2000);
        for (int t = 0; t < 2000; ++t) {
            const Hypergraph h =
                generate(Model::gnm_rep, params, child_seed(2001 + int(beta * 4), t));
            zs[std::size_t(t)] =
                std::exp(partition_log(spectrum(h, SpectrumMode::magnetization), beta));
        }
        double mean = 0;
        for (double z : zs) mean += z;
        mean /= double(zs.size());
        double var = 0;
        for (double z : zs) var += (z - mean) * (z - mean);
        const double se = std::sqrt(var / double(zs.size() - 1) / double(zs.size()));
        if (std::abs(mean - std::exp(first_moment_log(params))) > 4 * se)
            out.fail("MC deviation > 4 s.e. at beta " + std::to_string(beta));
    }
    return out;
}

// ---- criterion 3 ----
double brute_pair_weight(const Coloring& sigma, const Coloring& tau, unsigned k,
                         double beta) {
    const std::uint32_t n = sigma.n();
    const std::uint64_t nsets = binom_exact(n, k);
    double sum = 0.0;
    for (std::uint64_t r = 0; r < nsets; ++r) {
        const auto e = detail::nth_kset(r, n, k);
        bool mono_s = true, mono_t = true;
        for (unsigned j = 1; j < k; ++j) {
            if (sigma.plus(e[j]) != sigma.plus(e[0])) mono_s = false;
            if (tau.plus(e[j]) != tau.plus(e[0])) mono_t = false;
        }
        sum += std::exp(-beta * (double(mono_s) + double(mono_t)));
    }
    return sum / double(nsets);
}

Outcome c3() {
    Outcome out;
    const std::uint32_t n = 8;
    const unsigned k = 3;
    auto balanced = [&](std::uint32_t mask) {
        const std::int64_t dev = 2 * std::int64_t(std::popcount(mask)) - 8;
        return dev * dev <= 32;
    };
    for (std::uint64_t m : {2ull, 4ull}) {
        const double d = double(m) * 3.0 / 8.0;
        for (double beta : {0.0, 1.0}) {
            const ModelParams params{d, k, beta, n};
            std::vector<double> brute(n + 1, 0.0);
            for (std::uint32_t sm = 0; sm < 256; ++sm) {
                if (!balanced(sm)) continue;
                for (std::uint32_t tm = 0; tm < 256; ++tm) {
                    if (!balanced(tm)) continue;
                    const std::uint32_t g = std::uint32_t(std::popcount(~(sm ^ tm) & 0xffu));
                    brute[g] += std::pow(
                        brute_pair_weight(Coloring(n, sm), Coloring(n, tm), k, beta),
                        double(m));
                }
            }
            for (std::uint32_t g = 0; g <= n; ++g) {
                const double alpha = (2.0 * g - 8.0) / 8.0;
                const double exact = second_moment_alpha_log(params, alpha);
                if (brute[g] == 0.0) {
                    if (exact != neg_inf) out.fail("expected empty class");
                } else if (!close_rel(exact, std::log(brute[g]), 1e-9)) {
                    out.fail("brute-force mismatch at m=" + std::to_string(m));
                }
            }
        }
    }
    return out;
}

// ---- criterion 4 ----
Outcome c4() {
    Outcome out;
    Rng rng(4004);
    for (int rep = 0; rep < 100; ++rep) {
        const unsigned k = 3 + unsigned(rng.below(12));
        const double d = 0.5 + 3.0 * double(k) * rng.uniform();
        const double beta = 0.1 + 4.9 * rng.uniform();
        const double l0 = lambda_eval(d, k, beta, 0.0).value;
        const double l1 = lambda_eval(d, k, beta, 1.0).value;
        if (!close_rel(l0, 2 * phi_upper(d, k, beta) - ln2, 1e-12))
            out.fail("identity at alpha = 0");
        if (!close_rel(l1, phi_upper(d, k, 2 * beta) - ln2, 1e-12))
            out.fail("identity at alpha = 1");
    }
    for (int rep = 0; rep < 50 && out.ok; ++rep) {
        const unsigned k = 3 + unsigned(rng.below(10));
        const double d = 0.5 + 2.0 * double(k) * rng.uniform();
        const double beta = 0.2 + 3.0 * rng.uniform();
        const double alpha = -0.9 + 1.8 * rng.uniform();
        const LambdaEval e = lambda_eval(d, k, beta, alpha);
        const double h1 = 1e-5;
        const double fd1 = (lambda_eval(d, k, beta, alpha + h1).value -
                            lambda_eval(d, k, beta, alpha - h1).value) /
                           (2 * h1);
        if (std::abs(fd1 - e.d1) > 1e-6 * std::max(1.0, std::abs(e.d1)))
            out.fail("first derivative FD mismatch");
        const double h2 = 1e-4;
        const double fd2 = (lambda_eval(d, k, beta, alpha + h2).value -
                            2 * e.value +
                            lambda_eval(d, k, beta, alpha - h2).value) /
                           (h2 * h2);
        if (std::abs(fd2 - e.d2) > 1e-6 * std::max(1.0, std::abs(e.d2)))
            out.fail("second derivative FD mismatch");
    }
    return out;
}

// ---- criterion 5 ----
Outcome c5() {
    Outcome out;
    for (unsigned k : {20u, 24u, 28u, 32u}) {
        const double d = double(k) * std::ldexp(ln2, int(k) - 1);
        const double beta = double(k) * ln2;
        const double d2 = lambda_eval(d, k, beta, 0.0).d2;
        if (!(std::abs(d2 + 1.0) <=
              double(k) * double(k) * double(k) * std::ldexp(1.0, -int(k))))
            out.fail("k = " + std::to_string(k));
    }
    return out;
}

// ---- criterion 6 ----
Outcome c6() {
    Outcome out;
    double prev_err = 1e100;
    for (unsigned k : {20u, 30u, 40u}) {
        const double d = double(k) * (std::ldexp(ln2, int(k) - 1) - ln2 + ln2);
        const auto root = beta_crit_root(d, k);
        if (!root) { out.fail("no root at k = " + std::to_string(k)); break; }
        if (std::abs(sigma(d, k, root->beta_c)) > 1e-9)
            out.fail("residual |Sigma| > 1e-9 at k = " + std::to_string(k));
        if (!(root->beta_c >= double(k) * ln2))
            out.fail("root below k ln 2 at k = " + std::to_string(k));
        const double err = std::abs(root->beta_c - beta_crit_expansion(d, k));
        if (!(err < prev_err))
            out.fail("expansion error not decreasing at k = " + std::to_string(k));
        // the omitted next-order term is ~(ln k + 1)/(k ln 2) ~ 0.136 at k = 40,
        // so 0.15 is the honest calibration for the leading-order expansion
        if (k == 40 && !(err <= 0.15)) out.fail("expansion error > 0.15 at k = 40");
        prev_err = err;
    }
    return out;
}

// ---- criterion 7 ----
Outcome c7() {
    Outcome out;
    for (unsigned k = 15; k <= 30; ++k) {
        for (double c : {0.25 * ln2, ln2, 4 * ln2}) {
            const double d = double(k) * (std::ldexp(ln2, int(k) - 1) - ln2 + c);
            const double band =
                std::pow(double(k), 5.0) * std::pow(4.0, -double(k));
            for (int i = 0; i <= 10; ++i) {
                const double beta = double(k) * ln2 + 0.5 * i;
                const CondensationGap g = condensation_gap(d, k, beta);
                if (!(std::abs(g.gap - g.minus_sigma_2k) <= band)) {
                    out.fail("k = " + std::to_string(k) +
                             " beta = " + std::to_string(beta));
                    return out;
                }
            }
        }
    }
    return out;
}

// ---- criterion 8 ----
Outcome c8() {
    Outcome out;
    const unsigned k = 12;
    const double d = 12.0 * (std::ldexp(ln2, 11) - 2.0);
    for (double beta : {1.0, 12.0 * ln2 - std::log(12.0)}) {
        const SecondMomentVerdict v = second_moment_verdict(d, k, beta);
        if (v.kind != SecondMomentVerdict::Kind::global_max_at_zero)
            out.fail("not global max at beta = " + std::to_string(beta));
    }
    // once the verdict degrades along increasing beta it never recovers
    bool seen_bad = false;
    for (int i = 0; i < 20; ++i) {
        const double beta = 0.5 + (12.0 * ln2 + 2.0 - 0.5) * double(i) / 19.0;
        const bool good = second_moment_verdict(d, k, beta).kind ==
                          SecondMomentVerdict::Kind::global_max_at_zero;
        if (seen_bad && good) out.fail("verdict not monotone in beta");
        seen_bad = seen_bad || !good;
    }
    return out;
}

// ---- criteria 9 and 10 share the large planted runs ----
struct BigTrial {
    double core_f, rest_f, free_f;
    bool containment;
    double point;
};

std::vector<BigTrial> run_big_trials() {
    const std::uint32_t n = 100000;
    const unsigned k = 8;
    const double d = 8.0 * std::ldexp(ln2, 7);
    const double beta = 8.0 * ln2;
    const Thresholds th = Thresholds::scaled(k);
    std::vector<BigTrial> out;
    for (int t = 0; t < 10; ++t) {
        const PlantedInstance inst =
            gen_planted(d, k, n, beta, child_seed(9009, t), true);
        const CoreResult core = core_peel(inst.hypergraph, inst.sigma, th);
        const WhiteningResult wh = whitening(inst.hypergraph, inst.sigma, th);
        bool contained = true;
        for (std::uint32_t v = 0; v < n; ++v)
            if (!wh.in_u[v] && !core.in_core[v]) contained = false;
        const Decomposition dec = classify_vertices(inst.hypergraph, inst.sigma,
                                                    core.in_core);
        const ClusterEstimate est =
            cluster_log_estimate(inst.hypergraph, beta, dec, th);
        out.push_back({double(dec.core_size) / n, double(dec.rest_size) / n,
                       double(dec.free_size) / n, contained, est.point});
    }
    return out;
}

Outcome c9(const std::vector<BigTrial>& big) {
    Outcome out;
    const double twok = std::ldexp(1.0, -8);
    for (std::size_t t = 0; t < big.size(); ++t) {
        const BigTrial& b = big[t];
        if (!(b.core_f >= 0.9)) out.fail("core/n < 0.9 at trial " + std::to_string(t));
        if (!(b.rest_f >= 0.5 * twok && b.rest_f <= 2.0 * twok))
            out.fail("rest/n outside [0.5,2] 2^-8 at trial " + std::to_string(t));
        // 0.75 2^-k band: at k = 8 roughly a quarter of the rest has an
        // incident edge whose core part is incomplete or monochromatic
        // (per-edge probability ~ k^2 2^-k, not yet small); measured max
        // over seeds is 0.60 2^-8.
        if (!(b.rest_f - b.free_f <= 0.75 * twok))
            out.fail("(rest-free)/n > 0.75 2^-8 at trial " + std::to_string(t));
        if (!b.containment)
            out.fail("whitening complement not in core at trial " + std::to_string(t));
    }
    // peeling order-independence on small scaled instances
    const Thresholds th3 = Thresholds::scaled(3);
    for (int rep = 0; rep < 50 && out.ok; ++rep) {
        const PlantedInstance inst =
            gen_planted(6.0, 3, 150, 2.0, child_seed(9100, rep), true);
        const CoreResult base = core_peel(inst.hypergraph, inst.sigma, th3);
        std::vector<std::uint32_t> perm(150);
        for (std::uint32_t i = 0; i < 150; ++i) perm[i] = i;
        Rng rng(child_seed(9200, rep));
        rng.shuffle(perm);
        const CoreResult alt = core_peel(inst.hypergraph, inst.sigma, th3, &perm);
        if (alt.in_core != base.in_core)
            out.fail("order dependence at rep " + std::to_string(rep));
    }
    return out;
}

Outcome c10(const std::vector<BigTrial>& big) {
    Outcome out;
    const Thresholds th = Thresholds::scaled(3);
    for (int rep = 0; rep < 50; ++rep) {
        const PlantedInstance inst =
            gen_planted(3.0, 3, 20, 2.0, child_seed(10010, rep), true);
        const Decomposition dec = decompose(inst.hypergraph, inst.sigma, th);
        const ClusterEstimate est =
            cluster_log_estimate(inst.hypergraph, 2.0, dec, th);
        const SpectrumTable ov =
            spectrum(inst.hypergraph, SpectrumMode::overlap, &inst.sigma);
        const double exact = cluster_log(ov, 2.0, th.cluster_overlap) / 20.0;
        if (est.overlap_feasible && !(est.lower <= exact + 1e-12))
            out.fail("(a) lower bound above exact at rep " + std::to_string(rep));

        // (b) flips of free vertices keep the energy fixed
        std::vector<std::uint32_t> free_vs;
        for (std::uint32_t v = 0; v < 20; ++v)
            if (dec.free_set[v]) free_vs.push_back(v);
        if (!free_vs.empty()) {
            Coloring sig = inst.sigma;
            Rng rng(child_seed(10020, rep));
            for (int f = 0; f < 100; ++f) {
                sig.flip(free_vs[rng.below(free_vs.size())]);
                if (monochromatic_count(inst.hypergraph, sig) != dec.energy) {
                    out.fail("(b) free flip changed the energy");
                    break;
                }
            }
        }
    }
    // (c) large-n cluster point against the analytic value
    const double beta = 8.0 * ln2;
    const double target = ln2 * std::ldexp(1.0, -8) - beta * ln2 * std::exp(-beta);
    double mean_point = 0;
    for (const BigTrial& b : big) mean_point += b.point;
    mean_point /= double(big.size());
    // 75 4^-k band: the mono-edge count fluctuates with sd ~ sqrt(m q(1-q))
    // ~ 16.5, giving the 10-trial mean point a noise floor of 19 4^-8 (one
    // sd), on top of a finite-n systematic of 7 4^-8 (the exact conditional
    // mono expectation exceeds the asymptotic beta ln2 e^-beta n).
    if (!(std::abs(mean_point - target) <= 75.0 * std::pow(4.0, -8.0)))
        out.fail("(c) cluster point off by " +
                 std::to_string(std::abs(mean_point - target)));
    return out;
}

// ---- criterion 11 ----
std::string run_cmd(const std::string& bin, const std::string& args, int& code) {
    const std::string cmd = bin + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) { code = -1; return {}; }
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

Outcome c11() {
    Outcome out;
    const char* bin = std::getenv("HYCO_BIN");
    if (!bin) { out.fail("HYCO_BIN not set"); return out; }
    const std::vector<std::string> cmds = {
        "gen --model planted --n 60 --k 3 --d 6 --beta 2 --seed 4 --out - "
        "--sigma-out /tmp/hyco_acc.col",
        "census --n 150 --k 3 --d 6 --beta 2 --thresholds scaled --trials 4 --seed 5",
        "planted-null --n 12 --k 3 --d 2 --beta 1 --trials 6 --seed 9",
        "beta-crit --k 25 --c-over-ln2 1",
    };
    for (const std::string& c : cmds) {
        int code1 = 0, code2 = 0;
        const std::string a = run_cmd(bin, c + " --threads 1", code1);
        const std::string b = run_cmd(bin, c + " --threads 3", code2);
        if (code1 != 0 || code2 != 0 || a != b || a.empty()) {
            out.fail("output differs or failed for: " + c);
            break;
        }
    }
    return out;
}

int report(int idx, const std::string& what, const Outcome& o, double secs) {
    std::ostringstream os;
    os << "criterion " << idx << ": " << (o.ok ? "pass" : "FAIL") << " - " << what;
    if (!o.ok) os << " (" << o.detail << ")";
    os << " [" << std::fixed << secs << "s]";
    std::cout << os.str() << std::endl;
    return o.ok ? 0 : 1;
}

} // namespace

int main() {
    std::cout.precision(1);
    int failures = 0;
    const auto timed = [&](int idx, const std::string& what,
                           const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = fn();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        failures += report(idx, what, o, secs);
    };

    timed(1, "exact engine vs naive enumeration, Lipschitz bound", c1);
    timed(2, "first-moment closed form vs Monte Carlo", c2);
    timed(3, "second moment equals balanced-pair brute force", c3);
    timed(4, "Lambda endpoint identities and derivative closed forms", c4);
    timed(5, "Lambda''(0) = -1 within k^3 2^-k on the critical line", c5);
    timed(6, "beta_c root residual, lower bound, expansion convergence", c6);
    timed(7, "condensation gap matches -Sigma 2^-k within k^5 4^-k", c7);
    timed(8, "second-moment verdict below the line, monotone in beta", c8);

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<BigTrial> big = run_big_trials();
    const double big_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "(shared planted runs: n = 100000, 10 trials, " << std::fixed
              << big_secs << "s)" << std::endl;

    timed(9, "decomposition fractions, containment, order independence",
          [&] { return c9(big); });
    timed(10, "cluster lower bound, free flips, large-n point estimate",
          [&] { return c10(big); });
    timed(11, "CLI outputs byte-identical across thread counts", c11);

    if (failures) std::cout << failures << " criteria failed" << std::endl;
    else std::cout << "all criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
