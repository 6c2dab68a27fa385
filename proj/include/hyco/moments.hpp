#ifndef HYCO_MOMENTS_HPP
#define HYCO_MOMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hyco/hypergraph.hpp"
#include "hyco/numeric.hpp"
#include "hyco/phase.hpp"

namespace hyco {

// Sizes of the four cells sigma^-1(s) cap tau^-1(t) of a coloring pair.
struct PairCells {
    std::uint64_t c_pp, c_pm, c_mp, c_mm;
    std::uint64_t n;
    unsigned k;

    void validate() const {
        if (c_pp + c_pm + c_mp + c_mm != n)
            throw parameter_error("pair cells do not sum to n");
    }
};

namespace detail {
// P[uniform k-set is monochromatic] for class sizes a and n-a.
inline double mono_prob(std::uint64_t a, std::uint64_t n, unsigned k) {
    return kset_ratio(a, n, k) + kset_ratio(n - a, n, k);
}
} // namespace detail

// Exact E[e^{-beta(1{e mono under sigma} + 1{e mono under tau})}] for a
// uniform k-set e, by inclusion-exclusion over the four cells.
inline double pair_edge_weight(const PairCells& cells, double beta) {
    cells.validate();
    const std::uint64_t n = cells.n;
    const unsigned k = cells.k;
    const double p_sigma = detail::mono_prob(cells.c_pp + cells.c_pm, n, k);
    const double p_tau = detail::mono_prob(cells.c_pp + cells.c_mp, n, k);
    const double p_both = kset_ratio(cells.c_pp, n, k) + kset_ratio(cells.c_pm, n, k) +
                          kset_ratio(cells.c_mp, n, k) + kset_ratio(cells.c_mm, n, k);
    const double eb = std::exp(-beta);
    return (1.0 - p_sigma - p_tau + p_both) +
           eb * ((p_sigma - p_both) + (p_tau - p_both)) +
           eb * eb * p_both;
}

// ln E[Z_beta] for the with-replacement model: exact sum over the n+1
// magnetization classes, each edge independent.
inline double first_moment_log(const ModelParams& params) {
    const std::uint32_t n = params.n;
    const unsigned k = params.k;
    const double m = double(params.m());
    const double b = -std::expm1(-params.beta); // 1 - e^{-beta}
    LogSumExp acc;
    for (std::uint32_t a = 0; a <= n; ++a) {
        const double w = 1.0 - detail::mono_prob(a, n, k) * b;
        acc.add(log_binom(double(n), double(a)) + m * std::log(w));
    }
    return acc.value();
}

// ln E[Z_beta(alpha)]: exact sum over balanced pairs with overlap alpha,
// grouped by (sigma magnetization, cell vector).
inline double second_moment_alpha_log(const ModelParams& params, double alpha) {
    const std::uint64_t n = params.n;
    const unsigned k = params.k;
    const double m = double(params.m());
    const double g_real = (1.0 + alpha) * double(n) / 2.0; // agreements
    const double g_round = std::round(g_real);
    if (std::abs(g_real - g_round) > 1e-9 || g_round < 0 || g_round > double(n))
        throw parameter_error("alpha infeasible for this n");
    const std::uint64_t g = std::uint64_t(g_round);

    auto balanced = [&](std::uint64_t a) {
        const double dev = 2.0 * double(a) - double(n);
        return dev * dev <= 4.0 * double(n);
    };

    LogSumExp acc;
    for (std::uint64_t n_p = 0; n_p <= n; ++n_p) {
        if (!balanced(n_p)) continue;
        // cells: c_pm = n_p - c_pp, c_mm = g - c_pp, c_mp = n - n_p - g + c_pp
        const std::uint64_t lo = (n_p + g > n) ? n_p + g - n : 0;
        const std::uint64_t hi = std::min(n_p, g);
        for (std::uint64_t c_pp = lo; c_pp <= hi; ++c_pp) {
            const PairCells cells{c_pp, n_p - c_pp, n - n_p - g + c_pp,
                                  g - c_pp, n, k};
            if (!balanced(cells.c_pp + cells.c_mp)) continue; // tau balanced
            const double log_count = log_binom(double(n), double(n_p)) +
                                     log_binom(double(n_p), double(c_pp)) +
                                     log_binom(double(n - n_p), double(cells.c_mp));
            acc.add(log_count + m * std::log(pair_edge_weight(cells, params.beta)));
        }
    }
    return acc.value();
}

// Large-n prediction ln 2 + Lambda_beta(alpha) for comparison against
// second_moment_alpha_log / n.
inline double lambda_asymptotic_log(const ModelParams& params, double alpha) {
    return std::log(2.0) + lambda_eval(params.d, params.k, params.beta, alpha).value;
}

} // namespace hyco

#endif
