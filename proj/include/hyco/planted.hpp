#ifndef HYCO_PLANTED_HPP
#define HYCO_PLANTED_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "hyco/hypergraph.hpp"
#include "hyco/numeric.hpp"
#include "hyco/rng.hpp"

namespace hyco {

struct PlantedProbs {
    double p1; // monochromatic k-sets
    double p2; // bichromatic k-sets, = p1 * e^beta
};

inline PlantedProbs planted_params(double d, unsigned k, std::uint32_t n, double beta) {
    const ModelParams base{d, k, beta, n};
    const double p = base.p();
    const double denom = 1.0 + std::ldexp(std::expm1(-beta), 1 - int(k));
    const double p1 = std::exp(-beta) / denom * p;
    const double p2 = p1 * std::exp(beta);
    if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
        throw parameter_error("planted edge probability outside [0,1]");
    return {p1, p2};
}

struct PlantedInstance {
    Hypergraph hypergraph;
    Coloring sigma;
    ModelParams params;
    double p1;
    double p2;
};

namespace detail {

inline bool mono_under(std::span<const std::uint32_t> e, const Coloring& sigma) {
    const bool first = sigma.plus(e[0]);
    for (std::size_t j = 1; j < e.size(); ++j)
        if (sigma.plus(e[j]) != first) return false;
    return true;
}

// cnt distinct k-subsets of the given class, appended to h.
inline void add_distinct_from_class(Hypergraph& h, const std::vector<std::uint32_t>& cls,
                                    unsigned k, std::uint64_t cnt, Rng& rng) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint32_t> e(k);
    while (seen.size() < cnt) {
        auto idx = rng.distinct_sorted(std::uint32_t(cls.size()), k);
        for (unsigned j = 0; j < k; ++j) e[j] = cls[idx[j]];
        if (seen.insert(kset_key(e, h.n())).second) h.add_edge(e);
    }
}

} // namespace detail

// Hidden coloring sigma (optionally conditioned on balance), then each
// monochromatic k-set present independently with p1 and each bichromatic
// one with p2. Deterministic in the seed.
inline PlantedInstance gen_planted(double d, unsigned k, std::uint32_t n,
                                   double beta, std::uint64_t seed,
                                   bool balanced = false) {
    Rng rng(seed);
    const PlantedProbs pr = planted_params(d, k, n, beta);

    const std::uint64_t n_plus = balanced ? sample_balanced_magnetization(n, rng)
                                          : sample_binomial(double(n), 0.5, rng);
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t v = 0; v < n; ++v) perm[v] = v;
    rng.shuffle(perm);
    Coloring sigma(n);
    for (std::uint64_t i = 0; i < n_plus; ++i) sigma.set(perm[i], true);

    Hypergraph h(n, k, false);
    const double nsets_d = std::exp(log_binom(double(n), double(k)));
    if (nsets_d <= detail::kset_iteration_cap) {
        // Per-k-set Bernoulli path: the small-scale reference semantics.
        const std::uint64_t nsets = binom_exact(n, k);
        for (std::uint64_t r = 0; r < nsets; ++r) {
            auto e = detail::nth_kset(r, n, k);
            const double p = detail::mono_under(e, sigma) ? pr.p1 : pr.p2;
            if (rng.bernoulli(p)) h.add_edge(e);
        }
    } else {
        // Binomial counts over exact class sizes, then distinct uniform sets.
        std::vector<std::uint32_t> plus, minus;
        plus.reserve(n_plus);
        for (std::uint32_t v = 0; v < n; ++v)
            (sigma.plus(v) ? plus : minus).push_back(v);
        const double mono_plus = std::exp(log_binom(double(plus.size()), double(k)));
        const double mono_minus = std::exp(log_binom(double(minus.size()), double(k)));
        const double bi = nsets_d - mono_plus - mono_minus;
        detail::add_distinct_from_class(
            h, plus, k, sample_binomial(mono_plus, pr.p1, rng), rng);
        detail::add_distinct_from_class(
            h, minus, k, sample_binomial(mono_minus, pr.p1, rng), rng);
        const std::uint64_t cnt_bi = sample_binomial(bi, pr.p2, rng);
        std::unordered_set<std::uint64_t> seen;
        while (seen.size() < cnt_bi) {
            auto e = rng.distinct_sorted(n, k);
            if (detail::mono_under(e, sigma)) continue;
            if (seen.insert(detail::kset_key(e, n)).second) h.add_edge(e);
        }
    }
    h.canonicalize();
    return {std::move(h), std::move(sigma), ModelParams{d, k, beta, n}, pr.p1, pr.p2};
}

struct ExpectedMono {
    double leading;                    // (e^{-beta}/(2^{k-1}-1+e^{-beta})) (d/k) n
    std::optional<double> exact_class; // 2 C(n/2, k) p1, n even
};

inline ExpectedMono expected_mono_edges(double d, unsigned k, std::uint32_t n,
                                        double beta) {
    const double eb = std::exp(-beta);
    const double leading =
        eb / (std::ldexp(1.0, int(k) - 1) - 1.0 + eb) * d / double(k) * double(n);
    std::optional<double> exact;
    if (n % 2 == 0) {
        const PlantedProbs pr = planted_params(d, k, n, beta);
        exact = 2.0 * std::exp(log_binom(double(n) / 2.0, double(k))) * pr.p1;
    }
    return {leading, exact};
}

// Mean number of edges a vertex supports in the planted model; equals
// k ln2 up to a 2^{-k}-order correction in the paper's parameter regime.
inline double support_rate(double d, unsigned k, double beta) {
    return d / (std::ldexp(1.0, int(k) - 1) - 1.0 + std::exp(-beta));
}

// Mean monochromatic degree of a vertex in the planted model.
inline double mono_degree_rate(double d, unsigned k, std::uint32_t n, double beta) {
    const PlantedProbs pr = planted_params(d, k, n, beta);
    return std::exp(log_binom(double(n) - 1.0, double(k) - 1.0)) * pr.p1 /
           std::ldexp(1.0, int(k) - 1);
}

} // namespace hyco

#endif
