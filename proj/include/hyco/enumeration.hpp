#ifndef HYCO_ENUMERATION_HPP
#define HYCO_ENUMERATION_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "hyco/hypergraph.hpp"
#include "hyco/numeric.hpp"
#include "hyco/phase.hpp"
#include "hyco/rng.hpp"

namespace hyco {

enum class SpectrumMode { magnetization, overlap };

inline constexpr std::uint32_t default_enumeration_cap = 28;

// Joint histogram over all 2^n colorings: key x energy -> exact count.
// Key is |sigma^-1(+1)| in magnetization mode, or the number of agreements
// with the reference coloring in overlap mode (overlap = 2*key - n).
struct SpectrumTable {
    SpectrumMode mode;
    std::uint32_t n;
    unsigned k;
    std::uint64_t m;
    std::optional<Coloring> reference;
    std::vector<std::uint64_t> counts; // (n+1) x (m+1), key-major

    std::uint64_t cell(std::uint32_t key, std::uint64_t energy) const {
        return counts[key * (m + 1) + energy];
    }
    std::uint64_t& cell(std::uint32_t key, std::uint64_t energy) {
        return counts[key * (m + 1) + energy];
    }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

namespace detail {

// Walk colorings gray(t0) .. gray(t1-1) in reflected-binary order, calling
// visitor(state_bits, key, energy) once per coloring. Edge state is the
// number of +1 endpoints; the energy delta comes from the k<->k-1 and 0<->1
// transitions.
template <class Visitor>
void sweep_gray(const Hypergraph& h, const IncidenceList& inc, SpectrumMode mode,
                const Coloring* ref, std::uint64_t t0, std::uint64_t t1,
                Visitor&& visitor) {
    const std::uint32_t n = h.n();
    const unsigned k = h.k();
    std::uint32_t state = std::uint32_t(t0 ^ (t0 >> 1));

    std::vector<std::uint16_t> plus_cnt(h.m(), 0);
    std::uint64_t energy = 0;
    for (std::size_t i = 0; i < h.m(); ++i) {
        std::uint16_t c = 0;
        for (auto v : h.edge(i)) c += (state >> v) & 1u;
        plus_cnt[i] = c;
        if (c == 0 || c == k) ++energy;
    }
    std::uint32_t key = 0;
    if (mode == SpectrumMode::magnetization) {
        key = std::uint32_t(std::popcount(state));
    } else {
        for (std::uint32_t v = 0; v < n; ++v)
            key += (((state >> v) & 1u) != 0) == ref->plus(v);
    }

    visitor(state, key, energy);
    for (std::uint64_t t = t0 + 1; t < t1; ++t) {
        const std::uint32_t v = std::uint32_t(std::countr_zero(t));
        const bool to_plus = !((state >> v) & 1u);
        state ^= (1u << v);
        for (std::uint32_t j = inc.offsets[v]; j < inc.offsets[v + 1]; ++j) {
            const std::uint32_t e = inc.edges[j];
            if (to_plus) {
                const std::uint16_t c = ++plus_cnt[e];
                if (c == k) ++energy;
                else if (c == 1) --energy;
            } else {
                const std::uint16_t c = --plus_cnt[e];
                if (c == 0) ++energy;
                else if (c == k - 1) --energy;
            }
        }
        if (mode == SpectrumMode::magnetization)
            key += to_plus ? 1 : -1;
        else
            key += (to_plus == ref->plus(v)) ? 1 : -1;
        visitor(state, key, energy);
    }
}

} // namespace detail

inline SpectrumTable spectrum(const Hypergraph& h, SpectrumMode mode,
                              const Coloring* reference = nullptr,
                              std::uint32_t cap = default_enumeration_cap,
                              unsigned threads = 1) {
    if (h.n() > cap)
        throw capacity_error("enumeration requires n <= " + std::to_string(cap));
    if (mode == SpectrumMode::overlap && reference == nullptr)
        throw parameter_error("overlap mode requires a reference coloring");

    SpectrumTable table{mode, h.n(), h.k(), h.m(), std::nullopt, {}};
    if (reference) table.reference = *reference;
    table.counts.assign(std::size_t(h.n() + 1) * (h.m() + 1), 0);

    const IncidenceList inc(h);
    const std::uint64_t total = std::uint64_t(1) << h.n();
    if (threads <= 1) {
        detail::sweep_gray(h, inc, mode, reference, 0, total,
                           [&](std::uint32_t, std::uint32_t key, std::uint64_t e) {
                               ++table.cell(key, e);
                           });
        return table;
    }
    // Contiguous gray-code blocks, each initialized from its boundary state;
    // integer histograms merge identically regardless of the partition.
    std::vector<SpectrumTable> parts(threads, table);
    std::vector<std::thread> pool;
    for (unsigned b = 0; b < threads; ++b) {
        const std::uint64_t t0 = total / threads * b;
        const std::uint64_t t1 = (b + 1 == threads) ? total : total / threads * (b + 1);
        pool.emplace_back([&, b, t0, t1] {
            detail::sweep_gray(h, inc, mode, reference, t0, t1,
                               [&parts, b](std::uint32_t, std::uint32_t key, std::uint64_t e) {
                                   ++parts[b].cell(key, e);
                               });
        });
    }
    for (auto& th : pool) th.join();
    for (unsigned b = 0; b < threads; ++b)
        for (std::size_t i = 0; i < table.counts.size(); ++i)
            table.counts[i] += parts[b].counts[i];
    return table;
}

// Which (key, energy) cells enter a restricted partition sum.
struct RestrictionSelector {
    enum class Kind { all, balanced, imbalanced, energy_window, overlap_at_least };
    Kind kind = Kind::all;
    double eps = 0.0;           // imbalanced / energy_window
    double theta = 2.0 / 3.0;   // overlap_at_least

    static RestrictionSelector all() { return {}; }
    static RestrictionSelector balanced() { return {Kind::balanced, 0, 0}; }
    static RestrictionSelector imbalanced(double eps) {
        if (!(eps > 0.0 && eps < 1.0)) throw parameter_error("imbalanced eps outside (0,1)");
        return {Kind::imbalanced, eps, 0};
    }
    static RestrictionSelector energy_window(double eps) {
        if (!(eps > 0.0 && eps < 1.0)) throw parameter_error("energy window eps outside (0,1)");
        return {Kind::energy_window, eps, 0};
    }
    static RestrictionSelector overlap_at_least(double theta) {
        if (!(theta >= -1.0 && theta <= 1.0)) throw parameter_error("theta outside [-1,1]");
        return {Kind::overlap_at_least, 0, theta};
    }

    bool admits(const SpectrumTable& t, std::uint32_t key, std::uint64_t energy,
                double beta) const {
        const double n = double(t.n);
        switch (kind) {
        case Kind::all:
            return true;
        case Kind::balanced: {
            const double dev = 2.0 * double(key) - n;
            return dev * dev <= 4.0 * n;
        }
        case Kind::imbalanced:
            return std::abs(double(key) - n / 2.0) > eps * n;
        case Kind::energy_window: {
            const double m0 = m0_fraction(t.k, beta) * double(t.m);
            return std::abs(double(energy) - m0) > eps * double(t.m);
        }
        case Kind::overlap_at_least:
            return 2.0 * double(key) - n >= theta * n - 1e-9;
        }
        return false;
    }

    bool needs_mode(SpectrumMode m) const {
        if (kind == Kind::overlap_at_least) return m == SpectrumMode::overlap;
        if (kind == Kind::balanced || kind == Kind::imbalanced)
            return m == SpectrumMode::magnetization;
        return true;
    }
};

// ln sum over admitted cells of count * exp(-beta * E). Returns -inf when the
// admitted set is empty (sweeps must not abort mid-grid).
inline double partition_log(const SpectrumTable& t, double beta,
                            const RestrictionSelector& sel = RestrictionSelector::all()) {
    if (!sel.needs_mode(t.mode))
        throw parameter_error("selector incompatible with spectrum mode");
    LogSumExp acc;
    for (std::uint32_t key = 0; key <= t.n; ++key)
        for (std::uint64_t e = 0; e <= t.m; ++e) {
            const std::uint64_t c = t.cell(key, e);
            if (c == 0 || !sel.admits(t, key, e, beta)) continue;
            acc.add(std::log(double(c)) - beta * double(e));
        }
    return acc.value();
}

inline double cluster_log(const SpectrumTable& t, double beta, double theta = 2.0 / 3.0) {
    return partition_log(t, beta, RestrictionSelector::overlap_at_least(theta));
}

// Exact Boltzmann sample: pick a (key, energy) cell with probability
// proportional to count * exp(-beta E), then re-walk the gray code to the
// j-th member of that cell for a uniform j.
inline Coloring boltzmann_sample(const SpectrumTable& t, const Hypergraph& h,
                                 double beta, std::uint64_t seed,
                                 std::uint32_t cap = default_enumeration_cap) {
    if (h.n() > cap)
        throw capacity_error("enumeration requires n <= " + std::to_string(cap));
    Rng rng(seed);

    double max_log = neg_inf;
    for (std::uint32_t key = 0; key <= t.n; ++key)
        for (std::uint64_t e = 0; e <= t.m; ++e)
            if (t.cell(key, e) > 0) {
                const double lw = std::log(double(t.cell(key, e))) - beta * double(e);
                if (lw > max_log) max_log = lw;
            }
    double z = 0.0;
    for (std::uint32_t key = 0; key <= t.n; ++key)
        for (std::uint64_t e = 0; e <= t.m; ++e)
            if (t.cell(key, e) > 0)
                z += std::exp(std::log(double(t.cell(key, e))) - beta * double(e) - max_log);

    const double u = rng.uniform() * z;
    std::uint32_t sel_key = 0;
    std::uint64_t sel_e = 0;
    double acc = 0.0;
    bool found = false;
    for (std::uint32_t key = 0; key <= t.n && !found; ++key)
        for (std::uint64_t e = 0; e <= t.m; ++e) {
            if (t.cell(key, e) == 0) continue;
            acc += std::exp(std::log(double(t.cell(key, e))) - beta * double(e) - max_log);
            if (u < acc) { sel_key = key; sel_e = e; found = true; break; }
        }
    if (!found) { // numerical tail: take the last nonempty cell
        for (std::uint32_t key = 0; key <= t.n; ++key)
            for (std::uint64_t e = 0; e <= t.m; ++e)
                if (t.cell(key, e) > 0) { sel_key = key; sel_e = e; }
    }

    const std::uint64_t target = rng.below(t.cell(sel_key, sel_e));
    const IncidenceList inc(h);
    const Coloring* ref = t.reference ? &*t.reference : nullptr;
    std::uint64_t hits = 0;
    std::uint32_t result_state = 0;
    bool done = false;
    detail::sweep_gray(h, inc, t.mode, ref, 0, std::uint64_t(1) << h.n(),
                       [&](std::uint32_t state, std::uint32_t key, std::uint64_t e) {
                           if (done || key != sel_key || e != sel_e) return;
                           if (hits == target) { result_state = state; done = true; }
                           ++hits;
                       });
    Coloring c(h.n());
    for (std::uint32_t v = 0; v < h.n(); ++v)
        c.set(v, (result_state >> v) & 1u);
    return c;
}

// Tame: balanced and cluster mass no larger than the expected partition function.
inline bool is_tame(const Hypergraph& h, const Coloring& sigma, double beta,
                    double expected_log_z,
                    std::uint32_t cap = default_enumeration_cap) {
    if (!is_balanced(sigma)) return false;
    const SpectrumTable t = spectrum(h, SpectrumMode::overlap, &sigma, cap);
    return cluster_log(t, beta, 2.0 / 3.0) <= expected_log_z;
}

// Sorted CSV (key, energy, count), nonzero cells only.
inline void write_spectrum_csv(std::ostream& os, const SpectrumTable& t) {
    os << "key,energy,count\n";
    for (std::uint32_t key = 0; key <= t.n; ++key)
        for (std::uint64_t e = 0; e <= t.m; ++e)
            if (t.cell(key, e) > 0)
                os << key << ',' << e << ',' << t.cell(key, e) << '\n';
}

} // namespace hyco

#endif
