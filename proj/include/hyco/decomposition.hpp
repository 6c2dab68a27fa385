#ifndef HYCO_DECOMPOSITION_HPP
#define HYCO_DECOMPOSITION_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "hyco/hypergraph.hpp"
#include "hyco/numeric.hpp"

namespace hyco {

// Peeling / whitening / backbone constants. Defaults follow the source
// constants; the scaled profile keeps the same arithmetic relations at
// desk-scale degrees (a vertex supports only ~k ln2 edges there, so the
// literal constants would whiten everything).
struct Thresholds {
    int core_support = 100;
    int core_endangered = 10;
    int wh_support = 200;
    int wh_mono = 2;
    int wh_keep_support = 150;
    int wh_endangered = 5;
    int rigidity_factor = 88;
    double x_fraction = 0.0; // set per k
    double cluster_overlap = 2.0 / 3.0;

    void validate() const {
        if (wh_keep_support < core_support)
            throw parameter_error("thresholds: wh_keep_support < core_support");
        if (wh_mono + wh_endangered > core_endangered)
            throw parameter_error("thresholds: wh_mono + wh_endangered > core_endangered");
    }

    static Thresholds paper_defaults(unsigned k) {
        Thresholds t;
        t.x_fraction = std::pow(double(k), -5.0);
        t.validate();
        return t;
    }

    // Desk-scale profile for instances where per-vertex support ~ k ln2.
    static Thresholds scaled(unsigned k) {
        Thresholds t;
        t.core_support = 1;
        t.core_endangered = 8;
        t.wh_support = 2;
        t.wh_mono = 2;
        t.wh_keep_support = 1;
        t.wh_endangered = 6;
        t.x_fraction = std::pow(double(k), -5.0);
        t.validate();
        return t;
    }
};

enum class PeelRule { cr1, cr2, wh1, wh2_endangered, wh2_support };

struct PeelEvent {
    std::uint32_t v;
    PeelRule rule;
};

namespace detail {

// Supporter of a critical edge (the lone vertex opposite the other k-1),
// or -1 if the edge is not critical.
inline std::int64_t supporter(std::span<const std::uint32_t> e, const Coloring& sigma) {
    std::uint32_t plus = 0, last_plus = 0, last_minus = 0;
    for (std::uint32_t v : e) {
        if (sigma.plus(v)) { ++plus; last_plus = v; }
        else last_minus = v;
    }
    if (plus == 1 && e.size() >= 2) return last_plus;
    if (plus + 1 == e.size() && e.size() >= 2) return last_minus;
    return -1;
}

} // namespace detail

// Number of edges containing v whose U-restricted vertex set is nonempty and
// monochromatic under sigma.
inline int endangered_count(const Hypergraph& h, const Coloring& sigma,
                            const std::vector<bool>& in_u, std::uint32_t v,
                            const IncidenceList& inc) {
    int cnt = 0;
    for (std::uint32_t ei : inc.incident(v)) {
        int plus = 0, minus = 0;
        for (std::uint32_t u : h.edge(ei))
            if (in_u[u]) (sigma.plus(u) ? plus : minus)++;
        cnt += (plus > 0) != (minus > 0);
    }
    return cnt;
}

inline int endangered_count(const Hypergraph& h, const Coloring& sigma,
                            const std::vector<bool>& in_u, std::uint32_t v) {
    return endangered_count(h, sigma, in_u, v, IncidenceList(h));
}

struct CoreResult {
    std::vector<bool> in_core;
    std::vector<PeelEvent> trace;
    std::uint64_t size = 0;
};

// Maximal vertex set in which every member supports at least core_support
// all-inside edges and occurs in at most core_endangered inside-endangered
// edges. Counter-decrement peeling; the fixed point is order-free, the trace
// follows the given priority order (vertex index by default).
inline CoreResult core_peel(const Hypergraph& h, const Coloring& sigma,
                            const Thresholds& th,
                            const std::vector<std::uint32_t>* priority = nullptr) {
    th.validate();
    const std::uint32_t n = h.n();
    const std::size_t m = h.m();
    const IncidenceList inc(h);

    std::vector<bool> in_set(n, true);
    std::vector<std::uint32_t> inside_cnt(m);   // surviving endpoints
    std::vector<std::uint8_t> pc(m), mc(m);     // surviving plus/minus counts
    std::vector<std::int64_t> supp_edge(m);     // static supporter or -1
    std::vector<std::int32_t> supp_in(n, 0);    // all-inside supported edges
    std::vector<std::int32_t> endang(n, 0);     // incident inside-endangered edges

    for (std::size_t e = 0; e < m; ++e) {
        inside_cnt[e] = h.k();
        std::uint8_t p = 0;
        for (std::uint32_t v : h.edge(e)) p += sigma.plus(v);
        pc[e] = p;
        mc[e] = std::uint8_t(h.k() - p);
        supp_edge[e] = detail::supporter(h.edge(e), sigma);
        if (supp_edge[e] >= 0) ++supp_in[std::size_t(supp_edge[e])];
        if ((pc[e] > 0) != (mc[e] > 0))
            for (std::uint32_t v : h.edge(e)) ++endang[v];
    }

    auto prio = [&](std::uint32_t v) { return priority ? (*priority)[v] : v; };
    using QEntry = std::pair<std::uint32_t, std::uint32_t>; // (priority, vertex)
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;
    auto violates = [&](std::uint32_t v, PeelRule& rule) {
        if (supp_in[v] < th.core_support) { rule = PeelRule::cr1; return true; }
        if (endang[v] > th.core_endangered) { rule = PeelRule::cr2; return true; }
        return false;
    };
    for (std::uint32_t v = 0; v < n; ++v) queue.emplace(prio(v), v);

    CoreResult out;
    out.trace.reserve(64);
    while (!queue.empty()) {
        const std::uint32_t v = queue.top().second;
        queue.pop();
        PeelRule rule;
        if (!in_set[v] || !violates(v, rule)) continue;
        in_set[v] = false;
        out.trace.push_back({v, rule});
        for (std::uint32_t ei : inc.incident(v)) {
            const bool was_endangered = (pc[ei] > 0) != (mc[ei] > 0);
            if (inside_cnt[ei] == h.k() && supp_edge[ei] >= 0) {
                const std::uint32_t s = std::uint32_t(supp_edge[ei]);
                if (--supp_in[s] < th.core_support && in_set[s])
                    queue.emplace(prio(s), s);
            }
            --inside_cnt[ei];
            (sigma.plus(v) ? pc[ei] : mc[ei])--;
            const bool now_endangered = (pc[ei] > 0) != (mc[ei] > 0);
            if (was_endangered != now_endangered) {
                const int delta = now_endangered ? +1 : -1;
                for (std::uint32_t u : h.edge(ei)) {
                    endang[u] += delta;
                    if (delta > 0 && in_set[u] && endang[u] > th.core_endangered)
                        queue.emplace(prio(u), u);
                }
            }
        }
    }
    out.in_core = std::move(in_set);
    for (std::uint32_t v = 0; v < n; ++v) out.size += out.in_core[v];
    return out;
}

struct WhiteningResult {
    std::vector<bool> in_u;
    std::vector<PeelEvent> trace;
    std::uint64_t size = 0;
};

// WH1 seeds U with low-support / high-monochromatic-degree vertices; WH2
// grows U while some outside vertex sees too many complement-endangered
// edges touching U, or supports too few edges fully outside U.
inline WhiteningResult whitening(const Hypergraph& h, const Coloring& sigma,
                                 const Thresholds& th,
                                 const std::vector<std::uint32_t>* priority = nullptr) {
    th.validate();
    const std::uint32_t n = h.n();
    const std::size_t m = h.m();
    const IncidenceList inc(h);

    std::vector<std::int64_t> supp_edge(m);
    std::vector<std::int32_t> supp_total(n, 0), mono_deg(n, 0);
    for (std::size_t e = 0; e < m; ++e) {
        supp_edge[e] = detail::supporter(h.edge(e), sigma);
        if (supp_edge[e] >= 0) ++supp_total[std::size_t(supp_edge[e])];
        std::uint8_t p = 0;
        for (std::uint32_t v : h.edge(e)) p += sigma.plus(v);
        if (p == 0 || p == h.k())
            for (std::uint32_t v : h.edge(e)) ++mono_deg[v];
    }

    WhiteningResult out;
    out.in_u.assign(n, false);
    std::vector<bool>& in_u = out.in_u;

    // per-edge counts over e \ U
    std::vector<std::uint8_t> pc_out(m), mc_out(m);
    std::vector<std::int32_t> supp_out(n, 0); // supported edges with e cap U empty
    std::vector<std::int32_t> endang_u(n, 0); // incident contributing edges
    for (std::size_t e = 0; e < m; ++e) {
        std::uint8_t p = 0;
        for (std::uint32_t v : h.edge(e)) p += sigma.plus(v);
        pc_out[e] = p;
        mc_out[e] = std::uint8_t(h.k() - p);
        if (supp_edge[e] >= 0) ++supp_out[std::size_t(supp_edge[e])];
    }
    auto contributes = [&](std::size_t e) {
        const unsigned out_cnt = pc_out[e] + mc_out[e];
        return out_cnt < h.k() && ((pc_out[e] > 0) != (mc_out[e] > 0));
    };

    auto prio = [&](std::uint32_t v) { return priority ? (*priority)[v] : v; };
    using QEntry = std::pair<std::uint32_t, std::uint32_t>;
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;

    auto add_to_u = [&](std::uint32_t v, PeelRule rule) {
        in_u[v] = true;
        out.trace.push_back({v, rule});
        for (std::uint32_t ei : inc.incident(v)) {
            const bool was = contributes(ei);
            const unsigned out_before = pc_out[ei] + mc_out[ei];
            if (out_before == h.k() && supp_edge[ei] >= 0) {
                const std::uint32_t s = std::uint32_t(supp_edge[ei]);
                if (--supp_out[s] < th.wh_keep_support && !in_u[s])
                    queue.emplace(prio(s), s);
            }
            (sigma.plus(v) ? pc_out[ei] : mc_out[ei])--;
            const bool now = contributes(ei);
            if (was != now) {
                const int delta = now ? +1 : -1;
                for (std::uint32_t u : h.edge(ei)) {
                    endang_u[u] += delta;
                    if (delta > 0 && !in_u[u] && endang_u[u] > th.wh_endangered)
                        queue.emplace(prio(u), u);
                }
            }
        }
    };

    // WH1 pass, processed in priority order for a reproducible trace.
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t v = 0; v < n; ++v) order[v] = v;
    if (priority)
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return (*priority)[a] < (*priority)[b];
        });
    for (std::uint32_t v : order)
        if (supp_total[v] < th.wh_support || mono_deg[v] > th.wh_mono)
            add_to_u(v, PeelRule::wh1);

    // WH2 fixed point
    for (std::uint32_t v = 0; v < n; ++v)
        if (!in_u[v]) queue.emplace(prio(v), v);
    while (!queue.empty()) {
        const std::uint32_t v = queue.top().second;
        queue.pop();
        if (in_u[v]) continue;
        if (endang_u[v] > th.wh_endangered)
            add_to_u(v, PeelRule::wh2_endangered);
        else if (supp_out[v] < th.wh_keep_support)
            add_to_u(v, PeelRule::wh2_support);
    }
    for (std::uint32_t v = 0; v < n; ++v) out.size += in_u[v];
    return out;
}

struct Decomposition {
    std::vector<bool> core, backbone, rest, free_set;
    std::uint64_t core_size = 0, backbone_size = 0, rest_size = 0, free_size = 0;
    std::vector<std::int32_t> support_count;    // edges supported by v
    std::vector<std::int32_t> endangered_core;  // incident core-endangered edges
    std::vector<std::int32_t> mono_degree;      // M'(v)
    std::vector<PeelEvent> peel_trace;
    std::uint64_t energy = 0; // monochromatic edges under sigma
};

// Split non-core vertices into backbone (supports an all-core-completed edge,
// and no incident edge is {v}+core-endangered) and rest; free rest vertices
// see only edges whose core intersection is nonempty and bichromatic.
inline Decomposition classify_vertices(const Hypergraph& h, const Coloring& sigma,
                                       const std::vector<bool>& core) {
    const std::uint32_t n = h.n();
    const std::size_t m = h.m();
    const IncidenceList inc(h);

    Decomposition d;
    d.core = core;
    d.backbone.assign(n, false);
    d.rest.assign(n, false);
    d.free_set.assign(n, false);
    d.support_count.assign(n, 0);
    d.endangered_core.assign(n, 0);
    d.mono_degree.assign(n, 0);

    std::vector<std::int64_t> supp_edge(m);
    std::vector<std::uint8_t> core_plus(m), core_minus(m), mono(m);
    std::vector<std::uint32_t> core_cnt(m);
    for (std::size_t e = 0; e < m; ++e) {
        supp_edge[e] = detail::supporter(h.edge(e), sigma);
        if (supp_edge[e] >= 0) ++d.support_count[std::size_t(supp_edge[e])];
        std::uint8_t p = 0, cp = 0, cm = 0;
        std::uint32_t cc = 0;
        for (std::uint32_t v : h.edge(e)) {
            p += sigma.plus(v);
            if (core[v]) { ++cc; (sigma.plus(v) ? cp : cm)++; }
        }
        mono[e] = (p == 0 || p == h.k());
        if (mono[e]) {
            ++d.energy;
            for (std::uint32_t v : h.edge(e)) ++d.mono_degree[v];
        }
        core_plus[e] = cp;
        core_minus[e] = cm;
        core_cnt[e] = cc;
        if ((cp > 0) != (cm > 0))
            for (std::uint32_t v : h.edge(e)) ++d.endangered_core[v];
    }

    for (std::uint32_t v = 0; v < n; ++v) {
        if (core[v]) { ++d.core_size; continue; }
        bool bb1 = false, bb2 = true, all_bichromatic_core = true;
        for (std::uint32_t ei : inc.incident(v)) {
            // e \ {v} inside core, supported by v
            if (supp_edge[ei] == std::int64_t(v) && core_cnt[ei] + 1 == h.k())
                bb1 = true;
            // {v} + core endangered: that restricted set is monochromatic
            std::uint8_t p = core_plus[ei] + (sigma.plus(v) ? 1 : 0);
            std::uint8_t q = core_minus[ei] + (sigma.plus(v) ? 0 : 1);
            if (p == 0 || q == 0) bb2 = false;
            if (!(core_cnt[ei] > 0 && core_plus[ei] > 0 && core_minus[ei] > 0))
                all_bichromatic_core = false;
        }
        if (bb1 && bb2) {
            d.backbone[v] = true;
            ++d.backbone_size;
        } else {
            d.rest[v] = true;
            ++d.rest_size;
            if (all_bichromatic_core) {
                d.free_set[v] = true;
                ++d.free_size;
            }
        }
    }
    return d;
}

inline Decomposition decompose(const Hypergraph& h, const Coloring& sigma,
                               const Thresholds& th,
                               const std::vector<std::uint32_t>* priority = nullptr) {
    CoreResult core = core_peel(h, sigma, th, priority);
    Decomposition d = classify_vertices(h, sigma, core.in_core);
    d.peel_trace = std::move(core.trace);
    return d;
}

struct ClusterEstimate {
    double lower;  // per-n: |free| ln2 - beta E, deterministic
    double upper;  // per-n, with asymptotic correction terms
    double point;  // midpoint of [lower, upper]
    // term breakdown (per-n)
    double free_entropy;
    double rest_entropy;
    double energy_term;
    double mprime_correction;
    double rigidity_term;
    double backbone_slack;
    bool overlap_feasible; // |free| small enough for the configured overlap
};

// Free vertices flip without changing the energy, giving the deterministic
// lower bound; the upper bound adds the rigidity and backbone slack terms,
// which are asymptotic, so the breakdown is carried along.
inline ClusterEstimate cluster_log_estimate(const Hypergraph& h, double beta,
                                            const Decomposition& d,
                                            const Thresholds& th) {
    if (!(beta >= 0)) throw parameter_error("beta must be nonnegative");
    const double n = double(h.n());
    const double ln2 = std::log(2.0);
    double mprime_sum = 0.0;
    for (std::uint32_t v = 0; v < h.n(); ++v)
        if (d.rest[v] && !d.free_set[v]) mprime_sum += double(d.mono_degree[v]);

    ClusterEstimate est{};
    est.free_entropy = double(d.free_size) * ln2 / n;
    est.rest_entropy = double(d.rest_size) * ln2 / n;
    est.energy_term = beta * double(d.energy) / n;
    est.mprime_correction = beta * mprime_sum / n;
    est.rigidity_term = std::exp(-double(th.rigidity_factor) * beta);
    est.backbone_slack = std::exp(-beta) * double(d.backbone_size) / n;
    est.lower = est.free_entropy - est.energy_term;
    est.upper = est.rest_entropy - est.energy_term + est.mprime_correction +
                est.rigidity_term + est.backbone_slack;
    est.point = 0.5 * (est.lower + est.upper);
    // Flipping f free vertices moves the overlap down to 1 - 2f/n; the lower
    // bound counts the whole cube only if it stays above the threshold.
    est.overlap_feasible =
        double(d.free_size) <= n * (1.0 - th.cluster_overlap) / 2.0;
    return est;
}

inline void write_census_header(std::ostream& os) {
    os << "n,k,d,beta,core,backbone,rest,free,energy,lower,upper,point\n";
}

inline void write_census_row(std::ostream& os, const Hypergraph& h, double dd,
                             double beta, const Decomposition& d,
                             const ClusterEstimate& est) {
    os << h.n() << ',' << h.k() << ',' << dd << ',' << beta << ','
       << d.core_size << ',' << d.backbone_size << ',' << d.rest_size << ','
       << d.free_size << ',' << d.energy << ',' << est.lower << ','
       << est.upper << ',' << est.point << '\n';
}

} // namespace hyco

#endif
