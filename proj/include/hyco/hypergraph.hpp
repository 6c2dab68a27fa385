#ifndef HYCO_HYPERGRAPH_HPP
#define HYCO_HYPERGRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyco/numeric.hpp"
#include "hyco/rng.hpp"

namespace hyco {

// k-uniform hypergraph on vertices [0, n). Edges are stored flat, each edge's
// vertices ascending, and the edge list sorted lexicographically so that equal
// hypergraphs serialize identically.
class Hypergraph {
  public:
    Hypergraph(std::uint32_t n, unsigned k, bool allows_multi = false)
        : n_(n), k_(k), allows_multi_(allows_multi) {}

    std::uint32_t n() const { return n_; }
    unsigned k() const { return k_; }
    std::size_t m() const { return verts_.size() / k_; }
    bool allows_multi() const { return allows_multi_; }

    std::span<const std::uint32_t> edge(std::size_t i) const {
        return {verts_.data() + i * k_, k_};
    }

    // Vertices must be distinct; stored sorted.
    void add_edge(std::span<const std::uint32_t> vs) {
        std::vector<std::uint32_t> e(vs.begin(), vs.end());
        std::sort(e.begin(), e.end());
        for (unsigned i = 0; i < k_; ++i) {
            if (e[i] >= n_) throw parameter_error("edge vertex out of range");
            if (i > 0 && e[i] == e[i - 1])
                throw parameter_error("edge vertices not distinct");
        }
        verts_.insert(verts_.end(), e.begin(), e.end());
    }

    void add_edge(std::initializer_list<std::uint32_t> vs) {
        add_edge(std::span<const std::uint32_t>(vs.begin(), vs.size()));
    }

    void remove_last_edge() { verts_.resize(verts_.size() - k_); }

    // Lexicographic sort of the edge list (canonical form).
    void canonicalize() {
        const std::size_t mm = m();
        std::vector<std::size_t> idx(mm);
        for (std::size_t i = 0; i < mm; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(
                verts_.begin() + a * k_, verts_.begin() + (a + 1) * k_,
                verts_.begin() + b * k_, verts_.begin() + (b + 1) * k_);
        });
        std::vector<std::uint32_t> out(verts_.size());
        for (std::size_t i = 0; i < mm; ++i)
            std::copy(verts_.begin() + idx[i] * k_,
                      verts_.begin() + (idx[i] + 1) * k_,
                      out.begin() + i * k_);
        verts_.swap(out);
    }

    bool operator==(const Hypergraph& o) const {
        return n_ == o.n_ && k_ == o.k_ && verts_ == o.verts_;
    }

  private:
    std::uint32_t n_;
    unsigned k_;
    bool allows_multi_;
    std::vector<std::uint32_t> verts_;
};

// +-1 coloring as a bit vector (bit set <=> +1).
class Coloring {
  public:
    explicit Coloring(std::uint32_t n) : bits_(n, false) {}
    Coloring(std::uint32_t n, std::uint64_t mask) : bits_(n, false) {
        for (std::uint32_t v = 0; v < n && v < 64; ++v)
            bits_[v] = (mask >> v) & 1u;
    }

    std::uint32_t n() const { return std::uint32_t(bits_.size()); }
    int spin(std::uint32_t v) const { return bits_[v] ? +1 : -1; }
    bool plus(std::uint32_t v) const { return bits_[v]; }
    void set(std::uint32_t v, bool is_plus) { bits_[v] = is_plus; }
    void flip(std::uint32_t v) { bits_[v] = !bits_[v]; }

    std::uint32_t count_plus() const {
        std::uint32_t c = 0;
        for (bool b : bits_) c += b;
        return c;
    }

    Coloring complement() const {
        Coloring c(n());
        for (std::uint32_t v = 0; v < n(); ++v) c.bits_[v] = !bits_[v];
        return c;
    }

    bool operator==(const Coloring& o) const { return bits_ == o.bits_; }

  private:
    std::vector<bool> bits_;
};

// Parameters of the null models; p = d / C(n-1, k-1), m = ceil(d n / k).
struct ModelParams {
    double d;
    unsigned k;
    double beta;
    std::uint32_t n;

    double p() const {
        double denom = std::exp(log_binom(double(n) - 1.0, double(k) - 1.0));
        double v = d / denom;
        if (!(v >= 0.0 && v <= 1.0))
            throw parameter_error("edge probability p outside [0,1]");
        return v;
    }
    std::uint64_t m() const {
        return std::uint64_t(std::ceil(d * double(n) / double(k)));
    }
};

inline std::uint64_t monochromatic_count(const Hypergraph& h, const Coloring& sigma) {
    if (sigma.n() != h.n()) throw parameter_error("coloring length mismatch");
    std::uint64_t cnt = 0;
    for (std::size_t i = 0; i < h.m(); ++i) {
        auto e = h.edge(i);
        bool first = sigma.plus(e[0]), mono = true;
        for (unsigned j = 1; j < h.k(); ++j)
            if (sigma.plus(e[j]) != first) { mono = false; break; }
        cnt += mono;
    }
    return cnt;
}

// Number of forbidden (monochromatic-capable) k-sets: C(n_plus,k) + C(n-n_plus,k).
inline std::uint64_t forb(std::uint64_t n_plus, std::uint64_t n, unsigned k) {
    if (n_plus > n) throw parameter_error("n_plus exceeds n");
    return binom_exact(n_plus, k) + binom_exact(n - n_plus, k);
}

inline double forb_log(std::uint64_t n_plus, std::uint64_t n, unsigned k) {
    return log_add(log_binom(double(n_plus), double(k)),
                   log_binom(double(n - n_plus), double(k)));
}

inline std::int64_t overlap(const Coloring& a, const Coloring& b) {
    if (a.n() != b.n()) throw parameter_error("coloring length mismatch");
    std::int64_t s = 0;
    for (std::uint32_t v = 0; v < a.n(); ++v)
        s += (a.plus(v) == b.plus(v)) ? 1 : -1;
    return s;
}

inline bool is_balanced(const Coloring& sigma) {
    // |n_plus - n/2| <= sqrt(n), checked exactly as (2 n_plus - n)^2 <= 4n.
    std::int64_t n = sigma.n();
    std::int64_t dev = 2 * std::int64_t(sigma.count_plus()) - n;
    return dev * dev <= 4 * n;
}

enum class Model { gnp, gnm, gnm_rep };

namespace detail {

// Past this many k-sets we stop iterating/materializing them individually.
inline constexpr double kset_iteration_cap = 4.0e6;

inline std::vector<std::uint32_t> nth_kset(std::uint64_t rank, std::uint32_t n, unsigned k) {
    // Combinatorial unranking in lexicographic order.
    std::vector<std::uint32_t> out;
    out.reserve(k);
    std::uint32_t v = 0;
    for (unsigned j = 0; j < k; ++j) {
        while (true) {
            std::uint64_t block = binom_exact(n - 1 - v, k - 1 - j);
            if (rank < block) break;
            rank -= block;
            ++v;
        }
        out.push_back(v++);
    }
    return out;
}

inline std::uint64_t kset_key(std::span<const std::uint32_t> e, std::uint32_t n) {
    std::uint64_t key = 0;
    for (std::uint32_t v : e) key = key * n + v;
    return key;
}

} // namespace detail

// CSR vertex -> incident edge indices.
struct IncidenceList {
    std::vector<std::uint32_t> offsets; // n+1
    std::vector<std::uint32_t> edges;   // edge indices, grouped by vertex

    explicit IncidenceList(const Hypergraph& h) {
        offsets.assign(h.n() + 1, 0);
        for (std::size_t i = 0; i < h.m(); ++i)
            for (auto v : h.edge(i)) ++offsets[v + 1];
        for (std::uint32_t v = 0; v < h.n(); ++v) offsets[v + 1] += offsets[v];
        edges.resize(h.m() * h.k());
        std::vector<std::uint32_t> pos(offsets.begin(), offsets.end() - 1);
        for (std::size_t i = 0; i < h.m(); ++i)
            for (auto v : h.edge(i)) edges[pos[v]++] = std::uint32_t(i);
    }

    std::span<const std::uint32_t> incident(std::uint32_t v) const {
        return {edges.data() + offsets[v], edges.data() + offsets[v + 1]};
    }
};

inline Hypergraph generate(Model model, const ModelParams& params, std::uint64_t seed) {
    const std::uint32_t n = params.n;
    const unsigned k = params.k;
    Rng rng(seed);
    const double log_nsets = log_binom(double(n), double(k));
    const double nsets_d = std::exp(log_nsets);

    if (model == Model::gnp) {
        const double p = params.p();
        Hypergraph h(n, k, false);
        if (nsets_d <= detail::kset_iteration_cap) {
            const std::uint64_t nsets = binom_exact(n, k);
            for (std::uint64_t r = 0; r < nsets; ++r) {
                if (rng.bernoulli(p)) {
                    auto e = detail::nth_kset(r, n, k);
                    h.add_edge(e);
                }
            }
        } else {
            // Equivalent in distribution: edge count ~ Binomial(C(n,k), p),
            // then that many distinct uniform k-sets.
            std::uint64_t cnt = sample_binomial(nsets_d, p, rng);
            std::unordered_set<std::uint64_t> seen;
            while (seen.size() < cnt) {
                auto e = rng.distinct_sorted(n, k);
                if (seen.insert(detail::kset_key(e, n)).second) h.add_edge(e);
            }
        }
        h.canonicalize();
        return h;
    }

    const std::uint64_t m = params.m();
    if (model == Model::gnm_rep) {
        Hypergraph h(n, k, true);
        for (std::uint64_t i = 0; i < m; ++i) {
            auto e = rng.distinct_sorted(n, k);
            h.add_edge(e);
        }
        h.canonicalize();
        return h;
    }

    // gnm: m distinct k-sets.
    if (double(m) > nsets_d)
        throw parameter_error("gnm requires m <= C(n,k)");
    Hypergraph h(n, k, false);
    if (nsets_d <= detail::kset_iteration_cap && double(m) > nsets_d / 2.0) {
        // Dense regime: partial Fisher-Yates over all k-set ranks.
        const std::uint64_t nsets = binom_exact(n, k);
        std::vector<std::uint64_t> ranks(nsets);
        for (std::uint64_t i = 0; i < nsets; ++i) ranks[i] = i;
        for (std::uint64_t i = 0; i < m; ++i)
            std::swap(ranks[i], ranks[i + rng.below(nsets - i)]);
        for (std::uint64_t i = 0; i < m; ++i) {
            auto e = detail::nth_kset(ranks[i], n, k);
            h.add_edge(e);
        }
    } else {
        std::unordered_set<std::uint64_t> seen;
        while (seen.size() < m) {
            auto e = rng.distinct_sorted(n, k);
            if (seen.insert(detail::kset_key(e, n)).second) h.add_edge(e);
        }
    }
    h.canonicalize();
    return h;
}

// ---- text formats ----
// Hypergraph: "n k m" header, then m lines of k ascending vertex indices.
// Coloring: one line over {+,-}.

inline void write_hypergraph(std::ostream& os, const Hypergraph& h) {
    os << h.n() << ' ' << h.k() << ' ' << h.m() << '\n';
    for (std::size_t i = 0; i < h.m(); ++i) {
        auto e = h.edge(i);
        for (unsigned j = 0; j < h.k(); ++j) os << (j ? " " : "") << e[j];
        os << '\n';
    }
}

inline Hypergraph parse_hypergraph(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw parameter_error("empty hypergraph file");
    std::istringstream hdr(line);
    std::uint64_t n, k, m;
    if (!(hdr >> n >> k >> m)) throw parameter_error("bad header at line 1");
    Hypergraph h{std::uint32_t(n), unsigned(k)};
    for (std::uint64_t i = 0; i < m; ++i) {
        if (!std::getline(is, line))
            throw parameter_error("unexpected end of file at line " + std::to_string(i + 2));
        std::istringstream ls(line);
        std::vector<std::uint32_t> e(k);
        for (std::uint64_t j = 0; j < k; ++j) {
            if (!(ls >> e[j]))
                throw parameter_error("bad edge at line " + std::to_string(i + 2));
            if (j > 0 && e[j] <= e[j - 1])
                throw parameter_error("vertices not ascending at line " + std::to_string(i + 2));
        }
        std::uint32_t extra;
        if (ls >> extra)
            throw parameter_error("arity mismatch at line " + std::to_string(i + 2));
        h.add_edge(e);
    }
    return h;
}

inline void write_coloring(std::ostream& os, const Coloring& c) {
    for (std::uint32_t v = 0; v < c.n(); ++v) os << (c.plus(v) ? '+' : '-');
    os << '\n';
}

inline Coloring parse_coloring(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw parameter_error("empty coloring file");
    Coloring c(std::uint32_t(line.size()));
    for (std::size_t v = 0; v < line.size(); ++v) {
        if (line[v] == '+') c.set(std::uint32_t(v), true);
        else if (line[v] == '-') c.set(std::uint32_t(v), false);
        else throw parameter_error("bad coloring character at line 1");
    }
    return c;
}

} // namespace hyco

#endif
