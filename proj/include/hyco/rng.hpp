#ifndef HYCO_RNG_HPP
#define HYCO_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hyco/numeric.hpp"

namespace hyco {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed splitting rule for parallel trials: child = splitmix64(seed ^ mix(index)).
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t trial_index) {
    return splitmix64(seed ^ splitmix64(trial_index + 1));
}

// Deterministic RNG wrapper. All sampling goes through this class so that a
// fixed seed yields identical streams independent of the standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform integer in [0, n), rejection to kill modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = (0 - n) % n; // 2^64 mod n
        std::uint64_t x;
        do {
            x = eng_();
        } while (x < limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // k distinct values in [0, n), returned sorted ascending.
    std::vector<std::uint32_t> distinct_sorted(std::uint32_t n, unsigned k) {
        std::vector<std::uint32_t> out;
        out.reserve(k);
        while (out.size() < k) {
            std::uint32_t v = std::uint32_t(below(n));
            bool dup = false;
            for (std::uint32_t u : out)
                if (u == v) { dup = true; break; }
            if (!dup) out.push_back(v);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    template <class T> void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::mt19937_64 eng_;
};

// Binomial(N, p) sampled by CDF inversion over a window of +-40 standard
// deviations around the mean. N may exceed 64-bit range (passed as double);
// the truncated tail mass is below 1e-300.
inline std::uint64_t sample_binomial(double n_trials, double p, Rng& rng) {
    if (p <= 0.0 || n_trials <= 0.0) return 0;
    if (p >= 1.0) return std::uint64_t(n_trials);
    const double mean = n_trials * p;
    const double sd = std::sqrt(mean * (1.0 - p));
    double lo_d = std::floor(mean - 40.0 * sd - 8.0);
    double hi_d = std::ceil(mean + 40.0 * sd + 8.0);
    if (lo_d < 0) lo_d = 0;
    if (hi_d > n_trials) hi_d = n_trials;
    const std::uint64_t lo = std::uint64_t(lo_d);
    const std::uint64_t hi = std::uint64_t(hi_d);

    const double lp = std::log(p), lq = std::log1p(-p);
    std::vector<double> logpmf;
    logpmf.reserve(std::size_t(hi - lo + 1));
    double cur = log_binom(n_trials, double(lo)) + double(lo) * lp +
                 (n_trials - double(lo)) * lq;
    logpmf.push_back(cur);
    for (std::uint64_t j = lo; j < hi; ++j) {
        // pmf(j+1)/pmf(j) = (N-j) p / ((j+1) (1-p))
        cur += std::log((n_trials - double(j)) * p) -
               std::log(double(j + 1) * (1.0 - p));
        logpmf.push_back(cur);
    }
    const double logz = log_sum_exp(logpmf);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < logpmf.size(); ++i) {
        acc += std::exp(logpmf[i] - logz);
        if (u < acc) return lo + i;
    }
    return hi;
}

// Binomial(n, 1/2) conditioned on |x - n/2| <= sqrt(n): exact inversion over
// the (small) admissible window.
inline std::uint64_t sample_balanced_magnetization(std::uint64_t n, Rng& rng) {
    const double half = double(n) / 2.0;
    const double dev = std::sqrt(double(n));
    std::uint64_t lo = std::uint64_t(std::ceil(half - dev));
    std::uint64_t hi = std::uint64_t(std::floor(half + dev));
    std::vector<double> logpmf;
    for (std::uint64_t a = lo; a <= hi; ++a)
        logpmf.push_back(log_binom(double(n), double(a)));
    const double logz = log_sum_exp(logpmf);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < logpmf.size(); ++i) {
        acc += std::exp(logpmf[i] - logz);
        if (u < acc) return lo + i;
    }
    return hi;
}

} // namespace hyco

#endif
