#ifndef HYCO_NUMERIC_HPP
#define HYCO_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hyco {

struct parameter_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ln C(n, k); 0 for k == 0 or k == n, -inf when the coefficient vanishes.
inline double log_binom(double n, double k) {
    if (k < 0 || k > n) return neg_inf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Exact C(n, k) while it fits in uint64, otherwise nullopt-ish sentinel 0
// is avoided: throws capacity_error instead.
inline std::uint64_t binom_exact(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        unsigned __int128 t = static_cast<unsigned __int128>(r) * (n - k + i);
        t /= i;
        if (t > std::numeric_limits<std::uint64_t>::max())
            throw capacity_error("binomial coefficient exceeds 64-bit range");
        r = static_cast<std::uint64_t>(t);
    }
    return r;
}

inline bool binom_fits_u64(std::uint64_t n, std::uint64_t k) {
    return log_binom(double(n), double(k)) < 63.9 * 0.6931471805599453;
}

// C(a, k) / C(n, k) evaluated as prod (a-i)/(n-i): stable for any n, k <= a <= n.
inline double kset_ratio(std::uint64_t a, std::uint64_t n, unsigned k) {
    if (a < k) return 0.0;
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) r *= double(a - i) / double(n - i);
    return r;
}

// log(e^a + e^b) with max shift.
inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Deterministic log-sum-exp over a list, accumulated in the given order.
inline double log_sum_exp(const std::vector<double>& v) {
    double m = neg_inf;
    for (double x : v)
        if (x > m) m = x;
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Streaming log-sum-exp accumulator with a fixed visit order.
class LogSumExp {
  public:
    void add(double log_term) {
        if (log_term == neg_inf) return;
        terms_.push_back(log_term);
        if (log_term > max_) max_ = log_term;
    }
    void add_weighted(double log_weight, double count) {
        if (count <= 0) return;
        add(log_weight + std::log(count));
    }
    bool empty() const { return terms_.empty(); }
    double value() const {
        if (terms_.empty()) return neg_inf;
        double s = 0.0;
        for (double t : terms_) s += std::exp(t - max_);
        return max_ + std::log(s);
    }

  private:
    std::vector<double> terms_;
    double max_ = neg_inf;
};

} // namespace hyco

#endif
