#ifndef HYCO_PHASE_HPP
#define HYCO_PHASE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyco/numeric.hpp"

namespace hyco {

// c = d/k - 2^{k-1} ln2 + ln2. One shared evaluation so the condensation gap
// and sigma agree to the last bit in the identity check.
inline double crit_offset(double d, unsigned k) {
    return d / double(k) - std::ldexp(std::log(2.0), int(k) - 1) + std::log(2.0);
}

inline void check_phase_params(double d, unsigned k, double beta) {
    if (k < 3) throw parameter_error("k must be >= 3");
    if (!(d > 0)) throw parameter_error("d must be positive");
    if (!(beta >= 0)) throw parameter_error("beta must be nonnegative");
}

// ln 2 + (d/k) ln(1 - 2^{1-k}(1 - e^{-beta})). The correction is handed to
// log1p directly: forming 1 + x first drops the 2^{1-k} e^{-beta} part below
// one ulp once k is large, which is exactly the term the condensation gap
// identity depends on.
inline double phi_upper(double d, unsigned k, double beta) {
    check_phase_params(d, k, beta);
    const double x = std::ldexp(std::expm1(-beta), 1 - int(k));
    if (x <= -1.0) throw parameter_error("phi_upper: log argument not positive");
    return std::log(2.0) + d / double(k) * std::log1p(x);
}

inline double sigma(double d, unsigned k, double beta) {
    check_phase_params(d, k, beta);
    const double ln2 = std::log(2.0);
    return (beta + 1.0) * std::exp(-beta + double(k) * ln2) * ln2 -
           2.0 * crit_offset(d, k);
}

struct BetaCritRoot {
    double beta_c;
    double bracket_width;
};

// Unique zero of sigma (strictly decreasing in beta) by bisection; none when
// c <= 0 and sigma stays positive.
inline std::optional<BetaCritRoot> beta_crit_root(double d, unsigned k,
                                                  double tol = 1e-12) {
    if (!(tol > 0)) throw parameter_error("tol must be positive");
    if (crit_offset(d, k) <= 0) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    while (sigma(d, k, hi) > 0) {
        hi *= 2.0;
        if (hi > 1e9) return std::nullopt;
    }
    double mid = hi;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double s = sigma(d, k, mid);
        if (std::abs(s) <= tol) break;
        (s > 0 ? lo : hi) = mid;
    }
    return BetaCritRoot{mid, hi - lo};
}

// Leading terms of the large-k expansion of the critical inverse temperature.
inline double beta_crit_expansion(double d, unsigned k) {
    const double c = crit_offset(d, k);
    if (c <= 0) throw parameter_error("expansion requires c > 0");
    const double ln2 = std::log(2.0);
    return double(k - 1) * ln2 + std::log(double(k)) + 2.0 * std::log(ln2) -
           std::log(c);
}

inline double entropy_h(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw parameter_error("entropy argument outside [0,1]");
    if (z == 0.0 || z == 1.0) return 0.0;
    return -z * std::log(z) - (1.0 - z) * std::log(1.0 - z);
}

inline double chernoff_phi(double x) {
    if (!(x > -1.0)) throw parameter_error("chernoff argument must exceed -1");
    return (1.0 + x) * std::log1p(x) - x;
}

struct LambdaEval {
    double value;
    double d1;
    double d2;
    double s;
};

// The annealed pair free entropy Lambda_beta(alpha) with its first two
// derivatives and the inner factor s(alpha, beta).
inline LambdaEval lambda_eval(double d, unsigned k, double beta, double alpha) {
    check_phase_params(d, k, beta);
    if (!(alpha >= -1.0 && alpha <= 1.0))
        throw parameter_error("alpha outside [-1,1]");
    const double b = -std::expm1(-beta); // 1 - e^{-beta}
    const double pk = std::pow(1.0 + alpha, double(k));
    const double mk = std::pow(1.0 - alpha, double(k));
    const double s = 1.0 - std::ldexp(b, 1 - int(k)) *
                               (2.0 - b * std::ldexp(pk + mk, -int(k)));
    if (s <= 0) throw parameter_error("lambda_eval: s not positive");
    const double value = entropy_h((1.0 + alpha) / 2.0) +
                         d / double(k) * std::log(s);

    const bool interior = alpha > -1.0 && alpha < 1.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double d1 = nan, d2 = nan;
    if (interior) {
        const double pk1 = std::pow(1.0 + alpha, double(k) - 1.0);
        const double mk1 = std::pow(1.0 - alpha, double(k) - 1.0);
        const double pk2 = std::pow(1.0 + alpha, double(k) - 2.0);
        const double mk2 = std::pow(1.0 - alpha, double(k) - 2.0);
        const double fourk = std::ldexp(1.0, 2 * int(k)); // 4^k
        const double b2 = b * b;                          // (e^{-beta} - 1)^2
        d1 = 0.5 * (std::log1p(-alpha) - std::log1p(alpha)) +
             2.0 * d / (fourk * s) * b2 * (pk1 - mk1);
        d2 = 1.0 / (alpha * alpha - 1.0) +
             2.0 * d * double(k - 1) * b2 / (fourk * s) * (pk2 + mk2) -
             d * double(k) * b2 * b2 /
                 (std::ldexp(1.0, 4 * int(k) - 2) * s * s) *
                 (pk1 - mk1) * (pk1 - mk1);
    }
    return {value, d1, d2, s};
}

struct SecondMomentVerdict {
    enum class Kind { global_max_at_zero, violated_at, inconclusive } kind;
    double alpha_witness = 0.0; // set for violated_at / inconclusive
};

// Numerical scan of Lambda over a symmetric alpha grid (plus the
// boundary-adjacent special points), with each interior local maximum
// refined by bisection on Lambda'. Not a proof: three-way verdict.
inline SecondMomentVerdict second_moment_verdict(double d, unsigned k, double beta,
                                                 std::size_t grid_resolution = 2001) {
    if (grid_resolution < 1000)
        throw parameter_error("grid_resolution must be >= 1000");
    const double lam0 = lambda_eval(d, k, beta, 0.0).value;
    const double slack = 10.0 * std::numeric_limits<double>::epsilon() *
                         std::abs(lam0);

    std::vector<double> grid;
    grid.reserve(grid_resolution + 16);
    for (std::size_t i = 0; i < grid_resolution; ++i)
        grid.push_back(-1.0 + 2.0 * double(i) / double(grid_resolution - 1));
    const double special[] = {1.0 - std::pow(2.0, -0.75 * double(k)),
                              1.0 - 1.99 * std::log(double(k)) / double(k),
                              1.0 - 2.01 * std::log(double(k)) / double(k)};
    for (double a : special) {
        if (a > -1.0 && a < 1.0) {
            grid.push_back(a);
            grid.push_back(-a);
        }
    }
    std::sort(grid.begin(), grid.end());

    auto value_at = [&](double a) { return lambda_eval(d, k, beta, a).value; };
    auto deriv_at = [&](double a) { return lambda_eval(d, k, beta, a).d1; };

    double best = lam0, best_alpha = 0.0;
    auto consider = [&](double a, double v) {
        if (std::abs(a) < 1e-15) return;
        if (v > best) { best = v; best_alpha = a; }
    };
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = value_at(grid[i]);
    consider(grid.front(), vals.front());
    consider(grid.back(), vals.back());
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (vals[i] < vals[i - 1] || vals[i] < vals[i + 1]) continue;
        // interior local max: refine by bisection on the derivative
        double lo = grid[i - 1], hi = grid[i + 1];
        if (lo <= -1.0) lo = std::nextafter(-1.0, 0.0);
        if (hi >= 1.0) hi = std::nextafter(1.0, 0.0);
        double dlo = deriv_at(lo), dhi = deriv_at(hi);
        double a = grid[i];
        if (dlo > 0 && dhi < 0) {
            for (int it = 0; it < 80; ++it) {
                a = 0.5 * (lo + hi);
                const double da = deriv_at(a);
                if (da > 0) lo = a; else hi = a;
            }
        }
        consider(a, value_at(a));
    }

    if (best > lam0 + slack)
        return {SecondMomentVerdict::Kind::violated_at, best_alpha};
    if (best > lam0 - slack && best_alpha != 0.0)
        return {SecondMomentVerdict::Kind::inconclusive, best_alpha};
    return {SecondMomentVerdict::Kind::global_max_at_zero, 0.0};
}

// Typical fraction of monochromatic edges under the Boltzmann measure.
inline double m0_fraction(unsigned k, double beta) {
    const double num = std::ldexp(std::exp(-beta), 1 - int(k));
    const double den = 1.0 + std::ldexp(std::expm1(-beta), 1 - int(k));
    return num / den;
}

// Large-deviation rate for the monochromatic fraction x of a single coloring.
inline double f_rate(double x, unsigned k, double beta) {
    if (!(x >= 0.0 && x <= 1.0)) throw parameter_error("f_rate argument outside [0,1]");
    const double q = std::ldexp(1.0, 1 - int(k)); // 2^{1-k}
    double ent = 0.0;
    if (x > 0.0 && x < 1.0) ent = -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
    return -x * beta + ent + x * std::log(q) + (1.0 - x) * std::log1p(-q);
}

struct CondensationGap {
    double gap;             // cluster-point free entropy minus phi_upper
    double minus_sigma_2k;  // -sigma(d,k,beta) / 2^k, for side-by-side comparison
    bool extrapolated;      // beta below the formula's validity floor
};

inline CondensationGap condensation_gap(double d, unsigned k, double beta) {
    check_phase_params(d, k, beta);
    const double ln2 = std::log(2.0);
    const double cluster = std::ldexp(ln2, -int(k)) - beta * ln2 * std::exp(-beta);
    const double gap = cluster - phi_upper(d, k, beta);
    const bool extrapolated = beta < double(k) * ln2 - std::log(double(k));
    return {gap, -std::ldexp(sigma(d, k, beta), -int(k)), extrapolated};
}

struct Regime {
    enum class Kind { below_line, transition_line, indeterminate_band } kind;
    std::optional<double> beta_c; // set for transition_line
};

// Dichotomy at d/k = 2^{k-1} ln2 - ln2 with a configurable indeterminate
// band standing in for the unquantified epsilon around the line.
inline Regime classify_regime(double d, unsigned k, double band_width = -1.0) {
    if (k < 3) throw parameter_error("k must be >= 3");
    if (band_width < 0)
        band_width = std::pow(double(k), 4.0) * std::ldexp(1.0, -int(k));
    const double line = std::ldexp(std::log(2.0), int(k) - 1) - std::log(2.0);
    const double x = d / double(k);
    if (std::abs(x - line) <= band_width && band_width > 0)
        return {Regime::Kind::indeterminate_band, std::nullopt};
    if (x < line) return {Regime::Kind::below_line, std::nullopt};
    const auto root = beta_crit_root(d, k);
    return {Regime::Kind::transition_line,
            root ? std::optional<double>(root->beta_c) : std::nullopt};
}

struct PhasePoint {
    double d;
    unsigned k;
    double beta;
    double sigma_value;
    double phi_upper_value;
    double gap;
    Regime regime;
};

inline PhasePoint phase_point(double d, unsigned k, double beta,
                              double band_width = -1.0) {
    return {d,
            k,
            beta,
            sigma(d, k, beta),
            phi_upper(d, k, beta),
            condensation_gap(d, k, beta).gap,
            classify_regime(d, k, band_width)};
}

} // namespace hyco

#endif
