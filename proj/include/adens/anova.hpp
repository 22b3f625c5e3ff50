#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adens/core.hpp"

namespace adens {

namespace anova_detail {

inline double log_gamma(double x) { return std::lgamma(x); }

/// Continued-fraction evaluation of the regularized incomplete beta function
/// (modified Lentz). Relative error well below 1e-10 over the F-test range.
inline double incomplete_beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double result = d;
    for (int m = 1; m <= 500; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        result *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        result *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return result;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                      b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * incomplete_beta_cf(a, b, x) / a;
    return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

/// Survival function of the F distribution with (d1, d2) degrees of freedom.
inline double f_survival(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    double x = d2 / (d2 + d1 * f);
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

}  // namespace anova_detail

struct AnovaResult {
    double f_value = 0.0;
    double p_value = 1.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
};

/// Classical one-way ANOVA. Zero within-group variance with nonzero
/// between-group variance reports f_value = +infinity and p_value = 0.
inline AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DegenerateGroups("anova: need at least 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw DegenerateGroups("anova: every group needs at least 2 values");
        total_n += g.size();
        for (double v : g) grand_sum += v;
    }
    double grand_mean = grand_sum / static_cast<double>(total_n);

    // all-equal data short-circuits to F=0 before rounding noise in the
    // between-group sum can trip the zero-within-variance sentinel
    double lo = groups[0][0], hi = groups[0][0];
    for (const auto& g : groups)
        for (double v : g) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (lo == hi) {
        AnovaResult r;
        r.df_between = groups.size() - 1;
        r.df_within = total_n - groups.size();
        return r;
    }

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        double d = mean - grand_mean;
        ss_between += static_cast<double>(g.size()) * d * d;
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }

    AnovaResult r;
    r.df_between = groups.size() - 1;
    r.df_within = total_n - groups.size();
    double ms_between = ss_between / static_cast<double>(r.df_between);
    double ms_within = ss_within / static_cast<double>(r.df_within);
    if (ms_within <= 0.0) {
        if (ss_between <= 0.0) {
            r.f_value = 0.0;
            r.p_value = 1.0;
        } else {
            r.f_value = std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
        return r;
    }
    r.f_value = ms_between / ms_within;
    r.p_value = anova_detail::f_survival(r.f_value, static_cast<double>(r.df_between),
                                         static_cast<double>(r.df_within));
    return r;
}

}  // namespace adens
