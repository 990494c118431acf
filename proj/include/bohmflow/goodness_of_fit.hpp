#ifndef BOHMFLOW_GOODNESS_OF_FIT_HPP
#define BOHMFLOW_GOODNESS_OF_FIT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bohmflow/errors.hpp"

namespace bohmflow {

/// Regularized upper incomplete gamma Q(a, x); series for x < a+1, continued
/// fraction otherwise.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series, Q = 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

/// chi^2 upper tail probability for `stat` with `dof` degrees of freedom.
inline double chi_square_pvalue(double stat, int dof) {
    if (dof < 1) throw DomainError("chi_square_pvalue: dof must be >= 1");
    return gamma_q(0.5 * dof, 0.5 * stat);
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
    if (values.empty()) throw ConfigurationError("ks_statistic: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, std::max((i + 1.0) / n - f, f - static_cast<double>(i) / n));
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ConfigurationError("ks two-sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / a.size() -
                                 static_cast<double>(ib) / b.size()));
    }
    return d;
}

/// Asymptotic critical value: D_crit = c(alpha)/sqrt(n), c = sqrt(-ln(alpha/2)/2).
inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

inline double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((nn + mm) / (nn * mm));
}

/// Kolmogorov asymptotic p-value with the Stephens small-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = d * (sn + 0.12 + 0.11 / sn);
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double pvalue = 1.0;
};

/// Pearson chi^2 of observed counts against expected cell probabilities.
inline ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts,
                                      const std::vector<double>& probabilities,
                                      std::size_t n_total) {
    if (counts.size() != probabilities.size() || counts.size() < 2)
        throw ConfigurationError("chi_square_gof: need >= 2 matching cells");
    ChiSquareResult r;
    r.dof = static_cast<int>(counts.size()) - 1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probabilities[i] * static_cast<double>(n_total);
        if (expected <= 0.0)
            throw ConfigurationError("chi_square_gof: non-positive expected count in a cell");
        const double diff = static_cast<double>(counts[i]) - expected;
        r.statistic += diff * diff / expected;
    }
    r.pvalue = chi_square_pvalue(r.statistic, r.dof);
    return r;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_GOODNESS_OF_FIT_HPP
