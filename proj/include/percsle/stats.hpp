#pragma once

// Estimators and hypothesis tests for the Monte Carlo experiments.

#include "percsle/errors.hpp"
#include "percsle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace percsle {

struct EstimateRecord {
    double pointEstimate = 0;
    double stdError = 0;
    std::size_t nSamples = 0;
    double ciLow = 0;
    double ciHigh = 0;
    std::string method;
};

inline EstimateRecord bernoulli_estimate(std::size_t successes, std::size_t n, std::string method)
{
    if (n == 0)
        throw EmptySamples("estimate needs at least one sample");
    const double p = double(successes) / double(n);
    const double se = std::sqrt(p * (1 - p) / double(n));
    return {p, se, n, p - 1.96 * se, p + 1.96 * se, std::move(method)};
}

inline EstimateRecord mean_estimate(const std::vector<double>& x, std::string method)
{
    if (x.empty())
        throw EmptySamples("estimate needs at least one sample");
    const double n = double(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0;
    for (double v : x)
        ss += (v - mean) * (v - mean);
    const double se = x.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    return {mean, se, x.size(), mean - 1.96 * se, mean + 1.96 * se, std::move(method)};
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda)
{
    if (lambda < 0.2)
        return 1.0;
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1 : -1) * term;
        if (term < 1e-17)
            break;
    }
    return std::clamp(2 * sum, 0.0, 1.0);
}

/// Asymptotic critical value c(alpha) with Q(c) = alpha; c(0.01) = 1.6276.
inline double kolmogorov_critical(double alpha)
{
    double lo = 0.2, hi = 5;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_q(mid) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct KSResult {
    double statistic = 0;
    double nEff = 0;
    double pValueBound = 1;
    double alpha = 0.01;
    double critical = 0;
    double slack = 0;
    bool accept = true;
    bool lowPower = false;
};

namespace detail {

inline KSResult ks_decide(double D, double nEff, double alpha, double slack)
{
    KSResult r;
    r.statistic = D;
    r.nEff = nEff;
    r.alpha = alpha;
    r.slack = slack;
    r.critical = kolmogorov_critical(alpha) / std::sqrt(nEff);
    r.pValueBound = kolmogorov_q(std::sqrt(nEff) * D);
    r.accept = D <= r.critical + slack;
    r.lowPower = nEff < 35;
    return r;
}

} // namespace detail

/// One-sample KS statistic against a continuous CDF.
inline KSResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf, double alpha = 0.01,
                              double slack = 0)
{
    if (x.empty())
        throw EmptySamples("KS test needs samples");
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double D = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        D = std::max({D, double(i + 1) / n - F, F - double(i) / n});
    }
    return detail::ks_decide(std::clamp(D, 0.0, 1.0), n, alpha, slack);
}

inline KSResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01, double slack = 0)
{
    if (a.empty() || b.empty())
        throw EmptySamples("two-sample KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double D = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v)
            ++i;
        while (j < b.size() && b[j] == v)
            ++j;
        D = std::max(D, std::abs(double(i) / na - double(j) / nb));
    }
    return detail::ks_decide(D, na * nb / (na + nb), alpha, slack);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

struct PermutationResult {
    double statistic = 0;
    double pValue = 1;
    std::size_t permutations = 0;
    bool reject = false;
};

/// Permutation test of independence for pairs (x_i, y_i) with the absolute
/// Pearson correlation as statistic. For a lag-1 test pass (X_j, X_{j+1}).
inline PermutationResult permutation_correlation_test(const std::vector<double>& x, std::vector<double> y,
                                                      std::uint64_t seed, std::size_t permutations = 999,
                                                      double alpha = 0.01)
{
    if (x.size() != y.size() || x.size() < 3)
        throw EmptySamples("permutation test needs at least three pairs");
    PermutationResult r;
    r.statistic = pearson(x, y);
    r.permutations = permutations;
    const CounterStream rng(seed, 0x9E7);
    std::uint64_t draw = 0;
    std::size_t extreme = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        for (std::size_t i = y.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform(draw++) * double(i + 1));
            std::swap(y[i], y[std::min(j, i)]);
        }
        if (std::abs(pearson(x, y)) >= std::abs(r.statistic))
            ++extreme;
    }
    r.pValue = double(extreme + 1) / double(permutations + 1);
    r.reject = r.pValue < alpha;
    return r;
}

struct RankTestResult {
    double u = 0;
    double z = 0;
    double pValue = 1;
};

/// Mann-Whitney U test, normal approximation with tie correction.
inline RankTestResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.empty() || b.empty())
        throw EmptySamples("rank test needs two nonempty samples");
    std::vector<std::pair<double, int>> all;
    for (double v : a)
        all.push_back({v, 0});
    for (double v : b)
        all.push_back({v, 1});
    std::sort(all.begin(), all.end());
    const double n1 = double(a.size()), n2 = double(b.size()), n = n1 + n2;
    double rankSum = 0, tieTerm = 0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first)
            ++j;
        const double rank = 0.5 * double(i + 1 + j);
        const double t = double(j - i);
        tieTerm += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0)
                rankSum += rank;
        i = j;
    }
    RankTestResult r;
    r.u = rankSum - n1 * (n1 + 1) / 2;
    const double var = n1 * n2 / 12 * ((n + 1) - tieTerm / (n * (n - 1)));
    r.z = var > 0 ? (r.u - n1 * n2 / 2) / std::sqrt(var) : 0.0;
    r.pValue = 2 * normal_cdf(-std::abs(r.z));
    return r;
}

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double slopeSE = 0;
};

/// Weighted least squares y = a + b x with weights 1 / sigma^2; the slope error
/// assumes the sigmas are the true standard deviations.
inline LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& sigma)
{
    if (x.size() < 2 || x.size() != y.size() || x.size() != sigma.size())
        throw EmptySamples("line fit needs at least two points");
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1 / (sigma[i] * sigma[i]);
        S += w;
        Sx += w * x[i];
        Sy += w * y[i];
        Sxx += w * x[i] * x[i];
        Sxy += w * x[i] * y[i];
    }
    const double det = S * Sxx - Sx * Sx;
    LineFit f;
    f.slope = (S * Sxy - Sx * Sy) / det;
    f.intercept = (Sxx * Sy - Sx * Sxy) / det;
    f.slopeSE = std::sqrt(S / det);
    return f;
}

/// Empirical CDF of a sample, evaluated at the given points.
inline std::vector<double> empirical_cdf(std::vector<double> x, const std::vector<double>& at)
{
    std::sort(x.begin(), x.end());
    std::vector<double> out;
    for (double s : at)
        out.push_back(double(std::upper_bound(x.begin(), x.end(), s) - x.begin()) / double(x.size()));
    return out;
}

} // namespace percsle
