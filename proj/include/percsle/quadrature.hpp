#pragma once

// Gauss-Jacobi rules by the Golub-Welsch eigenvalue method.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace percsle {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta, alpha, beta > -1.
inline QuadratureRule gauss_jacobi_rule(int n, double alpha, double beta)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            J(0, 0) = (beta - alpha) / (ab + 2);
        else
            J(k, k) = (beta * beta - alpha * alpha) / ((2 * k + ab) * (2 * k + ab + 2));
        if (k + 1 < n) {
            const double m = k + 1;
            double b2;
            if (m == 1)
                b2 = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
            else
                b2 = 4 * m * (m + alpha) * (m + beta) * (m + ab) /
                     ((2 * m + ab) * (2 * m + ab) * (2 * m + ab + 1) * (2 * m + ab - 1));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(b2);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(alpha + 1) + std::lgamma(beta + 1) -
                                std::lgamma(ab + 2));
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

/// Cached rules; safe to call from several threads.
inline const QuadratureRule& cached_gauss_jacobi(int n, double alpha, double beta)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{n, alpha, beta}];
    if (!slot)
        slot = std::make_unique<QuadratureRule>(gauss_jacobi_rule(n, alpha, beta));
    return *slot;
}

/// Integral over [a, b] of (b - x)^alpha (x - a)^beta g(x).
template <class F>
double gauss_jacobi_integrate(F&& g, double a, double b, double alpha, double beta, int n = 20)
{
    const QuadratureRule& rule = cached_gauss_jacobi(n, alpha, beta);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * g(mid + half * rule.nodes[i]);
    return std::pow(half, alpha + beta + 1) * sum;
}

} // namespace percsle
