// quadrature.cpp - Golub-Welsch and discretized Lanczos for truncated Laguerre weights

#include "cohatlas/quadrature.hpp"

#include "cohatlas/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cohatlas {

namespace {

GaussRule from_jacobi(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double mass) {
    const auto n = alpha.size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        jac(i, i) = alpha(i);
        if (i + 1 < n) {
            jac(i, i + 1) = std::sqrt(beta(i + 1));
            jac(i + 1, i) = jac(i, i + 1);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigen-decomposition failed");
    // Weights from the Christoffel function 1 / sum_k p_k(x)^2 with orthonormal p_k,
    // which keeps small weights accurate to relative precision.
    GaussRule rule;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = eig.eigenvalues()(i);
        double prev = 0.0, cur = 1.0 / std::sqrt(mass), sum = cur * cur;
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            const double next = ((x - alpha(k)) * cur - (k > 0 ? std::sqrt(beta(k)) : 0.0) * prev) / std::sqrt(beta(k + 1));
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        rule.nodes.push_back(x);
        rule.weights.push_back(1.0 / sum);
    }
    return rule;
}

} // namespace

GaussRule gauss_legendre(int order) {
    if (order < 1) throw ValidationError("gauss_legendre: order must be >= 1");
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(order);
    for (int k = 1; k < order; ++k) beta(k) = 1.0 * k * k / (4.0 * k * k - 1.0);
    return from_jacobi(alpha, beta, 2.0);
}

GaussRule truncated_laguerre(int order, double upper) {
    if (order < 1) throw ValidationError("truncated_laguerre: order must be >= 1");
    if (!(upper > 0.0) || !std::isfinite(upper)) throw ValidationError("truncated_laguerre: upper limit must be positive");

    // Discretize the weight on unit-width Gauss-Legendre panels, then run Lanczos with
    // full reorthogonalization on diag(nodes) to obtain the recurrence coefficients.
    constexpr int kPanelOrder = 48;
    const GaussRule base = gauss_legendre(kPanelOrder);
    const int panels = std::max(static_cast<int>(std::ceil(upper)), (order + kPanelOrder - 1) / kPanelOrder + 1);
    const double width = upper / panels;
    std::vector<double> x, sqrt_w;
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < kPanelOrder; ++i) {
            const double u = width * (p + 0.5 * (base.nodes[static_cast<std::size_t>(i)] + 1.0));
            x.push_back(u);
            sqrt_w.push_back(std::sqrt(0.5 * width * base.weights[static_cast<std::size_t>(i)] * std::exp(-u)));
        }
    }
    const auto m = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Eigen::VectorXd> xs(x.data(), m);
    Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(sqrt_w.data(), m);
    const double mass = q.squaredNorm();
    q /= std::sqrt(mass);

    Eigen::MatrixXd basis(m, order);
    Eigen::VectorXd alpha(order), beta = Eigen::VectorXd::Zero(order);
    basis.col(0) = q;
    for (int k = 0; k < order; ++k) {
        Eigen::VectorXd r = xs.cwiseProduct(basis.col(k));
        alpha(k) = basis.col(k).dot(r);
        if (k + 1 == order) break;
        for (int pass = 0; pass < 2; ++pass) {
            r -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * r);
        }
        const double b = r.norm();
        if (!(b > 0.0)) throw NumericalError("truncated_laguerre: Lanczos breakdown");
        beta(k + 1) = b * b;
        basis.col(k + 1) = r / b;
    }
    GaussRule rule = from_jacobi(alpha, beta, mass);
    for (double u : rule.nodes) {
        if (!(u > 0.0 && u < upper)) throw NumericalError("truncated_laguerre: node outside (0, upper)");
    }
    for (double w : rule.weights) {
        if (!(w > 0.0)) throw NumericalError("truncated_laguerre: nonpositive weight");
    }
    return rule;
}

} // namespace cohatlas
