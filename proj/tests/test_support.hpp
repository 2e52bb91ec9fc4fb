// test_support.hpp
//
// Independent oracles used by the test suites. Everything here is written
// against the math directly (brute force enumerations, closed forms) and
// must not call into the implementation paths it is checking.

#ifndef SSLAB_TEST_SUPPORT_HPP
#define SSLAB_TEST_SUPPORT_HPP

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <vector>

#include "sslab/geometry.hpp"

namespace sslab::test_support {

// e_r of a list of numbers by subset enumeration.
inline double elementary_symmetric_bruteforce(const std::vector<double>& kappa, int r) {
    const int n = static_cast<int>(kappa.size());
    if (r == 0) return 1.0;
    double sum = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != r) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= kappa[i];
        sum += prod;
    }
    return sum;
}

// Generalized Kronecker symbol as the determinant of the 0/1 match matrix;
// independent of the signed-permutation-sum route in the implementation.
inline double kronecker_det(const std::vector<int>& lower, const std::vector<int>& upper) {
    const int s = static_cast<int>(lower.size());
    Eigen::MatrixXd m(s, s);
    for (int p = 0; p < s; ++p)
        for (int q = 0; q < s; ++q) m(p, q) = (lower[p] == upper[q]) ? 1.0 : 0.0;
    return std::round(m.determinant());
}

// Graph hypersurface (u1,..,un, q(u)) in R^{n+1} with quadratic height q;
// non-umbilic away from special points, analytic derivatives.
inline Chart quadratic_graph_chart(const Eigen::MatrixXd& hess_q) {
    const int n = static_cast<int>(hess_q.rows());
    Chart c;
    c.param_dim = n;
    c.ambient_dim = n + 1;
    c.position = [n, hess_q](const Vector& u) {
        Vector x(n + 1);
        x.head(n) = u;
        x[n] = 0.5 * u.dot(hess_q * u);
        return x;
    };
    c.tangent = [n, hess_q](const Vector& u) {
        Matrix t = Matrix::Zero(n + 1, n);
        t.topRows(n) = Matrix::Identity(n, n);
        t.row(n) = (hess_q * u).transpose();
        return t;
    };
    c.hessian = [n, hess_q](const Vector&) {
        std::vector<Matrix> h(n + 1, Matrix::Zero(n, n));
        h[n] = hess_q;
        return h;
    };
    return c;
}

// Codimension-2 graph (u, q1(u), q2(u)) in R^{n+2}, quadratic heights.
inline Chart quadratic_graph_chart_codim2(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2) {
    const int n = static_cast<int>(h1.rows());
    Chart c;
    c.param_dim = n;
    c.ambient_dim = n + 2;
    c.position = [n, h1, h2](const Vector& u) {
        Vector x(n + 2);
        x.head(n) = u;
        x[n] = 0.5 * u.dot(h1 * u);
        x[n + 1] = 0.5 * u.dot(h2 * u);
        return x;
    };
    c.tangent = [n, h1, h2](const Vector& u) {
        Matrix t = Matrix::Zero(n + 2, n);
        t.topRows(n) = Matrix::Identity(n, n);
        t.row(n) = (h1 * u).transpose();
        t.row(n + 1) = (h2 * u).transpose();
        return t;
    };
    c.hessian = [n, h1, h2](const Vector&) {
        std::vector<Matrix> h(n + 2, Matrix::Zero(n, n));
        h[n] = h1;
        h[n + 1] = h2;
        return h;
    };
    return c;
}

// Parameter point of the geodesic polar chart that lands on a given ambient
// point of S^n(radius); inverse of the chart, usable away from the far pole.
inline Vector geodesic_chart_preimage(const Vector& x, double radius) {
    const int n = static_cast<int>(x.size()) - 1;
    const double rho = std::acos(std::clamp(x[n] / radius, -1.0, 1.0));
    Vector head = x.head(n);
    const double hn = head.norm();
    if (hn < 1e-300) return Vector::Zero(n);
    return (rho / hn) * head;
}

} // namespace sslab::test_support

#endif
