// geometry.cpp

#include "sslab/geometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace sslab {

std::string to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Sphere: return "sphere";
        case GeometryKind::Circle: return "circle";
        case GeometryKind::CylinderSegment: return "cylinder-segment";
        case GeometryKind::SphericalCap: return "spherical-cap";
        case GeometryKind::FlatDomain: return "flat-domain";
        case GeometryKind::Custom: return "custom";
    }
    return "custom";
}

std::string to_string(WeightMode mode) {
    switch (mode) {
        case WeightMode::Gaussian: return "gaussian";
        case WeightMode::None: return "none";
        case WeightMode::Custom: return "custom";
    }
    return "none";
}

// --- charts --------------------------------------------------------------

Chart circle_chart(double radius) {
    Chart c;
    c.param_dim = 1;
    c.ambient_dim = 2;
    c.position = [radius](const Vector& u) {
        Vector x(2);
        x << radius * std::cos(u[0]), radius * std::sin(u[0]);
        return x;
    };
    c.tangent = [radius](const Vector& u) {
        Matrix t(2, 1);
        t << -radius * std::sin(u[0]), radius * std::cos(u[0]);
        return t;
    };
    c.hessian = [radius](const Vector& u) {
        std::vector<Matrix> h(2, Matrix(1, 1));
        h[0](0, 0) = -radius * std::cos(u[0]);
        h[1](0, 0) = -radius * std::sin(u[0]);
        return h;
    };
    return c;
}

Chart interval_chart() {
    Chart c;
    c.param_dim = 1;
    c.ambient_dim = 2;
    c.position = [](const Vector& u) {
        Vector x(2);
        x << u[0], 0.0;
        return x;
    };
    c.tangent = [](const Vector&) {
        Matrix t(2, 1);
        t << 1.0, 0.0;
        return t;
    };
    c.hessian = [](const Vector&) { return std::vector<Matrix>(2, Matrix::Zero(1, 1)); };
    return c;
}

Chart flat_disk_chart() {
    Chart c;
    c.param_dim = 2;
    c.ambient_dim = 3;
    c.position = [](const Vector& u) {
        Vector x(3);
        x << u[0], u[1], 0.0;
        return x;
    };
    c.tangent = [](const Vector&) {
        Matrix t = Matrix::Zero(3, 2);
        t(0, 0) = 1.0;
        t(1, 1) = 1.0;
        return t;
    };
    c.hessian = [](const Vector&) { return std::vector<Matrix>(3, Matrix::Zero(2, 2)); };
    return c;
}

Chart cylinder_chart(double radius) {
    Chart c;
    c.param_dim = 2;
    c.ambient_dim = 3;
    c.position = [radius](const Vector& u) {
        Vector x(3);
        x << radius * std::cos(u[0]), radius * std::sin(u[0]), u[1];
        return x;
    };
    c.tangent = [radius](const Vector& u) {
        Matrix t = Matrix::Zero(3, 2);
        t(0, 0) = -radius * std::sin(u[0]);
        t(1, 0) = radius * std::cos(u[0]);
        t(2, 1) = 1.0;
        return t;
    };
    c.hessian = [radius](const Vector& u) {
        std::vector<Matrix> h(3, Matrix::Zero(2, 2));
        h[0](0, 0) = -radius * std::cos(u[0]);
        h[1](0, 0) = -radius * std::sin(u[0]);
        return h;
    };
    return c;
}

namespace {

// Radial profile of the geodesic polar chart:
//   a = sin(rho)/rho,  b = (cos(rho) - a)/rho^2,  c2 = b'(rho)/rho.
// All three are smooth through rho = 0; the series branch avoids the
// catastrophic cancellation of the closed forms for small rho.
struct RadialProfile {
    double a, b, c2;
};

RadialProfile radial_profile(double rho) {
    RadialProfile p{};
    if (rho < 0.7) {
        const double r2 = rho * rho;
        double fact = 1.0; // (2m+1)!
        double pow_a = 1.0, pow_b = 1.0, pow_c = 1.0;
        p.a = 0.0;
        p.b = 0.0;
        p.c2 = 0.0;
        double sign = 1.0;
        for (int m = 0; m <= 12; ++m) {
            if (m > 0) fact *= (2.0 * m) * (2.0 * m + 1.0);
            p.a += sign * pow_a / fact;
            if (m >= 1) {
                p.b += sign * (2.0 * m) * pow_b / fact;
                pow_b *= r2;
            }
            if (m >= 2) {
                p.c2 += sign * (2.0 * m) * (2.0 * m - 2.0) * pow_c / fact;
                pow_c *= r2;
            }
            pow_a *= r2;
            sign = -sign;
        }
    } else {
        const double s = std::sin(rho), c = std::cos(rho);
        p.a = s / rho;
        p.b = (c - p.a) / (rho * rho);
        const double bp = -s / (rho * rho) - 3.0 * c / (rho * rho * rho) +
                          3.0 * s / (rho * rho * rho * rho);
        p.c2 = bp / rho;
    }
    return p;
}

} // namespace

Chart geodesic_sphere_chart(int n, double radius) {
    Chart c;
    c.param_dim = n;
    c.ambient_dim = n + 1;
    const double R = radius;
    c.position = [n, R](const Vector& u) {
        const double rho = u.norm();
        const RadialProfile p = radial_profile(rho);
        Vector x(n + 1);
        for (int i = 0; i < n; ++i) x[i] = R * u[i] * p.a;
        x[n] = R * std::cos(rho);
        return x;
    };
    c.tangent = [n, R](const Vector& u) {
        const double rho = u.norm();
        const RadialProfile p = radial_profile(rho);
        Matrix t(n + 1, n);
        for (int i = 0; i < n; ++i) {
            for (int cc = 0; cc < n; ++cc)
                t(cc, i) = R * ((cc == i ? p.a : 0.0) + p.b * u[cc] * u[i]);
            t(n, i) = -R * p.a * u[i];
        }
        return t;
    };
    c.hessian = [n, R](const Vector& u) {
        const double rho = u.norm();
        const RadialProfile p = radial_profile(rho);
        std::vector<Matrix> h(n + 1, Matrix(n, n));
        for (int cc = 0; cc < n; ++cc)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    h[cc](i, j) = R * (p.b * ((cc == i ? u[j] : 0.0) + (cc == j ? u[i] : 0.0) +
                                              (i == j ? u[cc] : 0.0)) +
                                       p.c2 * u[cc] * u[i] * u[j]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                h[n](i, j) = -R * ((i == j ? p.a : 0.0) + p.b * u[i] * u[j]);
        return h;
    };
    return c;
}

Chart normalized_affine_chart(double radius, const Eigen::Vector3d& v0,
                              const Eigen::Vector3d& v1, const Eigen::Vector3d& v2) {
    Chart c;
    c.param_dim = 2;
    c.ambient_dim = 3;
    const Eigen::Vector3d d1 = v1 - v0, d2 = v2 - v0;
    const double R = radius;
    auto base = [v0, d1, d2](const Vector& u) -> Eigen::Vector3d {
        return v0 + u[0] * d1 + u[1] * d2;
    };
    c.position = [base, R](const Vector& u) {
        const Eigen::Vector3d p = base(u);
        Vector x = R * p / p.norm();
        return x;
    };
    c.tangent = [base, d1, d2, R](const Vector& u) {
        const Eigen::Vector3d p = base(u);
        const double P = p.norm(), P3 = P * P * P;
        Matrix t(3, 2);
        const std::array<Eigen::Vector3d, 2> d{d1, d2};
        for (int i = 0; i < 2; ++i)
            t.col(i) = R * (d[i] / P - p * (p.dot(d[i])) / P3);
        return t;
    };
    c.hessian = [base, d1, d2, R](const Vector& u) {
        const Eigen::Vector3d p = base(u);
        const double P = p.norm(), P3 = P * P * P, P5 = P3 * P * P;
        const std::array<Eigen::Vector3d, 2> d{d1, d2};
        std::vector<Matrix> h(3, Matrix(2, 2));
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const Eigen::Vector3d v =
                    R * (-d[i] * (p.dot(d[j])) / P3 - d[j] * (p.dot(d[i])) / P3 -
                         p * (d[i].dot(d[j])) / P3 +
                         3.0 * p * (p.dot(d[i])) * (p.dot(d[j])) / P5);
                for (int cc = 0; cc < 3; ++cc) h[cc](i, j) = v[cc];
            }
        }
        return h;
    };
    return c;
}

// --- factories -------------------------------------------------------------

ParametricGeometry make_circle(double radius, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::Circle;
    g.n = 1;
    g.N = 2;
    g.closed = true;
    g.weight_mode = weight;
    g.radius = radius;
    g.chart = circle_chart(radius);
    return g;
}

ParametricGeometry make_sphere(int n, double radius, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::Sphere;
    g.n = n;
    g.N = n + 1;
    g.closed = true;
    g.weight_mode = weight;
    g.radius = radius;
    g.chart = geodesic_sphere_chart(n, radius);
    return g;
}

ParametricGeometry make_spherical_cap(double radius, double cap_angle, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::SphericalCap;
    g.n = 2;
    g.N = 3;
    g.closed = false;
    g.weight_mode = weight;
    g.radius = radius;
    g.cap_angle = cap_angle;
    g.chart = geodesic_sphere_chart(2, radius);
    return g;
}

ParametricGeometry make_cylinder_segment(double radius, double half_length, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::CylinderSegment;
    g.n = 2;
    g.N = 3;
    g.closed = false;
    g.weight_mode = weight;
    g.radius = radius;
    g.half_length = half_length;
    g.chart = cylinder_chart(radius);
    return g;
}

ParametricGeometry make_flat_disk(double radius, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::FlatDomain;
    g.n = 2;
    g.N = 3;
    g.closed = false;
    g.weight_mode = weight;
    g.flat_radius = radius;
    g.chart = flat_disk_chart();
    return g;
}

ParametricGeometry make_interval(double length, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::FlatDomain;
    g.n = 1;
    g.N = 2;
    g.closed = false;
    g.weight_mode = weight;
    g.interval_length = length;
    g.chart = interval_chart();
    return g;
}

ParametricGeometry make_custom(Chart chart, bool closed, WeightMode weight) {
    ParametricGeometry g;
    g.kind = GeometryKind::Custom;
    g.n = chart.param_dim;
    g.N = chart.ambient_dim;
    g.closed = closed;
    g.weight_mode = weight;
    g.chart = std::move(chart);
    return g;
}

// --- pointwise evaluation ---------------------------------------------------

SurfacePoint evaluate_chart(const Chart& chart, const Vector& u) {
    SurfacePoint sp;
    sp.u = u;
    sp.x = chart.position(u);
    sp.tangents = chart.tangent(u);

    const int n = chart.param_dim;
    const int N = chart.ambient_dim;
    sp.metric = sp.tangents.transpose() * sp.tangents;
    sp.metric = 0.5 * (sp.metric + sp.metric.transpose().eval());

    Eigen::LLT<Matrix> llt(sp.metric);
    double det = 1.0;
    if (llt.info() == Eigen::Success) {
        const Matrix L = llt.matrixL();
        for (int i = 0; i < n; ++i) det *= L(i, i) * L(i, i);
        sp.chol_lower = L;
    }
    const double scale = std::pow(std::max(sp.metric.trace() / n, 0.0), n);
    if (llt.info() != Eigen::Success || !(det > 1e-13 * std::max(scale, 1e-300))) {
        throw DegenerateMetric("first fundamental form not positive definite at u = [" +
                               [&] {
                                   std::string s;
                                   for (int i = 0; i < u.size(); ++i)
                                       s += (i ? ", " : "") + std::to_string(u[i]);
                                   return s;
                               }() +
                               "]");
    }
    sp.sqrt_det_g = std::sqrt(det);
    sp.metric_inv = llt.solve(Matrix::Identity(n, n));

    // Orthonormal tangent frame: F = tangents * L^{-T}, i.e. F^T = L^{-1} t^T.
    sp.tangent_frame =
        sp.chol_lower.triangularView<Eigen::Lower>().solve(sp.tangents.transpose()).transpose();

    // Complete to an orthonormal ambient basis; pick the standard basis
    // vector with the largest residual each round so the result is stable.
    sp.normal_frame = Matrix::Zero(N, N - n);
    Matrix accepted(N, 0);
    for (int round = 0; round < N - n; ++round) {
        int best = -1;
        double best_norm = -1.0;
        Vector best_v;
        for (int cnd = 0; cnd < N; ++cnd) {
            Vector v = Vector::Zero(N);
            v[cnd] = 1.0;
            v -= sp.tangent_frame * (sp.tangent_frame.transpose() * v);
            if (accepted.cols() > 0) v -= accepted * (accepted.transpose() * v);
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = cnd;
                best_v = v;
            }
        }
        (void)best;
        best_v /= best_norm;
        // one re-orthogonalization pass tightens the frame to machine precision
        best_v -= sp.tangent_frame * (sp.tangent_frame.transpose() * best_v);
        if (accepted.cols() > 0) best_v -= accepted * (accepted.transpose() * best_v);
        best_v.normalize();
        accepted.conservativeResize(N, accepted.cols() + 1);
        accepted.col(accepted.cols() - 1) = best_v;
        sp.normal_frame.col(round) = best_v;
    }
    return sp;
}

// --- symmetric functions and Newton tensors --------------------------------

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<double> symmetric_functions_from_shape(const Matrix& shape) {
    const int n = static_cast<int>(shape.rows());
    std::vector<double> power(n + 1, 0.0); // power[k] = tr(shape^k)
    Matrix acc = Matrix::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        acc = acc * shape;
        power[k] = acc.trace();
    }
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        double sign = 1.0;
        for (int i = 1; i <= k; ++i) {
            s += sign * e[k - i] * power[i];
            sign = -sign;
        }
        e[k] = s / k;
    }
    return e;
}

Matrix newton_recursion(const Matrix& shape, const std::vector<double>& sym, int r) {
    const int n = static_cast<int>(shape.rows());
    Matrix t = Matrix::Identity(n, n);
    for (int j = 1; j <= r; ++j) t = sym[j] * Matrix::Identity(n, n) - t * shape;
    t = 0.5 * (t + t.transpose().eval());
    return t;
}

namespace {

struct SignedPermutations {
    std::vector<std::vector<int>> perms;
    std::vector<double> signs;
};

const SignedPermutations& signed_permutations(int s) {
    static std::map<int, SignedPermutations> cache;
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    SignedPermutations sp;
    std::vector<int> p(s);
    std::iota(p.begin(), p.end(), 0);
    do {
        int inversions = 0;
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (p[i] > p[j]) ++inversions;
        sp.perms.push_back(p);
        sp.signs.push_back(inversions % 2 == 0 ? 1.0 : -1.0);
    } while (std::next_permutation(p.begin(), p.end()));
    return cache.emplace(s, std::move(sp)).first->second;
}

} // namespace

double generalized_kronecker(const std::vector<int>& lower, const std::vector<int>& upper) {
    const int s = static_cast<int>(lower.size());
    const SignedPermutations& sp = signed_permutations(s);
    double value = 0.0;
    for (std::size_t m = 0; m < sp.perms.size(); ++m) {
        bool match = true;
        for (int p = 0; p < s; ++p) {
            if (lower[p] != upper[sp.perms[m][p]]) {
                match = false;
                break;
            }
        }
        if (match) value += sp.signs[m];
    }
    return value;
}

Matrix newton_kronecker(const std::vector<Matrix>& second_fundamental, int r) {
    const int n = static_cast<int>(second_fundamental.at(0).rows());
    if (r == 0) return Matrix::Identity(n, n);

    auto inner = [&](int a, int b, int c, int d) {
        double v = 0.0;
        for (const Matrix& h : second_fundamental) v += h(a, b) * h(c, d);
        return v;
    };

    double rfact = 1.0;
    for (int i = 2; i <= r; ++i) rfact *= i;

    Matrix t = Matrix::Zero(n, n);
    std::vector<int> lower(r + 1), upper(r + 1);
    std::vector<int> idx(2 * r, 0); // i_1..i_r, j_1..j_r counters
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                for (int m = 0; m < r; ++m) {
                    lower[m] = idx[m];
                    upper[m] = idx[r + m];
                }
                lower[r] = i;
                upper[r] = j;
                const double delta = generalized_kronecker(lower, upper);
                if (delta != 0.0) {
                    double prod = 1.0;
                    for (int m = 0; m < r; m += 2)
                        prod *= inner(idx[m], idx[r + m], idx[m + 1], idx[r + m + 1]);
                    sum += delta * prod;
                }
                int pos = 0;
                while (pos < 2 * r && ++idx[pos] == n) idx[pos++] = 0;
                if (pos == 2 * r) break;
            }
            t(i, j) = sum / rfact;
        }
    }
    t = 0.5 * (t + t.transpose().eval());
    return t;
}

// --- curvature package -------------------------------------------------------

CurvaturePackage curvature_package(const Chart& chart, const SurfacePoint& point, int r) {
    const int n = chart.param_dim;
    const int N = chart.ambient_dim;
    if (r % 2 != 0)
        throw OddOrderRequested("Newton tensor order r must be even, got r = " +
                                std::to_string(r));
    if (r < 0 || r >= n)
        throw DimensionMismatch("Newton tensor order r must satisfy 0 <= r < n, got r = " +
                                std::to_string(r) + ", n = " + std::to_string(n));

    CurvaturePackage pkg;
    pkg.r = r;

    const std::vector<Matrix> hess = chart.hessian(point.u);
    const int codim = N - n;
    const Matrix& L = point.chol_lower;

    pkg.second_fundamental.resize(codim);
    pkg.mean_curvature = Vector::Zero(N);
    for (int alpha = 0; alpha < codim; ++alpha) {
        Matrix hc = Matrix::Zero(n, n);
        for (int c = 0; c < N; ++c) hc += point.normal_frame(c, alpha) * hess[c];
        // push the chart-basis coefficients into the orthonormal frame
        Matrix hf = L.triangularView<Eigen::Lower>().solve(hc);
        hf = L.triangularView<Eigen::Lower>().solve(hf.transpose()).transpose();
        hf = 0.5 * (hf + hf.transpose().eval());
        pkg.second_fundamental[alpha] = hf;
        pkg.mean_curvature += (hf.trace() / n) * point.normal_frame.col(alpha);
    }

    if (codim == 1) {
        // orient the shape operator along the mean curvature vector so that
        // spheres get positive principal curvatures
        const double tr = pkg.second_fundamental[0].trace();
        const double sign = (tr < 0.0) ? -1.0 : 1.0;
        const Matrix shape = sign * pkg.second_fundamental[0];
        pkg.symmetric_functions = symmetric_functions_from_shape(shape);
        pkg.newton = newton_recursion(shape, pkg.symmetric_functions, r);
        if (r > 0) {
            const Matrix kron = newton_kronecker(pkg.second_fundamental, r);
            const double scale = pkg.newton.cwiseAbs().maxCoeff() + 1.0;
            if ((kron - pkg.newton).cwiseAbs().maxCoeff() > 1e-9 * scale)
                throw Error("Newton tensor recursion and Kronecker contraction disagree");
        }
    } else {
        pkg.newton = newton_kronecker(pkg.second_fundamental, r);
        pkg.symmetric_functions.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
        pkg.symmetric_functions[0] = 1.0;
        if (r > 0) pkg.symmetric_functions[r] = pkg.newton.trace() / (n - r);
    }

    pkg.H_r = pkg.symmetric_functions[r] / binomial(n, r);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pkg.newton, Eigen::EigenvaluesOnly);
    pkg.newton_min_eigenvalue = es.eigenvalues().minCoeff();
    return pkg;
}

double shrinker_residual(const Chart& chart, const SurfacePoint& point) {
    const CurvaturePackage pkg = curvature_package(chart, point, 0);
    const Vector x_perp =
        point.normal_frame * (point.normal_frame.transpose() * point.x);
    return (chart.param_dim * pkg.mean_curvature + x_perp).norm();
}

WeightData weight_data(const ParametricGeometry& geom, const SurfacePoint& point) {
    WeightData w;
    w.x_norm_sq = point.x.squaredNorm();
    Vector grad_ambient;
    switch (geom.weight_mode) {
        case WeightMode::Gaussian:
            w.f = 0.5 * w.x_norm_sq;
            grad_ambient = point.x;
            break;
        case WeightMode::None:
            w.f = 0.0;
            grad_ambient = Vector::Zero(geom.N);
            break;
        case WeightMode::Custom:
            w.f = geom.weight_value(point.x);
            grad_ambient = geom.weight_gradient(point.x);
            break;
    }
    w.grad_f_tangent =
        point.tangent_frame * (point.tangent_frame.transpose() * grad_ambient);
    w.grad_f_chart = point.metric_inv * (point.tangents.transpose() * grad_ambient);
    return w;
}

} // namespace sslab
