// geometry.hpp
//
// Analytic evaluation of immersed manifolds: chart maps with hand-coded
// first and second derivatives, first/second fundamental forms, elementary
// symmetric curvature functions S_r, Newton transformations T^r (recursion
// and generalized-Kronecker routes), self-shrinker residual |nH + x_perp|,
// and Gaussian weight data. No curvature is ever estimated from a mesh;
// everything here differentiates the chart analytically.

#ifndef SSLAB_GEOMETRY_HPP
#define SSLAB_GEOMETRY_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "sslab/errors.hpp"

namespace sslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A chart u -> x(u) from an n-dimensional parameter domain into R^N,
// together with its analytic first and second derivatives.
//   tangent(u) : N x n, column i = dx/du_i
//   hessian(u) : N matrices of size n x n, hessian[c](i,j) = d2 x_c / du_i du_j
struct Chart {
    int param_dim = 0;
    int ambient_dim = 0;
    std::function<Vector(const Vector&)> position;
    std::function<Matrix(const Vector&)> tangent;
    std::function<std::vector<Matrix>(const Vector&)> hessian;
};

enum class GeometryKind {
    Sphere,
    Circle,
    CylinderSegment,
    SphericalCap,
    FlatDomain,
    Custom,
};

enum class WeightMode { Gaussian, None, Custom };

std::string to_string(GeometryKind kind);
std::string to_string(WeightMode mode);

// Chart-based immersed manifold plus the weight that defines the measure
// d_mu = exp(-f) dv. Built-in kinds carry their shape parameters so the
// discretization module can mesh the right parameter domain.
struct ParametricGeometry {
    GeometryKind kind = GeometryKind::Custom;
    int n = 0; // intrinsic dimension
    int N = 0; // ambient dimension
    bool closed = false;

    WeightMode weight_mode = WeightMode::None;
    // Used only for WeightMode::Custom; both take the ambient position.
    std::function<double(const Vector&)> weight_value;
    std::function<Vector(const Vector&)> weight_gradient;

    Chart chart; // primary chart

    double radius = 0.0;          // sphere / circle / cap / cylinder
    double cap_angle = 0.0;       // polar angle bound of a cap
    double half_length = 0.0;     // cylinder axial half-extent
    double flat_radius = 0.0;     // disk radius (flat 2d domain)
    double interval_length = 0.0; // flat 1d domain [0, L]
};

// Factories for the built-in geometry kinds. Shrinker kinds default to the
// Gaussian weight; flat domains take the weight explicitly.
ParametricGeometry make_circle(double radius, WeightMode weight = WeightMode::Gaussian);
ParametricGeometry make_sphere(int n, double radius, WeightMode weight = WeightMode::Gaussian);
ParametricGeometry make_spherical_cap(double radius, double cap_angle,
                                      WeightMode weight = WeightMode::Gaussian);
ParametricGeometry make_cylinder_segment(double radius, double half_length,
                                         WeightMode weight = WeightMode::Gaussian);
ParametricGeometry make_flat_disk(double radius, WeightMode weight);
ParametricGeometry make_interval(double length, WeightMode weight);
ParametricGeometry make_custom(Chart chart, bool closed, WeightMode weight = WeightMode::None);

// Chart helpers reused by the discretization module.
Chart circle_chart(double radius);
Chart interval_chart();
Chart flat_disk_chart();
Chart cylinder_chart(double radius);
// Geodesic polar chart of S^n(radius): u in R^n, polar angle |u|, pole at
// x = (0,...,0,radius). Smooth across the pole.
Chart geodesic_sphere_chart(int n, double radius);
// Chart x(u) = radius * p(u)/|p(u)| with p affine over the reference
// simplex spanned by three ambient corner points (spherical triangle).
Chart normalized_affine_chart(double radius, const Eigen::Vector3d& v0,
                              const Eigen::Vector3d& v1, const Eigen::Vector3d& v2);

// All pointwise frame data of the immersion at one parameter point.
struct SurfacePoint {
    Vector u;                 // parameter point (chart-local)
    Vector x;                 // ambient position, size N
    Matrix tangents;          // N x n, chart basis dx/du_i
    Matrix metric;            // n x n first fundamental form
    Matrix metric_inv;        // n x n
    double sqrt_det_g = 0.0;  // area factor
    Matrix tangent_frame;     // N x n, orthonormal tangent basis
    Matrix normal_frame;      // N x (N-n), orthonormal normal basis
    Matrix chol_lower;        // n x n Cholesky factor of the metric
};

// Per-point shape data: vector-valued second fundamental form coefficients
// in the orthonormal tangent frame, symmetric functions, Newton tensor.
struct CurvaturePackage {
    int r = 0;
    // second_fundamental[alpha](a,b) = <II(e_a,e_b), normal_alpha>, frame basis.
    std::vector<Matrix> second_fundamental;
    Vector mean_curvature;                  // ambient vector H, size N
    std::vector<double> symmetric_functions; // S_0..S_n (hypersurfaces)
    Matrix newton;                          // T^r in the orthonormal frame
    double H_r = 0.0;                       // S_r / binom(n, r)
    double newton_min_eigenvalue = 0.0;
};

struct WeightData {
    double f = 0.0;
    double x_norm_sq = 0.0;
    Vector grad_f_tangent;   // ambient tangential gradient of f, size N
    Vector grad_f_chart;     // chart components (raised index), size n
};

// Evaluates chart, metric, and orthonormal frames at u.
// Throws DegenerateMetric when the first fundamental form fails to be
// positive definite (bad chart or out-of-domain point).
SurfacePoint evaluate_chart(const Chart& chart, const Vector& u);

// Curvature data at an evaluated point. For hypersurfaces the shape
// operator is oriented along the mean curvature vector so spheres have
// positive principal curvatures; S_r comes from the characteristic
// polynomial and T^r from the recursion, cross-checked against the
// generalized-Kronecker contraction. Codimension >= 2 uses the Kronecker
// route alone (even r only).
CurvaturePackage curvature_package(const Chart& chart, const SurfacePoint& point, int r);

// |nH + x_perp|; zero certifies the self-shrinker equation at this point.
double shrinker_residual(const Chart& chart, const SurfacePoint& point);

WeightData weight_data(const ParametricGeometry& geom, const SurfacePoint& point);

// --- Newton transformation machinery -----------------------------------

double binomial(int n, int k);

// Elementary symmetric functions e_0..e_n of the eigenvalues of a symmetric
// matrix, read off the characteristic polynomial via the trace recursion.
std::vector<double> symmetric_functions_from_shape(const Matrix& shape);

// T^r by the recursion T^0 = I, T^j = S_j I - T^{j-1} A.
Matrix newton_recursion(const Matrix& shape, const std::vector<double>& sym, int r);

// T^r by the generalized-Kronecker contraction of r copies of the
// vector-valued second fundamental form (valid in any codimension, even r).
Matrix newton_kronecker(const std::vector<Matrix>& second_fundamental, int r);

// Signed permutation sum det[delta(lower_p, upper_q)] over r+1 index slots.
double generalized_kronecker(const std::vector<int>& lower, const std::vector<int>& upper);

} // namespace sslab

#endif
