// discretization.hpp
//
// Piecewise-linear finite element spaces over the parameter domains of the
// supported geometries: periodic 1d meshes for circles, uniform segments for
// intervals, structured periodic grids for cylinder segments, polar disk
// meshes for flat disks and spherical caps, and icosahedral refinements for
// the closed 2-sphere. Every quadrature point caches analytically evaluated
// geometry (frames, curvature, weight), so downstream assembly never touches
// a chart again.

#ifndef SSLAB_DISCRETIZATION_HPP
#define SSLAB_DISCRETIZATION_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "sslab/geometry.hpp"

namespace sslab {

struct MeshElement {
    std::array<int, 3> nodes{-1, -1, -1};
    int node_count = 0;
    // Parameter corners, element-local (periodic directions unwrapped),
    // one column per node.
    Matrix param_corners;
};

// One quadrature point with its cached geometric data. Weights already
// include the rule weight, the area factor, and the measure factor e^{-f}.
struct QuadSample {
    int element = 0;
    double weight = 0.0;            // rule * sqrt(det g) * exp(-f)
    double weight_unweighted = 0.0; // rule * sqrt(det g)
    SurfacePoint point;
    CurvaturePackage curvature;
    WeightData wdata;
    Vector basis;        // hat values, one per element-local node
    Matrix basis_grad;   // N x node_count ambient tangential gradients
};

struct BoundarySample {
    int node = 0;
    SurfacePoint point;
    CurvaturePackage curvature;
};

struct DiscreteSpace {
    ParametricGeometry geometry;
    int r = 0;          // Newton tensor order cached at quadrature points
    int resolution = 0;

    std::vector<Vector> node_params;    // parameter coordinates per node
    std::vector<Vector> node_positions; // ambient coordinates per node
    std::vector<MeshElement> elements;
    std::vector<QuadSample> quads;
    std::vector<int> boundary_nodes;            // sorted
    std::vector<BoundarySample> boundary_samples;

    int node_count() const { return static_cast<int>(node_params.size()); }
    bool closed() const { return boundary_nodes.empty(); }
};

// Builds the nodal P1 space at the given resolution and caches geometry of
// order r at every quadrature point. Throws UnsupportedDimension for n > 2.
DiscreteSpace build_space(const ParametricGeometry& geometry, int resolution, int r);

// Nodal values over the space with gradient samples at quadrature points.
// Coordinate trials carry the exact analytic tangential gradient.
struct TrialFunction {
    std::string label;
    Vector nodal;              // one value per node
    std::vector<Vector> grad;  // ambient gradient per quadrature point
};

// The N ambient coordinate functions x_A with analytic tangential gradients.
std::vector<TrialFunction> coordinate_functions(const DiscreteSpace& space);

// Scalar field summaries over all quadrature and boundary samples.
struct AmbientStats {
    int r = 0;
    double xi = 0.0;       // min over samples of the smallest T^r eigenvalue
    double max_S_r = 0.0;
    double min_x_sq = 0.0;
    double vol = 0.0;      // sum of weighted quadrature weights
    double int_S_r = 0.0;  // integral of S_r against the weighted measure
};

// Throws NotPositiveDefinite when the discrete minimum xi is <= 0.
AmbientStats ambient_stats(const DiscreteSpace& space);

// Interpolate nodal data to quadrature points (values / FE gradients).
std::vector<double> values_at_quads(const DiscreteSpace& space, const Vector& nodal);
std::vector<Vector> gradients_at_quads(const DiscreteSpace& space, const Vector& nodal);

// Plain-text node/element listing, one record per line.
void dump_mesh(const DiscreteSpace& space, std::ostream& out);

} // namespace sslab

#endif
