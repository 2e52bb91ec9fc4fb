// discretization.cpp

#include "sslab/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace sslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ReferenceRule {
    // quadrature points in reference coordinates, one column per point
    Matrix points;
    Vector weights;
    // P1 hat values at the rule points, one column per point
    Matrix hat_values;
    // constant reference gradients of the hats, one column per hat
    Matrix hat_grads;
};

// two-point Gauss rule on the unit segment, exact through cubics
ReferenceRule segment_rule() {
    ReferenceRule r;
    const double d = 0.5 / std::sqrt(3.0);
    r.points = Matrix(1, 2);
    r.points << 0.5 - d, 0.5 + d;
    r.weights = Vector::Constant(2, 0.5);
    r.hat_values = Matrix(2, 2);
    for (int q = 0; q < 2; ++q) {
        r.hat_values(0, q) = 1.0 - r.points(0, q);
        r.hat_values(1, q) = r.points(0, q);
    }
    r.hat_grads = Matrix(1, 2);
    r.hat_grads << -1.0, 1.0;
    return r;
}

// mid-edge rule on the unit triangle, exact through quadratics
ReferenceRule triangle_rule() {
    ReferenceRule r;
    r.points = Matrix(2, 3);
    r.points << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5;
    r.weights = Vector::Constant(3, 1.0 / 6.0);
    r.hat_values = Matrix(3, 3);
    for (int q = 0; q < 3; ++q) {
        const double xi = r.points(0, q), eta = r.points(1, q);
        r.hat_values(0, q) = 1.0 - xi - eta;
        r.hat_values(1, q) = xi;
        r.hat_values(2, q) = eta;
    }
    r.hat_grads = Matrix(2, 3);
    r.hat_grads << -1.0, 1.0, 0.0, -1.0, 0.0, 1.0;
    return r;
}

// Chart over the reference simplex obtained by composing a parent chart
// with the affine map onto the element's parameter corners.
Chart element_chart(const Chart& parent, const Matrix& corners) {
    const int n = parent.param_dim;
    Chart c;
    c.param_dim = n;
    c.ambient_dim = parent.ambient_dim;
    const Vector c0 = corners.col(0);
    Matrix J(n, n);
    for (int i = 0; i < n; ++i) J.col(i) = corners.col(i + 1) - c0;
    auto to_parent = [c0, J](const Vector& xi) -> Vector { return c0 + J * xi; };
    c.position = [parent, to_parent](const Vector& xi) { return parent.position(to_parent(xi)); };
    c.tangent = [parent, to_parent, J](const Vector& xi) {
        return Matrix(parent.tangent(to_parent(xi)) * J);
    };
    c.hessian = [parent, to_parent, J](const Vector& xi) {
        std::vector<Matrix> h = parent.hessian(to_parent(xi));
        for (auto& m : h) m = (J.transpose() * m * J).eval();
        return h;
    };
    return c;
}

struct MeshTopology {
    std::vector<Vector> node_params;
    std::vector<Vector> node_positions; // may be empty, filled from chart later
    std::vector<MeshElement> elements;
    std::vector<int> boundary_nodes;
    // non-empty only for the icosahedral sphere: per-element charts
    std::vector<Chart> element_charts;
};

MeshTopology mesh_circle(double /*radius*/, int m) {
    MeshTopology t;
    const double h = 2.0 * kPi / m;
    for (int a = 0; a < m; ++a) {
        Vector u(1);
        u << a * h;
        t.node_params.push_back(u);
    }
    for (int a = 0; a < m; ++a) {
        MeshElement e;
        e.node_count = 2;
        e.nodes = {a, (a + 1) % m, -1};
        e.param_corners = Matrix(1, 2);
        e.param_corners << a * h, (a + 1) * h; // unwrapped
        t.elements.push_back(e);
    }
    return t;
}

MeshTopology mesh_interval(double length, int m) {
    MeshTopology t;
    const double h = length / m;
    for (int a = 0; a <= m; ++a) {
        Vector u(1);
        u << a * h;
        t.node_params.push_back(u);
    }
    for (int a = 0; a < m; ++a) {
        MeshElement e;
        e.node_count = 2;
        e.nodes = {a, a + 1, -1};
        e.param_corners = Matrix(1, 2);
        e.param_corners << a * h, (a + 1) * h;
        t.elements.push_back(e);
    }
    t.boundary_nodes = {0, m};
    return t;
}

MeshTopology mesh_cylinder(double radius, double half_length, int resolution) {
    MeshTopology t;
    const int mtheta = resolution;
    const int mt = std::max(2, static_cast<int>(std::lround(
                                   resolution * half_length / (kPi * radius))));
    const double htheta = 2.0 * kPi / mtheta;
    const double ht = 2.0 * half_length / mt;
    auto id = [mtheta](int i, int j) { return j * mtheta + i; };
    for (int j = 0; j <= mt; ++j)
        for (int i = 0; i < mtheta; ++i) {
            Vector u(2);
            u << i * htheta, -half_length + j * ht;
            t.node_params.push_back(u);
        }
    for (int j = 0; j < mt; ++j) {
        for (int i = 0; i < mtheta; ++i) {
            const double th0 = i * htheta, th1 = (i + 1) * htheta;
            const double t0 = -half_length + j * ht, t1 = t0 + ht;
            const int n00 = id(i, j), n10 = id((i + 1) % mtheta, j);
            const int n01 = id(i, j + 1), n11 = id((i + 1) % mtheta, j + 1);
            MeshElement e1;
            e1.node_count = 3;
            e1.nodes = {n00, n10, n11};
            e1.param_corners = Matrix(2, 3);
            e1.param_corners << th0, th1, th1, t0, t0, t1;
            t.elements.push_back(e1);
            MeshElement e2;
            e2.node_count = 3;
            e2.nodes = {n00, n11, n01};
            e2.param_corners = Matrix(2, 3);
            e2.param_corners << th0, th1, th0, t0, t1, t1;
            t.elements.push_back(e2);
        }
    }
    for (int i = 0; i < mtheta; ++i) {
        t.boundary_nodes.push_back(id(i, 0));
        t.boundary_nodes.push_back(id(i, mt));
    }
    std::sort(t.boundary_nodes.begin(), t.boundary_nodes.end());
    return t;
}

// Concentric-ring triangulation of the parameter disk |u| <= rho_max:
// ring k carries 6k nodes, adjacent rings are zipped together by angle.
MeshTopology mesh_polar_disk(double rho_max, int m) {
    MeshTopology t;
    std::vector<std::vector<int>> rings(m + 1);
    {
        Vector c(2);
        c << 0.0, 0.0;
        t.node_params.push_back(c);
        rings[0] = {0};
    }
    for (int k = 1; k <= m; ++k) {
        const int nk = 6 * k;
        const double rho = rho_max * k / m;
        for (int j = 0; j < nk; ++j) {
            const double ang = 2.0 * kPi * j / nk;
            Vector u(2);
            u << rho * std::cos(ang), rho * std::sin(ang);
            rings[k].push_back(static_cast<int>(t.node_params.size()));
            t.node_params.push_back(u);
        }
    }
    auto add_tri = [&](int a, int b, int c) {
        MeshElement e;
        e.node_count = 3;
        e.nodes = {a, b, c};
        e.param_corners = Matrix(2, 3);
        e.param_corners.col(0) = t.node_params[a];
        e.param_corners.col(1) = t.node_params[b];
        e.param_corners.col(2) = t.node_params[c];
        t.elements.push_back(e);
    };
    // central fan
    for (int j = 0; j < 6; ++j) add_tri(rings[0][0], rings[1][j], rings[1][(j + 1) % 6]);
    // annuli
    for (int k = 2; k <= m; ++k) {
        const auto& inner = rings[k - 1];
        const auto& outer = rings[k];
        const int n1 = static_cast<int>(inner.size());
        const int n2 = static_cast<int>(outer.size());
        int ai = 0, ao = 0;
        while (ai < n1 || ao < n2) {
            const double next_inner =
                ai < n1 ? 2.0 * kPi * (ai + 1) / n1 : std::numeric_limits<double>::infinity();
            const double next_outer =
                ao < n2 ? 2.0 * kPi * (ao + 1) / n2 : std::numeric_limits<double>::infinity();
            if (next_outer <= next_inner) {
                add_tri(inner[ai % n1], outer[ao % n2], outer[(ao + 1) % n2]);
                ++ao;
            } else {
                add_tri(inner[ai % n1], outer[(ao) % n2], inner[(ai + 1) % n1]);
                ++ai;
            }
        }
    }
    t.boundary_nodes = rings[m];
    std::sort(t.boundary_nodes.begin(), t.boundary_nodes.end());
    return t;
}

// Icosahedral m-refinement of S^2(radius). Each coarse face is split into
// m^2 triangles; shared corners and edge points are deduplicated through
// exact lattice keys, so there is no tolerance-based matching anywhere.
MeshTopology mesh_icosphere(double radius, int m) {
    const double tau = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> base = {
        {-1, tau, 0}, {1, tau, 0},   {-1, -tau, 0}, {1, -tau, 0},
        {0, -1, tau}, {0, 1, tau},   {0, -1, -tau}, {0, 1, -tau},
        {tau, 0, -1}, {tau, 0, 1},   {-tau, 0, -1}, {-tau, 0, 1}};
    for (auto& v : base) v.normalize();
    const std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    MeshTopology t;
    std::map<std::tuple<int, int, int, int>, int> node_ids; // (type, a, b, c) -> id
    auto intern = [&](std::tuple<int, int, int, int> key, const Eigen::Vector3d& pos) {
        auto it = node_ids.find(key);
        if (it != node_ids.end()) return it->second;
        const int id = static_cast<int>(t.node_params.size());
        node_ids.emplace(key, id);
        Vector p(3);
        p = radius * pos.normalized();
        t.node_params.push_back(p);
        t.node_positions.push_back(p);
        return id;
    };

    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto [A, B, C] = faces[f];
        // lattice point (i, j): A*(m-i-j) + B*i + C*j, scaled by 1/m
        std::vector<std::vector<int>> grid(m + 1);
        for (int i = 0; i <= m; ++i) {
            grid[i].resize(m + 1 - i);
            for (int j = 0; j <= m - i; ++j) {
                const Eigen::Vector3d pos =
                    (base[A] * (m - i - j) + base[B] * i + base[C] * j) / m;
                std::tuple<int, int, int, int> key;
                if (i == 0 && j == 0)
                    key = {0, A, 0, 0};
                else if (i == m)
                    key = {0, B, 0, 0};
                else if (j == m)
                    key = {0, C, 0, 0};
                else if (j == 0)
                    key = A < B ? std::tuple{1, A, B, i} : std::tuple{1, B, A, m - i};
                else if (i == 0)
                    key = A < C ? std::tuple{1, A, C, j} : std::tuple{1, C, A, m - j};
                else if (i + j == m)
                    key = B < C ? std::tuple{1, B, C, j} : std::tuple{1, C, B, m - j};
                else
                    key = {2, static_cast<int>(f), i, j};
                grid[i][j] = intern(key, pos);
            }
        }
        auto add_tri = [&](int a, int b, int c) {
            MeshElement e;
            e.node_count = 3;
            e.nodes = {a, b, c};
            e.param_corners = Matrix(3, 3);
            e.param_corners.col(0) = t.node_params[a];
            e.param_corners.col(1) = t.node_params[b];
            e.param_corners.col(2) = t.node_params[c];
            t.elements.push_back(e);
        };
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m - i; ++j) {
                add_tri(grid[i][j], grid[i + 1][j], grid[i][j + 1]);
                if (j < m - i - 1) add_tri(grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]);
            }
        }
    }
    t.element_charts.reserve(t.elements.size());
    for (const auto& e : t.elements) {
        t.element_charts.push_back(normalized_affine_chart(
            radius, t.node_positions[e.nodes[0]], t.node_positions[e.nodes[1]],
            t.node_positions[e.nodes[2]]));
    }
    return t;
}

} // namespace

DiscreteSpace build_space(const ParametricGeometry& geometry, int resolution, int r) {
    if (resolution < 4) throw Error("resolution must be at least 4");
    if (geometry.n > 2)
        throw UnsupportedDimension(
            "finite element path covers n <= 2 only; higher dimensions are analytic");

    DiscreteSpace space;
    space.geometry = geometry;
    space.r = r;
    space.resolution = resolution;

    MeshTopology topo;
    bool charts_per_element = false;
    switch (geometry.kind) {
        case GeometryKind::Circle:
            topo = mesh_circle(geometry.radius, resolution);
            break;
        case GeometryKind::Sphere:
            if (geometry.n != 2)
                throw UnsupportedDimension("closed sphere meshes exist for n = 2 only");
            topo = mesh_icosphere(geometry.radius, resolution);
            charts_per_element = true;
            break;
        case GeometryKind::SphericalCap:
            topo = mesh_polar_disk(geometry.cap_angle, resolution);
            break;
        case GeometryKind::CylinderSegment:
            topo = mesh_cylinder(geometry.radius, geometry.half_length, resolution);
            break;
        case GeometryKind::FlatDomain:
            topo = geometry.n == 1 ? mesh_interval(geometry.interval_length, resolution)
                                   : mesh_polar_disk(geometry.flat_radius, resolution);
            break;
        case GeometryKind::Custom:
            throw UnsupportedDimension("custom geometries have no mesh generator");
    }

    space.node_params = std::move(topo.node_params);
    space.elements = std::move(topo.elements);
    space.boundary_nodes = std::move(topo.boundary_nodes);

    if (!topo.node_positions.empty()) {
        space.node_positions = std::move(topo.node_positions);
    } else {
        space.node_positions.reserve(space.node_params.size());
        for (const auto& u : space.node_params)
            space.node_positions.push_back(geometry.chart.position(u));
    }

    const ReferenceRule rule = geometry.n == 1 ? segment_rule() : triangle_rule();
    const int nq = static_cast<int>(rule.weights.size());
    space.quads.reserve(space.elements.size() * nq);

    for (std::size_t ei = 0; ei < space.elements.size(); ++ei) {
        const MeshElement& el = space.elements[ei];
        Chart chart;
        if (charts_per_element) {
            chart = topo.element_charts[ei];
        } else {
            chart = element_chart(geometry.chart, el.param_corners);
        }
        for (int q = 0; q < nq; ++q) {
            QuadSample s;
            s.element = static_cast<int>(ei);
            s.point = evaluate_chart(chart, rule.points.col(q));
            s.curvature = curvature_package(chart, s.point, r);
            s.wdata = weight_data(geometry, s.point);
            s.weight_unweighted = rule.weights[q] * s.point.sqrt_det_g;
            s.weight = s.weight_unweighted * std::exp(-s.wdata.f);
            s.basis = rule.hat_values.col(q);
            s.basis_grad =
                s.point.tangents * (s.point.metric_inv * rule.hat_grads);
            space.quads.push_back(std::move(s));
        }
    }

    space.boundary_samples.reserve(space.boundary_nodes.size());
    for (int bn : space.boundary_nodes) {
        BoundarySample bs;
        bs.node = bn;
        bs.point = evaluate_chart(geometry.chart, space.node_params[bn]);
        bs.curvature = curvature_package(geometry.chart, bs.point, r);
        space.boundary_samples.push_back(std::move(bs));
    }
    return space;
}

std::vector<TrialFunction> coordinate_functions(const DiscreteSpace& space) {
    const int N = space.geometry.N;
    std::vector<TrialFunction> out(N);
    for (int A = 0; A < N; ++A) {
        TrialFunction& tf = out[A];
        tf.label = "x_" + std::to_string(A + 1);
        tf.nodal = Vector(space.node_count());
        for (int a = 0; a < space.node_count(); ++a) tf.nodal[a] = space.node_positions[a][A];
        tf.grad.reserve(space.quads.size());
        for (const QuadSample& s : space.quads) {
            // exact tangential projection of the ambient basis vector
            const Matrix& F = s.point.tangent_frame;
            tf.grad.push_back(F * F.row(A).transpose());
        }
    }
    return out;
}

AmbientStats ambient_stats(const DiscreteSpace& space) {
    AmbientStats st;
    st.r = space.r;
    st.xi = std::numeric_limits<double>::infinity();
    st.max_S_r = -std::numeric_limits<double>::infinity();
    st.min_x_sq = std::numeric_limits<double>::infinity();
    auto absorb = [&](const SurfacePoint& p, const CurvaturePackage& c) {
        st.xi = std::min(st.xi, c.newton_min_eigenvalue);
        st.max_S_r = std::max(st.max_S_r, c.symmetric_functions[space.r]);
        st.min_x_sq = std::min(st.min_x_sq, p.x.squaredNorm());
    };
    for (const QuadSample& s : space.quads) {
        absorb(s.point, s.curvature);
        st.vol += s.weight;
        st.int_S_r += s.weight * s.curvature.symmetric_functions[space.r];
    }
    for (const BoundarySample& b : space.boundary_samples) absorb(b.point, b.curvature);
    if (!(st.xi > 0.0))
        throw NotPositiveDefinite("Newton tensor is not positive definite: xi = " +
                                  std::to_string(st.xi));
    return st;
}

std::vector<double> values_at_quads(const DiscreteSpace& space, const Vector& nodal) {
    std::vector<double> out(space.quads.size(), 0.0);
    for (std::size_t q = 0; q < space.quads.size(); ++q) {
        const QuadSample& s = space.quads[q];
        const MeshElement& el = space.elements[s.element];
        double v = 0.0;
        for (int a = 0; a < el.node_count; ++a) v += s.basis[a] * nodal[el.nodes[a]];
        out[q] = v;
    }
    return out;
}

std::vector<Vector> gradients_at_quads(const DiscreteSpace& space, const Vector& nodal) {
    std::vector<Vector> out(space.quads.size());
    for (std::size_t q = 0; q < space.quads.size(); ++q) {
        const QuadSample& s = space.quads[q];
        const MeshElement& el = space.elements[s.element];
        Vector g = Vector::Zero(space.geometry.N);
        for (int a = 0; a < el.node_count; ++a) g += s.basis_grad.col(a) * nodal[el.nodes[a]];
        out[q] = g;
    }
    return out;
}

void dump_mesh(const DiscreteSpace& space, std::ostream& out) {
    for (int a = 0; a < space.node_count(); ++a) {
        out << "node " << a;
        for (int i = 0; i < space.node_params[a].size(); ++i)
            out << ' ' << space.node_params[a][i];
        out << " |";
        for (int i = 0; i < space.node_positions[a].size(); ++i)
            out << ' ' << space.node_positions[a][i];
        out << '\n';
    }
    for (std::size_t e = 0; e < space.elements.size(); ++e) {
        out << "element " << e;
        for (int a = 0; a < space.elements[e].node_count; ++a)
            out << ' ' << space.elements[e].nodes[a];
        out << '\n';
    }
    for (int b : space.boundary_nodes) out << "boundary " << b << '\n';
}

} // namespace sslab
