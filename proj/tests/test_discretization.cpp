#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sslab/discretization.hpp"
#include "test_support.hpp"

using namespace sslab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double weighted_volume(const DiscreteSpace& s) {
    double v = 0.0;
    for (const auto& q : s.quads) v += q.weight;
    return v;
}
} // namespace

TEST_CASE("circle mesh: periodic, no boundary, exact weighted volume") {
    auto geom = make_circle(1.0);
    const DiscreteSpace s = build_space(geom, 256, 0);
    CHECK(s.node_count() == 256);
    CHECK(s.elements.size() == 256);
    CHECK(s.boundary_nodes.empty());
    // |x|^2 = 1 on the curve, so the weighted measure is exp(-1/2) ds
    const double expect = 2.0 * kPi * std::exp(-0.5);
    CHECK(weighted_volume(s) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("interval mesh: boundary nodes at both ends, unweighted length") {
    auto geom = make_interval(kPi, WeightMode::None);
    const DiscreteSpace s = build_space(geom, 64, 0);
    CHECK(s.node_count() == 65);
    CHECK(s.boundary_nodes == std::vector<int>{0, 64});
    CHECK(weighted_volume(s) == doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("spherical cap mesh: rim boundary, weighted area") {
    auto geom = make_spherical_cap(std::sqrt(2.0), kPi / 3.0);
    const DiscreteSpace s = build_space(geom, 32, 0);
    CHECK(s.node_count() == 1 + 3 * 32 * 33);
    CHECK(!s.boundary_nodes.empty());
    for (int b : s.boundary_nodes)
        CHECK(s.node_params[b].norm() == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    // area of a polar cap of S^2(R) is 2 pi R^2 (1 - cos alpha); |x|^2 = 2
    const double expect = std::exp(-1.0) * 2.0 * kPi * 2.0 * (1.0 - 0.5);
    CHECK(weighted_volume(s) == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("flat disk with gaussian weight matches the radial closed form") {
    auto geom = make_flat_disk(1.0, WeightMode::Gaussian);
    const DiscreteSpace s = build_space(geom, 32, 0);
    const double expect = 2.0 * kPi * (1.0 - std::exp(-0.5));
    CHECK(std::abs(weighted_volume(s) - expect) / expect <= 1e-3);
}

TEST_CASE("cylinder segment mesh: two rims, gaussian volume closed form") {
    auto geom = make_cylinder_segment(1.0, 1.0);
    const DiscreteSpace s = build_space(geom, 48, 0);
    CHECK(!s.boundary_nodes.empty());
    const double expect =
        2.0 * kPi * std::exp(-0.5) * std::sqrt(2.0 * kPi) * std::erf(1.0 / std::sqrt(2.0));
    CHECK(std::abs(weighted_volume(s) - expect) / expect <= 1e-3);
    // boundary nodes sit on the rims
    for (int b : s.boundary_nodes)
        CHECK(std::abs(std::abs(s.node_params[b][1]) - 1.0) <= 1e-14);
}

TEST_CASE("icosahedral sphere mesh: node count and weighted area") {
    auto geom = make_sphere(2, std::sqrt(2.0));
    const DiscreteSpace s = build_space(geom, 8, 0);
    CHECK(s.node_count() == 10 * 64 + 2);
    CHECK(s.boundary_nodes.empty());
    const double expect = std::exp(-1.0) * 8.0 * kPi;
    CHECK(std::abs(weighted_volume(s) - expect) / expect <= 1e-3);
}

TEST_CASE("volume error drops by at least 3x per refinement on sphere and disk") {
    {
        auto geom = make_sphere(2, std::sqrt(2.0));
        const double expect = std::exp(-1.0) * 8.0 * kPi;
        const double e1 = std::abs(weighted_volume(build_space(geom, 4, 0)) - expect);
        const double e2 = std::abs(weighted_volume(build_space(geom, 8, 0)) - expect);
        CHECK(e1 / e2 >= 3.0);
    }
    {
        auto geom = make_flat_disk(1.0, WeightMode::Gaussian);
        const double expect = 2.0 * kPi * (1.0 - std::exp(-0.5));
        const double e1 = std::abs(weighted_volume(build_space(geom, 8, 0)) - expect);
        const double e2 = std::abs(weighted_volume(build_space(geom, 16, 0)) - expect);
        CHECK(e1 / e2 >= 3.0);
    }
}

TEST_CASE("partition of unity and zero gradient sum at every quadrature point") {
    for (const ParametricGeometry& geom :
         {make_sphere(2, std::sqrt(2.0)), make_spherical_cap(std::sqrt(2.0), kPi / 3.0),
          make_circle(1.0), make_flat_disk(1.0, WeightMode::Gaussian)}) {
        const DiscreteSpace s = build_space(geom, 8, 0);
        for (const auto& q : s.quads) {
            CHECK(std::abs(q.basis.sum() - 1.0) <= 1e-12);
            Vector gsum = Vector::Zero(geom.N);
            for (int a = 0; a < s.elements[q.element].node_count; ++a)
                gsum += q.basis_grad.col(a);
            CHECK(gsum.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + q.basis_grad.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("coordinate functions satisfy the gradient identities pointwise") {
    struct Case {
        ParametricGeometry geom;
        int resolution;
    };
    for (const auto& [geom, res] : {Case{make_circle(1.0), 64},
                                    Case{make_sphere(2, std::sqrt(2.0)), 6},
                                    Case{make_flat_disk(1.0, WeightMode::None), 8}}) {
        const DiscreteSpace s = build_space(geom, res, 0);
        const auto coords = coordinate_functions(s);
        REQUIRE(static_cast<int>(coords.size()) == geom.N);
        for (std::size_t q = 0; q < s.quads.size(); ++q) {
            double sum = 0.0;
            for (const auto& tf : coords) {
                const double g2 = tf.grad[q].squaredNorm();
                CHECK(g2 <= 1.0 + 1e-10);
                sum += g2;
            }
            CHECK(std::abs(sum - geom.n) <= 1e-10);
        }
        // nodal values are the ambient coordinates themselves
        for (int a = 0; a < s.node_count(); ++a)
            CHECK(coords[0].nodal[a] == doctest::Approx(s.node_positions[a][0]).epsilon(1e-15));
    }
    // on the flat disk the first coordinate has the constant gradient e_1
    const DiscreteSpace disk = build_space(make_flat_disk(1.0, WeightMode::None), 8, 0);
    const auto coords = coordinate_functions(disk);
    for (std::size_t q = 0; q < disk.quads.size(); ++q) {
        CHECK(coords[0].grad[q][0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(coords[0].grad[q][1]) <= 1e-13);
        CHECK(coords[2].grad[q].norm() <= 1e-13);
    }
}

TEST_CASE("ambient stats on built-in scenarios") {
    {
        auto s = build_space(make_sphere(2, std::sqrt(2.0)), 8, 0);
        const AmbientStats st = ambient_stats(s);
        CHECK(st.xi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(st.max_S_r == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(st.min_x_sq == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(st.vol == doctest::Approx(std::exp(-1.0) * 8.0 * kPi).epsilon(1e-3));
        CHECK(st.int_S_r == doctest::Approx(st.vol).epsilon(1e-12));
    }
    {
        auto s = build_space(make_flat_disk(1.0, WeightMode::None), 16, 0);
        const AmbientStats st = ambient_stats(s);
        CHECK(st.xi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(st.vol == doctest::Approx(kPi).epsilon(1e-3));
        // quadrature points sit at mid-edges, so the discrete minimum of
        // |x|^2 on the disk is ~(h/2)^2 rather than exactly zero
        CHECK(st.min_x_sq <= 2e-3);
    }
    {
        // a doctored sample must trip the positivity gate
        auto s = build_space(make_flat_disk(1.0, WeightMode::None), 8, 0);
        s.quads[5].curvature.newton_min_eigenvalue = -0.25;
        CHECK_THROWS_AS(ambient_stats(s), NotPositiveDefinite);
    }
}

TEST_CASE("unsupported configurations are rejected") {
    CHECK_THROWS_AS(build_space(make_sphere(3, std::sqrt(3.0)), 8, 0), UnsupportedDimension);
    CHECK_THROWS(build_space(make_circle(1.0), 3, 0));
}

TEST_CASE("nodal interpolation helpers agree with direct evaluation") {
    const DiscreteSpace s = build_space(make_flat_disk(1.0, WeightMode::None), 8, 0);
    // nodal samples of a linear function are reproduced exactly by P1
    Vector nodal(s.node_count());
    for (int a = 0; a < s.node_count(); ++a)
        nodal[a] = 2.0 * s.node_positions[a][0] - 0.5 * s.node_positions[a][1] + 0.25;
    const auto vals = values_at_quads(s, nodal);
    const auto grads = gradients_at_quads(s, nodal);
    for (std::size_t q = 0; q < s.quads.size(); ++q) {
        const Vector& x = s.quads[q].point.x;
        CHECK(vals[q] == doctest::Approx(2.0 * x[0] - 0.5 * x[1] + 0.25).epsilon(1e-13));
        CHECK(grads[q][0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(grads[q][1] == doctest::Approx(-0.5).epsilon(1e-12));
    }
}

TEST_CASE("mesh dump emits one record per entity") {
    const DiscreteSpace s = build_space(make_circle(1.0), 8, 0);
    std::ostringstream os;
    dump_mesh(s, os);
    int lines = 0;
    std::istringstream is(os.str());
    for (std::string line; std::getline(is, line);) ++lines;
    CHECK(lines == s.node_count() + static_cast<int>(s.elements.size()));
}
