#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sslab/inequalities.hpp"

using namespace sslab;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Pipeline {
    DiscreteSpace space;
    WeightedOperatorPair pair;
    WeightedOperatorPair pair_identity;
    Spectrum spectrum;
};

Pipeline run_pipeline(const ParametricGeometry& geom, int resolution, int r,
                      const TensorDescriptor& tensor, BoundaryCondition bc, int count) {
    Pipeline p;
    p.space = build_space(geom, resolution, r);
    p.pair = assemble_pair(p.space, tensor, geom.weight_mode, bc);
    p.pair_identity = assemble_pair(p.space, TensorDescriptor::identity(), geom.weight_mode, bc);
    p.spectrum = solve_spectrum(p.pair, count);
    return p;
}

const IdentityAudit::Entry& entry(const IdentityAudit& audit, const std::string& name) {
    for (const auto& e : audit.entries)
        if (e.check == name) return e;
    throw std::runtime_error("no audit entry " + name);
}

} // namespace

TEST_CASE("moment identities hold at solver precision on the circle") {
    const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 256, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Closed, 8);
    const auto coords = coordinate_functions(p.space);
    const ProofIntermediates pi =
        trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 6);

    // a is symmetric by construction of the weighted mass matrix
    CHECK((pi.a - pi.a.transpose()).cwiseAbs().maxCoeff() <= 1e-10);

    const IdentityAudit audit = audit_identities(pi);
    CHECK(audit.all_pass);
    CHECK(entry(audit, "b_lambda_relation").defect_rel <= 1e-8);
    CHECK(entry(audit, "b_antisymmetry").defect_rel <= 1e-8);
    CHECK(entry(audit, "c_antisymmetry").defect_rel <= 1e-8);
    CHECK(entry(audit, "stokes_identity").defect_rel <= 1e-10);
}

TEST_CASE("moment identities hold on the Dirichlet interval") {
    const Pipeline p = run_pipeline(make_interval(kPi, WeightMode::None), 256, 0,
                                    TensorDescriptor::identity(), BoundaryCondition::Dirichlet, 8);
    const auto coords = coordinate_functions(p.space);
    const IdentityAudit audit = audit_identities(
        trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 6));
    CHECK(audit.all_pass);
}

TEST_CASE("constant trials produce diagonal a and vanishing b, c, P") {
    const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 128, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
    TrialFunction h;
    h.label = "constant";
    h.nodal = Vector::Constant(p.space.node_count(), 2.5);
    h.grad.assign(p.space.quads.size(), Vector::Zero(2));
    const ProofIntermediates pi =
        trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, h, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j)
                CHECK(pi.a(i, i) == doctest::Approx(2.5).epsilon(1e-9));
            else
                CHECK(std::abs(pi.a(i, j)) <= 1e-9);
        }
    CHECK(pi.b.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(pi.c.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(pi.P.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("identity tensor collapses b to twice c") {
    const Pipeline p =
        run_pipeline(make_flat_disk(1.0, WeightMode::Gaussian), 12, 0,
                     TensorDescriptor::identity(), BoundaryCondition::Dirichlet, 6);
    const auto coords = coordinate_functions(p.space);
    const ProofIntermediates pi =
        trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 4);
    CHECK((pi.b - 2.0 * pi.c).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + pi.b.cwiseAbs().maxCoeff()));
}

TEST_CASE("sampled-moment drift degrades on a coarse mesh") {
    auto drift = [](int resolution) {
        const Pipeline p =
            run_pipeline(make_circle(1.0, WeightMode::Gaussian), resolution, 0,
                         TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
        const auto coords = coordinate_functions(p.space);
        const IdentityAudit audit = audit_identities(
            trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 3));
        CHECK(audit.all_pass); // the consistent identities never degrade
        return entry(audit, "galerkin_drift_b").defect_rel;
    };
    const double coarse = drift(8);
    const double fine = drift(128);
    CHECK(coarse > 10.0 * fine);
    CHECK(fine <= 1e-3);
}

TEST_CASE("general inequalities on the unweighted disk (identity tensor)") {
    const Pipeline p =
        run_pipeline(make_flat_disk(1.0, WeightMode::None), 16, 0,
                     TensorDescriptor::identity(), BoundaryCondition::Dirichlet, 8);
    const auto coords = coordinate_functions(p.space);
    CheckOptions opt;
    opt.provenance = "fem:16";
    const auto reports =
        check_general(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 4, opt);
    REQUIRE(reports.size() == 2);
    for (const auto& rep : reports) {
        CHECK(rep.pass);
        CHECK(rep.slack >= -1e-3 * rep.rhs);
        CHECK(std::isfinite(rep.slack));
    }
    CHECK(reports[0].id == "thm21-2.2");
    CHECK(reports[1].id == "thm21-2.3");
}

TEST_CASE("general inequalities on the gaussian disk with an anisotropic tensor") {
    Matrix t(2, 2);
    t << 2.0, 0.0, 0.0, 1.0;
    const Pipeline p =
        run_pipeline(make_flat_disk(1.0, WeightMode::Gaussian), 16, 0,
                     TensorDescriptor::constant(t), BoundaryCondition::Dirichlet, 8);
    const auto coords = coordinate_functions(p.space);
    for (double deltas : {0.5, -1.0, 2.0}) { // -1 means automatic
        CheckOptions opt;
        opt.delta = deltas < 0 ? DeltaPolicy::best() : DeltaPolicy::fixed(deltas);
        const auto reports =
            check_general(p.spectrum, p.space, p.pair, p.pair_identity, coords[1], 3, opt);
        for (const auto& rep : reports) CHECK(rep.pass);
    }
}

TEST_CASE("trial scaling moves both sides of the quadratic inequality by s^2") {
    const Pipeline p =
        run_pipeline(make_flat_disk(1.0, WeightMode::None), 12, 0,
                     TensorDescriptor::identity(), BoundaryCondition::Dirichlet, 6);
    const auto coords = coordinate_functions(p.space);
    TrialFunction scaled = coords[0];
    scaled.nodal *= 3.0;
    for (auto& g : scaled.grad) g *= 3.0;
    CheckOptions opt;
    const auto base = check_general(p.spectrum, p.space, p.pair, p.pair_identity,
                                    coords[0], 3, opt);
    const auto big = check_general(p.spectrum, p.space, p.pair, p.pair_identity,
                                   scaled, 3, opt);
    CHECK(big[0].lhs == doctest::Approx(9.0 * base[0].lhs).epsilon(1e-12));
    CHECK(big[0].rhs == doctest::Approx(9.0 * base[0].rhs).epsilon(1e-12));
}

TEST_CASE("automatic delta beats its perturbations") {
    Matrix t(2, 2);
    t << 2.0, 0.3, 0.3, 1.0;
    const Pipeline p =
        run_pipeline(make_flat_disk(1.0, WeightMode::Gaussian), 12, 0,
                     TensorDescriptor::constant(t), BoundaryCondition::Dirichlet, 6);
    const auto coords = coordinate_functions(p.space);
    CheckOptions opt;
    const auto best = check_general(p.spectrum, p.space, p.pair, p.pair_identity,
                                    coords[0], 3, opt)[1];
    for (double factor : {0.5, 2.0}) {
        CheckOptions perturbed;
        perturbed.delta = DeltaPolicy::fixed(best.delta * factor);
        const auto rep = check_general(p.spectrum, p.space, p.pair, p.pair_identity,
                                       coords[0], 3, perturbed)[1];
        CHECK(best.rhs <= rep.rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("rotated trials: orthogonal matrix and vanishing moments") {
    {
        const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 128, 0,
                                        TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
        const RotatedTrials rt = build_orthogonalized_trials(p.spectrum, p.space, p.pair,
                                                             TrialRotationMode::Closed, 2);
        CHECK((rt.O * rt.O.transpose() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
              1e-12);
        CHECK(rt.orthogonality_defect <= 1e-10);
        // verify the moment condition directly: int h_2 u_0 u_1 dmu = 0
        const auto u0 = values_at_quads(p.space, p.pair.extend(p.spectrum.eigenfunction(0)));
        const auto u1 = values_at_quads(p.space, p.pair.extend(p.spectrum.eigenfunction(1)));
        const auto h2 = values_at_quads(p.space, rt.trials[1].nodal);
        double moment = 0.0;
        for (std::size_t q = 0; q < p.space.quads.size(); ++q)
            moment += p.space.quads[q].weight * h2[q] * u0[q] * u1[q];
        CHECK(std::abs(moment) <= 1e-10);
    }
    {
        const Pipeline p = run_pipeline(make_sphere(2, std::sqrt(2.0)), 6, 0,
                                        TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
        const RotatedTrials rt = build_orthogonalized_trials(p.spectrum, p.space, p.pair,
                                                             TrialRotationMode::Closed, 3);
        CHECK((rt.O * rt.O.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <=
              1e-12);
        CHECK(rt.orthogonality_defect <= 1e-9);
    }
}

TEST_CASE("gap bounds on the closed circle sit at near equality") {
    const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 256, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
    const RotatedTrials rt = build_orthogonalized_trials(p.spectrum, p.space, p.pair,
                                                         TrialRotationMode::Closed, 2);
    CheckOptions opt;
    const auto reports =
        check_gap_bounds(p.spectrum, p.space, p.pair, p.pair_identity, rt, opt);
    REQUIRE(reports.size() == 4);
    for (const auto& rep : reports) {
        CHECK(rep.pass);
        CHECK(rep.slack >= -1e-3 * rep.rhs);
        // harmonic coordinates achieve the bound on the circle
        CHECK(std::abs(rep.slack) <= 1e-2 * rep.rhs);
    }
}

TEST_CASE("gap bounds on the Dirichlet cap hold with positive slack") {
    const Pipeline p = run_pipeline(make_spherical_cap(std::sqrt(2.0), kPi / 3.0), 16, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Dirichlet, 8);
    const RotatedTrials rt = build_orthogonalized_trials(p.spectrum, p.space, p.pair,
                                                         TrialRotationMode::DirichletGap, 3);
    CHECK(rt.orthogonality_defect <= 1e-9);
    CheckOptions opt;
    const auto reports =
        check_gap_bounds(p.spectrum, p.space, p.pair, p.pair_identity, rt, opt);
    REQUIRE(reports.size() == 6);
    for (const auto& rep : reports) CHECK(rep.pass);
}

TEST_CASE("shrinker theorems: FEM circle reproduces the closed equalities") {
    const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 256, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Closed, 6);
    const AmbientStats stats = ambient_stats(p.space);
    CheckOptions opt;
    opt.provenance = "fem:256";
    const auto reports = check_shrinker_theorems(p.spectrum, stats, 1, 2, 0, opt);
    REQUIRE(reports.size() == 4);

    const auto& lam1 = reports[0];
    CHECK(lam1.id == "thm12-lambda1");
    CHECK(lam1.lhs >= 0.999);
    CHECK(lam1.lhs <= 1.005);
    CHECK(lam1.slack >= -1e-2);
    CHECK(lam1.pass);

    const auto& sumsqrt = reports[1];
    CHECK(sumsqrt.id == "thm12-sumsqrt");
    CHECK(sumsqrt.pass);
    CHECK(sumsqrt.equality_detected); // multiplicity 2 = N
}

TEST_CASE("shrinker theorems: sphere oracle equalities are exact") {
    {
        const Spectrum sp = analytic_sphere_spectrum(2, 0, 8);
        const AmbientStats stats = analytic_sphere_stats(2, 0);
        CheckOptions opt;
        opt.oracle = true;
        opt.cluster_rel = 1e-12;
        opt.provenance = "oracle:n=2";
        const auto reports = check_shrinker_theorems(sp, stats, 2, 3, 0, opt);
        const auto& sumsqrt = reports[1];
        CHECK(sumsqrt.lhs == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(sumsqrt.rhs == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(std::abs(sumsqrt.slack) <= 1e-12 * sumsqrt.rhs);
        CHECK(sumsqrt.equality_detected);
        CHECK(reports[0].slack == doctest::Approx(0.0).epsilon(1e-13)); // lambda_1 = 1
        CHECK(reports[0].equality_detected);
    }
    {
        const Spectrum sp = analytic_sphere_spectrum(3, 2, 10);
        const AmbientStats stats = analytic_sphere_stats(3, 2);
        CheckOptions opt;
        opt.oracle = true;
        opt.cluster_rel = 1e-12;
        const auto reports = check_shrinker_theorems(sp, stats, 3, 4, 0, opt);
        const auto& cor1 = reports[2];
        CHECK(cor1.id == "cor13-first");
        CHECK(cor1.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
        CHECK(std::abs(cor1.slack) <= 1e-12 * std::abs(cor1.rhs));
        CHECK(cor1.equality_detected);
        const auto& cor2 = reports[3];
        CHECK(cor2.id == "cor13-nth");
        CHECK(cor2.pass);
        CHECK(cor2.slack > 0.1 * cor2.rhs); // strictly away from equality
        CHECK(!cor2.equality_detected);
        // advisory note on the r > 0 first-eigenvalue bound
        CHECK(!reports[0].note.empty());
    }
}

TEST_CASE("shrinker theorems: Dirichlet cap bounds hold, equality flags stay off") {
    const Pipeline p = run_pipeline(make_spherical_cap(std::sqrt(2.0), kPi / 3.0), 16, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Dirichlet, 8);
    const AmbientStats stats = ambient_stats(p.space);
    CheckOptions opt;
    opt.provenance = "fem:16";
    for (int k : {1, 2, 3, 5}) {
        const auto reports = check_shrinker_theorems(p.spectrum, stats, 2, 3, k, opt);
        REQUIRE(reports.size() == 2);
        CHECK(reports[0].id == "thm11-quadratic");
        CHECK(reports[0].pass);
        CHECK(!reports[0].equality_detected);
        // the implied bound is a valid ceiling for the next eigenvalue
        CHECK(reports[0].implied_next_bound >= p.spectrum.lambda(k + 1) * (1.0 - 1e-10));
        CHECK(reports[1].id == "thm11-sqrt");
        CHECK(reports[1].pass);
        CHECK(!reports[1].equality_detected);
    }
}

TEST_CASE("shrinker theorems: cylinder segment satisfies the Dirichlet bounds") {
    const Pipeline p = run_pipeline(make_cylinder_segment(1.0, 1.0), 32, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Dirichlet, 8);
    const AmbientStats stats = ambient_stats(p.space);
    CHECK(stats.min_x_sq == doctest::Approx(1.0).epsilon(1e-10));
    CheckOptions opt;
    const auto reports = check_shrinker_theorems(p.spectrum, stats, 2, 3, 4, opt);
    for (const auto& rep : reports) {
        CHECK(rep.pass);
        CHECK(!rep.equality_detected);
    }
}

TEST_CASE("error paths of the inequality layer") {
    const Spectrum oracle = analytic_sphere_spectrum(2, 0, 6);
    const Pipeline p = run_pipeline(make_circle(1.0, WeightMode::Gaussian), 32, 0,
                                    TensorDescriptor::newton(), BoundaryCondition::Closed, 4);
    const auto coords = coordinate_functions(p.space);
    CHECK_THROWS_AS(trial_moments(oracle, p.space, p.pair, p.pair_identity, coords[0], 2),
                    OracleSpectrum);
    CheckOptions opt;
    // general inequalities are a Dirichlet statement
    CHECK_THROWS(check_general(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 2, opt));
    // not enough eigenpairs
    CHECK_THROWS_AS(trial_moments(p.spectrum, p.space, p.pair, p.pair_identity, coords[0], 4),
                    InsufficientSpectrum);
}
