// scenario.cpp

#include "sslab/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sslab/jsonout.hpp"

namespace sslab {

namespace {

constexpr double kPi = 3.14159265358979323846;
using nlohmann::json;

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("field '" + key + "' must be an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
    return v.get<std::string>();
}

GeometryKind parse_kind(const std::string& s) {
    if (s == "sphere") return GeometryKind::Sphere;
    if (s == "circle") return GeometryKind::Circle;
    if (s == "cylinder-segment") return GeometryKind::CylinderSegment;
    if (s == "spherical-cap") return GeometryKind::SphericalCap;
    if (s == "flat-domain") return GeometryKind::FlatDomain;
    throw ConfigError("unknown geometry kind '" + s + "'");
}

WeightMode parse_weight(const std::string& s) {
    if (s == "gaussian") return WeightMode::Gaussian;
    if (s == "none") return WeightMode::None;
    throw ConfigError("unknown weight mode '" + s + "' (expected gaussian|none)");
}

int intrinsic_dimension(const Scenario& s) {
    switch (s.kind) {
        case GeometryKind::Sphere: return s.dimension;
        case GeometryKind::Circle: return 1;
        case GeometryKind::CylinderSegment:
        case GeometryKind::SphericalCap: return 2;
        case GeometryKind::FlatDomain: return s.dimension;
        case GeometryKind::Custom: return s.dimension;
    }
    return s.dimension;
}

void validate(const Scenario& s) {
    const int n = intrinsic_dimension(s);
    if (s.r % 2 != 0 || s.r < 0 || s.r >= n)
        throw ConfigError("r must be an even integer with 0 <= r < n (the Newton-tensor "
                          "operator family is defined for even orders); got r = " +
                          std::to_string(s.r) + " with n = " + std::to_string(n));
    if (s.resolution < 4) throw ConfigError("resolution must be at least 4");
    if (s.eigenpair_count < 2) throw ConfigError("eigenpair_count must be at least 2");
    if (!(s.slack_rel > 0.0) || !(s.cluster_rel > 0.0))
        throw ConfigError("tolerances must be positive");
    if (s.k < 1) throw ConfigError("k must be at least 1");

    const bool closed_kind =
        s.kind == GeometryKind::Sphere || s.kind == GeometryKind::Circle;
    if (closed_kind && s.mode != BoundaryCondition::Closed)
        throw ConfigError("spheres and circles have no boundary; mode must be 'closed'");
    if (!closed_kind && s.mode != BoundaryCondition::Dirichlet)
        throw ConfigError("geometries with boundary run the Dirichlet problem; mode must be "
                          "'dirichlet'");
    if (s.kind == GeometryKind::Circle && s.dimension != 1)
        throw ConfigError("circle geometry has dimension 1");

    if (s.solver == SolverKind::Oracle) {
        if (!closed_kind)
            throw ConfigError("the analytic oracle covers spheres and circles only");
        if (s.weight != WeightMode::Gaussian || s.tensor != TensorKind::Newton)
            throw ConfigError("the analytic oracle assumes the gaussian weight and the "
                              "Newton tensor");
        if (s.radius_factor != 1.0)
            throw ConfigError("the analytic oracle covers the shrinker radius only "
                              "(radius_factor = 1)");
    } else {
        if (s.kind == GeometryKind::Sphere && s.dimension != 2)
            throw ConfigError("FEM sphere meshes exist for dimension 2; use solver='oracle' "
                              "for higher dimensions");
        if (s.kind == GeometryKind::FlatDomain && (s.dimension < 1 || s.dimension > 2))
            throw ConfigError("flat domains have dimension 1 or 2");
    }

    if (s.mode == BoundaryCondition::Closed &&
        (s.trials == TrialSetKind::Coordinates || s.trials == TrialSetKind::SingleCoordinate ||
         s.trials == TrialSetKind::Constant))
        throw ConfigError("coordinate trial inequalities require mode 'dirichlet'; closed "
                          "runs support trials = 'rotated' or 'none'");
}

Scenario parse_scenario_json(const json& doc, const std::string& origin) {
    if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");
    expect_keys(doc,
                {"name", "geometry", "r", "mode", "solver", "resolution", "eigenpair_count",
                 "tensor", "trials", "k", "delta", "tolerances", "seed"},
                origin);

    Scenario s;
    if (doc.contains("name")) s.name = as_string(doc.at("name"), "name");

    if (!doc.contains("geometry")) throw ConfigError(origin + ": missing 'geometry'");
    const json& g = doc.at("geometry");
    expect_keys(g, {"kind", "dimension", "radius_factor", "cap_angle", "cylinder_length",
                    "weight"},
                "'geometry'");
    if (!g.contains("kind")) throw ConfigError("'geometry' needs a 'kind'");
    s.kind = parse_kind(as_string(g.at("kind"), "geometry.kind"));
    if (g.contains("dimension")) s.dimension = as_int(g.at("dimension"), "geometry.dimension");
    else s.dimension = s.kind == GeometryKind::Circle ? 1 : 2;
    if (g.contains("radius_factor"))
        s.radius_factor = as_number(g.at("radius_factor"), "geometry.radius_factor");
    if (g.contains("cap_angle")) s.cap_angle = as_number(g.at("cap_angle"), "geometry.cap_angle");
    else if (s.kind == GeometryKind::SphericalCap)
        throw ConfigError("spherical-cap geometry needs 'cap_angle'");
    if (g.contains("cylinder_length"))
        s.cylinder_length = as_number(g.at("cylinder_length"), "geometry.cylinder_length");
    if (g.contains("weight")) s.weight = parse_weight(as_string(g.at("weight"), "geometry.weight"));

    if (doc.contains("r")) s.r = as_int(doc.at("r"), "r");
    if (doc.contains("mode")) {
        const std::string m = as_string(doc.at("mode"), "mode");
        if (m == "closed") s.mode = BoundaryCondition::Closed;
        else if (m == "dirichlet") s.mode = BoundaryCondition::Dirichlet;
        else throw ConfigError("mode must be 'closed' or 'dirichlet'");
    } else {
        s.mode = (s.kind == GeometryKind::Sphere || s.kind == GeometryKind::Circle)
                     ? BoundaryCondition::Closed
                     : BoundaryCondition::Dirichlet;
    }
    if (doc.contains("solver")) {
        const std::string m = as_string(doc.at("solver"), "solver");
        if (m == "fem") s.solver = SolverKind::Fem;
        else if (m == "oracle") s.solver = SolverKind::Oracle;
        else throw ConfigError("solver must be 'fem' or 'oracle'");
    }
    if (doc.contains("resolution")) s.resolution = as_int(doc.at("resolution"), "resolution");
    if (doc.contains("eigenpair_count"))
        s.eigenpair_count = as_int(doc.at("eigenpair_count"), "eigenpair_count");

    if (doc.contains("tensor")) {
        const json& t = doc.at("tensor");
        if (t.is_string()) {
            const std::string name = t.get<std::string>();
            if (name == "newton") s.tensor = TensorKind::Newton;
            else if (name == "identity") s.tensor = TensorKind::Identity;
            else throw ConfigError("tensor must be 'newton', 'identity', or {\"diag\": [...]}");
        } else if (t.is_object()) {
            expect_keys(t, {"diag"}, "'tensor'");
            if (!t.contains("diag")) throw ConfigError("tensor object needs 'diag'");
            const json& d = t.at("diag");
            if (!d.is_array() || d.empty()) throw ConfigError("tensor.diag must be an array");
            s.tensor = TensorKind::Field;
            s.tensor_constant = Matrix::Zero(d.size(), d.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                s.tensor_constant(i, i) = as_number(d[i], "tensor.diag");
        } else {
            throw ConfigError("tensor must be a string or an object");
        }
    }

    if (doc.contains("trials")) {
        const json& t = doc.at("trials");
        if (t.is_string()) {
            const std::string name = t.get<std::string>();
            if (name == "coordinates") s.trials = TrialSetKind::Coordinates;
            else if (name == "rotated") s.trials = TrialSetKind::Rotated;
            else if (name == "none") s.trials = TrialSetKind::None;
            else throw ConfigError("trials must be 'coordinates', 'rotated', 'none', "
                                   "{\"coordinate\": A} or {\"constant\": c}");
        } else if (t.is_object()) {
            expect_keys(t, {"coordinate", "constant"}, "'trials'");
            if (t.contains("coordinate")) {
                s.trials = TrialSetKind::SingleCoordinate;
                s.trial_coordinate = as_int(t.at("coordinate"), "trials.coordinate");
                if (s.trial_coordinate < 1)
                    throw ConfigError("trials.coordinate is 1-based");
            } else if (t.contains("constant")) {
                s.trials = TrialSetKind::Constant;
                s.trial_constant = as_number(t.at("constant"), "trials.constant");
            } else {
                throw ConfigError("trials object needs 'coordinate' or 'constant'");
            }
        } else {
            throw ConfigError("trials must be a string or an object");
        }
    }

    if (doc.contains("k")) s.k = as_int(doc.at("k"), "k");
    if (doc.contains("delta")) {
        const json& d = doc.at("delta");
        if (d.is_string()) {
            if (d.get<std::string>() != "auto")
                throw ConfigError("delta must be 'auto' or a positive number");
            s.delta = DeltaPolicy::best();
        } else {
            const double v = as_number(d, "delta");
            if (!(v > 0.0)) throw ConfigError("delta must be positive");
            s.delta = DeltaPolicy::fixed(v);
        }
    }
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        expect_keys(t, {"slack_rel", "cluster_rel"}, "'tolerances'");
        if (t.contains("slack_rel")) s.slack_rel = as_number(t.at("slack_rel"), "slack_rel");
        if (t.contains("cluster_rel"))
            s.cluster_rel = as_number(t.at("cluster_rel"), "cluster_rel");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
            throw ConfigError("seed must be an integer");
        s.seed = doc.at("seed").get<unsigned long>();
    }

    validate(s);
    return s;
}

ParametricGeometry make_geometry(const Scenario& s) {
    switch (s.kind) {
        case GeometryKind::Sphere:
            return make_sphere(s.dimension, s.radius_factor * std::sqrt(double(s.dimension)),
                               s.weight);
        case GeometryKind::Circle:
            return make_circle(s.radius_factor, s.weight);
        case GeometryKind::SphericalCap:
            return make_spherical_cap(s.radius_factor * std::sqrt(2.0), s.cap_angle, s.weight);
        case GeometryKind::CylinderSegment:
            return make_cylinder_segment(s.radius_factor, s.cylinder_length, s.weight);
        case GeometryKind::FlatDomain:
            return s.dimension == 1 ? make_interval(s.radius_factor * kPi, s.weight)
                                    : make_flat_disk(s.radius_factor, s.weight);
        case GeometryKind::Custom: break;
    }
    throw ConfigError("custom geometries are not scenario-drivable");
}

TensorDescriptor make_tensor(const Scenario& s) {
    switch (s.tensor) {
        case TensorKind::Newton: return TensorDescriptor::newton();
        case TensorKind::Identity: return TensorDescriptor::identity();
        case TensorKind::Field: return TensorDescriptor::constant(s.tensor_constant);
    }
    return TensorDescriptor::identity();
}

double max_shrinker_residual(const DiscreteSpace& space) {
    double worst = 0.0;
    for (const QuadSample& q : space.quads) {
        const Vector x_perp =
            q.point.normal_frame * (q.point.normal_frame.transpose() * q.point.x);
        worst = std::max(worst,
                         (space.geometry.n * q.curvature.mean_curvature + x_perp).norm());
    }
    return worst;
}

void sort_reports(std::vector<InequalityReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const InequalityReport& a, const InequalityReport& b) {
                         if (a.id != b.id) return a.id < b.id;
                         if (a.A != b.A) return a.A < b.A;
                         if (a.k != b.k) return a.k < b.k;
                         return a.trial_label < b.trial_label;
                     });
}

std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return parse_scenario_json(doc, origin);
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), path);
}

ScenarioResult run_scenario(const Scenario& scenario, RunMode mode,
                            const RunOverrides& overrides) {
    Scenario s = scenario;
    if (overrides.k) s.k = *overrides.k;
    if (overrides.force_oracle) s.solver = SolverKind::Oracle;
    validate(s);

    ScenarioResult res;
    res.scenario = s;
    res.mode = mode;

    CheckOptions opt;
    opt.delta = s.delta;
    opt.slack_rel = s.slack_rel;

    if (s.solver == SolverKind::Oracle) {
        const int n = intrinsic_dimension(s);
        res.n = n;
        res.N = n + 1;
        res.provenance = "oracle:n=" + std::to_string(n);
        opt.oracle = true;
        opt.cluster_rel = 1e-12;
        opt.provenance = res.provenance;

        const Spectrum sp = analytic_sphere_spectrum(n, s.r, s.eigenpair_count);
        res.eigenvalues = sp.values;
        res.clusters = group_multiplicities(sp, 1e-12);
        res.stats = analytic_sphere_stats(n, s.r);
        if (mode == RunMode::Audit)
            throw ConfigError("the identity audit needs FEM eigenfunctions; oracle spectra "
                              "carry none");
        if (mode == RunMode::Check)
            res.reports = check_shrinker_theorems(sp, *res.stats, n, res.N, s.k, opt);
    } else {
        const ParametricGeometry geometry = make_geometry(s);
        const DiscreteSpace space = build_space(geometry, s.resolution, s.r);
        const TensorDescriptor tensor = make_tensor(s);
        const WeightedOperatorPair pair = assemble_pair(space, tensor, s.weight, s.mode);
        const WeightedOperatorPair pair_identity =
            assemble_pair(space, TensorDescriptor::identity(), s.weight, s.mode);
        const Spectrum spectrum = solve_spectrum(pair, s.eigenpair_count);

        res.n = geometry.n;
        res.N = geometry.N;
        res.provenance = "fem:" + std::to_string(s.resolution);
        opt.oracle = false;
        opt.cluster_rel = s.cluster_rel;
        opt.provenance = res.provenance;

        res.eigenvalues = spectrum.values;
        res.orthonormality_defect = spectrum.orthonormality_defect;
        res.clusters = group_multiplicities(spectrum, s.cluster_rel);
        res.stats = ambient_stats(space);
        res.shrinker_residual_max = max_shrinker_residual(space);

        if (mode == RunMode::Check) {
            const bool shrinker_setting = s.weight == WeightMode::Gaussian &&
                                          s.tensor == TensorKind::Newton &&
                                          res.shrinker_residual_max <= 1e-8;
            if (shrinker_setting) {
                const auto thms = check_shrinker_theorems(spectrum, *res.stats, res.n, res.N,
                                                          s.k, opt);
                res.reports.insert(res.reports.end(), thms.begin(), thms.end());
            } else {
                res.notes.push_back(
                    "self-shrinker theorems skipped: scenario is not in the gaussian "
                    "Newton-tensor shrinker setting");
            }

            if (s.mode == BoundaryCondition::Dirichlet) {
                const auto run_trial = [&](const TrialFunction& h) {
                    const auto reps = check_general(spectrum, space, pair, pair_identity, h,
                                                    s.k, opt);
                    res.reports.insert(res.reports.end(), reps.begin(), reps.end());
                };
                if (s.trials == TrialSetKind::Coordinates) {
                    for (const auto& h : coordinate_functions(space)) run_trial(h);
                } else if (s.trials == TrialSetKind::SingleCoordinate) {
                    const auto coords = coordinate_functions(space);
                    if (s.trial_coordinate > res.N)
                        throw ConfigError("trials.coordinate exceeds the ambient dimension");
                    run_trial(coords[s.trial_coordinate - 1]);
                } else if (s.trials == TrialSetKind::Constant) {
                    TrialFunction h;
                    h.label = "constant";
                    h.nodal = Vector::Constant(space.node_count(), s.trial_constant);
                    h.grad.assign(space.quads.size(), Vector::Zero(res.N));
                    run_trial(h);
                }
            }
            if (s.trials == TrialSetKind::Rotated) {
                const TrialRotationMode rmode = s.mode == BoundaryCondition::Dirichlet
                                                    ? TrialRotationMode::DirichletGap
                                                    : TrialRotationMode::Closed;
                // Dirichlet bounds reach lambda_{A+1}, closed bounds lambda_A;
                // either way the spectrum must hold eigenpair_count entries.
                const int a_max = std::min(res.N, s.eigenpair_count - 1);
                const RotatedTrials rt =
                    build_orthogonalized_trials(spectrum, space, pair, rmode, a_max);
                res.rotation_defect = rt.orthogonality_defect;
                const auto reps =
                    check_gap_bounds(spectrum, space, pair, pair_identity, rt, opt);
                res.reports.insert(res.reports.end(), reps.begin(), reps.end());
            }
            sort_reports(res.reports);
        } else if (mode == RunMode::Audit) {
            const auto coords = coordinate_functions(space);
            TrialFunction h;
            if (s.trials == TrialSetKind::SingleCoordinate) {
                if (s.trial_coordinate > res.N)
                    throw ConfigError("trials.coordinate exceeds the ambient dimension");
                h = coords[s.trial_coordinate - 1];
            } else if (s.trials == TrialSetKind::Constant) {
                h.label = "constant";
                h.nodal = Vector::Constant(space.node_count(), s.trial_constant);
                h.grad.assign(space.quads.size(), Vector::Zero(res.N));
            } else {
                h = coords[0];
            }
            const int slots = s.mode == BoundaryCondition::Dirichlet
                                  ? s.eigenpair_count - 1
                                  : s.eigenpair_count - 2;
            const int k_eff = std::max(1, std::min(s.k, slots));
            const ProofIntermediates pi =
                trial_moments(spectrum, space, pair, pair_identity, h, k_eff);
            res.audit = audit_identities(pi);
            res.audit_filled = true;

            // seeded random self-adjointness witness
            std::mt19937_64 rng(s.seed);
            std::normal_distribution<double> dist;
            Vector u(pair.free_count()), v(pair.free_count());
            for (int i = 0; i < pair.free_count(); ++i) {
                u[i] = dist(rng);
                v[i] = dist(rng);
            }
            const double norm_k = pair.stiffness.cwiseAbs().maxCoeff();
            res.witness_defect =
                std::abs(u.dot(pair.stiffness * v) - v.dot(pair.stiffness * u)) /
                std::max(norm_k * u.norm() * v.norm(), 1e-300);
            IdentityAudit::Entry witness{"self_adjointness_witness", res.witness_defect,
                                         1e-12, res.witness_defect <= 1e-12, false};
            res.audit.entries.push_back(witness);
            res.audit.all_pass = res.audit.all_pass && witness.pass;
        }
    }

    for (const auto& rep : res.reports) {
        if (rep.pass) ++res.passed;
        else ++res.failed;
        const double rel = rep.rhs != 0.0 ? rep.slack / std::abs(rep.rhs) : rep.slack;
        res.worst_slack_rel = std::min(res.worst_slack_rel, rel);
    }
    if (res.audit_filled) {
        for (const auto& e : res.audit.entries) {
            if (e.diagnostic) continue;
            if (e.pass) ++res.passed;
            else ++res.failed;
        }
    }
    return res;
}

void write_eigenvalue_csv(const ScenarioResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "index,lambda,cluster_id,multiplicity\n";
    for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
        const int cid = i < result.clusters.cluster_of.size() ? result.clusters.cluster_of[i] : -1;
        const int mult = cid >= 0 ? result.clusters.clusters[cid].multiplicity : 0;
        out << i << ',' << json_number(result.eigenvalues[i]) << ',' << cid << ',' << mult
            << '\n';
    }
}

void write_report_json(const ScenarioResult& result, const std::string& path) {
    JsonWriter w;
    w.begin_object();
    w.key("scenario");
    w.value(result.scenario.name);
    w.key("provenance");
    w.value(result.provenance);
    w.key("geometry");
    w.begin_object();
    w.key("kind");
    w.value(to_string(result.scenario.kind));
    w.key("n");
    w.value(result.n);
    w.key("N");
    w.value(result.N);
    w.key("weight");
    w.value(to_string(result.scenario.weight));
    w.end_object();
    w.key("r");
    w.value(result.scenario.r);
    w.key("mode");
    w.value(result.scenario.mode == BoundaryCondition::Closed ? "closed" : "dirichlet");
    w.key("resolution");
    w.value(result.scenario.resolution);
    w.key("eigenpair_count");
    w.value(result.scenario.eigenpair_count);
    w.key("seed");
    w.value(result.scenario.seed);

    if (result.stats) {
        w.key("stats");
        w.begin_object();
        w.key("r");
        w.value(result.stats->r);
        w.key("xi");
        w.value(result.stats->xi);
        w.key("max_S_r");
        w.value(result.stats->max_S_r);
        w.key("min_x_sq");
        w.value(result.stats->min_x_sq);
        w.key("vol");
        w.value(result.stats->vol);
        w.key("int_S_r");
        w.value(result.stats->int_S_r);
        w.key("note");
        w.value("discrete extrema under-approximate continuum extrema");
        w.end_object();
    }
    if (std::isfinite(result.shrinker_residual_max)) {
        w.key("shrinker_residual_max");
        w.value(result.shrinker_residual_max);
    }
    if (std::isfinite(result.rotation_defect)) {
        w.key("rotation_defect");
        w.value(result.rotation_defect);
    }

    w.key("spectrum");
    w.begin_object();
    w.key("values");
    w.begin_array();
    for (double v : result.eigenvalues) w.value(v);
    w.end_array();
    w.key("orthonormality_defect");
    w.value(result.orthonormality_defect);
    w.end_object();

    w.key("clusters");
    w.begin_array();
    for (const auto& c : result.clusters.clusters) {
        w.begin_object();
        w.key("value");
        w.value(c.value);
        w.key("multiplicity");
        w.value(c.multiplicity);
        w.key("first");
        w.value(c.first);
        w.key("last");
        w.value(c.last);
        w.end_object();
    }
    w.end_array();

    w.key("reports");
    w.begin_array();
    for (const auto& rep : result.reports) {
        w.begin_object();
        w.key("id");
        w.value(rep.id);
        w.key("lhs");
        w.value(rep.lhs);
        w.key("rhs");
        w.value(rep.rhs);
        w.key("slack");
        w.value(rep.slack);
        w.key("pass");
        w.value(rep.pass);
        w.key("slack_rel_tol");
        w.value(rep.slack_rel_tol);
        w.key("equality_detected");
        w.value(rep.equality_detected);
        if (rep.k >= 0) {
            w.key("k");
            w.value(rep.k);
        }
        if (rep.A >= 0) {
            w.key("A");
            w.value(rep.A);
        }
        w.key("r");
        w.value(rep.r);
        w.key("n");
        w.value(rep.n);
        w.key("N");
        w.value(rep.N);
        if (std::isfinite(rep.delta)) {
            w.key("delta");
            w.value(rep.delta);
        }
        if (std::isfinite(rep.xi)) {
            w.key("xi");
            w.value(rep.xi);
        }
        if (std::isfinite(rep.max_S_r)) {
            w.key("max_S_r");
            w.value(rep.max_S_r);
        }
        if (std::isfinite(rep.min_x_sq)) {
            w.key("min_x_sq");
            w.value(rep.min_x_sq);
        }
        if (std::isfinite(rep.vol)) {
            w.key("vol");
            w.value(rep.vol);
        }
        if (std::isfinite(rep.implied_next_bound)) {
            w.key("implied_next_bound");
            w.value(rep.implied_next_bound);
        }
        if (!rep.trial_label.empty()) {
            w.key("trial");
            w.value(rep.trial_label);
        }
        w.key("provenance");
        w.value(rep.provenance);
        if (!rep.note.empty()) {
            w.key("note");
            w.value(rep.note);
        }
        w.end_object();
    }
    w.end_array();

    if (result.audit_filled) {
        w.key("audit");
        w.begin_array();
        for (const auto& e : result.audit.entries) {
            w.begin_object();
            w.key("check");
            w.value(e.check);
            w.key("defect_rel");
            w.value(e.defect_rel);
            if (!e.diagnostic) {
                w.key("tol");
                w.value(e.tol);
            }
            w.key("pass");
            w.value(e.pass);
            w.key("diagnostic");
            w.value(e.diagnostic);
            w.end_object();
        }
        w.end_array();
    }

    if (!result.notes.empty()) {
        w.key("notes");
        w.begin_array();
        for (const auto& n : result.notes) w.value(n);
        w.end_array();
    }

    w.key("summary");
    w.begin_object();
    w.key("total");
    w.value(result.passed + result.failed);
    w.key("passed");
    w.value(result.passed);
    w.key("failed");
    w.value(result.failed);
    w.key("worst_slack_rel");
    w.value(std::isfinite(result.worst_slack_rel) ? result.worst_slack_rel : 0.0);
    w.end_object();

    w.end_object();

    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << w.str() << '\n';
}

std::string summary_text(const ScenarioResult& result) {
    std::ostringstream os;
    os << "scenario " << (result.scenario.name.empty() ? "(unnamed)" : result.scenario.name)
       << "  [" << result.provenance << "]\n";
    os << "geometry " << to_string(result.scenario.kind) << " n=" << result.n
       << " N=" << result.N << " weight=" << to_string(result.scenario.weight)
       << " r=" << result.scenario.r << " mode="
       << (result.scenario.mode == BoundaryCondition::Closed ? "closed" : "dirichlet") << "\n";

    os << "eigenvalues:";
    const std::size_t shown = std::min<std::size_t>(result.eigenvalues.size(), 12);
    for (std::size_t i = 0; i < shown; ++i) os << ' ' << format_g6(result.eigenvalues[i]);
    if (shown < result.eigenvalues.size()) os << " ...";
    os << "\n";

    os << "clusters:";
    for (const auto& c : result.clusters.clusters)
        os << " {" << format_g6(c.value) << " x" << c.multiplicity << "}";
    os << "\n";

    if (result.stats) {
        os << "stats: xi=" << format_g6(result.stats->xi)
           << " max_S_r=" << format_g6(result.stats->max_S_r)
           << " min|x|^2=" << format_g6(result.stats->min_x_sq)
           << " vol=" << format_g6(result.stats->vol)
           << " int_S_r=" << format_g6(result.stats->int_S_r)
           << "  (discrete extrema under-approximate continuum extrema)\n";
    }
    if (std::isfinite(result.shrinker_residual_max))
        os << "shrinker residual max = " << format_g6(result.shrinker_residual_max) << "\n";
    if (std::isfinite(result.rotation_defect))
        os << "rotation defect = " << format_g6(result.rotation_defect) << "\n";

    for (const auto& rep : result.reports) {
        os << rep.id;
        if (rep.k >= 0) os << " k=" << rep.k;
        if (rep.A >= 0) os << " A=" << rep.A;
        if (!rep.trial_label.empty()) os << " h=" << rep.trial_label;
        if (std::isfinite(rep.delta)) os << " delta=" << format_g6(rep.delta);
        os << ": lhs=" << format_g6(rep.lhs) << " rhs=" << format_g6(rep.rhs)
           << " slack=" << format_g6(rep.slack) << (rep.pass ? " PASS" : " FAIL");
        if (rep.equality_detected) os << " (equality)";
        if (std::isfinite(rep.implied_next_bound))
            os << "; implied lambda_" << rep.k + 1 << " bound = "
               << format_g6(rep.implied_next_bound);
        os << "\n";
    }

    if (result.audit_filled) {
        for (const auto& e : result.audit.entries) {
            os << "audit " << e.check << ": defect=" << format_g6(e.defect_rel);
            if (e.diagnostic)
                os << " (diagnostic)";
            else
                os << " tol=" << format_g6(e.tol) << (e.pass ? " PASS" : " FAIL");
            os << "\n";
        }
    }
    for (const auto& n : result.notes) os << "note: " << n << "\n";

    os << "summary: " << result.passed << "/" << (result.passed + result.failed)
       << " passed";
    if (std::isfinite(result.worst_slack_rel))
        os << ", worst relative slack " << format_g6(result.worst_slack_rel);
    os << "\n";
    return os.str();
}

SweepResult sweep(const Scenario& scenario, const std::vector<int>& resolutions) {
    if (resolutions.size() < 2)
        throw ConfigError("sweep needs at least two resolutions");
    std::vector<int> sorted = resolutions;
    std::sort(sorted.begin(), sorted.end());

    SweepResult out;
    const bool closed = scenario.mode == BoundaryCondition::Closed;
    for (int res : sorted) {
        Scenario s = scenario;
        s.resolution = res;
        s.eigenpair_count = std::max(s.eigenpair_count, closed ? 7 : 6);
        const ScenarioResult r = run_scenario(s, RunMode::Check);
        SweepRow row;
        row.resolution = res;
        for (int m = 1; m <= 5; ++m) {
            const std::size_t idx = closed ? m : m - 1;
            row.lambdas.push_back(idx < r.eigenvalues.size() ? r.eigenvalues[idx] : 0.0);
        }
        row.worst_slack_rel = std::isfinite(r.worst_slack_rel) ? r.worst_slack_rel : 0.0;
        row.all_pass = r.failed == 0;
        if (!row.all_pass) ++out.failed;
        out.rows.push_back(row);
    }

    if (out.rows.size() >= 3) {
        const auto& r1 = out.rows[out.rows.size() - 3];
        const auto& r2 = out.rows[out.rows.size() - 2];
        const auto& r3 = out.rows[out.rows.size() - 1];
        const double ratio = double(r2.resolution) / r1.resolution;
        for (int m = 0; m < 5; ++m) {
            const double d1 = std::abs(r1.lambdas[m] - r2.lambdas[m]);
            const double d2 = std::abs(r2.lambdas[m] - r3.lambdas[m]);
            const double floor_ref = 1e-13 * std::max(1.0, std::abs(r3.lambdas[m]));
            if (d2 <= floor_ref || d1 <= floor_ref) {
                out.orders.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            const double order = std::log(d1 / d2) / std::log(ratio);
            out.orders.push_back(order);
            if (order < 1.5) out.order_suspicious = true;
        }
    }
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "resolution,lambda_1,lambda_2,lambda_3,lambda_4,lambda_5,worst_slack_rel,all_pass\n";
    for (const auto& row : result.rows) {
        os << row.resolution;
        for (double l : row.lambdas) os << ',' << json_number(l);
        os << ',' << json_number(row.worst_slack_rel) << ',' << (row.all_pass ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sweep_summary(const SweepResult& result) {
    std::ostringstream os;
    os << "resolution | lambda_1..lambda_5 | worst slack (rel) | pass\n";
    for (const auto& row : result.rows) {
        os << row.resolution << " |";
        for (double l : row.lambdas) os << ' ' << format_g6(l);
        os << " | " << format_g6(row.worst_slack_rel) << " | "
           << (row.all_pass ? "yes" : "NO") << "\n";
    }
    if (!result.orders.empty()) {
        os << "observed convergence order per mode:";
        for (double o : result.orders)
            os << ' ' << (std::isfinite(o) ? format_g6(o) : std::string("n/a"));
        os << "\n";
        if (result.order_suspicious)
            os << "WARNING: observed order below 1.5; discretization suspicious\n";
    }
    return os.str();
}

} // namespace sslab
