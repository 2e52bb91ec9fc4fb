// scenario.hpp
//
// Scenario-driven pipeline: parse a JSON configuration, run geometry ->
// discretization -> assembly -> spectrum -> inequality checks, and emit
// eigenvalue CSV, report JSON, and a human-readable summary. Also provides
// the resolution sweep used for convergence studies.

#ifndef SSLAB_SCENARIO_HPP
#define SSLAB_SCENARIO_HPP

#include <optional>

#include "sslab/inequalities.hpp"

namespace sslab {

enum class TrialSetKind { Coordinates, Rotated, SingleCoordinate, Constant, None };
enum class SolverKind { Fem, Oracle };

struct Scenario {
    std::string name;

    GeometryKind kind = GeometryKind::Circle;
    int dimension = 1;
    double radius_factor = 1.0;
    double cap_angle = 0.0;
    double cylinder_length = 1.0;
    WeightMode weight = WeightMode::Gaussian;

    int r = 0;
    BoundaryCondition mode = BoundaryCondition::Closed;
    SolverKind solver = SolverKind::Fem;
    int resolution = 64;
    int eigenpair_count = 12;

    TensorKind tensor = TensorKind::Newton;
    Matrix tensor_constant; // for TensorKind::Field

    TrialSetKind trials = TrialSetKind::None;
    int trial_coordinate = 1;      // 1-based, SingleCoordinate
    double trial_constant = 1.0;   // Constant

    int k = 4;
    DeltaPolicy delta = DeltaPolicy::best();
    double slack_rel = 1e-3;
    double cluster_rel = 1e-3;
    unsigned long seed = 0;
};

// Strict parser: unknown keys and malformed values raise ConfigError with
// the offending key in the message.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin);

enum class RunMode { SpectrumOnly, Check, Audit };

struct ScenarioResult {
    Scenario scenario;
    RunMode mode = RunMode::Check;
    std::string provenance;
    int n = 0;
    int N = 0;
    std::vector<double> eigenvalues;
    double orthonormality_defect = 0.0;
    MultiplicityClusters clusters;
    std::optional<AmbientStats> stats;
    double shrinker_residual_max = std::numeric_limits<double>::quiet_NaN();
    double rotation_defect = std::numeric_limits<double>::quiet_NaN();
    std::vector<InequalityReport> reports;
    IdentityAudit audit; // filled in Audit mode
    bool audit_filled = false;
    double witness_defect = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> notes;

    int passed = 0;
    int failed = 0;
    double worst_slack_rel = std::numeric_limits<double>::infinity();

    int exit_code() const { return failed > 0 ? 1 : 0; }
};

// Overrides applied from the command line.
struct RunOverrides {
    std::optional<int> k;
    bool force_oracle = false;
};

ScenarioResult run_scenario(const Scenario& scenario, RunMode mode,
                            const RunOverrides& overrides = {});

void write_eigenvalue_csv(const ScenarioResult& result, const std::string& path);
void write_report_json(const ScenarioResult& result, const std::string& path);
std::string summary_text(const ScenarioResult& result);

struct SweepRow {
    int resolution = 0;
    std::vector<double> lambdas; // lambda_1..lambda_5 (problem indexing)
    double worst_slack_rel = 0.0;
    bool all_pass = true;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<double> orders; // observed convergence order per mode 1..5
    bool order_suspicious = false;
    int failed = 0;
};

// Runs the scenario at each resolution (ascending); needs at least two.
SweepResult sweep(const Scenario& scenario, const std::vector<int>& resolutions);
std::string sweep_csv(const SweepResult& result);
std::string sweep_summary(const SweepResult& result);

} // namespace sslab

#endif
