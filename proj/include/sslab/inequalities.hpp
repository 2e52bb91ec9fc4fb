// inequalities.hpp
//
// Checkers for the universal eigenvalue bounds of the weighted
// divergence-form operator: the general trial-function inequalities, the
// Gram-Schmidt-rotated coordinate gap bounds, and the self-shrinker
// theorems (Dirichlet quadratic bound, square-root gap bound, the closed
// bounds lambda_1 <= 1 and the sum-of-square-roots bound with its
// corollaries). Also computes the proof-internal moment matrices and audits
// their algebraic identities.
//
// Moment conventions: the discrete operator L = -M^{-1}K is self-adjoint in
// the mass inner product, multiplication by a trial h acts through the
// weighted mass matrix H = M^{-1}M_h, and the moments a, b, c are assembled
// from these operators. This realizes the integration-by-parts identities
// at solver precision on any mesh; pointwise-sampled counterparts through
// the Galerkin image of L(h) are kept as mesh-quality diagnostics.

#ifndef SSLAB_INEQUALITIES_HPP
#define SSLAB_INEQUALITIES_HPP

#include "sslab/spectrum.hpp"

namespace sslab {

struct DeltaPolicy {
    bool automatic = true;
    double value = 1.0;
    static DeltaPolicy best() { return DeltaPolicy{true, 1.0}; }
    static DeltaPolicy fixed(double v) { return DeltaPolicy{false, v}; }
};

struct ProofIntermediates {
    int k = 0;
    std::string trial_label;
    Matrix a; // a_ij = int h u_i u_j dmu
    Matrix b; // b_ij = int u_j (u_i L^{(f,T)}h + 2 <grad u_i, T grad h>) dmu
    Matrix c; // c_ij = int u_j (u_i Delta_f h / 2 + <grad u_i, grad h>) dmu
    Vector P; // P_i = int u_i^2 <grad h, T grad h> dmu + sum_j (l_i - l_j) a_ij^2
    Vector grad_energy; // int u_i^2 <grad h, T grad h> dmu
    Vector lambdas;     // lambda_1..lambda_k

    // pointwise-sampled counterparts (Galerkin image of the operator)
    Matrix b_sampled;
    double stokes_defect_rel = 0.0;         // consistent route
    double stokes_sampled_defect_rel = 0.0; // Galerkin-sampled route, O(h^2)
};

// pair carries the tensor T; pair_identity the same measure with T = I
// (used for the drifting-Laplacian moments c). Requires materialized
// eigenfunctions and at least k+1 eigenpairs.
ProofIntermediates trial_moments(const Spectrum& spectrum, const DiscreteSpace& space,
                                 const WeightedOperatorPair& pair,
                                 const WeightedOperatorPair& pair_identity,
                                 const TrialFunction& h, int k);

struct IdentityAudit {
    struct Entry {
        std::string check;
        double defect_rel = 0.0;
        double tol = 0.0;
        bool pass = true;
        bool diagnostic = false; // informational, no pass/fail gate
    };
    std::vector<Entry> entries;
    bool all_pass = true;
};

IdentityAudit audit_identities(const ProofIntermediates& pi);

struct InequalityReport {
    std::string id; // thm21-2.2 | thm21-2.3 | thm21-2.5 | thm21-2.6 |
                    // thm11-quadratic | thm11-sqrt | thm12-lambda1 |
                    // thm12-sumsqrt | cor13-first | cor13-nth
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // rhs - lhs
    bool pass = false;  // slack >= -slack_rel * rhs
    double slack_rel_tol = 1e-3;
    bool equality_detected = false;

    // parameters; NaN / -1 mean "not applicable"
    int k = -1;
    int A = -1;
    int r = -1;
    int n = 0;
    int N = 0;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double xi = std::numeric_limits<double>::quiet_NaN();
    double max_S_r = std::numeric_limits<double>::quiet_NaN();
    double min_x_sq = std::numeric_limits<double>::quiet_NaN();
    double vol = std::numeric_limits<double>::quiet_NaN();
    double implied_next_bound = std::numeric_limits<double>::quiet_NaN();

    std::string trial_label;
    std::string provenance; // "fem:<resolution>" or "oracle:n=<n>"
    std::string note;
};

// Theorem-level knobs shared by the checkers.
struct CheckOptions {
    DeltaPolicy delta = DeltaPolicy::best();
    double slack_rel = 1e-3;
    double cluster_rel = 1e-3;
    bool oracle = false; // tightens the equality-detection tolerance
    std::string provenance;
};

// General inequalities (2.2)-style and (2.3)-style for one trial function.
std::vector<InequalityReport> check_general(const Spectrum& spectrum,
                                            const DiscreteSpace& space,
                                            const WeightedOperatorPair& pair,
                                            const WeightedOperatorPair& pair_identity,
                                            const TrialFunction& h, int k,
                                            const CheckOptions& opt);

enum class TrialRotationMode { DirichletGap, Closed };

struct RotatedTrials {
    TrialRotationMode mode = TrialRotationMode::DirichletGap;
    Matrix O; // orthogonal N x N
    std::vector<TrialFunction> trials; // h_A = sum_C O(A,C) x_C, A = 1..A_max
    int A_max = 0;
    double orthogonality_defect = 0.0; // max over required moments
};

// Rotates the coordinate trials so the moment conditions against the base
// eigenfunction hold: for the Dirichlet gap bounds int h_A u_1 u_B dmu = 0
// for B = 2..A; for the closed bounds int h_A u_0 u_B dmu = 0 for
// B = 1..A-1. Throws RankCollapse on a non-finite moment matrix.
RotatedTrials build_orthogonalized_trials(const Spectrum& spectrum, const DiscreteSpace& space,
                                          const WeightedOperatorPair& pair,
                                          TrialRotationMode mode, int A_max);

// Gap bounds (2.5)/(2.6)-style per rotated trial; the closed mode replaces
// u_1 by the constant ground state and bounds sqrt(lambda_A).
std::vector<InequalityReport> check_gap_bounds(const Spectrum& spectrum,
                                               const DiscreteSpace& space,
                                               const WeightedOperatorPair& pair,
                                               const WeightedOperatorPair& pair_identity,
                                               const RotatedTrials& trials,
                                               const CheckOptions& opt);

// Self-shrinker eigenvalue theorems. Dirichlet mode evaluates the quadratic
// bound at the given k plus the square-root gap bound; closed mode
// evaluates lambda_1 <= 1, the sum-of-square-roots bound, and both
// corollary bounds, with equality detection through multiplicity clusters.
std::vector<InequalityReport> check_shrinker_theorems(const Spectrum& spectrum,
                                                      const AmbientStats& stats, int n, int N,
                                                      int k, const CheckOptions& opt);

} // namespace sslab

#endif
