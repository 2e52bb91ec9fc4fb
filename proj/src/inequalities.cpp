// inequalities.cpp

#include "sslab/inequalities.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace sslab {

namespace {

struct SampledFn {
    std::vector<double> val;
    std::vector<Vector> grad;
};

SampledFn sample_nodal(const DiscreteSpace& space, const Vector& nodal_full) {
    SampledFn f;
    f.val = values_at_quads(space, nodal_full);
    f.grad = gradients_at_quads(space, nodal_full);
    return f;
}

// <ga, T gb> through the orthonormal-frame components of the tensor
double t_dot(const QuadSample& q, const Matrix& tensor, const Vector& ga, const Vector& gb) {
    const Vector fa = q.point.tangent_frame.transpose() * ga;
    const Vector fb = q.point.tangent_frame.transpose() * gb;
    return fa.dot(tensor * fb);
}

Matrix weighted_mass_free(const DiscreteSpace& space, const WeightedOperatorPair& pair,
                          const std::vector<double>& h_at_quads) {
    const int nf = pair.free_count();
    Matrix mh = Matrix::Zero(nf, nf);
    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const QuadSample& q = space.quads[qi];
        const MeshElement& el = space.elements[q.element];
        const double wh = q.weight * h_at_quads[qi];
        for (int a = 0; a < el.node_count; ++a) {
            const int fa = pair.node_to_free[el.nodes[a]];
            if (fa < 0) continue;
            for (int b = 0; b < el.node_count; ++b) {
                const int fb = pair.node_to_free[el.nodes[b]];
                if (fb < 0) continue;
                mh(fa, fb) += wh * q.basis[a] * q.basis[b];
            }
        }
    }
    return mh;
}

double eq_tolerance(const CheckOptions& opt) { return opt.oracle ? 1e-6 : 1e-2; }

InequalityReport make_report(const std::string& id, double lhs, double rhs,
                             const CheckOptions& opt) {
    InequalityReport rep;
    rep.id = id;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.slack = rhs - lhs;
    rep.slack_rel_tol = opt.slack_rel;
    rep.pass = rep.slack >= -opt.slack_rel * std::abs(rhs);
    if (lhs == 0.0 && rhs == 0.0)
        rep.equality_detected = true; // degenerate 0 <= 0
    else
        rep.equality_detected = std::abs(rep.slack) <= eq_tolerance(opt) * std::abs(rhs);
    rep.provenance = opt.provenance;
    return rep;
}

} // namespace

ProofIntermediates trial_moments(const Spectrum& spectrum, const DiscreteSpace& space,
                                 const WeightedOperatorPair& pair,
                                 const WeightedOperatorPair& pair_identity,
                                 const TrialFunction& h, int k) {
    if (!spectrum.has_eigenfunctions())
        throw OracleSpectrum("trial moments need materialized eigenfunctions");
    if (k < 1) throw InsufficientSpectrum("need k >= 1");
    (void)spectrum.lambda(k + 1); // requires k+1 eigenpairs

    ProofIntermediates pi;
    pi.k = k;
    pi.trial_label = h.label;
    pi.lambdas = Vector(k);
    for (int i = 1; i <= k; ++i) pi.lambdas[i - 1] = spectrum.lambda(i);

    // eigenfunction samples
    std::vector<SampledFn> u(k);
    Matrix U(pair.free_count(), k);
    for (int i = 1; i <= k; ++i) {
        U.col(i - 1) = spectrum.eigenfunction(i);
        u[i - 1] = sample_nodal(space, pair.extend(U.col(i - 1)));
    }
    const std::vector<double> hq = values_at_quads(space, h.nodal);
    if (h.grad.size() != space.quads.size())
        throw Error("trial function gradient samples do not match the space");

    const Matrix mh = weighted_mass_free(space, pair, hq);

    // a_ij and the operator-algebra moments
    pi.a = U.transpose() * mh * U;
    Eigen::LLT<Matrix> llt(pair.mass);
    if (llt.info() != Eigen::Success) throw SingularMass("mass factorization failed");
    const Matrix z = llt.solve(pair.stiffness * U);   // M^{-1} K U
    const Matrix zi = llt.solve(pair_identity.stiffness * U);
    const Matrix w = llt.solve(mh * U);               // M^{-1} M_h U
    pi.b = (U.transpose() * mh * z - U.transpose() * pair.stiffness * w).transpose();
    pi.c = 0.5 * (U.transpose() * mh * zi - U.transpose() * pair_identity.stiffness * w)
                     .transpose();

    // quadrature moments
    pi.grad_energy = Vector::Zero(k);
    Vector stokes_lhs = Vector::Zero(k);
    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const QuadSample& q = space.quads[qi];
        const Matrix& t = pair.tensor_at_quads[qi];
        const double ghh = t_dot(q, t, h.grad[qi], h.grad[qi]);
        for (int i = 0; i < k; ++i) {
            const double ui = u[i].val[qi];
            const double cross = t_dot(q, t, u[i].grad[qi], h.grad[qi]);
            pi.grad_energy[i] += q.weight * ui * ui * ghh;
            // -int (h u_i^2) Lh - 2 int h u_i <grad u_i, T grad h>, with the
            // first term expanded through the weak form
            stokes_lhs[i] += q.weight * (ui * ui * ghh + 2.0 * hq[qi] * ui * cross) -
                             2.0 * q.weight * hq[qi] * ui * cross;
        }
    }
    pi.P = Vector(k);
    for (int i = 0; i < k; ++i) {
        double s = pi.grad_energy[i];
        for (int j = 0; j < k; ++j)
            s += (pi.lambdas[i] - pi.lambdas[j]) * pi.a(i, j) * pi.a(i, j);
        pi.P[i] = s;
    }

    // Galerkin-sampled counterparts (mesh-quality diagnostics)
    const Vector lh_full = pair.extend(apply_operator(space, pair, h.nodal));
    const std::vector<double> lhq = values_at_quads(space, lh_full);
    pi.b_sampled = Matrix::Zero(k, k);
    Vector stokes_sampled = Vector::Zero(k);
    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const QuadSample& q = space.quads[qi];
        const Matrix& t = pair.tensor_at_quads[qi];
        for (int i = 0; i < k; ++i) {
            const double commutator_i =
                u[i].val[qi] * lhq[qi] + 2.0 * t_dot(q, t, u[i].grad[qi], h.grad[qi]);
            for (int j = 0; j < k; ++j)
                pi.b_sampled(i, j) += q.weight * u[j].val[qi] * commutator_i;
            stokes_sampled[i] -= q.weight * hq[qi] * u[i].val[qi] * commutator_i;
        }
    }

    double scale = 0.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(pi.grad_energy[i]));
    scale = std::max(scale, 1e-30);
    pi.stokes_defect_rel = 0.0;
    pi.stokes_sampled_defect_rel = 0.0;
    for (int i = 0; i < k; ++i) {
        pi.stokes_defect_rel = std::max(
            pi.stokes_defect_rel, std::abs(stokes_lhs[i] - pi.grad_energy[i]) / scale);
        pi.stokes_sampled_defect_rel =
            std::max(pi.stokes_sampled_defect_rel,
                     std::abs(stokes_sampled[i] - pi.grad_energy[i]) / scale);
    }
    return pi;
}

IdentityAudit audit_identities(const ProofIntermediates& pi) {
    IdentityAudit audit;
    const int k = pi.k;

    double rel_scale = 1e-30, defect = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double expect = (pi.lambdas[j] - pi.lambdas[i]) * pi.a(i, j);
            rel_scale = std::max(rel_scale, std::abs(expect));
            defect = std::max(defect, std::abs(pi.b(j, i) - expect));
        }
    audit.entries.push_back({"b_lambda_relation", defect / std::max(rel_scale, 1e-30),
                             1e-7, true, false});

    const double b_scale = std::max(pi.b.cwiseAbs().maxCoeff(), 1e-30);
    audit.entries.push_back({"b_antisymmetry",
                             (pi.b + pi.b.transpose()).cwiseAbs().maxCoeff() / b_scale, 1e-7,
                             true, false});
    const double c_scale = std::max(pi.c.cwiseAbs().maxCoeff(), 1e-30);
    audit.entries.push_back({"c_antisymmetry",
                             (pi.c + pi.c.transpose()).cwiseAbs().maxCoeff() / c_scale, 1e-7,
                             true, false});
    audit.entries.push_back({"stokes_identity", pi.stokes_defect_rel, 1e-7, true, false});

    // drift of the pointwise-sampled moments against the consistent ones;
    // grows on unconverged meshes, reported without a gate
    audit.entries.push_back({"galerkin_drift_b",
                             (pi.b_sampled - pi.b).cwiseAbs().maxCoeff() / b_scale, 0.0, true,
                             true});
    audit.entries.push_back(
        {"galerkin_drift_stokes", pi.stokes_sampled_defect_rel, 0.0, true, true});

    audit.all_pass = true;
    for (auto& e : audit.entries) {
        if (!e.diagnostic) {
            e.pass = e.defect_rel <= e.tol;
            audit.all_pass = audit.all_pass && e.pass;
        }
    }
    return audit;
}

std::vector<InequalityReport> check_general(const Spectrum& spectrum,
                                            const DiscreteSpace& space,
                                            const WeightedOperatorPair& pair,
                                            const WeightedOperatorPair& pair_identity,
                                            const TrialFunction& h, int k,
                                            const CheckOptions& opt) {
    if (!spectrum.has_eigenfunctions())
        throw OracleSpectrum("general trial inequalities need eigenfunctions");
    if (spectrum.problem != BoundaryCondition::Dirichlet)
        throw Error("general trial inequalities are stated for the Dirichlet problem");
    if (k < 1) throw InsufficientSpectrum("need k >= 1");
    const double lam_top = spectrum.lambda(k + 1);

    std::vector<SampledFn> u(k);
    for (int i = 1; i <= k; ++i)
        u[i - 1] = sample_nodal(space, pair.extend(spectrum.eigenfunction(i)));
    const std::vector<double> lh =
        values_at_quads(space, pair.extend(apply_operator(space, pair, h.nodal)));
    const std::vector<double> dfh = values_at_quads(
        space, pair_identity.extend(apply_operator(space, pair_identity, h.nodal)));

    Vector gte = Vector::Zero(k), ge = Vector::Zero(k), sq = Vector::Zero(k),
           dq = Vector::Zero(k);
    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const QuadSample& q = space.quads[qi];
        const Matrix& t = pair.tensor_at_quads[qi];
        const double ghh = t_dot(q, t, h.grad[qi], h.grad[qi]);
        const double gh2 = h.grad[qi].squaredNorm();
        for (int i = 0; i < k; ++i) {
            const double ui = u[i].val[qi];
            gte[i] += q.weight * ui * ui * ghh;
            ge[i] += q.weight * ui * ui * gh2;
            const double comm = ui * lh[qi] + 2.0 * t_dot(q, t, u[i].grad[qi], h.grad[qi]);
            sq[i] += q.weight * comm * comm;
            const double half = 0.5 * ui * dfh[qi] + u[i].grad[qi].dot(h.grad[qi]);
            dq[i] += q.weight * half * half;
        }
    }

    double lhs22 = 0.0, rhs22 = 0.0, a23 = 0.0, b23 = 0.0, lhs23 = 0.0;
    for (int i = 0; i < k; ++i) {
        const double gap = lam_top - spectrum.lambda(i + 1);
        lhs22 += gap * gap * gte[i];
        rhs22 += gap * sq[i];
        a23 += gap * gap * gte[i];
        b23 += gap * dq[i];
        lhs23 += gap * gap * ge[i];
    }

    std::vector<InequalityReport> reports;
    {
        InequalityReport rep = make_report("thm21-2.2", lhs22, rhs22, opt);
        rep.k = k;
        rep.trial_label = h.label;
        rep.n = space.geometry.n;
        rep.N = space.geometry.N;
        rep.r = space.r;
        reports.push_back(rep);
    }
    {
        const double delta =
            opt.delta.automatic ? (a23 > 0.0 ? std::sqrt(b23 / a23) : 1.0) : opt.delta.value;
        const double rhs23 = delta * a23 + b23 / delta;
        InequalityReport rep = make_report("thm21-2.3", lhs23, rhs23, opt);
        rep.k = k;
        rep.delta = delta;
        rep.trial_label = h.label;
        rep.n = space.geometry.n;
        rep.N = space.geometry.N;
        rep.r = space.r;
        reports.push_back(rep);
    }
    return reports;
}

RotatedTrials build_orthogonalized_trials(const Spectrum& spectrum, const DiscreteSpace& space,
                                          const WeightedOperatorPair& pair,
                                          TrialRotationMode mode, int A_max) {
    if (!spectrum.has_eigenfunctions())
        throw OracleSpectrum("trial rotation needs eigenfunctions");
    const int N = space.geometry.N;
    if (A_max < 1 || A_max > N) throw Error("need 1 <= A_max <= ambient dimension");

    const auto coords = coordinate_functions(space);
    const int base = mode == TrialRotationMode::DirichletGap ? 1 : 0;
    const SampledFn ub = sample_nodal(space, pair.extend(spectrum.eigenfunction(base)));

    // moment matrix W_CB = int x_C u_base u_B dmu over the required B range
    const int m = A_max - 1;
    std::vector<SampledFn> uB(m);
    for (int col = 0; col < m; ++col) {
        const int B = mode == TrialRotationMode::DirichletGap ? col + 2 : col + 1;
        uB[col] = sample_nodal(space, pair.extend(spectrum.eigenfunction(B)));
    }
    std::vector<std::vector<double>> xq(N);
    for (int C = 0; C < N; ++C) xq[C] = values_at_quads(space, coords[C].nodal);

    Matrix W = Matrix::Zero(N, std::max(m, 1));
    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const double wub = space.quads[qi].weight * ub.val[qi];
        for (int C = 0; C < N; ++C)
            for (int col = 0; col < m; ++col)
                W(C, col) += wub * xq[C][qi] * uB[col].val[qi];
    }
    if (!W.allFinite()) throw RankCollapse("moment matrix contains non-finite entries");

    RotatedTrials out;
    out.mode = mode;
    out.A_max = A_max;
    if (m == 0) {
        out.O = Matrix::Identity(N, N);
    } else {
        Eigen::HouseholderQR<Matrix> qr(W.leftCols(m));
        const Matrix Q = qr.householderQ();
        out.O = Q.transpose();
    }

    out.trials.resize(A_max);
    for (int A = 0; A < A_max; ++A) {
        TrialFunction& tf = out.trials[A];
        tf.label = "rotated_h_" + std::to_string(A + 1);
        tf.nodal = Vector::Zero(space.node_count());
        tf.grad.assign(space.quads.size(), Vector::Zero(N));
        for (int C = 0; C < N; ++C) {
            const double o = out.O(A, C);
            if (o == 0.0) continue;
            tf.nodal += o * coords[C].nodal;
            for (std::size_t qi = 0; qi < space.quads.size(); ++qi)
                tf.grad[qi] += o * coords[C].grad[qi];
        }
    }

    out.orthogonality_defect = 0.0;
    if (m > 0) {
        const Matrix R = out.O * W.leftCols(m);
        for (int row = 0; row < A_max; ++row)
            for (int col = 0; col < std::min(row, m); ++col)
                out.orthogonality_defect =
                    std::max(out.orthogonality_defect, std::abs(R(row, col)));
    }
    return out;
}

std::vector<InequalityReport> check_gap_bounds(const Spectrum& spectrum,
                                               const DiscreteSpace& space,
                                               const WeightedOperatorPair& pair,
                                               const WeightedOperatorPair& pair_identity,
                                               const RotatedTrials& trials,
                                               const CheckOptions& opt) {
    const bool dirichlet = trials.mode == TrialRotationMode::DirichletGap;
    if (dirichlet && spectrum.problem != BoundaryCondition::Dirichlet)
        throw Error("Dirichlet-gap trials paired with a closed spectrum");
    if (!dirichlet && spectrum.problem != BoundaryCondition::Closed)
        throw Error("closed-mode trials paired with a Dirichlet spectrum");

    const int base = dirichlet ? 1 : 0;
    const double lam_base = spectrum.lambda(base);
    const SampledFn ub = sample_nodal(space, pair.extend(spectrum.eigenfunction(base)));

    std::vector<InequalityReport> reports;
    for (int A = 1; A <= trials.A_max; ++A) {
        const double lam_top = dirichlet ? spectrum.lambda(A + 1) : spectrum.lambda(A);
        const TrialFunction& h = trials.trials[A - 1];
        const std::vector<double> lh =
            values_at_quads(space, pair.extend(apply_operator(space, pair, h.nodal)));
        const std::vector<double> dfh = values_at_quads(
            space, pair_identity.extend(apply_operator(space, pair_identity, h.nodal)));

        double omega = 0.0, plain = 0.0, sq = 0.0, dq = 0.0;
        for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
            const QuadSample& q = space.quads[qi];
            const Matrix& t = pair.tensor_at_quads[qi];
            const double u0 = ub.val[qi];
            omega += q.weight * u0 * u0 * t_dot(q, t, h.grad[qi], h.grad[qi]);
            plain += q.weight * u0 * u0 * h.grad[qi].squaredNorm();
            const double comm = u0 * lh[qi] + 2.0 * t_dot(q, t, ub.grad[qi], h.grad[qi]);
            sq += q.weight * comm * comm;
            const double half = h.grad[qi].dot(ub.grad[qi]) + 0.5 * u0 * dfh[qi];
            dq += q.weight * half * half;
        }

        const double gap = std::max(lam_top - lam_base, 0.0);
        {
            InequalityReport rep = make_report("thm21-2.5", gap * omega, sq, opt);
            rep.A = A;
            rep.trial_label = h.label;
            rep.n = space.geometry.n;
            rep.N = space.geometry.N;
            rep.r = space.r;
            rep.note = dirichlet ? "" : "closed mode: bounds sqrt-free gap to lambda_A";
            reports.push_back(rep);
        }
        {
            const double delta = opt.delta.automatic
                                     ? (omega > 0.0 ? std::sqrt(dq / omega) : 1.0)
                                     : opt.delta.value;
            const double lhs = std::sqrt(gap) * plain;
            const double rhs = delta * omega + (delta > 0.0 ? dq / delta : 0.0);
            InequalityReport rep = make_report("thm21-2.6", lhs, rhs, opt);
            rep.A = A;
            rep.delta = delta;
            rep.trial_label = h.label;
            rep.n = space.geometry.n;
            rep.N = space.geometry.N;
            rep.r = space.r;
            reports.push_back(rep);
        }
    }
    return reports;
}

std::vector<InequalityReport> check_shrinker_theorems(const Spectrum& spectrum,
                                                      const AmbientStats& stats, int n, int N,
                                                      int k, const CheckOptions& opt) {
    if (!(stats.xi > 0.0))
        throw NotPositiveDefinite("shrinker theorems need a positive tensor lower bound");
    std::vector<InequalityReport> reports;
    const int r = stats.r;
    const double c0 = (2.0 * n - stats.min_x_sq) / 4.0;

    auto fill_stats = [&](InequalityReport& rep) {
        rep.n = n;
        rep.N = N;
        rep.r = r;
        rep.xi = stats.xi;
        rep.max_S_r = stats.max_S_r;
        rep.min_x_sq = stats.min_x_sq;
        rep.vol = stats.vol;
    };

    if (spectrum.problem == BoundaryCondition::Dirichlet) {
        if (k < 1) throw InsufficientSpectrum("Dirichlet theorems need k >= 1");
        const double lam_top = spectrum.lambda(k + 1);
        const double bfac = 4.0 * (n - r) / (double(n) * n) * stats.max_S_r;
        double lhs = 0.0, rhs = 0.0, sum_lam = 0.0, sum_d = 0.0, sum_lam2 = 0.0,
               sum_lam_d = 0.0;
        for (int i = 1; i <= k; ++i) {
            const double li = spectrum.lambda(i);
            const double gap = lam_top - li;
            const double di = li / stats.xi + c0;
            lhs += gap * gap;
            rhs += bfac * gap * di;
            sum_lam += li;
            sum_d += di;
            sum_lam2 += li * li;
            sum_lam_d += li * di;
        }
        InequalityReport quad = make_report("thm11-quadratic", lhs, rhs, opt);
        quad.k = k;
        fill_stats(quad);
        // larger root of k L^2 - (2 sum(l) + B sum(d)) L + sum(l^2) + B sum(l d) <= 0
        const double qa = k;
        const double qb = -(2.0 * sum_lam + bfac * sum_d);
        const double qc = sum_lam2 + bfac * sum_lam_d;
        const double disc = qb * qb - 4.0 * qa * qc;
        quad.implied_next_bound =
            disc >= 0.0 ? (-qb + std::sqrt(disc)) / (2.0 * qa) : spectrum.lambda(k);
        reports.push_back(quad);

        // square-root gap bound needs lambda_2..lambda_{n+1}
        const double lam1 = spectrum.lambda(1);
        double lhs_sqrt = 0.0;
        for (int i = 1; i <= n; ++i)
            lhs_sqrt += std::sqrt(std::max(spectrum.lambda(i + 1) - lam1, 0.0));
        const double rhs_sqrt =
            2.0 * std::sqrt((n - r) * stats.max_S_r * (lam1 / stats.xi + c0));
        InequalityReport sq = make_report("thm11-sqrt", lhs_sqrt, rhs_sqrt, opt);
        fill_stats(sq);
        reports.push_back(sq);
        return reports;
    }

    // closed problem
    (void)spectrum.lambda(n); // need at least n eigenvalues past lambda_0
    const MultiplicityClusters mc = group_multiplicities(spectrum, opt.cluster_rel);
    bool multiplicity_full = false;
    for (const auto& cluster : mc.clusters) {
        if (cluster.value > 0.0) {
            multiplicity_full = cluster.multiplicity >= N;
            break;
        }
    }
    const bool can_see_full = static_cast<int>(spectrum.values.size()) >= N + 1;

    {
        InequalityReport rep = make_report("thm12-lambda1", spectrum.lambda(1), 1.0, opt);
        fill_stats(rep);
        if (r > 0)
            rep.note = "advisory: for r > 0 this bound is recorded as a numerical check; "
                       "a violation would be surfaced, not suppressed";
        reports.push_back(rep);
    }
    {
        double lhs = 0.0;
        for (int i = 1; i <= n; ++i) lhs += std::sqrt(std::max(spectrum.lambda(i), 0.0));
        const double rhs = std::sqrt(n * (n - r) / stats.vol * stats.int_S_r);
        InequalityReport rep = make_report("thm12-sumsqrt", lhs, rhs, opt);
        fill_stats(rep);
        rep.equality_detected = multiplicity_full && can_see_full;
        if (!can_see_full)
            rep.note = "multiplicity check skipped: fewer than N+1 eigenvalues computed";
        reports.push_back(rep);
    }
    {
        const double rhs = (n - r) / (double(n) * stats.vol) * stats.int_S_r;
        InequalityReport rep = make_report("cor13-first", spectrum.lambda(1), rhs, opt);
        fill_stats(rep);
        rep.equality_detected = multiplicity_full && can_see_full;
        reports.push_back(rep);
    }
    {
        const double rhs = double(n) * (n - r) / stats.vol * stats.int_S_r;
        InequalityReport rep = make_report("cor13-nth", spectrum.lambda(n), rhs, opt);
        fill_stats(rep);
        reports.push_back(rep);
    }
    return reports;
}

} // namespace sslab
