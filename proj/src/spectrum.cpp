// spectrum.cpp

#include "sslab/spectrum.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace sslab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Spectrum::lambda(int i) const {
    const int idx = problem == BoundaryCondition::Dirichlet ? i - 1 : i;
    if (idx < 0 || idx >= static_cast<int>(values.size()))
        throw InsufficientSpectrum("eigenvalue index " + std::to_string(i) +
                                   " outside the computed range");
    return values[idx];
}

Vector Spectrum::eigenfunction(int i) const {
    if (!has_eigenfunctions())
        throw OracleSpectrum("analytic spectra carry no eigenfunctions");
    const int idx = problem == BoundaryCondition::Dirichlet ? i - 1 : i;
    if (idx < 0 || idx >= count)
        throw InsufficientSpectrum("eigenfunction index " + std::to_string(i) +
                                   " outside the computed range");
    return vectors.col(idx);
}

Spectrum solve_spectrum(const WeightedOperatorPair& pair, int count) {
    const int nf = pair.free_count();
    if (count < 1 || count > nf)
        throw InsufficientSpectrum("requested " + std::to_string(count) +
                                   " eigenpairs from a space of dimension " +
                                   std::to_string(nf));
    {
        Eigen::LLT<Matrix> llt(pair.mass);
        if (llt.info() != Eigen::Success)
            throw MassNotSPD("mass matrix is not symmetric positive definite");
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(pair.stiffness, pair.mass);
    if (ges.info() != Eigen::Success)
        throw MassNotSPD("generalized eigensolver failed");

    Spectrum sp;
    sp.problem = pair.bc;
    sp.count = count;
    sp.values.resize(count);
    sp.vectors = ges.eigenvectors().leftCols(count);

    const double lam_max = std::abs(ges.eigenvalues()[nf - 1]);
    for (int i = 0; i < count; ++i) {
        double v = ges.eigenvalues()[i];
        if (std::abs(v) <= 1e-10 * std::max(1.0, lam_max)) v = 0.0;
        sp.values[i] = v;
    }

    // deterministic sign: largest-magnitude entry positive
    for (int j = 0; j < count; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < nf; ++i) {
            const double a = std::abs(sp.vectors(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (sp.vectors(arg, j) < 0.0) sp.vectors.col(j) = -sp.vectors.col(j);
    }

    Matrix gram = sp.vectors.transpose() * pair.mass * sp.vectors;
    sp.orthonormality_defect =
        (gram - Matrix::Identity(count, count)).cwiseAbs().maxCoeff();
    if (sp.orthonormality_defect > 1e-11) {
        // modified Gram-Schmidt in the mass inner product
        for (int j = 0; j < count; ++j) {
            Vector mj = pair.mass * sp.vectors.col(j);
            for (int i = 0; i < j; ++i) {
                const double c = sp.vectors.col(i).dot(mj);
                sp.vectors.col(j) -= c * sp.vectors.col(i);
                mj = pair.mass * sp.vectors.col(j);
            }
            sp.vectors.col(j) /= std::sqrt(sp.vectors.col(j).dot(mj));
        }
        gram = sp.vectors.transpose() * pair.mass * sp.vectors;
        sp.orthonormality_defect =
            (gram - Matrix::Identity(count, count)).cwiseAbs().maxCoeff();
    }
    return sp;
}

Spectrum analytic_sphere_spectrum(int n, int r, int count) {
    if (n < 1) throw DimensionMismatch("sphere dimension must be at least 1");
    if (r % 2 != 0) throw OddOrderRequested("Newton tensor order r must be even");
    if (r < 0 || r >= n) throw DimensionMismatch("need 0 <= r < n");

    const double factor = binomial(n - 1, r) * std::pow(double(n), -0.5 * r);
    Spectrum sp;
    sp.problem = BoundaryCondition::Closed;
    sp.oracle = true;
    sp.count = count;
    sp.values.reserve(count);
    for (int k = 0; static_cast<int>(sp.values.size()) < count; ++k) {
        const double lam = factor * k * (k + n - 1) / n;
        double mult;
        if (k == 0)
            mult = 1;
        else if (n == 1)
            mult = 2;
        else
            mult = binomial(n + k, n) - binomial(n + k - 2, n);
        for (int m = 0; m < static_cast<int>(mult) &&
                        static_cast<int>(sp.values.size()) < count;
             ++m)
            sp.values.push_back(lam);
    }
    return sp;
}

AmbientStats analytic_sphere_stats(int n, int r) {
    AmbientStats st;
    st.r = r;
    const double nr2 = std::pow(double(n), -0.5 * r);
    st.xi = binomial(n - 1, r) * nr2;
    st.max_S_r = binomial(n, r) * nr2;
    st.min_x_sq = n;
    const double omega = 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
    st.vol = std::exp(-0.5 * n) * omega * std::pow(double(n), 0.5 * n);
    st.int_S_r = st.max_S_r * st.vol;
    return st;
}

MultiplicityClusters group_multiplicities(const Spectrum& spectrum, double rel_tol) {
    MultiplicityClusters mc;
    mc.tol = rel_tol;
    const auto& v = spectrum.values;
    mc.cluster_of.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool fresh =
            mc.clusters.empty() ||
            (v[i] - v[i - 1]) > rel_tol * std::max(std::abs(v[i]), 1e-12);
        if (fresh) {
            MultiplicityClusters::Cluster c;
            c.value = v[i];
            c.multiplicity = 1;
            c.first = c.last = static_cast<int>(i);
            mc.clusters.push_back(c);
        } else {
            mc.clusters.back().multiplicity += 1;
            mc.clusters.back().last = static_cast<int>(i);
        }
        mc.cluster_of[i] = static_cast<int>(mc.clusters.size()) - 1;
    }
    return mc;
}

} // namespace sslab
