// spectrum.hpp
//
// Dense symmetric generalized eigensolver for the pair (K, M), eigenvalue
// indexing that follows the continuous problem (Dirichlet spectra start at
// lambda_1 > 0, closed spectra carry lambda_0 = 0), multiplicity grouping,
// and the exact analytic spectrum of the round sphere S^n(sqrt n) used as a
// cross-dimension oracle.

#ifndef SSLAB_SPECTRUM_HPP
#define SSLAB_SPECTRUM_HPP

#include "sslab/operator.hpp"

namespace sslab {

struct Spectrum {
    std::vector<double> values; // ascending, repeated by multiplicity
    Matrix vectors;             // free nodes x count; empty in oracle mode
    BoundaryCondition problem = BoundaryCondition::Closed;
    bool oracle = false;
    int count = 0;
    double orthonormality_defect = 0.0;

    bool has_eigenfunctions() const { return vectors.size() > 0; }

    // Eigenvalue by problem indexing: closed problems use lambda(0) = 0,
    // Dirichlet problems start at lambda(1).
    double lambda(int i) const;
    // Column of the coefficient matrix for the same indexing.
    Vector eigenfunction(int i) const;
};

// Dense generalized solve; eigenvectors are orthonormal in the mass inner
// product with a deterministic sign (largest-magnitude entry positive).
Spectrum solve_spectrum(const WeightedOperatorPair& pair, int count);

// Exact eigenvalues of the weighted Newton-tensor operator on S^n(sqrt n):
// lambda = binom(n-1, r) n^{-r/2} k (k+n-1)/n with spherical harmonic
// multiplicities. Eigenfunctions are not materialized.
Spectrum analytic_sphere_spectrum(int n, int r, int count);

// The matching analytic sample statistics (constant curvature data).
AmbientStats analytic_sphere_stats(int n, int r);

struct MultiplicityClusters {
    struct Cluster {
        double value = 0.0;   // first member
        int multiplicity = 0;
        int first = 0;        // index range [first, last] into values
        int last = 0;
    };
    std::vector<Cluster> clusters;
    std::vector<int> cluster_of; // per eigenvalue index
    double tol = 0.0;
};

// Greedy clustering with relative gap tolerance.
MultiplicityClusters group_multiplicities(const Spectrum& spectrum, double rel_tol);

} // namespace sslab

#endif
