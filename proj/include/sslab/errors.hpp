// errors.hpp
//
// Exception types shared by all sslab modules. Every failure mode that a
// caller can trigger through bad input or bad data gets its own type so the
// CLI can map them to exit codes and messages.

#ifndef SSLAB_ERRORS_HPP
#define SSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sslab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Chart metric is singular or indefinite at the requested parameter point.
struct DegenerateMetric : Error {
    using Error::Error;
};

// Newton tensor order r must be even; odd orders are not part of the theory.
struct OddOrderRequested : Error {
    using Error::Error;
};

// Tensor order r out of range for the manifold dimension (requires r < n).
struct DimensionMismatch : Error {
    using Error::Error;
};

// A tensor field that must be positive definite failed the check somewhere.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

// FEM path only covers intrinsic dimensions 1 and 2.
struct UnsupportedDimension : Error {
    using Error::Error;
};

// Dirichlet reduction requested on a geometry without boundary nodes.
struct EmptyBoundary : Error {
    using Error::Error;
};

// Mass matrix factorization failed during an operator application.
struct SingularMass : Error {
    using Error::Error;
};

// Mass matrix not symmetric positive definite in the eigenvalue solve.
struct MassNotSPD : Error {
    using Error::Error;
};

// Operation needs materialized eigenfunctions but the spectrum is analytic.
struct OracleSpectrum : Error {
    using Error::Error;
};

// Fewer eigenpairs available than the check requires.
struct InsufficientSpectrum : Error {
    using Error::Error;
};

// Moment matrix for the trial rotation is rank deficient beyond repair.
struct RankCollapse : Error {
    using Error::Error;
};

// Scenario configuration is malformed (unknown keys, bad values, ...).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace sslab

#endif
