// operator.hpp
//
// Weak-form assembly of the weighted divergence-form operator: stiffness
// K_ab = sum_q w_q <grad phi_a, T grad phi_b> and mass M_ab = sum_q w_q
// phi_a phi_b, with the measure exp(-f) dv baked into the quadrature
// weights. The drift term is never assembled directly; the weak form is
// self-adjoint in the weighted inner product by construction. Dirichlet
// conditions are imposed by row/column elimination.

#ifndef SSLAB_OPERATOR_HPP
#define SSLAB_OPERATOR_HPP

#include <iosfwd>

#include "sslab/discretization.hpp"

namespace sslab {

enum class TensorKind { Newton, Identity, Field };

// Which tensor multiplies the gradient in the weak form. Newton uses the
// T^r cached on the space; Field evaluates a user-supplied symmetric
// positive definite matrix (orthonormal tangent frame components).
struct TensorDescriptor {
    TensorKind kind = TensorKind::Identity;
    std::string name = "identity";
    std::function<Matrix(const SurfacePoint&, const CurvaturePackage&)> field;

    static TensorDescriptor newton();
    static TensorDescriptor identity();
    static TensorDescriptor constant(const Matrix& value);
};

enum class BoundaryCondition { Closed, Dirichlet };

struct WeightedOperatorPair {
    Matrix stiffness_full; // all nodes, symmetric
    Matrix mass_full;      // all nodes, symmetric positive definite
    Matrix stiffness;      // free nodes only
    Matrix mass;           // free nodes only
    std::vector<int> free_nodes;   // free index -> node id
    std::vector<int> node_to_free; // node id -> free index or -1
    std::vector<Matrix> tensor_at_quads; // frame components of T per quad
    BoundaryCondition bc = BoundaryCondition::Closed;
    std::string tensor_name;
    std::string weight_name;

    int free_count() const { return static_cast<int>(free_nodes.size()); }
    // zero extension of a free-node vector to all nodes
    Vector extend(const Vector& free_values) const;
    // restriction of a full nodal vector to the free nodes
    Vector restrict_free(const Vector& nodal) const;
};

// Assembles the pair. The weight argument must match the measure the space
// was built with; it exists so call sites state the measure explicitly.
// Throws NotPositiveDefinite if the tensor fails at any quadrature point
// and EmptyBoundary if Dirichlet is requested on a closed geometry.
WeightedOperatorPair assemble_pair(const DiscreteSpace& space, const TensorDescriptor& tensor,
                                   WeightMode weight, BoundaryCondition bc);

// Galerkin image of the operator applied to a nodal function: solves
// M y = -K u over the free nodes (u given on all nodes). Used for residual
// tests and for sampling the operator image of trial functions.
Vector apply_operator(const DiscreteSpace& space, const WeightedOperatorPair& pair,
                      const Vector& nodal_all);

// Coordinate text dump: row col value, one entry per line.
void dump_matrix(const Matrix& m, std::ostream& out);

} // namespace sslab

#endif
