// operator.cpp

#include "sslab/operator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>

namespace sslab {

TensorDescriptor TensorDescriptor::newton() {
    TensorDescriptor d;
    d.kind = TensorKind::Newton;
    d.name = "newton";
    return d;
}

TensorDescriptor TensorDescriptor::identity() {
    TensorDescriptor d;
    d.kind = TensorKind::Identity;
    d.name = "identity";
    return d;
}

TensorDescriptor TensorDescriptor::constant(const Matrix& value) {
    TensorDescriptor d;
    d.kind = TensorKind::Field;
    d.name = "constant";
    d.field = [value](const SurfacePoint&, const CurvaturePackage&) { return value; };
    return d;
}

Vector WeightedOperatorPair::extend(const Vector& free_values) const {
    Vector out = Vector::Zero(node_to_free.size());
    for (std::size_t i = 0; i < free_nodes.size(); ++i) out[free_nodes[i]] = free_values[i];
    return out;
}

Vector WeightedOperatorPair::restrict_free(const Vector& nodal) const {
    Vector out(free_nodes.size());
    for (std::size_t i = 0; i < free_nodes.size(); ++i) out[i] = nodal[free_nodes[i]];
    return out;
}

WeightedOperatorPair assemble_pair(const DiscreteSpace& space, const TensorDescriptor& tensor,
                                   WeightMode weight, BoundaryCondition bc) {
    if (weight != space.geometry.weight_mode)
        throw Error("weight descriptor does not match the measure the space was built with");
    if (bc == BoundaryCondition::Dirichlet && space.boundary_nodes.empty())
        throw EmptyBoundary("Dirichlet reduction requested on a closed geometry");

    const int n = space.geometry.n;
    const int nn = space.node_count();

    WeightedOperatorPair pair;
    pair.bc = bc;
    pair.tensor_name = tensor.name;
    pair.weight_name = to_string(space.geometry.weight_mode);
    pair.stiffness_full = Matrix::Zero(nn, nn);
    pair.mass_full = Matrix::Zero(nn, nn);
    pair.tensor_at_quads.reserve(space.quads.size());

    for (const QuadSample& q : space.quads) {
        Matrix t;
        switch (tensor.kind) {
            case TensorKind::Newton: t = q.curvature.newton; break;
            case TensorKind::Identity: t = Matrix::Identity(n, n); break;
            case TensorKind::Field: t = tensor.field(q.point, q.curvature); break;
        }
        t = 0.5 * (t + t.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues().minCoeff() > 0.0))
            throw NotPositiveDefinite("tensor field is not positive definite at a quadrature "
                                      "point (min eigenvalue " +
                                      std::to_string(es.eigenvalues().minCoeff()) + ")");
        pair.tensor_at_quads.push_back(t);
    }

    for (std::size_t qi = 0; qi < space.quads.size(); ++qi) {
        const QuadSample& q = space.quads[qi];
        const MeshElement& el = space.elements[q.element];
        const Matrix& t = pair.tensor_at_quads[qi];
        const Matrix& frame = q.point.tangent_frame; // N x n
        // frame components of the hat gradients, then contract through T
        const Matrix gf = frame.transpose() * q.basis_grad;     // n x local
        const Matrix tg = t * gf;                               // n x local
        for (int a = 0; a < el.node_count; ++a) {
            for (int b = 0; b < el.node_count; ++b) {
                pair.stiffness_full(el.nodes[a], el.nodes[b]) +=
                    q.weight * gf.col(a).dot(tg.col(b));
                pair.mass_full(el.nodes[a], el.nodes[b]) +=
                    q.weight * q.basis[a] * q.basis[b];
            }
        }
    }
    pair.stiffness_full = 0.5 * (pair.stiffness_full + pair.stiffness_full.transpose().eval());
    pair.mass_full = 0.5 * (pair.mass_full + pair.mass_full.transpose().eval());

    pair.node_to_free.assign(nn, -1);
    if (bc == BoundaryCondition::Dirichlet) {
        std::vector<bool> on_boundary(nn, false);
        for (int b : space.boundary_nodes) on_boundary[b] = true;
        for (int a = 0; a < nn; ++a)
            if (!on_boundary[a]) {
                pair.node_to_free[a] = static_cast<int>(pair.free_nodes.size());
                pair.free_nodes.push_back(a);
            }
    } else {
        pair.free_nodes.resize(nn);
        for (int a = 0; a < nn; ++a) {
            pair.free_nodes[a] = a;
            pair.node_to_free[a] = a;
        }
    }

    const int nf = pair.free_count();
    pair.stiffness = Matrix(nf, nf);
    pair.mass = Matrix(nf, nf);
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) {
            pair.stiffness(i, j) = pair.stiffness_full(pair.free_nodes[i], pair.free_nodes[j]);
            pair.mass(i, j) = pair.mass_full(pair.free_nodes[i], pair.free_nodes[j]);
        }
    return pair;
}

Vector apply_operator(const DiscreteSpace& space, const WeightedOperatorPair& pair,
                      const Vector& nodal_all) {
    if (nodal_all.size() != space.node_count())
        throw Error("apply_operator expects a value at every node");
    const int nf = pair.free_count();
    Vector rhs(nf);
    const Vector full = pair.stiffness_full * nodal_all;
    for (int i = 0; i < nf; ++i) rhs[i] = -full[pair.free_nodes[i]];
    Eigen::LLT<Matrix> llt(pair.mass);
    if (llt.info() != Eigen::Success)
        throw SingularMass("mass matrix factorization failed in apply_operator");
    return llt.solve(rhs);
}

void dump_matrix(const Matrix& m, std::ostream& out) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << m(i, j) << '\n';
}

} // namespace sslab
