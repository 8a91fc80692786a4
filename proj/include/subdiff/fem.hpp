#pragma once

#include <span>
#include <vector>

#include "subdiff/mesh.hpp"
#include "subdiff/sparse.hpp"

namespace subdiff {

/// Q1 finite element matrices on a tensor-product mesh, assembled over
/// all nodes (no boundary elimination).
struct FemOperators {
  CsrMatrix mass;           // (u, phi)
  CsrMatrix stiffness;      // (grad u, grad phi)
  CsrMatrix weighted_mass;  // (I_h q u, phi)
};

/// Sparsity pattern shared by every Q1 matrix on this mesh: each node
/// couples to its neighbours within one cell in every axis.
CsrMatrix q1_pattern(const Mesh& mesh);

CsrMatrix assemble_mass(const Mesh& mesh);
CsrMatrix assemble_stiffness(const Mesh& mesh);

/// (q u, phi) with q replaced by its nodal interpolant and integrated with
/// a 2-point Gauss rule per axis, which is exact for the Q1 x Q1 x Q1
/// integrand.
CsrMatrix assemble_weighted_mass(const Mesh& mesh, const NodalField& q);

FemOperators assemble_operators(const Mesh& mesh, const NodalField& q);

/// Load vector (f, phi_i) with f evaluated at the Gauss points.
std::vector<double> assemble_load(const Mesh& mesh, const SpatialFunction& f);

/// sqrt(v^T M v) with M the mass matrix of the mesh.
double l2_norm(const NodalField& field, const Mesh& mesh);
/// Same, with a caller-supplied mass matrix (avoids reassembly in loops).
double l2_norm(std::span<const double> values, const CsrMatrix& mass);

/// Interior block of a Dirichlet-eliminated system A x = r.
struct ReducedSystem {
  CsrMatrix matrix;          // A_ii
  std::vector<double> rhs;   // r_i - A_ib x_b
};

/// Restricts A and the rows of rhs to interior nodes and moves the known
/// boundary values to the right-hand side. boundary_values is read only at
/// boundary nodes.
ReducedSystem apply_dirichlet(const Mesh& mesh, const CsrMatrix& A, std::span<const double> rhs,
                              const NodalField& boundary_values);

/// Interior block A_ii only.
CsrMatrix interior_block(const Mesh& mesh, const CsrMatrix& A);

/// Full nodal vector from interior unknowns and prescribed boundary values.
NodalField expand_interior(const Mesh& mesh, std::span<const double> interior,
                           const NodalField& boundary_values);

}  // namespace subdiff
