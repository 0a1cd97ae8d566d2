// Test-only oracles, deliberately independent of the library's solver and
// eigensolver code paths: lattice scans, vertex enumeration, Gaussian
// elimination, Gram-Schmidt and closed-form 3x3 eigenvalues.
#pragma once

#include "translasso/linalg.hpp"

namespace translasso::oracle {

// Exact minimum of ||y - X b||^2 + 2 lambda ||b||_1 over the step-1e-3
// lattice on [-5, 5]^p, p <= 3. The innermost coordinate is minimized in
// closed form per lattice line (the 1-D restriction is convex, so its lattice
// argmin sits next to the continuous one); the outer coordinates are scanned
// in full.
double lasso_grid_min(const Matrix& design, const Vector& response, double lambda);

// Solves a dense square system by Gaussian elimination with partial
// pivoting. Returns false when the pivot collapses.
bool gauss_solve(Matrix a, Vector b, Vector& x);

// Brute-force LP oracle for min c'x, A x <= b, x >= 0: enumerates every
// basic solution (all n-subsets of the m + n constraint rows), keeps the
// feasible ones and returns the best objective. Only for tiny instances.
bool lp_vertex_min(const Vector& c, const Matrix& a_ub, const Vector& b_ub, double& best);

// ||b||_1 of the Dantzig Selector through the same (b+, b-) LP as the
// production solver, but solved by vertex enumeration.
bool dantzig_l1_min(const Matrix& design, const Vector& response, double lambda, double& best);

// Eigenvalues of a symmetric 3x3 (or smaller) matrix by the closed-form
// characteristic polynomial, ascending.
Vector sym_eigenvalues_closed_form(const Matrix& m);

// Orthonormal basis of the column space by modified Gram-Schmidt.
Matrix orthonormal_columns(const Matrix& m, double tol = 1e-10);

}  // namespace translasso::oracle
