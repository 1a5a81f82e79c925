#pragma once

#include "hpdg/dg_system.hpp"

#include <stdexcept>
#include <string>

namespace hpdg {

enum class SolveMethod { DirectFactorization, ConjugateGradient };

std::string to_string(SolveMethod method);

struct SolveReport {
  Vector coefficients;
  double relative_residual = 0.0;  // ||Ax - b|| / ||b||
  double backward_error = 0.0;     // ||Ax - b|| / || |A||x| + |b| ||
  SolveMethod method = SolveMethod::DirectFactorization;
};

/// Factorisation broke down or the residual contract could not be met.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultSolveTolerance = 1e-10;

/// Solves A x = b for symmetric positive definite A with ||Ax - b|| / ||b|| <= tol,
/// or, when rounding in Ax makes that unattainable, with backward error <= tol.
///
/// The system is symmetrically scaled to unit diagonal and factorised with a
/// sparse Cholesky decomposition; a few steps of iterative refinement follow.
/// Preconditioned CG takes over above `direct_limit` unknowns. A non-positive
/// pivot raises SolverError("matrix not SPD").
SolveReport solve_spd(const SparseMatrix& matrix, const Vector& rhs, double tol = kDefaultSolveTolerance,
                      int direct_limit = 200000);

}  // namespace hpdg
