#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace sisid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// sigma_min <= kRankTolerance * sigma_max is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-12;

// Relative asymmetry accepted by the symmetric routines.
inline constexpr double kSymmetryTolerance = 1e-12;

struct SpectralSummary {
  std::vector<double> singular_values;  // nonincreasing
  double condition_number = kInfinity;  // +inf when rank deficient
};

SpectralSummary spectral_summary(const Matrix& m);

// sigma_max / sigma_min, or +inf for rank-deficient (including all-zero)
// input. Throws DimensionError on an empty matrix.
double condition_number(const Matrix& m);

// Smallest / largest eigenvalue of a symmetric matrix. 2x2 input uses the
// closed form; larger input goes through a self-adjoint eigensolver.
double min_eigenvalue_sym(const Matrix& m);
double max_eigenvalue_sym(const Matrix& m);

// Returns P+ = (1/a) P - (1/a) P Phi^T (a I + Phi P Phi^T)^{-1} Phi P,
// i.e. the inverse of a P^{-1} + Phi^T Phi, symmetrized. Phi may have zero
// rows. Throws ConditioningError if a I + Phi P Phi^T cannot be factored.
Matrix inversion_lemma_update(const Matrix& p, const Matrix& phi_block, double alpha);

// Solves a x = b for symmetric positive definite a via Cholesky.
Vector solve_spd(const Matrix& a, const Vector& b);

// (m + m^T) / 2
Matrix symmetrized(const Matrix& m);

bool is_symmetric(const Matrix& m, double rel_tol = kSymmetryTolerance);

// Extended-real comparison used by the excitation-set test: +inf <= +inf.
inline bool kappa_not_worse(double candidate, double current) { return candidate <= current; }

}  // namespace sisid
