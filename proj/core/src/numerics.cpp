#include "sisid/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sisid/errors.hpp"

namespace sisid {
namespace {

void require_nonempty(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError(std::string(what) + ": empty matrix");
  }
}

void require_symmetric(const Matrix& m, const char* what) {
  require_nonempty(m, what);
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected square");
  }
  if (!is_symmetric(m)) {
    throw ShapeError(std::string(what) + ": matrix is not symmetric");
  }
}

// Eigenvalues of [[a, b], [b, d]] in ascending order.
std::pair<double, double> eigen_2x2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, b);
  return {mean - radius, mean + radius};
}

}  // namespace

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SpectralSummary spectral_summary(const Matrix& m) {
  require_nonempty(m, "spectral_summary");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  SpectralSummary out;
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = out.singular_values.front();
  const double smin = out.singular_values.back();
  if (!(smax > 0.0) || smin <= kRankTolerance * smax) {
    out.condition_number = kInfinity;
  } else {
    out.condition_number = smax / smin;
  }
  return out;
}

double condition_number(const Matrix& m) { return spectral_summary(m).condition_number; }

double min_eigenvalue_sym(const Matrix& m) {
  require_symmetric(m, "min_eigenvalue_sym");
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) return eigen_2x2(m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)).first;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue_sym(const Matrix& m) {
  require_symmetric(m, "max_eigenvalue_sym");
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) return eigen_2x2(m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)).second;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

Matrix inversion_lemma_update(const Matrix& p, const Matrix& phi_block, double alpha) {
  require_nonempty(p, "inversion_lemma_update");
  if (p.rows() != p.cols()) throw ShapeError("inversion_lemma_update: P must be square");
  if (phi_block.cols() != p.rows()) {
    throw DimensionError("inversion_lemma_update: regressor block has " +
                         std::to_string(phi_block.cols()) + " columns, P is " +
                         std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("inversion_lemma_update: forgetting factor must lie in (0, 1]");
  }
  if (phi_block.rows() == 0) return symmetrized(p / alpha);

  const Matrix p_phit = p * phi_block.transpose();  // p x m
  Matrix s = phi_block * p_phit;                     // m x m
  s.diagonal().array() += alpha;
  s = symmetrized(s);

  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError(
        "inversion_lemma_update: alpha*I + Phi*P*Phi^T is not positive definite");
  }
  const Matrix gain_t = llt.solve(p_phit.transpose());  // m x p
  Matrix out = (p - p_phit * gain_t) / alpha;
  out = symmetrized(out);
  if (!out.allFinite()) {
    throw ConditioningError("inversion_lemma_update: update produced non-finite entries");
  }
  return out;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  require_nonempty(a, "solve_spd");
  if (a.rows() != a.cols()) throw ShapeError("solve_spd: matrix must be square");
  if (b.size() != a.rows()) throw DimensionError("solve_spd: right-hand side size mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError("solve_spd: matrix is not positive definite");
  }
  Vector x = llt.solve(b);
  if (!x.allFinite()) throw ConditioningError("solve_spd: solution is not finite");
  return x;
}

}  // namespace sisid
