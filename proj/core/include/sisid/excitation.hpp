#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sisid/dynamics.hpp"
#include "sisid/numerics.hpp"

namespace sisid {

// [(1 - x) x, -x]
Matrix sis_regressor(double x);

// sis_regressor wrapped as a Regressor on one-dimensional states.
Regressor make_sis_regressor();

// y - phi * theta_hat
Vector residual(const Vector& y, const Matrix& phi, const Vector& theta_hat);

// Discounted information matrix h <- discount * h + phi^T phi.
class FisherInfo {
 public:
  FisherInfo(Eigen::Index p, double discount = 1.0);

  void accumulate(const Matrix& phi);

  const Matrix& matrix() const { return h_; }
  double discount() const { return discount_; }
  double condition_number() const { return sisid::condition_number(h_); }
  double min_eigenvalue() const { return min_eigenvalue_sym(h_); }

 private:
  Matrix h_;
  double discount_;
};

// sum_{k=l}^{l+window} phi(x_k)^T phi(x_k) over the stored states. Requires
// l + window <= traj.step_count().
Matrix sliding_fim(const Trajectory& traj, const Regressor& reg, std::size_t l, std::size_t window);

// lambda_min(sum_{k=0}^{horizon} phi^T phi) >= alpha_threshold.
bool is_initially_exciting(const Trajectory& traj, const Regressor& reg, std::size_t horizon,
                           double alpha_threshold);

// Regressor rows with norm below this never enter a greedy set.
inline constexpr double kZeroRegressorNorm = 1e-14;

// Greedy excitation set with its redundant representations:
// h_e == phi_e^T phi_e and upsilon_e == sum phi^T y over accepted points.
struct GreedySet {
  std::vector<std::size_t> indices;
  Matrix h_e;
  Matrix phi_e;  // |E| * n rows, p columns
  Vector upsilon_e;
  double kappa_current = kInfinity;

  static GreedySet empty(Eigen::Index p);
  std::size_t size() const { return indices.size(); }
};

struct OfferResult {
  GreedySet set;
  bool accepted = false;
  double kappa_before = kInfinity;
  // Condition number with the offered point included, whether or not it
  // was accepted.
  double kappa_after = kInfinity;
};

// Accepts datum k if kappa(h_e + phi_k^T phi_k) <= kappa(h_e), with
// +inf <= +inf true. Exact-zero regressors are always rejected.
OfferResult greedy_offer(const GreedySet& set, const Matrix& phi_k, const Vector& y_k, std::size_t k);

struct OfferRecord {
  std::size_t step = 0;
  bool accepted = false;
  double kappa_before = kInfinity;
  double kappa_after = kInfinity;
};

// Columns step,accepted,kappa_before,kappa_after.
void write_offer_trace_csv(std::ostream& os, const std::vector<OfferRecord>& trace);

// Offers data points 0..count-1 of traj in order.
GreedySet build_greedy_set(const Trajectory& traj, const Regressor& reg, std::size_t count);

inline constexpr std::size_t kExhaustiveSearchLimit = 20;

struct ExcitationSubset {
  std::vector<std::size_t> indices;
  double kappa = kInfinity;
};

// Exhaustive minimum of kappa(sum_{k in E} phi^T phi) over nonempty subsets
// of the data indices 0..step_count-1. Ties go to the smaller subset, then
// lexicographic order. Throws ResourceError if step_count > limit or
// limit > kExhaustiveSearchLimit.
ExcitationSubset optimal_excitation_set(const Trajectory& traj, const Regressor& reg, std::size_t limit);

}  // namespace sisid
