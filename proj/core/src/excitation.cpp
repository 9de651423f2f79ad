#include "sisid/excitation.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "sisid/csv.hpp"
#include "sisid/errors.hpp"

namespace sisid {

Matrix sis_regressor(double x) {
  Matrix phi(1, 2);
  phi << (1.0 - x) * x, -x;
  return phi;
}

Regressor make_sis_regressor() {
  return Regressor{[](const Vector& x) { return sis_regressor(x(0)); }, 1, 2};
}

Vector residual(const Vector& y, const Matrix& phi, const Vector& theta_hat) {
  if (phi.rows() != y.size() || phi.cols() != theta_hat.size()) {
    throw DimensionError("residual: phi is " + std::to_string(phi.rows()) + "x" +
                         std::to_string(phi.cols()) + ", y has " + std::to_string(y.size()) +
                         " entries, theta has " + std::to_string(theta_hat.size()));
  }
  return y - phi * theta_hat;
}

FisherInfo::FisherInfo(Eigen::Index p, double discount) : h_(Matrix::Zero(p, p)), discount_(discount) {
  if (p <= 0) throw DimensionError("FisherInfo: parameter dimension must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw DomainError("FisherInfo: discount must lie in (0, 1]");
}

void FisherInfo::accumulate(const Matrix& phi) {
  if (phi.cols() != h_.cols()) throw DimensionError("FisherInfo::accumulate: column mismatch");
  h_ *= discount_;
  h_.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  h_.triangularView<Eigen::StrictlyUpper>() = h_.transpose();
}

Matrix sliding_fim(const Trajectory& traj, const Regressor& reg, std::size_t l, std::size_t window) {
  if (l + window > traj.step_count()) {
    throw DimensionError("sliding_fim: window [" + std::to_string(l) + ", " +
                         std::to_string(l + window) + "] exceeds trajectory of " +
                         std::to_string(traj.step_count()) + " steps");
  }
  FisherInfo fim(reg.p);
  for (std::size_t k = l; k <= l + window; ++k) fim.accumulate(reg(traj.states[k]));
  return fim.matrix();
}

bool is_initially_exciting(const Trajectory& traj, const Regressor& reg, std::size_t horizon,
                           double alpha_threshold) {
  if (!(alpha_threshold > 0.0)) throw DomainError("is_initially_exciting: threshold must be positive");
  return min_eigenvalue_sym(sliding_fim(traj, reg, 0, horizon)) >= alpha_threshold;
}

GreedySet GreedySet::empty(Eigen::Index p) {
  GreedySet set;
  set.h_e = Matrix::Zero(p, p);
  set.phi_e = Matrix::Zero(0, p);
  set.upsilon_e = Vector::Zero(p);
  set.kappa_current = kInfinity;
  return set;
}

OfferResult greedy_offer(const GreedySet& set, const Matrix& phi_k, const Vector& y_k, std::size_t k) {
  if (phi_k.cols() != set.h_e.cols() || phi_k.rows() != y_k.size()) {
    throw DimensionError("greedy_offer: regressor/observation shape mismatch");
  }
  OfferResult out{set, false, set.kappa_current, kInfinity};
  const Matrix h_test = symmetrized(set.h_e + phi_k.transpose() * phi_k);
  out.kappa_after = condition_number(h_test);

  if (phi_k.norm() < kZeroRegressorNorm) return out;
  if (!kappa_not_worse(out.kappa_after, set.kappa_current)) return out;

  GreedySet& next = out.set;
  next.indices.push_back(k);
  next.h_e = h_test;
  Matrix stacked(next.phi_e.rows() + phi_k.rows(), phi_k.cols());
  stacked << next.phi_e, phi_k;
  next.phi_e = std::move(stacked);
  next.upsilon_e += phi_k.transpose() * y_k;
  next.kappa_current = out.kappa_after;
  out.accepted = true;
  return out;
}

void write_offer_trace_csv(std::ostream& os, const std::vector<OfferRecord>& trace) {
  csv::write_schema_line(os, "sisid.greedy.v1");
  os << "step,accepted,kappa_before,kappa_after\n";
  for (const auto& r : trace) {
    os << r.step << ',' << (r.accepted ? 1 : 0) << ',' << csv::format(r.kappa_before) << ','
       << csv::format(r.kappa_after) << '\n';
  }
}

GreedySet build_greedy_set(const Trajectory& traj, const Regressor& reg, std::size_t count) {
  if (count > traj.step_count()) throw DimensionError("build_greedy_set: count exceeds trajectory");
  GreedySet set = GreedySet::empty(reg.p);
  for (std::size_t k = 0; k < count; ++k) {
    set = greedy_offer(set, reg(traj.states[k]), traj.observations[k], k).set;
  }
  return set;
}

ExcitationSubset optimal_excitation_set(const Trajectory& traj, const Regressor& reg, std::size_t limit) {
  const std::size_t count = traj.step_count();
  if (limit > kExhaustiveSearchLimit) {
    throw ResourceError("optimal_excitation_set: limit " + std::to_string(limit) +
                        " exceeds the exhaustive budget of " + std::to_string(kExhaustiveSearchLimit));
  }
  if (count > limit) {
    throw ResourceError("optimal_excitation_set: " + std::to_string(count) +
                        " data points exceed the limit of " + std::to_string(limit));
  }
  if (count == 0) throw DimensionError("optimal_excitation_set: empty trajectory");

  std::vector<Matrix> outer;
  outer.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Matrix phi = reg(traj.states[k]);
    outer.push_back(phi.transpose() * phi);
  }

  ExcitationSubset best;
  bool have_best = false;
  Matrix h(reg.p, reg.p);
  std::vector<std::size_t> members;
  members.reserve(count);
  const std::uint64_t masks = std::uint64_t{1} << count;
  for (std::uint64_t mask = 1; mask < masks; ++mask) {
    h.setZero();
    members.clear();
    for (std::size_t k = 0; k < count; ++k) {
      if (mask & (std::uint64_t{1} << k)) {
        h += outer[k];
        members.push_back(k);
      }
    }
    const double kappa = condition_number(h);
    bool better = !have_best || kappa < best.kappa;
    if (have_best && kappa == best.kappa) {
      if (members.size() != best.indices.size()) {
        better = members.size() < best.indices.size();
      } else {
        better = std::lexicographical_compare(members.begin(), members.end(), best.indices.begin(),
                                              best.indices.end());
      }
    }
    if (better) {
      best.indices = members;
      best.kappa = kappa;
      have_best = true;
    }
  }
  return best;
}

}  // namespace sisid
