#include <cmath>
#include <string>

#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

namespace sisid {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("grls: forgetting factor must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

GrlsState make_grls_state(const Matrix& p0, const ParameterVector& theta0, double alpha,
                          bool use_excitation_set) {
  require_alpha(alpha);
  if (p0.rows() != p0.cols() || p0.rows() != theta0.size()) {
    throw DimensionError("make_grls_state: P0 and theta0 dimensions disagree");
  }
  GrlsState state;
  state.p = p0;
  state.theta = theta0;
  state.greedy = GreedySet::empty(theta0.size());
  state.alpha = alpha;
  state.use_excitation_set = use_excitation_set;
  return state;
}

GrlsState grls_step(const GrlsState& state, const Matrix& phi_k, const Vector& y_k) {
  require_alpha(state.alpha);
  const double alpha = state.alpha;
  const double keep = 1.0 - alpha;

  GrlsState next = state;
  if (state.use_excitation_set) {
    OfferResult offer = greedy_offer(state.greedy, phi_k, y_k, state.step);
    next.greedy = std::move(offer.set);
    next.last_accepted = offer.accepted;
    next.last_kappa_before = offer.kappa_before;
    next.last_kappa_after = offer.kappa_after;
  } else {
    if (phi_k.cols() != state.theta.size() || phi_k.rows() != y_k.size()) {
      throw DimensionError("grls_step: regressor/observation shape mismatch");
    }
    next.last_accepted = false;
  }

  const GreedySet& set = next.greedy;
  Matrix phi;
  Matrix h;
  Vector upsilon;
  if (next.last_accepted) {
    phi = std::sqrt(keep) * set.phi_e;
    h = keep * set.h_e;
    upsilon = keep * set.upsilon_e;
  } else {
    phi.resize(set.phi_e.rows() + phi_k.rows(), phi_k.cols());
    phi << std::sqrt(keep) * set.phi_e, phi_k;
    h = keep * set.h_e + phi_k.transpose() * phi_k;
    upsilon = keep * set.upsilon_e + phi_k.transpose() * y_k;
  }

  next.p = inversion_lemma_update(state.p, phi, alpha);
  next.theta = state.theta + next.p * (upsilon - h * state.theta);
  if (!next.theta.allFinite()) throw NumericalError("grls_step: estimate is not finite");
  next.step = state.step + 1;
  return next;
}

GrlsState grls_step(const GrlsState& state, const Regressor& reg, const Vector& x_k, const Vector& x_next) {
  return grls_step(state, reg(x_k), x_next - x_k);
}

}  // namespace sisid
