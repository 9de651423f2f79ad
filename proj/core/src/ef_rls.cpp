#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

namespace sisid {

EfRlsState ef_rls_step(const EfRlsState& state, const Matrix& phi, const Vector& y, double alpha) {
  const Vector r = residual(y, phi, state.theta);
  EfRlsState next;
  next.p = inversion_lemma_update(state.p, phi, alpha);
  next.theta = state.theta + next.p * phi.transpose() * r;
  if (!next.theta.allFinite()) throw NumericalError("ef_rls_step: estimate is not finite");
  return next;
}

}  // namespace sisid
