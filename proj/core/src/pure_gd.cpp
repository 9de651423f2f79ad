#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

namespace sisid {

ParameterVector pure_gd_step(const ParameterVector& theta_hat, const Matrix& phi, const Vector& y) {
  ParameterVector next = theta_hat + phi.transpose() * residual(y, phi, theta_hat);
  if (!next.allFinite()) throw NumericalError("pure_gd_step: estimate is not finite");
  return next;
}

}  // namespace sisid
