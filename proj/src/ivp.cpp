#include "trigkrylov/ivp.hpp"

#include <cmath>

namespace trigkrylov {

void SecondOrderIVP::validate() const {
  if (!op) throw PreconditionError("ivp: missing operator");
  const auto n = static_cast<Eigen::Index>(op->dim());
  if (u.size() != n || v.size() != n || g.size() != n) {
    throw DimensionError("ivp: u, v, g must have the operator dimension");
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw PreconditionError("ivp: t_final must be positive and finite");
  }
}

}  // namespace trigkrylov
