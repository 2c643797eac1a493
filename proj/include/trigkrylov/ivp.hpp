#pragma once

#include "trigkrylov/linop.hpp"

namespace trigkrylov {

/// y'' = -A y + g,  y(0) = u,  y'(0) = v,  integrated up to t_final.
struct SecondOrderIVP {
  OperatorPtr op;
  Vector u;
  Vector v;
  Vector g;
  double t_final = 1.0;

  /// Throws DimensionError / PreconditionError on inconsistent data.
  void validate() const;
};

/// Position and velocity of a trajectory at one time.
struct State {
  Vector y;
  Vector dy;
};

}  // namespace trigkrylov
