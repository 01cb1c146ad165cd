#ifndef UCPM_RADONNIKODYM_HPP
#define UCPM_RADONNIKODYM_HPP

#include "ucpm/dilation.hpp"

namespace ucpm {

// Radon-Nikodym operator T in rho(A)' with theta = V^* T rho V, 0 <= T <= 1.
struct RnOperator {
  Matrix T;
  double commutant_residual = 0.0;     // max_i || rho_i T - T rho_i ||
  double interval_residual = 0.0;      // spectrum overshoot beyond [0, 1]
  double reproduction_residual = 0.0;  // max_i || V^* T rho_i V - theta_i ||
  double discarded_mass = 0.0;         // Gram mass outside the base support

  bool within(const Tolerance& tol) const {
    return commutant_residual <= 10.0 * tol.atol &&
           interval_residual <= tol.atol &&
           reproduction_residual <= 10.0 * tol.atol;
  }
};

// True iff 0 <= theta <= phi in the completely positive order, decided on
// the Gram forms.
bool in_order_interval(const CpMap& theta, const CpMap& phi,
                       const Tolerance& tol = {});

// T = (c^+)^* G_theta c^+ through the base's retained coordinate factor.
// On a non-minimal base the operator is completed by
// (tr G_theta / tr G_phi) * (1 - range projection), the unique affine
// completion that keeps f -> k_mu(f) unital.
RnOperator rn_operator(const CpMap& theta, const StinespringTriple& base,
                       const Tolerance& tol = {});

// Inverse direction: phi_T(b_i) = V^* T rho(b_i) V.
CpMap map_from_operator(const Matrix& T, const StinespringTriple& base,
                        const Tolerance& tol = {});

}  // namespace ucpm

#endif
