#pragma once

#include <vector>

#include "kirchhoff/closed_form.hpp"

// Rediscovers the solution family without evaluating the closed form inside
// the solver: the fixed-coefficient profile comes from integrating the radial
// ODE -c (phi'' + 2 phi'/r) = phi^5 outward from a series start at the
// origin, and the self-consistent coefficient comes from iterating
// c <- a + b sqrt(c) E with E measured from the shot profile by quadrature.
// Closed-form values enter only the final max_rel_err comparison.

namespace kirchhoff {

struct ShootResult {
  double alpha = 0.0;           // initial height phi(0)
  std::vector<double> radii;    // accepted integrator nodes, starting at 0
  std::vector<double> profile;  // phi at those nodes
  double lambda_fit = 0.0;      // dilation scale from the height relation
  double lambda_tail = 0.0;     // same scale inferred from the far-field fit
  double decay_constant = 0.0;  // C in the fitted tail C / sqrt(r^2 + d^2)
  double grad_energy = 0.0;     // quadrature of the gradient energy + tail
  double max_rel_err = 0.0;     // worst deviation from the closed form
  double c = 0.0;               // diffusion coefficient the profile solves
  int iterations = 0;           // fixed-point steps (self-consistent runs)
};

struct FixedPointResult {
  double c = 0.0;
  int iterations = 0;
};

// Integrates the fixed-c radial problem from phi(0) = alpha out to 50 times
// the family width. Every positive alpha lands on a member of the scaling
// family, with lambda = (3^{1/4} / alpha)^2.
ShootResult shoot_ground_state(double c, double alpha);

// Iterates c <- a + b sqrt(c) grad_energy from c = a. The map contracts with
// factor kappa < 1/2 near the fixed point, so the count stays small; the cap
// of 1000 iterations turns a non-converging configuration into an error.
FixedPointResult kirchhoff_fixed_point(const KirchhoffParams& params,
                                       double tol = 1e-12,
                                       double grad_energy = bubble_gradient_energy());

// Measures the gradient energy of a unit-coefficient shot by quadrature,
// feeds it to the fixed point, and shoots again at the converged c. The
// reported max_rel_err compares against the full solution family.
ShootResult self_consistent_rediscovery(const KirchhoffParams& params,
                                        double alpha = bubble_value(0.0));

// Classic shooting: bisects on alpha until the far-field decay constant
// lim r phi(r) matches the target. The decay falls monotonically in alpha,
// so the bracket must straddle the target.
ShootResult shoot_to_decay(double c, double decay, double alpha_lo,
                           double alpha_hi, double rel_tol = 1e-10);

}  // namespace kirchhoff
