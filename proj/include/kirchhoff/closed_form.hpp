#pragma once

#include <array>

// Closed-form solution family of the nonlocal critical equation
//
//     -(a + b * ||grad u||_{L2}^2) Lap(u) = u^5   on R^3,  a > 0, b >= 0.
//
// Every positive solution is a rescaled bubble
//
//     u(x) = lambda^{-1/2} * Q((x / sqrt(c) - x0) / lambda),
//
// where Q(r) = 3^{1/4} (1 + r^2)^{-1/2} is the normalized profile solving
// -Lap(Q) = Q^5 and c is the unique positive solution of
// c = a + b * sqrt(c) * ||grad Q||^2.  Everything in this header is exact
// algebra on that family: values, gradients, Laplacians, the generators of
// the dilation and translation branches, and the scaling constants.  No
// numerical differentiation or quadrature appears here; the grid and
// shooting modules cross-check these formulas independently.

namespace kirchhoff {

using Vec3 = std::array<double, 3>;

/// Coefficients (a, b) of the nonlocal problem.  a must be positive.
/// b = 0 is admitted and reduces the equation to the local critical case.
struct KirchhoffParams {
  double a = 1.0;
  double b = 0.0;
};

/// Constants induced by (a, b):
///   grad_energy = ||grad Q||^2 = 3*sqrt(3)*pi^2/4,
///   sqrt_c      = (b*grad_energy + sqrt(b^2*grad_energy^2 + 4a)) / 2,
///   c           = sqrt_c^2 (exactly, by construction).
struct ScalingConstants {
  double grad_energy;
  double sqrt_c;
  double c;
};

/// One member of the solution family: width lambda > 0, offset x0.
/// The physical center of the bubble is sqrt(c) * x0, independent of lambda.
struct BubbleSpec {
  KirchhoffParams params;
  double lambda = 1.0;
  Vec3 x0 = {0.0, 0.0, 0.0};
};

/// Normalized profile Q(r) = 3^{1/4} (1 + r^2)^{-1/2}, r >= 0.
double bubble_value(double r);

/// dQ/dr.
double bubble_deriv(double r);

/// ||grad Q||_{L2}^2 = 3*sqrt(3)*pi^2/4.
double bubble_gradient_energy();

/// Solve c = a + b*sqrt(c)*||grad Q||^2 by the closed quadratic root.
/// Throws std::domain_error for a <= 0, b < 0 or non-finite input.
ScalingConstants scaling_constants(const KirchhoffParams& p);

/// b * ||grad u||^2 / (2c), always in [0, 1/2).  The strict upper bound is
/// what makes the rank-one fixed-point argument in the verifier contract.
double contraction_ratio(const KirchhoffParams& p);

/// Physical center sqrt(c) * x0 of the bubble.
Vec3 bubble_center(const BubbleSpec& spec);

/// u(x) for the family member described by spec.
double solution_value(const BubbleSpec& spec, const Vec3& x);

/// grad u (x), componentwise closed form.
Vec3 solution_gradient(const BubbleSpec& spec, const Vec3& x);

/// Lap u (x), assembled from the profile's second derivative terms rather
/// than from the equation itself, so residual checks stay meaningful.
double solution_laplacian(const BubbleSpec& spec, const Vec3& x);

/// ||grad u||_{L2}^2 = sqrt(c) * ||grad Q||^2; lambda- and x0-independent.
double solution_gradient_energy(const BubbleSpec& spec);

/// Pointwise residual -(a + b*||grad u||^2) * Lap(u) - u^5 at x.
double equation_residual(const BubbleSpec& spec, const Vec3& x);

/// Generator of the dilation branch: u/2 + (x - center) . grad u.
double dilation_mode(const BubbleSpec& spec, const Vec3& x);

/// Lap of the dilation mode, closed form.
double dilation_mode_laplacian(const BubbleSpec& spec, const Vec3& x);

/// Generator of the translation branch along `axis` (0, 1 or 2): du/dx_axis.
double translation_mode(const BubbleSpec& spec, int axis, const Vec3& x);

/// Lap of the translation mode, closed form.
double translation_mode_laplacian(const BubbleSpec& spec, int axis, const Vec3& x);

// ----------------------------------------------------------------------
// Radial profiles about the bubble center, consumed by the grid modules.
// radial_value gives U with u(x) = U(|x - center|); the dilation mode is
// radial about the same center and decays like 1/r, so it carries finite
// gradient energy even though it is not in L^2.

double radial_value(const BubbleSpec& spec, double r);
double radial_deriv(const BubbleSpec& spec, double r);
double radial_laplacian(const BubbleSpec& spec, double r);
double dilation_profile(const BubbleSpec& spec, double r);
double dilation_profile_deriv(const BubbleSpec& spec, double r);
double dilation_profile_laplacian(const BubbleSpec& spec, double r);

}  // namespace kirchhoff
