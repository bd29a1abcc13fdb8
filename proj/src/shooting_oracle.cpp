#include "kirchhoff/shooting_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRelTol = 5e-13;
constexpr double kDomainWidths = 50.0;

double pow5(double v) {
  const double v2 = v * v;
  return v2 * v2 * v;
}

using State = std::array<double, 3>;  // phi, phi', accumulated gradient energy

State ode_rhs(double r, const State& y, double c) {
  return {y[1], -2.0 * y[1] / r - pow5(y[0]) / c, 4.0 * kPi * y[1] * y[1] * r * r};
}

// Cash-Karp embedded pair; the 4th-order line is the error estimate.
struct StepResult {
  State y;
  double error_ratio;
};

StepResult rk_step(double r, const State& y, double h, double c,
                   const std::array<double, 3>& atol) {
  static constexpr double kA[6][5] = {
      {0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0},
      {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0},
      {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0},
      {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
  static constexpr double kC[6] = {0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1, 7.0 / 8};
  static constexpr double kB5[6] = {37.0 / 378,    0, 250.0 / 621,
                                    125.0 / 594,   0, 512.0 / 1771};
  static constexpr double kB4[6] = {2825.0 / 27648,  0,
                                    18575.0 / 48384, 13525.0 / 55296,
                                    277.0 / 14336,   1.0 / 4};

  State k[6];
  k[0] = ode_rhs(r, y, c);
  for (int stage = 1; stage < 6; ++stage) {
    State arg = y;
    for (int j = 0; j < stage; ++j)
      for (int i = 0; i < 3; ++i) arg[i] += h * kA[stage][j] * k[j][i];
    k[stage] = ode_rhs(r + kC[stage] * h, arg, c);
  }

  StepResult out{y, 0.0};
  for (int i = 0; i < 3; ++i) {
    double high = 0.0, low = 0.0;
    for (int stage = 0; stage < 6; ++stage) {
      high += kB5[stage] * k[stage][i];
      low += kB4[stage] * k[stage][i];
    }
    out.y[i] = y[i] + h * high;
    const double scale =
        atol[i] + kRelTol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    out.error_ratio = std::max(out.error_ratio, std::abs(h * (high - low)) / scale);
  }
  return out;
}

struct TailFit {
  double decay;   // C in phi = C / sqrt(r^2 + d^2)
  double offset;  // d
};

TailFit fit_tail(double r1, double phi1, double r2, double phi2) {
  const double c_sq = (r1 * r1 - r2 * r2) /
                      (1.0 / (phi1 * phi1) - 1.0 / (phi2 * phi2));
  const double d_sq = c_sq / (phi2 * phi2) - r2 * r2;
  if (!(c_sq > 0.0) || !(d_sq > 0.0))
    throw std::runtime_error("far-field tail fit degenerated");
  return {std::sqrt(c_sq), std::sqrt(d_sq)};
}

// Exact integral of 4 pi C^2 r^4 / (r^2 + d^2)^3 over [R, infinity).
double tail_energy(const TailFit& fit, double R) {
  const double d = fit.offset;
  const double s = R * R + d * d;
  const double angle = kPi / 2 - std::atan(R / d);
  const double i1 = angle / d;
  const double i2 = angle / (2 * d * d * d) - R / (2 * d * d * s);
  const double i3 = 3 * angle / (8 * d * d * d * d * d) - R / (4 * d * d * s * s) -
                    3 * R / (8 * d * d * d * d * s);
  return 4.0 * kPi * fit.decay * fit.decay * (i1 - 2 * d * d * i2 + d * d * d * d * i3);
}

}  // namespace

ShootResult shoot_ground_state(double c, double alpha) {
  if (!(std::isfinite(c) && c > 0.0))
    throw std::domain_error("diffusion coefficient must be positive");
  if (!(std::isfinite(alpha) && alpha > 0.0))
    throw std::domain_error("initial height must be positive");

  ShootResult result;
  result.alpha = alpha;
  result.c = c;
  const double root3_4 = bubble_value(0.0);
  result.lambda_fit = (root3_4 / alpha) * (root3_4 / alpha);
  const double width = result.lambda_fit * std::sqrt(c);
  const double r_end = kDomainWidths * width;

  // Series start past the coordinate singularity: phi = alpha + a2 r^2 + a4 r^4.
  const double a2 = -pow5(alpha) / (6.0 * c);
  const double a4 = pow5(alpha) * alpha * alpha * alpha * alpha / (24.0 * c * c);
  const double r0 = 1e-3 * width;
  State y = {alpha + a2 * r0 * r0 + a4 * r0 * r0 * r0 * r0,
             2.0 * a2 * r0 + 4.0 * a4 * r0 * r0 * r0,
             4.0 * kPi * (4.0 * a2 * a2 * std::pow(r0, 5) / 5.0 +
                          16.0 * a2 * a4 * std::pow(r0, 7) / 7.0)};

  result.radii.push_back(0.0);
  result.profile.push_back(alpha);
  result.radii.push_back(r0);
  result.profile.push_back(y[0]);

  const std::array<double, 3> atol = {1e-14 * alpha, 1e-14 * alpha / width,
                                      1e-14 * std::sqrt(c)};
  double r = r0;
  double h = r0;
  long steps = 0;
  while (r < r_end * (1.0 - 1e-15)) {
    if (++steps > 2000000)
      throw std::runtime_error("integrator exceeded its step budget");
    h = std::min(h, r_end - r);
    const StepResult step = rk_step(r, y, h, c, atol);
    if (!std::isfinite(step.y[0]) || !std::isfinite(step.y[1]))
      throw std::runtime_error("integrator blew up");
    if (step.error_ratio <= 1.0) {
      r += h;
      y = step.y;
      result.radii.push_back(r);
      result.profile.push_back(y[0]);
    }
    const double factor =
        step.error_ratio > 0.0
            ? std::clamp(0.9 * std::pow(step.error_ratio, -0.2), 0.2, 5.0)
            : 5.0;
    h *= factor;
  }

  const size_t last = result.radii.size() - 1;
  const TailFit fit = fit_tail(result.radii[last - 1], result.profile[last - 1],
                               result.radii[last], result.profile[last]);
  result.decay_constant = fit.decay;
  result.lambda_tail = fit.offset / std::sqrt(c);
  result.grad_energy = y[2] + tail_energy(fit, r_end);

  const double inv_sqrt_lambda = 1.0 / std::sqrt(result.lambda_fit);
  for (size_t i = 0; i < result.radii.size(); ++i) {
    const double reference =
        inv_sqrt_lambda * bubble_value(result.radii[i] / width);
    result.max_rel_err = std::max(
        result.max_rel_err, std::abs(result.profile[i] - reference) / reference);
  }
  return result;
}

FixedPointResult kirchhoff_fixed_point(const KirchhoffParams& params, double tol,
                                       double grad_energy) {
  if (!(std::isfinite(params.a) && params.a > 0.0))
    throw std::domain_error("coefficient a must be positive");
  if (!(std::isfinite(params.b) && params.b >= 0.0))
    throw std::domain_error("coefficient b must be nonnegative");
  if (!(std::isfinite(tol) && tol > 0.0))
    throw std::domain_error("tolerance must be positive");
  if (!(std::isfinite(grad_energy) && grad_energy > 0.0))
    throw std::domain_error("gradient energy must be positive");

  FixedPointResult out{params.a, 0};
  while (true) {
    if (++out.iterations > 1000)
      throw std::runtime_error("fixed-point iteration exceeded 1000 steps");
    const double next = params.a + params.b * std::sqrt(out.c) * grad_energy;
    const double change = std::abs(next - out.c);
    out.c = next;
    if (change < tol * out.c) return out;
  }
}

ShootResult self_consistent_rediscovery(const KirchhoffParams& params,
                                        double alpha) {
  const ShootResult probe = shoot_ground_state(1.0, alpha);
  const FixedPointResult fixed_point =
      kirchhoff_fixed_point(params, 1e-12, probe.grad_energy);
  ShootResult result = shoot_ground_state(fixed_point.c, alpha);
  result.iterations = fixed_point.iterations;

  const BubbleSpec spec{params, result.lambda_fit, {0.0, 0.0, 0.0}};
  result.max_rel_err = 0.0;
  for (size_t i = 0; i < result.radii.size(); ++i) {
    const double reference = radial_value(spec, result.radii[i]);
    result.max_rel_err = std::max(
        result.max_rel_err, std::abs(result.profile[i] - reference) / reference);
  }
  return result;
}

ShootResult shoot_to_decay(double c, double decay, double alpha_lo,
                           double alpha_hi, double rel_tol) {
  if (!(std::isfinite(decay) && decay > 0.0))
    throw std::domain_error("target decay constant must be positive");
  if (!(std::isfinite(alpha_lo) && std::isfinite(alpha_hi) && alpha_lo > 0.0 &&
        alpha_lo < alpha_hi))
    throw std::domain_error("bracket must satisfy 0 < alpha_lo < alpha_hi");
  if (!(std::isfinite(rel_tol) && rel_tol > 0.0))
    throw std::domain_error("tolerance must be positive");

  // The decay constant falls strictly in alpha, so bisection applies.
  ShootResult lo = shoot_ground_state(c, alpha_lo);
  ShootResult hi = shoot_ground_state(c, alpha_hi);
  if (!(lo.decay_constant > decay && decay > hi.decay_constant))
    throw std::domain_error("bracket does not straddle the target decay");

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo.alpha + hi.alpha);
    ShootResult shot = shoot_ground_state(c, mid);
    if (std::abs(shot.decay_constant - decay) <= rel_tol * decay ||
        hi.alpha - lo.alpha <= rel_tol * mid)
      return shot;
    (shot.decay_constant > decay ? lo : hi) = std::move(shot);
  }
  return shoot_ground_state(c, 0.5 * (lo.alpha + hi.alpha));
}

}  // namespace kirchhoff
