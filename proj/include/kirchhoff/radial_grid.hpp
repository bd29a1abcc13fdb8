#pragma once

#include <Eigen/Dense>

#include <functional>

#include "kirchhoff/closed_form.hpp"

// Spectral collocation grid on (0, inf) for radial problems in R^3.
//
// Nodes are the images of the interior Chebyshev-Gauss-Lobatto points under
// the algebraic map r = L (1 + t) / (1 - t).  The endpoints t = -1 (r = 0)
// and t = +1 (r = inf) are never unknowns: discrete functions are
// polynomials in t pinned to zero at the far endpoint (matching the 1/r
// decay of the objects this grid exists for) and closed at the origin
// either by an even-function regularity condition (sector ell = 0) or by a
// Dirichlet zero (sectors ell >= 1, whose profiles vanish like r^ell).
//
// Quadrature uses Fejer's second rule on the same interior points, so no
// integrand is ever evaluated at r = 0 or at infinity.  Both the r^2 dr
// measure (3D radial integrals) and the plain dr measure (centrifugal
// terms) are exposed.

namespace kirchhoff {

enum class MapKind { algebraic };

enum class OriginClosure { regularity, dirichlet };

struct GridSpec {
  int n = 256;              // number of interior nodes, at least 16
  double map_scale = 1.0;   // L in the algebraic map
  MapKind kind = MapKind::algebraic;
};

/// Value of a possibly non-convergent discrete integral, together with the
/// measured decay exponent p of the integrand samples (f ~ r^{-p} at the
/// last nodes) and whether that exponent makes Int f^2 r^2 dr finite.
struct TruncatedIntegral {
  double value;
  double tail_exponent;
  bool tail_integrable;
};

class RadialGrid {
 public:
  explicit RadialGrid(const GridSpec& spec);

  int size() const { return n_; }
  double map_scale() const { return scale_; }

  /// Interior nodes, strictly increasing, all positive.
  const Eigen::VectorXd& nodes() const { return r_; }

  /// Weights for Int_0^inf f(r) r^2 dr.
  const Eigen::VectorXd& weights_r2() const { return w_r2_; }

  /// Weights for Int_0^inf f(r) dr.
  const Eigen::VectorXd& weights_dr() const { return w_dr_; }

  double integrate_r2(const Eigen::VectorXd& f) const;
  double integrate_dr(const Eigen::VectorXd& f) const;

  Eigen::VectorXd sample(const std::function<double(double)>& fn) const;

  /// d/dr and d^2/dr^2 of the interpolant with the regularity closure,
  /// evaluated at the nodes.  Exact for polynomials in the mapped variable
  /// up to the grid order whenever they satisfy the closure conditions.
  const Eigen::MatrixXd& d1() const { return d1_reg_; }
  const Eigen::MatrixXd& d2() const { return d2_reg_; }

  Eigen::MatrixXd derivative_matrix(OriginClosure closure) const;

  /// Bilinear form Int [f' g' + ell(ell+1) f g / r^2] r^2 dr on the sector
  /// of angular momentum ell, as an exactly symmetric matrix.  Both pieces
  /// are integrated exactly for grid interpolants (their integrands are
  /// polynomials in the mapped variable), so this is the true energy of the
  /// underlying trial space.  The origin closure defaults to the sector's
  /// natural one.
  Eigen::MatrixXd sector_stiffness(int ell) const;
  Eigen::MatrixXd sector_stiffness(int ell, OriginClosure closure) const;

  /// The H1 inner product used as the metric everywhere: identical to the
  /// sector stiffness.
  Eigen::MatrixXd sector_gram(int ell) const;

  /// Diagonal L2 mass form Int f g r^2 dr.
  Eigen::MatrixXd sector_mass() const;

  /// Discrete Int f^2 r^2 dr with a tail-decay diagnostic; meaningful as a
  /// truncated value even when the continuum integral diverges.
  TruncatedIntegral l2_mass(const Eigen::VectorXd& f) const;

  /// Weighted mass form Int w(r) f g r^2 dr, integrated exactly against the
  /// trial-space products.  The weight must decay fast enough (r^{-4} or
  /// better) for the integral to exist on the decaying trial functions.
  Eigen::MatrixXd weighted_mass(const std::function<double(double)>& weight,
                                OriginClosure closure = OriginClosure::regularity) const;

  /// Load vector of the functional f -> Int w(r) f r^2 dr on the trial
  /// space, same exact rule and the same decay requirement as above.
  Eigen::VectorXd weak_load(const std::function<double(double)>& weight,
                            OriginClosure closure = OriginClosure::regularity) const;

  static OriginClosure natural_closure(int ell) {
    return ell == 0 ? OriginClosure::regularity : OriginClosure::dirichlet;
  }

 private:
  int n_;
  double scale_;
  Eigen::VectorXd r_;       // ascending interior nodes
  Eigen::VectorXd w_r2_;
  Eigen::VectorXd w_dr_;
  Eigen::MatrixXd d1_reg_, d2_reg_;
  Eigen::MatrixXd d1_dir_;
  Eigen::MatrixXd stiff_reg_, stiff_dir_;    // exact Int f' g' r^2 dr
  Eigen::MatrixXd centri_reg_, centri_dir_;  // exact Int f g dr
  Eigen::VectorXd aux_r_;                    // radii of the exact rule
  Eigen::VectorXd aux_w_r2_;                 // its weights for Int . r^2 dr
  Eigen::MatrixXd eval_reg_, eval_dir_;      // trial values at those radii
};

RadialGrid build_grid(const GridSpec& spec);

/// Pointwise weight 5 u^4 at the nodes (the sampled potential).
Eigen::VectorXd potential_weight(const RadialGrid& grid, const BubbleSpec& spec);

/// Mass form of the multiplication operator 5 u^4, Int 5 u^4 f g r^2 dr.
Eigen::MatrixXd potential_matrix(const RadialGrid& grid, const BubbleSpec& spec,
                                 OriginClosure closure = OriginClosure::regularity);

}  // namespace kirchhoff
