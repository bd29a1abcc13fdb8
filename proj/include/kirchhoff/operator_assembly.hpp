#pragma once

#include <Eigen/Dense>

#include <optional>

#include "kirchhoff/closed_form.hpp"
#include "kirchhoff/radial_grid.hpp"

// Discretized second variation around the ground state, one angular sector
// at a time.
//
// The linearization at u splits into a local part
//
//   A phi = -c Lap(phi) - 5 u^4 phi
//
// and, in the radial sector only, a nonlocal rank-one correction
// 2b (Int grad u . grad phi) (-Lap u), which at form level is
// +2b (g^T phi) g with g_i the H1 pairing of u against basis function i.
//
// Sector functions follow one convention throughout: a profile f multiplies
// an L2(S^2)-orthonormal spherical harmonic, so a plain radial function v
// appears as sqrt(4 pi) v and every sector form evaluates to the true 3D
// integral with no extra angular factors.

namespace kirchhoff {

struct RankOneTerm {
  double coeff;         // 2 b
  Eigen::VectorXd vec;  // H1 pairing of the ground state with each basis row
};

struct SectorOperator {
  int ell = 0;
  Eigen::MatrixXd A_form;  // c * stiffness - potential
  Eigen::MatrixXd gram;    // H1 metric of the sector
  std::optional<RankOneTerm> rank_one;

  Eigen::MatrixXd dense_form() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
};

/// Ground-state profile, dilation mode profile and translation mode profile
/// sampled at the nodes, carrying the sector normalization above.  The
/// translation profile is the ell = 1 radial factor of du/dx_i.
Eigen::VectorXd sampled_solution_profile(const RadialGrid& grid, const BubbleSpec& spec);
Eigen::VectorXd sampled_dilation_profile(const RadialGrid& grid, const BubbleSpec& spec);
Eigen::VectorXd sampled_translation_profile(const RadialGrid& grid, const BubbleSpec& spec);

/// Load vector of the functional phi -> Int (-4 u^5) phi over R^3 on the
/// radial sector.
Eigen::VectorXd quintic_load(const RadialGrid& grid, const BubbleSpec& spec);

SectorOperator assemble_A_sector(const RadialGrid& grid, const BubbleSpec& spec, int ell);
SectorOperator assemble_Lplus_sector(const RadialGrid& grid, const BubbleSpec& spec, int ell);

/// Int grad u . grad phi for a radial-sector grid function phi.
double nonlocal_pairing(const RadialGrid& grid, const BubbleSpec& spec,
                        const Eigen::VectorXd& phi);

/// Norm of a load vector in the dual of the H1 metric, |l|_{K^{-1}}.
double dual_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& load);

/// Eigendecomposition of the pencil (A_form, gram) with the near-singular
/// modes dropped, exposing solves on the remaining subspace.  The full
/// operator solve applies the rank-one correction by the Sherman-Morrison
/// identity on top of two local solves.
class SectorSolver {
 public:
  explicit SectorSolver(const SectorOperator& op, double drop_rel_tol = 1e-8);

  const Eigen::VectorXd& eigenvalues() const { return mu_; }
  int dropped_modes() const { return dropped_; }

  /// 1 + 2b g^T A^{-1} g, the Sherman-Morrison scalar; 1 when there is no
  /// rank-one term.  Stays away from zero exactly because the contraction
  /// ratio kappa is below 1/2.
  double denominator() const { return denominator_; }

  /// Local solve A x = load on the retained subspace.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& load) const;

  /// Full solve (A + 2b g g^T) x = load on the retained subspace.
  Eigen::VectorXd solve(const Eigen::VectorXd& load) const;

  /// Component of a load reachable from the retained subspace; solves are
  /// exact against this projection, not against raw loads.
  Eigen::VectorXd project_load(const Eigen::VectorXd& load) const;

  /// Removes the dropped modes from a grid function (gram-orthogonally).
  Eigen::VectorXd project_out_dropped(const Eigen::VectorXd& f) const;

 private:
  Eigen::VectorXd mu_;        // pencil eigenvalues, ascending
  Eigen::MatrixXd modes_;     // gram-orthonormal eigenvectors
  Eigen::VectorXd inv_mu_;    // 1/mu on retained modes, 0 on dropped
  std::optional<RankOneTerm> rank_one_;
  Eigen::MatrixXd gram_;
  int dropped_ = 0;
  double denominator_ = 1.0;
};

struct RankOneSolveResult {
  Eigen::VectorXd solution;
  double denominator;
};

/// One-shot Sherman-Morrison solve for a radial-sector operator carrying
/// the rank-one term.
RankOneSolveResult rank_one_solve(const SectorOperator& op, const Eigen::VectorXd& rhs);

}  // namespace kirchhoff
