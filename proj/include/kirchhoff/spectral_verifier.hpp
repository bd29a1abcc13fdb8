#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "kirchhoff/operator_assembly.hpp"
#include "kirchhoff/radial_grid.hpp"

// Certification layer on top of the sector operators. Everything here reduces
// to generalized symmetric eigenproblems of a sector form against the
// gradient Gram matrix, so kernel modes of the linearized operator show up as
// isolated eigenvalues at zero instead of drowning in the essential spectrum.
// Reports carry explicit values and tolerances for every claim and a
// three-way status: numerical evidence can be inconclusive, and that is never
// rounded up to a pass.

namespace kirchhoff {

enum class Status { pass, fail, inconclusive };

const char* to_string(Status status);

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Eigenpairs of one sector pencil. Eigenvalues ascend; eigenvectors are
// columns, Gram-orthonormal, with the largest-magnitude coefficient made
// positive so repeated runs are bit-identical.
struct EigenResult {
  int ell = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

struct ConvergencePoint {
  int n = 0;
  double kernel_magnitude = 0.0;  // largest |mu| inside the kernel cluster
  double coercivity_gap = 0.0;    // smallest |mu| outside it
  double worst_alignment = 0.0;   // weakest symmetry-mode cosine (sectors 0, 1)
  double spectral_scale = 0.0;    // largest |mu| across sectors
};

struct VerificationReport {
  Status status = Status::fail;
  std::vector<IdentityCheck> identity_checks;
  std::map<int, int> kernel_counts;         // sector -> eigenvalues below tol_kernel
  std::map<int, double> kernel_alignments;  // sector -> |cos| vs analytic mode
  double coercivity_gap = 0.0;
  int total_kernel_dim = 0;  // multiplicity-weighted: sum of (2l+1) * count
  double tol_kernel = 0.0;
  std::vector<ConvergencePoint> convergence;
  std::vector<std::string> notes;
};

struct VerifierTolerances {
  // Threshold for |mu| to count as a kernel eigenvalue. Non-positive selects
  // the adaptive rule: 10x the dual residual of the sampled symmetry modes,
  // floored at 1e-12, so the threshold tracks the discretization error.
  double tol_kernel = 0.0;
  double alignment_min = 0.999;
};

// Parallelism cap for the sector scans, from KIRCHHOFF_THREADS when set.
int verifier_thread_budget();

// k algebraically smallest eigenpairs of the sector form against the Gram.
EigenResult lowest_eigenpairs(const SectorOperator& op, int k);

// Number of eigenvalues below -rel_tol * max|mu|.
int negative_index(const SectorOperator& op, double rel_tol = 1e-8);

// Scans sectors 0..ell_max of the full linearized form, clusters near-zero
// eigenvalues, and checks that the kernel is exactly the symmetry space:
// one radial mode aligned with the dilation profile, one ell = 1 mode aligned
// with the slope profile, nothing higher, total dimension 4. Eigenvalues
// within a factor 10 above tol_kernel make the report inconclusive.
VerificationReport kernel_report(const RadialGrid& grid, const BubbleSpec& spec,
                                 int ell_max,
                                 const VerifierTolerances& tolerances = {});

// Replays the uniqueness argument for the radial kernel step by step:
// the slope/dilation pairing vanishes, the frozen operator maps u to its
// quintic load, the contraction ratio stays below 1/2 with margin, the
// operator-level fixed-point multiplier matches it, and iterating the
// pairing map collapses to zero, confirmed by a final rank-one solve.
VerificationReport proof_chain_check(const RadialGrid& grid, const BubbleSpec& spec);

// Repeats kernel_report over an ascending list of grid sizes at the natural
// map scale. Passes when kernel magnitudes keep falling (or sit at the
// rounding floor), the gap moves by less than 10% between the two finest
// grids, and alignments do not regress.
VerificationReport convergence_sweep(const BubbleSpec& spec,
                                     const std::vector<int>& n_list, int ell_max,
                                     const VerifierTolerances& tolerances = {});

}  // namespace kirchhoff
