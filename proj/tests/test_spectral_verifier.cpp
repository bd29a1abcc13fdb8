#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "kirchhoff/spectral_verifier.hpp"

using namespace kirchhoff;

namespace {

// Shells of the sector spectra at (a, b) = (1, 1). The same values repeat
// across sectors: the pencil inherits an exact degeneracy from the conformal
// structure of the quintic problem, so sector ell starts at shell ell.
constexpr double kShell2 = 95.06961742;
constexpr double kShell3 = 126.7594899;

const BubbleSpec kCoupled{KirchhoffParams{1.0, 1.0}, 1.0, {0.0, 0.0, 0.0}};

double natural_scale(const BubbleSpec& spec) {
  return scaling_constants(spec.params).sqrt_c * spec.lambda;
}

RadialGrid natural_grid(const BubbleSpec& spec, int n) {
  return RadialGrid(GridSpec{n, natural_scale(spec), MapKind::algebraic});
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

const IdentityCheck& find_check(const VerificationReport& report,
                                const std::string& name) {
  for (const IdentityCheck& check : report.identity_checks)
    if (check.name == name) return check;
  static IdentityCheck missing;
  REQUIRE_MESSAGE(false, "missing check ", name);
  return missing;
}

bool reports_identical(const VerificationReport& x, const VerificationReport& y) {
  if (x.status != y.status || x.total_kernel_dim != y.total_kernel_dim) return false;
  if (x.coercivity_gap != y.coercivity_gap || x.tol_kernel != y.tol_kernel)
    return false;
  if (x.identity_checks.size() != y.identity_checks.size()) return false;
  for (size_t i = 0; i < x.identity_checks.size(); ++i) {
    const IdentityCheck& a = x.identity_checks[i];
    const IdentityCheck& b = y.identity_checks[i];
    if (a.name != b.name || a.value != b.value || a.tolerance != b.tolerance ||
        a.pass != b.pass)
      return false;
  }
  if (x.kernel_counts != y.kernel_counts) return false;
  if (x.kernel_alignments != y.kernel_alignments) return false;
  if (x.convergence.size() != y.convergence.size()) return false;
  for (size_t i = 0; i < x.convergence.size(); ++i) {
    const ConvergencePoint& a = x.convergence[i];
    const ConvergencePoint& b = y.convergence[i];
    if (a.n != b.n || a.kernel_magnitude != b.kernel_magnitude ||
        a.coercivity_gap != b.coercivity_gap ||
        a.worst_alignment != b.worst_alignment ||
        a.spectral_scale != b.spectral_scale)
      return false;
  }
  return x.notes == y.notes;
}

}  // namespace

TEST_CASE("lowest eigenpairs are ordered, orthonormal, and sign-fixed") {
  const RadialGrid grid = natural_grid(kCoupled, 128);
  const SectorOperator op = assemble_Lplus_sector(grid, kCoupled, 0);
  const EigenResult out = lowest_eigenpairs(op, 6);

  CHECK(out.ell == 0);
  REQUIRE(out.eigenvalues.size() == 6);
  for (int i = 1; i < 6; ++i) REQUIRE(out.eigenvalues[i] >= out.eigenvalues[i - 1]);

  const Eigen::MatrixXd overlap =
      out.eigenvectors.transpose() * op.gram * out.eigenvectors -
      Eigen::MatrixXd::Identity(6, 6);
  CHECK(overlap.cwiseAbs().maxCoeff() < 1e-10);

  for (int j = 0; j < 6; ++j) {
    int imax = 0;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(out.eigenvectors(imax, j) > 0.0);
  }

  CHECK_THROWS_AS(lowest_eigenpairs(op, 0), std::domain_error);
  CHECK_THROWS_AS(lowest_eigenpairs(op, grid.size() + 1), std::domain_error);
}

TEST_CASE("sector pencils expose the conformal ladder") {
  const ScalingConstants sc = scaling_constants(kCoupled.params);
  const double g = bubble_gradient_energy();
  const RadialGrid grid = natural_grid(kCoupled, 128);

  // The ground state is an exact eigenvector of both pencils.
  const EigenResult bare =
      lowest_eigenpairs(assemble_A_sector(grid, kCoupled, 0), 3);
  CHECK(rel_err(bare.eigenvalues[0], -4.0 * sc.c) < 1e-9);

  const EigenResult full =
      lowest_eigenpairs(assemble_Lplus_sector(grid, kCoupled, 0), 4);
  CHECK(rel_err(full.eigenvalues[0],
                2.0 * kCoupled.params.b * sc.sqrt_c * g - 4.0 * sc.c) < 1e-9);
  CHECK(std::abs(full.eigenvalues[1]) < 1e-9);
  CHECK(rel_err(full.eigenvalues[2], kShell2) < 1e-8);
  CHECK(rel_err(full.eigenvalues[3], kShell3) < 1e-8);

  const EigenResult ell1 =
      lowest_eigenpairs(assemble_Lplus_sector(grid, kCoupled, 1), 3);
  CHECK(std::abs(ell1.eigenvalues[0]) < 1e-9);
  CHECK(rel_err(ell1.eigenvalues[1], kShell2) < 1e-8);
  CHECK(rel_err(ell1.eigenvalues[2], kShell3) < 1e-8);

  const EigenResult ell2 =
      lowest_eigenpairs(assemble_Lplus_sector(grid, kCoupled, 2), 2);
  CHECK(rel_err(ell2.eigenvalues[0], kShell2) < 1e-8);
  CHECK(rel_err(ell2.eigenvalues[1], kShell3) < 1e-8);

  // Away from the radial sector the rank-one term is absent, so the full and
  // frozen pencils are the same matrix problem.
  const EigenResult bare1 = lowest_eigenpairs(assemble_A_sector(grid, kCoupled, 1), 3);
  CHECK(bare1.eigenvalues == ell1.eigenvalues);
}

TEST_CASE("kernel report certifies the four-dimensional kernel") {
  const RadialGrid grid = natural_grid(kCoupled, 256);
  const VerificationReport report = kernel_report(grid, kCoupled, 4);

  CHECK(report.status == Status::pass);
  CHECK(report.total_kernel_dim == 4);
  REQUIRE(report.kernel_counts.size() == 5);
  CHECK(report.kernel_counts.at(0) == 1);
  CHECK(report.kernel_counts.at(1) == 1);
  CHECK(report.kernel_counts.at(2) == 0);
  CHECK(report.kernel_counts.at(3) == 0);
  CHECK(report.kernel_counts.at(4) == 0);
  CHECK(report.kernel_alignments.at(0) > 1.0 - 1e-9);
  CHECK(report.kernel_alignments.at(1) > 1.0 - 1e-9);
  CHECK(rel_err(report.coercivity_gap, kShell2) < 1e-6);
  CHECK(report.tol_kernel < 1e-7);
  CHECK(report.tol_kernel >= 1e-12);

  for (const char* name :
       {"kernel_dim_total", "kernel_count_ell_0", "kernel_count_ell_1",
        "kernel_count_higher", "alignment_ell_0", "alignment_ell_1",
        "kernel_magnitude", "inconclusive_band", "sector_gap_monotone"})
    CHECK(find_check(report, name).pass);

  REQUIRE(report.convergence.size() == 1);
  CHECK(report.convergence[0].n == 256);
  CHECK(report.convergence[0].kernel_magnitude < report.tol_kernel);
  CHECK_FALSE(report.notes.empty());
}

TEST_CASE("kernel report in the decoupled limit") {
  const BubbleSpec plain{KirchhoffParams{1.0, 0.0}, 1.0, {0.0, 0.0, 0.0}};
  const VerificationReport report =
      kernel_report(natural_grid(plain, 192), plain, 3);
  CHECK(report.status == Status::pass);
  CHECK(report.total_kernel_dim == 4);
  CHECK(report.kernel_counts.at(0) == 1);
  CHECK(report.kernel_counts.at(1) == 1);
}

TEST_CASE("kernel report flags ambiguity instead of passing it") {
  const RadialGrid grid = natural_grid(kCoupled, 96);
  VerifierTolerances tols;
  tols.tol_kernel = 9.6;  // puts the first spectral shell inside the gray band
  const VerificationReport report = kernel_report(grid, kCoupled, 2, tols);
  CHECK(report.status == Status::inconclusive);
  CHECK_FALSE(find_check(report, "inconclusive_band").pass);
  CHECK(find_check(report, "inconclusive_band").value > 0.0);
  CHECK_FALSE(report.notes.empty());

  CHECK_THROWS_AS(kernel_report(grid, kCoupled, 1), std::domain_error);
  VerifierTolerances bad;
  bad.alignment_min = 1.5;
  CHECK_THROWS_AS(kernel_report(grid, kCoupled, 2, bad), std::domain_error);
}

TEST_CASE("negative index matches the Morse count and survives refinement") {
  for (int n : {128, 192}) {
    const RadialGrid grid = natural_grid(kCoupled, n);
    CHECK(negative_index(assemble_A_sector(grid, kCoupled, 0)) == 1);
    CHECK(negative_index(assemble_Lplus_sector(grid, kCoupled, 0)) == 1);
    CHECK(negative_index(assemble_Lplus_sector(grid, kCoupled, 1)) == 0);
    CHECK(negative_index(assemble_A_sector(grid, kCoupled, 2)) == 0);
    CHECK(negative_index(assemble_Lplus_sector(grid, kCoupled, 3)) == 0);
  }
}

TEST_CASE("proof chain passes across the coefficient range") {
  for (auto [a, b] : {std::pair<double, double>{1.0, 1.0},
                      {100.0, 0.01},
                      {1.0, 1000.0},
                      {1.0, 0.0}}) {
    const BubbleSpec spec{KirchhoffParams{a, b}, 1.0, {0.0, 0.0, 0.0}};
    const VerificationReport report =
        proof_chain_check(natural_grid(spec, 128), spec);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(report.status == Status::pass);
    CHECK(find_check(report, "proof_kappa").value ==
          contraction_ratio(spec.params));
    CHECK(find_check(report, "proof_kappa").value < 0.5);
    CHECK(find_check(report, "proof_kappa_margin").pass);
    CHECK(find_check(report, "proof_recovered_pairing").value <= 1e-8);
  }
}

TEST_CASE("proof chain reports the link values faithfully") {
  const VerificationReport report =
      proof_chain_check(natural_grid(kCoupled, 192), kCoupled);
  CHECK(report.identity_checks.size() == 6);
  CHECK(find_check(report, "proof_pairing_e0").value < 1e-10);
  CHECK(find_check(report, "proof_Au_dual_residual").value < 1e-10);
  CHECK(find_check(report, "proof_contraction_multiplier").value < 1e-10);
  CHECK(rel_err(find_check(report, "proof_kappa_margin").value, 3.005316e-3) <
        1e-4);
}

TEST_CASE("convergence sweep holds the gap and the kernel floor") {
  const VerificationReport report = convergence_sweep(kCoupled, {96, 128, 192}, 3);
  CHECK(report.status == Status::pass);
  REQUIRE(report.convergence.size() == 3);
  for (const ConvergencePoint& point : report.convergence) {
    CHECK(rel_err(point.coercivity_gap, kShell2) < 1e-6);
    CHECK(point.kernel_magnitude <= 1e-11 * point.spectral_scale);
    CHECK(point.worst_alignment > 1.0 - 1e-9);
  }
  CHECK(find_check(report, "gap_stability").value < 1e-6);
  CHECK(find_check(report, "kernel_magnitude_trend").pass);
  CHECK(find_check(report, "alignment_trend").pass);
  CHECK(find_check(report, "subreports_pass").pass);
  CHECK(report.total_kernel_dim == 4);

  CHECK_THROWS_AS(convergence_sweep(kCoupled, {}, 3), std::domain_error);
  CHECK_THROWS_AS(convergence_sweep(kCoupled, {128, 128}, 3), std::domain_error);
  CHECK_THROWS_AS(convergence_sweep(kCoupled, {128, 96}, 3), std::domain_error);
}

TEST_CASE("sweep of the decoupled problem") {
  const BubbleSpec plain{KirchhoffParams{1.0, 0.0}, 1.0, {0.0, 0.0, 0.0}};
  const VerificationReport report = convergence_sweep(plain, {96, 128}, 2);
  CHECK(report.status == Status::pass);
  CHECK(report.total_kernel_dim == 4);
}

TEST_CASE("reports covary with the family scale") {
  const BubbleSpec wide{KirchhoffParams{1.0, 1.0}, 2.0, {0.0, 0.0, 0.0}};
  const VerificationReport narrow_report =
      kernel_report(natural_grid(kCoupled, 160), kCoupled, 2);
  const VerificationReport wide_report =
      kernel_report(natural_grid(wide, 160), wide, 2);
  CHECK(narrow_report.kernel_counts == wide_report.kernel_counts);
  CHECK(narrow_report.total_kernel_dim == wide_report.total_kernel_dim);
  CHECK(rel_err(narrow_report.coercivity_gap, wide_report.coercivity_gap) < 1e-9);
}

TEST_CASE("reports are deterministic") {
  const RadialGrid grid = natural_grid(kCoupled, 96);

  setenv("KIRCHHOFF_THREADS", "4", 1);
  const VerificationReport threaded = kernel_report(grid, kCoupled, 3);
  setenv("KIRCHHOFF_THREADS", "1", 1);
  const VerificationReport serial = kernel_report(grid, kCoupled, 3);
  unsetenv("KIRCHHOFF_THREADS");
  const VerificationReport ambient = kernel_report(grid, kCoupled, 3);

  CHECK(reports_identical(threaded, serial));
  CHECK(reports_identical(threaded, ambient));

  const SectorOperator op = assemble_Lplus_sector(grid, kCoupled, 0);
  const EigenResult first = lowest_eigenpairs(op, 5);
  const EigenResult second = lowest_eigenpairs(op, 5);
  CHECK(first.eigenvalues == second.eigenvalues);
  CHECK(first.eigenvectors == second.eigenvectors);
}
