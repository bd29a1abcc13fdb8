// End-to-end acceptance run.  Each criterion prints exactly one PASS/FAIL
// line with its wall time; the exit code is the number of failed criteria.
// Tolerances and runtime budgets are pinned here on purpose: this binary is
// the contract, the unit suites are the diagnostics.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kirchhoff/operator_assembly.hpp"
#include "kirchhoff/radial_grid.hpp"
#include "kirchhoff/report_io.hpp"
#include "kirchhoff/shooting_oracle.hpp"
#include "kirchhoff/spectral_verifier.hpp"
#include "oracles.hpp"

using namespace kirchhoff;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> failures;

void expect(bool ok, const std::string& message) {
  if (!ok) failures.push_back(message);
}

void expect_close(double got, double want, double rel_tol,
                  const std::string& what) {
  const double rel = std::abs(got - want) / std::abs(want);
  if (!(rel <= rel_tol)) {
    std::ostringstream text;
    text << what << ": got " << format_g17(got) << ", want "
         << format_g17(want) << " (rel " << rel << ")";
    failures.push_back(text.str());
  }
}

void expect_below(double value, double bound, const std::string& what) {
  if (!(std::abs(value) < bound)) {
    std::ostringstream text;
    text << what << ": |" << format_g17(value) << "| >= " << bound;
    failures.push_back(text.str());
  }
}

RadialGrid natural_grid(const BubbleSpec& spec, int n) {
  return RadialGrid(
      GridSpec{n, scaling_constants(spec.params).sqrt_c * spec.lambda,
               MapKind::algebraic});
}

// 1. Closed-form constants: grid quadrature and the adaptive oracle both
//    reproduce the gradient energy; the fixed point reproduces c.
void constants_criterion() {
  const BubbleSpec unit{KirchhoffParams{1.0, 0.0}, 1.0, {0.0, 0.0, 0.0}};
  const RadialGrid grid = natural_grid(unit, 128);
  const Eigen::VectorXd fu = sampled_solution_profile(grid, unit);
  const SectorOperator op = assemble_A_sector(grid, unit, 0);
  const double quadrature = fu.dot(op.gram * fu);
  const double adaptive = oracle::integrate_radial([](double r) {
    const double d = bubble_deriv(r);
    return 4.0 * kPi * d * d;
  });
  const double closed = bubble_gradient_energy();
  expect_close(quadrature, closed, 1e-9, "grid gradient energy");
  expect_close(adaptive, closed, 1e-9, "adaptive gradient energy");

  const KirchhoffParams coupled{1.0, 1.0};
  expect_close(kirchhoff_fixed_point(coupled).c, scaling_constants(coupled).c,
               1e-10, "fixed point vs closed form");
}

// 2. The closed-form family solves the equation pointwise at random
//    coefficients, widths, centers and sample points.
void residual_criterion() {
  std::mt19937 rng(0x5eed);
  std::uniform_real_distribution<double> coeff(0.1, 10.0);
  std::uniform_real_distribution<double> width(0.25, 4.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 40.0);

  for (int trial = 0; trial < 10; ++trial) {
    const BubbleSpec spec{KirchhoffParams{coeff(rng), coeff(rng)}, width(rng),
                          {offset(rng), offset(rng), offset(rng)}};
    const double scale =
        scaling_constants(spec.params).sqrt_c * spec.lambda;
    const Vec3 center = bubble_center(spec);
    for (int point = 0; point < 100; ++point) {
      Vec3 dir = {gauss(rng), gauss(rng), gauss(rng)};
      const double norm =
          std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
      const double r = radius(rng) * scale;
      const Vec3 x = {center[0] + r * dir[0] / norm,
                      center[1] + r * dir[1] / norm,
                      center[2] + r * dir[2] / norm};
      expect_below(equation_residual(spec, x), 1e-10, "equation residual");
    }
  }
}

// 3. The dilation mode is gradient-orthogonal to the solution, both satisfy
//    the frozen-coefficient identities pointwise, and the contraction ratio
//    stays below one half across the coefficient range.
void identities_criterion() {
  const BubbleSpec spec{KirchhoffParams{1.0, 1.0}, 1.0, {0.0, 0.0, 0.0}};
  const double pairing = oracle::integrate_radial([&](double r) {
    return 4.0 * kPi * radial_deriv(spec, r) * dilation_profile_deriv(spec, r);
  });
  expect_below(pairing, 1e-10, "grad u vs grad e0 pairing");

  const double c = scaling_constants(spec.params).c;
  for (int i = 0; i < 100; ++i) {
    const double r = 40.0 * i / 99.0;
    const Vec3 x = {r, 0.2 * r, -0.1 * r};
    const double u = solution_value(spec, x);
    const double freeze_u =
        -c * solution_laplacian(spec, x) - 5.0 * std::pow(u, 5) +
        4.0 * std::pow(u, 5);
    expect_below(freeze_u, 1e-10, "frozen operator on u plus quintic load");
    const double freeze_e0 = -c * dilation_mode_laplacian(spec, x) -
                             5.0 * std::pow(u, 4) * dilation_mode(spec, x);
    expect_below(freeze_e0, 1e-10, "frozen operator on the dilation mode");
  }

  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double a = 0.1 * std::pow(10.0, i / 2.0);
      const double b = 0.1 * std::pow(10.0, j / 2.0);
      const double kappa = contraction_ratio(KirchhoffParams{a, b});
      expect(kappa < 0.5, "contraction ratio at a=" + format_g17(a) +
                              ", b=" + format_g17(b) + " is " +
                              format_g17(kappa));
    }
  }
}

// 4. The kernel is exactly the four-dimensional symmetry space and the
//    coercivity gap is stable under grid refinement.
void nondegeneracy_criterion() {
  const BubbleSpec spec{KirchhoffParams{1.0, 1.0}, 1.0, {0.0, 0.0, 0.0}};
  const VerificationReport fine =
      kernel_report(natural_grid(spec, 256), spec, 4);
  expect(fine.status == Status::pass, "kernel report status is not PASS");
  expect(fine.total_kernel_dim == 4,
         "kernel dimension " + std::to_string(fine.total_kernel_dim));
  expect(fine.kernel_alignments.at(0) > 0.999, "radial alignment too low");
  expect(fine.kernel_alignments.at(1) > 0.999, "slope alignment too low");
  for (int ell = 2; ell <= 4; ++ell)
    expect(fine.kernel_counts.at(ell) == 0,
           "spurious kernel in sector " + std::to_string(ell));

  const VerificationReport coarse =
      kernel_report(natural_grid(spec, 192), spec, 4);
  const double drift =
      std::abs(fine.coercivity_gap - coarse.coercivity_gap) /
      coarse.coercivity_gap;
  expect(drift <= 0.10,
         "coercivity gap drift " + format_g17(drift) + " exceeds 10%");
}

// 5. The full form differs from the frozen form by exactly the rank-one
//    nonlocal term, and the rank-one solver inverts it.
void sector_structure_criterion() {
  const BubbleSpec spec{KirchhoffParams{1.0, 1.0}, 1.0, {0.0, 0.0, 0.0}};
  const RadialGrid grid = natural_grid(spec, 128);

  for (int ell = 1; ell <= 3; ++ell) {
    const SectorOperator a_op = assemble_A_sector(grid, spec, ell);
    const SectorOperator full = assemble_Lplus_sector(grid, spec, ell);
    expect(!full.rank_one.has_value(),
           "rank-one term leaked into sector " + std::to_string(ell));
    expect(a_op.A_form == full.A_form,
           "sector " + std::to_string(ell) + " forms differ");
  }

  const SectorOperator a_op = assemble_A_sector(grid, spec, 0);
  const SectorOperator full = assemble_Lplus_sector(grid, spec, 0);
  expect(a_op.A_form == full.A_form, "radial local parts differ");
  expect(full.rank_one.has_value(), "radial rank-one term missing");
  if (full.rank_one.has_value()) {
    expect(full.rank_one->coeff == 2.0 * spec.params.b,
           "rank-one coefficient is not 2b");
    const Eigen::VectorXd pairing =
        full.gram * sampled_solution_profile(grid, spec);
    const double vec_err = (full.rank_one->vec - pairing).cwiseAbs().maxCoeff();
    expect(vec_err == 0.0, "rank-one vector is not the gradient pairing");
    const Eigen::MatrixXd dense = full.dense_form();
    const Eigen::MatrixXd wanted =
        a_op.A_form +
        full.rank_one->coeff * pairing * pairing.transpose();
    const double dense_err = (dense - wanted).cwiseAbs().maxCoeff() /
                             wanted.cwiseAbs().maxCoeff();
    expect(dense_err < 1e-14, "dense form deviates from A + 2b g g^T");
  }

  std::mt19937 rng(0xa11ce);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const SectorSolver solver(full);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd rhs(grid.size());
    for (int i = 0; i < rhs.size(); ++i) rhs[i] = gauss(rng);
    const RankOneSolveResult out = rank_one_solve(full, rhs);
    const Eigen::VectorXd residual =
        full.apply(out.solution) - solver.project_load(rhs);
    const double rel = dual_norm(full.gram, residual) /
                       dual_norm(full.gram, solver.project_load(rhs));
    expect(rel < 1e-10, "rank-one solve residual " + format_g17(rel));
  }
}

// 6. The shooting oracle reproduces the bubble blind, and the
//    self-consistent loop rediscovers the scaling constant.
void shooting_criterion() {
  const ShootResult shot = shoot_ground_state(1.0, bubble_value(0.0));
  expect(shot.max_rel_err < 1e-6,
         "shot profile error " + format_g17(shot.max_rel_err));
  expect(shot.radii.back() >= 50.0, "shot domain falls short of r = 50");

  const KirchhoffParams coupled{1.0, 1.0};
  const double want_c = scaling_constants(coupled).c;
  const ShootResult first = self_consistent_rediscovery(coupled);
  expect_close(first.c, want_c, 1e-10, "rediscovered constant");
  expect(first.max_rel_err < 1e-5,
         "rediscovered profile error " + format_g17(first.max_rel_err));

  const ShootResult second =
      self_consistent_rediscovery(coupled, 2.0 * bubble_value(0.0));
  expect(std::abs(second.c - first.c) <= 1e-10 * first.c,
         "rediscovered constant depends on the initial height");
}

// 7. With b = 0 the problem is the local critical one: c = a, the full and
//    frozen forms coincide, and the kernel is still four-dimensional.
void decoupled_criterion() {
  const KirchhoffParams local{2.5, 0.0};
  expect_close(scaling_constants(local).c, local.a, 1e-15, "c vs a at b = 0");

  const BubbleSpec spec{local, 1.0, {0.0, 0.0, 0.0}};
  const RadialGrid grid = natural_grid(spec, 256);
  const SectorOperator a_op = assemble_A_sector(grid, spec, 0);
  const SectorOperator full = assemble_Lplus_sector(grid, spec, 0);
  expect(!full.rank_one.has_value(), "rank-one term present at b = 0");
  expect(a_op.A_form == full.A_form, "forms differ at b = 0");

  const VerificationReport report = kernel_report(grid, spec, 4);
  expect(report.status == Status::pass, "kernel report status is not PASS");
  expect(report.total_kernel_dim == 4,
         "kernel dimension " + std::to_string(report.total_kernel_dim));

  expect(proof_chain_check(grid, spec).status == Status::pass,
         "proof chain fails at b = 0");
}

// 8. Two identical CLI invocations emit byte-identical reports.
void determinism_criterion() {
  const std::string command = std::string(KIRCHHOFF_BIN) +
                              " kernel --a 1 --b 1 --no-timestamp > ";
  auto run = [&](const std::string& path) -> std::string {
    const int rc = std::system((command + path).c_str());
    expect(rc == 0, "kernel run exited with " + std::to_string(rc));
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    return text.str();
  };
  const std::string first = run("acceptance_first.json");
  const std::string second = run("acceptance_second.json");
  expect(!first.empty(), "first report is empty");
  expect(first == second, "reports differ between identical runs");
  std::remove("acceptance_first.json");
  std::remove("acceptance_second.json");
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<void()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"constants: quadrature, oracle and fixed point agree", 1.0,
       constants_criterion},
      {"residual: the closed-form family solves the equation", 1.0,
       residual_criterion},
      {"identities: orthogonality, frozen operator, contraction", 5.0,
       identities_criterion},
      {"nondegeneracy: kernel dimension, alignment, stable gap", 60.0,
       nondegeneracy_criterion},
      {"sector structure: rank-one split and solve", 5.0,
       sector_structure_criterion},
      {"shooting: blind bubble and constant rediscovery", 10.0,
       shooting_criterion},
      {"decoupled limit: local problem falls out at b = 0", 60.0,
       decoupled_criterion},
      {"determinism: identical runs, identical bytes", 60.0,
       determinism_criterion},
  };

  int failed = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    failures.clear();
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run();
    } catch (const std::exception& error) {
      failures.push_back(std::string("exception: ") + error.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > criterion.budget_seconds)
      failures.push_back("runtime " + std::to_string(elapsed) +
                         " s exceeds budget of " +
                         std::to_string(criterion.budget_seconds) + " s");
    const bool ok = failures.empty();
    std::printf("[%s] %d. %s (%.2f s)\n", ok ? "PASS" : "FAIL", index,
                criterion.name, elapsed);
    for (const std::string& failure : failures)
      std::printf("       %s\n", failure.c_str());
    failed += ok ? 0 : 1;
  }
  return failed;
}
