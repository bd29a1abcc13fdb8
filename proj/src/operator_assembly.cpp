#include "kirchhoff/operator_assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846;

const double kRadialNorm = std::sqrt(4.0 * kPi);
const double kSlopeNorm = std::sqrt(4.0 * kPi / 3.0);

}  // namespace

Eigen::MatrixXd SectorOperator::dense_form() const {
  if (!rank_one) return A_form;
  return A_form + rank_one->coeff * (rank_one->vec * rank_one->vec.transpose());
}

Eigen::VectorXd SectorOperator::apply(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out = A_form * f;
  if (rank_one) out += rank_one->coeff * rank_one->vec.dot(f) * rank_one->vec;
  return out;
}

Eigen::VectorXd sampled_solution_profile(const RadialGrid& grid, const BubbleSpec& spec) {
  return kRadialNorm * grid.sample([&](double r) { return radial_value(spec, r); });
}

Eigen::VectorXd sampled_dilation_profile(const RadialGrid& grid, const BubbleSpec& spec) {
  return kRadialNorm * grid.sample([&](double r) { return dilation_profile(spec, r); });
}

Eigen::VectorXd sampled_translation_profile(const RadialGrid& grid, const BubbleSpec& spec) {
  return kSlopeNorm * grid.sample([&](double r) { return radial_deriv(spec, r); });
}

Eigen::VectorXd quintic_load(const RadialGrid& grid, const BubbleSpec& spec) {
  return -4.0 * kRadialNorm * grid.weak_load([&](double r) {
    const double u = radial_value(spec, r);
    return u * u * u * u * u;
  });
}

SectorOperator assemble_A_sector(const RadialGrid& grid, const BubbleSpec& spec, int ell) {
  if (ell < 0) throw std::domain_error("sector index must be nonnegative");
  const double c = scaling_constants(spec.params).c;
  const OriginClosure closure = RadialGrid::natural_closure(ell);
  SectorOperator op;
  op.ell = ell;
  op.gram = grid.sector_stiffness(ell);
  op.A_form = c * op.gram - potential_matrix(grid, spec, closure);
  return op;
}

SectorOperator assemble_Lplus_sector(const RadialGrid& grid, const BubbleSpec& spec, int ell) {
  SectorOperator op = assemble_A_sector(grid, spec, ell);
  // The nonlocal pairing vanishes identically against every nonradial
  // sector, so only ell = 0 with live coupling carries the correction.
  if (ell == 0 && spec.params.b > 0.0) {
    RankOneTerm term;
    term.coeff = 2.0 * spec.params.b;
    term.vec = op.gram * sampled_solution_profile(grid, spec);
    op.rank_one = std::move(term);
  }
  return op;
}

double nonlocal_pairing(const RadialGrid& grid, const BubbleSpec& spec,
                        const Eigen::VectorXd& phi) {
  if (phi.size() != grid.size())
    throw std::domain_error("sample size does not match grid");
  return sampled_solution_profile(grid, spec).dot(grid.sector_stiffness(0) * phi);
}

double dual_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& load) {
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gram matrix is not positive definite");
  return std::sqrt(load.dot(llt.solve(load)));
}

SectorSolver::SectorSolver(const SectorOperator& op, double drop_rel_tol)
    : rank_one_(op.rank_one), gram_(op.gram) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A_form, op.gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sector eigensolve failed");
  mu_ = es.eigenvalues();
  modes_ = es.eigenvectors();

  const double cutoff = drop_rel_tol * mu_.cwiseAbs().maxCoeff();
  inv_mu_ = Eigen::VectorXd::Zero(mu_.size());
  for (int i = 0; i < mu_.size(); ++i) {
    if (std::abs(mu_[i]) <= cutoff) {
      ++dropped_;
    } else {
      inv_mu_[i] = 1.0 / mu_[i];
    }
  }
  if (dropped_ == mu_.size())
    throw std::runtime_error("operator is singular on the whole space");

  if (rank_one_) {
    const Eigen::VectorXd ainv_g = apply_inverse(rank_one_->vec);
    denominator_ = 1.0 + rank_one_->coeff * rank_one_->vec.dot(ainv_g);
    if (std::abs(denominator_) < 1e-10)
      throw std::runtime_error("rank-one denominator vanishes");
  }
}

Eigen::VectorXd SectorSolver::apply_inverse(const Eigen::VectorXd& load) const {
  return modes_ * inv_mu_.cwiseProduct(modes_.transpose() * load);
}

Eigen::VectorXd SectorSolver::solve(const Eigen::VectorXd& load) const {
  Eigen::VectorXd x = apply_inverse(load);
  if (rank_one_) {
    const Eigen::VectorXd ainv_g = apply_inverse(rank_one_->vec);
    const double correction = rank_one_->coeff * rank_one_->vec.dot(x) / denominator_;
    x -= correction * ainv_g;
  }
  return x;
}

Eigen::VectorXd SectorSolver::project_load(const Eigen::VectorXd& load) const {
  Eigen::VectorXd coef = modes_.transpose() * load;
  for (int i = 0; i < mu_.size(); ++i)
    if (inv_mu_[i] == 0.0) coef[i] = 0.0;
  return gram_ * (modes_ * coef);
}

Eigen::VectorXd SectorSolver::project_out_dropped(const Eigen::VectorXd& f) const {
  Eigen::VectorXd coef = modes_.transpose() * (gram_ * f);
  for (int i = 0; i < mu_.size(); ++i)
    if (inv_mu_[i] == 0.0) coef[i] = 0.0;
  return modes_ * coef;
}

RankOneSolveResult rank_one_solve(const SectorOperator& op, const Eigen::VectorXd& rhs) {
  if (!op.rank_one)
    throw std::domain_error("operator carries no rank-one term");
  const SectorSolver solver(op);
  return RankOneSolveResult{solver.solve(rhs), solver.denominator()};
}

}  // namespace kirchhoff
