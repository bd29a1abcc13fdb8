#include "kirchhoff/radial_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const GridSpec& spec) {
  if (spec.n < 16)
    throw std::domain_error("radial grid needs at least 16 interior nodes");
  if (!std::isfinite(spec.map_scale) || spec.map_scale <= 0.0)
    throw std::domain_error("map_scale must be finite and positive");
  if (spec.kind != MapKind::algebraic)
    throw std::domain_error("unsupported map kind");
}

// Differentiation matrix on the full Chebyshev-Gauss-Lobatto grid
// t_j = cos(j pi / N), j = 0..N, with the negative-sum diagonal.
Eigen::MatrixXd cgl_diff(const Eigen::VectorXd& t) {
  const int nn = static_cast<int>(t.size()) - 1;
  auto mult = [nn](int i) { return (i == 0 || i == nn) ? 2.0 : 1.0; };
  Eigen::MatrixXd d(nn + 1, nn + 1);
  for (int i = 0; i <= nn; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= nn; ++j) {
      if (j == i) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = sign * mult(i) / (mult(j) * (t[i] - t[j]));
      acc += d(i, j);
    }
    d(i, i) = -acc;
  }
  return d;
}

// Fejer's second rule on the interior angles theta_j = j pi / N.
Eigen::VectorXd fejer2(int nn) {
  Eigen::VectorXd w(nn - 1);
  for (int j = 1; j < nn; ++j) {
    const double theta = j * kPi / nn;
    double s = 0.0;
    for (int m = 1; m <= nn / 2; ++m)
      s += std::sin((2 * m - 1) * theta) / (2 * m - 1);
    w[j - 1] = 4.0 / nn * std::sin(theta) * s;
  }
  return w;
}

// Gauss-Legendre rule on (-1, 1) by Golub-Welsch.
void gauss_legendre(int m, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = beta;
    jac(k - 1, k) = beta;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x = es.eigenvalues();
  w.resize(m);
  for (int k = 0; k < m; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    w[k] = 2.0 * v0 * v0;
  }
}

// Barycentric interpolation from the Chebyshev-Gauss-Lobatto nodes to
// arbitrary points; exact for polynomials carried by the grid.
Eigen::MatrixXd interp_matrix(const Eigen::VectorXd& t, const Eigen::VectorXd& x) {
  const int nn = static_cast<int>(t.size()) - 1;
  Eigen::MatrixXd out(x.size(), t.size());
  for (int m = 0; m < x.size(); ++m) {
    double denom = 0.0;
    int hit = -1;
    for (int j = 0; j <= nn; ++j) {
      const double diff = x[m] - t[j];
      if (diff == 0.0) {
        hit = j;
        break;
      }
      double bw = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == nn) bw *= 0.5;
      out(m, j) = bw / diff;
      denom += out(m, j);
    }
    if (hit >= 0) {
      out.row(m).setZero();
      out(m, hit) = 1.0;
    } else {
      out.row(m) /= denom;
    }
  }
  return out;
}

}  // namespace

RadialGrid::RadialGrid(const GridSpec& spec) {
  validate(spec);
  n_ = spec.n;
  scale_ = spec.map_scale;
  const int nn = n_ + 1;
  const double el = scale_;

  Eigen::VectorXd t(nn + 1);
  for (int j = 0; j <= nn; ++j) t[j] = std::cos(j * kPi / nn);

  const Eigen::MatrixXd d = cgl_diff(t);
  const Eigen::VectorXd f2 = fejer2(nn);

  // Extend interior values to the full grid: zero at t = 1 (decay) in both
  // closures; at t = -1 either the Neumann reconstruction row (regularity)
  // or another zero (Dirichlet).
  Eigen::MatrixXd ext_reg = Eigen::MatrixXd::Zero(nn + 1, n_);
  Eigen::MatrixXd ext_dir = Eigen::MatrixXd::Zero(nn + 1, n_);
  for (int j = 1; j < nn; ++j) {
    ext_reg(j, j - 1) = 1.0;
    ext_dir(j, j - 1) = 1.0;
  }
  for (int k = 1; k < nn; ++k) ext_reg(nn, k - 1) = -d(nn, k) / d(nn, nn);

  const Eigen::MatrixXd d1t_reg_full = d * ext_reg;
  const Eigen::MatrixXd d1t_dir_full = d * ext_dir;
  const Eigen::MatrixXd d2t_reg_full = d * d1t_reg_full;

  // Node j runs from large r (j = 1) to small r (j = nn - 1); everything
  // public is stored with r ascending, so i maps to j = nn - 1 - i.
  r_.resize(n_);
  w_r2_.resize(n_);
  w_dr_.resize(n_);
  Eigen::VectorXd tp(n_), tpp(n_);
  for (int i = 0; i < n_; ++i) {
    const int j = nn - 1 - i;
    const double om = 1.0 - t[j];
    const double rr = el * (1.0 + t[j]) / om;
    const double rp = 2.0 * el / (om * om);
    r_[i] = rr;
    tp[i] = 1.0 / rp;
    tpp[i] = -om * om * om / (2.0 * el * el);
    w_dr_[i] = f2[j - 1] * rp;
    w_r2_[i] = f2[j - 1] * rp * rr * rr;
  }

  auto interior = [&](const Eigen::MatrixXd& full) {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) m(i, k) = full(nn - 1 - i, n_ - 1 - k);
    return m;
  };

  const Eigen::MatrixXd d1t_reg = interior(d1t_reg_full);
  const Eigen::MatrixXd d1t_dir = interior(d1t_dir_full);
  const Eigen::MatrixXd d2t_reg = interior(d2t_reg_full);

  d1_reg_ = tp.asDiagonal() * d1t_reg;
  d1_dir_ = tp.asDiagonal() * d1t_dir;
  d2_reg_ = tp.cwiseAbs2().asDiagonal() * d2t_reg + tpp.asDiagonal() * d1t_reg;

  // Stiffness and centrifugal forms.  Both integrands are polynomials in t:
  // Int f' g' r^2 dr = Int p' q' L(1+t)^2/2 dt and, because trial functions
  // vanish at t = 1, Int f g dr = Int p q 2L/(1-t)^2 dt is one too.  A
  // Gauss-Legendre rule of matching degree integrates them exactly, so the
  // stored forms are the true bilinear forms of the interpolants and the
  // discrete pencil carries no quadrature-starved spurious modes.
  Eigen::VectorXd glx, glw;
  gauss_legendre(nn + 4, glx, glw);
  const Eigen::MatrixXd im = interp_matrix(t, glx);

  Eigen::VectorXd stiff_w(glx.size()), centri_w(glx.size());
  for (int m = 0; m < glx.size(); ++m) {
    stiff_w[m] = std::sqrt(glw[m] * el * (1.0 + glx[m]) * (1.0 + glx[m]) / 2.0);
    centri_w[m] = std::sqrt(glw[m] * 2.0 * el) / (1.0 - glx[m]);
  }

  auto rev = [&](const Eigen::MatrixXd& mj) {
    Eigen::MatrixXd out(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) out(i, k) = mj(n_ - 1 - i, n_ - 1 - k);
    return out;
  };
  auto sym_product = [&](const Eigen::MatrixXd& half) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    out.selfadjointView<Eigen::Lower>().rankUpdate(half.transpose());
    return rev(Eigen::MatrixXd(out.selfadjointView<Eigen::Lower>()));
  };

  stiff_reg_ = sym_product(stiff_w.asDiagonal() * (im * d1t_reg_full));
  stiff_dir_ = sym_product(stiff_w.asDiagonal() * (im * d1t_dir_full));
  centri_reg_ = sym_product(centri_w.asDiagonal() * (im * ext_reg));
  centri_dir_ = sym_product(centri_w.asDiagonal() * (im * ext_dir));

  auto rev_cols = [&](const Eigen::MatrixXd& mj) {
    Eigen::MatrixXd out(mj.rows(), n_);
    for (int k = 0; k < n_; ++k) out.col(k) = mj.col(n_ - 1 - k);
    return out;
  };
  aux_r_.resize(glx.size());
  aux_w_r2_.resize(glx.size());
  for (int m = 0; m < glx.size(); ++m) {
    const double om = 1.0 - glx[m];
    aux_r_[m] = el * (1.0 + glx[m]) / om;
    aux_w_r2_[m] = glw[m] * 2.0 * el * el * el * (1.0 + glx[m]) * (1.0 + glx[m]) /
                   (om * om * om * om);
  }
  eval_reg_ = rev_cols(im * ext_reg);
  eval_dir_ = rev_cols(im * ext_dir);
}

double RadialGrid::integrate_r2(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw std::domain_error("sample size does not match grid");
  return w_r2_.dot(f);
}

double RadialGrid::integrate_dr(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw std::domain_error("sample size does not match grid");
  return w_dr_.dot(f);
}

Eigen::VectorXd RadialGrid::sample(const std::function<double(double)>& fn) const {
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) out[i] = fn(r_[i]);
  return out;
}

Eigen::MatrixXd RadialGrid::derivative_matrix(OriginClosure closure) const {
  return closure == OriginClosure::regularity ? d1_reg_ : d1_dir_;
}

Eigen::MatrixXd RadialGrid::sector_stiffness(int ell) const {
  if (ell < 0) throw std::domain_error("sector index must be nonnegative");
  return sector_stiffness(ell, natural_closure(ell));
}

Eigen::MatrixXd RadialGrid::sector_stiffness(int ell, OriginClosure closure) const {
  if (ell < 0) throw std::domain_error("sector index must be nonnegative");
  const bool reg = closure == OriginClosure::regularity;
  Eigen::MatrixXd k = reg ? stiff_reg_ : stiff_dir_;
  if (ell > 0)
    k += static_cast<double>(ell) * (ell + 1) * (reg ? centri_reg_ : centri_dir_);
  return k;
}

Eigen::MatrixXd RadialGrid::sector_gram(int ell) const { return sector_stiffness(ell); }

Eigen::MatrixXd RadialGrid::sector_mass() const {
  return Eigen::MatrixXd(w_r2_.asDiagonal());
}

TruncatedIntegral RadialGrid::l2_mass(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw std::domain_error("sample size does not match grid");
  TruncatedIntegral out;
  out.value = w_r2_.dot(f.cwiseAbs2());

  // Decay exponent of |f| ~ r^{-p} measured at the two outermost nodes.
  // Int f^2 r^2 dr needs p > 3/2.
  const double f1 = std::abs(f[n_ - 2]);
  const double f0 = std::abs(f[n_ - 1]);
  if (f0 == 0.0 && f1 == 0.0) {
    out.tail_exponent = std::numeric_limits<double>::infinity();
    out.tail_integrable = true;
  } else if (f0 == 0.0 || f1 == 0.0) {
    out.tail_exponent = std::numeric_limits<double>::quiet_NaN();
    out.tail_integrable = false;
  } else {
    out.tail_exponent = std::log(f1 / f0) / std::log(r_[n_ - 1] / r_[n_ - 2]);
    out.tail_integrable = out.tail_exponent > 1.5;
  }
  return out;
}

Eigen::MatrixXd RadialGrid::weighted_mass(const std::function<double(double)>& weight,
                                          OriginClosure closure) const {
  const Eigen::MatrixXd& ev =
      closure == OriginClosure::regularity ? eval_reg_ : eval_dir_;
  Eigen::VectorXd w(aux_r_.size());
  for (int m = 0; m < aux_r_.size(); ++m) w[m] = aux_w_r2_[m] * weight(aux_r_[m]);
  const Eigen::MatrixXd half = ev.transpose() * (w.asDiagonal() * ev);
  return 0.5 * (half + half.transpose());
}

Eigen::VectorXd RadialGrid::weak_load(const std::function<double(double)>& weight,
                                      OriginClosure closure) const {
  const Eigen::MatrixXd& ev =
      closure == OriginClosure::regularity ? eval_reg_ : eval_dir_;
  Eigen::VectorXd w(aux_r_.size());
  for (int m = 0; m < aux_r_.size(); ++m) w[m] = aux_w_r2_[m] * weight(aux_r_[m]);
  return ev.transpose() * w;
}

RadialGrid build_grid(const GridSpec& spec) { return RadialGrid(spec); }

Eigen::VectorXd potential_weight(const RadialGrid& grid, const BubbleSpec& spec) {
  return grid.sample([&](double r) {
    const double u = radial_value(spec, r);
    return 5.0 * u * u * u * u;
  });
}

Eigen::MatrixXd potential_matrix(const RadialGrid& grid, const BubbleSpec& spec,
                                 OriginClosure closure) {
  return grid.weighted_mass(
      [&](double r) {
        const double u = radial_value(spec, r);
        return 5.0 * u * u * u * u;
      },
      closure);
}

}  // namespace kirchhoff
