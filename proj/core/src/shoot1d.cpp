#include "krein/shoot1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "krein/errors.hpp"
#include "krein/quadrature.hpp"

namespace krein {

namespace {

// V with a power singularity flattened to its average near x0.
class ShootPotential {
 public:
  ShootPotential(const Potential1D& v, double length) : v_(v) {
    if (v.kind() == Potential1D::Kind::PowerSingularity) {
      singular_ = true;
      x0_ = v.singular_point();
      const double delta = 1e-6 * length;
      lo_ = x0_ - delta;
      hi_ = x0_ + delta;
      avg_ = v.cell_average(lo_, hi_);
    }
  }

  Complex operator()(double x) const {
    if (v_.is_zero()) return {};
    if (singular_ && x > lo_ && x < hi_) return avg_;
    return v_.value(x);
  }

  std::vector<double> breakpoints() const {
    if (!singular_) return {};
    return {lo_, hi_};
  }

 private:
  const Potential1D& v_;
  bool singular_ = false;
  double x0_ = 0.0, lo_ = 0.0, hi_ = 0.0;
  Complex avg_{};
};

OdeOptions ode_options(const ShootConfig& config, Complex lambda) {
  OdeOptions opt;
  opt.rtol = config.rtol;
  opt.atol = config.atol;
  opt.max_step = config.max_step / std::max(1.0, std::sqrt(std::abs(lambda)));
  return opt;
}

}  // namespace

void ShootConfig::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) fail(ErrorKind::InvalidArgument, "shoot1d: L must be positive");
  if (!(rtol > 1e-13 && rtol < 1e-3)) fail(ErrorKind::InvalidArgument, "shoot1d: rtol must lie in (1e-13, 1e-3)");
  if (!(atol > 1e-13 && atol < 1e-3)) fail(ErrorKind::InvalidArgument, "shoot1d: atol must lie in (1e-13, 1e-3)");
  if (!(max_step > 0.0)) fail(ErrorKind::InvalidArgument, "shoot1d: max_step must be positive");
  if (carrier_nodes < 16 || matrix_nodes < 16)
    fail(ErrorKind::InvalidArgument, "shoot1d: grids need at least 16 nodes");
}

IvpSolution solve_ivp_schrodinger(const ShootConfig& config, Complex lambda, double x_start, Complex f0,
                                  Complex df0, ShootDirection direction, std::span<const double> outputs) {
  config.validate();
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    fail(ErrorKind::InvalidArgument, "shoot1d: lambda must be finite");
  if (!(x_start >= 0.0 && x_start <= config.length))
    fail(ErrorKind::InvalidArgument, "shoot1d: x_start outside [0, L]");
  const ShootPotential v(config.potential, config.length);
  const Rhs2 rhs = [&](double x, const State2& y) -> State2 { return {y[1], (v(x) - lambda) * y[0]}; };
  const double x_end = direction == ShootDirection::Forward ? config.length : 0.0;
  const std::vector<double> breaks = v.breakpoints();
  const OdeTrajectory traj =
      integrate_dp5(rhs, x_start, x_end, {f0, df0}, ode_options(config, lambda), outputs, breaks);
  IvpSolution out;
  out.x.assign(outputs.begin(), outputs.end());
  out.f.reserve(traj.samples.size());
  out.df.reserve(traj.samples.size());
  for (const State2& s : traj.samples) {
    out.f.push_back(s[0]);
    out.df.push_back(s[1]);
  }
  out.f_end = traj.end[0];
  out.df_end = traj.end[1];
  out.steps = traj.steps;
  return out;
}

Shoot1dModel::Shoot1dModel(ShootConfig config) : config_(std::move(config)), tilde_config_(config_) {
  config_.validate();
  tilde_config_.potential = config_.potential.conjugate();
  matrices_ = build_fd1d(config_.matrix_nodes, config_.length, config_.potential);

  const double length = config_.length;
  const QuadratureRule rule = map_rule(gauss_lobatto(config_.carrier_nodes), 0.0, length);
  nodes_ = rule.nodes;
  weights_ = rule.weights;
  nodes_(0) = 0.0;
  nodes_(nodes_.size() - 1) = length;
  d1_ = differentiation_matrix(nodes_);
  d2_ = d1_ * d1_;

  const Index n = nodes_.size();
  const Potential1D& v = config_.potential;
  const bool rough = v.kind() == Potential1D::Kind::PowerSingularity || v.kind() == Potential1D::Kind::Table;
  v_.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (!rough) {
      v_(i) = v.is_zero() ? Complex{} : v.value(nodes_(i));
      continue;
    }
    // non-smooth potentials are averaged over the dual cell of each node
    const double lo = i == 0 ? 0.0 : 0.5 * (nodes_(i - 1) + nodes_(i));
    const double hi = i + 1 == n ? length : 0.5 * (nodes_(i) + nodes_(i + 1));
    v_(i) = v.cell_average(lo, hi);
  }
  require_finite(v_, "collocated potential");
  v_sup_ = std::max(v_.cwiseAbs().maxCoeff(), matrices_->potential_sup());
  threshold_ = a_priori_threshold(v_sup_);
  interior_.assign(nodes_.data() + 1, nodes_.data() + n - 1);
}

CVector Shoot1dModel::apply(const CVector& f, bool tilde) const {
  if (f.size() != state_dim()) fail(ErrorKind::InvalidArgument, "shoot1d: state length mismatch");
  const CVector vf = (tilde ? CVector(v_.conjugate()) : v_).cwiseProduct(f);
  return CVector(-(d2_.cast<Complex>() * f)) + vf;
}

CVector Shoot1dModel::trace0(const CVector& f) const {
  const Index n = state_dim();
  CVector t(2);
  t(0) = -(d1_.row(0).cast<Complex>() * f).value();
  t(1) = (d1_.row(n - 1).cast<Complex>() * f).value();
  return t;
}

CVector Shoot1dModel::trace1(const CVector& f) const {
  CVector t(2);
  t(0) = f(0);
  t(1) = f(state_dim() - 1);
  return t;
}

Complex Shoot1dModel::inner(const CVector& f, const CVector& g) const {
  return g.dot(weights_.cast<Complex>().cwiseProduct(f));
}

// Collocation of -p'' + V p - lambda p = f on the interior nodes with the
// two Neumann rows p'(0) = p'(L) = 0.
CVector Shoot1dModel::resolve(Complex lambda, bool tilde, const CVector& f) const {
  const Index n = state_dim();
  if (f.size() != n) fail(ErrorKind::InvalidArgument, "shoot1d: state length mismatch");
  CMatrix a = -d2_.cast<Complex>();
  a.diagonal() += (tilde ? CVector(v_.conjugate()) : v_) - CVector::Constant(n, lambda);
  a.row(0) = d1_.row(0).cast<Complex>();
  a.row(n - 1) = d1_.row(n - 1).cast<Complex>();
  CVector rhs = f;
  rhs(0) = 0.0;
  rhs(n - 1) = 0.0;
  return solve_linear(a, rhs);
}

CVector Shoot1dModel::neumann_resolvent(Complex lambda, const CVector& f) const { return resolve(lambda, false, f); }

CVector Shoot1dModel::neumann_resolvent_tilde(Complex mu, const CVector& f) const { return resolve(mu, true, f); }

CVector Shoot1dModel::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  CVector f = CVector::Zero(state_dim());
  const double w = std::numbers::pi / config_.length;
  for (int k = 0; k <= 6; ++k) {
    const Complex a(normal(rng), normal(rng)), b(normal(rng), normal(rng));
    for (Index i = 0; i < f.size(); ++i)
      f(i) += (a * std::cos(k * w * nodes_(i)) + b * std::sin(k * w * nodes_(i))) / (1.0 + k);
  }
  return f;
}

Shoot1dModel::Endpoints Shoot1dModel::endpoints(Complex lambda, bool tilde) const {
  const ShootConfig& cfg = tilde ? tilde_config_ : config_;
  const IvpSolution right = solve_ivp_schrodinger(cfg, lambda, cfg.length, 1.0, 0.0, ShootDirection::Backward);
  const IvpSolution left = solve_ivp_schrodinger(cfg, lambda, 0.0, 1.0, 0.0, ShootDirection::Forward);
  return {right.f_end, right.df_end, left.f_end, left.df_end};
}

CMatrix Shoot1dModel::weyl_from(const Endpoints& e, Complex lambda) const {
  const double s = std::max(1.0, std::sqrt(std::abs(lambda)));
  const double tol = 100.0 * config_.rtol;
  if (std::abs(e.dright_at_0) <= tol * s * std::abs(e.right_at_0) ||
      std::abs(e.dleft_at_L) <= tol * s * std::abs(e.left_at_L)) {
    std::ostringstream os;
    os << "shooting matrix singular at lambda = (" << lambda.real() << ", " << lambda.imag()
       << "): Neumann data of a shooting solution vanishes";
    fail(ErrorKind::MatchingSingular, os.str());
  }
  CMatrix m(2, 2);
  m << -e.right_at_0 / e.dright_at_0, 1.0 / e.dleft_at_L, -1.0 / e.dright_at_0, e.left_at_L / e.dleft_at_L;
  return m;
}

CMatrix Shoot1dModel::weyl_matrix(Complex lambda) const { return weyl_from(endpoints(lambda, false), lambda); }

CMatrix Shoot1dModel::weyl_matrix_tilde(Complex mu) const { return weyl_from(endpoints(mu, true), mu); }

CVector Shoot1dModel::gamma_samples(Complex lambda, bool tilde, const CVector& g) const {
  if (g.size() != 2) fail(ErrorKind::InvalidArgument, "shoot1d: boundary data must have length 2");
  const ShootConfig& cfg = tilde ? tilde_config_ : config_;
  const Index n = state_dim();
  CVector f = CVector::Zero(n);
  const double s = std::max(1.0, std::sqrt(std::abs(lambda)));
  const double tol = 100.0 * cfg.rtol;

  // f = a psi_R + b psi_L with -f'(0) = g0 and f'(L) = g1
  if (g(0) != Complex{}) {
    const IvpSolution r =
        solve_ivp_schrodinger(cfg, lambda, cfg.length, 1.0, 0.0, ShootDirection::Backward, interior_);
    if (std::abs(r.df_end) <= tol * s * std::abs(r.f_end))
      fail(ErrorKind::MatchingSingular, "shoot1d: psi_R'(0) vanishes, lambda is a Neumann eigenvalue");
    const Complex a = -g(0) / r.df_end;
    for (Index j = 1; j + 1 < n; ++j) f(j) += a * r.f[static_cast<std::size_t>(j - 1)];
    f(0) += a * r.f_end;
    f(n - 1) += a;
  }
  if (g(1) != Complex{}) {
    const IvpSolution l = solve_ivp_schrodinger(cfg, lambda, 0.0, 1.0, 0.0, ShootDirection::Forward, interior_);
    if (std::abs(l.df_end) <= tol * s * std::abs(l.f_end))
      fail(ErrorKind::MatchingSingular, "shoot1d: psi_L'(L) vanishes, lambda is a Neumann eigenvalue");
    const Complex b = g(1) / l.df_end;
    for (Index j = 1; j + 1 < n; ++j) f(j) += b * l.f[static_cast<std::size_t>(j - 1)];
    f(0) += b;
    f(n - 1) += b * l.f_end;
  }
  return f;
}

CVector Shoot1dModel::solve_bvp(Complex lambda, const CVector& g) const { return gamma_samples(lambda, false, g); }

CVector Shoot1dModel::solve_bvp_tilde(Complex mu, const CVector& g) const { return gamma_samples(mu, true, g); }

std::shared_ptr<const Shoot1dModel> build_shoot1d(const ShootConfig& config) {
  return std::make_shared<const Shoot1dModel>(config);
}

}  // namespace krein
