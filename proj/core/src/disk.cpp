#include "krein/disk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "krein/bessel.hpp"
#include "krein/errors.hpp"
#include "krein/quadrature.hpp"

namespace krein {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-s) I_k(s r) / r^k, Re s >= 0.
Complex interior_profile(int k, Complex s, double r) {
  const Complex z = s * r;
  if (std::abs(z) <= 2.0) {
    Complex lead = std::exp(-s);
    for (int i = 1; i <= k; ++i) lead *= 0.5 * s / static_cast<double>(i);
    const Complex q = 0.25 * z * z;
    Complex term = 1.0, sum = 0.0;
    for (int j = 0; j < 200; ++j) {
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      term *= q / ((j + 1.0) * (k + j + 1.0));
    }
    return lead * sum;
  }
  return bessel_i_scaled(k, z).value * std::exp(s * (r - 1.0) - k * std::log(r));
}

void neumann_eigenvalue(int k, Complex lambda) {
  std::ostringstream os;
  os << "disk mode " << k << ": lambda = (" << lambda.real() << ", " << lambda.imag()
     << ") is a Neumann eigenvalue";
  fail(ErrorKind::MatchingSingular, os.str());
}

}  // namespace

void DiskModelConfig::validate() const {
  if (k_max < 1) fail(ErrorKind::InvalidArgument, "disk: k_max must be at least 1");
  if (radial_nodes < 8) fail(ErrorKind::InvalidArgument, "disk: radial_nodes must be at least 8");
  if (!(r_cut > 1.0) || !std::isfinite(r_cut)) fail(ErrorKind::InvalidArgument, "disk: r_cut must lie in (1, inf)");
}

DiskModel::DiskModel(DiskModelConfig config) : config_(std::move(config)) {
  config_.validate();
  has_potential_ = config_.radial_potential && !config_.radial_potential->is_zero();
  const Index m = config_.radial_nodes;
  block_ = m + 1;
  const QuadratureRule gl = gauss_legendre(m);
  coords_.resize(block_);
  radii_.resize(block_);
  Eigen::VectorXd base(block_);
  Eigen::VectorXd rp;
  if (interior()) {
    coords_.head(m) = 0.5 * (gl.nodes.array() + 1.0);
    coords_(m) = 1.0;
    radii_ = coords_.array().sqrt();
    // r dr = dt / 2 and dt = dx / 2
    base.head(m) = kTwoPi * 0.25 * gl.weights;
  } else {
    coords_.head(m) = gl.nodes;
    coords_(m) = -1.0;
    radii_ = 1.0 + 2.0 * (1.0 + coords_.array()) / (1.0 - coords_.array());
    rp = 4.0 / (1.0 - coords_.array()).square();
    base.head(m) = kTwoPi * gl.weights.cwiseProduct(radii_.head(m)).cwiseProduct(rp.head(m));
  }
  base(m) = 0.0;

  const Eigen::MatrixXd d = differentiation_matrix(coords_);
  const int kk = config_.k_max;
  if (interior()) {
    const Eigen::MatrixXd td2 = coords_.asDiagonal() * (d * d);
    for (int a = 0; a <= kk; ++a) {
      operators_.push_back(-4.0 * td2 - 4.0 * (a + 1.0) * d);
      Eigen::RowVectorXd row = 2.0 * d.row(m);
      row(m) += a;
      neumann_rows_.push_back(row);
      weights_.push_back(base.cwiseProduct(coords_.array().pow(a).matrix()));
    }
  } else {
    const Eigen::MatrixXd dr = rp.cwiseInverse().asDiagonal() * d;
    const Eigen::MatrixXd lap = dr * dr + radii_.cwiseInverse().asDiagonal() * dr;
    const Eigen::VectorXd inv_r2 = radii_.array().square().inverse();
    for (int a = 0; a <= kk; ++a) {
      Eigen::MatrixXd op = -lap;
      op.diagonal() += (static_cast<double>(a) * a) * inv_r2;
      operators_.push_back(op);
      neumann_rows_.push_back(-dr.row(m));
      weights_.push_back(base);
    }
  }

  v_ = CVector::Zero(block_);
  if (has_potential_)
    for (Index i = 0; i < block_; ++i) v_(i) = radial_v(radii_(i), false);
  require_finite(v_, "radial potential");
  v_sup_ = block_ > 0 ? v_.cwiseAbs().maxCoeff() : 0.0;
  threshold_ = a_priori_threshold(v_sup_);
}

std::string DiskModel::name() const { return interior() ? "disk_interior" : "disk_exterior"; }

bool DiskModel::potential_is_real() const { return !has_potential_ || config_.radial_potential->is_real(); }

Complex DiskModel::radial_v(double r, bool tilde) const {
  if (!has_potential_) return {};
  if (!interior() && r > config_.r_cut) return {};
  const Complex v = config_.radial_potential->value(r);
  return tilde ? std::conj(v) : v;
}

OdeOptions DiskModel::ode_options(Complex lambda) const {
  OdeOptions opt = config_.ode;
  opt.max_step /= std::max(1.0, std::sqrt(std::abs(lambda)));
  return opt;
}

CVector DiskModel::apply(const CVector& f, bool tilde) const {
  if (f.size() != state_dim()) fail(ErrorKind::InvalidArgument, "disk: state length mismatch");
  const CVector v = tilde ? CVector(v_.conjugate()) : v_;
  CVector out(f.size());
  for (Index b = 0; b < modes(); ++b) {
    const Eigen::MatrixXd& op = operators_[static_cast<std::size_t>(std::abs(b - config_.k_max))];
    const auto seg = f.segment(b * block_, block_);
    const Eigen::VectorXd re = op * seg.real(), im = op * seg.imag();
    for (Index i = 0; i < block_; ++i) out(b * block_ + i) = Complex(re(i), im(i)) + v(i) * seg(i);
  }
  return out;
}

CVector DiskModel::trace0(const CVector& f) const {
  if (f.size() != state_dim()) fail(ErrorKind::InvalidArgument, "disk: state length mismatch");
  CVector t(modes());
  for (Index b = 0; b < modes(); ++b) {
    const Eigen::RowVectorXd& row = neumann_rows_[static_cast<std::size_t>(std::abs(b - config_.k_max))];
    t(b) = (row.cast<Complex>() * f.segment(b * block_, block_)).value();
  }
  return t;
}

CVector DiskModel::trace1(const CVector& f) const {
  if (f.size() != state_dim()) fail(ErrorKind::InvalidArgument, "disk: state length mismatch");
  CVector t(modes());
  for (Index b = 0; b < modes(); ++b) t(b) = f(b * block_ + block_ - 1);
  return t;
}

Complex DiskModel::inner(const CVector& f, const CVector& g) const {
  Complex sum = 0.0;
  for (Index b = 0; b < modes(); ++b) {
    const Eigen::VectorXd& w = weights_[static_cast<std::size_t>(std::abs(b - config_.k_max))];
    for (Index i = 0; i < block_; ++i) sum += w(i) * f(b * block_ + i) * std::conj(g(b * block_ + i));
  }
  return sum;
}

Complex DiskModel::binner(const CVector& phi, const CVector& psi) const { return kTwoPi * psi.dot(phi); }

CVector DiskModel::resolve(Complex lambda, bool tilde, const CVector& f) const {
  if (f.size() != state_dim()) fail(ErrorKind::InvalidArgument, "disk: state length mismatch");
  const CVector v = tilde ? CVector(v_.conjugate()) : v_;
  const Index last = block_ - 1;
  CVector out(f.size());
  for (Index b = 0; b < modes(); ++b) {
    const auto a = static_cast<std::size_t>(std::abs(b - config_.k_max));
    CMatrix op = operators_[a].cast<Complex>();
    op.diagonal() += v - CVector::Constant(block_, lambda);
    op.row(last) = neumann_rows_[a].cast<Complex>();
    CVector rhs = f.segment(b * block_, block_);
    rhs(last) = 0.0;
    out.segment(b * block_, block_) = solve_linear(op, rhs);
  }
  return out;
}

DiskModel::ModeSolution DiskModel::free_interior(int k, Complex s) const {
  ModeSolution sol;
  sol.samples.resize(block_);
  if (s == Complex{}) {
    if (k == 0) neumann_eigenvalue(k, 0.0);
    // u = r^k / k
    sol.samples.setConstant(1.0 / k);
    sol.weyl = 1.0 / k;
    return sol;
  }
  const BesselPair at_one = bessel_i_scaled(k, s);
  const Complex den = s * at_one.derivative;
  if (std::abs(den) <= 1e-13 * std::max(1.0, std::abs(s)) * std::abs(at_one.value)) neumann_eigenvalue(k, -s * s);
  for (Index i = 0; i + 1 < block_; ++i) sol.samples(i) = interior_profile(k, s, radii_(i)) / den;
  sol.samples(block_ - 1) = at_one.value / den;
  sol.weyl = at_one.value / den;
  return sol;
}

DiskModel::ModeSolution DiskModel::free_exterior(int k, Complex s) const {
  if (!(s.real() > 0.0))
    fail(ErrorKind::MatchingSingular, "disk exterior: lambda lies on [0, inf), the essential spectrum");
  const BesselPair at_one = bessel_k_scaled(k, s);
  const Complex den = -s * at_one.derivative;
  ModeSolution sol;
  sol.samples.resize(block_);
  for (Index i = 0; i + 1 < block_; ++i) {
    const double r = radii_(i);
    sol.samples(i) = bessel_k_scaled(k, s * r).value * std::exp(-s * (r - 1.0)) / den;
  }
  sol.samples(block_ - 1) = at_one.value / den;
  sol.weyl = at_one.value / den;
  return sol;
}

// q'' + (2k+1)/r q' = (V - lambda) q from r0 with the regular expansion
// q = 1 + c r^2, c = (V(0) - lambda) / (4(k+1)).
DiskModel::ModeSolution DiskModel::shoot_interior(int k, Complex lambda, bool tilde) const {
  const Complex s = std::sqrt(-lambda);
  if (s.real() > 600.0) fail(ErrorKind::OverflowGuard, "disk interior shooting: Re sqrt(-lambda) > 600");
  const double r0 = std::min(1e-3, 0.5 * radii_(0));
  const Complex c = (radial_v(r0, tilde) - lambda) / (4.0 * (k + 1.0));
  const double kk = 2.0 * k + 1.0;
  const Rhs2 rhs = [&](double r, const State2& y) -> State2 {
    return {y[1], (radial_v(r, tilde) - lambda) * y[0] - kk / r * y[1]};
  };
  const std::vector<double> outputs(radii_.data(), radii_.data() + block_ - 1);
  const OdeTrajectory traj = integrate_dp5(rhs, r0, 1.0, {1.0 + c * r0 * r0, 2.0 * c * r0}, ode_options(lambda), outputs);
  const Complex q1 = traj.end[0];
  const Complex den = static_cast<double>(k) * q1 + traj.end[1];
  if (std::abs(den) <= 100.0 * config_.ode.rtol * std::max(1.0, std::abs(s)) * std::abs(q1))
    neumann_eigenvalue(k, lambda);
  ModeSolution sol;
  sol.samples.resize(block_);
  for (Index i = 0; i + 1 < block_; ++i) sol.samples(i) = traj.samples[static_cast<std::size_t>(i)][0] / den;
  sol.samples(block_ - 1) = q1 / den;
  sol.weyl = q1 / den;
  return sol;
}

// u'' + u'/r = (V - lambda + k^2/r^2) u inward from r_cut, where u = K_k(s r).
DiskModel::ModeSolution DiskModel::shoot_exterior(int k, Complex lambda, bool tilde) const {
  const Complex s = std::sqrt(-lambda);
  if (!(s.real() > 0.0))
    fail(ErrorKind::MatchingSingular, "disk exterior: lambda lies on [0, inf), the essential spectrum");
  const double big = config_.r_cut;
  if (s.real() * (big - 1.0) > 600.0)
    fail(ErrorKind::OverflowGuard, "disk exterior shooting: Re sqrt(-lambda) (r_cut - 1) > 600");
  const BesselPair start = bessel_k_scaled(k, s * big);
  const double k2 = static_cast<double>(k) * k;
  const Rhs2 rhs = [&](double r, const State2& y) -> State2 {
    return {y[1], (radial_v(r, tilde) - lambda + k2 / (r * r)) * y[0] - y[1] / r};
  };
  std::vector<double> outputs;
  std::vector<Index> slots;
  for (Index i = 0; i + 1 < block_; ++i)
    if (radii_(i) <= big) {
      outputs.push_back(radii_(i));
      slots.push_back(i);
    }
  const OdeTrajectory traj =
      integrate_dp5(rhs, big, 1.0, {start.value, s * start.derivative}, ode_options(lambda), outputs);
  const Complex den = -traj.end[1];
  if (std::abs(den) <= 100.0 * config_.ode.rtol * std::max(1.0, std::abs(s)) * std::abs(traj.end[0]))
    neumann_eigenvalue(k, lambda);
  ModeSolution sol;
  sol.samples.resize(block_);
  for (Index i = 0; i + 1 < block_; ++i) {
    const double r = radii_(i);
    if (r > big) sol.samples(i) = bessel_k_scaled(k, s * r).value * std::exp(-s * (r - big)) / den;
  }
  for (std::size_t j = 0; j < slots.size(); ++j) sol.samples(slots[j]) = traj.samples[j][0] / den;
  sol.samples(block_ - 1) = traj.end[0] / den;
  sol.weyl = traj.end[0] / den;
  return sol;
}

DiskModel::ModeSolution DiskModel::mode_solution(int k, Complex lambda, bool tilde) const {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    fail(ErrorKind::InvalidArgument, "disk: lambda must be finite");
  if (std::abs(k) > config_.k_max) fail(ErrorKind::InvalidArgument, "disk: mode beyond k_max");
  k = std::abs(k);
  if (has_potential_) return interior() ? shoot_interior(k, lambda, tilde) : shoot_exterior(k, lambda, tilde);
  const Complex s = std::sqrt(-lambda);
  return interior() ? free_interior(k, s) : free_exterior(k, s);
}

Complex DiskModel::mode_weyl(int k, Complex lambda, bool tilde) const { return mode_solution(k, lambda, tilde).weyl; }

CVector DiskModel::lift(Complex lambda, bool tilde, const CVector& g) const {
  if (g.size() != modes()) fail(ErrorKind::InvalidArgument, "disk: boundary data length mismatch");
  CVector f = CVector::Zero(state_dim());
  for (Index b = 0; b < modes(); ++b) {
    if (g(b) == Complex{}) continue;
    const ModeSolution sol = mode_solution(static_cast<int>(b) - config_.k_max, lambda, tilde);
    f.segment(b * block_, block_) = g(b) * sol.samples;
  }
  return f;
}

CMatrix DiskModel::weyl_matrix(Complex lambda) const {
  CMatrix m = CMatrix::Zero(modes(), modes());
  // M depends on |k| only
  for (int a = 0; a <= config_.k_max; ++a) {
    const Complex w = mode_weyl(a, lambda, false);
    m(config_.k_max + a, config_.k_max + a) = w;
    m(config_.k_max - a, config_.k_max - a) = w;
  }
  return m;
}

CMatrix DiskModel::weyl_matrix_tilde(Complex mu) const {
  CMatrix m = CMatrix::Zero(modes(), modes());
  for (int a = 0; a <= config_.k_max; ++a) {
    const Complex w = mode_weyl(a, mu, true);
    m(config_.k_max + a, config_.k_max + a) = w;
    m(config_.k_max - a, config_.k_max - a) = w;
  }
  return m;
}

CVector DiskModel::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  CVector f(state_dim());
  for (Index b = 0; b < modes(); ++b) {
    Complex c[8];
    for (int j = 0; j < 8; ++j) c[j] = Complex(normal(rng), normal(rng)) / (1.0 + j);
    for (Index i = 0; i < block_; ++i) {
      Complex acc = 0.0;
      if (interior()) {
        const double t = coords_(i);
        for (int j = 6; j >= 0; --j) acc = acc * t + c[j];
      } else {
        const double rinv = 1.0 / radii_(i);
        for (int j = 7; j >= 2; --j) acc = (acc + c[j]) * rinv;
        acc *= rinv;
      }
      f(b * block_ + i) = acc;
    }
  }
  return f;
}

std::shared_ptr<const DiskModel> build_disk(const DiskModelConfig& config) {
  return std::make_shared<const DiskModel>(config);
}

BoundaryOperator disk_mode_operator(int k_max, std::span<const ModeEntry> entries) {
  if (k_max < 1) fail(ErrorKind::InvalidArgument, "disk: k_max must be at least 1");
  const Index d = 2 * k_max + 1;
  CMatrix m = CMatrix::Zero(d, d);
  for (const ModeEntry& e : entries) {
    if (std::abs(e.k) > k_max || std::abs(e.j) > k_max) {
      std::ostringstream os;
      os << "boundary operator entry (" << e.k << ", " << e.j << ") couples modes beyond k_max = " << k_max;
      fail(ErrorKind::TruncationWarning, os.str());
    }
    m(e.k + k_max, e.j + k_max) += e.value;
  }
  return BoundaryOperator::from_matrix(std::move(m));
}

double disk_robin_reference(int k, double beta) {
  if (!std::isfinite(beta)) fail(ErrorKind::InvalidArgument, "disk_robin_reference: beta must be finite");
  auto f = [&](double x) {
    const auto [j, dj] = bessel_j(k, x);
    return x * dj - beta * j;
  };
  double a = 1e-3, fa = f(a);
  for (double b = a + 0.01; b <= 100.0; b += 0.01) {
    const double fb = f(b);
    if (fb == 0.0) return b * b;
    if ((fa < 0.0) != (fb < 0.0)) {
      while (b - a > 1e-14 * b) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid * mid;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double x = 0.5 * (a + b);
      return x * x;
    }
    a = b;
    fa = fb;
  }
  std::ostringstream os;
  os << "no Robin root for k = " << k << ", beta = " << beta << " with sqrt(lambda) <= 100";
  fail(ErrorKind::NoRootInBracket, os.str());
}

}  // namespace krein
