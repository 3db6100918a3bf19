#include "krein/potential.hpp"

#include <array>
#include <queue>
#include <cmath>
#include <sstream>

#include "krein/errors.hpp"

namespace krein {

namespace {

// Kronrod 15-point nodes on [-1, 1] (nonnegative half) and weights; every
// other node is a Gauss 7-point node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodResult {
  Complex value;
  double error;
};

KronrodResult kronrod15(const std::function<Complex(double)>& fn, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = fn(center);
  Complex resk = fc * kWgk[7];
  Complex resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const Complex f1 = fn(center - dx);
    const Complex f2 = fn(center + dx);
    resk += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  return {resk * half, std::abs((resk - resg) * half)};
}

struct Piece {
  double a, b;
  KronrodResult r;
  bool operator<(const Piece& other) const { return r.error < other.r.error; }
};

}  // namespace

Complex integrate_adaptive(const std::function<Complex(double)>& fn, double a, double b, double rtol,
                           int max_intervals) {
  if (b == a) return {};
  // Global subdivision: always split the piece with the largest error
  // estimate, so integrable endpoint singularities are graded automatically.
  std::priority_queue<Piece> pieces;
  pieces.push({a, b, kronrod15(fn, a, b)});
  Complex total = pieces.top().r.value;
  double error = pieces.top().r.error;
  int count = 1;
  while (error > rtol * std::abs(total) && count < max_intervals) {
    const Piece worst = pieces.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a < 1e-15 * std::max(1.0, std::abs(mid))) break;
    pieces.pop();
    const Piece left{worst.a, mid, kronrod15(fn, worst.a, mid)};
    const Piece right{mid, worst.b, kronrod15(fn, mid, worst.b)};
    total += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    pieces.push(left);
    pieces.push(right);
    ++count;
  }
  // re-sum to shed the drift of the running updates
  Complex sum{};
  while (!pieces.empty()) {
    sum += pieces.top().r.value;
    pieces.pop();
  }
  return sum;
}

Potential1D Potential1D::zero() { return Potential1D{}; }

Potential1D Potential1D::constant(Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    fail(ErrorKind::InvalidPotential, "constant potential must be finite");
  if (value == Complex{}) return zero();
  Potential1D v;
  v.kind_ = Kind::Constant;
  v.c_ = value;
  v.real_ = value.imag() == 0.0;
  std::ostringstream os;
  os << "constant(" << value.real() << "," << value.imag() << ")";
  v.label_ = os.str();
  return v;
}

Potential1D Potential1D::smooth(std::function<Complex(double)> fn, std::string label, bool real) {
  if (!fn) fail(ErrorKind::InvalidPotential, "smooth potential needs a callable");
  Potential1D v;
  v.kind_ = Kind::Smooth;
  v.fn_ = std::move(fn);
  v.label_ = std::move(label);
  v.real_ = real;
  return v;
}

Potential1D Potential1D::polynomial(std::vector<Complex> coeffs) {
  bool real = true;
  bool all_zero = true;
  for (const Complex& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      fail(ErrorKind::InvalidPotential, "polynomial coefficients must be finite");
    real = real && c.imag() == 0.0;
    all_zero = all_zero && c == Complex{};
  }
  if (all_zero) return zero();
  auto shared = std::make_shared<const std::vector<Complex>>(std::move(coeffs));
  Potential1D v = smooth(
      [shared](double x) {
        Complex acc{};
        for (auto it = shared->rbegin(); it != shared->rend(); ++it) acc = acc * x + *it;
        return acc;
      },
      "polynomial");
  v.real_ = real;
  return v;
}

Potential1D Potential1D::power_singularity(Complex c, double x0, double alpha, double p) {
  if (!(alpha > 0.0) || !(p >= 1.0) || !(alpha * p < 1.0))
    fail(ErrorKind::InvalidPotential, "power singularity needs alpha > 0, p >= 1 and alpha * p < 1");
  if (!std::isfinite(x0) || !std::isfinite(c.real()) || !std::isfinite(c.imag()))
    fail(ErrorKind::InvalidPotential, "power singularity parameters must be finite");
  Potential1D v;
  v.kind_ = Kind::PowerSingularity;
  v.c_ = c;
  v.x0_ = x0;
  v.alpha_ = alpha;
  v.p_ = p;
  v.real_ = c.imag() == 0.0;
  std::ostringstream os;
  os << "power(c=" << c.real() << "+" << c.imag() << "i,x0=" << x0 << ",alpha=" << alpha << ",p=" << p
     << ")";
  v.label_ = os.str();
  return v;
}

Potential1D Potential1D::table(std::vector<Complex> values, double a, double b) {
  if (values.empty() || !(b > a)) fail(ErrorKind::InvalidPotential, "table potential needs cells on a < b");
  bool real = true;
  for (const Complex& c : values) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      fail(ErrorKind::InvalidPotential, "table potential values must be finite");
    real = real && c.imag() == 0.0;
  }
  Potential1D v;
  v.kind_ = Kind::Table;
  v.table_ = std::make_shared<const std::vector<Complex>>(std::move(values));
  v.table_a_ = a;
  v.table_b_ = b;
  v.real_ = real;
  v.label_ = "table(" + std::to_string(v.table_->size()) + ")";
  return v;
}

Complex Potential1D::value(double x) const {
  Complex raw{};
  switch (kind_) {
    case Kind::Zero:
      return {};
    case Kind::Constant:
      raw = c_;
      break;
    case Kind::Smooth:
      raw = fn_(x);
      break;
    case Kind::PowerSingularity:
      raw = c_ * std::pow(std::abs(x - x0_), -alpha_);
      break;
    case Kind::Table: {
      const auto cells = static_cast<double>(table_->size());
      double pos = (x - table_a_) / (table_b_ - table_a_) * cells;
      auto idx = static_cast<long>(std::floor(pos));
      idx = std::clamp<long>(idx, 0, static_cast<long>(table_->size()) - 1);
      raw = (*table_)[static_cast<std::size_t>(idx)];
      break;
    }
  }
  return conjugated_ ? std::conj(raw) : raw;
}

Complex Potential1D::cell_average(double a, double b) const {
  if (!(b > a)) fail(ErrorKind::InvalidArgument, "cell_average needs a < b");
  switch (kind_) {
    case Kind::Zero:
      return {};
    case Kind::Constant:
      return conjugated_ ? std::conj(c_) : c_;
    case Kind::Table: {
      // exact average of a piecewise constant function
      const auto cells = static_cast<double>(table_->size());
      const double width = (table_b_ - table_a_) / cells;
      Complex acc{};
      for (std::size_t i = 0; i < table_->size(); ++i) {
        const double lo = std::max(a, table_a_ + static_cast<double>(i) * width);
        const double hi = std::min(b, table_a_ + static_cast<double>(i + 1) * width);
        if (hi > lo) acc += (*table_)[i] * (hi - lo);
      }
      if (a < table_a_) acc += table_->front() * (std::min(b, table_a_) - a);
      if (b > table_b_) acc += table_->back() * (b - std::max(a, table_b_));
      acc /= (b - a);
      return conjugated_ ? std::conj(acc) : acc;
    }
    case Kind::Smooth:
    case Kind::PowerSingularity:
      break;
  }
  auto fn = [this](double x) { return value(x); };
  constexpr double kRtol = 1e-10;
  if (kind_ == Kind::PowerSingularity && x0_ >= a && x0_ <= b) {
    // x = x0 +- s^q with q = 1/(1 - alpha) turns |x - x0|^-alpha dx into a
    // constant multiple of ds
    const double q = 1.0 / (1.0 - alpha_);
    auto side = [&](double dist, double sign) -> Complex {
      if (dist <= 0.0) return {};
      auto g = [&](double s) { return fn(x0_ + sign * std::pow(s, q)) * q * std::pow(s, q - 1.0); };
      return integrate_adaptive(g, 0.0, std::pow(dist, 1.0 / q), kRtol);
    };
    return (side(x0_ - a, -1.0) + side(b - x0_, 1.0)) / (b - a);
  }
  return integrate_adaptive(fn, a, b, kRtol) / (b - a);
}

std::vector<Complex> Potential1D::cell_averages(double a, double b, Index cells) const {
  if (cells <= 0) fail(ErrorKind::InvalidArgument, "cell_averages needs a positive cell count");
  std::vector<Complex> out(static_cast<std::size_t>(cells));
  const double width = (b - a) / static_cast<double>(cells);
  for (Index j = 0; j < cells; ++j) {
    const double lo = a + static_cast<double>(j) * width;
    out[static_cast<std::size_t>(j)] = cell_average(lo, lo + width);
  }
  return out;
}

Potential1D Potential1D::conjugate() const {
  Potential1D v = *this;
  if (!real_) v.conjugated_ = !conjugated_;
  return v;
}

}  // namespace krein
