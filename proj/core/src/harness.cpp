#include "krein/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "config_json.hpp"
#include "json_util.hpp"
#include "krein/disk.hpp"
#include "krein/errors.hpp"
#include "krein/fd1d.hpp"
#include "krein/sectorial.hpp"
#include "krein/shoot1d.hpp"

namespace krein {

using detail::Json;

namespace {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------- config

double default_tolerance(std::string_view check, std::string_view kind) {
  const bool fd = kind == "fd1d";
  const bool disk = kind == "disk_interior" || kind == "disk_exterior";
  if (check == "green") return fd ? 1e-12 : 1e-8;
  if (check == "weyl_symmetry" || check == "difference_identity") return fd ? 1e-10 : disk ? 1e-9 : 1e-8;
  if (check == "gamma_resolvent" || check == "gamma_adjoint") return fd ? 1e-10 : 1e-8;
  if (check == "gamma_trace") return 1e-10;
  if (check == "krein_pde" || check == "krein_boundary" || check == "krein_dense") return 1e-8;
  if (check == "bs_lower_bound") return 1e-12;
  if (check == "sectorial") return 1e-9;
  if (check == "c1_norm") return 0.5;
  if (check == "c1_zero") return 1e-10;
  if (check == "adjoint_matrices") return 1e-13;
  if (check == "relative_bound_monotone") return 1.0 - 1e-9;
  if (check == "relative_bound_limit") return 1e-2;
  if (check == "weyl_decay" || check == "weyl_decay_bound" || check == "mode_decay" || check == "mode_decay_bound")
    return 0.05;
  if (check == "bs_zero" || check == "bs_hausdorff") return 1e-6;
  if (check == "bs_disk_reference") return 1e-8;
  // lower-bound checks report their shortfall: h_refinement
  return 0.0;
}

Region region_from(const Json& j) {
  if (!j.is_array() || j.size() != 4) fail(ErrorKind::InvalidArgument, "'region' must be [re_min, re_max, im_min, im_max]");
  return {detail::get_double(j[0], "region"), detail::get_double(j[1], "region"), detail::get_double(j[2], "region"),
          detail::get_double(j[3], "region")};
}

std::vector<double> doubles_from(const Json& j, std::string_view key) {
  if (!j.is_array()) fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const Json& x : j) out.push_back(detail::get_double(x, key));
  return out;
}

BsCase bs_case_from(const Json& j) {
  detail::check_keys(j, "complex_scan_regions entry",
                     {"model", "region", "grid", "b", "draws", "scale", "betas", "k_limit"});
  BsCase c;
  if (j.contains("model")) c.model = detail::get_int(j["model"], "model");
  if (j.contains("region")) c.region = region_from(j["region"]);
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    if (!g.is_array() || g.size() != 2) fail(ErrorKind::InvalidArgument, "'grid' must be [re_points, im_points]");
    c.grid = {detail::get_int(g[0], "grid"), detail::get_int(g[1], "grid")};
  }
  if (j.contains("b")) c.b_kind = detail::get_string(j["b"], "b");
  if (j.contains("draws")) c.draws = static_cast<int>(detail::get_int(j["draws"], "draws"));
  if (j.contains("scale")) c.scale = detail::get_double(j["scale"], "scale");
  if (j.contains("betas")) c.betas = doubles_from(j["betas"], "betas");
  if (j.contains("k_limit")) c.k_limit = static_cast<int>(detail::get_int(j["k_limit"], "k_limit"));
  return c;
}

Json bs_case_json(const BsCase& c) {
  Json j;
  j["model"] = c.model;
  j["region"] = {c.region.re_min, c.region.re_max, c.region.im_min, c.region.im_max};
  j["grid"] = {c.grid.re_points, c.grid.im_points};
  j["b"] = c.b_kind;
  j["draws"] = c.draws;
  j["scale"] = c.scale;
  j["betas"] = c.betas;
  j["k_limit"] = c.k_limit;
  return j;
}

// --------------------------------------------------------------- helpers

std::string join_params(std::initializer_list<std::pair<std::string_view, std::string>> items) {
  std::string out;
  for (const auto& [key, value] : items) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += value;
  }
  return out;
}

std::string fmt(double x) { return format_double(x); }

std::string fmt(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

std::string stream_tag(Index model, int group, int draw) {
  return std::to_string(model) + "/" + std::to_string(group) + "/" + std::to_string(draw);
}

Rng stream(std::uint64_t seed, Index model, int group) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(model), static_cast<std::uint32_t>(group)};
  return Rng(seq);
}

CMatrix normal_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m(i) = Complex(n(rng), n(rng));
  return m;
}

CMatrix uniform_matrix(Rng& rng, Index dim, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CMatrix m(dim, dim);
  for (Index i = 0; i < m.size(); ++i) m(i) = Complex(u(rng), u(rng));
  return m;
}

/// The grid shifted down so that its top point is at most `xi` - 1/2.
std::vector<double> shifted_grid(const std::vector<double>& grid, double xi) {
  const double top = *std::max_element(grid.begin(), grid.end());
  const double shift = std::min(0.0, xi - 0.5 - top);
  std::vector<double> out;
  for (double l : grid) out.push_back(l + shift);
  return out;
}

unsigned worker_count(unsigned jobs, std::size_t tasks) {
  unsigned w = jobs != 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(tasks, 1)));
}

/// Runs fn(0..n-1) on up to `jobs` threads; results stay in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
  };
  const unsigned workers = worker_count(jobs, n);
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return out;
}

struct BuiltModel {
  std::string label;
  std::string kind;
  std::shared_ptr<const TripleModel> model;
  std::string error;
  bool zero_potential = false;
};

std::vector<BuiltModel> build_all(const SuiteConfig& config) {
  return parallel_map<BuiltModel>(config.models.size(), config.jobs, [&](std::size_t i) {
    const ModelSpec& spec = config.models[i];
    BuiltModel b;
    b.label = std::to_string(i) + ":" + spec.label();
    b.kind = spec.kind;
    b.zero_potential = spec.potential.kind == "zero" ||
                       (spec.potential.kind == "smooth" && spec.potential.polynomial.empty() &&
                        spec.potential.cosine.empty());
    try {
      b.model = build_model(spec);
    } catch (const std::exception& e) {
      b.error = e.what();
    }
    return b;
  });
}

/// Records of one task. Every check goes through `guard`, so exceptions
/// turn into failing records.
class Section {
 public:
  Section(const SuiteConfig& config, const BuiltModel& built, Index index, int group)
      : config_(config), built_(built), index_(index), group_(group), rng_(stream(config.seed, index, group)) {}

  Rng& rng() { return rng_; }
  int next_draw() { return draw_++; }
  std::string tag(int draw) const { return stream_tag(index_, group_, draw); }

  double tol(std::string_view check) const { return check_tolerance(config_, check, built_.kind); }

  /// Override if configured, else `fallback` (for model-dependent defaults).
  double tol_or(std::string_view check, double fallback) const {
    if (config_.tolerances.contains(std::string(check)) || config_.tolerances.contains("*")) return tol(check);
    return fallback;
  }

  void add(std::string check, std::string params, double defect, double tolerance, std::string note = {}) {
    report.records.push_back(
        make_record(std::move(check), built_.label, std::move(params), defect, tolerance, std::move(note)));
  }

  /// fn returns the defect; the tolerance is tol(check) unless fn sets `scale`.
  void guard(const std::string& check, const std::string& params, const std::function<double(double&)>& fn) {
    guard_with(check, params, tol(check), fn);
  }

  void guard_with(const std::string& check, const std::string& params, double tolerance,
                  const std::function<double(double&)>& fn) {
    double scale = 1.0;
    try {
      const double d = fn(scale);
      add(check, params, d, tolerance * scale);
    } catch (const Error& e) {
      add(check, params, INFINITY, tolerance, std::string(to_string(e.kind())) + ": " + e.what());
    } catch (const std::exception& e) {
      add(check, params, INFINITY, tolerance, e.what());
    }
  }

  VerificationReport report;

 private:
  const SuiteConfig& config_;
  const BuiltModel& built_;
  Index index_;
  int group_;
  Rng rng_;
  int draw_ = 0;
};

struct Points {
  std::vector<double> reals;
  std::vector<Complex> complexes;

  /// Even i: certified reals, odd i: complex points with the same real parts.
  SpectralPoint at(const TripleModel& m, std::size_t i) const {
    if (i % 2 == 0) return SpectralPoint::at(m, reals[(i / 2) % reals.size()]);
    return SpectralPoint::unchecked(m, complexes[(i / 2) % complexes.size()]);
  }
  std::size_t size() const { return 2 * reals.size(); }
};

Points points_for(const SuiteConfig& config, const TripleModel& m) {
  Points p;
  p.reals = shifted_grid(config.lambda_grid, m.certified_threshold());
  // Re lambda below the threshold keeps both Neumann realizations invertible.
  for (double l : p.reals) p.complexes.emplace_back(l, 0.5 * std::abs(l));
  return p;
}

// ----------------------------------------------------------- identities

enum Group : int {
  kGammaTrace = 0,
  kGreen = 1,
  kWeyl = 2,
  kKrein = 3,
  kLowerBound = 4,
  kMatrices = 5,
  kModelSpecific = 6,
  kDecay = 10,
  kBs = 20,
};

void gamma_trace_checks(Section& s, const TripleModel& m, const Points& p, int count) {
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const double lambda = p.reals[static_cast<std::size_t>(i) % p.reals.size()];
    const CVector g = m.random_boundary(s.rng());
    s.guard("gamma_trace", join_params({{"lambda", fmt(lambda)}, {"draw", s.tag(draw)}}), [&](double&) {
      const CVector f = gamma(m, SpectralPoint::at(m, lambda), g);
      return m.bnorm(m.trace0(f) - g) / m.bnorm(g);
    });
  }
}

void green_checks(Section& s, const TripleModel& m, int count) {
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const CVector f = m.random_state(s.rng());
    const CVector g = m.random_state(s.rng());
    // ||f|| is the Euclidean norm of the sample vector: in the carrier norm
    // the stencil's own rounding (eps / h^2) already exceeds 1e-12.
    s.guard("green", join_params({{"draw", s.tag(draw)}}), [&](double& scale) {
      scale = f.norm() * g.norm() * (1.0 + m.potential_sup());
      return green_defect(m, f, g);
    });
  }
}

void weyl_checks(Section& s, const TripleModel& m, const Points& p, int count) {
  std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
  for (int i = 0; i < count; ++i) {
    const SpectralPoint l = p.at(m, static_cast<std::size_t>(i));
    s.guard("weyl_symmetry", join_params({{"lambda", fmt(l.lambda)}}),
            [&](double&) { return weyl_symmetry_defect(m, l); });
  }
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const SpectralPoint l = p.at(m, pick(s.rng())), mu = p.at(m, pick(s.rng()));
    s.guard("difference_identity",
            join_params({{"lambda", fmt(l.lambda)}, {"mu", fmt(mu.lambda)}, {"draw", s.tag(draw)}}),
            [&](double&) { return difference_identity_defect(m, l, mu); });
  }
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const SpectralPoint l = p.at(m, pick(s.rng())), nu = p.at(m, pick(s.rng()));
    const CVector g = m.random_boundary(s.rng());
    s.guard("gamma_resolvent",
            join_params({{"lambda", fmt(l.lambda)}, {"nu", fmt(nu.lambda)}, {"draw", s.tag(draw)}}),
            [&](double&) { return gamma_resolvent_identity_defect(m, l, nu, g); });
  }
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const SpectralPoint l = p.at(m, pick(s.rng()));
    const CVector g = m.random_boundary(s.rng());
    const CVector f = m.random_state(s.rng());
    // (gamma(l) g, f) = <g, gamma(l)^* f>
    s.guard("gamma_adjoint", join_params({{"lambda", fmt(l.lambda)}, {"draw", s.tag(draw)}}), [&](double&) {
      const CVector u = gamma(m, l, g);
      const Complex lhs = m.inner(u, f);
      const Complex rhs = m.binner(g, gamma_adjoint(m, l, f));
      return std::abs(lhs - rhs) / (m.norm(u) * m.norm(f));
    });
  }
}

void krein_checks(Section& s, const BuiltModel& built, const Points& p, int count) {
  const TripleModel& m = *built.model;
  const auto* fd = dynamic_cast<const Fd1dModel*>(&m);
  const Index bd = m.boundary_dim();
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const double lambda = p.reals[static_cast<std::size_t>(i) % p.reals.size()];
    const CMatrix b = normal_matrix(s.rng(), bd, bd) * (0.5 / std::sqrt(static_cast<double>(bd)));
    const CVector f = m.random_state(s.rng());
    const std::string params = join_params({{"lambda", fmt(lambda)}, {"draw", s.tag(draw)}});
    const BoundaryOperator op = BoundaryOperator::from_matrix(b);
    CVector u;
    try {
      u = krein_resolvent(m, op, SpectralPoint::at(m, lambda), f);
    } catch (const Error& e) {
      const std::string note = std::string(to_string(e.kind())) + ": " + e.what();
      s.add("krein_pde", params, INFINITY, s.tol("krein_pde"), note);
      s.add("krein_boundary", params, INFINITY, s.tol("krein_boundary"), note);
      continue;
    }
    const RobinResidual r = robin_residual(m, op, lambda, u, f);
    s.add("krein_pde", params, r.pde, s.tol("krein_pde"));
    s.add("krein_boundary", params, r.boundary, s.tol("krein_boundary"));
    if (fd != nullptr) {
      s.guard("krein_dense", params, [&](double&) {
        const Index ni = fd->state_dim() - 2;
        const CMatrix a = dense_robin_matrix(*fd, b) - lambda * CMatrix::Identity(ni, ni);
        const CVector dense = solve_linear(a, interior(*fd, f));
        return (interior(*fd, u) - dense).norm() / dense.norm();
      });
    }
  }
}

void lower_bound_checks(Section& s, const TripleModel& m, const Points& p, int count) {
  std::uniform_real_distribution<double> target(0.1, 0.9);
  const Index bd = m.boundary_dim();
  for (int i = 0; i < count; ++i) {
    const int draw = s.next_draw();
    const double lambda = p.reals[static_cast<std::size_t>(i) % p.reals.size()];
    CMatrix b = normal_matrix(s.rng(), bd, bd);
    const double t = target(s.rng());
    s.guard("bs_lower_bound", join_params({{"lambda", fmt(lambda)}, {"bm", fmt(t)}, {"draw", s.tag(draw)}}),
            [&](double&) {
              const double mn = spectral_norm(m.weyl_matrix(lambda));
              b *= t / (spectral_norm(b) * mn);
              const double bound = 1.0 - spectral_norm(b) * mn;
              return std::max(0.0, bound - bs_indicator(m, BoundaryOperator::from_matrix(b), lambda));
            });
  }
}

// ||M(lambda)|| of the free interval of length L at lambda = -s^2.
CMatrix free_interval_weyl(double s, double length) {
  CMatrix m(2, 2);
  const double c = 1.0 / (s * std::tanh(s * length)), d = 1.0 / (s * std::sinh(s * length));
  m << c, d, d, c;
  return m;
}

void matrix_checks(Section& s, const BuiltModel& built, const SuiteConfig& config) {
  const TripleModel& m = *built.model;
  if (!m.hn_matrix()) return;
  double xi = m.certified_threshold();
  s.guard("xi2", "", [&](double&) {
    xi = std::min(xi, empirical_threshold(m, -1.0));
    return 0.0;
  });
  for (double lambda : shifted_grid(config.lambda_grid, xi)) {
    const std::string params = join_params({{"lambda", fmt(lambda)}, {"xi2", fmt(xi)}});
    try {
      const SectorialFactorization f = sectorial_factorization(m, lambda);
      s.add("sectorial", params, f.defect, s.tol("sectorial") * f.resolvent_norm);
      if (built.zero_potential)
        s.add("c1_zero", params, f.c1_norm, s.tol("c1_zero"));
      else
        s.add("c1_norm", params, f.c1_norm, s.tol("c1_norm"));
    } catch (const Error& e) {
      s.add("sectorial", params, INFINITY, s.tol("sectorial"), std::string(to_string(e.kind())) + ": " + e.what());
    }
  }

  std::vector<double> lambdas;
  for (int k = 1; k <= 5; ++k) lambdas.push_back(-std::pow(10.0, k));
  std::vector<std::pair<double, double>> decay;
  s.guard("relative_bound_monotone", "lambda=-10^k;k=1..5", [&](double&) {
    decay = relative_bound_decay(m, lambdas);
    double worst = 0.0;
    for (std::size_t i = 1; i < decay.size(); ++i) {
      const double prev = decay[i - 1].second, cur = decay[i].second;
      worst = std::max(worst, prev == 0.0 && cur == 0.0 ? 0.0 : cur / prev);
    }
    return worst;
  });
  if (!decay.empty())
    s.add("relative_bound_limit", "lambda=-1e5", decay.back().second, s.tol("relative_bound_limit"));

  const auto* fd = dynamic_cast<const Fd1dModel*>(&m);
  if (fd == nullptr) return;
  s.guard("adjoint_matrices", "", [&](double&) {
    return max_abs(fd->neumann_matrix() - fd->neumann_matrix_tilde().adjoint());
  });
  if (built.zero_potential) {
    const double lambda = -4.0;
    s.guard("h_refinement", "n=256,1024;lambda=-4", [&](double&) {
      const double length = fd->grid().length;
      const CMatrix exact = free_interval_weyl(2.0, length);
      const double e1 = spectral_norm(build_fd1d(256, length, Potential1D::zero())->weyl_matrix(lambda) - exact);
      const double e2 = spectral_norm(build_fd1d(1024, length, Potential1D::zero())->weyl_matrix(lambda) - exact);
      const double order = std::log(e1 / e2) / std::log(4.0);
      return std::max(0.0, 1.8 - order);
    });
  }
}

void shoot_checks(Section& s, const Shoot1dModel& m, const Points& p) {
  const ShootConfig& c = m.config();
  std::vector<double> xs;
  for (int i = 1; i < 50; ++i) xs.push_back(c.length * i / 50.0);
  const std::vector<Complex> lambdas{p.reals.front(), p.complexes.front(), p.reals.back()};
  for (const Complex lambda : lambdas) {
    s.guard_with("wronskian", join_params({{"lambda", fmt(lambda)}}), s.tol_or("wronskian", 10.0 * c.rtol), [&](double&) {
      const IvpSolution u = solve_ivp_schrodinger(c, lambda, 0.0, 1.0, 0.0, ShootDirection::Forward, xs);
      const IvpSolution v = solve_ivp_schrodinger(c, lambda, 0.0, 0.0, 1.0, ShootDirection::Forward, xs);
      double worst = std::abs(u.f_end * v.df_end - u.df_end * v.f_end - 1.0);
      double size = 1.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        worst = std::max(worst, std::abs(u.f[i] * v.df[i] - u.df[i] * v.f[i] - 1.0));
        size = std::max(size, std::abs(u.f[i] * v.df[i]) + std::abs(u.df[i] * v.f[i]));
      }
      return worst / size;
    });
  }
  std::shared_ptr<const Fd1dModel> fine;
  for (double lambda : p.reals) {
    const double tol = s.tol_or("shoot_vs_fd", std::max(1e-5, 100.0 * c.rtol));
    s.guard_with("shoot_vs_fd", join_params({{"lambda", fmt(lambda)}, {"fd_n", "8192"}}), tol, [&](double&) {
      if (!fine) fine = build_fd1d(8192, c.length, c.potential);
      return spectral_norm(m.weyl_matrix(lambda) - fine->weyl_matrix(lambda));
    });
  }
}

VerificationReport identity_task(const SuiteConfig& config, const BuiltModel& built, Index index, int group) {
  Section s(config, built, index, group);
  if (!built.model) {
    if (group == kGammaTrace) s.add("build", "", INFINITY, 0.0, built.error);
    return std::move(s.report);
  }
  const TripleModel& m = *built.model;
  const Points p = points_for(config, m);
  switch (group) {
    case kGammaTrace:
      gamma_trace_checks(s, m, p, config.random_pairs);
      break;
    case kGreen:
      green_checks(s, m, config.random_pairs);
      break;
    case kWeyl:
      weyl_checks(s, m, p, config.identity_samples);
      break;
    case kKrein:
      krein_checks(s, built, p, config.identity_samples);
      break;
    case kLowerBound:
      lower_bound_checks(s, m, p, config.identity_samples);
      break;
    case kMatrices:
      matrix_checks(s, built, config);
      break;
    case kModelSpecific:
      if (const auto* sh = dynamic_cast<const Shoot1dModel*>(&m)) shoot_checks(s, *sh, p);
      break;
    default:
      break;
  }
  return std::move(s.report);
}

// ----------------------------------------------------------------- decay

VerificationReport decay_task(const SuiteConfig& config, const BuiltModel& built, Index index) {
  Section s(config, built, index, kDecay);
  if (!built.model) {
    s.add("build", "", INFINITY, 0.0, built.error);
    return std::move(s.report);
  }
  const TripleModel& m = *built.model;
  const double xi = m.certified_threshold();
  std::vector<double> lambdas;
  for (double l : config.decay_lambdas)
    if (l < xi) lambdas.push_back(l);
  const std::string check = built.zero_potential ? "weyl_decay" : "weyl_decay_bound";
  const std::string params = join_params({{"points", std::to_string(lambdas.size())}});
  if (lambdas.size() < 3) {
    s.add(check, params, INFINITY, s.tol(check), "fewer than 3 decay points below the certified threshold");
    return std::move(s.report);
  }
  try {
    const DecayStudy study = weyl_decay_study(m, lambdas);
    for (const WeylSample& w : study.samples) s.report.decay_samples.push_back({built.label, w.lambda.real(), w.norm});
    s.report.decay_fits.push_back(
        {built.label, study.exponent, study.exponent_stderr, study.log_constant, study.residual});
    const double defect = built.zero_potential ? std::abs(study.exponent + 0.5) : std::max(0.0, study.exponent + 0.5);
    s.add(check, params, defect, s.tol(check), "exponent=" + fmt(study.exponent));
  } catch (const Error& e) {
    s.add(check, params, INFINITY, s.tol(check), std::string(to_string(e.kind())) + ": " + e.what());
  }

  const auto* disk = dynamic_cast<const DiskModel*>(&m);
  if (disk == nullptr) return std::move(s.report);
  const std::string mode_check = built.zero_potential ? "mode_decay" : "mode_decay_bound";
  for (int k = 0; k <= std::min(disk->k_max(), 8); ++k) {
    s.guard(mode_check, join_params({{"k", std::to_string(k)}, {"lambda", "-4^j;j=2..9"}}), [&](double&) {
      std::vector<std::pair<double, double>> pts;
      for (int j = 2; j <= 9; ++j) {
        const double l = -std::pow(4.0, j);
        if (l < xi) pts.emplace_back(-l, std::abs(disk->mode_weyl(k, l)));
      }
      if (pts.size() < 3) fail(ErrorKind::DegenerateInput, "fewer than 3 mode decay points");
      const LogSlopeFit fit = fit_log_slope(pts);
      s.report.decay_fits.push_back(
          {built.label + "/k=" + std::to_string(k), fit.slope, fit.slope_stderr, fit.intercept, fit.residual});
      return built.zero_potential ? std::abs(fit.slope + 0.5) : std::max(0.0, fit.slope + 0.5);
    });
  }
  return std::move(s.report);
}

// -------------------------------------------------------------------- bs

std::vector<Complex> eigs_in(const CMatrix& a, const Region& region) {
  const CVector ev = eig_dense(a);
  std::vector<Complex> in;
  for (Index i = 0; i < ev.size(); ++i)
    if (region.contains(ev(i))) in.push_back(ev(i));
  return sort_and_merge(std::move(in), 1e-7);
}

void bs_random(Section& s, const BuiltModel& built, const BsCase& c, Index case_index, const SuiteConfig& config) {
  const auto* fd = dynamic_cast<const Fd1dModel*>(built.model.get());
  if (fd == nullptr) {
    s.add("bs_hausdorff", "case=" + std::to_string(case_index), INFINITY, s.tol("bs_hausdorff"),
          "random B cross-check needs an fd1d model");
    return;
  }
  const Points p = points_for(config, *fd);
  for (int d = 0; d < c.draws; ++d) {
    const int draw = s.next_draw();
    const CMatrix b = uniform_matrix(s.rng(), 2, c.scale);
    const std::string params = join_params({{"case", std::to_string(case_index)}, {"draw", s.tag(draw)}});
    EigenvalueComparison cmp{built.label, params, {}, {}, INFINITY};
    s.guard("bs_hausdorff", params, [&](double&) {
      const BoundaryOperator op = BoundaryOperator::from_matrix(b);
      cmp.found = robin_eigs(*fd, op, c.region, c.grid).eigenvalues;
      cmp.expected = eigs_in(dense_robin_matrix(*fd, b), c.region);
      cmp.distance = hausdorff_distance(cmp.found, cmp.expected);
      return cmp.distance;
    });
    s.report.eigenvalues.push_back(std::move(cmp));
    const double lambda = p.reals.front();
    s.guard("krein_dense", join_params({{"case", std::to_string(case_index)}, {"lambda", fmt(lambda)},
                                        {"draw", s.tag(draw)}}),
            [&](double&) {
              const CVector f = fd->random_state(s.rng());
              const CVector u = krein_resolvent(*fd, BoundaryOperator::from_matrix(b), SpectralPoint::at(*fd, lambda), f);
              const Index ni = fd->state_dim() - 2;
              const CVector dense =
                  solve_linear(dense_robin_matrix(*fd, b) - lambda * CMatrix::Identity(ni, ni), interior(*fd, f));
              return (interior(*fd, u) - dense).norm() / dense.norm();
            });
  }
}

void bs_scalar(Section& s, const BuiltModel& built, const BsCase& c, Index case_index) {
  const auto* disk = dynamic_cast<const DiskModel*>(built.model.get());
  if (disk == nullptr || disk->config().side != DiskSide::Interior ||
      disk->config().radial_potential.has_value()) {
    s.add("bs_disk_reference", "case=" + std::to_string(case_index), INFINITY, s.tol("bs_disk_reference"),
          "scalar B cross-check needs an interior disk with V = 0");
    return;
  }
  const int kmax = std::min(c.k_limit, disk->k_max());
  for (double beta : c.betas) {
    const std::string params = join_params({{"case", std::to_string(case_index)}, {"beta", fmt(beta)}});
    EigenvalueComparison cmp{built.label, params, {}, {}, 0.0};
    try {
      for (int k = 0; k <= kmax; ++k) cmp.expected.emplace_back(disk_robin_reference(k, beta), 0.0);
      Region region = c.region;
      if (region.re_max <= region.re_min) {
        double top = 0.0;
        for (Complex z : cmp.expected) top = std::max(top, z.real());
        region = {0.5, top + 2.0, -2.0, 2.0};
      }
      cmp.found = robin_eigs(*disk, BoundaryOperator::scalar(disk->boundary_dim(), beta), region, c.grid).eigenvalues;
      for (int k = 0; k <= kmax; ++k) {
        double best = INFINITY;
        for (Complex z : cmp.found) best = std::min(best, std::abs(z - cmp.expected[static_cast<std::size_t>(k)]));
        cmp.distance = std::max(cmp.distance, best);
        s.add("bs_disk_reference", params + ";k=" + std::to_string(k), best, s.tol("bs_disk_reference"),
              "reference=" + fmt(cmp.expected[static_cast<std::size_t>(k)].real()));
      }
    } catch (const Error& e) {
      cmp.distance = INFINITY;
      s.add("bs_disk_reference", params, INFINITY, s.tol("bs_disk_reference"),
            std::string(to_string(e.kind())) + ": " + e.what());
    }
    s.report.eigenvalues.push_back(std::move(cmp));
  }
}

VerificationReport bs_task(const SuiteConfig& config, const std::vector<BuiltModel>& models, Index case_index) {
  const BsCase& c = config.complex_scan_regions[static_cast<std::size_t>(case_index)];
  const BuiltModel& built = models[static_cast<std::size_t>(c.model)];
  Section s(config, built, c.model, kBs + static_cast<int>(case_index));
  if (!built.model) {
    s.add("build", "", INFINITY, 0.0, built.error);
    return std::move(s.report);
  }
  if (c.b_kind == "zero") {
    const std::string params = join_params({{"case", std::to_string(case_index)}});
    EigenvalueComparison cmp{built.label, params, {}, {}, INFINITY};
    s.guard("bs_zero", params, [&](double&) {
      cmp.found =
          robin_eigs(*built.model, BoundaryOperator::zero(built.model->boundary_dim()), c.region, c.grid).eigenvalues;
      cmp.distance = hausdorff_distance(cmp.found, cmp.expected);
      return cmp.distance;
    });
    s.report.eigenvalues.push_back(std::move(cmp));
  } else if (c.b_kind == "random") {
    bs_random(s, built, c, case_index, config);
  } else {
    bs_scalar(s, built, c, case_index);
  }
  return std::move(s.report);
}

std::map<std::string, std::string> environment() {
  std::map<std::string, std::string> env;
  env["library"] = "krein 0.1.0";
#if defined(__clang__)
  env["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = "gcc " __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cxx"] = std::to_string(__cplusplus);
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  return env;
}

VerificationReport empty_report(const SuiteConfig& config) {
  VerificationReport r;
  r.seed = config.seed;
  r.environment = environment();
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VerificationReport identity_section(const SuiteConfig& config, const std::vector<BuiltModel>& models) {
  constexpr int groups = kModelSpecific + 1;
  const std::size_t n = models.size() * groups;
  auto parts = parallel_map<VerificationReport>(n, config.jobs, [&](std::size_t t) {
    const Index index = static_cast<Index>(t / groups);
    return identity_task(config, models[t / groups], index, static_cast<int>(t % groups));
  });
  VerificationReport r = empty_report(config);
  for (auto& part : parts) r.merge(std::move(part));
  return r;
}

VerificationReport decay_section(const SuiteConfig& config, const std::vector<BuiltModel>& models) {
  auto parts = parallel_map<VerificationReport>(models.size(), config.jobs, [&](std::size_t t) {
    return decay_task(config, models[t], static_cast<Index>(t));
  });
  VerificationReport r = empty_report(config);
  for (auto& part : parts) r.merge(std::move(part));
  return r;
}

VerificationReport bs_section(const SuiteConfig& config, const std::vector<BuiltModel>& models) {
  auto parts = parallel_map<VerificationReport>(config.complex_scan_regions.size(), config.jobs,
                                                [&](std::size_t t) { return bs_task(config, models, static_cast<Index>(t)); });
  VerificationReport r = empty_report(config);
  for (auto& part : parts) r.merge(std::move(part));
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ------------------------------------------------------------ public API

SuiteConfig SuiteConfig::defaults() {
  SuiteConfig c;
  ModelSpec complex_v;
  complex_v.potential.kind = "smooth";
  complex_v.potential.polynomial = {Complex(0.6, -0.2), Complex(0.0, 0.5)};
  complex_v.potential.cosine = {CosineTerm{Complex(0.3, 0.0), 3.0, 0.0}};
  ModelSpec free;
  ModelSpec singular;
  singular.potential.kind = "power";
  singular.potential.strength = 1.0;
  singular.potential.x0 = 0.5;
  singular.potential.alpha = 0.45;
  singular.potential.p = 2.0;
  c.models = {complex_v, free, singular};

  BsCase zero;
  zero.b_kind = "zero";
  BsCase random;
  c.complex_scan_regions = {zero, random};

  for (int j = 0; j <= 9; ++j) c.decay_lambdas.push_back(-4.0 * std::pow(10.0, j / 3.0));
  return c;
}

void SuiteConfig::validate() const {
  if (models.empty()) fail(ErrorKind::InvalidArgument, "suite needs at least one model");
  if (lambda_grid.empty()) fail(ErrorKind::InvalidArgument, "lambda_grid is empty");
  for (double l : lambda_grid)
    if (!(l < 0.0) || !std::isfinite(l)) fail(ErrorKind::InvalidArgument, "lambda_grid entries must be finite and negative");
  for (double l : decay_lambdas)
    if (!(l < 0.0) || !std::isfinite(l))
      fail(ErrorKind::InvalidArgument, "decay_lambdas entries must be finite and negative");
  for (const auto& [name, value] : tolerances)
    if (!(value >= 0.0)) fail(ErrorKind::InvalidArgument, "tolerance '" + name + "' must be non-negative");
  if (random_pairs < 1 || identity_samples < 1)
    fail(ErrorKind::InvalidArgument, "random_pairs and identity_samples must be positive");
  for (const BsCase& c : complex_scan_regions) {
    if (c.model < 0 || c.model >= static_cast<Index>(models.size()))
      fail(ErrorKind::InvalidArgument, "complex_scan_regions: model index out of range");
    if (c.b_kind != "zero" && c.b_kind != "random" && c.b_kind != "scalar")
      fail(ErrorKind::InvalidArgument, "complex_scan_regions: b must be zero, random or scalar");
    if (c.b_kind != "scalar" && !(c.region.re_max > c.region.re_min && c.region.im_max >= c.region.im_min))
      fail(ErrorKind::InvalidArgument, "complex_scan_regions: empty region");
    if (c.grid.re_points < 2 || c.grid.im_points < 1 || c.draws < 1 || !(c.scale > 0.0) || c.k_limit < 0)
      fail(ErrorKind::InvalidArgument, "complex_scan_regions: grid, draws, scale and k_limit must be positive");
  }
}

SuiteConfig parse_suite_config(std::string_view json) {
  const Json j = detail::parse_json(json, "suite config");
  detail::check_keys(j, "suite config",
                     {"models", "lambda_grid", "complex_scan_regions", "decay_lambdas", "tolerances", "seed", "jobs",
                      "random_pairs", "identity_samples"});
  SuiteConfig c = SuiteConfig::defaults();
  if (j.contains("models")) {
    if (!j["models"].is_array()) fail(ErrorKind::InvalidArgument, "'models' must be an array");
    c.models.clear();
    for (const Json& m : j["models"]) c.models.push_back(detail::model_from(m));
    // a custom model list invalidates the default scan cases
    if (!j.contains("complex_scan_regions")) c.complex_scan_regions.clear();
  }
  if (j.contains("lambda_grid")) c.lambda_grid = doubles_from(j["lambda_grid"], "lambda_grid");
  if (j.contains("complex_scan_regions")) {
    if (!j["complex_scan_regions"].is_array())
      fail(ErrorKind::InvalidArgument, "'complex_scan_regions' must be an array");
    c.complex_scan_regions.clear();
    for (const Json& b : j["complex_scan_regions"]) c.complex_scan_regions.push_back(bs_case_from(b));
  }
  if (j.contains("decay_lambdas")) c.decay_lambdas = doubles_from(j["decay_lambdas"], "decay_lambdas");
  if (j.contains("tolerances")) {
    detail::require_object(j["tolerances"], "tolerances");
    for (const auto& item : j["tolerances"].items())
      c.tolerances[item.key()] = detail::get_double(item.value(), item.key());
  }
  if (j.contains("seed")) c.seed = detail::get_uint(j["seed"], "seed");
  if (j.contains("jobs")) c.jobs = static_cast<unsigned>(detail::get_uint(j["jobs"], "jobs"));
  if (j.contains("random_pairs")) c.random_pairs = static_cast<int>(detail::get_int(j["random_pairs"], "random_pairs"));
  if (j.contains("identity_samples"))
    c.identity_samples = static_cast<int>(detail::get_int(j["identity_samples"], "identity_samples"));
  c.validate();
  return c;
}

std::string to_json(const SuiteConfig& c) {
  Json j;
  Json models = Json::array();
  for (const ModelSpec& m : c.models) models.push_back(detail::model_json(m));
  j["models"] = models;
  j["lambda_grid"] = c.lambda_grid;
  Json cases = Json::array();
  for (const BsCase& b : c.complex_scan_regions) cases.push_back(bs_case_json(b));
  j["complex_scan_regions"] = cases;
  j["decay_lambdas"] = c.decay_lambdas;
  Json tol = Json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["random_pairs"] = c.random_pairs;
  j["identity_samples"] = c.identity_samples;
  return j.dump(2);
}

CheckRecord make_record(std::string check, std::string model, std::string parameters, double defect,
                        double tolerance, std::string note) {
  return {std::move(check), std::move(model), std::move(parameters), defect, tolerance, defect <= tolerance,
          std::move(note)};
}

std::size_t VerificationReport::passed() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; }));
}

std::size_t VerificationReport::failed() const { return records.size() - passed(); }

void VerificationReport::merge(VerificationReport&& other) {
  auto append = [](auto& into, auto& from) {
    into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
  };
  append(records, other.records);
  append(decay_samples, other.decay_samples);
  append(decay_fits, other.decay_fits);
  append(eigenvalues, other.eigenvalues);
  for (auto& [k, v] : other.environment) environment.emplace(k, v);
  for (auto& [k, v] : other.timings) timings[k] += v;
}

const std::vector<std::string>& core_invariant_checks() {
  static const std::vector<std::string> names{
      "gamma_trace",     "green",          "weyl_symmetry",  "difference_identity", "gamma_resolvent",
      "krein_pde",       "krein_boundary", "bs_lower_bound", "sectorial",           "adjoint_matrices",
  };
  return names;
}

double check_tolerance(const SuiteConfig& config, std::string_view check, std::string_view kind) {
  if (auto it = config.tolerances.find(std::string(check)); it != config.tolerances.end()) return it->second;
  if (auto it = config.tolerances.find("*"); it != config.tolerances.end()) return it->second;
  return default_tolerance(check, kind);
}

VerificationReport run_identity_suite(const SuiteConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r = identity_section(config, build_all(config));
  r.timings["identity"] = seconds_since(t0);
  return r;
}

VerificationReport run_decay_suite(const SuiteConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r = decay_section(config, build_all(config));
  r.timings["decay"] = seconds_since(t0);
  return r;
}

VerificationReport run_bs_cross_check(const SuiteConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r = bs_section(config, build_all(config));
  r.timings["bs"] = seconds_since(t0);
  return r;
}

VerificationReport run_full_suite(const SuiteConfig& config) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<BuiltModel> models = build_all(config);
  VerificationReport r = empty_report(config);
  r.timings["build"] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  r.merge(identity_section(config, models));
  r.timings["identity"] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  r.merge(decay_section(config, models));
  r.timings["decay"] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  r.merge(bs_section(config, models));
  r.timings["bs"] = seconds_since(t0);
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_json(const VerificationReport& r, bool include_timings) {
  Json j;
  j["schema"] = "krein.report";
  j["schema_version"] = r.schema_version;
  j["seed"] = r.seed;
  j["summary"] = {{"total", r.records.size()}, {"passed", r.passed()}, {"failed", r.failed()}};
  Json env = Json::object();
  for (const auto& [k, v] : r.environment) env[k] = v;
  j["environment"] = env;
  Json records = Json::array();
  for (const CheckRecord& c : r.records)
    records.push_back({{"check", c.check},
                       {"model", c.model},
                       {"parameters", c.parameters},
                       {"defect", detail::real_json(c.defect)},
                       {"tolerance", detail::real_json(c.tolerance)},
                       {"pass", c.pass},
                       {"note", c.note}});
  j["records"] = records;
  Json samples = Json::array();
  for (const DecaySample& s : r.decay_samples)
    samples.push_back({{"model", s.model}, {"lambda", detail::real_json(s.lambda)},
                       {"weyl_norm", detail::real_json(s.weyl_norm)}});
  Json fits = Json::array();
  for (const DecayFit& f : r.decay_fits)
    fits.push_back({{"model", f.model},
                    {"exponent", detail::real_json(f.exponent)},
                    {"exponent_stderr", detail::real_json(f.exponent_stderr)},
                    {"log_constant", detail::real_json(f.log_constant)},
                    {"residual", detail::real_json(f.residual)}});
  j["decay"] = {{"samples", samples}, {"fits", fits}};
  Json eigs = Json::array();
  for (const EigenvalueComparison& e : r.eigenvalues) {
    Json found = Json::array(), expected = Json::array();
    for (Complex z : e.found) found.push_back(detail::complex_json(z));
    for (Complex z : e.expected) expected.push_back(detail::complex_json(z));
    eigs.push_back({{"model", e.model}, {"label", e.label}, {"found", found}, {"expected", expected},
                    {"distance", detail::real_json(e.distance)}});
  }
  j["eigenvalues"] = eigs;
  if (include_timings) {
    Json t = Json::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = t;
  }
  return j.dump(2);
}

VerificationReport report_from_json(std::string_view json) {
  const Json j = detail::parse_json(json, "report");
  detail::check_keys(j, "report",
                     {"schema", "schema_version", "seed", "summary", "environment", "records", "decay", "eigenvalues",
                      "timings"});
  if (!j.contains("schema") || j["schema"] != "krein.report")
    fail(ErrorKind::InvalidArgument, "report: missing or wrong schema tag");
  VerificationReport r;
  r.schema_version = static_cast<int>(detail::get_int(j["schema_version"], "schema_version"));
  if (r.schema_version != 1) fail(ErrorKind::InvalidArgument, "report: unsupported schema_version");
  r.seed = detail::get_uint(j["seed"], "seed");
  for (const auto& item : j.at("environment").items()) r.environment[item.key()] = detail::get_string(item.value(), item.key());
  for (const Json& c : j.at("records")) {
    detail::check_keys(c, "record", {"check", "model", "parameters", "defect", "tolerance", "pass", "note"});
    CheckRecord rec{detail::get_string(c.at("check"), "check"),
                    detail::get_string(c.at("model"), "model"),
                    detail::get_string(c.at("parameters"), "parameters"),
                    detail::real_from_json(c.at("defect"), "defect"),
                    detail::real_from_json(c.at("tolerance"), "tolerance"),
                    c.at("pass").get<bool>(),
                    detail::get_string(c.at("note"), "note")};
    r.records.push_back(std::move(rec));
  }
  const Json& decay = j.at("decay");
  for (const Json& s : decay.at("samples"))
    r.decay_samples.push_back({detail::get_string(s.at("model"), "model"), detail::real_from_json(s.at("lambda"), "lambda"),
                               detail::real_from_json(s.at("weyl_norm"), "weyl_norm")});
  for (const Json& f : decay.at("fits"))
    r.decay_fits.push_back({detail::get_string(f.at("model"), "model"),
                            detail::real_from_json(f.at("exponent"), "exponent"),
                            detail::real_from_json(f.at("exponent_stderr"), "exponent_stderr"),
                            detail::real_from_json(f.at("log_constant"), "log_constant"),
                            detail::real_from_json(f.at("residual"), "residual")});
  for (const Json& e : j.at("eigenvalues")) {
    EigenvalueComparison cmp;
    cmp.model = detail::get_string(e.at("model"), "model");
    cmp.label = detail::get_string(e.at("label"), "label");
    for (const Json& z : e.at("found")) cmp.found.push_back(detail::get_complex(z, "found"));
    for (const Json& z : e.at("expected")) cmp.expected.push_back(detail::get_complex(z, "expected"));
    cmp.distance = detail::real_from_json(e.at("distance"), "distance");
    r.eigenvalues.push_back(std::move(cmp));
  }
  if (j.contains("timings"))
    for (const auto& item : j["timings"].items()) r.timings[item.key()] = detail::get_double(item.value(), item.key());
  return r;
}

std::string to_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << "# krein.report schema 1\n";
  os << "check,model,parameters,defect,tolerance,pass,note\n";
  for (const CheckRecord& c : r.records)
    os << csv_field(c.check) << ',' << csv_field(c.model) << ',' << csv_field(c.parameters) << ','
       << format_double(c.defect) << ',' << format_double(c.tolerance) << ',' << (c.pass ? "true" : "false") << ','
       << csv_field(c.note) << '\n';
  return os.str();
}

std::string decay_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << "# krein.decay schema 1\n";
  os << "model,lambda,weyl_norm\n";
  for (const DecaySample& s : r.decay_samples)
    os << csv_field(s.model) << ',' << format_double(s.lambda) << ',' << format_double(s.weyl_norm) << '\n';
  for (const DecayFit& f : r.decay_fits)
    os << "exponent=" << format_double(f.exponent) << "±" << format_double(f.exponent_stderr)
       << ";model=" << f.model << '\n';
  return os.str();
}

}  // namespace krein
