#include "krein/config.hpp"

#include <cmath>
#include <sstream>

#include "config_json.hpp"
#include "json_util.hpp"
#include "krein/disk.hpp"
#include "krein/errors.hpp"
#include "krein/fd1d.hpp"
#include "krein/shoot1d.hpp"

namespace krein {

using detail::Json;

namespace {

bool is_real(Complex z) { return z.imag() == 0.0; }

}  // namespace

namespace detail {

PotentialSpec potential_from(const Json& j) {
  detail::check_keys(j, "potential",
                     {"kind", "value", "polynomial", "cosine", "strength", "x0", "alpha", "p", "values", "a", "b"});
  PotentialSpec s;
  if (j.contains("kind")) s.kind = detail::get_string(j["kind"], "kind");
  if (j.contains("value")) s.value = detail::get_complex(j["value"], "value");
  if (j.contains("polynomial")) {
    if (!j["polynomial"].is_array()) fail(ErrorKind::InvalidArgument, "'polynomial' must be an array");
    for (const Json& c : j["polynomial"]) s.polynomial.push_back(detail::get_complex(c, "polynomial"));
  }
  if (j.contains("cosine")) {
    if (!j["cosine"].is_array()) fail(ErrorKind::InvalidArgument, "'cosine' must be an array");
    for (const Json& t : j["cosine"]) {
      detail::check_keys(t, "cosine term", {"amplitude", "frequency", "phase"});
      CosineTerm term;
      if (t.contains("amplitude")) term.amplitude = detail::get_complex(t["amplitude"], "amplitude");
      if (t.contains("frequency")) term.frequency = detail::get_double(t["frequency"], "frequency");
      if (t.contains("phase")) term.phase = detail::get_double(t["phase"], "phase");
      s.cosine.push_back(term);
    }
  }
  if (j.contains("strength")) s.strength = detail::get_complex(j["strength"], "strength");
  if (j.contains("x0")) s.x0 = detail::get_double(j["x0"], "x0");
  if (j.contains("alpha")) s.alpha = detail::get_double(j["alpha"], "alpha");
  if (j.contains("p")) s.p = detail::get_double(j["p"], "p");
  if (j.contains("values")) {
    if (!j["values"].is_array()) fail(ErrorKind::InvalidArgument, "'values' must be an array");
    for (const Json& c : j["values"]) s.values.push_back(detail::get_complex(c, "values"));
  }
  if (j.contains("a")) s.a = detail::get_double(j["a"], "a");
  if (j.contains("b")) s.b = detail::get_double(j["b"], "b");
  make_potential(s);  // validate now rather than at first use
  return s;
}

Json potential_json(const PotentialSpec& s) {
  Json j;
  j["kind"] = s.kind;
  if (s.kind == "constant") j["value"] = detail::complex_json(s.value);
  if (s.kind == "smooth") {
    Json poly = Json::array();
    for (Complex c : s.polynomial) poly.push_back(detail::complex_json(c));
    j["polynomial"] = poly;
    Json cos = Json::array();
    for (const CosineTerm& t : s.cosine)
      cos.push_back({{"amplitude", detail::complex_json(t.amplitude)}, {"frequency", t.frequency}, {"phase", t.phase}});
    j["cosine"] = cos;
  }
  if (s.kind == "power") {
    j["strength"] = detail::complex_json(s.strength);
    j["x0"] = s.x0;
    j["alpha"] = s.alpha;
    j["p"] = s.p;
  }
  if (s.kind == "table") {
    Json vals = Json::array();
    for (Complex c : s.values) vals.push_back(detail::complex_json(c));
    j["values"] = vals;
    j["a"] = s.a;
    j["b"] = s.b;
  }
  return j;
}

ModelSpec model_from(const Json& j) {
  detail::check_keys(j, "model", {"kind", "n", "length", "matrix_nodes", "k_max", "r_cut", "potential"});
  ModelSpec m;
  if (j.contains("kind")) m.kind = detail::get_string(j["kind"], "kind");
  if (j.contains("n")) m.n = detail::get_int(j["n"], "n");
  if (j.contains("length")) m.length = detail::get_double(j["length"], "length");
  if (j.contains("matrix_nodes")) m.matrix_nodes = detail::get_int(j["matrix_nodes"], "matrix_nodes");
  if (j.contains("k_max")) m.k_max = static_cast<int>(detail::get_int(j["k_max"], "k_max"));
  if (j.contains("r_cut")) m.r_cut = detail::get_double(j["r_cut"], "r_cut");
  if (j.contains("potential")) m.potential = potential_from(j["potential"]);
  if (m.kind != "fd1d" && m.kind != "shoot1d" && m.kind != "disk_interior" && m.kind != "disk_exterior")
    fail(ErrorKind::InvalidArgument, "unknown model kind '" + m.kind + "'");
  return m;
}

Json model_json(const ModelSpec& m) {
  Json j;
  j["kind"] = m.kind;
  j["n"] = m.n;
  j["length"] = m.length;
  j["matrix_nodes"] = m.matrix_nodes;
  j["k_max"] = m.k_max;
  j["r_cut"] = m.r_cut;
  j["potential"] = potential_json(m.potential);
  return j;
}

}  // namespace detail

Potential1D make_potential(const PotentialSpec& s) {
  if (s.kind == "zero") return Potential1D::zero();
  if (s.kind == "constant") return Potential1D::constant(s.value);
  if (s.kind == "power") return Potential1D::power_singularity(s.strength, s.x0, s.alpha, s.p);
  if (s.kind == "table") return Potential1D::table(s.values, s.a, s.b);
  if (s.kind == "smooth") {
    bool real = true;
    for (Complex c : s.polynomial) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        fail(ErrorKind::InvalidPotential, "polynomial coefficients must be finite");
      real = real && is_real(c);
    }
    for (const CosineTerm& t : s.cosine) {
      if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag()) || !std::isfinite(t.frequency) ||
          !std::isfinite(t.phase))
        fail(ErrorKind::InvalidPotential, "cosine terms must be finite");
      real = real && is_real(t.amplitude);
    }
    if (s.polynomial.empty() && s.cosine.empty()) return Potential1D::zero();
    if (s.cosine.empty()) return Potential1D::polynomial(s.polynomial);
    const std::vector<Complex> poly = s.polynomial;
    const std::vector<CosineTerm> cos = s.cosine;
    return Potential1D::smooth(
        [poly, cos](double x) {
          Complex acc{};
          for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
          for (const CosineTerm& t : cos) acc += t.amplitude * std::cos(t.frequency * x + t.phase);
          return acc;
        },
        "smooth", real);
  }
  fail(ErrorKind::InvalidPotential, "unknown potential kind '" + s.kind + "'");
}

std::string ModelSpec::label() const {
  std::ostringstream os;
  os << kind << "[n=" << n;
  if (kind == "disk_interior" || kind == "disk_exterior") os << ",K=" << k_max;
  os << ",V=" << potential.kind << "]";
  return os.str();
}

std::shared_ptr<const TripleModel> build_model(const ModelSpec& spec) {
  const Potential1D v = make_potential(spec.potential);
  if (spec.kind == "fd1d") return build_fd1d(spec.n, spec.length, v);
  if (spec.kind == "shoot1d") {
    ShootConfig c;
    c.length = spec.length;
    c.potential = v;
    c.carrier_nodes = spec.n;
    c.matrix_nodes = spec.matrix_nodes;
    return build_shoot1d(c);
  }
  if (spec.kind == "disk_interior" || spec.kind == "disk_exterior") {
    DiskModelConfig c;
    c.side = spec.kind == "disk_interior" ? DiskSide::Interior : DiskSide::Exterior;
    c.k_max = spec.k_max;
    c.radial_nodes = spec.n;
    c.r_cut = spec.r_cut;
    if (!v.is_zero()) c.radial_potential = v;
    return build_disk(c);
  }
  fail(ErrorKind::InvalidArgument, "unknown model kind '" + spec.kind + "'");
}

PotentialSpec parse_potential_spec(std::string_view json) {
  return detail::potential_from(detail::parse_json(json, "potential"));
}

ModelSpec parse_model_spec(std::string_view json) { return detail::model_from(detail::parse_json(json, "model")); }

std::string to_json(const PotentialSpec& spec) { return detail::potential_json(spec).dump(); }

std::string to_json(const ModelSpec& spec) { return detail::model_json(spec).dump(); }

}  // namespace krein
