#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "krein/potential.hpp"
#include "krein/triple.hpp"

namespace krein {

/// One cosine term A cos(w x + phi) of a smooth potential.
struct CosineTerm {
  Complex amplitude;
  double frequency = 1.0;
  double phase = 0.0;

  bool operator==(const CosineTerm&) const = default;
};

/// Serializable description of a Potential1D.
///   zero
///   constant  value
///   smooth    sum_k polynomial[k] x^k + sum_j cosine_j(x)
///   power     strength |x - x0|^-alpha, declared in L^p (alpha p < 1)
///   table     piecewise constant values on equal cells of [a, b]
struct PotentialSpec {
  std::string kind = "zero";
  Complex value;
  std::vector<Complex> polynomial;
  std::vector<CosineTerm> cosine;
  Complex strength{1.0, 0.0};
  double x0 = 0.5;
  double alpha = 0.25;
  double p = 2.0;
  std::vector<Complex> values;
  double a = 0.0;
  double b = 1.0;

  bool operator==(const PotentialSpec&) const = default;
};

/// Throws InvalidPotential for an unknown kind or inconsistent fields.
Potential1D make_potential(const PotentialSpec& spec);

/// Serializable description of a model.
///   fd1d           n grid nodes on [0, length]
///   shoot1d        n collocation nodes, matrix_nodes for hn/v
///   disk_interior  n radial nodes per mode, modes |k| <= k_max
///   disk_exterior  as above, potential cut off at r_cut
struct ModelSpec {
  std::string kind = "fd1d";
  Index n = 256;
  double length = 1.0;
  Index matrix_nodes = 256;
  int k_max = 4;
  double r_cut = 4.0;
  PotentialSpec potential;

  /// Short stable identifier used in reports, e.g. "fd1d[n=256,V=smooth]".
  std::string label() const;

  bool operator==(const ModelSpec&) const = default;
};

std::shared_ptr<const TripleModel> build_model(const ModelSpec& spec);

/// JSON forms. Complex numbers are a number or [re, im]. Unknown keys and
/// wrong types throw InvalidArgument naming the offending key.
PotentialSpec parse_potential_spec(std::string_view json);
ModelSpec parse_model_spec(std::string_view json);
std::string to_json(const PotentialSpec& spec);
std::string to_json(const ModelSpec& spec);

}  // namespace krein
