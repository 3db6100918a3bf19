#pragma once

#include <utility>
#include <vector>

#include "krein/triple.hpp"

namespace krein {

struct SectorialFactorization {
  double lambda = 0.0;
  CMatrix c1;
  double c1_norm = 0.0;
  /// ||(HN + V - lambda)^{-1} - S (I + C1)^{-1} S|| with S = (HN - lambda)^{-1/2}.
  double defect = 0.0;
  /// ||(HN + V - lambda)^{-1}||, the natural scale for `defect`.
  double resolvent_norm = 0.0;
};

/// Dense factorization of the Neumann resolvent through the free one.
/// Requires hn_matrix() and v_matrix(); throws NotPositiveDefinite when
/// lambda is not below the spectrum of HN.
SectorialFactorization sectorial_factorization(const TripleModel& model, double lambda);

/// Largest point of the scan lambda_start * 2^k (k = 0..20) such that it and
/// every scanned point below it has ||C1|| <= 1/2. ThresholdNotFound when
/// even lambda_start * 2^20 fails.
double find_xi2(const TripleModel& model, double lambda_start);

/// min(find_xi2, -||V||_inf - margin): a concrete half line on which both
/// Neumann realizations are invertible and the factorization applies.
double empirical_threshold(const TripleModel& model, double lambda_start, double margin = 1.0);

struct DecayStudy {
  std::vector<WeylSample> samples;
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double log_constant = 0.0;
  double residual = 0.0;
};

/// ||M(lambda)|| along certified lambda -> -inf and its fitted log-log slope.
DecayStudy weyl_decay_study(const TripleModel& model, const std::vector<double>& lambdas);

/// (lambda, ||V (HN - lambda)^{-1}||) for each lambda.
std::vector<std::pair<double, double>> relative_bound_decay(const TripleModel& model,
                                                            const std::vector<double>& lambdas);

}  // namespace krein
