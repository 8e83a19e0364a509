#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "qmem/numerics.hpp"

namespace qmem {

struct NelderMeadOptions {
  /// Total iteration budget, shared by all restarts.
  std::int64_t max_iterations = 5000;
  double initial_step = 0.5;
  /// A simplex has converged once its value spread drops below this.
  double f_tol = 1e-10;
  /// ... or once every vertex is this close to the best one.
  double x_tol = 1e-12;
  /// Stop as soon as a value at or below this is found.
  double target = -std::numeric_limits<double>::infinity();
  /// Restarts stop after one that improves the best value by less than this
  /// (relative to max(1, |f|)).
  double restart_improvement = 1e-12;
  int max_restarts = 1000;
};

struct NelderMeadResult {
  RealVector x;
  double f = std::numeric_limits<double>::infinity();
  std::int64_t iterations = 0;
  std::int64_t evaluations = 0;
  int restarts = 0;
};

using Objective = std::function<double(const RealVector&)>;

/// Nelder-Mead simplex descent with dimension-adaptive coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n).
/// After each convergence the simplex is rebuilt around the best vertex with
/// randomly perturbed edge lengths drawn from `rng`.
NelderMeadResult nelder_mead(const Objective& f, const RealVector& x0,
                             const NelderMeadOptions& opts, std::mt19937_64& rng);

}  // namespace qmem
