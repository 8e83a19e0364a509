#include "qmem/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qmem {

namespace {

struct Simplex {
  std::vector<RealVector> x;
  std::vector<double> f;
  std::vector<std::size_t> order;  // indices sorted by f ascending

  void sort() {
    order.resize(f.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [this](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  }
  std::size_t best() const { return order.front(); }
  std::size_t worst() const { return order.back(); }
  std::size_t second_worst() const { return order[order.size() - 2]; }
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const RealVector& x0,
                             const NelderMeadOptions& opts, std::mt19937_64& rng) {
  const Index n = x0.size();
  const double dn = static_cast<double>(std::max<Index>(n, 2));
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double beta = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  NelderMeadResult result;
  auto eval = [&](const RealVector& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  result.x = x0;
  result.f = eval(x0);
  if (n == 0) return result;

  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  std::bernoulli_distribution coin(0.5);

  Simplex s;
  double step = opts.initial_step;
  for (int cycle = 0;; ++cycle) {
    // Build a simplex around the current best point.
    s.x.assign(1, result.x);
    s.f.assign(1, result.f);
    for (Index i = 0; i < n; ++i) {
      RealVector v = result.x;
      double h = step;
      if (cycle > 0) h *= jitter(rng) * (coin(rng) ? 1.0 : -1.0);
      v(i) += h;
      s.x.push_back(v);
      s.f.push_back(eval(v));
    }
    s.sort();
    const double f_start = result.f;

    RealVector sum = RealVector::Zero(n);
    for (const auto& v : s.x) sum += v;
    RealVector centroid(n);
    auto replace = [&](std::size_t k, const RealVector& v, double fv) {
      sum += v - s.x[k];
      s.x[k] = v;
      s.f[k] = fv;
    };
    while (result.iterations < opts.max_iterations) {
      const std::size_t b = s.best();
      const std::size_t w = s.worst();
      if (s.f[b] <= opts.target) break;
      if (s.f[w] - s.f[b] <= opts.f_tol) break;
      // The size test is O(n^2); run it once per n iterations.
      if (result.iterations % n == 0) {
        double size = 0.0;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
          size = std::max(size, (s.x[k] - s.x[b]).cwiseAbs().maxCoeff());
        }
        if (size <= opts.x_tol) break;
      }
      ++result.iterations;

      centroid = (sum - s.x[w]) / static_cast<double>(n);
      const RealVector xr = centroid + alpha * (centroid - s.x[w]);
      const double fr = eval(xr);
      const std::size_t sw = s.second_worst();
      if (fr < s.f[b]) {
        const RealVector xe = centroid + gamma * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          replace(w, xe, fe);
        } else {
          replace(w, xr, fr);
        }
      } else if (fr < s.f[sw]) {
        replace(w, xr, fr);
      } else {
        const bool outside = fr < s.f[w];
        const RealVector xc = outside ? RealVector(centroid + beta * (xr - centroid))
                                      : RealVector(centroid + beta * (s.x[w] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : s.f[w])) {
          replace(w, xc, fc);
        } else {
          for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (k == b) continue;
            s.x[k] = s.x[b] + delta * (s.x[k] - s.x[b]);
            s.f[k] = eval(s.x[k]);
          }
          sum.setZero();
          for (const auto& v : s.x) sum += v;
        }
      }
      s.sort();
    }

    if (s.f[s.best()] < result.f) {
      result.f = s.f[s.best()];
      result.x = s.x[s.best()];
    }
    if (result.f <= opts.target || result.iterations >= opts.max_iterations) break;
    if (cycle >= opts.max_restarts) break;
    const double gain = f_start - result.f;
    if (cycle > 0 && gain <= opts.restart_improvement * std::max(1.0, std::abs(result.f))) break;
    ++result.restarts;
    // Restart scale follows the distance travelled, bounded by the first step.
    step = std::clamp(std::sqrt(std::max(gain, 0.0)), 1e-6, opts.initial_step);
  }
  return result;
}

}  // namespace qmem
