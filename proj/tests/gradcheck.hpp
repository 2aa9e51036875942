// Test-only finite-difference gradient oracle. Central differences with
// h = 1e-4 * max(1, |theta|), compared in relative error; independent of
// the reverse-mode path it checks.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc::testing {

struct GradcheckResult {
  double max_rel_err = 0.0;
  std::size_t probes = 0;
};

// f: evaluates the scalar loss from scratch (no tape reuse).
// analytic: the gradient buffer to check, matching `theta`.
template <typename T>
GradcheckResult finite_diff_probe(std::vector<T>& theta,
                                  const std::vector<T>& analytic,
                                  const std::function<double()>& f,
                                  std::mt19937_64& rng, int probes) {
  GradcheckResult res;
  std::uniform_int_distribution<std::size_t> pick(0, theta.size() - 1);
  for (int p = 0; p < probes; ++p) {
    const std::size_t i = pick(rng);
    const double t0 = double(theta[i]);
    const double an = double(analytic[i]);
    const auto rel_at = [&](double h) {
      theta[i] = T(t0 + h);
      const double fp = f();
      theta[i] = T(t0 - h);
      const double fm = f();
      theta[i] = T(t0);
      const double fd = (fp - fm) / (2.0 * h);
      const double denom = std::max({1e-8, std::abs(fd), std::abs(an)});
      return std::abs(fd - an) / denom;
    };
    // A large step can be dominated by curvature (e.g. near sigmoid
    // saturation) and a small one by roundoff; walk down a short step
    // ladder and keep the best-conditioned estimate.
    double rel = rel_at(1e-4 * std::max(1.0, std::abs(t0)));
    for (double h0 : {1e-5, 1e-6, 1e-7}) {
      if (rel <= 1e-6) break;
      rel = std::min(rel, rel_at(h0 * std::max(1.0, std::abs(t0))));
    }
    res.max_rel_err = std::max(res.max_rel_err, rel);
    ++res.probes;
  }
  return res;
}

}  // namespace dbcc::testing
