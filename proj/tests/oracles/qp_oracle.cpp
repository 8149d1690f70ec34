#include "qp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wisig::oracle {

namespace {

// Euclidean projection onto the box intersected with the hyperplane y'a = 0.
// The projection is clip(v - mu*y) for the mu that zeroes y'a; y'a is
// non-increasing in mu, so bisection finds it.
std::vector<double> project(const std::vector<double>& v, const std::vector<int>& y, double c) {
  const std::size_t n = v.size();
  auto clipped = [&](double mu, std::vector<double>& out) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = std::clamp(v[i] - mu * y[i], 0.0, c);
      s += y[i] * out[i];
    }
    return s;
  };
  std::vector<double> out(n);
  double lo = -1.0, hi = 1.0;
  while (clipped(lo, out) < 0.0) lo *= 2.0;
  while (clipped(hi, out) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (clipped(mid, out) > 0.0) lo = mid;
    else hi = mid;
  }
  clipped(0.5 * (lo + hi), out);
  return out;
}

}  // namespace

QpSolution solve_dual(const std::vector<std::vector<double>>& kernel, const std::vector<int>& y,
                      double c, double eps, std::size_t max_iterations) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      q[i][j] = y[i] * y[j] * kernel[i][j];
      row += std::abs(q[i][j]);
    }
    lipschitz = std::max(lipschitz, row);
  }
  const double step = 1.0 / lipschitz;

  auto gradient = [&](const std::vector<double>& a) {
    std::vector<double> g(n, -1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] += q[i][j] * a[j];
    return g;
  };
  auto objective = [&](const std::vector<double>& a) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f -= a[i];
      for (std::size_t j = 0; j < n; ++j) f += 0.5 * a[i] * q[i][j] * a[j];
    }
    return f;
  };

  QpSolution s;
  std::vector<double> a(n, 0.0), z = a;
  double t = 1.0;
  double f_prev = objective(a);
  for (s.iterations = 1; s.iterations <= max_iterations; ++s.iterations) {
    const auto g = gradient(z);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - step * g[i];
    auto next = project(v, y, c);

    // FISTA with function-value restart.
    const double f = objective(next);
    // A plain step (t == 1, z == a) is accepted even if rounding makes f tick up.
    if (f > f_prev && t > 1.0) {
      z = a;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      moved = std::max(moved, std::abs(next[i] - a[i]));
      z[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - a[i]);
    }
    a = std::move(next);
    t = t_next;
    f_prev = f;
    if (moved < eps) {
      // Confirm with the plain projected-gradient residual at the iterate.
      const auto ga = gradient(a);
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = a[i] - step * ga[i];
      const auto pa = project(w, y, c);
      double residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(pa[i] - a[i]));
      if (residual < eps) {
        s.converged = true;
        break;
      }
    }
  }
  s.alpha = a;

  // Bias from the free multipliers, or the middle of the feasible interval.
  const auto g = gradient(a);
  double sum = 0.0;
  std::size_t free = 0;
  double ub = std::numeric_limits<double>::infinity(), lb = -ub;
  const double margin = 1e-9 * c;
  for (std::size_t i = 0; i < n; ++i) {
    const double yg = y[i] * g[i];
    if (a[i] > margin && a[i] < c - margin) {
      sum -= yg;
      ++free;
    } else {
      const bool at_upper = a[i] >= c - margin;
      // -y_i g_i bounds b from above or below depending on the side.
      if ((y[i] > 0) != at_upper) lb = std::max(lb, -yg);
      else ub = std::min(ub, -yg);
    }
  }
  s.bias = free > 0 ? sum / static_cast<double>(free) : 0.5 * (lb + ub);
  return s;
}

double decision(const QpSolution& s, const std::vector<int>& y, const std::vector<double>& kx) {
  double f = s.bias;
  for (std::size_t j = 0; j < y.size(); ++j) f += s.alpha[j] * y[j] * kx[j];
  return f;
}

}  // namespace wisig::oracle
