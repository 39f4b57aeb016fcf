#include "plancluster/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace plancluster::poly {

namespace {

std::span<const double> trimmed(std::span<const double> c) {
  std::size_t n = c.size();
  while (n > 0 && c[n - 1] == 0.0) --n;
  return c.first(n);
}

// All real roots (with multiplicity collapsed) of a polynomial of degree <= 2.
std::vector<double> low_degree_roots(std::span<const double> c) {
  c = trimmed(c);
  std::vector<double> roots;
  if (c.size() <= 1) return roots;
  if (c.size() == 2) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  const double a = c[2], b = c[1], k = c[0];
  const double disc = b * b - 4.0 * a * k;
  if (disc < 0.0) return roots;
  if (disc == 0.0) {
    roots.push_back(-b / (2.0 * a));
    return roots;
  }
  // Numerically stable pair.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  roots.push_back(q / a);
  if (q != 0.0) roots.push_back(k / q);
  std::sort(roots.begin(), roots.end());
  return roots;
}

double bisect(std::span<const double> c, double lo, double hi, int sign_lo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = sign(evaluate(c, mid));
    if (s == 0) return mid;
    if (s == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double evaluate(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

std::vector<double> derivative(std::span<const double> coeffs) {
  std::vector<double> d;
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d.push_back(static_cast<double>(k) * coeffs[k]);
  return d;
}

std::vector<double> critical_points(std::span<const double> coeffs, double lo,
                                    double hi) {
  const auto d = derivative(trimmed(coeffs));
  std::vector<double> out;
  for (double r : low_degree_roots(d))
    if (r > lo && r < hi) out.push_back(r);
  return out;
}

std::vector<double> sign_change_roots(std::span<const double> coeffs, double lo,
                                      double hi) {
  const auto c = trimmed(coeffs);
  std::vector<double> roots;
  if (c.size() <= 1 || !(lo < hi)) return roots;

  // Split into monotone pieces at the critical points.
  std::vector<double> pts{lo};
  for (double x : critical_points(c, lo, hi)) pts.push_back(x);
  pts.push_back(hi);
  std::vector<double> val(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) val[k] = evaluate(c, pts[k]);

  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const int s0 = sign(val[k]);
    const int s1 = sign(val[k + 1]);
    if (s0 * s1 < 0) roots.push_back(bisect(c, pts[k], pts[k + 1], s0));
    // Exact zero at an interior critical point with a sign change across it
    // (odd multiplicity, e.g. a triple root).
    if (k + 2 < pts.size() && s1 == 0 &&
        s0 * sign(val[k + 2]) < 0)
      roots.push_back(pts[k + 1]);
  }
  return roots;
}

}  // namespace plancluster::poly
