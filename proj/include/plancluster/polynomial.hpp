#pragma once

// Small helpers for real polynomials of degree <= 3 given as ascending
// coefficient lists (value = sum c_k x^k).

#include <span>
#include <vector>

namespace plancluster::poly {

double evaluate(std::span<const double> coeffs, double x);

/// Coefficients of the first derivative.
std::vector<double> derivative(std::span<const double> coeffs);

/// Sign-changing real roots of the polynomial strictly inside (lo, hi),
/// sorted ascending. Roots of even multiplicity (tangential touches) are not
/// reported. An identically zero polynomial has no roots.
std::vector<double> sign_change_roots(std::span<const double> coeffs, double lo,
                                      double hi);

/// Critical points (roots of the derivative, any multiplicity) strictly
/// inside (lo, hi), sorted ascending.
std::vector<double> critical_points(std::span<const double> coeffs, double lo,
                                    double hi);

int sign(double v);

}  // namespace plancluster::poly
