#pragma once

#include <span>
#include <vector>

namespace qdr {

/// Horner evaluation; coefficients in ascending order of power.
double evaluate_polynomial(std::span<const double> ascending, double x) noexcept;

/// Real roots of a real polynomial of degree <= 3, sorted ascending.
///
/// Leading coefficients that are negligible relative to the largest one are
/// dropped before solving. Roots come from the eigenvalues of the companion
/// matrix of the monic polynomial and are polished by Newton's method.
/// An eigenvalue counts as real when its imaginary part is below
/// `imag_tolerance * (1 + |re|)`.
std::vector<double> real_roots(std::span<const double> ascending, double imag_tolerance = 1e-7);

/// Effective degree after trimming negligible leading coefficients.
int effective_degree(std::span<const double> ascending) noexcept;

}  // namespace qdr
