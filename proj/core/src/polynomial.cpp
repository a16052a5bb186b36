#include "qdr/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qdr {
namespace {

constexpr double kLeadingTolerance = 1e-14;

double newton_polish(std::span<const double> c, double x) {
  // Accept a step only while it lowers the residual.
  double best = std::abs(evaluate_polynomial(c, x));
  for (int i = 0; i < 4 && best > 0.0; ++i) {
    double d = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) d = d * x + static_cast<double>(k) * c[k];
    if (d == 0.0) break;
    const double next = x - evaluate_polynomial(c, x) / d;
    const double r = std::abs(evaluate_polynomial(c, next));
    if (!(r < best)) break;
    x = next;
    best = r;
  }
  return x;
}

}  // namespace

double evaluate_polynomial(std::span<const double> ascending, double x) noexcept {
  double acc = 0.0;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int effective_degree(std::span<const double> ascending) noexcept {
  double scale = 0.0;
  for (double c : ascending) scale = std::max(scale, std::abs(c));
  int degree = static_cast<int>(ascending.size()) - 1;
  while (degree > 0 && std::abs(ascending[degree]) <= kLeadingTolerance * scale) --degree;
  return degree;
}

std::vector<double> real_roots(std::span<const double> ascending, double imag_tolerance) {
  const int degree = effective_degree(ascending);
  if (degree <= 0) return {};

  std::vector<double> monic(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) monic[k] = ascending[k] / ascending[degree];

  std::vector<double> roots;
  if (degree == 1) {
    roots.push_back(-monic[0]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -monic[i];
    const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    for (int i = 0; i < degree; ++i) {
      const auto z = eig[i];
      if (std::abs(z.imag()) <= imag_tolerance * (1.0 + std::abs(z.real()))) roots.push_back(z.real());
    }
  }
  for (double& r : roots) r = newton_polish(monic, r);
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace qdr
