#include "qdr/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qdr/error.hpp"
#include "qdr/polynomial.hpp"

namespace qdr {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPhysicalSlack = 1e-9;
constexpr double kStabilityThreshold = 1e-9;
constexpr double kResidualTolerance = 1e-10;
constexpr double kImaginaryTolerance = 1e-12;
constexpr double kPoleRootTolerance = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Denominator shared by the steady coherence and (conjugated) its partner.
cplx pump_denominator(const Params& p, double w0) {
  return (kI * p.delta_c0 + p.kappa_c0) * (p.delta_p0 - kI - 2.0 * p.omega_k0 * p.eta * w0) +
         2.0 * kI * p.g0 * p.g0 * w0;
}

double denominator_scale(const Params& p) {
  return std::abs(kI * p.delta_c0 + p.kappa_c0) * (std::abs(p.delta_p0) + 1.0) + p.g0 * p.g0 +
         p.omega_k0 * p.eta;
}

void require_ascending(std::span<const double> grid) {
  if (grid.size() < 2) throw Error(ErrorCode::InvalidGrid, "continuation needs at least two grid points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidGrid, "grid must be strictly ascending");
  }
}

}  // namespace

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
  }
  return "Marginal";
}

double InversionPolynomial::operator()(double w0) const noexcept { return evaluate_polynomial(coeffs, w0); }

int InversionPolynomial::degree() const noexcept { return effective_degree(coeffs); }

InversionPolynomial InversionPolynomial::monic() const {
  const int d = degree();
  InversionPolynomial m;
  for (int k = 0; k <= d; ++k) m.coeffs[k] = coeffs[k] / coeffs[d];
  return m;
}

cplx steady_coherence(const Params& p, double w0) {
  const cplx den = pump_denominator(p, w0);
  if (std::abs(den) <= 1e-13 * denominator_scale(p))
    throw Error(ErrorCode::DegenerateDenominator, fmt::format("coherence pole at w0 = {}", w0));
  return 2.0 * p.g0 * w0 * p.ep0 / den;
}

cplx steady_cavity_field(const Params& p, double w0) {
  return (p.ep0 - kI * p.g0 * steady_coherence(p, w0)) / (kI * p.delta_c0 + p.kappa_c0);
}

double steady_phonon_displacement(const Params& p, double w0) noexcept {
  return -2.0 * p.eta * p.omega_k0 * w0;
}

cplx cleared_population_balance(const Params& p, double w0) {
  const cplx den = pump_denominator(p, w0);
  if (std::abs(den) <= 1e-13 * denominator_scale(p))
    throw Error(ErrorCode::DegenerateDenominator, fmt::format("sample w0 = {} sits on a pole", w0));
  const double g = p.g0;
  const cplx c1 = 2.0 * g * w0 * p.ep0 / den;
  const cplx c2 = 2.0 * g * w0 * p.ep0 / std::conj(den);
  const cplx d1 = (p.ep0 - kI * g * c1) / (kI * p.delta_c0 + p.kappa_c0);
  const cplx d2 = (p.ep0 + kI * g * c2) / (-kI * p.delta_c0 + p.kappa_c0);
  const cplx balance = -p.gamma1_ratio * (w0 + 1.0) - kI * g * (d1 * c2 - d2 * c1);
  return balance * den * std::conj(den);
}

InversionPolynomial build_inversion_polynomial(const Params& p) {
  // Chebyshev nodes on [-1.5, 0.5]; shifted when a node lands on a pole.
  constexpr std::array<double, 4> kNodes = {0.42387953251128674, -0.11731656763491027,
                                            -0.88268343236508984, -1.4238795325112867};
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::Matrix4cd vandermonde;
    Eigen::Vector4cd values;
    try {
      for (int r = 0; r < 4; ++r) {
        const double x = kNodes[r] + 0.0371 * attempt;
        for (int c = 0; c < 4; ++c) vandermonde(r, c) = std::pow(x, c);
        values[r] = cleared_population_balance(p, x);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateDenominator) continue;
      throw;
    }
    const Eigen::Vector4cd c = vandermonde.partialPivLu().solve(values);
    double scale = 0.0;
    double imag = 0.0;
    for (int k = 0; k < 4; ++k) {
      scale = std::max(scale, std::abs(c[k].real()));
      imag = std::max(imag, std::abs(c[k].imag()));
    }
    if (imag > kImaginaryTolerance * scale)
      throw Error(ErrorCode::NonRealCoefficients,
                  fmt::format("imaginary residue {:.3e} relative to {:.3e}", imag, scale));
    InversionPolynomial poly;
    for (int k = 0; k < 4; ++k) poly.coeffs[k] = c[k].real();
    return poly;
  }
  throw Error(ErrorCode::DegenerateDenominator, "no pole-free sample set found");
}

std::vector<SteadyBranch> solve_steady_branches(const Params& p) {
  const InversionPolynomial poly = build_inversion_polynomial(p);
  std::vector<double> roots = real_roots(poly.coeffs);
  // Clearing the denominators adds roots on real coherence poles (possible
  // only without pump); they are not states of the flow.
  std::erase_if(roots, [&](double w0) {
    return std::abs(pump_denominator(p, w0)) <= kPoleRootTolerance * denominator_scale(p);
  });
  if (roots.empty())
    throw Error(ErrorCode::NoRealRoot, "inversion polynomial has no real root; coefficients are corrupted");

  const InversionPolynomial monic = poly.monic();
  std::vector<SteadyBranch> branches;
  branches.reserve(roots.size());
  for (double w0 : roots) {
    SteadyBranch b;
    b.w0 = w0;
    b.sigma0 = steady_coherence(p, w0);
    b.a0 = steady_cavity_field(p, w0);
    b.q0 = steady_phonon_displacement(p, w0);
    b.residual = std::abs(monic(w0));
    b.physical = w0 >= -1.0 - kPhysicalSlack && w0 <= kPhysicalSlack;
    if (!(b.residual < kResidualTolerance))
      throw Error(ErrorCode::NoRealRoot, fmt::format("root {} has residual {:.3e}", w0, b.residual));
    branches.push_back(classify_stability(p, b));
  }
  return branches;
}

Eigen::Matrix<double, 7, 7> mean_field_jacobian(const Params& p, const SteadyBranch& b) {
  const double g = p.g0;
  const double w = b.w0;
  const double sr = b.sigma0.real();
  const double si = b.sigma0.imag();
  const double ar = b.a0.real();
  const double ai = b.a0.imag();
  const double theta = p.delta_p0 + b.q0;
  const double omega2 = p.omega_k0 * p.omega_k0;

  Eigen::Matrix<double, 7, 7> j = Eigen::Matrix<double, 7, 7>::Zero();
  // w
  j(0, 0) = -p.gamma1_ratio;
  j(0, 1) = 2.0 * g * ai;
  j(0, 2) = -2.0 * g * ar;
  j(0, 3) = -2.0 * g * si;
  j(0, 4) = 2.0 * g * sr;
  // Re sigma
  j(1, 0) = -2.0 * g * ai;
  j(1, 1) = -1.0;
  j(1, 2) = theta;
  j(1, 4) = -2.0 * g * w;
  j(1, 5) = si;
  // Im sigma
  j(2, 0) = 2.0 * g * ar;
  j(2, 1) = -theta;
  j(2, 2) = -1.0;
  j(2, 3) = 2.0 * g * w;
  j(2, 5) = -sr;
  // Re a
  j(3, 2) = g;
  j(3, 3) = -p.kappa_c0;
  j(3, 4) = p.delta_c0;
  // Im a
  j(4, 1) = -g;
  j(4, 3) = -p.delta_c0;
  j(4, 4) = -p.kappa_c0;
  // q, dq/dt
  j(5, 6) = 1.0;
  j(6, 0) = -2.0 * p.eta * p.omega_k0 * omega2;
  j(6, 5) = -omega2;
  j(6, 6) = -p.gamma_q0;
  return j;
}

SteadyBranch classify_stability(const Params& p, SteadyBranch b) {
  const Eigen::Matrix<double, 7, 7> j = mean_field_jacobian(p, b);
  const auto eig = Eigen::EigenSolver<Eigen::Matrix<double, 7, 7>>(j, false).eigenvalues();
  b.growth_rate = eig.real().maxCoeff();
  if (b.growth_rate < -kStabilityThreshold) b.stability = Stability::Stable;
  else if (b.growth_rate > kStabilityThreshold) b.stability = Stability::Unstable;
  else b.stability = Stability::Marginal;
  return b;
}

Params with_axis_value(Params p, ContinuationAxis axis, double x) noexcept {
  switch (axis) {
    case ContinuationAxis::Ep0: p.ep0 = x; break;
    case ContinuationAxis::DeltaP0: p.delta_p0 = x; break;
  }
  return p;
}

namespace {

struct TraceResult {
  std::vector<SpectrumRecord> records;
  std::vector<TurningPoint> turns;
};

// Index of the root in `now` that continues root `followed` of `before`.
std::optional<std::size_t> continuation_index(const std::vector<double>& before, std::size_t followed,
                                              const std::vector<double>& now) {
  if (now.size() < before.size()) {
    // A pair annihilated: a surviving root continues whichever old root it is closest to.
    for (std::size_t j = 0; j < now.size(); ++j) {
      std::size_t nearest = 0;
      for (std::size_t k = 1; k < before.size(); ++k) {
        if (std::abs(before[k] - now[j]) < std::abs(before[nearest] - now[j])) nearest = k;
      }
      if (nearest == followed) return j;
    }
    return std::nullopt;
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < now.size(); ++j) {
    if (std::abs(now[j] - before[followed]) < std::abs(now[best] - before[followed])) best = j;
  }
  return best;
}

TraceResult trace(const Params& p, ContinuationAxis axis, const std::vector<double>& xs, bool start_low) {
  TraceResult out;
  out.records.reserve(xs.size());

  std::vector<double> prev_roots;
  std::size_t prev_index = 0;
  double prev_x = 0.0;
  bool have_prev = false;

  for (double x : xs) {
    SpectrumRecord rec{x, -1, kNaN, kNaN, 0.0, 0};
    std::vector<SteadyBranch> branches;
    try {
      branches = solve_steady_branches(with_axis_value(p, axis, x));
    } catch (const Error&) {
      rec.set(RecordFlag::PoleSkipped);
      out.records.push_back(rec);
      continue;
    }

    std::vector<double> roots;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      roots.push_back(branches[i].w0);
      if (branches[i].stable() && branches[i].physical) candidates.push_back(i);
    }
    if (candidates.empty()) {
      rec.set(RecordFlag::Unstable);
      out.records.push_back(rec);
      continue;
    }

    std::size_t chosen = start_low ? candidates.front() : candidates.back();
    if (have_prev) {
      const double prev_w = prev_roots[prev_index];
      chosen = candidates.front();
      for (std::size_t i : candidates) {
        // strict comparison keeps the lower w0 on exact ties
        if (std::abs(roots[i] - prev_w) < std::abs(roots[chosen] - prev_w)) chosen = i;
      }
      const auto cont = continuation_index(prev_roots, prev_index, roots);
      if (!cont || *cont != chosen) out.turns.push_back({prev_x, x, prev_w, roots[chosen]});
    }

    rec.branch_id = static_cast<int>(chosen);
    rec.w0 = roots[chosen];
    rec.value_re = roots[chosen];
    out.records.push_back(rec);

    prev_roots = std::move(roots);
    prev_index = chosen;
    prev_x = x;
    have_prev = true;
  }
  return out;
}

}  // namespace

HysteresisResult hysteresis_sweep(const Params& p, ContinuationAxis axis, std::span<const double> grid) {
  require_ascending(grid);
  std::vector<double> up(grid.begin(), grid.end());
  std::vector<double> down(grid.rbegin(), grid.rend());
  auto up_trace = trace(p, axis, up, true);
  auto down_trace = trace(p, axis, down, false);
  return {std::move(up_trace.records), std::move(down_trace.records), std::move(up_trace.turns),
          std::move(down_trace.turns)};
}

std::optional<BistableWindow> find_bistable_window(const Params& p, ContinuationAxis axis,
                                                   std::span<const double> grid) {
  require_ascending(grid);
  std::optional<BistableWindow> window;
  for (double x : grid) {
    std::size_t count = 0;
    try {
      count = solve_steady_branches(with_axis_value(p, axis, x)).size();
    } catch (const Error&) {
      count = 0;
    }
    if (count == 3) {
      if (!window) window = BistableWindow{x, x};
      else window->hi = x;
    } else if (window) {
      break;
    }
  }
  return window;
}

}  // namespace qdr
