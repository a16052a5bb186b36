#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qdr/model.hpp"
#include "qdr/records.hpp"

namespace qdr {

using cplx = std::complex<double>;

enum class Stability { Stable, Unstable, Marginal };
std::string_view to_string(Stability s) noexcept;

/// One zeroth-order (pump-only) steady state.
struct SteadyBranch {
  double w0 = -1.0;   ///< population inversion
  cplx a0{};          ///< intracavity field
  cplx sigma0{};      ///< exciton coherence
  double q0 = 0.0;    ///< phonon displacement
  double residual = 0.0;  ///< |monic inversion cubic(w0)|
  Stability stability = Stability::Marginal;
  double growth_rate = 0.0;  ///< largest real part of the Jacobian spectrum
  bool physical = true;      ///< -1 <= w0 <= 0

  bool stable() const noexcept { return stability == Stability::Stable; }
};

/// Real cubic in the inversion, ascending coefficients.
struct InversionPolynomial {
  std::array<double, 4> coeffs{};

  double operator()(double w0) const noexcept;
  InversionPolynomial monic() const;
  int degree() const noexcept;
};

/// Steady exciton coherence for a given inversion (pump-driven, no signal).
cplx steady_coherence(const Params& p, double w0);
/// Steady cavity field for a given inversion.
cplx steady_cavity_field(const Params& p, double w0);
/// Steady phonon displacement q0 = -2 eta omega_k0 w0.
double steady_phonon_displacement(const Params& p, double w0) noexcept;

/// Population balance with the two inversion-linear denominators cleared,
/// evaluated pointwise. Its real part is the inversion cubic.
cplx cleared_population_balance(const Params& p, double w0);

/// Builds the inversion cubic by sampling the cleared balance at four nodes
/// and interpolating.
InversionPolynomial build_inversion_polynomial(const Params& p);

/// Real steady branches sorted by w0, each classified by linear stability.
std::vector<SteadyBranch> solve_steady_branches(const Params& p);

/// Jacobian of the 7-dimensional real mean-field flow
/// (w, Re sigma, Im sigma, Re a, Im a, q, dq/dt) at the branch.
Eigen::Matrix<double, 7, 7> mean_field_jacobian(const Params& p, const SteadyBranch& b);

/// Labels the branch from the Jacobian spectrum (thresholds +-1e-9).
SteadyBranch classify_stability(const Params& p, SteadyBranch b);

enum class ContinuationAxis { Ep0, DeltaP0 };

Params with_axis_value(Params p, ContinuationAxis axis, double x) noexcept;

struct TurningPoint {
  double x_from = 0.0;   ///< last grid value on the abandoned branch
  double x_to = 0.0;     ///< first grid value on the new branch
  double w0_from = 0.0;
  double w0_to = 0.0;
};

struct HysteresisResult {
  std::vector<SpectrumRecord> up;    ///< in ascending grid order
  std::vector<SpectrumRecord> down;  ///< in descending grid order
  std::vector<TurningPoint> up_turns;
  std::vector<TurningPoint> down_turns;
};

/// Follows the stable branch up and then down the grid, jumping to the
/// nearest remaining stable branch when the followed one disappears.
HysteresisResult hysteresis_sweep(const Params& p, ContinuationAxis axis, std::span<const double> grid);

struct BistableWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// First contiguous run of grid values with three real roots.
std::optional<BistableWindow> find_bistable_window(const Params& p, ContinuationAxis axis,
                                                   std::span<const double> grid);

}  // namespace qdr
