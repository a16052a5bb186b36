#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>

#include "qdr/model.hpp"
#include "qdr/steady.hpp"

namespace qdr {

enum class Backend { LinearSolve, ClosedForm };
std::string_view to_string(Backend b) noexcept;

/// First-order (in the signal) sideband amplitudes about a steady branch.
///
/// The e^{+i delta t} amplitudes of the inversion and the phonon coordinate are
/// the conjugates of the e^{-i delta t} ones and are not stored.
struct SidebandAmplitudes {
  cplx a_plus{};
  cplx a_minus{};
  cplx sigma_plus{};
  cplx sigma_minus{};
  cplx sigmaz_plus{};
  cplx q_plus{};
  double branch_w0 = 0.0;
  Backend backend = Backend::LinearSolve;
  double signal = 1.0;       ///< signal amplitude the amplitudes are computed for
  bool non_physical = false; ///< computed about an unstable branch

  cplx sigmaz_minus() const noexcept { return std::conj(sigmaz_plus); }
  cplx q_minus() const noexcept { return std::conj(q_plus); }
};

struct ResponseOptions {
  /// Permit evaluation about a branch that is not Stable; results are then
  /// marked non-physical.
  bool allow_unstable = false;
};

/// Signal amplitude used by the linear solve: es0 when positive, otherwise
/// unit amplitude (the response is exactly linear in it).
double response_signal(const Params& p) noexcept;

/// Solves the 6x6 system for (a+, conj a-, sigma+, conj sigma-, sigma_z+, q+).
SidebandAmplitudes solve_sidebands(const Params& p, const SteadyBranch& b, ResponseOptions opts = {});

/// Linear susceptibility sigma+ / Es from solved amplitudes.
cplx chi1_from_sidebands(const SidebandAmplitudes& s) noexcept;
/// Nonlinear susceptibility sigma- / (3 Es* Ep^2) from solved amplitudes.
cplx chi3_from_sidebands(const Params& p, const SidebandAmplitudes& s);

/// Switchable corrections applied to the published closed-form expressions.
/// Each one is listed, with its rationale, in data/closed_form_corrections.json.
/// All enabled reproduces the linear solve; all disabled is the literal form.
struct ClosedFormCorrections {
  bool cavity_field_uses_pump = true;   ///< steady field numerator carries Ep0, not w0
  bool chi1_numerator_signs = true;     ///< conjugate the i-terms of the chi1 numerator
  bool chi3_single_m_factor = true;     ///< chi3 denominator carries M2 once, not squared
  bool chi3_pump_normalization = true;  ///< divide the sigma- amplitude by 3 Ep0^2

  static constexpr ClosedFormCorrections all() noexcept { return {}; }
  static constexpr ClosedFormCorrections none() noexcept { return {false, false, false, false}; }

  /// Identifiers, in the order of the shipped correction table.
  static std::span<const std::string_view> ids() noexcept;
  /// Toggles one correction by identifier; throws UnknownKey.
  void set(std::string_view id, bool enabled);
};

/// Linear susceptibility from the closed-form sideband expressions.
cplx chi1_closed_form(const Params& p, const SteadyBranch& b,
                      ClosedFormCorrections corrections = ClosedFormCorrections::all(),
                      ResponseOptions opts = {});
/// Nonlinear susceptibility from the closed-form sideband expressions.
/// Real part is the Kerr coefficient, imaginary part the nonlinear absorption.
cplx chi3_closed_form(const Params& p, const SteadyBranch& b,
                      ClosedFormCorrections corrections = ClosedFormCorrections::all(),
                      ResponseOptions opts = {});

/// Observables derived from the signal sideband.
struct ResponsePoint {
  cplx chi1{};
  std::optional<cplx> chi3;  ///< absent when ep0 == 0
  cplx a_plus{};             ///< a+ per unit signal amplitude
  cplx a_out_plus{};         ///< sqrt(2 kappa) a+ per unit signal; Re absorption, Im dispersion
  double T = 0.0;            ///< |1 - sqrt(2 kappa) a+ / Es|
  double T2 = 0.0;
  Backend backend = Backend::LinearSolve;
  bool non_physical = false;
};

/// Transmission |1 - sqrt(2 kappa) a+/Es| for a normalized a+.
double transmission(double kappa_c0, cplx a_plus_per_signal) noexcept;

ResponsePoint transmission_point(const Params& p, const SteadyBranch& b, Backend backend,
                                 ResponseOptions opts = {});

}  // namespace qdr
