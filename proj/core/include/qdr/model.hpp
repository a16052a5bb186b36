#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace qdr {

/// Dimensionless parameter set of one simulation point.
///
/// Every rate and frequency is expressed in units of the exciton dephasing
/// rate. Defaults follow the values shared by most figure presets; the phonon
/// decay is never quoted numerically and defaults to 0.1.
struct Params {
  double delta_p0 = 0.0;  ///< pump-exciton detuning
  double delta_c0 = 0.0;  ///< cavity-pump detuning
  double delta0 = 0.0;    ///< signal-pump detuning
  double g0 = 0.0;        ///< dot-cavity coupling
  double eta = 0.0;       ///< Huang-Rhys exciton-phonon coupling
  double omega_k0 = 10.0; ///< phonon frequency
  double kappa_c0 = 1.35; ///< cavity decay
  double gamma_q0 = 0.1;  ///< phonon decay
  double ep0 = 0.0;       ///< pump amplitude
  /// Signal amplitude. Only the time-domain oracle needs an absolute value;
  /// when unset it is taken as 1e-3 * ep0.
  std::optional<double> es0;
  double gamma1_ratio = 2.0;  ///< population decay over dephasing

  bool operator==(const Params&) const = default;
};

/// Returns `raw` unchanged when every invariant holds, throws qdr::Error
/// otherwise. Values are never clamped.
Params validate_params(const Params& raw);

/// Effective signal amplitude (explicit es0, else 1e-3 * ep0).
double signal_amplitude(const Params& p) noexcept;

/// Signal-pump detuning from the signal-exciton detuning.
constexpr double delta_from_signal_detuning(double delta_s0, double delta_p0) noexcept {
  return -(delta_s0 + delta_p0);
}

/// Field names accepted by the key=value interfaces, in canonical order.
std::span<const std::string_view> param_keys() noexcept;

void set_param(Params& p, std::string_view key, double value);
double get_param(const Params& p, std::string_view key);

/// Applies one "key=value" assignment.
void apply_assignment(Params& p, std::string_view assignment);

/// Parses a flat key=value text (one assignment per line, '#' comments).
/// Unknown keys are an error.
Params parse_params(std::string_view text, Params base = {});
Params load_params_file(const std::filesystem::path& path, Params base = {});

/// Canonical key=value listing, one per line; es0 is omitted when unset.
std::string format_params(const Params& p);

double parse_double(std::string_view text);

}  // namespace qdr
