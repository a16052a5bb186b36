#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "qdr/model.hpp"

namespace qdr {

/// Mean-field state. Defaults to the undriven ground state.
struct MeanFieldState {
  double w = -1.0;
  std::complex<double> sigma{};
  std::complex<double> a{};
  double q = 0.0;
  double qdot = 0.0;
};

/// Euclidean distance over the seven real coordinates, with the phonon
/// velocity multiplied by `velocity_scale`.
double distance(const MeanFieldState& x, const MeanFieldState& y, double velocity_scale = 1.0) noexcept;

/// Time derivative of the mean-field equations with pump and signal drive.
/// The phonon coordinate obeys a damped, restoring oscillator driven by the
/// inversion.
MeanFieldState mean_field_rhs(const Params& p, double signal, double t, const MeanFieldState& y) noexcept;

/// Largest admissible step: 0.02 * min(1, 2 pi / omega_k0, 2 pi / max(1, |delta0|)).
double max_step(const Params& p) noexcept;

/// Largest admissible step that divides the signal beat period exactly.
/// Falls back to max_step when delta0 == 0.
double commensurate_step(const Params& p) noexcept;

/// Fixed-step classical Runge-Kutta stepper.
class MeanFieldIntegrator {
 public:
  /// Throws InvalidStep when dt is not in (0, max_step(p)].
  MeanFieldIntegrator(const Params& p, double signal, double dt);

  /// Advances `y` from time t to t + dt.
  void step(MeanFieldState& y, double t) const noexcept;

  double dt() const noexcept { return dt_; }

 private:
  Params p_;
  double signal_;
  double dt_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> w;
  std::vector<std::complex<double>> sigma;
  std::vector<std::complex<double>> a;
  std::vector<double> q;
  std::vector<double> qdot;
  MeanFieldState final_state;
  double t_final = 0.0;

  std::size_t size() const noexcept { return t.size(); }
  void push_back(double time, const MeanFieldState& y);
};

struct IntegrationOptions {
  double t0 = 0.0;
  double signal = 0.0;  ///< signal amplitude Es (detuning taken from p.delta0)
  std::size_t stride = 1;  ///< record every stride-th step; 0 records nothing
  double record_from = -std::numeric_limits<double>::infinity();
};

/// Integrates from opts.t0 to t_end. Samples are taken at t0 + n dt before
/// each step; the state at t_end is in final_state. Throws BoundViolation if
/// the inversion leaves [-1, 1] by more than 1e-6, NonFinite on overflow.
Trajectory integrate_mean_field(const Params& p, const MeanFieldState& init, double t_end, double dt,
                                const IntegrationOptions& opts = {});

/// DC and first-sideband content of the last window of a trajectory.
struct Demodulated {
  std::complex<double> a0, a_plus, a_minus;
  std::complex<double> sigma0, sigma_plus, sigma_minus;
  double w0 = 0.0;
  std::complex<double> w_plus{};
  double q0 = 0.0;
  double dc_drift = 0.0;          ///< DC change against the preceding window
  double explained_energy = 1.0;  ///< fraction of the AC energy carried by the three tones
};

/// Projects a(t), sigma(t), w(t) of the final `n_periods` beat periods onto
/// 1, e^{-i delta t} and e^{+i delta t}. The window must cover an integer
/// number of samples, and the trajectory must hold a second window before it
/// for the drift check.
Demodulated demodulate_sidebands(const Trajectory& traj, double delta0, int n_periods,
                                 double settle_tolerance = 1e-6);

enum class PerturbationOutcome { Decayed, Departed, Inconclusive };

struct PerturbationOptions {
  double amplitude = 1e-6;
  double departure = 1e-3;
  double horizon = 400.0;
  double decay_fraction = 0.1;
  unsigned seed = 7;
};

struct PerturbationReport {
  PerturbationOutcome outcome = PerturbationOutcome::Inconclusive;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double max_distance = 0.0;
  double time = 0.0;  ///< departure time, or the horizon
};

/// Integrates the undriven-signal dynamics from a randomly displaced copy of
/// `fixed_point` and reports whether the displacement decays or grows.
/// Distances use the phonon velocity divided by omega_k0.
PerturbationReport perturbation_test(const Params& p, const MeanFieldState& fixed_point,
                                     const PerturbationOptions& opts = {});

}  // namespace qdr
