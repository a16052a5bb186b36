#include "qdr/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "qdr/error.hpp"

namespace qdr {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};
constexpr double kBoundSlack = 1e-6;

MeanFieldState axpy(const MeanFieldState& y, double h, const MeanFieldState& k) noexcept {
  return {y.w + h * k.w, y.sigma + h * k.sigma, y.a + h * k.a, y.q + h * k.q, y.qdot + h * k.qdot};
}

bool finite(const MeanFieldState& y) noexcept {
  return std::isfinite(y.w) && std::isfinite(y.sigma.real()) && std::isfinite(y.sigma.imag()) &&
         std::isfinite(y.a.real()) && std::isfinite(y.a.imag()) && std::isfinite(y.q) && std::isfinite(y.qdot);
}

void check_state(const MeanFieldState& y, double t) {
  if (!finite(y)) throw Error(ErrorCode::NonFinite, fmt::format("state overflowed at t = {}", t));
  if (std::abs(y.w) > 1.0 + kBoundSlack)
    throw Error(ErrorCode::BoundViolation, fmt::format("inversion w = {} left [-1, 1] at t = {}", y.w, t));
}

}  // namespace

double distance(const MeanFieldState& x, const MeanFieldState& y, double velocity_scale) noexcept {
  const double dw = x.w - y.w;
  const double dq = x.q - y.q;
  const double dv = (x.qdot - y.qdot) * velocity_scale;
  return std::sqrt(dw * dw + std::norm(x.sigma - y.sigma) + std::norm(x.a - y.a) + dq * dq + dv * dv);
}

MeanFieldState mean_field_rhs(const Params& p, double signal, double t, const MeanFieldState& y) noexcept {
  const double g = p.g0;
  const double omega = p.omega_k0;
  MeanFieldState dy;
  dy.w = (-p.gamma1_ratio * (y.w + 1.0) - kI * g * (y.a * std::conj(y.sigma) - std::conj(y.a) * y.sigma)).real();
  dy.sigma = -(1.0 + kI * p.delta_p0) * y.sigma - kI * y.q * y.sigma + 2.0 * kI * g * y.a * y.w;
  dy.a = -(kI * p.delta_c0 + p.kappa_c0) * y.a - kI * g * y.sigma + p.ep0 +
         signal * std::exp(-kI * (p.delta0 * t));
  dy.q = y.qdot;
  dy.qdot = -p.gamma_q0 * y.qdot - omega * omega * y.q - 2.0 * p.eta * omega * omega * omega * y.w;
  return dy;
}

double max_step(const Params& p) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return 0.02 * std::min({1.0, two_pi / p.omega_k0, two_pi / std::max(1.0, std::abs(p.delta0))});
}

double commensurate_step(const Params& p) noexcept {
  const double h = max_step(p);
  if (p.delta0 == 0.0) return h;
  const double period = 2.0 * std::numbers::pi / std::abs(p.delta0);
  const double per_period = std::ceil(period / h * (1.0 - 1e-12));
  return period / per_period;
}

MeanFieldIntegrator::MeanFieldIntegrator(const Params& p, double signal, double dt)
    : p_(p), signal_(signal), dt_(dt) {
  const double limit = max_step(p);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidStep, fmt::format("dt = {} outside (0, {}]", dt, limit));
}

void MeanFieldIntegrator::step(MeanFieldState& y, double t) const noexcept {
  const double h = dt_;
  const MeanFieldState k1 = mean_field_rhs(p_, signal_, t, y);
  const MeanFieldState k2 = mean_field_rhs(p_, signal_, t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const MeanFieldState k3 = mean_field_rhs(p_, signal_, t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const MeanFieldState k4 = mean_field_rhs(p_, signal_, t + h, axpy(y, h, k3));
  const double s = h / 6.0;
  y.w += s * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  y.sigma += s * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
  y.a += s * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
  y.q += s * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
  y.qdot += s * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
}

void Trajectory::push_back(double time, const MeanFieldState& y) {
  t.push_back(time);
  w.push_back(y.w);
  sigma.push_back(y.sigma);
  a.push_back(y.a);
  q.push_back(y.q);
  qdot.push_back(y.qdot);
}

Trajectory integrate_mean_field(const Params& p, const MeanFieldState& init, double t_end, double dt,
                                const IntegrationOptions& opts) {
  const MeanFieldIntegrator stepper(p, opts.signal, dt);
  if (t_end < opts.t0) throw Error(ErrorCode::InvalidStep, "t_end precedes t0");
  const auto steps = static_cast<std::size_t>(std::llround((t_end - opts.t0) / dt));

  Trajectory traj;
  if (opts.stride > 0) {
    const double first = std::max(opts.t0, opts.record_from);
    const auto recorded = first > t_end ? 0 : static_cast<std::size_t>((t_end - first) / dt) / opts.stride + 1;
    traj.t.reserve(recorded);
  }
  MeanFieldState y = init;
  check_state(y, opts.t0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = opts.t0 + static_cast<double>(n) * dt;
    if (opts.stride > 0 && n % opts.stride == 0 && t >= opts.record_from) traj.push_back(t, y);
    stepper.step(y, t);
    check_state(y, t + dt);
  }
  traj.final_state = y;
  traj.t_final = opts.t0 + static_cast<double>(steps) * dt;
  return traj;
}

Demodulated demodulate_sidebands(const Trajectory& traj, double delta0, int n_periods, double settle_tolerance) {
  if (delta0 == 0.0) throw Error(ErrorCode::ZeroDelta, "demodulation needs delta0 != 0; compare DC values instead");
  if (n_periods < 20) throw Error(ErrorCode::BadValue, fmt::format("n_periods = {} < 20", n_periods));
  if (traj.size() < 2) throw Error(ErrorCode::NotSettled, "trajectory too short");

  const double h = traj.t[1] - traj.t[0];
  const double window = n_periods * 2.0 * std::numbers::pi / std::abs(delta0);
  const auto n = static_cast<std::size_t>(std::llround(window / h));
  if (std::abs(static_cast<double>(n) * h - window) > 1e-6 * h)
    throw Error(ErrorCode::IncommensurateWindow,
                fmt::format("window {} is not a whole number of samples of {}", window, h));
  if (traj.size() < 2 * n)
    throw Error(ErrorCode::NotSettled, fmt::format("need {} samples for two windows, have {}", 2 * n, traj.size()));

  const std::size_t start = traj.size() - n;
  const std::size_t prev = start - n;
  const double inv_n = 1.0 / static_cast<double>(n);

  Demodulated d{};
  cplx prev_a0{}, prev_s0{};
  double prev_w0 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    prev_a0 += traj.a[prev + j];
    prev_s0 += traj.sigma[prev + j];
    prev_w0 += traj.w[prev + j];

    const std::size_t i = start + j;
    const cplx up = std::exp(kI * (delta0 * traj.t[i]));  // projects onto e^{-i delta t}
    const cplx down = std::conj(up);
    d.a0 += traj.a[i];
    d.a_plus += traj.a[i] * up;
    d.a_minus += traj.a[i] * down;
    d.sigma0 += traj.sigma[i];
    d.sigma_plus += traj.sigma[i] * up;
    d.sigma_minus += traj.sigma[i] * down;
    d.w0 += traj.w[i];
    d.w_plus += traj.w[i] * up;
    d.q0 += traj.q[i];
  }
  d.a0 *= inv_n;
  d.a_plus *= inv_n;
  d.a_minus *= inv_n;
  d.sigma0 *= inv_n;
  d.sigma_plus *= inv_n;
  d.sigma_minus *= inv_n;
  d.w0 *= inv_n;
  d.w_plus *= inv_n;
  d.q0 *= inv_n;

  d.dc_drift = std::max({std::abs(d.a0 - prev_a0 * inv_n), std::abs(d.sigma0 - prev_s0 * inv_n),
                         std::abs(d.w0 - prev_w0 * inv_n)});
  if (!(d.dc_drift < settle_tolerance))
    throw Error(ErrorCode::NotSettled, fmt::format("DC drift {:.3e} over the last window", d.dc_drift));

  double residual = 0.0;
  double ac = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = start + j;
    const cplx down = std::exp(kI * (delta0 * traj.t[i]));
    const cplx up = std::conj(down);  // e^{-i delta t}
    const cplx a_fit = d.a0 + d.a_plus * up + d.a_minus * down;
    const cplx s_fit = d.sigma0 + d.sigma_plus * up + d.sigma_minus * down;
    residual += std::norm(traj.a[i] - a_fit) + std::norm(traj.sigma[i] - s_fit);
    ac += std::norm(traj.a[i] - d.a0) + std::norm(traj.sigma[i] - d.sigma0);
  }
  d.explained_energy = ac > 0.0 ? 1.0 - residual / ac : 1.0;
  return d;
}

PerturbationReport perturbation_test(const Params& p, const MeanFieldState& fixed_point,
                                     const PerturbationOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  std::array<double, 7> dir{};
  double norm = 0.0;
  for (double& c : dir) {
    c = normal(rng);
    norm += c * c;
  }
  norm = std::sqrt(norm);
  const double scale = opts.amplitude / norm;

  MeanFieldState y = fixed_point;
  y.w += scale * dir[0];
  y.sigma += scale * cplx(dir[1], dir[2]);
  y.a += scale * cplx(dir[3], dir[4]);
  y.q += scale * dir[5];
  y.qdot += scale * dir[6] * p.omega_k0;

  const double dt = max_step(p);
  const MeanFieldIntegrator stepper(p, 0.0, dt);
  const auto steps = static_cast<std::size_t>(std::ceil(opts.horizon / dt));

  const double vscale = 1.0 / p.omega_k0;
  PerturbationReport report;
  report.initial_distance = distance(y, fixed_point, vscale);
  report.max_distance = report.initial_distance;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    stepper.step(y, t);
    check_state(y, t + dt);
    const double dist = distance(y, fixed_point, vscale);
    report.max_distance = std::max(report.max_distance, dist);
    if (dist > opts.departure) {
      report.outcome = PerturbationOutcome::Departed;
      report.final_distance = dist;
      report.time = t + dt;
      return report;
    }
  }
  report.final_distance = distance(y, fixed_point, vscale);
  report.time = static_cast<double>(steps) * dt;
  report.outcome = report.final_distance < opts.decay_fraction * report.initial_distance
                       ? PerturbationOutcome::Decayed
                       : PerturbationOutcome::Inconclusive;
  return report;
}

}  // namespace qdr
