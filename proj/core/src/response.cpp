#include "qdr/response.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qdr/error.hpp"

namespace qdr {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPoleTolerance = 1e-14;
constexpr double kSingularTolerance = 1e-14;

constexpr std::array<std::string_view, 4> kCorrectionIds = {
    "cavity_field_uses_pump",
    "chi1_numerator_signs",
    "chi3_single_m_factor",
    "chi3_pump_normalization",
};

void require_branch(const SteadyBranch& b, const ResponseOptions& opts) {
  if (!b.stable() && !opts.allow_unstable)
    throw Error(ErrorCode::UnstableBranch,
                fmt::format("branch w0 = {} is {}; pass allow_unstable to evaluate it", b.w0, to_string(b.stability)));
}

void require_nonzero(std::string_view name, cplx v) {
  if (std::abs(v) < kPoleTolerance) throw Error(ErrorCode::PoleHit, fmt::format("{} vanishes", name));
}

// Shared building blocks of the closed-form susceptibilities. The "first"
// set (A1, B1, M1, N1, zeta1, Phi1) belongs to the e^{-i delta t} sideband,
// the "second" set to its e^{+i delta t} partner.
struct ClosedFormTerms {
  double g, w0, eta_omega;
  cplx c1, c2, d1, d2;
  cplx zeta1, zeta2;
  cplx a1, b1, a2, b2;
  cplx m1, n1, m2, n2;
  cplx phi1, phi2;
};

ClosedFormTerms closed_form_terms(const Params& p, const SteadyBranch& b, const ClosedFormCorrections& corr) {
  ClosedFormTerms t{};
  const double g = p.g0;
  const double d = p.delta0;
  const double w = p.omega_k0;
  const double w0 = b.w0;
  const double k = p.kappa_c0;
  const double dc = p.delta_c0;
  const double dp = p.delta_p0;
  const double shift = 2.0 * w * p.eta * w0;
  const double eo = w * p.eta;

  t.g = g;
  t.w0 = w0;
  t.eta_omega = eo;
  t.c1 = steady_coherence(p, w0);
  t.c2 = std::conj(t.c1);
  const double numerator = corr.cavity_field_uses_pump ? p.ep0 : w0;
  t.d1 = (numerator - kI * g * t.c1) / (kI * dc + k);
  t.d2 = std::conj(t.d1);

  t.zeta1 = w * w / (w * w - kI * d * p.gamma_q0 - d * d);
  t.zeta2 = w * w / (w * w + kI * d * p.gamma_q0 - d * d);
  t.a1 = kI * dc + k - kI * d;
  t.b1 = -kI * dc + k - kI * d;
  t.a2 = -kI * dc + k + kI * d;
  t.b2 = kI * dc + k + kI * d;
  require_nonzero("A1", t.a1);
  require_nonzero("B1", t.b1);
  require_nonzero("A2", t.a2);
  require_nonzero("B2", t.b2);

  const double g2w = 2.0 * g * g * w0;
  t.m1 = (dp - kI - d - shift) + kI * g2w / t.a1;
  t.n1 = (dp + kI + d - shift) - kI * g2w / t.b1;
  t.m2 = (dp + kI - d - shift) - kI * g2w / t.a2;
  t.n2 = (dp - kI + d - shift) + kI * g2w / t.b2;
  require_nonzero("M1", t.m1);
  require_nonzero("N1", t.n1);
  require_nonzero("M2", t.m2);
  require_nonzero("N2", t.n2);

  const cplx c1 = t.c1, c2 = t.c2, d1 = t.d1, d2 = t.d2;
  const double g3 = g * g * g;
  const double gg = g * g;
  {
    const cplx z = t.zeta1;
    const cplx a = t.a1, bb = t.b1, m = t.m1, n = t.n1;
    t.phi1 = (p.gamma1_ratio - kI * d) + 2.0 * gg * c2 * eo * z * c1 / (a * m) + 2.0 * g3 * c2 * d1 / (a * m) +
             2.0 * kI * g * d1 * eo * z * c2 / n + 2.0 * kI * gg * d1 * d2 / n +
             2.0 * gg * c1 * c2 * eo * z / (bb * n) + 2.0 * g3 * c1 * d2 / (bb * n) -
             2.0 * kI * g * d2 * eo * z * c1 / m - 2.0 * kI * gg * d1 * d2 / m;
  }
  {
    const cplx z = t.zeta2;
    const cplx a = t.a2, bb = t.b2, m = t.m2, n = t.n2;
    t.phi2 = (p.gamma1_ratio + kI * d) + 2.0 * gg * c2 * eo * z * c1 / (a * m) + 2.0 * g3 * c1 * d2 / (a * m) -
             2.0 * kI * g * d2 * eo * z * c1 / n - 2.0 * kI * gg * d1 * d2 / n +
             2.0 * gg * c1 * c2 * eo * z / (bb * n) + 2.0 * g3 * c2 * d1 / (bb * n) +
             2.0 * kI * g * d1 * eo * z * c2 / m + 2.0 * kI * gg * d1 * d2 / m;
  }
  require_nonzero("Phi1", t.phi1);
  require_nonzero("Phi2", t.phi2);
  return t;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  return b == Backend::LinearSolve ? "LinearSolve" : "ClosedForm";
}

double response_signal(const Params& p) noexcept {
  const double es = signal_amplitude(p);
  return es > 0.0 ? es : 1.0;
}

SidebandAmplitudes solve_sidebands(const Params& p, const SteadyBranch& b, ResponseOptions opts) {
  require_branch(b, opts);
  const double g = p.g0;
  const double d = p.delta0;
  const double w = p.omega_k0;
  const double es = response_signal(p);
  const cplx s0 = b.sigma0;
  const cplx a0 = b.a0;

  Eigen::Matrix<cplx, 6, 6> m = Eigen::Matrix<cplx, 6, 6>::Zero();
  Eigen::Matrix<cplx, 6, 1> rhs = Eigen::Matrix<cplx, 6, 1>::Zero();
  enum { AP = 0, AMC = 1, SP = 2, SMC = 3, WP = 4, QP = 5 };

  m(AP, AP) = p.kappa_c0 + kI * (p.delta_c0 - d);
  m(AP, SP) = kI * g;
  rhs[AP] = es;

  m(AMC, AMC) = p.kappa_c0 - kI * (p.delta_c0 + d);
  m(AMC, SMC) = -kI * g;

  m(SP, SP) = 1.0 + kI * (p.delta_p0 + b.q0 - d);
  m(SP, QP) = kI * s0;
  m(SP, WP) = -2.0 * kI * g * a0;
  m(SP, AP) = -2.0 * kI * g * b.w0;

  m(SMC, SMC) = 1.0 - kI * (p.delta_p0 + b.q0 + d);
  m(SMC, QP) = -kI * std::conj(s0);
  m(SMC, WP) = 2.0 * kI * g * std::conj(a0);
  m(SMC, AMC) = 2.0 * kI * g * b.w0;

  m(WP, WP) = p.gamma1_ratio - kI * d;
  m(WP, SMC) = kI * g * a0;
  m(WP, AP) = kI * g * std::conj(s0);
  m(WP, SP) = -kI * g * std::conj(a0);
  m(WP, AMC) = -kI * g * s0;

  m(QP, QP) = w * w - d * d - kI * d * p.gamma_q0;
  m(QP, WP) = 2.0 * p.eta * w * w * w;

  const Eigen::PartialPivLU<Eigen::Matrix<cplx, 6, 6>> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularTolerance))
    throw Error(ErrorCode::SingularSystem, fmt::format("sideband system reciprocal condition {:.3e}", rcond));
  const Eigen::Matrix<cplx, 6, 1> x = lu.solve(rhs);

  SidebandAmplitudes s;
  s.a_plus = x[AP];
  s.a_minus = std::conj(x[AMC]);
  s.sigma_plus = x[SP];
  s.sigma_minus = std::conj(x[SMC]);
  s.sigmaz_plus = x[WP];
  s.q_plus = x[QP];
  s.branch_w0 = b.w0;
  s.backend = Backend::LinearSolve;
  s.signal = es;
  s.non_physical = !b.stable();
  return s;
}

cplx chi1_from_sidebands(const SidebandAmplitudes& s) noexcept { return s.sigma_plus / s.signal; }

cplx chi3_from_sidebands(const Params& p, const SidebandAmplitudes& s) {
  if (p.ep0 == 0.0) throw Error(ErrorCode::ZeroPump, "nonlinear susceptibility needs ep0 > 0");
  return s.sigma_minus / (3.0 * s.signal * p.ep0 * p.ep0);
}

std::span<const std::string_view> ClosedFormCorrections::ids() noexcept { return kCorrectionIds; }

void ClosedFormCorrections::set(std::string_view id, bool enabled) {
  if (id == kCorrectionIds[0]) cavity_field_uses_pump = enabled;
  else if (id == kCorrectionIds[1]) chi1_numerator_signs = enabled;
  else if (id == kCorrectionIds[2]) chi3_single_m_factor = enabled;
  else if (id == kCorrectionIds[3]) chi3_pump_normalization = enabled;
  else throw Error(ErrorCode::UnknownKey, fmt::format("unknown closed-form correction '{}'", id));
}

cplx chi1_closed_form(const Params& p, const SteadyBranch& b, ClosedFormCorrections corr, ResponseOptions opts) {
  require_branch(b, opts);
  const ClosedFormTerms t = closed_form_terms(p, b, corr);
  const double g = t.g;
  const double sign = corr.chi1_numerator_signs ? 1.0 : -1.0;
  const cplx numerator = -(2.0 * g * g * g * t.c2 * t.w0 + sign * kI * g * t.c2 * t.a1 * t.m1 -
                           sign * 2.0 * kI * g * g * t.d2 * t.a1 * t.w0);
  const cplx drive = 2.0 * t.eta_omega * t.zeta1 * t.c1 + 2.0 * g * t.d1;
  return drive * numerator / (t.phi1 * t.a1 * t.a1 * t.m1 * t.m1) + 2.0 * g * t.w0 / (t.a1 * t.m1);
}

cplx chi3_closed_form(const Params& p, const SteadyBranch& b, ClosedFormCorrections corr, ResponseOptions opts) {
  require_branch(b, opts);
  if (p.ep0 == 0.0) throw Error(ErrorCode::ZeroPump, "nonlinear susceptibility needs ep0 > 0");
  const ClosedFormTerms t = closed_form_terms(p, b, corr);
  const double g = t.g;
  const cplx numerator =
      -(2.0 * g * g * g * t.c1 * t.w0 - kI * g * t.c1 * t.a2 * t.m2 + 2.0 * kI * g * g * t.d1 * t.a2 * t.w0);
  const cplx drive = 2.0 * t.eta_omega * t.zeta2 * t.c1 + 2.0 * g * t.d1;
  const cplx m_factor = corr.chi3_single_m_factor ? t.m2 : t.m2 * t.m2;
  cplx value = drive * numerator / (t.phi2 * t.a2 * t.a2 * m_factor * t.n2);
  if (corr.chi3_pump_normalization) value /= 3.0 * p.ep0 * p.ep0;
  return value;
}

double transmission(double kappa_c0, cplx a_plus_per_signal) noexcept {
  return std::abs(1.0 - std::sqrt(2.0 * kappa_c0) * a_plus_per_signal);
}

ResponsePoint transmission_point(const Params& p, const SteadyBranch& b, Backend backend, ResponseOptions opts) {
  ResponsePoint r;
  r.backend = backend;
  r.non_physical = !b.stable();
  if (backend == Backend::LinearSolve) {
    const SidebandAmplitudes s = solve_sidebands(p, b, opts);
    r.chi1 = chi1_from_sidebands(s);
    r.a_plus = s.a_plus / s.signal;
    if (p.ep0 > 0.0) r.chi3 = chi3_from_sidebands(p, s);
  } else {
    r.chi1 = chi1_closed_form(p, b, ClosedFormCorrections::all(), opts);
    r.a_plus = (1.0 - kI * p.g0 * r.chi1) / (kI * p.delta_c0 + p.kappa_c0 - kI * p.delta0);
    if (p.ep0 > 0.0) r.chi3 = chi3_closed_form(p, b, ClosedFormCorrections::all(), opts);
  }
  r.a_out_plus = std::sqrt(2.0 * p.kappa_c0) * r.a_plus;
  r.T = transmission(p.kappa_c0, r.a_plus);
  r.T2 = r.T * r.T;
  return r;
}

}  // namespace qdr
