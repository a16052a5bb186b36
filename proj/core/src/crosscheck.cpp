#include "qdr/crosscheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qdr/error.hpp"
#include "qdr/response.hpp"

namespace qdr {

MeanFieldState state_from_branch(const SteadyBranch& b) noexcept {
  return {b.w0, b.sigma0, b.a0, b.q0, 0.0};
}

OracleSidebands run_oracle_sidebands(const Params& p, double signal, const OracleRunOptions& opts) {
  if (p.delta0 == 0.0) throw Error(ErrorCode::ZeroDelta, "sideband oracle needs delta0 != 0");
  if (opts.step_refinement < 1) throw Error(ErrorCode::InvalidStep, "step_refinement must be >= 1");
  const double dt = commensurate_step(p) / opts.step_refinement;
  const double period = 2.0 * std::numbers::pi / std::abs(p.delta0);
  const auto per_window = static_cast<long long>(std::llround(opts.n_periods * period / dt));
  const double window = static_cast<double>(per_window) * dt;

  IntegrationOptions io;
  io.signal = signal;
  Trajectory previous = integrate_mean_field(p, MeanFieldState{}, window, dt, io);
  double t = previous.t_final;
  while (t < opts.max_time) {
    io.t0 = t;
    Trajectory current = integrate_mean_field(p, previous.final_state, t + window, dt, io);
    t = current.t_final;

    Trajectory both = previous;
    both.t.insert(both.t.end(), current.t.begin(), current.t.end());
    both.w.insert(both.w.end(), current.w.begin(), current.w.end());
    both.sigma.insert(both.sigma.end(), current.sigma.begin(), current.sigma.end());
    both.a.insert(both.a.end(), current.a.begin(), current.a.end());
    both.q.insert(both.q.end(), current.q.begin(), current.q.end());
    both.qdot.insert(both.qdot.end(), current.qdot.begin(), current.qdot.end());
    both.final_state = current.final_state;
    both.t_final = current.t_final;
    try {
      return {demodulate_sidebands(both, p.delta0, opts.n_periods, opts.settle_tolerance), signal, dt, t};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotSettled) throw;
    }
    previous = std::move(current);
  }
  throw Error(ErrorCode::NotSettled, fmt::format("no settled window before t = {}", opts.max_time));
}

OracleComparison compare_with_oracle(const Params& p, const OracleRunOptions& opts) {
  validate_params(p);
  const double es = signal_amplitude(p);
  if (!(es > 0.0)) throw Error(ErrorCode::BadValue, "oracle comparison needs a positive signal amplitude");

  const auto branches = solve_steady_branches(p);
  const auto stable = std::count_if(branches.begin(), branches.end(), [](const SteadyBranch& b) { return b.stable(); });
  if (branches.size() != 1 || stable != 1)
    throw Error(ErrorCode::BadConfig,
                fmt::format("oracle comparison needs a monostable point ({} branches, {} stable)", branches.size(),
                            stable));
  const SteadyBranch& branch = branches.front();
  const SidebandAmplitudes lin = solve_sidebands(p, branch);

  const OracleSidebands single = run_oracle_sidebands(p, es, opts);
  const OracleSidebands doubled = run_oracle_sidebands(p, 2.0 * es, opts);

  OracleComparison c;
  c.a_plus_linear = lin.a_plus / lin.signal;
  c.a_plus_oracle = single.demod.a_plus / es;
  c.relative_deviation = std::abs(c.a_plus_oracle - c.a_plus_linear) / std::abs(c.a_plus_linear);
  c.linearity_ratio = std::abs(doubled.demod.a_plus) / std::abs(single.demod.a_plus);
  c.dc_deviation = std::max({std::abs(single.demod.a0 - branch.a0), std::abs(single.demod.sigma0 - branch.sigma0),
                             std::abs(single.demod.w0 - branch.w0)});
  c.explained_energy = single.demod.explained_energy;
  c.branch_w0 = branch.w0;
  return c;
}

}  // namespace qdr
