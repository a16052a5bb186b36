#include "qdr/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iterator>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "qdr/error.hpp"
#include "qdr/steady.hpp"

namespace qdr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [key, value] : table)
    if (key == name) return value;
  std::string known;
  for (const auto& [key, value] : table) known += fmt::format("{}{}", known.empty() ? "" : ", ", key);
  throw Error(ErrorCode::BadValue, fmt::format("unknown {} '{}' (expected one of {})", what, name, known));
}

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [key, v] : table)
    if (v == value) return key;
  return "?";
}

constexpr std::array<std::pair<std::string_view, SweepAxis>, 5> kAxes{{
    {"delta0", SweepAxis::Delta0},
    {"delta_s0", SweepAxis::DeltaS0},
    {"delta_p0", SweepAxis::DeltaP0},
    {"ep0", SweepAxis::Ep0},
    {"g0", SweepAxis::G0},
}};
constexpr std::array<std::pair<std::string_view, Observable>, 7> kObservables{{
    {"chi1", Observable::Chi1},
    {"chi3", Observable::Chi3},
    {"a_out_plus", Observable::AOutPlus},
    {"t2", Observable::T2},
    {"kerr", Observable::Kerr},
    {"nonlin_abs", Observable::NonlinAbs},
    {"w0", Observable::W0},
}};
constexpr std::array<std::pair<std::string_view, BranchPolicy>, 3> kPolicies{{
    {"all", BranchPolicy::AllBranches},
    {"stable", BranchPolicy::StableOnly},
    {"continuation", BranchPolicy::Continuation},
}};
constexpr std::array<std::pair<std::string_view, Backend>, 2> kBackends{{
    {"linear", Backend::LinearSolve},
    {"closed-form", Backend::ClosedForm},
}};

bool steady_depends_on(SweepAxis axis) noexcept {
  return axis != SweepAxis::Delta0 && axis != SweepAxis::DeltaS0;
}

cplx evaluate(const SweepConfig& cfg, const Params& p, const SteadyBranch& b, ResponseOptions opts) {
  switch (cfg.observable) {
    case Observable::W0:
      return {b.w0, 0.0};
    case Observable::Chi1:
      if (cfg.backend == Backend::ClosedForm) return chi1_closed_form(p, b, cfg.corrections, opts);
      return chi1_from_sidebands(solve_sidebands(p, b, opts));
    case Observable::Chi3:
    case Observable::Kerr:
    case Observable::NonlinAbs: {
      const cplx chi3 = cfg.backend == Backend::ClosedForm ? chi3_closed_form(p, b, cfg.corrections, opts)
                                                           : chi3_from_sidebands(p, solve_sidebands(p, b, opts));
      if (cfg.observable == Observable::Kerr) return {chi3.real(), 0.0};
      if (cfg.observable == Observable::NonlinAbs) return {chi3.imag(), 0.0};
      return chi3;
    }
    case Observable::AOutPlus:
      return transmission_point(p, b, cfg.backend, opts).a_out_plus;
    case Observable::T2:
      return {transmission_point(p, b, cfg.backend, opts).T2, 0.0};
  }
  return {kNaN, kNaN};
}

SpectrumRecord skipped(double x, int branch_id, double w0, RecordFlag why) {
  SpectrumRecord r{x, branch_id, w0, kNaN, kNaN, 0};
  r.set(why);
  return r;
}

SpectrumRecord evaluate_record(const SweepConfig& cfg, const Params& p, double x, int id, const SteadyBranch& b) {
  ResponseOptions opts;
  opts.allow_unstable = !b.stable();
  try {
    const cplx v = evaluate(cfg, p, b, opts);
    SpectrumRecord r{x, id, b.w0, v.real(), v.imag(), 0};
    if (!b.stable()) r.set(RecordFlag::Unstable);
    if (!b.physical || (!b.stable() && cfg.observable != Observable::W0)) r.set(RecordFlag::NonPhysical);
    return r;
  } catch (const Error& e) {
    if (!is_numerical(e.code()) && e.code() != ErrorCode::ZeroPump) throw;
    return skipped(x, id, b.w0, RecordFlag::PoleSkipped);
  }
}

std::vector<SpectrumRecord> evaluate_point(const SweepConfig& cfg, double x,
                                           const std::vector<SteadyBranch>* cached) {
  const Params p = with_sweep_value(cfg.base, cfg.axis, x);
  std::vector<SteadyBranch> local;
  if (!cached) {
    try {
      local = solve_steady_branches(p);
    } catch (const Error& e) {
      if (!is_numerical(e.code())) throw;
      return {skipped(x, -1, kNaN, RecordFlag::PoleSkipped)};
    }
    cached = &local;
  }
  std::vector<SpectrumRecord> out;
  for (std::size_t i = 0; i < cached->size(); ++i) {
    const SteadyBranch& b = (*cached)[i];
    if (cfg.policy == BranchPolicy::StableOnly && !b.stable()) continue;
    out.push_back(evaluate_record(cfg, p, x, static_cast<int>(i), b));
  }
  if (out.empty()) out.push_back(skipped(x, -1, kNaN, RecordFlag::Unstable));
  return out;
}

std::vector<SpectrumRecord> run_continuation(const SweepConfig& cfg) {
  ContinuationAxis axis{};
  if (cfg.axis == SweepAxis::Ep0) axis = ContinuationAxis::Ep0;
  else if (cfg.axis == SweepAxis::DeltaP0) axis = ContinuationAxis::DeltaP0;
  else throw Error(ErrorCode::BadConfig, "continuation needs an ep0 or delta_p0 axis");

  auto trace = hysteresis_sweep(cfg.base, axis, cfg.grid).up;
  if (cfg.observable == Observable::W0) return trace;
  for (SpectrumRecord& r : trace) {
    if (r.branch_id < 0) continue;
    const Params p = with_sweep_value(cfg.base, cfg.axis, r.x);
    const auto branches = solve_steady_branches(p);
    r = evaluate_record(cfg, p, r.x, r.branch_id, branches.at(static_cast<std::size_t>(r.branch_id)));
  }
  return trace;
}

}  // namespace

std::string_view to_string(SweepAxis a) noexcept { return enum_name(a, kAxes); }
std::string_view to_string(Observable o) noexcept { return enum_name(o, kObservables); }
std::string_view to_string(BranchPolicy b) noexcept { return enum_name(b, kPolicies); }
SweepAxis parse_axis(std::string_view name) { return parse_enum(name, kAxes, "axis"); }
Observable parse_observable(std::string_view name) { return parse_enum(name, kObservables, "observable"); }
BranchPolicy parse_policy(std::string_view name) { return parse_enum(name, kPolicies, "branch policy"); }
Backend parse_backend(std::string_view name) { return parse_enum(name, kBackends, "backend"); }

Params with_sweep_value(Params p, SweepAxis axis, double x) noexcept {
  switch (axis) {
    case SweepAxis::Delta0: p.delta0 = x; break;
    case SweepAxis::DeltaS0: p.delta0 = delta_from_signal_detuning(x, p.delta_p0); break;
    case SweepAxis::DeltaP0: p.delta_p0 = x; break;
    case SweepAxis::Ep0: p.ep0 = x; break;
    case SweepAxis::G0: p.g0 = x; break;
  }
  return p;
}

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.grid.empty()) throw Error(ErrorCode::InvalidGrid, "empty grid");
  bool ascending = true;
  bool descending = true;
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    if (!std::isfinite(cfg.grid[i])) throw Error(ErrorCode::InvalidGrid, "grid value is not finite");
    if (i > 0) {
      ascending = ascending && cfg.grid[i] > cfg.grid[i - 1];
      descending = descending && cfg.grid[i] < cfg.grid[i - 1];
    }
  }
  if (!ascending && !descending) throw Error(ErrorCode::InvalidGrid, "grid is not strictly monotone");
  if (cfg.policy == BranchPolicy::Continuation && !ascending)
    throw Error(ErrorCode::InvalidGrid, "continuation needs an ascending grid");
  validate_params(cfg.base);
  validate_params(with_sweep_value(cfg.base, cfg.axis, cfg.grid.front()));
  validate_params(with_sweep_value(cfg.base, cfg.axis, cfg.grid.back()));
}

unsigned sweep_threads(unsigned requested) noexcept {
  unsigned n = requested > 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QDR_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<SpectrumRecord> run_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg);
  if (cfg.policy == BranchPolicy::Continuation) return run_continuation(cfg);

  std::optional<std::vector<SteadyBranch>> shared;
  if (!steady_depends_on(cfg.axis)) {
    try {
      shared = solve_steady_branches(cfg.base);
    } catch (const Error& e) {
      if (!is_numerical(e.code())) throw;
    }
  }

  const std::size_t n = cfg.grid.size();
  std::vector<std::vector<SpectrumRecord>> per_point(n);
  const auto work = [&](std::size_t i) {
    if (!steady_depends_on(cfg.axis) && !shared) {
      per_point[i] = {skipped(cfg.grid[i], -1, kNaN, RecordFlag::PoleSkipped)};
      return;
    }
    per_point[i] = evaluate_point(cfg, cfg.grid[i], shared ? &*shared : nullptr);
  };

  const unsigned threads = std::min<std::size_t>(sweep_threads(cfg.threads), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            work(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<SpectrumRecord> out;
  for (auto& chunk : per_point) out.insert(out.end(), chunk.begin(), chunk.end());
  return out;
}

std::vector<SpectrumRecord> select_branch(std::span<const SpectrumRecord> records, int branch_id) {
  std::vector<SpectrumRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [branch_id](const SpectrumRecord& r) { return r.branch_id == branch_id; });
  return out;
}

std::vector<Extremum> locate_extrema(std::span<const SpectrumRecord> records, ExtremumKind kind,
                                     Component component) {
  if (records.size() < 3)
    throw Error(ErrorCode::TooFewPoints, fmt::format("need at least 3 samples, have {}", records.size()));
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].branch_id != records[0].branch_id)
      throw Error(ErrorCode::BadValue, "extrema need a single-branch record stream");
  }

  const double sign = kind == ExtremumKind::Peak ? 1.0 : -1.0;
  const auto value = [&](const SpectrumRecord& r) {
    if (r.flags != 0) return kNaN;
    switch (component) {
      case Component::Re: return r.value_re;
      case Component::Im: return r.value_im;
      case Component::Abs: return std::hypot(r.value_re, r.value_im);
    }
    return kNaN;
  };

  std::vector<Extremum> out;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double y0 = value(records[i - 1]);
    const double y1 = value(records[i]);
    const double y2 = value(records[i + 1]);
    if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2)) continue;
    if (!(sign * (y1 - y0) > 0.0 && sign * (y1 - y2) >= 0.0)) continue;

    const double h1 = records[i].x - records[i - 1].x;
    const double h2 = records[i + 1].x - records[i].x;
    const double a = (h1 * (y2 - y1) + h2 * (y0 - y1)) / (h1 * h2 * (h1 + h2));
    const double b = ((y2 - y1) - a * h2 * h2) / h2;
    Extremum e{records[i].x, y1, i};
    if (a != 0.0) {
      const double lo = std::min(-h1, h2);
      const double hi = std::max(-h1, h2);
      const double u = std::clamp(-b / (2.0 * a), lo, hi);
      e.x = records[i].x + u;
      e.value = y1 + b * u + a * u * u;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<double> linspace(double start, double stop, std::size_t points) {
  if (points == 0) throw Error(ErrorCode::InvalidGrid, "grid needs at least one point");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw Error(ErrorCode::InvalidGrid, "grid bounds not finite");
  if (points == 1) return {start};
  std::vector<double> out(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = start + static_cast<double>(i) * step;
  out.back() = stop;
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
    throw Error(ErrorCode::InvalidGrid, fmt::format("grid '{}' is not start:stop:points", text));
  const double start = parse_double(text.substr(0, c1));
  const double stop = parse_double(text.substr(c1 + 1, c2 - c1 - 1));
  const double count = parse_double(text.substr(c2 + 1));
  if (!(count >= 1.0) || count != std::floor(count) || count > 1e8)
    throw Error(ErrorCode::InvalidGrid, fmt::format("grid point count '{}' is not a positive integer", text.substr(c2 + 1)));
  return linspace(start, stop, static_cast<std::size_t>(count));
}

}  // namespace qdr
