#include "qdr/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qdr/crosscheck.hpp"
#include "qdr/error.hpp"
#include "qdr/io.hpp"
#include "qdr/model.hpp"
#include "qdr/presets.hpp"
#include "qdr/response.hpp"
#include "qdr/steady.hpp"
#include "qdr/sweep.hpp"

namespace qdr::cli {
namespace {

using json = nlohmann::json;

struct Common {
  std::vector<std::string> params;
  std::string config;
  std::string preset;
  std::string grid;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_preset = true) {
  cmd->add_option("--param", c.params, "Parameter override key=value (repeatable)");
  cmd->add_option("--config", c.config, "Parameter file of key=value lines");
  if (with_preset) cmd->add_option("--preset", c.preset, "Start from a figure preset");
  cmd->add_option("--grid", c.grid, "Sweep grid start:stop:points");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "Output path (default: standard output)");
}

Params apply_overrides(Params p, const Common& c) {
  if (!c.config.empty()) p = load_params_file(c.config, p);
  for (const std::string& a : c.params) apply_assignment(p, a);
  return validate_params(p);
}

Params resolve_params(const Common& c) {
  Params base;
  if (!c.preset.empty()) base = figure_preset(c.preset).members().front();
  return apply_overrides(base, c);
}

void emit(std::string_view text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file(path, text);
}

std::string records_text(std::span<const SpectrumRecord> records, Format f) {
  std::ostringstream s;
  write_records(s, records, f);
  return s.str();
}

std::string extension(Format f) { return f == Format::Csv ? ".csv" : ".json"; }

json params_json(const Params& p) {
  json j = json::object();
  for (std::string_view key : param_keys()) {
    if (key == "es0" && !p.es0) continue;
    j[std::string(key)] = get_param(p, key);
  }
  return j;
}

json turn_json(const TurningPoint& t) {
  return {{"x_from", t.x_from}, {"x_to", t.x_to}, {"w0_from", t.w0_from}, {"w0_to", t.w0_to}};
}

json hysteresis_meta(const Params& p, ContinuationAxis axis, std::span<const double> grid, const HysteresisResult& h) {
  json meta;
  meta["axis"] = axis == ContinuationAxis::Ep0 ? "ep0" : "delta_p0";
  meta["params"] = params_json(p);
  const auto window = find_bistable_window(p, axis, grid);
  meta["bistable_window"] = window ? json{{"lo", window->lo}, {"hi", window->hi}} : json(nullptr);
  meta["up_turns"] = json::array();
  meta["down_turns"] = json::array();
  for (const auto& t : h.up_turns) meta["up_turns"].push_back(turn_json(t));
  for (const auto& t : h.down_turns) meta["down_turns"].push_back(turn_json(t));
  meta["P1"] = h.up_turns.empty() ? json(nullptr) : turn_json(h.up_turns.front());
  meta["P2"] = h.down_turns.empty() ? json(nullptr) : turn_json(h.down_turns.front());
  return meta;
}

ContinuationAxis continuation_axis(SweepAxis a) {
  if (a == SweepAxis::Ep0) return ContinuationAxis::Ep0;
  if (a == SweepAxis::DeltaP0) return ContinuationAxis::DeltaP0;
  throw Error(ErrorCode::BadConfig, "hysteresis needs an ep0 or delta_p0 axis");
}

/// Writes up/down traces and metadata next to `stem`; returns the written paths.
std::vector<std::string> write_hysteresis(const Params& p, SweepAxis axis, const std::vector<double>& grid,
                                          Format f, const std::string& stem, json extra) {
  const ContinuationAxis cax = continuation_axis(axis);
  const HysteresisResult h = hysteresis_sweep(p, cax, grid);
  json meta = hysteresis_meta(p, cax, grid, h);
  meta.update(extra);
  const std::string up = stem + "_up" + extension(f);
  const std::string down = stem + "_down" + extension(f);
  const std::string meta_path = stem + "_meta.json";
  write_file(up, records_text(h.up, f));
  write_file(down, records_text(h.down, f));
  meta["traces"] = {{"up", up}, {"down", down}};
  write_file(meta_path, meta.dump(2) + "\n");
  return {up, down, meta_path};
}

std::string family_suffix(const ParamFamily& fam, double v) { return fmt::format("_{}_{}", fam.key, v); }

// ---------------------------------------------------------------------------

int cmd_steady(const Common& c, std::ostream& out) {
  const Params p = resolve_params(c);
  const auto branches = solve_steady_branches(p);
  const Format f = parse_format(c.format);
  std::string text;
  if (f == Format::Csv) {
    text = "branch_id,w0,re_a0,im_a0,re_sigma0,im_sigma0,q0,residual,stability,growth_rate,physical\n";
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const SteadyBranch& b = branches[i];
      text += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", i, format_number(b.w0), format_number(b.a0.real()),
                          format_number(b.a0.imag()), format_number(b.sigma0.real()),
                          format_number(b.sigma0.imag()), format_number(b.q0), format_number(b.residual),
                          to_string(b.stability), format_number(b.growth_rate), b.physical ? 1 : 0);
    }
  } else {
    json arr = json::array();
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const SteadyBranch& b = branches[i];
      arr.push_back({{"branch_id", i},
                     {"w0", b.w0},
                     {"re_a0", b.a0.real()},
                     {"im_a0", b.a0.imag()},
                     {"re_sigma0", b.sigma0.real()},
                     {"im_sigma0", b.sigma0.imag()},
                     {"q0", b.q0},
                     {"residual", b.residual},
                     {"stability", to_string(b.stability)},
                     {"growth_rate", b.growth_rate},
                     {"physical", b.physical}});
    }
    text = arr.dump(1) + "\n";
  }
  emit(text, c.out, out);
  return Success;
}

struct BistabilityArgs {
  std::string axis = "ep0";
  std::string traces;
};

int cmd_bistability(const Common& c, const BistabilityArgs& b, std::ostream& out) {
  const Params p = resolve_params(c);
  const SweepAxis axis = parse_axis(b.axis);
  std::vector<double> grid;
  if (!c.grid.empty()) grid = parse_grid(c.grid);
  else if (!c.preset.empty() && figure_preset(c.preset).axis == axis) grid = figure_preset(c.preset).grid;
  else throw Error(ErrorCode::InvalidGrid, "bistability needs --grid");
  const ContinuationAxis cax = continuation_axis(axis);
  if (!b.traces.empty()) {
    for (const auto& path : write_hysteresis(p, axis, grid, parse_format(c.format), b.traces, json::object()))
      out << path << '\n';
    return Success;
  }
  const HysteresisResult h = hysteresis_sweep(p, cax, grid);
  emit(hysteresis_meta(p, cax, grid, h).dump(2) + "\n", c.out, out);
  return Success;
}

struct SpectrumArgs {
  std::string axis = "delta0";
  std::string observable = "chi1";
  std::string backend = "linear";
  std::string policy = "stable";
  std::vector<std::string> disabled;
  unsigned threads = 0;
};

int cmd_spectrum(const Common& c, const SpectrumArgs& s, std::ostream& out) {
  SweepConfig cfg;
  cfg.base = resolve_params(c);
  cfg.axis = parse_axis(s.axis);
  cfg.observable = parse_observable(s.observable);
  cfg.backend = parse_backend(s.backend);
  cfg.policy = parse_policy(s.policy);
  cfg.threads = s.threads;
  for (const std::string& id : s.disabled) cfg.corrections.set(id, false);
  if (!c.grid.empty()) cfg.grid = parse_grid(c.grid);
  else if (!c.preset.empty()) cfg.grid = figure_preset(c.preset).grid;
  else throw Error(ErrorCode::InvalidGrid, "spectrum needs --grid or --preset");
  emit(records_text(run_sweep(cfg), parse_format(c.format)), c.out, out);
  return Success;
}

struct OracleArgs {
  std::vector<double> at;
  double relative_signal = 1e-3;
  double tolerance = 1e-3;
};

int cmd_oracle_check(const Common& c, const OracleArgs& o, std::ostream& out) {
  Params base = resolve_params(c);
  SweepAxis axis = SweepAxis::Delta0;
  std::vector<double> at = o.at;
  if (!c.preset.empty()) {
    axis = figure_preset(c.preset).axis;
    if (at.empty() && (axis == SweepAxis::Delta0 || axis == SweepAxis::DeltaS0)) at = {-7.5, 2.5, 12.5};
  }
  std::vector<Params> points;
  if (at.empty()) points.push_back(base);
  for (double x : at) points.push_back(with_sweep_value(base, axis, x));

  double worst = 0.0;
  double worst_linearity = 0.0;
  json rows = json::array();
  for (Params p : points) {
    if (!p.es0) p.es0 = o.relative_signal * p.ep0;
    const OracleComparison cmp = compare_with_oracle(p, {});
    worst = std::max(worst, cmp.relative_deviation);
    worst_linearity = std::max(worst_linearity, std::abs(cmp.linearity_ratio - 2.0) / 2.0);
    rows.push_back({{"delta0", p.delta0},
                    {"relative_deviation", cmp.relative_deviation},
                    {"linearity_ratio", cmp.linearity_ratio},
                    {"dc_deviation", cmp.dc_deviation},
                    {"explained_energy", cmp.explained_energy}});
  }
  const bool ok = worst < o.tolerance && worst_linearity < o.tolerance;
  std::string text;
  if (parse_format(c.format) == Format::Json) {
    text = json{{"points", rows},
                {"max_relative_deviation", worst},
                {"max_linearity_error", worst_linearity},
                {"tolerance", o.tolerance},
                {"pass", ok}}
               .dump(2) +
           "\n";
  } else {
    text = "delta0,relative_deviation,linearity_ratio,dc_deviation,explained_energy\n";
    for (const auto& r : rows)
      text += fmt::format("{},{},{},{},{}\n", format_number(r["delta0"].get<double>()), format_number(r["relative_deviation"].get<double>()),
                          format_number(r["linearity_ratio"].get<double>()), format_number(r["dc_deviation"].get<double>()),
                          format_number(r["explained_energy"].get<double>()));
  }
  emit(text, c.out, out);
  out << fmt::format("max relative deviation: {:.3e} (tolerance {:.0e}){}\n", worst, o.tolerance,
                     ok ? "" : " FAILED");
  return ok ? Success : NumericalError;
}

int cmd_figure(const std::string& id, const Common& c, std::ostream& out) {
  const FigurePreset& fig = figure_preset(id);
  const Format f = parse_format(c.format);
  const std::vector<double> grid = c.grid.empty() ? fig.grid : parse_grid(c.grid);

  std::vector<std::pair<std::string, Params>> curves;
  bool overridden_family = false;
  if (fig.family) {
    for (const std::string& a : c.params)
      if (a.substr(0, a.find('=')) == fig.family->key) overridden_family = true;
  }
  if (fig.family && !overridden_family) {
    const auto members = fig.members();
    for (std::size_t i = 0; i < members.size(); ++i)
      curves.emplace_back(family_suffix(*fig.family, fig.family->values[i]), apply_overrides(members[i], c));
  } else {
    curves.emplace_back("", apply_overrides(fig.members().front(), c));
  }

  const std::string stem = c.out.empty() ? "fig" + fig.id : c.out;
  if (fig.policy == BranchPolicy::Continuation) {
    for (const auto& [suffix, p] : curves)
      for (const auto& path : write_hysteresis(p, fig.axis, grid, f, stem + suffix, {{"figure", fig.id}}))
        out << path << '\n';
    return Success;
  }
  if (curves.size() == 1) {
    SweepConfig cfg = fig.sweep(curves.front().second);
    cfg.grid = grid;
    emit(records_text(run_sweep(cfg), f), c.out, out);
    return Success;
  }
  for (const auto& [suffix, p] : curves) {
    SweepConfig cfg = fig.sweep(p);
    cfg.grid = grid;
    const std::string path = stem + suffix + extension(f);
    write_file(path, records_text(run_sweep(cfg), f));
    out << path << '\n';
  }
  return Success;
}

struct PeaksArgs {
  std::string in = "-";
  std::string kind = "peak";
  std::string component = "re";
  int branch = 0;
};

int cmd_peaks(const PeaksArgs& a, const std::string& out_path, std::ostream& out) {
  std::vector<SpectrumRecord> records;
  if (a.in == "-") {
    records = read_records_csv(std::cin);
  } else {
    std::ifstream in(a.in);
    if (!in) throw Error(ErrorCode::BadConfig, fmt::format("cannot open '{}'", a.in));
    records = read_records_csv(in);
  }
  const ExtremumKind kind = a.kind == "dip" ? ExtremumKind::Dip : ExtremumKind::Peak;
  const Component comp = a.component == "im" ? Component::Im : a.component == "abs" ? Component::Abs : Component::Re;
  const auto extrema = locate_extrema(select_branch(records, a.branch), kind, comp);
  std::string text = "x,value\n";
  for (const Extremum& e : extrema) text += fmt::format("{},{}\n", format_number(e.x), format_number(e.value));
  emit(text, out_path, out);
  return Success;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum dot, cavity and phonon response simulator", "qdr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common steady_c, bist_c, spec_c, kerr_c, oracle_c, fig_c;
  BistabilityArgs bist;
  SpectrumArgs spec;
  SpectrumArgs kerr;
  kerr.axis = "delta_s0";
  kerr.observable = "kerr";
  OracleArgs oracle;
  PeaksArgs peaks;
  std::string peaks_out;
  std::string figure_id;

  auto* steady = app.add_subcommand("steady", "Steady-state branches and their stability");
  add_common(steady, steady_c);

  auto* bistability = app.add_subcommand("bistability", "Up/down continuation and turning points");
  add_common(bistability, bist_c);
  bistability->add_option("--axis", bist.axis, "ep0 or delta_p0")->check(CLI::IsMember({"ep0", "delta_p0"}));
  bistability->add_option("--traces", bist.traces, "Write up/down traces and metadata with this path stem");

  const auto add_spectrum = [](CLI::App* cmd, SpectrumArgs& s) {
    cmd->add_option("--axis", s.axis, "delta0, delta_s0, delta_p0, ep0 or g0");
    cmd->add_option("--observable", s.observable, "chi1, chi3, a_out_plus, t2, kerr, nonlin_abs or w0");
    cmd->add_option("--backend", s.backend, "linear or closed-form");
    cmd->add_option("--policy", s.policy, "all, stable or continuation");
    cmd->add_option("--disable-correction", s.disabled, "Evaluate a closed-form expression as printed");
    cmd->add_option("--threads", s.threads, "Worker threads (0: automatic)");
  };
  auto* spectrum = app.add_subcommand("spectrum", "Sweep an observable along one axis");
  add_common(spectrum, spec_c);
  add_spectrum(spectrum, spec);
  auto* kerr_cmd = app.add_subcommand("kerr", "Kerr coefficient against signal-exciton detuning");
  add_common(kerr_cmd, kerr_c);
  add_spectrum(kerr_cmd, kerr);

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare the sideband solve with time integration");
  add_common(oracle_cmd, oracle_c);
  oracle_cmd->add_option("--at", oracle.at, "Points on the preset axis (repeatable)");
  oracle_cmd->add_option("--relative-signal", oracle.relative_signal, "es0 / ep0 when es0 is not set");
  oracle_cmd->add_option("--tolerance", oracle.tolerance, "Pass threshold for the relative deviation");

  auto* figure = app.add_subcommand("figure", "Regenerate the data behind a figure");
  bool list_figures = false;
  figure->add_option("id", figure_id, "Figure id");
  figure->add_flag("--list", list_figures, "List the figure ids and titles");
  add_common(figure, fig_c, false);

  auto* peaks_cmd = app.add_subcommand("peaks", "Locate extrema in a record CSV");
  peaks_cmd->add_option("--in", peaks.in, "Record CSV (default: standard input)");
  peaks_cmd->add_option("--kind", peaks.kind, "peak or dip")->check(CLI::IsMember({"peak", "dip"}));
  peaks_cmd->add_option("--component", peaks.component, "re, im or abs")->check(CLI::IsMember({"re", "im", "abs"}));
  peaks_cmd->add_option("--branch", peaks.branch, "Branch id to analyse");
  peaks_cmd->add_option("--out", peaks_out, "Output path (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? Success : UsageError;
  }

  try {
    if (*steady) return cmd_steady(steady_c, out);
    if (*bistability) return cmd_bistability(bist_c, bist, out);
    if (*spectrum) return cmd_spectrum(spec_c, spec, out);
    if (*kerr_cmd) return cmd_spectrum(kerr_c, kerr, out);
    if (*oracle_cmd) return cmd_oracle_check(oracle_c, oracle, out);
    if (*figure) {
      if (list_figures) {
        for (const auto& id : figure_ids()) out << id << '\t' << figure_preset(id).title << '\n';
        return Success;
      }
      if (figure_id.empty()) throw Error(ErrorCode::BadConfig, "figure needs an id (see --list)");
      return cmd_figure(figure_id, fig_c, out);
    }
    if (*peaks_cmd) return cmd_peaks(peaks, peaks_out, out);
  } catch (const Error& e) {
    err << "qdr: " << e.what() << '\n';
    return is_numerical(e.code()) ? NumericalError : UsageError;
  } catch (const std::exception& e) {
    err << "qdr: " << e.what() << '\n';
    return UsageError;
  }
  return UsageError;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace qdr::cli
