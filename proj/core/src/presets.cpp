#include "qdr/presets.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "qdr/error.hpp"
#include "qdr/preset_text.hpp"

namespace qdr {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, std::string_view msg) {
  throw Error(ErrorCode::BadConfig, fmt::format("preset line {}: {}", line, msg));
}

void apply_words(FigurePreset& f, std::string_view value, std::vector<std::string>& keys, std::size_t line) {
  for (std::string_view w : words(value)) {
    const auto eq = w.find('=');
    if (eq == std::string_view::npos) fail(line, fmt::format("expected key=value, got '{}'", w));
    try {
      set_param(f.params, w.substr(0, eq), parse_double(w.substr(eq + 1)));
    } catch (const Error& e) {
      fail(line, e.what());
    }
    keys.emplace_back(w.substr(0, eq));
  }
}

void finish(FigurePreset& f, std::size_t line) {
  if (f.id.empty()) return;
  if (f.grid.empty()) fail(line, fmt::format("figure {} has no grid", f.id));
  try {
    for (const Params& p : f.members()) validate_params(p);
  } catch (const Error& e) {
    fail(line, fmt::format("figure {}: {}", f.id, e.what()));
  }
}

}  // namespace

std::vector<Params> FigurePreset::members() const {
  if (!family) return {params};
  std::vector<Params> out;
  for (double v : family->values) {
    Params p = params;
    set_param(p, family->key, v);
    out.push_back(p);
  }
  return out;
}

SweepConfig FigurePreset::sweep(const Params& p) const {
  SweepConfig cfg;
  cfg.base = p;
  cfg.axis = axis;
  cfg.grid = grid;
  cfg.observable = observable;
  cfg.policy = policy;
  return cfg;
}

std::vector<FigurePreset> parse_presets(std::string_view text) {
  std::vector<FigurePreset> out;
  FigurePreset current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  const auto flush = [&] {
    finish(current, line);
    if (!current.id.empty()) out.push_back(std::move(current));
    current = FigurePreset{};
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      flush();
      current.id = std::string(trim(s.substr(1, s.size() - 2)));
      if (current.id.empty()) fail(line, "empty figure id");
      if (std::any_of(out.begin(), out.end(), [&](const FigurePreset& f) { return f.id == current.id; }))
        fail(line, fmt::format("duplicate figure {}", current.id));
      continue;
    }
    if (current.id.empty()) fail(line, "entry outside a figure section");
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected 'name = value'");
    const std::string_view name = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    try {
      if (name == "title") {
        current.title = std::string(value);
      } else if (name == "params") {
        apply_words(current, value, current.caption_keys, line);
      } else if (name == "assumed") {
        apply_words(current, value, current.assumed_keys, line);
      } else if (name == "family") {
        auto w = words(value);
        ParamFamily fam;
        if (!w.empty() && w.back() == "ASSUMED") {
          fam.assumed = true;
          w.pop_back();
        }
        if (w.size() < 2) fail(line, "family needs a key and at least one value");
        fam.key = std::string(w.front());
        get_param(current.params, fam.key);
        for (std::size_t i = 1; i < w.size(); ++i) fam.values.push_back(parse_double(w[i]));
        current.family = std::move(fam);
      } else if (name == "axis") {
        current.axis = parse_axis(value);
      } else if (name == "grid") {
        current.grid = parse_grid(value);
        current.grid_text = std::string(value);
      } else if (name == "observable") {
        current.observable = parse_observable(value);
      } else if (name == "policy") {
        current.policy = parse_policy(value);
      } else {
        fail(line, fmt::format("unknown entry '{}'", name));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BadConfig) throw;
      fail(line, e.what());
    }
  }
  flush();
  return out;
}

const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> presets = parse_presets(detail::kPresetText);
  return presets;
}

const FigurePreset& figure_preset(std::string_view id) {
  const auto& all = figure_presets();
  const auto it = std::find_if(all.begin(), all.end(), [&](const FigurePreset& f) { return f.id == id; });
  if (it == all.end()) throw Error(ErrorCode::UnknownFigure, fmt::format("unknown figure '{}'", id));
  return *it;
}

std::vector<std::string> figure_ids() {
  std::vector<std::string> out;
  for (const FigurePreset& f : figure_presets()) out.push_back(f.id);
  return out;
}

std::string_view preset_table_text() noexcept { return detail::kPresetText; }

}  // namespace qdr
