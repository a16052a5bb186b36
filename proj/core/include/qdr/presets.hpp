#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdr/model.hpp"
#include "qdr/sweep.hpp"

namespace qdr {

/// One parameter varied across the curves of a figure.
struct ParamFamily {
  std::string key;
  std::vector<double> values;
  bool assumed = false;
};

struct FigurePreset {
  std::string id;
  std::string title;
  Params params;  ///< caption and assumed values; family members are applied by members()
  std::vector<std::string> caption_keys;
  std::vector<std::string> assumed_keys;
  std::optional<ParamFamily> family;
  SweepAxis axis = SweepAxis::Delta0;
  std::vector<double> grid;
  std::string grid_text;
  Observable observable = Observable::Chi1;
  BranchPolicy policy = BranchPolicy::StableOnly;

  /// Parameter sets of the curves, in family order.
  std::vector<Params> members() const;
  /// Sweep configuration for one curve.
  SweepConfig sweep(const Params& p) const;
};

/// Parses the preset table format; throws BadConfig with the offending line.
std::vector<FigurePreset> parse_presets(std::string_view text);

/// Presets shipped with the library, in table order.
const std::vector<FigurePreset>& figure_presets();
/// Throws UnknownFigure.
const FigurePreset& figure_preset(std::string_view id);
std::vector<std::string> figure_ids();

/// Raw text of the shipped preset table.
std::string_view preset_table_text() noexcept;

}  // namespace qdr
