#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdr/model.hpp"
#include "qdr/records.hpp"
#include "qdr/response.hpp"

namespace qdr {

enum class SweepAxis { Delta0, DeltaS0, DeltaP0, Ep0, G0 };
enum class Observable { Chi1, Chi3, AOutPlus, T2, Kerr, NonlinAbs, W0 };
enum class BranchPolicy { AllBranches, StableOnly, Continuation };

std::string_view to_string(SweepAxis a) noexcept;
std::string_view to_string(Observable o) noexcept;
std::string_view to_string(BranchPolicy b) noexcept;
SweepAxis parse_axis(std::string_view name);
Observable parse_observable(std::string_view name);
BranchPolicy parse_policy(std::string_view name);
Backend parse_backend(std::string_view name);

/// Sets the swept quantity. DeltaS0 is converted to delta0 with the current delta_p0.
Params with_sweep_value(Params p, SweepAxis axis, double x) noexcept;

struct SweepConfig {
  Params base;
  SweepAxis axis = SweepAxis::Delta0;
  std::vector<double> grid;
  Observable observable = Observable::Chi1;
  Backend backend = Backend::LinearSolve;
  BranchPolicy policy = BranchPolicy::StableOnly;
  ClosedFormCorrections corrections = ClosedFormCorrections::all();
  unsigned threads = 0;  ///< 0: hardware concurrency, capped by QDR_THREADS
};

/// Throws InvalidGrid or a parameter error for configurations that cannot run.
void validate_sweep(const SweepConfig& cfg);

/// Evaluates the observable along the grid. Records follow grid order, then
/// branch order; points that fail are kept and flagged.
std::vector<SpectrumRecord> run_sweep(const SweepConfig& cfg);

/// Worker count used by run_sweep for a requested count (0 = automatic).
unsigned sweep_threads(unsigned requested) noexcept;

enum class ExtremumKind { Peak, Dip };
enum class Component { Re, Im, Abs };

struct Extremum {
  double x = 0.0;
  double value = 0.0;
  std::size_t index = 0;  ///< grid sample nearest the refined location
};

/// Interior local extrema of a single-branch stream, refined by a parabola
/// through each extremal sample and its neighbours. Flagged or non-finite
/// samples break the stream.
std::vector<Extremum> locate_extrema(std::span<const SpectrumRecord> records, ExtremumKind kind,
                                     Component component = Component::Re);

/// Records of one branch id, in stream order.
std::vector<SpectrumRecord> select_branch(std::span<const SpectrumRecord> records, int branch_id);

std::vector<double> linspace(double start, double stop, std::size_t points);
/// Parses "start:stop:points".
std::vector<double> parse_grid(std::string_view text);

}  // namespace qdr
