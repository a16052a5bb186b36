#pragma once

#include <complex>

#include "qdr/model.hpp"
#include "qdr/oracle.hpp"
#include "qdr/steady.hpp"

namespace qdr {

MeanFieldState state_from_branch(const SteadyBranch& b) noexcept;

struct OracleRunOptions {
  int n_periods = 20;             ///< beat periods per demodulation window
  double settle_tolerance = 1e-10; ///< DC drift between consecutive windows
  double max_time = 20000.0;
  int step_refinement = 1;        ///< divides the commensurate step
};

struct OracleSidebands {
  Demodulated demod;
  double signal = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
};

/// Integrates from the ground state with pump and signal on, window by window,
/// until the DC content stops drifting, then demodulates the final window.
OracleSidebands run_oracle_sidebands(const Params& p, double signal, const OracleRunOptions& opts = {});

struct OracleComparison {
  std::complex<double> a_plus_oracle;  ///< per unit signal
  std::complex<double> a_plus_linear;  ///< per unit signal
  double relative_deviation = 0.0;
  double linearity_ratio = 0.0;        ///< |a+(2 Es)| / |a+(Es)|
  double dc_deviation = 0.0;           ///< against the stable steady branch
  double explained_energy = 0.0;
  double branch_w0 = 0.0;
};

/// Compares the time-domain signal sideband with the linear solve at a
/// monostable point. Throws BadConfig when the point is not monostable.
OracleComparison compare_with_oracle(const Params& p, const OracleRunOptions& opts = {});

}  // namespace qdr
