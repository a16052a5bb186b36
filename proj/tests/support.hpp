#pragma once

#include <random>

#include "qdr/model.hpp"

namespace qdr::testing {

/// Uniformly drawn valid parameter point covering the ranges used by the presets.
inline Params random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  Params p;
  p.delta_p0 = in(-20.0, 20.0);
  p.delta_c0 = in(-20.0, 20.0);
  p.delta0 = in(-20.0, 20.0);
  p.g0 = in(0.0, 2.0);
  p.eta = in(0.0, 0.2);
  p.omega_k0 = in(1.0, 100.0);
  p.kappa_c0 = in(0.5, 3.0);
  p.gamma_q0 = in(0.05, 0.5);
  p.ep0 = in(0.0, 20.0);
  return p;
}

inline Params fig4_params(double eta) {
  Params p;
  p.ep0 = 3.15;
  p.g0 = 1.5;
  p.omega_k0 = 10.0;
  p.kappa_c0 = 1.35;
  p.eta = eta;
  return p;
}

inline Params fig2b_params() {
  Params p;
  p.delta_c0 = 0.8;
  p.delta_p0 = -8.0;
  p.g0 = 1.0;
  p.eta = 0.2;
  p.omega_k0 = 100.0;
  p.kappa_c0 = 1.35;
  return p;
}

}  // namespace qdr::testing
