#include "qdr/model.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qdr/error.hpp"

namespace qdr {
namespace {

constexpr std::array<std::string_view, 11> kKeys = {
    "delta_p0", "delta_c0", "delta0", "g0",  "eta",          "omega_k0",
    "kappa_c0", "gamma_q0", "ep0",    "es0", "gamma1_ratio",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Params validate_params(const Params& raw) {
  const auto check_finite = [](std::string_view name, double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, fmt::format("{} = {}", name, v));
  };
  for (const auto key : kKeys) {
    if (key == "es0" && !raw.es0) continue;
    check_finite(key, get_param(raw, key));
  }

  const auto check_rate = [](std::string_view name, double v) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveRate, fmt::format("{} = {} must be > 0", name, v));
  };
  check_rate("kappa_c0", raw.kappa_c0);
  check_rate("gamma_q0", raw.gamma_q0);
  check_rate("omega_k0", raw.omega_k0);
  check_rate("gamma1_ratio", raw.gamma1_ratio);

  const auto check_amplitude = [](std::string_view name, double v) {
    if (v < 0.0) throw Error(ErrorCode::NegativeAmplitude, fmt::format("{} = {} must be >= 0", name, v));
  };
  check_amplitude("g0", raw.g0);
  check_amplitude("eta", raw.eta);
  check_amplitude("ep0", raw.ep0);
  if (raw.es0) check_amplitude("es0", *raw.es0);
  return raw;
}

double signal_amplitude(const Params& p) noexcept { return p.es0.value_or(1e-3 * p.ep0); }

std::span<const std::string_view> param_keys() noexcept { return kKeys; }

void set_param(Params& p, std::string_view key, double value) {
  if (key == "delta_p0") p.delta_p0 = value;
  else if (key == "delta_c0") p.delta_c0 = value;
  else if (key == "delta0") p.delta0 = value;
  else if (key == "g0") p.g0 = value;
  else if (key == "eta") p.eta = value;
  else if (key == "omega_k0") p.omega_k0 = value;
  else if (key == "kappa_c0") p.kappa_c0 = value;
  else if (key == "gamma_q0") p.gamma_q0 = value;
  else if (key == "ep0") p.ep0 = value;
  else if (key == "es0") p.es0 = value;
  else if (key == "gamma1_ratio") p.gamma1_ratio = value;
  else throw Error(ErrorCode::UnknownKey, fmt::format("unknown parameter '{}'", key));
}

double get_param(const Params& p, std::string_view key) {
  if (key == "delta_p0") return p.delta_p0;
  if (key == "delta_c0") return p.delta_c0;
  if (key == "delta0") return p.delta0;
  if (key == "g0") return p.g0;
  if (key == "eta") return p.eta;
  if (key == "omega_k0") return p.omega_k0;
  if (key == "kappa_c0") return p.kappa_c0;
  if (key == "gamma_q0") return p.gamma_q0;
  if (key == "ep0") return p.ep0;
  if (key == "es0") return signal_amplitude(p);
  if (key == "gamma1_ratio") return p.gamma1_ratio;
  throw Error(ErrorCode::UnknownKey, fmt::format("unknown parameter '{}'", key));
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw Error(ErrorCode::BadValue, fmt::format("not a number: '{}'", text));
  return value;
}

void apply_assignment(Params& p, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorCode::BadValue, fmt::format("expected key=value, got '{}'", assignment));
  set_param(p, trim(assignment.substr(0, eq)), parse_double(assignment.substr(eq + 1)));
}

Params parse_params(std::string_view text, Params base) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) apply_assignment(base, line);
    pos = nl + 1;
  }
  return base;
}

Params load_params_file(const std::filesystem::path& path, Params base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, fmt::format("cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_params(buffer.str(), base);
}

std::string format_params(const Params& p) {
  std::string out;
  for (const auto key : kKeys) {
    if (key == "es0" && !p.es0) continue;
    out += fmt::format("{}={}\n", key, get_param(p, key));
  }
  return out;
}

}  // namespace qdr
