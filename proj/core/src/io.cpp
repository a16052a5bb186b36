#include "qdr/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qdr/error.hpp"
#include "qdr/model.hpp"

namespace qdr {
namespace {

constexpr std::string_view kHeader = "x,branch_id,w0,value_re,value_im,flags";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double read_number(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  return parse_double(text);
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw Error(ErrorCode::BadValue, fmt::format("unknown format '{}' (expected csv or json)", name));
}

std::string_view to_string(Format f) noexcept { return f == Format::Csv ? "csv" : "json"; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void write_records_csv(std::ostream& out, std::span<const SpectrumRecord> records) {
  out << kHeader << '\n';
  for (const SpectrumRecord& r : records) {
    out << format_number(r.x) << ',' << r.branch_id << ',' << format_number(r.w0) << ','
        << format_number(r.value_re) << ',' << format_number(r.value_im) << ',' << flags_to_string(r.flags) << '\n';
  }
}

void write_records_json(std::ostream& out, std::span<const SpectrumRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SpectrumRecord& r : records) {
    arr.push_back({{"x", json_number(r.x)},
                   {"branch_id", r.branch_id},
                   {"w0", json_number(r.w0)},
                   {"value_re", json_number(r.value_re)},
                   {"value_im", json_number(r.value_im)},
                   {"flags", flags_to_string(r.flags)}});
  }
  out << arr.dump(1) << '\n';
}

void write_records(std::ostream& out, std::span<const SpectrumRecord> records, Format format) {
  if (format == Format::Csv) write_records_csv(out, records);
  else write_records_json(out, records);
}

std::vector<SpectrumRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error(ErrorCode::BadValue, "missing record CSV header");
  std::vector<SpectrumRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) throw Error(ErrorCode::BadValue, fmt::format("row {}: expected 6 columns", row));
    SpectrumRecord r;
    r.x = read_number(cols[0]);
    const double id = parse_double(cols[1]);
    if (id != std::floor(id)) throw Error(ErrorCode::BadValue, fmt::format("row {}: branch_id not an integer", row));
    r.branch_id = static_cast<int>(id);
    r.w0 = read_number(cols[2]);
    r.value_re = read_number(cols[3]);
    r.value_im = read_number(cols[4]);
    r.flags = flags_from_string(cols[5]);
    out.push_back(r);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,w,re_sigma,im_sigma,re_a,im_a,q,qdot\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_number(traj.t[i]) << ',' << format_number(traj.w[i]) << ','
        << format_number(traj.sigma[i].real()) << ',' << format_number(traj.sigma[i].imag()) << ','
        << format_number(traj.a[i].real()) << ',' << format_number(traj.a[i].imag()) << ','
        << format_number(traj.q[i]) << ',' << format_number(traj.qdot[i]) << '\n';
  }
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::WriteFailure, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw Error(ErrorCode::WriteFailure, fmt::format("failed writing '{}'", path.string()));
}

}  // namespace qdr
