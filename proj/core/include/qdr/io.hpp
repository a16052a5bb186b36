#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdr/oracle.hpp"
#include "qdr/records.hpp"

namespace qdr {

enum class Format { Csv, Json };

Format parse_format(std::string_view name);
std::string_view to_string(Format f) noexcept;

/// Shortest round-trip decimal; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

/// Header x,branch_id,w0,value_re,value_im,flags followed by one row per record.
void write_records_csv(std::ostream& out, std::span<const SpectrumRecord> records);
/// Array of objects with the CSV field names. Non-finite values become null.
void write_records_json(std::ostream& out, std::span<const SpectrumRecord> records);
void write_records(std::ostream& out, std::span<const SpectrumRecord> records, Format format);

/// Throws BadValue on a malformed header or row.
std::vector<SpectrumRecord> read_records_csv(std::istream& in);

/// Columns t,w,re_sigma,im_sigma,re_a,im_a,q,qdot.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Throws WriteFailure when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace qdr
