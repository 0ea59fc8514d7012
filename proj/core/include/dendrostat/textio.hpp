#pragma once

#include <string>
#include <vector>

namespace dendrostat {

/// Shortest decimal string that round-trips to the same double. All CSV and
/// JSON emitters use this so that rerun outputs are byte-identical and
/// re-parsing recovers bit-equal values.
std::string fmt_double(double v);

/// Fixed significant-digit formatting for plot coordinates and labels.
std::string fmt_double(double v, int significant);

/// Splits one CSV line on commas; no quoting support (the panel format does
/// not use it). Cells are whitespace-trimmed.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

}  // namespace dendrostat
