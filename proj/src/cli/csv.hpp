#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pairchar::cli {

/// %.17g, enough digits to round-trip any double.
std::string format_number(double v);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_escape(const std::string& field);

struct SweepRow {
  std::string metric;
  std::string engine;
  std::optional<double> p;
  std::optional<double> p_bar;
  std::optional<int> n_modes;
  std::optional<double> eta;
  std::optional<double> p_dc;
  std::optional<double> value;
  std::optional<double> std_error;
  std::optional<double> cutoff;
  std::optional<double> tail_mass;
  std::string error;  // empty on success
};

/// Header metric,engine,p,p_bar,n_modes,eta,p_dc,value,std_error,cutoff,tail_mass
/// with a trailing error column only when some row failed.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace pairchar::cli
