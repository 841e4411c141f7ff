#include "csv.hpp"

#include <algorithm>
#include <cstdio>
#include <type_traits>

namespace pairchar::cli {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_integral_v<T>) {
    return std::to_string(*v);
  } else {
    return format_number(*v);
  }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const bool any_error =
      std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
  out << "metric,engine,p,p_bar,n_modes,eta,p_dc,value,std_error,cutoff,tail_mass";
  if (any_error) out << ",error";
  out << '\n';
  for (const auto& r : rows) {
    out << r.metric << ',' << r.engine << ',' << opt(r.p) << ',' << opt(r.p_bar) << ','
        << opt(r.n_modes) << ',' << opt(r.eta) << ',' << opt(r.p_dc) << ',' << opt(r.value)
        << ',' << opt(r.std_error) << ',' << opt(r.cutoff) << ',' << opt(r.tail_mass);
    if (any_error) out << ',' << csv_escape(r.error);
    out << '\n';
  }
}

}  // namespace pairchar::cli
