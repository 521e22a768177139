#include "openmap/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "openmap/errors.hpp"

namespace openmap {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

ExperimentRecord& ExperimentRecord::set(std::string name, double value) {
  if (!std::isfinite(value)) {
    throw NumericalError("ExperimentRecord: field '" + name + "' is not finite");
  }
  for (auto& [key, v] : fields) {
    if (key == name) {
      v = value;
      return *this;
    }
  }
  fields.emplace_back(std::move(name), value);
  return *this;
}

ExperimentRecord& ExperimentRecord::flag(std::string name) {
  if (!has_flag(name)) flags.push_back(std::move(name));
  return *this;
}

bool ExperimentRecord::has(std::string_view name) const {
  return std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == name; });
}

bool ExperimentRecord::has_flag(std::string_view name) const {
  return std::find(flags.begin(), flags.end(), name) != flags.end();
}

double ExperimentRecord::get(std::string_view name) const {
  for (const auto& [key, v] : fields) {
    if (key == name) return v;
  }
  throw ValidationError("ExperimentRecord: no field named '" + std::string(name) + "'");
}

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  std::vector<std::string> columns;
  for (const auto& r : records) {
    for (const auto& f : r.fields) {
      if (std::find(columns.begin(), columns.end(), f.first) == columns.end()) columns.push_back(f.first);
    }
  }
  out << "experiment";
  for (const auto& c : columns) out << ',' << csv_escape(c);
  out << ",flags\n";
  for (const auto& r : records) {
    out << csv_escape(r.experiment);
    for (const auto& c : columns) {
      out << ',';
      if (r.has(c)) out << format_number(r.get(c));
    }
    std::string joined;
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      if (i) joined += ';';
      joined += r.flags[i];
    }
    out << ',' << csv_escape(joined) << '\n';
  }
}

void write_records_json(std::ostream& out, std::span<const ExperimentRecord> records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["experiment"] = r.experiment;
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.fields) fields[k] = v;
    obj["fields"] = fields;
    obj["flags"] = r.flags;
    arr.push_back(obj);
  }
  out << arr.dump(2) << '\n';
}

}  // namespace openmap
