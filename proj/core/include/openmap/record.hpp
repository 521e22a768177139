#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace openmap {

/// One row of experiment output: named numeric fields in insertion order plus
/// free-form flags (e.g. "degenerate_fit"). Field values must be finite.
struct ExperimentRecord {
  std::string experiment;
  std::vector<std::pair<std::string, double>> fields;
  std::vector<std::string> flags;

  ExperimentRecord() = default;
  explicit ExperimentRecord(std::string id) : experiment(std::move(id)) {}

  ExperimentRecord& set(std::string name, double value);
  ExperimentRecord& flag(std::string name);
  bool has(std::string_view name) const;
  bool has_flag(std::string_view name) const;
  double get(std::string_view name) const;
};

/// CSV with header "experiment,<union of field names>,flags". Missing fields
/// are left empty; numbers use 17 significant digits.
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);

/// JSON array of {"experiment", "fields": {...}, "flags": [...]}.
void write_records_json(std::ostream& out, std::span<const ExperimentRecord> records);

}  // namespace openmap
