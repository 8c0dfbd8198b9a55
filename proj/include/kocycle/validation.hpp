#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kocycle {

struct Violation {
  std::string kind;     // machine-readable class, e.g. "no_sources"
  std::string message;  // human-readable detail naming the offending data
};

/// Outcome of a structural check. An empty violation list means valid;
/// notes carry non-fatal remarks (e.g. vacuous conditions at low rank).
struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
  void add(std::string kind, std::string message);
  void note(std::string text);
  void merge(const ValidationReport& other);

  nlohmann::json to_json() const;
};

}  // namespace kocycle
