#include "kocycle/validation.hpp"

namespace kocycle {

void ValidationReport::add(std::string kind, std::string message) {
  violations.push_back({std::move(kind), std::move(message)});
}

void ValidationReport::note(std::string text) {
  notes.push_back(std::move(text));
}

void ValidationReport::merge(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(),
                    other.violations.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : violations) {
    vs.push_back({{"kind", v.kind}, {"message", v.message}});
  }
  return {{"ok", ok()}, {"violations", vs}, {"notes", notes}};
}

}  // namespace kocycle
