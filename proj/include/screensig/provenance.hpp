#pragma once

// Provenance records: every CLI run writes a JSON file next to its outputs
// with the fully resolved configuration, seeds, and content hashes, so a run
// is reproducible from the record alone. No timestamps; identical runs must
// produce identical records.

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "screensig/version.hpp"

namespace screensig {

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

inline nlohmann::json provenance_record(const std::string& command) {
  nlohmann::json j;
  j["format"] = "provv1";
  j["tool"] = "screensig";
  j["version"] = version_string;
  j["command"] = command;
  j["config"] = nlohmann::json::object();
  j["outputs"] = nlohmann::json::array();
  return j;
}

inline void write_provenance(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write provenance file: " + path);
  f << j.dump(2) << "\n";
}

} // namespace screensig
