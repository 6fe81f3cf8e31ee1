#pragma once

// Number formatting for CSV and JSON outputs and the run manifest attached
// to every emitted data file.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace ircr {

inline constexpr const char* kToolVersion = "0.1.0";

// 12 significant digits; "inf" / "-inf" for infinities.
std::string csv_number(double v);
// Empty field when absent.
std::string csv_number(const std::optional<double>& v);

// Finite values as JSON numbers; infinities as the strings "inf" / "-inf".
nlohmann::json json_number(double v);

// Reads a number or the string "inf"; throws InputError naming `field`.
double json_to_double(const nlohmann::json& j, const std::string& field);

// Parses a command-line number; accepts "inf". Throws InputError naming
// `field`.
double parse_double(const std::string& text, const std::string& field);

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // fully resolved, defaults included
  std::string version = kToolVersion;
  std::uint64_t seed = 0;
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::json to_json() const;
};

RunManifest make_manifest(const std::string& subcommand, nlohmann::json config,
                          std::uint64_t seed);

std::string utc_timestamp();

// Writes `text` to `path`; throws InputError if the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ircr
