#include "ircr/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "ircr/errors.hpp"

namespace ircr {

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_number(const std::optional<double>& v) {
  return v ? csv_number(*v) : std::string();
}

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double json_to_double(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
  }
  throw InputError(field + " must be a number or \"inf\"");
}

double parse_double(const std::string& text, const std::string& field) {
  if (text == "inf" || text == "+inf") return INFINITY;
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InputError(field + ": '" + text + "' is not a number");
  }
  return v;
}

nlohmann::json RunManifest::to_json() const {
  return {{"subcommand", subcommand},
          {"config", config},
          {"version", version},
          {"seed", seed},
          {"timestamp", timestamp}};
}

RunManifest make_manifest(const std::string& subcommand, nlohmann::json config,
                          std::uint64_t seed) {
  RunManifest m;
  m.subcommand = subcommand;
  m.config = std::move(config);
  m.seed = seed;
  m.timestamp = utc_timestamp();
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("out: cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InputError("out: failed writing '" + path + "'");
}

}  // namespace ircr
