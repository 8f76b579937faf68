#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace cocyclelab::lab {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& text);

/// %.17g rendering used in CSV artifacts for bit-stable reruns.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Writes report JSON (byte-stable) plus a sidecar .meta.json holding the
/// wall clock, which is excluded from determinism checks.
void write_report(const std::string& path, const Json& report, double wall_seconds);

/// Render a report JSON as an indented key/value table.
std::string render_report(const Json& report);

}  // namespace cocyclelab::lab
