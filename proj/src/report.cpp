#include "cocyclelab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cocyclelab::lab {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_report(const std::string& path, const Json& report, double wall_seconds) {
  write_text_file(path, report.dump(2) + "\n");
  Json meta;
  meta["report"] = path;
  meta["wall_seconds"] = wall_seconds;
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

namespace {

void render_value(const Json& v, const std::string& prefix, std::ostringstream& out) {
  if (v.is_object()) {
    for (const auto& [key, val] : v.items()) render_value(val, prefix + "." + key, out);
  } else if (v.is_array()) {
    if (v.size() > 12) {
      out << prefix << " = [" << v.size() << " entries]\n";
    } else {
      int i = 0;
      for (const auto& val : v) render_value(val, prefix + "[" + std::to_string(i++) + "]", out);
    }
  } else {
    out << prefix << " = " << v.dump() << "\n";
  }
}

}  // namespace

std::string render_report(const Json& report) {
  std::ostringstream out;
  for (const auto& [key, val] : report.items()) render_value(val, key, out);
  return out.str();
}

}  // namespace cocyclelab::lab
