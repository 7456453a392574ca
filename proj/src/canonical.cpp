#include "curvecast/canonical.hpp"

#include <cstdint>
#include <cstdio>

namespace curvecast {

namespace {

void append_double(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // collapse -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

void append_indent(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void dump(const nlohmann::json& value, std::string& out, int depth) {
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, child] : value.items()) {
        append_indent(out, depth + 1);
        out += nlohmann::json(key).dump();
        out += ": ";
        dump(child, out, depth + 1);
        if (++i != value.size()) out += ',';
        out += '\n';
      }
      append_indent(out, depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        append_indent(out, depth + 1);
        dump(value[i], out, depth + 1);
        if (i + 1 != value.size()) out += ',';
        out += '\n';
      }
      append_indent(out, depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      append_double(out, value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  dump(value, out, 0);
  out += '\n';
  return out;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace curvecast
