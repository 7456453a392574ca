#ifndef CURVECAST_CANONICAL_HPP
#define CURVECAST_CANONICAL_HPP

#include <string>
#include <string_view>

#include <json.hpp>

namespace curvecast {

/// Serializes JSON with a fixed byte layout: object keys sorted, two-space
/// indentation, floating-point numbers rendered with 12 significant
/// digits. Identical values always produce identical bytes.
std::string canonical_dump(const nlohmann::json& value);

/// 64-bit FNV-1a digest as "fnv1a64:" + 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace curvecast

#endif
