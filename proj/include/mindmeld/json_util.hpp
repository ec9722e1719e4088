#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mindmeld/error.hpp"

namespace mindmeld {

/// Insertion-ordered JSON keeps serialized field order canonical.
using Json = nlohmann::ordered_json;

namespace json_util {

// Real values are written on a 1e-9 grid so golden files stay byte-stable.
inline double quantize(double value) {
  double q = std::round(value * 1e9) / 1e9;
  return q == 0.0 ? 0.0 : q;  // no "-0.0"
}

inline Json real(double value) { return Json(quantize(value)); }

inline void reject_unknown_keys(const Json& object, std::initializer_list<std::string_view> allowed,
                                std::string_view where, ErrorCode code) {
  if (!object.is_object()) {
    throw Error(code, std::string(where) + ": expected an object");
  }
  for (const auto& item : object.items()) {
    bool known = false;
    for (auto key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw Error(code, std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
  }
}

inline const Json& require(const Json& object, std::string_view key, std::string_view where,
                           ErrorCode code) {
  if (!object.is_object() || !object.contains(key)) {
    throw Error(code, std::string(where) + ": missing \"" + std::string(key) + "\"");
  }
  return object.at(std::string(key));
}

inline double require_number(const Json& object, std::string_view key, std::string_view where,
                             ErrorCode code) {
  const Json& value = require(object, key, where, code);
  if (!value.is_number()) {
    throw Error(code, std::string(where) + "." + std::string(key) + ": expected a number");
  }
  return value.get<double>();
}

inline std::int64_t require_integer(const Json& object, std::string_view key,
                                    std::string_view where, ErrorCode code) {
  const Json& value = require(object, key, where, code);
  if (!value.is_number_integer()) {
    throw Error(code, std::string(where) + "." + std::string(key) + ": expected an integer");
  }
  return value.get<std::int64_t>();
}

inline std::string require_string(const Json& object, std::string_view key,
                                  std::string_view where, ErrorCode code) {
  const Json& value = require(object, key, where, code);
  if (!value.is_string()) {
    throw Error(code, std::string(where) + "." + std::string(key) + ": expected a string");
  }
  return value.get<std::string>();
}

inline bool require_bool(const Json& object, std::string_view key, std::string_view where,
                         ErrorCode code) {
  const Json& value = require(object, key, where, code);
  if (!value.is_boolean()) {
    throw Error(code, std::string(where) + "." + std::string(key) + ": expected a boolean");
  }
  return value.get<bool>();
}

/// Parses text, mapping nlohmann's exception onto the given error code.
inline Json parse(std::string_view text, std::string_view where, ErrorCode code) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(code, std::string(where) + ": " + e.what());
  }
}

}  // namespace json_util
}  // namespace mindmeld
