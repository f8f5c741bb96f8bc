// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <limits>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sparsecue/error.hpp"

namespace sparsecue::detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

inline const json& require(const json& obj, std::string_view key, std::string_view what) {
  if (!obj.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string(what) + ": missing key '" + std::string(key) + "'");
  return *it;
}

// null decodes to NaN so that validation, not parsing, reports it.
inline double as_number(const json& v, const std::string& where) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline const json& as_array(const json& v, std::size_t expected, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  if (expected != 0 && v.size() != expected) {
    throw ParseError(where + ": expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(v.size()));
  }
  return v;
}

inline std::array<double, 2> as_pair(const json& v, const std::string& where) {
  as_array(v, 2, where);
  return {as_number(v[0], where), as_number(v[1], where)};
}

}  // namespace sparsecue::detail
