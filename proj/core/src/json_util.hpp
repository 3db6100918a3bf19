#pragma once

// nlohmann/json helpers shared by the config and report code. Internal.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "krein/errors.hpp"
#include "krein/numerics.hpp"

namespace krein::detail {

using Json = nlohmann::ordered_json;

inline Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, std::string(what) + ": " + e.what());
  }
}

inline void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, std::string(where) + " must be a JSON object");
}

inline void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) fail(ErrorKind::InvalidArgument, "unknown key '" + item.key() + "' in " + std::string(where));
  }
}

inline double get_double(const Json& j, std::string_view key) {
  if (!j.is_number()) fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be a number");
  return j.get<double>();
}

inline long long get_int(const Json& j, std::string_view key) {
  if (!j.is_number_integer()) fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be an integer");
  return j.get<long long>();
}

inline std::uint64_t get_uint(const Json& j, std::string_view key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::string get_string(const Json& j, std::string_view key) {
  if (!j.is_string()) fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be a string");
  return j.get<std::string>();
}

inline Complex get_complex(const Json& j, std::string_view key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::InvalidArgument, "'" + std::string(key) + "' must be a number or [re, im]");
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// JSON has no inf/nan; they travel as strings.
inline Json real_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double real_from_json(const Json& j, std::string_view key) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  return get_double(j, key);
}

}  // namespace krein::detail
