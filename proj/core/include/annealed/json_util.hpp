#pragma once

#include <string>
#include <vector>

#include "annealed/errors.hpp"
#include "json.hpp"

namespace annealed::json_util {

inline const nlohmann::json& field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_object()) throw SchemaError("", "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(key, "missing required field");
  return *it;
}

inline double number(const nlohmann::json& j, const std::string& key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw SchemaError(key, "expected a number");
  return v.get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j, key);
}

inline long long integer(const nlohmann::json& j, const std::string& key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw SchemaError(key, "expected an integer");
  return v.get<long long>();
}

inline long long integer_or(const nlohmann::json& j, const std::string& key, long long fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return integer(j, key);
}

inline std::string string(const nlohmann::json& j, const std::string& key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw SchemaError(key, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers(const nlohmann::json& j, const std::string& key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw SchemaError(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline void require(bool ok, const std::string& key, const std::string& detail) {
  if (!ok) throw SchemaError(key, detail);
}

}  // namespace annealed::json_util
