#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "starslice/config.hpp"

namespace starslice {
namespace jsonu {

using nlohmann::json;

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

// strict schema: unknown keys are rejected with their location
inline void require_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(path + "/" + it.key(), "unknown key");
  }
}

inline const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double get_number(const json& j, const char* key,
                         const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) throw ConfigError(path + "/" + key, "missing required key");
  if (!v->is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v->get<double>();
}

inline double get_number_or(const json& j, const char* key, double fallback,
                            const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v->get<double>();
}

inline std::int64_t get_integer(const json& j, const char* key,
                                const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) throw ConfigError(path + "/" + key, "missing required key");
  if (!v->is_number_integer())
    throw ConfigError(path + "/" + key, "expected an integer");
  return v->get<std::int64_t>();
}

inline std::int64_t get_integer_or(const json& j, const char* key,
                                   std::int64_t fallback,
                                   const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer())
    throw ConfigError(path + "/" + key, "expected an integer");
  return v->get<std::int64_t>();
}

inline std::string get_string(const json& j, const char* key,
                              const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) throw ConfigError(path + "/" + key, "missing required key");
  if (!v->is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

inline std::string get_string_or(const json& j, const char* key,
                                 const std::string& fallback,
                                 const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

}  // namespace jsonu
}  // namespace starslice
