#pragma once

// Strict reading of JSON values with path-bearing error collection.

#include <cmath>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlsl/scaled.hpp"

namespace nlsl::detail {

using json = nlohmann::json;

class JsonReader {
 public:
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back((path.empty() ? "." : path) + ": " + msg); }

  // Object with only the listed keys.
  bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) fail(path + "." + k, "unknown field");
    }
    return true;
  }

  std::optional<double> number(const json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    return j.get<long long>();
  }

  std::optional<bool> boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) {
      fail(path, "expected true or false");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  std::optional<std::string> string(const json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  // Complex numbers are [re, im] pairs, never bare numbers.
  std::optional<cplx> complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      fail(path, "expected a complex number as [re, im]");
      return std::nullopt;
    }
    const cplx z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return z;
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto v = number(j[i], path + "[" + std::to_string(i) + "]");
      if (v) out.push_back(*v);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<cplx>> complexes(const json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array of [re, im] pairs");
      return std::nullopt;
    }
    std::vector<cplx> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto v = complex(j[i], path + "[" + std::to_string(i) + "]");
      if (v) out.push_back(*v);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  // Optional member; reads into target when present and valid.
  template <class F>
  void member(const json& obj, std::string_view key, const std::string& path, F&& read) {
    if (obj.is_object() && obj.contains(key)) read(obj.at(std::string(key)), path + "." + std::string(key));
  }

  template <class F>
  void required(const json& obj, std::string_view key, const std::string& path, F&& read) {
    if (obj.is_object() && obj.contains(key))
      read(obj.at(std::string(key)), path + "." + std::string(key));
    else
      fail(path + "." + std::string(key), "required field missing");
  }
};

}  // namespace nlsl::detail
