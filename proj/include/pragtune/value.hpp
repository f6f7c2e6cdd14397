#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "json.hpp"
#include "pragtune/errors.hpp"

namespace pragtune {

// A directive parameter value: an integer factor or a symbolic mode token.
class Value {
 public:
  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::string t) : v_(std::move(t)) {}
  Value(const char* t) : v_(std::string(t)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }

  std::int64_t as_int() const {
    if (!is_int()) throw Error("value '" + as_token() + "' is not an integer");
    return std::get<std::int64_t>(v_);
  }

  const std::string& as_token() const {
    if (is_int()) throw Error("integer value used where a token was expected");
    return std::get<std::string>(v_);
  }

  // Rendering form, as substituted into kernel source.
  std::string text() const {
    return is_int() ? std::to_string(std::get<std::int64_t>(v_)) : std::get<std::string>(v_);
  }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  std::variant<std::int64_t, std::string> v_;
};

inline void to_json(nlohmann::json& j, const Value& v) {
  if (v.is_int())
    j = v.as_int();
  else
    j = v.as_token();
}

inline void from_json(const nlohmann::json& j, Value& v) {
  if (j.is_number_integer())
    v = Value(j.get<std::int64_t>());
  else if (j.is_string())
    v = Value(j.get<std::string>());
  else
    throw Error("parameter value must be an integer or a string token");
}

}  // namespace pragtune
