#pragma once

#include <string>
#include <utility>
#include <variant>

namespace txf {

// A named side-condition violation. The evaluator is partial: when no
// semantic rule applies, the outcome is Undefined carrying the code of the
// rule that failed (e.g. "UpAtRoot", "EmptyComprehension").
struct Undefined {
  std::string code;
  std::string detail;

  std::string to_string() const {
    return detail.empty() ? code : code + ": " + detail;
  }
};

inline Undefined undefined(std::string code, std::string detail = "") {
  return Undefined{std::move(code), std::move(detail)};
}

// Minimal expected-style result. No exceptions cross the library API.
template <typename T>
class Result {
 public:
  Result(T value) : rep_(std::move(value)) {}
  Result(Undefined err) : rep_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(rep_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(rep_); }
  T& value() & { return std::get<T>(rep_); }
  T&& take() && { return std::get<T>(std::move(rep_)); }

  const Undefined& error() const { return std::get<Undefined>(rep_); }

  const T* operator->() const { return &std::get<T>(rep_); }
  const T& operator*() const { return std::get<T>(rep_); }

 private:
  std::variant<T, Undefined> rep_;
};

// Propagation helper: runs `expr`, returns its error from the enclosing
// function, otherwise binds the unwrapped value.
#define TXF_TRY(var, expr)                    \
  auto var##_res = (expr);                    \
  if (!var##_res.ok()) return var##_res.error(); \
  auto var = std::move(var##_res).take()

}  // namespace txf
