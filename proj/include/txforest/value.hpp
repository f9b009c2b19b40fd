#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace txf {

struct LocalContext;
using CtxPtr = std::shared_ptr<const LocalContext>;

// Expression values. Ctx values arise only from dependent-pair bindings; two
// Ctx values compare equal only when they are the same object.
class Value {
 public:
  enum class Kind { String, Int, Bool, StrList, StrSet, Ctx };

  Value() : rep_(std::string()) {}

  static Value str(std::string s) { return Value(Rep(std::move(s))); }
  static Value integer(int64_t i) { return Value(Rep(i)); }
  static Value boolean(bool b) { return Value(Rep(b)); }
  static Value list(std::vector<std::string> v) { return Value(Rep(std::move(v))); }
  static Value set(std::set<std::string> s) { return Value(Rep(std::move(s))); }
  static Value ctx(CtxPtr c) { return Value(Rep(std::move(c))); }

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  bool is_string() const { return kind() == Kind::String; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_list() const { return kind() == Kind::StrList; }
  bool is_set() const { return kind() == Kind::StrSet; }
  bool is_ctx() const { return kind() == Kind::Ctx; }

  const std::string& as_string() const { return std::get<std::string>(rep_); }
  int64_t as_int() const { return std::get<int64_t>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  const std::vector<std::string>& as_list() const {
    return std::get<std::vector<std::string>>(rep_);
  }
  const std::set<std::string>& as_set() const {
    return std::get<std::set<std::string>>(rep_);
  }
  const CtxPtr& as_ctx() const { return std::get<CtxPtr>(rep_); }

  // Collection view in canonical order: sets come out sorted, lists keep
  // their order. Only valid for StrList/StrSet.
  std::vector<std::string> as_ordered_elems() const {
    if (is_list()) return as_list();
    return std::vector<std::string>(as_set().begin(), as_set().end());
  }

  static const char* kind_name(Kind k);
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.rep_ == b.rep_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  using Rep = std::variant<std::string, int64_t, bool,
                           std::vector<std::string>, std::set<std::string>,
                           CtxPtr>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// Immutable variable environment with structural sharing: binding allocates
// one node and shares the tail, which keeps per-child comprehension
// environments cheap.
class Env {
 public:
  Env() = default;

  Env bind(std::string var, Value val) const {
    auto node = std::make_shared<Node>();
    node->var = std::move(var);
    node->val = std::move(val);
    node->next = head_;
    Env out;
    out.head_ = std::move(node);
    return out;
  }

  const Value* lookup(const std::string& var) const {
    for (const Node* n = head_.get(); n; n = n->next.get())
      if (n->var == var) return &n->val;
    return nullptr;
  }

  bool empty() const { return head_ == nullptr; }

  // Flattened view respecting shadowing (innermost binding wins).
  std::map<std::string, Value> to_map() const {
    std::map<std::string, Value> out;
    for (const Node* n = head_.get(); n; n = n->next.get())
      out.emplace(n->var, n->val);
    return out;
  }

 private:
  struct Node {
    std::string var;
    Value val;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
};

}  // namespace txf
