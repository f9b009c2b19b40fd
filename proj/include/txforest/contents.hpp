#pragma once

#include <cassert>
#include <set>
#include <string>
#include <utility>

namespace txf {

// A filesystem node: either a file holding an uninterpreted string, or a
// directory holding the set of its children's names. Child sets are kept
// sorted (std::set) so every serialization is deterministic.
class Contents {
 public:
  enum class Kind { File, Dir };

  static Contents file(std::string text) {
    Contents c;
    c.kind_ = Kind::File;
    c.text_ = std::move(text);
    return c;
  }

  static Contents dir(std::set<std::string> children) {
    Contents c;
    c.kind_ = Kind::Dir;
    c.children_ = std::move(children);
    return c;
  }

  static Contents empty_file() { return file(""); }
  static Contents empty_dir() { return dir({}); }

  Kind kind() const { return kind_; }
  bool is_file() const { return kind_ == Kind::File; }
  bool is_dir() const { return kind_ == Kind::Dir; }

  const std::string& text() const {
    assert(is_file());
    return text_;
  }

  const std::set<std::string>& children() const {
    assert(is_dir());
    return children_;
  }

  bool has_child(const std::string& name) const {
    return is_dir() && children_.count(name) > 0;
  }

  std::string to_string() const;

  friend bool operator==(const Contents& a, const Contents& b) {
    if (a.kind_ != b.kind_) return false;
    return a.is_file() ? a.text_ == b.text_ : a.children_ == b.children_;
  }
  friend bool operator!=(const Contents& a, const Contents& b) {
    return !(a == b);
  }

 private:
  Kind kind_ = Kind::File;
  std::string text_;
  std::set<std::string> children_;
};

}  // namespace txf
