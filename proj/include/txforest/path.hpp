#pragma once

#include <cassert>
#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace txf {

// A filestore path: a sequence of non-empty component names. The root is the
// empty sequence; its textual form is "/". Components never contain '/'.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<std::string> components)
      : components_(std::move(components)) {}

  static bool valid_component(const std::string& name) {
    return !name.empty() && name.find('/') == std::string::npos;
  }

  // Parses "/a/b" (leading slash optional). Empty components are rejected.
  static std::optional<Path> parse(const std::string& text);

  bool is_root() const { return components_.empty(); }
  size_t depth() const { return components_.size(); }

  const std::vector<std::string>& components() const { return components_; }

  // Last component. Precondition: not root.
  const std::string& name() const {
    assert(!is_root());
    return components_.back();
  }

  // Parent path; pop on the root is a model error, hence the optional.
  std::optional<Path> parent() const {
    if (is_root()) return std::nullopt;
    return Path(std::vector<std::string>(components_.begin(),
                                         components_.end() - 1));
  }

  Path child(const std::string& name) const {
    assert(valid_component(name));
    std::vector<std::string> cs = components_;
    cs.push_back(name);
    return Path(std::move(cs));
  }

  Path operator/(const std::string& name) const { return child(name); }

  // True iff this is an ancestor of `other` or equal to it.
  bool is_prefix_of(const Path& other) const {
    if (components_.size() > other.components_.size()) return false;
    for (size_t i = 0; i < components_.size(); ++i) {
      if (components_[i] != other.components_[i]) return false;
    }
    return true;
  }

  // Either path is an ancestor-or-equal of the other.
  bool prefix_related(const Path& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  std::string to_string() const;

  auto operator<=>(const Path&) const = default;

 private:
  std::vector<std::string> components_;
};

inline Path root_path() { return Path{}; }

}  // namespace txf
