#pragma once

#include <cassert>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "txforest/path.hpp"
#include "txforest/spec.hpp"
#include "txforest/value.hpp"

namespace txf {

// A zipper node: a spec together with the environment its variables were
// bound in (dependent pairs and comprehensions bind per node).
struct ZNode {
  Env env;
  SpecPtr spec;
};

// Huet-style cursor over a specification tree. Siblings are kept in shared
// cons lists, nearest-first, so sibling shifts and parent moves allocate a
// constant number of cells. Values are immutable handles; copies share
// structure.
class Zipper {
 public:
  static Zipper root(SpecPtr spec) { return root_node(ZNode{Env{}, std::move(spec)}); }

  static Zipper root_node(ZNode node) {
    auto rep = std::make_shared<Rep>();
    rep->cur = std::move(node);
    return Zipper(std::move(rep));
  }

  const ZNode& current() const { return rep_->cur; }
  bool has_parent() const { return rep_->parent != nullptr; }
  bool has_left() const { return rep_->left != nullptr; }
  bool has_right() const { return rep_->right != nullptr; }

  Zipper parent() const {
    assert(has_parent());
    return Zipper(rep_->parent);
  }

  // Replaces the focus node, leaving context untouched.
  Zipper with_current(ZNode node) const {
    auto rep = std::make_shared<Rep>(*rep_);
    rep->cur = std::move(node);
    return Zipper(std::move(rep));
  }

  // Builds the child level: this zipper becomes the parent, `cur` the focus,
  // `right` the remaining siblings in order (left starts empty).
  Zipper push_child(ZNode cur, const std::vector<ZNode>& right = {}) const {
    auto rep = std::make_shared<Rep>();
    rep->parent = rep_;
    rep->cur = std::move(cur);
    Cell::List r;
    for (auto it = right.rbegin(); it != right.rend(); ++it)
      r = Cell::cons(*it, r);
    rep->right = std::move(r);
    return Zipper(std::move(rep));
  }

  std::optional<Zipper> shift_right() const {
    if (!rep_->right) return std::nullopt;
    auto rep = std::make_shared<Rep>();
    rep->parent = rep_->parent;
    rep->left = Cell::cons(rep_->cur, rep_->left);
    rep->cur = rep_->right->head;
    rep->right = rep_->right->tail;
    return Zipper(std::move(rep));
  }

  std::optional<Zipper> shift_left() const {
    if (!rep_->left) return std::nullopt;
    auto rep = std::make_shared<Rep>();
    rep->parent = rep_->parent;
    rep->cur = rep_->left->head;
    rep->right = Cell::cons(rep_->cur, rep_->right);
    rep->left = rep_->left->tail;
    return Zipper(std::move(rep));
  }

  size_t left_count() const { return Cell::length(rep_->left); }
  size_t right_count() const { return Cell::length(rep_->right); }

  // Identity of the underlying cell, for sharing assertions in tests.
  const void* rep_id() const { return rep_.get(); }
  bool same_rep(const Zipper& other) const { return rep_ == other.rep_; }

 private:
  struct Cell {
    using List = std::shared_ptr<const Cell>;
    ZNode head;
    List tail;

    static List cons(ZNode h, List t) {
      auto c = std::make_shared<Cell>();
      c->head = std::move(h);
      c->tail = std::move(t);
      return c;
    }
    static size_t length(const List& l) {
      size_t n = 0;
      for (const Cell* c = l.get(); c; c = c->tail.get()) ++n;
      return n;
    }
  };

  struct Rep {
    std::shared_ptr<const Rep> parent;
    Cell::List left;   // nearest sibling first
    ZNode cur;
    Cell::List right;  // nearest sibling first
  };

  explicit Zipper(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

  std::shared_ptr<const Rep> rep_;
};

// One transaction's navigation state.
struct LocalContext {
  Env env;
  Path path;
  Zipper zipper;
};

// Unwinds to the root zipper. Every unwound level whose parent focuses a
// Path spec pops one path component, mirroring the up rule, so the result
// path is the path the program started at.
std::pair<Path, Zipper> goto_root(const Path& p, const Zipper& z);

}  // namespace txf
