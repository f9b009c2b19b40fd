#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "txforest/value.hpp"

namespace txf {

struct Spec;
struct Expr;
struct Command;
using SpecPtr = std::shared_ptr<const Spec>;
using ExprPtr = std::shared_ptr<const Expr>;
using CmdPtr = std::shared_ptr<const Command>;

enum class Navigation { Down, Up, IntoPair, IntoComp, IntoOpt, Out, Next, Prev };

const char* navigation_name(Navigation n);

// Core specifications. Ref names a top-level declaration and is unfolded
// lazily during traversal, which is what makes recursive declarations work
// over unbounded filestores.
struct Spec {
  enum class Kind { File, Dir, Path, Pair, Comp, Opt, Pred, Ref };

  Kind kind;
  ExprPtr expr;     // Path, Comp, Pred
  SpecPtr s1;       // Path child, Pair first, Comp body, Opt child
  SpecPtr s2;       // Pair second
  std::string var;  // Pair binder (scopes over s2), Comp binder, Ref name

  static SpecPtr file();
  static SpecPtr dir();
  static SpecPtr path(ExprPtr e, SpecPtr s);
  static SpecPtr pair(std::string x, SpecPtr s1, SpecPtr s2);
  static SpecPtr comp(SpecPtr s, std::string x, ExprPtr e);
  static SpecPtr opt(SpecPtr s);
  static SpecPtr pred(ExprPtr e);
  static SpecPtr ref(std::string name);
};

// Expressions: literals, variables, builtin applications, and the Forest
// expressions that may read (never write) the filesystem.
struct Expr {
  enum class Kind {
    Lit,
    Var,
    Call,       // builtin application, dispatched by name
    FetchFile,
    FetchDir,
    FetchPath,
    FetchComp,
    FetchOpt,
    FetchPred,
    RunNav,     // args[0] evaluates to a Ctx; nav applied within it
    RunExpr,    // args[0] evaluates to a Ctx; args[1] evaluated within it
    Verify
  };

  Kind kind;
  Value lit;
  std::string name;  // Var name or builtin name
  std::vector<ExprPtr> args;
  Navigation nav = Navigation::Down;

  static ExprPtr lit_v(Value v);
  static ExprPtr str(std::string s);
  static ExprPtr integer(int64_t i);
  static ExprPtr boolean(bool b);
  static ExprPtr var(std::string name);
  static ExprPtr call(std::string name, std::vector<ExprPtr> args);
  static ExprPtr fetch(Kind fetch_kind);
  static ExprPtr run_nav(ExprPtr ctx, Navigation n);
  static ExprPtr run_expr(ExprPtr ctx, ExprPtr fexp);
  static ExprPtr verify();
};

// IMP commands plus the Forest navigations and updates.
struct Command {
  enum class Kind {
    Skip,
    Seq,
    Assign,
    If,
    While,
    Nav,
    StoreFile,
    StoreDir,
    CreatePath
  };

  Kind kind;
  CmdPtr c1, c2;    // Seq both; If then/else; While body in c1
  ExprPtr e;        // Assign, If, While, StoreFile, StoreDir
  std::string var;  // Assign target
  Navigation nav = Navigation::Down;

  static CmdPtr skip();
  static CmdPtr seq(CmdPtr a, CmdPtr b);
  static CmdPtr assign(std::string x, ExprPtr e);
  static CmdPtr if_(ExprPtr b, CmdPtr then_c, CmdPtr else_c);
  static CmdPtr while_(ExprPtr b, CmdPtr body);
  static CmdPtr navigate(Navigation n);
  static CmdPtr store_file(ExprPtr e);
  static CmdPtr store_dir(ExprPtr e);
  static CmdPtr create_path();

  bool is_skip() const { return kind == Kind::Skip; }
  bool is_forest() const {
    return kind == Kind::Nav || kind == Kind::StoreFile ||
           kind == Kind::StoreDir || kind == Kind::CreatePath;
  }
};

// Sequences a list of commands; empty list compiles to skip.
CmdPtr seq_all(const std::vector<CmdPtr>& cmds);

// Named top-level declarations, the target of Spec::Ref.
using SpecTable = std::map<std::string, SpecPtr>;

std::set<std::string> free_vars(const Expr& e);
std::set<std::string> free_vars(const Spec& s);

// Alpha-equivalence of core specs (Pair/Comp binders may differ).
bool alpha_eq(const Spec& a, const Spec& b);
bool expr_eq(const Expr& a, const Expr& b);

size_t spec_size(const Spec& s);

}  // namespace txf
