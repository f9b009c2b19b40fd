#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "txforest/result.hpp"
#include "txforest/spec.hpp"

namespace txf {

struct SurfaceSpec;
using SurfacePtr = std::shared_ptr<const SurfaceSpec>;

// Surface specification terms as written in .txf files.
struct SurfaceSpec {
  enum class Kind { File, Named, PathLit, Directory, Comp, Opt, Where };

  Kind kind;
  int line = 0, col = 0;
  std::string name;  // Named reference; Comp binder
  std::string lit;   // PathLit literal
  std::vector<std::pair<std::string, SurfacePtr>> entries;  // Directory
  SurfacePtr child;  // PathLit/Comp/Opt/Where body
  ExprPtr expr;      // Where predicate; Comp general source
  bool comp_is_matches = false;
  std::string comp_regex;
};

struct SurfaceDecl {
  std::string name;
  SurfacePtr body;
  int line = 0, col = 0;
};

// Parses a .txf file: `name = spec` declarations, `#` line comments.
// Errors carry line:column in the detail.
Result<std::vector<SurfaceDecl>> parse_decls(const std::string& text);

// Compiles surface declarations to core specs. Directories become
// right-nested dependent pairs; regex comprehensions pair a fresh dir
// binding with a filtered fetch; `t where e` binds the checked component as
// `this` for the predicate. Named references stay Refs, unfolded lazily at
// traversal.
Result<SpecTable> compile(const std::vector<SurfaceDecl>& decls);

Result<SpecTable> compile_text(const std::string& text);

// Standalone expression / command parsers (shell scripts, scenario files).
Result<ExprPtr> parse_expr_text(const std::string& text);
Result<CmdPtr> parse_command_text(const std::string& text);

}  // namespace txf
