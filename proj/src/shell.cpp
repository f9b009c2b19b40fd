#include "txforest/shell.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "txforest/pretty.hpp"
#include "txforest/surface.hpp"

namespace txf {

const std::vector<ShellCommandInfo>& shell_command_table() {
  static const std::vector<ShellCommandInfo> table = {
      {"session", "GlobalStore::begin", true},
      {"use", "session switch", true},
      {"down", "Engine::exec_nav(Down)", false},
      {"up", "Engine::exec_nav(Up)", false},
      {"into", "Engine::exec_nav(Into* by focus)", false},
      {"out", "Engine::exec_nav(Out)", false},
      {"next", "Engine::exec_nav(Next)", false},
      {"prev", "Engine::exec_nav(Prev)", false},
      {"fetch", "Engine::fetch_here", false},
      {"store_file", "Engine::exec_update(StoreFile)", true},
      {"store_dir", "Engine::exec_update(StoreDir)", true},
      {"create_path", "Engine::exec_update(CreatePath)", false},
      {"verify", "consistency::pconsistent", false},
      {"log", "TxnCtx::log", false},
      {"commit", "GlobalStore::try_commit", false},
      {"abort", "snapshot discard", false},
      {"fs", "to_snapshot_text", false},
      {"goto", "Engine::goto_label", true},
      {"goto_name", "Engine::goto_name", true},
      {"sessions", "session list", false},
      {"help", "help text", false},
      {"quit", "exit", false},
  };
  return table;
}

Shell::Shell(Engine eng, SpecPtr spec, Path start_path,
             std::shared_ptr<GlobalStore> store)
    : eng_(eng),
      spec_(std::move(spec)),
      start_path_(std::move(start_path)),
      store_(std::move(store)) {
  new_session("main");
  active_ = "main";
}

std::string Shell::new_session(const std::string& name) {
  auto [snapshot, start] = store_->begin();
  Session s;
  s.start = start;
  s.ctx = std::make_unique<TxnCtx>(eng_, spec_, start_path_,
                                   std::move(snapshot));
  s.ctx->seed_pathset(start_path_);
  sessions_[name] = std::move(s);
  active_ = name;
  return "session " + name + " started";
}

Shell::Session& Shell::current() { return sessions_.at(active_); }

void Shell::reset_session(Session& s) {
  auto [snapshot, start] = store_->begin();
  s.start = start;
  s.ctx = std::make_unique<TxnCtx>(eng_, spec_, start_path_,
                                   std::move(snapshot));
  s.ctx->seed_pathset(start_path_);
}

int Shell::exit_code() const {
  if (saw_op_error_) return 2;
  if (saw_conflict_) return 1;
  return 0;
}

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string describe_focus(const Engine& eng, const TxnCtx& ctx) {
  auto zr = eng.resolve_focus(ctx.lctx().zipper);
  std::string kind = "?";
  if (zr.ok()) {
    switch (zr.value().current().spec->kind) {
      case Spec::Kind::File: kind = "file"; break;
      case Spec::Kind::Dir: kind = "dir"; break;
      case Spec::Kind::Path: kind = "path"; break;
      case Spec::Kind::Pair: kind = "pair"; break;
      case Spec::Kind::Comp: kind = "comp"; break;
      case Spec::Kind::Opt: kind = "option"; break;
      case Spec::Kind::Pred: kind = "pred"; break;
      case Spec::Kind::Ref: kind = "ref"; break;
    }
  }
  return ctx.lctx().path.to_string() + " [" + kind + "]";
}

}  // namespace

std::string Shell::handle(Session& s, const std::string& cmd,
                          const std::string& rest) {
  TxnCtx& ctx = *s.ctx;

  auto op_error = [&](const Undefined& u) {
    saw_op_error_ = true;
    return "OpError " + u.to_string();
  };

  auto nav_result = [&](Result<bool> r) {
    if (!r.ok()) return op_error(r.error());
    return std::string("at ") + describe_focus(eng_, ctx);
  };

  if (cmd == "down") return nav_result(ctx.down());
  if (cmd == "up") return nav_result(ctx.up());
  if (cmd == "out") return nav_result(ctx.out());
  if (cmd == "next") return nav_result(ctx.next());
  if (cmd == "prev") return nav_result(ctx.prev());
  if (cmd == "into") {
    auto zr = eng_.resolve_focus(ctx.lctx().zipper);
    if (!zr.ok()) return op_error(zr.error());
    switch (zr.value().current().spec->kind) {
      case Spec::Kind::Pair: return nav_result(ctx.into_pair());
      case Spec::Kind::Comp: return nav_result(ctx.into_comp());
      case Spec::Kind::Opt: return nav_result(ctx.into_opt());
      default:
        return op_error(
            undefined("NotEnterable", "into expects a pair, comp or option"));
    }
  }
  if (cmd == "fetch") {
    auto r = ctx.fetch();
    if (!r.ok()) return op_error(r.error());
    return r.value().to_string();
  }
  if (cmd == "store_file" || cmd == "store_dir") {
    ExprPtr e;
    auto parsed = parse_expr_text(rest);
    if (parsed.ok()) {
      e = parsed.value();
    } else if (cmd == "store_dir") {
      // comma-joined bare names
      std::set<std::string> names;
      std::string cur;
      for (char c : rest + ",") {
        if (c == ',') {
          std::string n = strip(cur);
          if (!n.empty()) names.insert(n);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      e = Expr::lit_v(Value::set(std::move(names)));
    } else {
      return op_error(parsed.error());
    }
    auto r = ctx.run_command(cmd == "store_file" ? *Command::store_file(e)
                                                 : *Command::store_dir(e));
    if (!r.ok()) return op_error(r.error());
    return "stored";
  }
  if (cmd == "create_path") {
    auto r = ctx.create_path();
    if (!r.ok()) return op_error(r.error());
    return "created";
  }
  if (cmd == "verify") {
    auto r = ctx.verify();
    if (!r.ok()) return op_error(r.error());
    const ConsistencyResult& c = r.value();
    if (!c.consistent) return "inconsistent";
    return c.total ? "consistent (total)" : "consistent (partial)";
  }
  if (cmd == "log") {
    if (ctx.log().empty()) return "(empty log)";
    std::string out;
    for (const auto& e : ctx.log()) {
      if (!out.empty()) out += '\n';
      out += e.to_string();
    }
    return out;
  }
  if (cmd == "commit") {
    if (store_->try_commit(s.start, ctx.log())) {
      reset_session(s);
      return "Ok";
    }
    saw_conflict_ = true;
    reset_session(s);
    return "TxError: transaction aborted due to conflict";
  }
  if (cmd == "abort") {
    reset_session(s);
    return "aborted";
  }
  if (cmd == "fs") return to_snapshot_text(ctx.fs());
  if (cmd == "goto") {
    auto r = ctx.goto_label(strip(rest));
    if (!r.ok()) return op_error(r.error());
    return std::string("at ") + describe_focus(eng_, ctx);
  }
  if (cmd == "goto_name") {
    auto r = ctx.goto_name(strip(rest));
    if (!r.ok()) return op_error(r.error());
    return std::string("at ") + describe_focus(eng_, ctx);
  }
  saw_op_error_ = true;
  return "unknown command: " + cmd + " (try help)";
}

std::string Shell::feed(const std::string& line) {
  std::string text = strip(line);
  if (text.empty() || text[0] == '#') return "";

  std::istringstream in(text);
  std::string cmd;
  in >> cmd;
  std::string rest;
  std::getline(in, rest);
  rest = strip(rest);

  if (cmd == "quit" || cmd == "exit") {
    done_ = true;
    return "bye";
  }
  if (cmd == "help") {
    std::string out = "commands:";
    for (const auto& c : shell_command_table()) out += " " + c.name;
    return out;
  }
  if (cmd == "sessions") {
    std::string out;
    for (const auto& [name, s] : sessions_) {
      if (!out.empty()) out += '\n';
      out += (name == active_ ? "* " : "  ") + name + " @ " +
             describe_focus(eng_, *s.ctx);
    }
    return out;
  }
  if (cmd == "session") {
    std::istringstream args(rest);
    std::string sub, name;
    args >> sub >> name;
    if (sub != "new" || name.empty()) {
      saw_op_error_ = true;
      return "usage: session new NAME";
    }
    return new_session(name);
  }
  if (cmd == "use") {
    if (!sessions_.count(rest)) {
      saw_op_error_ = true;
      return "no such session: " + rest;
    }
    active_ = rest;
    return "using " + rest;
  }
  return handle(current(), cmd, rest);
}

int run_shell_stream(Shell& shell, std::istream& in, std::ostream& out,
                     bool echo) {
  std::string line;
  if (!echo) out << "txf> " << std::flush;
  while (!shell.done() && std::getline(in, line)) {
    if (echo) out << "txf> " << line << "\n";
    std::string resp = shell.feed(line);
    if (!resp.empty()) out << resp << "\n";
    if (!echo && !shell.done()) out << "txf> " << std::flush;
  }
  return shell.exit_code();
}

}  // namespace txf
