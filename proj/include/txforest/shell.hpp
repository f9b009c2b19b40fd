#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "txforest/txn.hpp"

namespace txf {

// One REPL command and the library operation it maps to (the mapping is
// 1:1 and covered by a table-driven test).
struct ShellCommandInfo {
  std::string name;
  std::string maps_to;
  bool takes_arg;
};
const std::vector<ShellCommandInfo>& shell_command_table();

// Multi-session shell over one shared store. Sessions are independent
// transactions; only `use` switches between them, so conflict timing is
// deterministic and scriptable. Operational errors are printed and leave
// the session alive.
class Shell {
 public:
  Shell(Engine eng, SpecPtr spec, Path start_path,
        std::shared_ptr<GlobalStore> store);

  // Processes one line and returns the printable response.
  std::string feed(const std::string& line);

  bool done() const { return done_; }
  // 0 clean, 1 a commit conflict occurred, 2 an operational error occurred.
  int exit_code() const;

 private:
  struct Session {
    Timestamp start;
    std::unique_ptr<TxnCtx> ctx;
  };

  std::string new_session(const std::string& name);
  Session& current();
  void reset_session(Session& s);
  std::string handle(Session& s, const std::string& cmd,
                     const std::string& rest);

  Engine eng_;
  SpecPtr spec_;
  Path start_path_;
  std::shared_ptr<GlobalStore> store_;
  std::map<std::string, Session> sessions_;
  std::string active_;
  bool done_ = false;
  bool saw_conflict_ = false;
  bool saw_op_error_ = false;
};

// Drives a shell from a stream; echoes prompts when `echo` is set (script
// replay). Returns the shell exit code.
int run_shell_stream(Shell& shell, std::istream& in, std::ostream& out,
                     bool echo);

}  // namespace txf
