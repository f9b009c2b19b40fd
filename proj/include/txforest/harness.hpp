#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "txforest/surface.hpp"
#include "txforest/txn.hpp"

namespace txf {

// A replayable schedule: an explicit decision prefix, then seeded random
// decisions until the pool empties or the step budget runs out. The same
// seed over the same pool replays the same trace.
struct Schedule {
  uint64_t seed = 0;
  std::vector<Decision> decisions;
  size_t max_steps = 20000;
  // Mutation-testing hook: discards the global log right before a commit
  // that would fail validation, forcing stale commits through. Exists so the
  // suite can prove the serializability checker catches broken validation.
  bool mutate_skip_checklog = false;
};

struct RunResult {
  GlobalState final_state;
  std::vector<StepEvent> events;
  std::vector<int> commit_order;
  bool completed = false;     // pool drained
  bool inconclusive = false;  // budget exhausted or all remaining stuck
  std::string note;
  int restarts = 0;
  int commits = 0;
  // Commits where check_log passed but the transaction log was not
  // compatible with the pre-merge global filesystem (must stay zero).
  int compat_violations = 0;
};

// One transaction of a scenario, as a (declaration, root path, command)
// triple; command_text is the parseable form.
struct ScenarioTxn {
  std::string decl;
  Path path;
  CmdPtr command;
  std::string command_text;
};

struct Scenario {
  std::string name;
  std::string spec_text;
  SpecTable table;
  FileStoreState fs;
  std::vector<ScenarioTxn> txns;
};

// Scenario file: `[scenario]` (optional name), `[spec]` surface declarations,
// `[fs]` snapshot lines, then one `[txn]` block per transaction with
// `decl = NAME`, `path = /p`, `command = ...`.
Result<Scenario> parse_scenario(const std::string& text);
std::string scenario_to_text(const Scenario& sc);
Result<Scenario> load_scenario_file(const std::string& file);

// Initial global state: the scenario filestore plus one pooled transaction
// per command, each with a fresh start timestamp.
GlobalState make_pool(const Scenario& sc);

RunResult run_schedule(const Engine& eng, const GlobalState& initial,
                       const Schedule& sched);

// Final filesystems of every serial order whose steps are all defined,
// deduplicated. The pool must hold at most 6 transactions.
Result<std::vector<FileStoreState>> serial_oracle(const Engine& eng,
                                                  const GlobalState& initial);

struct ScheduleVerdict {
  uint64_t seed = 0;
  bool completed = false;
  bool in_oracle = false;
  bool commit_order_ok = false;
  int restarts = 0;
  int commits = 0;
  std::string note;

  bool passed() const { return completed && in_oracle && commit_order_ok; }
};

struct SerializabilityReport {
  std::string scenario;
  int n_schedules = 0;
  uint64_t seed = 0;
  int completed = 0;
  int passed = 0;
  int inconclusive = 0;
  int compat_violations = 0;
  bool vacuous = false;
  size_t oracle_size = 0;
  std::string oracle_digest;
  std::vector<ScheduleVerdict> verdicts;

  // Every completed run serializable (and at least meaningful when asked).
  bool all_passed() const { return passed == completed && compat_violations == 0; }
};

// Runs n random schedules and checks every completed run's final filesystem
// for membership in the serial oracle, and that the commit-order fold
// reproduces it. n = 0 yields a vacuous pass flagged as such.
Result<SerializabilityReport> check_serializable(const Engine& eng,
                                                 const Scenario& sc,
                                                 int n_schedules,
                                                 uint64_t seed);

std::string report_to_json(const SerializabilityReport& report);

// Randomized scenario corpus used by the acceptance suite and the simulate
// CLI's --generate mode.
struct GenOptions {
  int min_txns = 2;
  int max_txns = 3;
  int max_forest_cmds = 8;
};
Scenario generate_scenario(uint64_t seed, const GenOptions& opts = {});

uint64_t mix_seed(uint64_t seed, uint64_t salt);
std::string fs_digest(const FileStoreState& fs);

}  // namespace txf
