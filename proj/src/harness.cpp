#include "txforest/harness.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "txforest/pretty.hpp"

namespace txf {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  // splitmix64 step
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string fs_digest(const FileStoreState& fs) {
  // FNV-1a over the snapshot text
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : to_snapshot_text(fs)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

// ---- scenario files ---------------------------------------------------------

Result<Scenario> parse_scenario(const std::string& text) {
  Scenario sc;
  sc.name = "scenario";
  std::string spec_text, fs_text;
  struct RawTxn {
    std::string decl, path, command;
  };
  std::vector<RawTxn> raw;

  enum class Sec { None, Scenario, Spec, Fs, Txn };
  Sec sec = Sec::None;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
      trimmed.pop_back();
    if (sec != Sec::Fs) {  // fs lines are tab-structured, keep verbatim
      size_t i = trimmed.find_first_not_of(" \t");
      if (i == std::string::npos || trimmed[i] == '#') {
        if (sec == Sec::Spec) spec_text += line + "\n";
        continue;
      }
    }
    if (trimmed == "[scenario]") { sec = Sec::Scenario; continue; }
    if (trimmed == "[spec]") { sec = Sec::Spec; continue; }
    if (trimmed == "[fs]") { sec = Sec::Fs; continue; }
    if (trimmed == "[txn]") {
      sec = Sec::Txn;
      raw.push_back(RawTxn{});
      continue;
    }
    switch (sec) {
      case Sec::Spec:
        spec_text += line + "\n";
        break;
      case Sec::Fs:
        if (!trimmed.empty()) fs_text += trimmed + "\n";
        break;
      case Sec::Scenario:
      case Sec::Txn: {
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
          return undefined("ScenarioParse", "line " + std::to_string(lineno) +
                                                ": expected key = value");
        auto strip = [](std::string s) {
          size_t a = s.find_first_not_of(" \t");
          size_t b = s.find_last_not_of(" \t");
          return a == std::string::npos ? std::string()
                                        : s.substr(a, b - a + 1);
        };
        std::string key = strip(trimmed.substr(0, eq));
        std::string val = strip(trimmed.substr(eq + 1));
        if (sec == Sec::Scenario) {
          if (key == "name") sc.name = val;
        } else {
          if (key == "decl") raw.back().decl = val;
          else if (key == "path") raw.back().path = val;
          else if (key == "command") raw.back().command = val;
          else
            return undefined("ScenarioParse",
                             "line " + std::to_string(lineno) +
                                 ": unknown key " + key);
        }
        break;
      }
      case Sec::None:
        return undefined("ScenarioParse",
                         "line " + std::to_string(lineno) +
                             ": content before any section");
    }
  }

  sc.spec_text = spec_text;
  TXF_TRY(table, compile_text(spec_text));
  sc.table = std::move(table);
  TXF_TRY(fs0, from_snapshot_text(fs_text));
  sc.fs = std::move(fs0);
  for (const auto& r : raw) {
    ScenarioTxn t;
    if (!sc.table.count(r.decl))
      return undefined("ScenarioParse", "unknown decl: " + r.decl);
    t.decl = r.decl;
    auto p = Path::parse(r.path);
    if (!p) return undefined("ScenarioParse", "bad path: " + r.path);
    t.path = *p;
    TXF_TRY(cmd, parse_command_text(r.command));
    t.command = cmd;
    t.command_text = r.command;
    sc.txns.push_back(std::move(t));
  }
  if (sc.txns.empty())
    return undefined("ScenarioParse", "scenario has no transactions");
  return sc;
}

std::string scenario_to_text(const Scenario& sc) {
  std::string out = "[scenario]\nname = " + sc.name + "\n\n[spec]\n";
  out += sc.spec_text;
  if (out.back() != '\n') out += '\n';
  out += "\n[fs]\n" + to_snapshot_text(sc.fs);
  for (const auto& t : sc.txns) {
    out += "\n[txn]\ndecl = " + t.decl + "\npath = " + t.path.to_string() +
           "\ncommand = " + t.command_text + "\n";
  }
  return out;
}

Result<Scenario> load_scenario_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) return undefined("IoError", "cannot read " + file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

GlobalState make_pool(const Scenario& sc) {
  GlobalState gs;
  gs.fs = sc.fs;
  int id = 0;
  for (const auto& t : sc.txns) {
    SpecPtr spec = sc.table.at(t.decl);
    Timestamp start = gs.fresh_ts();
    gs.pool.push_back(PooledTxn{
        id++, initial_transaction(spec, t.path, t.command, sc.fs, start),
        false, std::string()});
  }
  return gs;
}

// ---- schedule execution -------------------------------------------------------

RunResult run_schedule(const Engine& eng, const GlobalState& initial,
                       const Schedule& sched) {
  RunResult out;
  GlobalState gs = initial;
  std::mt19937_64 rng(sched.seed);
  size_t step_i = 0;

  while (!gs.pool.empty() && step_i < sched.max_steps) {
    Decision d{0, Decision::Kind::LocalStep};
    if (step_i < sched.decisions.size()) {
      d = sched.decisions[step_i];
    } else {
      std::vector<const PooledTxn*> live;
      for (const auto& pt : gs.pool)
        if (!pt.stuck) live.push_back(&pt);
      if (live.empty()) {
        out.inconclusive = true;
        out.note = "all remaining transactions are stuck";
        break;
      }
      const PooledTxn* pick =
          live[rng() % live.size()];
      d.txn_id = pick->id;
      d.kind = is_done(pick->txn) ? Decision::Kind::TryCommit
                                  : Decision::Kind::LocalStep;
    }

    // Observe the check-log => compat property right before a merge.
    if (d.kind == Decision::Kind::TryCommit) {
      const PooledTxn* pt = gs.find(d.txn_id);
      if (pt && !pt->stuck && is_done(pt->txn)) {
        bool clean = check_log(gs.glog, pt->txn.state.start, pt->txn.state.log);
        if (clean && !compat(gs.fs, pt->txn.state.log))
          ++out.compat_violations;
        if (!clean && sched.mutate_skip_checklog) gs.glog.clear();
      }
    }

    StepEvent ev = step(eng, gs, d);
    out.events.push_back(ev);
    switch (ev.kind) {
      case StepEvent::Kind::Committed:
        ++out.commits;
        out.commit_order.push_back(ev.txn_id);
        break;
      case StepEvent::Kind::Restarted:
        ++out.restarts;
        break;
      default:
        break;
    }
    ++step_i;
  }

  out.completed = gs.pool.empty();
  if (!out.completed && !out.inconclusive) {
    out.inconclusive = true;
    out.note = "schedule budget exhausted with a non-empty pool";
  }
  out.final_state = std::move(gs);
  return out;
}

Result<std::vector<FileStoreState>> serial_oracle(const Engine& eng,
                                                  const GlobalState& initial) {
  if (initial.pool.size() > 6)
    return undefined("OracleTooLarge",
                     std::to_string(initial.pool.size()) + " transactions");
  std::vector<size_t> order(initial.pool.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<FileStoreState> outs;
  std::set<std::string> seen;
  do {
    FileStoreState fs = initial.fs;
    bool defined = true;
    for (size_t i : order) {
      const Transaction& t = initial.pool[i].txn;
      auto [p0, z0] = goto_root(t.thread.path, t.thread.zipper);
      auto r = eng.exec_cmd(*t.state.full, LocalContext{Env{}, p0, z0},
                            GlobalContext{PathSet{}, fs});
      if (!r.ok()) {
        defined = false;
        break;
      }
      fs = r.value().gctx.fs;
    }
    if (defined && seen.insert(fs_digest(fs)).second) outs.push_back(fs);
  } while (std::next_permutation(order.begin(), order.end()));
  return outs;
}

Result<SerializabilityReport> check_serializable(const Engine& eng,
                                                 const Scenario& sc,
                                                 int n_schedules,
                                                 uint64_t seed) {
  SerializabilityReport rep;
  rep.scenario = sc.name;
  rep.n_schedules = n_schedules;
  rep.seed = seed;
  rep.vacuous = n_schedules == 0;

  GlobalState initial = make_pool(sc);
  TXF_TRY(oracle, serial_oracle(eng, initial));
  rep.oracle_size = oracle.size();
  std::string digest_src;
  for (const auto& fs : oracle) digest_src += fs_digest(fs);
  rep.oracle_digest = oracle.empty() ? "empty" : digest_src;

  for (int i = 0; i < n_schedules; ++i) {
    Schedule sched;
    sched.seed = mix_seed(seed, (uint64_t)i);
    RunResult run = run_schedule(eng, initial, sched);
    ScheduleVerdict v;
    v.seed = sched.seed;
    v.completed = run.completed;
    v.restarts = run.restarts;
    v.commits = run.commits;
    v.note = run.note;
    rep.compat_violations += run.compat_violations;
    if (run.completed) {
      ++rep.completed;
      for (const auto& fs : oracle)
        if (fs == run.final_state.fs) {
          v.in_oracle = true;
          break;
        }
      // The commit-order fold must reproduce the observed filesystem.
      FileStoreState fs = initial.fs;
      bool ok = true;
      for (int id : run.commit_order) {
        const Transaction& t = initial.pool[(size_t)id].txn;
        auto [p0, z0] = goto_root(t.thread.path, t.thread.zipper);
        auto r = eng.exec_cmd(*t.state.full, LocalContext{Env{}, p0, z0},
                              GlobalContext{PathSet{}, fs});
        if (!r.ok()) {
          ok = false;
          break;
        }
        fs = r.value().gctx.fs;
      }
      v.commit_order_ok = ok && fs == run.final_state.fs;
      if (v.passed()) ++rep.passed;
      if (!v.in_oracle) v.note = "final filesystem outside the serial oracle";
      else if (!v.commit_order_ok) v.note = "commit-order fold mismatch";
    } else {
      ++rep.inconclusive;
    }
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

std::string report_to_json(const SerializabilityReport& rep) {
  nlohmann::json j;
  j["scenario"] = rep.scenario;
  j["n_schedules"] = rep.n_schedules;
  j["seed"] = rep.seed;
  j["completed"] = rep.completed;
  j["passed"] = rep.passed;
  j["inconclusive"] = rep.inconclusive;
  j["compat_violations"] = rep.compat_violations;
  j["vacuous"] = rep.vacuous;
  j["oracle_size"] = rep.oracle_size;
  j["oracle_digest"] = rep.oracle_digest;
  j["all_passed"] = rep.all_passed();
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : rep.verdicts) {
    nlohmann::json jv;
    jv["seed"] = v.seed;
    jv["completed"] = v.completed;
    jv["in_oracle"] = v.in_oracle;
    jv["commit_order_ok"] = v.commit_order_ok;
    jv["restarts"] = v.restarts;
    jv["commits"] = v.commits;
    if (!v.note.empty()) jv["note"] = v.note;
    verdicts.push_back(std::move(jv));
  }
  j["schedules"] = std::move(verdicts);
  return j.dump(2);
}

// ---- scenario generation -------------------------------------------------------

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}

  uint64_t next(uint64_t bound) { return rng() % bound; }
  bool chance(int pct) { return (int)(rng() % 100) < pct; }
  std::string int_string() { return std::to_string(next(200)); }
};

// Random walk over the spec and filestore: every generated command sequence
// is defined on the initial snapshot by construction.
CmdPtr generate_commands(Gen& g, const Engine& eng, const SpecTable& table,
                         const Path& root, const FileStoreState& fs,
                         int max_forest) {
  LocalContext lctx = initial_context(root, table.begin()->second);
  if (table.count("root")) lctx = initial_context(root, table.at("root"));
  GlobalContext gctx{PathSet{}, fs};
  std::vector<CmdPtr> cmds;
  int forest = 0;
  int target = 1 + (int)g.next((uint64_t)max_forest);

  while (forest < target) {
    struct Move {
      CmdPtr cmd;
      int weight;
    };
    std::vector<Move> moves;
    auto zr = eng.resolve_focus(lctx.zipper);
    if (!zr.ok()) break;
    const Spec& sp = *zr.value().current().spec;
    auto at = gctx.fs.get(lctx.path);

    switch (sp.kind) {
      case Spec::Kind::Path:
        if (at && at->is_dir()) moves.push_back({Command::navigate(Navigation::Down), 4});
        moves.push_back({Command::create_path(), 1});
        break;
      case Spec::Kind::Pair:
        moves.push_back({Command::navigate(Navigation::IntoPair), 4});
        break;
      case Spec::Kind::Comp: {
        auto ev = eng.eval_spec_expr(*sp.expr,
                                     LocalContext{zr.value().current().env,
                                                  lctx.path, zr.value()},
                                     gctx);
        if (ev.ok() && (ev.value().value.is_list() || ev.value().value.is_set()) &&
            !ev.value().value.as_ordered_elems().empty())
          moves.push_back({Command::navigate(Navigation::IntoComp), 4});
        break;
      }
      case Spec::Kind::Opt:
        moves.push_back({Command::navigate(Navigation::IntoOpt), 3});
        break;
      case Spec::Kind::File:
        // store_file needs no filesystem precondition: it creates the file.
        moves.push_back({Command::store_file(Expr::str(g.int_string())), 5});
        if (at && at->is_file())
          moves.push_back(
              {Command::store_file(Expr::call(
                   "+", {Expr::fetch(Expr::Kind::FetchFile), Expr::str("1")})),
               2});
        break;
      case Spec::Kind::Dir:
        if (at && at->is_dir()) {
          // Rewrite the directory, mostly keeping its children.
          std::set<std::string> names = at->children();
          if (!names.empty() && g.chance(30)) names.erase(*names.begin());
          if (g.chance(30)) names.insert("n" + std::to_string(g.next(4)));
          moves.push_back(
              {Command::store_dir(Expr::lit_v(Value::set(names))), 1});
        }
        break;
      default:
        break;
    }
    if (lctx.zipper.has_right()) moves.push_back({Command::navigate(Navigation::Next), 3});
    if (lctx.zipper.has_left()) moves.push_back({Command::navigate(Navigation::Prev), 1});
    if (lctx.zipper.has_parent()) {
      bool parent_path =
          lctx.zipper.parent().current().spec->kind == Spec::Kind::Path;
      moves.push_back(
          {Command::navigate(parent_path ? Navigation::Up : Navigation::Out), 1});
    }
    if (moves.empty()) break;

    int total = 0;
    for (const auto& m : moves) total += m.weight;
    int pick = (int)g.next((uint64_t)total);
    const Move* chosen = &moves.back();
    for (const auto& m : moves) {
      pick -= m.weight;
      if (pick < 0) {
        chosen = &m;
        break;
      }
    }

    auto r = eng.exec_cmd(*chosen->cmd, lctx, gctx);
    if (!r.ok()) break;  // should not happen: moves are filtered
    lctx = r.value().lctx;
    gctx = r.value().gctx;
    cmds.push_back(chosen->cmd);
    ++forest;
  }
  if (cmds.empty()) cmds.push_back(Command::navigate(Navigation::IntoPair));
  return seq_all(cmds);
}

}  // namespace

Scenario generate_scenario(uint64_t seed, const GenOptions& opts) {
  Gen g(seed);
  Scenario sc;
  sc.name = "gen-" + std::to_string(seed);

  int shape = (int)g.next(3);
  FileStoreState::Map m;
  Path root = root_path();

  if (shape == 0) {
    // Labeled files, one optional.
    sc.spec_text =
        "root = directory {\n"
        "  a is \"a\" :: file;\n"
        "  b is \"b\" :: file;\n"
        "  c is \"c\" :: file option;\n"
        "}\n";
    std::set<std::string> kids = {"a", "b"};
    bool with_c = g.chance(60);
    if (with_c) kids.insert("c");
    m.emplace(root_path(), Contents::dir(kids));
    for (const auto& k : kids)
      m.emplace(root_path() / k, Contents::file(g.int_string()));
  } else if (shape == 1) {
    // A comprehension of score files plus a labeled max file.
    sc.spec_text =
        "root = directory {\n"
        "  max is \"max\" :: file;\n"
        "  scores is [s :: file | s <- matches RE \"[a-z]+[0-9]+\"];\n"
        "}\n";
    int n = 1 + (int)g.next(3);
    std::set<std::string> kids = {"max"};
    for (int i = 0; i < n; ++i) kids.insert("stu" + std::to_string(i));
    m.emplace(root_path(), Contents::dir(kids));
    for (const auto& k : kids)
      m.emplace(root_path() / k, Contents::file(g.int_string()));
  } else {
    // Two nested homework-style directories.
    sc.spec_text =
        "leaf = file\n"
        "root = [hw :: inner | hw <- matches RE \"hw[0-9]+\"]\n"
        "inner = directory {\n"
        "  max is \"max\" :: file;\n"
        "  scores is [s :: leaf | s <- matches RE \"[a-z]+[0-9]+\"];\n"
        "}\n";
    int hws = 1 + (int)g.next(2);
    std::set<std::string> top;
    for (int h = 0; h < hws; ++h) top.insert("hw" + std::to_string(h + 1));
    m.emplace(root_path(), Contents::dir(top));
    for (const auto& hw : top) {
      int n = 1 + (int)g.next(2);
      std::set<std::string> kids = {"max"};
      for (int i = 0; i < n; ++i) kids.insert("stu" + std::to_string(i));
      m.emplace(root_path() / hw, Contents::dir(kids));
      for (const auto& k : kids)
        m.emplace((root_path() / hw) / k, Contents::file(g.int_string()));
    }
  }

  sc.fs = FileStoreState(std::move(m));
  auto table = compile_text(sc.spec_text);
  sc.table = table.value();  // templates always compile

  Engine eng(&sc.table);
  int n_txns = opts.min_txns +
               (int)g.next((uint64_t)(opts.max_txns - opts.min_txns + 1));
  for (int i = 0; i < n_txns; ++i) {
    ScenarioTxn t;
    t.decl = "root";
    t.path = root;
    t.command = generate_commands(g, eng, sc.table, root, sc.fs,
                                  opts.max_forest_cmds);
    t.command_text = pretty(*t.command);
    sc.txns.push_back(std::move(t));
  }
  return sc;
}

}  // namespace txf
