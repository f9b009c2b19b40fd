#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "txforest/consistency.hpp"
#include "txforest/demo.hpp"
#include "txforest/harness.hpp"
#include "txforest/shell.hpp"
#include "txforest/storage.hpp"
#include "txforest/surface.hpp"
#include "txforest/txn.hpp"

using namespace txf;

namespace {

Result<std::string> slurp(const std::string& file) {
  std::ifstream in(file);
  if (!in) return undefined("IoError", "cannot read " + file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result<SpecTable> load_table(const std::string& spec_file) {
  TXF_TRY(text, slurp(spec_file));
  return compile_text(text);
}

Result<std::string> pick_decl(const SpecTable& table, std::string decl) {
  if (!decl.empty()) {
    if (!table.count(decl))
      return undefined("UnknownSpecName", decl);
    return decl;
  }
  if (table.size() == 1) return table.begin()->first;
  if (table.count("root")) return std::string("root");
  return undefined("UsageError",
                   "--decl required when the spec file declares several names");
}

int cmd_check(const std::string& spec_file, const std::string& decl_name,
              const std::string& root_dir, const std::string& path_text,
              const std::string& partial_file) {
  auto table = load_table(spec_file);
  if (!table.ok()) {
    std::cerr << "error: " << table.error().to_string() << "\n";
    return 2;
  }
  auto decl = pick_decl(table.value(), decl_name);
  if (!decl.ok()) {
    std::cerr << "error: " << decl.error().to_string() << "\n";
    return 2;
  }
  PosixStorage storage(root_dir);
  auto snap = storage.snapshot();
  if (!snap.ok()) {
    std::cerr << "error: " << snap.error().to_string() << "\n";
    return 2;
  }
  auto path = Path::parse(path_text);
  if (!path) {
    std::cerr << "error: bad --path " << path_text << "\n";
    return 2;
  }

  Engine eng(&table.value());
  Zipper z = Zipper::root(table.value().at(decl.value()));
  ConsistencyFailure failure;
  bool ok;
  bool total = true;
  if (!partial_file.empty()) {
    auto text = slurp(partial_file);
    if (!text.ok()) {
      std::cerr << "error: " << text.error().to_string() << "\n";
      return 2;
    }
    PathSet pathset;
    std::istringstream in(text.value());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto p = Path::parse(line);
      if (!p) {
        std::cerr << "error: bad path in pathset file: " << line << "\n";
        return 2;
      }
      pathset.insert(*p);
    }
    auto r = pconsistent(eng, pathset, snap.value(), *path, z, &failure);
    if (!r.ok()) {
      std::cerr << "undefined: " << r.error().to_string() << "\n";
      return 2;
    }
    ok = r.value().consistent;
    total = r.value().total;
  } else {
    auto r = consistent(eng, snap.value(), *path, z, &failure);
    if (!r.ok()) {
      std::cerr << "undefined: " << r.error().to_string() << "\n";
      return 2;
    }
    ok = r.value();
  }

  if (ok) {
    std::cout << (total ? "consistent (total)\n" : "consistent (partial)\n");
    return 0;
  }
  std::cout << "inconsistent: at " << failure.path.to_string() << " expected "
            << failure.expected << ", found " << failure.found << "\n";
  return 1;
}

int cmd_simulate(const std::string& scenario_file, int schedules,
                 uint64_t seed, const std::string& report_file,
                 int64_t emit_seed) {
  if (emit_seed >= 0) {
    Scenario sc = generate_scenario((uint64_t)emit_seed);
    std::cout << scenario_to_text(sc);
    return 0;
  }
  auto sc = load_scenario_file(scenario_file);
  if (!sc.ok()) {
    std::cerr << "error: " << sc.error().to_string() << "\n";
    return 2;
  }
  Engine eng(&sc.value().table);
  auto rep = check_serializable(eng, sc.value(), schedules, seed);
  if (!rep.ok()) {
    std::cerr << "error: " << rep.error().to_string() << "\n";
    return 2;
  }
  std::string json = report_to_json(rep.value());
  if (!report_file.empty()) {
    std::ofstream out(report_file);
    if (!out) {
      std::cerr << "error: cannot write " << report_file << "\n";
      return 2;
    }
    out << json << "\n";
  } else {
    std::cout << json << "\n";
  }
  const auto& r = rep.value();
  std::cerr << r.scenario << ": " << r.passed << "/" << r.completed
            << " completed schedules serializable, " << r.inconclusive
            << " inconclusive";
  if (r.vacuous) std::cerr << " (vacuous: no schedules requested)";
  std::cerr << "\n";
  return r.all_passed() ? 0 : 1;
}

int cmd_shell(const std::string& spec_file, const std::string& decl_name,
              const std::string& root_dir, const std::string& path_text,
              const std::string& script_file) {
  auto table = load_table(spec_file);
  if (!table.ok()) {
    std::cerr << "error: " << table.error().to_string() << "\n";
    return 2;
  }
  auto decl = pick_decl(table.value(), decl_name);
  if (!decl.ok()) {
    std::cerr << "error: " << decl.error().to_string() << "\n";
    return 2;
  }
  auto path = Path::parse(path_text);
  if (!path) {
    std::cerr << "error: bad --path " << path_text << "\n";
    return 2;
  }
  auto storage = std::make_shared<PosixStorage>(root_dir);
  auto store = std::make_shared<GlobalStore>(storage);

  static SpecTable table_keeper = table.value();
  Engine eng(&table_keeper);
  Shell shell(eng, table_keeper.at(decl.value()), *path, store);

  if (!script_file.empty()) {
    std::ifstream in(script_file);
    if (!in) {
      std::cerr << "error: cannot read " << script_file << "\n";
      return 2;
    }
    return run_shell_stream(shell, in, std::cout, true);
  }
  return run_shell_stream(shell, std::cin, std::cout, false);
}

int demo_failure(const TxOutcome& out) {
  switch (out.status) {
    case TxOutcome::Status::Ok:
      return 0;
    case TxOutcome::Status::Conflict:
    case TxOutcome::Status::RetriesExhausted:
      std::cout << "Transaction aborted due to conflict\n";
      return 1;
    case TxOutcome::Status::OpError:
      std::cout << "Transaction aborted due to error: " << out.message << "\n";
      return 2;
  }
  return 2;
}

int cmd_demo_grades(const std::string& action, const std::string& root_dir,
                    const std::string& path_text, const std::string& hw,
                    int64_t gmin, const std::string& item_text) {
  auto storage = std::make_shared<PosixStorage>(root_dir);
  GlobalStore store(storage);
  auto path = Path::parse(path_text);
  if (!path) {
    std::cerr << "error: bad --path " << path_text << "\n";
    return 2;
  }

  static SpecTable grades_table = compile_text(demo::grades_spec_text()).value();
  static SpecTable queue_table = compile_text(demo::queue_spec_text()).value();

  if (action == "renormalize") {
    Engine eng(&grades_table);
    TxOutcome out = loop_txn(store, eng, grades_table.at("grades"), *path,
                             demo::renormalize_body(hw, gmin));
    if (out.ok()) {
      std::cout << "Renormalization successful (" << out.value.to_string()
                << " students)\n";
      return 0;
    }
    return demo_failure(out);
  }
  if (action == "stats") {
    Engine eng(&grades_table);
    auto stats = std::make_shared<demo::Stats>();
    TxOutcome out = loop_txn(store, eng, grades_table.at("grades"), *path,
                             demo::stats_body(hw, stats));
    if (out.ok()) {
      std::cout << hw << ": count=" << stats->count << " min=" << stats->min
                << " max=" << stats->max << " mean=" << stats->mean << "\n";
      return 0;
    }
    return demo_failure(out);
  }
  if (action == "push") {
    Engine eng(&queue_table);
    auto name = std::make_shared<std::string>();
    TxOutcome out = loop_txn(store, eng, queue_table.at("queue"), *path,
                             demo::queue_push_body(item_text, name));
    if (out.ok()) {
      std::cout << "pushed " << *name << "\n";
      return 0;
    }
    return demo_failure(out);
  }
  if (action == "pop") {
    Engine eng(&queue_table);
    auto text = std::make_shared<std::string>();
    TxOutcome out = loop_txn(store, eng, queue_table.at("queue"), *path,
                             demo::queue_pop_body(text));
    if (out.ok()) {
      std::cout << "popped: " << *text << "\n";
      return 0;
    }
    return demo_failure(out);
  }
  std::cerr << "error: unknown demo action " << action << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"txforest: transactional filestores over specifications"};
  app.require_subcommand(1);

  // check
  std::string spec_file, decl_name, root_dir, partial_file, path_text = "/";
  auto* check = app.add_subcommand("check", "check a filestore against a spec");
  check->add_option("--spec", spec_file, "spec (.txf) file")->required();
  check->add_option("--decl", decl_name, "declaration to check");
  check->add_option("--root", root_dir, "directory backing the model root")
      ->required();
  check->add_option("--path", path_text, "model path to check at");
  check->add_option("--partial", partial_file,
                    "file of paths; run the partial check over them");

  // simulate
  std::string scenario_file, report_file;
  int schedules = 100;
  uint64_t seed = 1;
  int64_t emit_seed = -1;
  auto* sim = app.add_subcommand("simulate",
                                 "run schedules over a scenario and test "
                                 "serializability against the serial oracle");
  sim->add_option("--scenario", scenario_file, "scenario file");
  sim->add_option("--schedules", schedules, "number of random schedules");
  sim->add_option("--seed", seed, "base seed");
  sim->add_option("--report", report_file, "write the JSON report here");
  sim->add_option("--emit-generated", emit_seed,
                  "print a generated scenario for this seed and exit");

  // shell
  std::string script_file;
  std::string shell_spec, shell_decl, shell_root, shell_path = "/";
  auto* sh = app.add_subcommand("shell", "interactive multi-session shell");
  sh->add_option("--root", shell_root, "directory backing the model root")
      ->required();
  sh->add_option("--spec", shell_spec, "spec (.txf) file")->required();
  sh->add_option("--decl", shell_decl, "declaration to traverse");
  sh->add_option("--path", shell_path, "starting model path");
  sh->add_option("--script", script_file, "replay commands from this file");

  // demo
  std::string demo_root, demo_path, demo_hw = "hw1", demo_item;
  int64_t demo_gmin = 60;
  auto* dm = app.add_subcommand("demo", "course-management demos");
  auto* grades = dm->add_subcommand("grades", "grades filestore demos");
  std::string grades_action;
  grades->add_option("action", grades_action,
                     "renormalize | stats | push | pop")
      ->required();
  grades->add_option("--root", demo_root, "directory backing the model root")
      ->required();
  grades->add_option("--path", demo_path,
                     "model path of the filestore (default /grades, /queue "
                     "for queue actions)");
  grades->add_option("--hw", demo_hw, "homework name");
  grades->add_option("--gmin", demo_gmin, "minimum normalized score");
  grades->add_option("--item", demo_item, "queue item payload");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed())
    return cmd_check(spec_file, decl_name, root_dir, path_text, partial_file);
  if (sim->parsed()) {
    if (scenario_file.empty() && emit_seed < 0) {
      std::cerr << "error: --scenario or --emit-generated required\n";
      return 2;
    }
    return cmd_simulate(scenario_file, schedules, seed, report_file, emit_seed);
  }
  if (sh->parsed())
    return cmd_shell(shell_spec, shell_decl, shell_root, shell_path,
                     script_file);
  if (grades->parsed()) {
    if (demo_path.empty())
      demo_path = (grades_action == "push" || grades_action == "pop")
                      ? "/queue"
                      : "/grades";
    return cmd_demo_grades(grades_action, demo_root, demo_path, demo_hw,
                           demo_gmin, demo_item);
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
