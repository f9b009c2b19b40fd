#include "txforest/demo.hpp"

#include <cmath>

namespace txf::demo {

const char* grades_spec_text() {
  return "grades = [hw :: hws | hw <- matches RE \"hw[0-9]+\"]\n"
         "students = file\n"
         "hws = directory {\n"
         "  max is \"max\" :: file;\n"
         "  students is [student :: students | student <- matches RE "
         "\"[a-z]+[0-9]+\"];\n"
         "}\n";
}

const char* queue_spec_text() {
  return "queue = [x :: file | x <- matches RE \"item[0-9]+\"]\n";
}

int64_t renorm_value(int64_t cmin, int64_t cmax, int64_t gmin, int64_t gmax,
                     int64_t x) {
  int64_t den = std::max<int64_t>(1, cmax - cmin);
  double q = (double)gmin + (double)(x - cmin) * (double)(gmax - gmin) / (double)den;
  return (int64_t)std::floor(q + 0.5);
}

namespace {

Result<int64_t> parse_score(const std::string& text, const Path& at) {
  size_t pos = 0;
  int64_t v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (...) {
    return undefined("BadScore", at.to_string() + ": \"" + text + "\"");
  }
  if (pos != text.size())
    return undefined("BadScore", at.to_string() + ": \"" + text + "\"");
  return v;
}

// From a hws focus, moves to the students comprehension:
// Pair(max, "max"::file, Pair(dir, Dir, Comp(...))).
Result<bool> enter_students(TxnCtx& ctx) {
  TXF_TRY(a, ctx.into_pair());  // focus: "max" :: file
  (void)a;
  TXF_TRY(b, ctx.next());  // focus: Pair(dir, Dir, Comp)
  (void)b;
  TXF_TRY(c, ctx.into_pair());  // focus: Dir
  (void)c;
  TXF_TRY(d, ctx.next());  // focus: students comprehension
  (void)d;
  return true;
}

Result<int64_t> read_max(TxnCtx& ctx) {
  TXF_TRY(g, ctx.goto_name("max"));
  (void)g;
  TXF_TRY(text, ctx.fetch_file());
  TXF_TRY(v, parse_score(text, ctx.lctx().path));
  TXF_TRY(u, ctx.up());  // back to the "max" path focus
  (void)u;
  TXF_TRY(o, ctx.out());  // and out to the hws pair
  (void)o;
  return v;
}

}  // namespace

TxBody renormalize_body(std::string hw, int64_t gmin) {
  return [hw, gmin](TxnCtx& ctx) -> Result<Value> {
    TXF_TRY(at_hw, ctx.goto_name(hw));
    (void)at_hw;
    TXF_TRY(gmax, read_max(ctx));
    TXF_TRY(entered, enter_students(ctx));
    (void)entered;

    int64_t cmin = 0, cmax = 0, count = 0;
    auto scan = [&](TxnCtx& child, const Value& acc) -> Result<Value> {
      TXF_TRY(d, child.down());
      (void)d;
      TXF_TRY(text, child.fetch_file());
      TXF_TRY(v, parse_score(text, child.lctx().path));
      if (count == 0 || v < cmin) cmin = v;
      if (count == 0 || v > cmax) cmax = v;
      ++count;
      return acc;
    };
    TXF_TRY(scanned, ctx.fold_comp(Value::boolean(true), scan));
    (void)scanned;

    if (count > 0) {
      auto rewrite = [&](TxnCtx& child, const Value& acc) -> Result<Value> {
        TXF_TRY(d, child.down());
        (void)d;
        TXF_TRY(text, child.fetch_file());
        TXF_TRY(v, parse_score(text, child.lctx().path));
        int64_t w = renorm_value(cmin, cmax, gmin, gmax, v);
        TXF_TRY(s, child.store_file(std::to_string(w)));
        (void)s;
        return acc;
      };
      TXF_TRY(rewrote, ctx.map_comp(rewrite));
      (void)rewrote;
    }
    return Value::integer(count);
  };
}

TxBody stats_body(std::string hw, std::shared_ptr<Stats> out) {
  return [hw, out](TxnCtx& ctx) -> Result<Value> {
    TXF_TRY(at_hw, ctx.goto_name(hw));
    (void)at_hw;
    TXF_TRY(entered, enter_students(ctx));
    (void)entered;
    Stats st;
    int64_t total = 0;
    auto scan = [&](TxnCtx& child, const Value& acc) -> Result<Value> {
      TXF_TRY(d, child.down());
      (void)d;
      TXF_TRY(text, child.fetch_file());
      TXF_TRY(v, parse_score(text, child.lctx().path));
      if (st.count == 0 || v < st.min) st.min = v;
      if (st.count == 0 || v > st.max) st.max = v;
      total += v;
      ++st.count;
      return acc;
    };
    TXF_TRY(scanned, ctx.fold_comp(Value::boolean(true), scan));
    (void)scanned;
    if (st.count > 0) st.mean = (double)total / (double)st.count;
    if (out) *out = st;
    return Value::integer(st.count);
  };
}

namespace {

// queue = Pair(dir, Dir, Comp(Path(x, file), x, filter ...))
Result<std::set<std::string>> queue_items(TxnCtx& ctx) {
  TXF_TRY(a, ctx.into_pair());  // Dir focus
  (void)a;
  TXF_TRY(names, ctx.fetch_dir());
  std::set<std::string> items;
  for (const auto& n : names)
    if (n.size() > 4 && n.size() <= 13 && n.rfind("item", 0) == 0 &&
        n.find_first_not_of("0123456789", 4) == std::string::npos)
      items.insert(n);
  return items;
}

}  // namespace

TxBody queue_push_body(std::string text, std::shared_ptr<std::string> pushed) {
  return [text, pushed](TxnCtx& ctx) -> Result<Value> {
    TXF_TRY(items, queue_items(ctx));  // leaves the Dir focus
    int64_t next_id = 0;
    for (const auto& it : items)
      next_id = std::max<int64_t>(next_id, std::stoll(it.substr(4)) + 1);
    char buf[16];
    snprintf(buf, sizeof buf, "item%04d", (int)next_id);
    std::string name = buf;

    TXF_TRY(dir_names, ctx.fetch_dir());
    std::set<std::string> grown = dir_names;
    grown.insert(name);
    TXF_TRY(stored, ctx.store_dir(grown));
    (void)stored;

    TXF_TRY(n, ctx.next());  // the items comprehension
    (void)n;
    TXF_TRY(at, ctx.goto_name(name));
    (void)at;
    TXF_TRY(wrote, ctx.store_file(text));
    (void)wrote;
    if (pushed) *pushed = name;
    return Value::str(name);
  };
}

TxBody queue_pop_body(std::shared_ptr<std::string> out) {
  return [out](TxnCtx& ctx) -> Result<Value> {
    TXF_TRY(items, queue_items(ctx));
    if (items.empty()) return undefined("EmptyQueue", "");
    std::string first = *items.begin();

    TXF_TRY(n, ctx.next());  // comprehension focus
    (void)n;
    TXF_TRY(at, ctx.goto_name(first));
    (void)at;
    TXF_TRY(text, ctx.fetch_file());
    TXF_TRY(u, ctx.up());
    (void)u;
    TXF_TRY(o, ctx.out());  // back to the comprehension focus
    (void)o;
    TXF_TRY(p, ctx.prev());  // the Dir focus
    (void)p;
    TXF_TRY(names, ctx.fetch_dir());
    std::set<std::string> shrunk = names;
    shrunk.erase(first);
    TXF_TRY(stored, ctx.store_dir(shrunk));
    (void)stored;
    if (out) *out = text;
    return Value::str(text);
  };
}

}  // namespace txf::demo
