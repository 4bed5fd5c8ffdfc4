#include <fstream>
#include <set>
#include <sstream>

#include "diolab/errors.hpp"
#include "diolab/harness.hpp"
#include "json.hpp"

namespace diolab {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw ConfigError(where, message);
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

bool is_stem(const std::string& s) {
  if (s.empty() || s[0] == '.' || s.size() > 100) return false;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(where + "." + key, "unknown field");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing required field");
  return *it;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

std::uint64_t as_bound(const json& v, const std::string& where) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    const auto n = v.get<std::uint64_t>();
    if (n >= 1) return n;
  } else if (!v.is_number_integer()) {
    fail(where, "expected an integer bound");
  }
  fail(where, "bound must be >= 1");
}

int as_small_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0 || n > 64) fail(where, "out of range");
  return static_cast<int>(n);
}

// Exact reading of "0.3", "3/10", 0.3 or 3.
mpq_class as_exact(const json& v, const std::string& where) {
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_number()) {
    text = v.dump();
  } else {
    fail(where, "expected a number or a decimal/fraction string");
  }
  try {
    if (text.find_first_of("eE") != std::string::npos) {
      fail(where, "exponent notation is not accepted: " + text);
    }
    if (text.find('/') != std::string::npos) return parse_fraction(text);
    return parse_decimal_rational(text);
  } catch (const ParseError& e) {
    fail(where, e.what());
  }
}

TaskSpec parse_task(const json& t, const std::string& where, std::size_t index) {
  if (!t.is_object()) fail(where, "expected an object");
  const std::string type = as_string(require(t, where, "type"), where + ".type");
  TaskSpec task;
  if (type == "sweep") {
    only_keys(t, where, {"type", "name", "k", "bmax", "score_exponent", "log_epsilon"});
    task.kind = TaskKind::sweep;
    task.k = as_small_int(require(t, where, "k"), where + ".k");
    task.bound = as_bound(require(t, where, "bmax"), where + ".bmax");
    task.score_exponent = task.k + 1;
    if (t.contains("score_exponent")) {
      task.score_exponent = as_small_int(t["score_exponent"], where + ".score_exponent");
    }
    if (t.contains("log_epsilon")) {
      task.log_epsilon = as_exact(t["log_epsilon"], where + ".log_epsilon");
      if (sgn(*task.log_epsilon) <= 0) fail(where + ".log_epsilon", "epsilon must be > 0");
    }
    try {
      NormalizationRule{task.k, task.score_exponent, task.log_epsilon}.validate();
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  } else if (type == "hurwitz") {
    only_keys(t, where, {"type", "name", "c", "bmax"});
    task.kind = TaskKind::hurwitz;
    task.k = 1;
    task.c = as_exact(require(t, where, "c"), where + ".c");
    if (sgn(task.c) <= 0) fail(where + ".c", "threshold c must be > 0");
    task.bound = as_bound(require(t, where, "bmax"), where + ".bmax");
  } else if (type == "zaharescu") {
    only_keys(t, where, {"type", "name", "theta", "bmax"});
    task.kind = TaskKind::zaharescu;
    task.theta = as_exact(require(t, where, "theta"), where + ".theta");
    if (sgn(task.theta) <= 0 || task.theta >= mpq_class(2, 3)) {
      fail(where + ".theta", "theta must lie in the open range (0, 2/3), got " +
                                 require(t, where, "theta").dump());
    }
    task.bound = as_bound(require(t, where, "bmax"), where + ".bmax");
  } else if (type == "prime") {
    only_keys(t, where, {"type", "name", "pmax"});
    task.kind = TaskKind::prime;
    task.bound = as_bound(require(t, where, "pmax"), where + ".pmax");
  } else if (type == "screen") {
    only_keys(t, where, {"type", "name", "k", "bmax"});
    task.kind = TaskKind::screen;
    task.k = as_small_int(require(t, where, "k"), where + ".k");
    if (task.k != 1 && task.k != 2) fail(where + ".k", "k must be 1 or 2");
    task.score_exponent = task.k + 1;
    task.bound = as_bound(require(t, where, "bmax"), where + ".bmax");
  } else {
    fail(where + ".type",
         "unknown task type '" + type + "' (sweep, hurwitz, zaharescu, prime, screen)");
  }
  task.id = std::to_string(index) + "-" + type;
  if (t.contains("name")) {
    task.id = as_string(t["name"], where + ".name");
    if (!is_stem(task.id)) fail(where + ".name", "names use [A-Za-z0-9_.-] only");
  }
  return task;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

ExperimentPlan parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string message = e.what();
    if (auto p = message.find("parse error"); p != std::string::npos) message = message.substr(p);
    fail(line_column(json_text, at), message);
  }
  if (!root.is_object()) fail("$", "config must be a JSON object");
  only_keys(root, "$", {"targets", "tasks", "output", "retention", "retention_cap", "timing"});

  ExperimentPlan plan;
  const json& targets = require(root, "$", "targets");
  if (!targets.is_array()) fail("targets", "expected an array");
  if (targets.empty()) fail("targets", "targets must be non-empty");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = index_path("targets", i);
    const json& t = targets[i];
    if (!t.is_object()) fail(where, "expected an object");
    only_keys(t, where, {"label", "alpha"});
    Target target{as_string(require(t, where, "label"), where + ".label"),
                  RealSpec::rational(mpq_class(0))};
    if (!is_stem(target.label)) fail(where + ".label", "labels use [A-Za-z0-9_.-] only");
    if (!labels.insert(target.label).second) {
      fail(where + ".label", "duplicate label '" + target.label + "'");
    }
    const std::string alpha = as_string(require(t, where, "alpha"), where + ".alpha");
    try {
      target.spec = parse_real(alpha);
    } catch (const ParseError& e) {
      fail(where + ".alpha", e.what());
    }
    plan.targets.push_back(std::move(target));
  }

  const json& tasks = require(root, "$", "tasks");
  if (!tasks.is_array()) fail("tasks", "expected an array");
  if (tasks.empty()) fail("tasks", "tasks must be non-empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    TaskSpec task = parse_task(tasks[i], index_path("tasks", i), i);
    if (!ids.insert(task.id).second) {
      fail(index_path("tasks", i) + ".name", "duplicate task name '" + task.id + "'");
    }
    plan.tasks.push_back(std::move(task));
  }

  if (root.contains("output")) {
    const json& out = root["output"];
    if (!out.is_object()) fail("output", "expected an object");
    only_keys(out, "output", {"dir", "formats"});
    if (out.contains("dir")) {
      const std::string dir = as_string(out["dir"], "output.dir");
      if (dir.empty()) fail("output.dir", "must be non-empty");
      plan.output_dir = dir;
    }
    if (out.contains("formats")) {
      const json& formats = out["formats"];
      if (!formats.is_array()) fail("output.formats", "expected an array");
      plan.formats = {false, false, false};
      for (std::size_t i = 0; i < formats.size(); ++i) {
        const std::string where = index_path("output.formats", i);
        const std::string f = as_string(formats[i], where);
        if (f == "csv") {
          plan.formats.csv = true;
        } else if (f == "svg") {
          plan.formats.svg = true;
        } else if (f == "summary") {
          plan.formats.summary = true;
        } else {
          fail(where, "unknown format '" + f + "' (csv, svg, summary)");
        }
      }
    }
  }
  if (root.contains("retention")) {
    const std::string r = as_string(root["retention"], "retention");
    if (r == "records-only") {
      plan.retention = Retention::records_only;
    } else if (r == "full") {
      plan.retention = Retention::full;
    } else {
      fail("retention", "expected \"records-only\" or \"full\"");
    }
  }
  if (root.contains("retention_cap")) {
    plan.retention_cap = as_bound(root["retention_cap"], "retention_cap");
  }
  if (root.contains("timing")) {
    if (!root["timing"].is_boolean()) fail("timing", "expected true or false");
    plan.timing = root["timing"].get<bool>();
  }
  return plan;
}

ExperimentPlan load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string(), "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace diolab
