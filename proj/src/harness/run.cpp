#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "diolab/errors.hpp"
#include "diolab/harness.hpp"
#include "diolab/prime.hpp"
#include "json.hpp"

namespace diolab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::sweep: return "sweep";
    case TaskKind::hurwitz: return "hurwitz";
    case TaskKind::zaharescu: return "zaharescu";
    case TaskKind::prime: return "prime";
    case TaskKind::screen: return "screen";
  }
  return "?";
}

std::size_t RunReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      tasks.begin(), tasks.end(), [](const TaskReport& t) { return t.status != status::ok; }));
}

namespace {

constexpr int kDigits = 40;
constexpr int kRadiusDigits = 6;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string center(const BallValue& v) { return format_significant(v.center, kDigits); }
std::string radius(const BallValue& v) { return format_upper(v.radius, kRadiusDigits); }

ordered_json ball_json(const BallValue& v) {
  ordered_json j;
  j["center"] = center(v);
  j["radius"] = radius(v);
  return j;
}

ordered_json ball_json(const BallValue& v, std::uint64_t argmin) {
  ordered_json j = ball_json(v);
  j["argmin_b"] = argmin;
  return j;
}

template <class T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

/// Writes one output file, recording it on success.
void write_file(const fs::path& path, const std::string& content, TaskReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoFailure("write failed for " + path.string());
  report.files.push_back(path.filename().string());
}

// The summary entry carries every key for every task; inapplicable ones are null.
ordered_json blank_summary(const TaskSpec& task, const std::string& target,
                           const std::string& alpha) {
  ordered_json j;
  j["task"] = task.id;
  j["kind"] = task_kind_name(task.kind);
  j["target"] = target.empty() ? ordered_json(nullptr) : ordered_json(target);
  j["alpha"] = alpha.empty() ? ordered_json(nullptr) : ordered_json(alpha);
  j["status"] = status::ok;
  for (const char* key : {"c_all", "c_records", "bf_inf", "zaharescu_count",
                          "record_count", "exact_hit", "runtime_ms"}) {
    j[key] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------
// SVG scatter of (ln b, score)

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string scatter_svg(const std::string& title, const std::vector<ApproxSample>& points,
                        std::uint64_t bmax) {
  constexpr double kW = 640, kH = 400, kM = 50;
  const double xmax = bmax > 1 ? std::log(static_cast<double>(bmax)) : 1.0;
  double ymax = 0;
  for (const auto& p : points) ymax = std::max(ymax, p.score.approx());
  if (ymax <= 0) ymax = 1;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
       "viewBox=\"0 0 640 400\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s << "<line x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  s << "<line x1=\"50\" y1=\"350\" x2=\"50\" y2=\"50\" stroke=\"black\"/>\n";
  s << "<text x=\"320\" y=\"30\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  s << "<text x=\"320\" y=\"385\" text-anchor=\"middle\" font-size=\"12\">ln b</text>\n";
  s << "<text x=\"15\" y=\"200\" font-size=\"12\">score</text>\n";
  for (const auto& p : points) {
    const double x = kM + (kW - 2 * kM) * std::log(static_cast<double>(p.b)) / xmax;
    const double y = kH - kM - (kH - 2 * kM) * p.score.approx() / ymax;
    s << "<circle cx=\"" << fixed2(x) << "\" cy=\"" << fixed2(y) << "\" r=\"2\" fill=\""
      << (p.is_record ? "crimson" : "steelblue") << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// ---------------------------------------------------------------------------

struct Unit {
  const ExperimentPlan& plan;
  const TaskSpec& task;
  const Target* target;  // null for screen
  int threads;
  TaskReport& report;
  ordered_json& summary;

  fs::path file(const std::string& ext) const {
    const std::string stem = target ? target->label + "." + task.id : task.id;
    return plan.output_dir / (stem + ext);
  }

  void note_trust(std::optional<std::uint64_t> bound) {
    if (!bound) return;
    report.trust_bound = bound;
    if (*bound < task.bound) {
      report.untrusted = true;
      report.notes.push_back("results for denominators above " + std::to_string(*bound) +
                             " are flagged untrusted");
    }
  }

  void run_sweep() {
    SweepOptions options;
    options.threads = threads;
    options.retention = plan.retention;
    options.retention_cap = plan.retention_cap;
    const NormalizationRule rule{task.k, task.score_exponent, task.log_epsilon};
    const SweepResult r = sweep(target->spec, rule, task.bound, options);
    note_trust(r.trust_bound);
    const auto& rows = plan.retention == Retention::full ? r.samples : r.records;
    if (plan.formats.csv) {
      std::ostringstream csv;
      csv << kSweepCsvHeader << '\n';
      for (const ApproxSample& s : rows) {
        csv << s.b << ',' << s.a << ',' << center(s.error) << ',' << radius(s.error) << ','
            << center(s.score) << ',' << (s.log_score ? center(*s.log_score) : "") << ','
            << (s.is_record ? 1 : 0) << ',' << (s.untrusted ? 1 : 0) << '\n';
      }
      write_file(file(".csv"), csv.str(), report);
    }
    if (plan.formats.svg) {
      write_file(file(".svg"),
                 scatter_svg(target->label + " " + task.id, rows, task.bound), report);
    }
    summary["c_all"] = ball_json(r.c_all, r.c_all_argmin);
    summary["c_records"] = ball_json(r.c_records, r.c_records_argmin);
    if (r.log_min) summary["bf_inf"] = ball_json(*r.log_min, r.log_min_argmin);
    summary["record_count"] = r.records.size();
    summary["exact_hit"] = optional_json(r.exact_hit);
    summary["max_bits"] = r.max_bits;
  }

  void run_hurwitz() {
    const HurwitzResult r =
        hurwitz_solutions(target->spec, RealSpec::rational(task.c), task.bound, threads);
    if (!r.undecided.empty()) {
      report.untrusted = true;
      report.notes.push_back(std::to_string(r.undecided.size()) +
                             " comparisons undecided at maximum precision");
    }
    if (plan.formats.csv) {
      std::ostringstream csv;
      csv << "a,b,status\n";
      for (const auto& s : r.solutions) csv << s.a << ',' << s.b << ",solution\n";
      for (const auto& s : r.undecided) csv << s.a << ',' << s.b << ",undecided\n";
      write_file(file(".csv"), csv.str(), report);
    }
    summary["solution_count"] = r.solutions.size();
    summary["undecided_count"] = r.undecided.size();
    summary["max_bits"] = r.max_bits;
  }

  void run_zaharescu() {
    const ZaharescuResult r = zaharescu_count(target->spec, task.theta, task.bound, threads);
    if (!r.undecided.empty()) {
      report.untrusted = true;
      report.notes.push_back(std::to_string(r.undecided.size()) +
                             " comparisons undecided at maximum precision");
    }
    if (plan.formats.csv) {
      std::ostringstream csv;
      csv << "b,status\n";
      for (auto b : r.witnesses) csv << b << ",witness\n";
      for (auto b : r.undecided) csv << b << ",undecided\n";
      write_file(file(".csv"), csv.str(), report);
    }
    summary["zaharescu_count"] = r.count;
    summary["undecided_count"] = r.undecided.size();
    summary["max_bits"] = r.max_bits;
  }

  void run_prime() {
    const PrimeSweepResult r = prime_sweep(target->spec, task.bound, threads);
    note_trust(r.trust_bound);
    if (plan.formats.csv) {
      std::ostringstream csv;
      csv << "p,z,error_center,error_radius,tau,is_record,untrusted\n";
      for (const PrimeSample& s : r.records) {
        csv << s.p << ',' << s.z << ',' << center(s.error) << ',' << radius(s.error) << ','
            << (s.tau ? center(*s.tau) : "") << ',' << (s.is_record ? 1 : 0) << ','
            << (s.untrusted ? 1 : 0) << '\n';
      }
      write_file(file(".csv"), csv.str(), report);
    }
    summary["record_count"] = r.records.size();
    summary["exact_hit"] = optional_json(r.exact_hit);
    summary["denominators"] = r.denominators;
    summary["tau_min"] = r.tau_min ? ball_json(*r.tau_min) : ordered_json(nullptr);
    summary["tau_max"] = r.tau_max ? ball_json(*r.tau_max) : ordered_json(nullptr);
    summary["tau_last"] = r.tau_last ? ball_json(*r.tau_last) : ordered_json(nullptr);
    summary["max_bits"] = r.max_bits;
  }

  void run_screen() {
    std::vector<RealSpec> specs;
    for (const Target& t : plan.targets) specs.push_back(t.spec);
    const NormalizationRule rule{task.k, task.k + 1, std::nullopt};
    const std::vector<ScreenEntry> ranking = screen(specs, rule, task.bound, threads);
    auto label_of = [&](const RealSpec& spec) {
      for (const Target& t : plan.targets) {
        if (t.spec == spec) return t.label;
      }
      return std::string();
    };
    ordered_json ranks = ordered_json::array();
    std::ostringstream csv;
    csv << "rank,label,alpha,c_all_center,c_all_radius,c_records_center,argmin_b,"
           "record_count,exact_hit,order_certified,error\n";
    std::size_t rank = 0;
    for (const ScreenEntry& e : ranking) {
      ++rank;
      csv << rank << ',' << label_of(e.spec) << ",\"" << e.spec.text() << "\",";
      if (e.estimate) {
        csv << center(e.estimate->c_all) << ',' << radius(e.estimate->c_all) << ','
            << center(e.estimate->c_records) << ',' << e.estimate->argmin_b;
      } else {
        csv << ",,,";
      }
      csv << ',' << e.record_count << ','
          << (e.exact_hit ? std::to_string(*e.exact_hit) : "") << ','
          << (e.order_certified ? 1 : 0) << ",\"" << e.error << "\"\n";
      ordered_json entry;
      entry["rank"] = rank;
      entry["label"] = label_of(e.spec);
      entry["c_all"] = e.estimate ? ball_json(e.estimate->c_all) : ordered_json(nullptr);
      entry["order_certified"] = e.order_certified;
      entry["error"] = e.error.empty() ? ordered_json(nullptr) : ordered_json(e.error);
      ranks.push_back(std::move(entry));
      if (!e.error.empty()) report.notes.push_back(label_of(e.spec) + ": " + e.error);
    }
    if (plan.formats.csv) write_file(file(".csv"), csv.str(), report);
    summary["ranking"] = std::move(ranks);
  }

  void execute() {
    switch (task.kind) {
      case TaskKind::sweep: run_sweep(); break;
      case TaskKind::hurwitz: run_hurwitz(); break;
      case TaskKind::zaharescu: run_zaharescu(); break;
      case TaskKind::prime: run_prime(); break;
      case TaskKind::screen: run_screen(); break;
    }
  }
};

ordered_json report_json(const RunReport& report) {
  ordered_json tasks = ordered_json::array();
  for (const TaskReport& t : report.tasks) {
    ordered_json j;
    j["task"] = t.task;
    j["kind"] = t.kind;
    j["target"] = t.target.empty() ? ordered_json(nullptr) : ordered_json(t.target);
    j["status"] = t.status;
    j["wall_ms"] = t.wall_ms;
    j["files"] = t.files;
    j["untrusted"] = t.untrusted;
    j["trust_bound"] = optional_json(t.trust_bound);
    j["notes"] = t.notes;
    tasks.push_back(std::move(j));
  }
  ordered_json root;
  root["failures"] = report.failures();
  root["tasks"] = std::move(tasks);
  return root;
}

}  // namespace

RunReport run(const ExperimentPlan& plan, int threads) {
  RunReport report;
  // one unit per (task, target); screen tasks span all targets at once
  struct Pending {
    const TaskSpec* task;
    const Target* target;
  };
  std::vector<Pending> units;
  for (const TaskSpec& task : plan.tasks) {
    if (task.kind == TaskKind::screen) {
      units.push_back({&task, nullptr});
    } else {
      for (const Target& target : plan.targets) units.push_back({&task, &target});
    }
  }

  std::error_code ec;
  fs::create_directories(plan.output_dir, ec);
  const bool dir_ok = !ec && fs::is_directory(plan.output_dir);

  ordered_json summaries = ordered_json::array();
  for (const Pending& u : units) {
    TaskReport tr;
    tr.task = u.task->id;
    tr.kind = task_kind_name(u.task->kind);
    if (u.target) tr.target = u.target->label;
    ordered_json summary =
        blank_summary(*u.task, tr.target, u.target ? u.target->spec.text() : std::string());
    const auto start = std::chrono::steady_clock::now();
    if (!dir_ok) {
      tr.status = status::failed_io;
      tr.notes.push_back("output directory " + plan.output_dir.string() + " is not writable" +
                         (ec ? ": " + ec.message() : std::string()));
    } else {
      try {
        Unit{plan, *u.task, u.target, threads, tr, summary}.execute();
      } catch (const IoFailure& e) {
        tr.status = status::failed_io;
        tr.notes.push_back(e.what());
      } catch (const CertificationError& e) {
        tr.status = status::failed_certification;
        tr.notes.push_back(e.what());
      } catch (const std::exception& e) {
        tr.status = status::failed_computation;
        tr.notes.push_back(e.what());
      }
    }
    tr.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    summary["status"] = tr.status;
    if (tr.status != status::ok) summary["error"] = tr.notes.back();
    if (plan.timing) summary["runtime_ms"] = tr.wall_ms;
    summaries.push_back(std::move(summary));
    report.tasks.push_back(std::move(tr));
  }
  if (!dir_ok) return report;

  // files shared by all tasks; a failure here marks every task failed-io
  auto write_shared = [&](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      for (TaskReport& t : report.tasks) {
        t.status = status::failed_io;
        t.notes.push_back("cannot write " + path.string());
      }
    }
  };
  if (plan.formats.summary) {
    ordered_json root;
    root["tasks"] = std::move(summaries);
    write_shared(plan.output_dir / "summary.json", root.dump(2) + "\n");
  }
  write_shared(plan.output_dir / "report.json", report_json(report).dump(2) + "\n");
  return report;
}

}  // namespace diolab
