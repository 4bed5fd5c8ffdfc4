#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diolab/approx.hpp"
#include "diolab/real.hpp"

namespace diolab {

struct Target {
  std::string label;  // also the file stem
  RealSpec spec;
};

enum class TaskKind { sweep, hurwitz, zaharescu, prime, screen };

const char* task_kind_name(TaskKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::sweep;
  std::string id;  // "<index>-<kind>" unless named in the config
  std::uint64_t bound = 1;  // bmax, or pmax for prime tasks

  // sweep / screen
  int k = 2;
  int score_exponent = 3;
  std::optional<mpq_class> log_epsilon;
  // hurwitz
  mpq_class c;
  // zaharescu
  mpq_class theta;
};

struct OutputFormats {
  bool csv = true;
  bool svg = false;
  bool summary = true;
};

struct ExperimentPlan {
  std::vector<Target> targets;
  std::vector<TaskSpec> tasks;
  std::filesystem::path output_dir = "out";
  OutputFormats formats;
  Retention retention = Retention::records_only;
  std::uint64_t retention_cap = 100000;
  /// Wall times go into the summary only when set (they break byte identity).
  bool timing = false;
};

/// Thrown by load_config / parse_config. `where` is "line L, column C" for
/// syntax errors or a JSON path such as "tasks[2].theta" for field errors.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::invalid_argument(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

ExperimentPlan parse_config(std::string_view json_text);
ExperimentPlan load_config(const std::filesystem::path& path);

namespace status {
inline constexpr const char* ok = "ok";
inline constexpr const char* failed_io = "failed-io";
inline constexpr const char* failed_computation = "failed-computation";
inline constexpr const char* failed_certification = "failed-certification";
}  // namespace status

struct TaskReport {
  std::string task;
  std::string kind;
  std::string target;  // empty for screen tasks
  std::string status = status::ok;
  double wall_ms = 0;
  std::vector<std::string> files;
  bool untrusted = false;
  std::optional<std::uint64_t> trust_bound;
  std::vector<std::string> notes;
};

struct RunReport {
  std::vector<TaskReport> tasks;
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

/// Runs every task of the plan and writes the requested files. Per-task
/// failures are recorded, never thrown.
RunReport run(const ExperimentPlan& plan, int threads = 1);

/// The pinned sweep CSV header.
inline constexpr const char* kSweepCsvHeader =
    "b,a,error_center,error_radius,score,log_score,is_record,untrusted";

}  // namespace diolab
