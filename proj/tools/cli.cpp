#include "cli.hpp"

#include <omp.h>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diolab/approx.hpp"
#include "diolab/errors.hpp"
#include "diolab/harness.hpp"
#include "diolab/prime.hpp"
#include "json.hpp"

namespace diolab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kShownDigits = 20;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string show(const BallValue& v) { return format_significant(v.center, kShownDigits); }
std::string show_radius(const BallValue& v) { return format_upper(v.radius, 3); }

ordered_json ball(const BallValue& v) {
  return {{"center", format_significant(v.center, 40)}, {"radius", format_upper(v.radius, 6)}};
}

RealSpec alpha_arg(const std::string& text, const char* flag) {
  try {
    return parse_real(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + " '" + text + "': " + e.what());
  }
}

mpq_class decimal_arg(const std::string& text, const char* flag) {
  try {
    return parse_decimal_rational(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + " '" + text + "': " + e.what());
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) parts.push_back(cur);
  return parts;
}

void write_sweep_csv(const std::string& path, const std::vector<ApproxSample>& rows) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << kSweepCsvHeader << '\n';
  for (const ApproxSample& s : rows) {
    f << s.b << ',' << s.a << ',' << format_significant(s.error.center, 40) << ','
      << format_upper(s.error.radius, 6) << ',' << format_significant(s.score.center, 40)
      << ',' << (s.log_score ? format_significant(s.log_score->center, 40) : "") << ','
      << (s.is_record ? 1 : 0) << ',' << (s.untrusted ? 1 : 0) << '\n';
  }
  if (!f.flush()) throw std::runtime_error("write failed for " + path);
}

void print_records(std::ostream& out, const SweepResult& r) {
  out << std::setw(12) << "b" << std::setw(16) << "a" << "  " << std::left << std::setw(28)
      << "error" << std::setw(12) << "radius" << std::setw(28) << "score" << "note"
      << std::right << '\n';
  for (const ApproxSample& s : r.records) {
    std::string note;
    if (r.exact_hit && *r.exact_hit == s.b) note = "exact hit";
    if (s.untrusted) note += note.empty() ? "untrusted" : ", untrusted";
    out << std::setw(12) << s.b << std::setw(16) << s.a << "  " << std::left << std::setw(28)
        << show(s.error) << std::setw(12) << show_radius(s.error) << std::setw(28)
        << show(s.score) << note << std::right << '\n';
  }
}

void print_common_summary(std::ostream& out, const SweepResult& r) {
  out << "records: " << r.records.size() << '\n';
  out << "c_all: " << show(r.c_all) << " +/- " << show_radius(r.c_all) << " at b="
      << r.c_all_argmin << '\n';
  out << "c_records: " << show(r.c_records) << " +/- " << show_radius(r.c_records) << " at b="
      << r.c_records_argmin << '\n';
  out << "exact hit: " << (r.exact_hit ? "b=" + std::to_string(*r.exact_hit) : "none") << '\n';
  if (r.trust_bound) out << "trusted up to b=" << *r.trust_bound << '\n';
  out << "max bits: " << r.max_bits << '\n';
}

ordered_json sweep_json(const SweepResult& r) {
  ordered_json j;
  j["alpha"] = r.spec.text();
  j["k"] = r.rule.k;
  j["score_exponent"] = r.rule.score_exponent;
  j["bmax"] = r.bmax;
  ordered_json rows = ordered_json::array();
  for (const ApproxSample& s : r.records) {
    ordered_json row;
    row["b"] = s.b;
    row["a"] = s.a;
    row["error"] = ball(s.error);
    row["score"] = ball(s.score);
    if (s.log_score) row["log_score"] = ball(*s.log_score);
    row["untrusted"] = s.untrusted;
    rows.push_back(std::move(row));
  }
  j["records"] = std::move(rows);
  j["c_all"] = ball(r.c_all);
  j["c_all_argmin"] = r.c_all_argmin;
  j["c_records"] = ball(r.c_records);
  j["c_records_argmin"] = r.c_records_argmin;
  if (r.log_min) {
    j["bf_inf"] = ball(*r.log_min);
    j["bf_inf_argmin"] = r.log_min_argmin;
  }
  j["exact_hit"] = r.exact_hit ? ordered_json(*r.exact_hit) : ordered_json(nullptr);
  j["trust_bound"] = r.trust_bound ? ordered_json(*r.trust_bound) : ordered_json(nullptr);
  j["max_bits"] = r.max_bits;
  return j;
}

// Options shared by the computing subcommands.
struct Common {
  std::string alpha;
  std::uint64_t bound = 0;
  int threads = 0;
  std::string csv;
  bool json = false;

  void add(CLI::App* app, const char* bound_flag, bool with_alpha = true) {
    if (with_alpha) {
      app->add_option("--alpha", alpha, "target real (rat:p/q, quad:(P+Q*sqrt(D))/R, pi, e, dec:...)")
          ->required();
    }
    app->add_option(bound_flag, bound, "largest denominator")
        ->required()
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
    app->add_option("--threads", threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--csv", csv, "also write a CSV file");
    app->add_flag("--json", json, "print JSON instead of a table");
  }
  int workers() const { return threads > 0 ? threads : omp_get_max_threads(); }
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"diolab: certified experiments on rational approximations a/b, a/b^2 and z/p"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Common records_opts, hurwitz_opts, conj_opts, bf_opts, zah_opts, prime_opts, screen_opts;
  int records_k = 1, screen_k = 2;
  std::string c_text, eps_text, theta_text, alphas_text, config_path;
  std::size_t witness_limit = 20;
  int batch_threads = 0;

  auto* records = app.add_subcommand("records", "error records of |alpha - a/b^k| over b <= bmax");
  records_opts.add(records, "--bmax");
  records->add_option("--k", records_k, "denominator exponent")->required()->check(CLI::IsMember({1, 2}));
  records->footer(
      "Evaluates, for each b, e(b) = min over a of |alpha - a/b^k| with a the nearest\n"
      "integer to alpha*b^k, and lists the b where e(b) < e(b') for all b' < b.\n"
      "The score is b^(k+1) * e(b).");

  auto* hurwitz = app.add_subcommand("hurwitz", "solutions of |alpha - a/b| < c/b^2");
  hurwitz_opts.add(hurwitz, "--bmax");
  hurwitz->add_option("--c", c_text, "positive threshold as p/q")->required();
  hurwitz->footer(
      "Lists every (a, b) with b <= bmax and |alpha - a/b| < c/b^2, decided with\n"
      "certified arithmetic. For the golden ratio, c = 1/sqrt(5) is the critical value.");

  auto* conjecture = app.add_subcommand("conjecture", "minimum of b^3 |alpha - a/b^2|");
  conj_opts.add(conjecture, "--bmax");
  conjecture->footer(
      "Evaluates c(B) = min over b <= B of b^3 |alpha - a/b^2| (a nearest to alpha*b^2),\n"
      "the empirical constant in |alpha - a/b^2| < c(alpha)/b^3. Reports the minimum over\n"
      "all b and over error records.");

  auto* bf = app.add_subcommand("bf", "minimum of b^3 ln^(1+eps)(b) |alpha - a/b^2|");
  bf_opts.add(bf, "--bmax");
  bf->add_option("--epsilon", eps_text, "epsilon > 0 as a decimal")->required();
  bf->footer(
      "Evaluates min over 2 <= b <= bmax of b^3 ln^(1+eps)(b) |alpha - a/b^2|, the\n"
      "quantity bounded below by c(eps) > 0 in |alpha - a/b^2| < c/(b^3 ln^(1+eps) b).");

  auto* zaharescu = app.add_subcommand("zaharescu", "count of |alpha - a/b^2| < 1/b^(2+theta)");
  zah_opts.add(zaharescu, "--bmax");
  zaharescu->add_option("--theta", theta_text, "0 < theta < 2/3 as a decimal")->required();
  zaharescu->add_option("--witnesses", witness_limit, "how many witnesses to print");
  zaharescu->footer(
      "Counts b <= bmax with |alpha - a/b^2| < 1/b^(2+theta) for the nearest a, with\n"
      "0 < theta < 2/3 (the extra factor of the original statement is taken as 1).");

  auto* primes = app.add_subcommand("primes", "records of |alpha - z/p| over p prime or 1");
  prime_opts.add(primes, "--pmax");
  primes->footer(
      "For p = 1 and every prime p <= pmax evaluates |alpha - z/p| with z nearest to\n"
      "alpha*p, lists the error records and tau(p) = -ln|alpha - z/p| / ln p.");

  auto* screen_cmd = app.add_subcommand("screen", "rank candidates by min b^(k+1) |alpha - a/b^k|");
  screen_opts.add(screen_cmd, "--bmax", false);
  screen_cmd->add_option("--alphas", alphas_text, "comma-separated target reals")->required();
  screen_cmd->add_option("--k", screen_k, "denominator exponent")->required()->check(CLI::IsMember({1, 2}));
  screen_cmd->footer(
      "Ranks candidates by c(B) = min over b <= bmax of b^(k+1) |alpha - a/b^k|,\n"
      "largest first: larger values mean alpha is harder to approximate.");

  auto* batch = app.add_subcommand("batch", "run an experiment config");
  batch->add_option("--config", config_path, "JSON experiment config")->required();
  batch->add_option("--threads", batch_threads, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  batch->footer("Runs every task of the config. Exit code 3 when some tasks fail.");

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: unknown subcommand '" << argv[1]
        << "' (records, hurwitz, conjecture, bf, zaharescu, primes, screen, batch)\n";
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (records->parsed()) {
      const RealSpec alpha = alpha_arg(records_opts.alpha, "--alpha");
      SweepOptions o;
      o.threads = records_opts.workers();
      const SweepResult r = sweep(alpha, {records_k, records_k + 1, std::nullopt},
                                  records_opts.bound, o);
      if (!records_opts.csv.empty()) write_sweep_csv(records_opts.csv, r.records);
      if (records_opts.json) {
        out << sweep_json(r).dump(2) << '\n';
      } else {
        print_records(out, r);
        print_common_summary(out, r);
      }
      return 0;
    }
    if (hurwitz->parsed()) {
      const RealSpec alpha = alpha_arg(hurwitz_opts.alpha, "--alpha");
      mpq_class c;
      try {
        c = parse_fraction(c_text);
      } catch (const ParseError& e) {
        throw UsageError("--c '" + c_text + "': expected an exact rational p/q (" + e.what() + ")");
      }
      if (sgn(c) <= 0) throw UsageError("--c '" + c_text + "': threshold must be positive");
      const HurwitzResult r = hurwitz_solutions(alpha, RealSpec::rational(c),
                                                hurwitz_opts.bound, hurwitz_opts.workers());
      if (!hurwitz_opts.csv.empty()) {
        std::ofstream f(hurwitz_opts.csv, std::ios::binary | std::ios::trunc);
        f << "a,b,status\n";
        for (const auto& s : r.solutions) f << s.a << ',' << s.b << ",solution\n";
        for (const auto& s : r.undecided) f << s.a << ',' << s.b << ",undecided\n";
        if (!f.flush()) throw std::runtime_error("cannot write " + hurwitz_opts.csv);
      }
      if (hurwitz_opts.json) {
        ordered_json j;
        j["alpha"] = alpha.text();
        j["c"] = c.get_str();
        j["bmax"] = hurwitz_opts.bound;
        ordered_json sol = ordered_json::array(), und = ordered_json::array();
        for (const auto& s : r.solutions) sol.push_back({{"a", s.a}, {"b", s.b}});
        for (const auto& s : r.undecided) und.push_back({{"a", s.a}, {"b", s.b}});
        j["solutions"] = std::move(sol);
        j["undecided"] = std::move(und);
        j["max_bits"] = r.max_bits;
        out << j.dump(2) << '\n';
      } else {
        for (const auto& s : r.solutions) out << "a=" << s.a << " b=" << s.b << '\n';
        for (const auto& s : r.undecided) out << "undecided: a=" << s.a << " b=" << s.b << '\n';
        out << "solutions: " << r.solutions.size() << '\n';
      }
      return 0;
    }
    if (conjecture->parsed() || bf->parsed()) {
      const bool is_bf = bf->parsed();
      const Common& opts = is_bf ? bf_opts : conj_opts;
      const RealSpec alpha = alpha_arg(opts.alpha, "--alpha");
      NormalizationRule rule = NormalizationRule::conjecture();
      if (is_bf) {
        const mpq_class eps = decimal_arg(eps_text, "--epsilon");
        if (sgn(eps) <= 0) throw UsageError("--epsilon '" + eps_text + "': must be > 0");
        rule = NormalizationRule::borosh_fraenkel(eps);
      }
      SweepOptions o;
      o.threads = opts.workers();
      const SweepResult r = sweep(alpha, rule, opts.bound, o);
      if (!opts.csv.empty()) write_sweep_csv(opts.csv, r.records);
      if (opts.json) {
        out << sweep_json(r).dump(2) << '\n';
      } else if (is_bf) {
        if (r.log_min) {
          out << "bf_inf: " << show(*r.log_min) << " +/- " << show_radius(*r.log_min)
              << " at b=" << r.log_min_argmin << '\n';
        } else {
          out << "bf_inf: undefined (needs bmax >= 2)\n";
        }
        out << "records: " << r.records.size() << '\n';
        if (r.trust_bound) out << "trusted up to b=" << *r.trust_bound << '\n';
        out << "max bits: " << r.max_bits << '\n';
      } else {
        print_common_summary(out, r);
      }
      return 0;
    }
    if (zaharescu->parsed()) {
      const RealSpec alpha = alpha_arg(zah_opts.alpha, "--alpha");
      const mpq_class theta = decimal_arg(theta_text, "--theta");
      if (sgn(theta) <= 0 || theta >= mpq_class(2, 3)) {
        throw UsageError("--theta '" + theta_text + "': theta must lie in (0, 2/3)");
      }
      const ZaharescuResult r =
          zaharescu_count(alpha, theta, zah_opts.bound, zah_opts.workers());
      if (!zah_opts.csv.empty()) {
        std::ofstream f(zah_opts.csv, std::ios::binary | std::ios::trunc);
        f << "b,status\n";
        for (auto b : r.witnesses) f << b << ",witness\n";
        for (auto b : r.undecided) f << b << ",undecided\n";
        if (!f.flush()) throw std::runtime_error("cannot write " + zah_opts.csv);
      }
      if (zah_opts.json) {
        ordered_json j;
        j["alpha"] = alpha.text();
        j["theta"] = theta.get_str();
        j["bmax"] = zah_opts.bound;
        j["count"] = r.count;
        j["witnesses"] = r.witnesses;
        j["undecided"] = r.undecided;
        j["max_bits"] = r.max_bits;
        out << j.dump(2) << '\n';
      } else {
        out << "count: " << r.count << '\n';
        out << "witnesses:";
        for (std::size_t i = 0; i < r.witnesses.size() && i < witness_limit; ++i) {
          out << ' ' << r.witnesses[i];
        }
        out << '\n';
        if (!r.undecided.empty()) out << "undecided: " << r.undecided.size() << '\n';
      }
      return 0;
    }
    if (primes->parsed()) {
      const RealSpec alpha = alpha_arg(prime_opts.alpha, "--alpha");
      const PrimeSweepResult r = prime_sweep(alpha, prime_opts.bound, prime_opts.workers());
      if (!prime_opts.csv.empty()) {
        std::ofstream f(prime_opts.csv, std::ios::binary | std::ios::trunc);
        f << "p,z,error_center,error_radius,tau,is_record,untrusted\n";
        for (const PrimeSample& s : r.records) {
          f << s.p << ',' << s.z << ',' << format_significant(s.error.center, 40) << ','
            << format_upper(s.error.radius, 6) << ','
            << (s.tau ? format_significant(s.tau->center, 40) : "") << ",1,"
            << (s.untrusted ? 1 : 0) << '\n';
        }
        if (!f.flush()) throw std::runtime_error("cannot write " + prime_opts.csv);
      }
      if (prime_opts.json) {
        ordered_json j;
        j["alpha"] = alpha.text();
        j["pmax"] = prime_opts.bound;
        j["denominators"] = r.denominators;
        ordered_json rows = ordered_json::array();
        for (const PrimeSample& s : r.records) {
          ordered_json row;
          row["p"] = s.p;
          row["z"] = s.z;
          row["error"] = ball(s.error);
          row["tau"] = s.tau ? ball(*s.tau) : ordered_json(nullptr);
          row["untrusted"] = s.untrusted;
          rows.push_back(std::move(row));
        }
        j["records"] = std::move(rows);
        for (auto [key, v] : {std::pair{"tau_min", &r.tau_min}, std::pair{"tau_max", &r.tau_max},
                              std::pair{"tau_last", &r.tau_last}}) {
          j[key] = *v ? ball(**v) : ordered_json(nullptr);
        }
        j["exact_hit"] = r.exact_hit ? ordered_json(*r.exact_hit) : ordered_json(nullptr);
        out << j.dump(2) << '\n';
      } else {
        out << std::setw(12) << "p" << std::setw(16) << "z" << "  " << std::left
            << std::setw(28) << "error" << "tau" << std::right << '\n';
        for (const PrimeSample& s : r.records) {
          out << std::setw(12) << s.p << std::setw(16) << s.z << "  " << std::left
              << std::setw(28) << show(s.error) << (s.tau ? show(*s.tau) : "-")
              << std::right << (s.untrusted ? "  untrusted" : "") << '\n';
        }
        out << "denominators: " << r.denominators << '\n';
        out << "records: " << r.records.size() << '\n';
        auto tau = [&](const char* name, const std::optional<BallValue>& v) {
          out << name << ": " << (v ? show(*v) : "-") << '\n';
        };
        tau("tau_min", r.tau_min);
        tau("tau_max", r.tau_max);
        tau("tau_last", r.tau_last);
        out << "exact hit: " << (r.exact_hit ? "p=" + std::to_string(*r.exact_hit) : "none")
            << '\n';
      }
      return 0;
    }
    if (screen_cmd->parsed()) {
      std::vector<RealSpec> specs;
      for (const std::string& s : split_commas(alphas_text)) specs.push_back(alpha_arg(s, "--alphas"));
      if (specs.empty()) throw UsageError("--alphas: at least one candidate is required");
      const auto ranking = screen(specs, {screen_k, screen_k + 1, std::nullopt},
                                  screen_opts.bound, screen_opts.workers());
      if (screen_opts.json) {
        ordered_json rows = ordered_json::array();
        for (const ScreenEntry& e : ranking) {
          ordered_json row;
          row["alpha"] = e.spec.text();
          row["c_all"] = e.estimate ? ball(e.estimate->c_all) : ordered_json(nullptr);
          row["argmin_b"] = e.estimate ? ordered_json(e.estimate->argmin_b) : ordered_json(nullptr);
          row["record_count"] = e.record_count;
          row["order_certified"] = e.order_certified;
          row["error"] = e.error.empty() ? ordered_json(nullptr) : ordered_json(e.error);
          rows.push_back(std::move(row));
        }
        out << rows.dump(2) << '\n';
      } else {
        std::size_t rank = 0;
        for (const ScreenEntry& e : ranking) {
          out << ++rank << ". " << e.spec.text() << "  ";
          if (e.estimate) {
            out << "c_all=" << show(e.estimate->c_all) << " at b=" << e.estimate->argmin_b;
            if (!e.order_certified) out << " (order not certified)";
          } else {
            out << "failed: " << e.error;
          }
          out << '\n';
        }
      }
      return 0;
    }
    if (batch->parsed()) {
      ExperimentPlan plan;
      try {
        plan = load_config(config_path);
      } catch (const ConfigError& e) {
        throw UsageError(std::string("--config '") + config_path + "': " + e.what());
      }
      const RunReport report =
          run(plan, batch_threads > 0 ? batch_threads : omp_get_max_threads());
      for (const TaskReport& t : report.tasks) {
        out << t.task << ' ' << (t.target.empty() ? "*" : t.target) << ' ' << t.status;
        if (t.untrusted) out << " (untrusted)";
        out << '\n';
        if (t.status != status::ok) {
          for (const auto& n : t.notes) err << "  " << t.task << ": " << n << '\n';
        }
      }
      const std::size_t failed = report.failures();
      if (failed == 0) return 0;
      return failed == report.tasks.size() ? 2 : 3;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace diolab
