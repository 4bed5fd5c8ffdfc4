#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"diolab"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = diolab::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kPhi = "quad:(1+1*sqrt(5))/2";

}  // namespace

TEST_CASE("cli: records for 1/3 with square denominators") {
  const Outcome o = invoke({"records", "--alpha", "rat:1/3", "--k", "2", "--bmax", "10"});
  CHECK(o.code == 0);
  CHECK(o.err.empty());
  const auto ls = lines(o.out);
  REQUIRE(ls.size() >= 5);
  // header, then one row per record
  CHECK(has(ls[1], "1"));
  CHECK(ls[3].rfind("           3", 0) == 0);
  CHECK(has(ls[3], "exact hit"));
  CHECK_FALSE(has(ls[2], "exact hit"));
  CHECK(has(o.out, "records: 3\n"));
  CHECK(has(o.out, "exact hit: b=3\n"));
}

TEST_CASE("cli: hurwitz at the golden ratio below 1/sqrt(5)") {
  const Outcome o = invoke({"hurwitz", "--alpha", kPhi, "--c", "43/100", "--bmax", "100000"});
  CHECK(o.code == 0);
  CHECK(o.out == "a=2 b=1\nsolutions: 1\n");
}

TEST_CASE("cli: usage errors name the offending token") {
  struct Bad {
    std::initializer_list<const char*> args;
    const char* token;
  };
  const Bad cases[] = {
      {{"zaharescu", "--alpha", "pi", "--theta", "0.7", "--bmax", "100"}, "0.7"},
      {{"zaharescu", "--alpha", "pi", "--theta", "0", "--bmax", "100"}, "'0'"},
      {{"records", "--alpha", "pie", "--k", "1", "--bmax", "3"}, "pie"},
      {{"records", "--alpha", "pi", "--k", "3", "--bmax", "3"}, "3"},
      {{"records", "--alpha", "pi", "--k", "1", "--bmax", "3", "--bogus"}, "--bogus"},
      {{"hurwitz", "--alpha", kPhi, "--c", "0.43", "--bmax", "10"}, "0.43"},
      {{"hurwitz", "--alpha", kPhi, "--c", "-1/2", "--bmax", "10"}, "-1/2"},
      {{"bf", "--alpha", "pi", "--epsilon", "-0.1", "--bmax", "10"}, "-0.1"},
      {{"screen", "--alphas", "pi,,e", "--k", "2", "--bmax", "10"}, "--alphas"},
      {{"batch", "--config", "/nonexistent/plan.json"}, "/nonexistent/plan.json"},
      {{"frobnicate"}, "frobnicate"},
  };
  for (const Bad& b : cases) {
    const Outcome o = invoke(b.args);
    CAPTURE(o.err);
    CHECK(o.code == 1);
    CHECK(has(o.err, b.token));
    CHECK(o.out.empty());
  }
  CHECK(has(invoke({"zaharescu", "--alpha", "pi", "--theta", "0.7", "--bmax", "100"}).err, "2/3"));
}

TEST_CASE("cli: computation failures exit 2") {
  const Outcome o = invoke({"records", "--alpha", "pi", "--k", "2", "--bmax", "4000000000"});
  CHECK(o.code == 2);
  CHECK(has(o.err, "62 bits"));
}

TEST_CASE("cli: every subcommand documents its inequality") {
  const std::pair<const char*, const char*> docs[] = {
      {"records", "|alpha - a/b^k|"},          {"hurwitz", "|alpha - a/b| < c/b^2"},
      {"conjecture", "< c(alpha)/b^3"},        {"bf", "c/(b^3 ln^(1+eps) b)"},
      {"zaharescu", "< 1/b^(2+theta)"},        {"primes", "|alpha - z/p|"},
      {"screen", "b^(k+1) |alpha - a/b^k|"},   {"batch", "Exit code 3"},
  };
  for (const auto& [sub, text] : docs) {
    CAPTURE(sub);
    const Outcome o = invoke({sub, "--help"});
    CHECK(o.code == 0);
    CHECK(has(o.out, text));
  }
}

TEST_CASE("cli: csv and json outputs") {
  const fs::path dir = fs::temp_directory_path() / "diolab-test-cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string csv = (dir / "r.csv").string();
  const Outcome o = invoke({"records", "--alpha", kPhi, "--k", "1", "--bmax", "100", "--csv", csv.c_str()});
  CHECK(o.code == 0);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 11);  // Fibonacci denominators 1, 2, 3, 5, ..., 89
  CHECK(rows[0] == "b,a,error_center,error_radius,score,log_score,is_record,untrusted");
  CHECK(rows[10].rfind("89,144,", 0) == 0);

  const Outcome j = invoke({"records", "--alpha", "rat:1/3", "--k", "2", "--bmax", "10", "--json"});
  CHECK(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["records"].size() == 3);
  CHECK(doc["exact_hit"] == 3);
  CHECK(doc["records"][1]["error"]["center"] == "8.333333333333333333333333333333333333333e-02");
  fs::remove_all(dir);
}

TEST_CASE("cli: other subcommands") {
  const Outcome p = invoke({"primes", "--alpha", "quad:(0+1*sqrt(2))/1", "--pmax", "10"});
  CHECK(p.code == 0);
  CHECK(has(p.out, "records: 4\n"));
  CHECK(has(p.out, "denominators: 5\n"));

  const Outcome z = invoke({"zaharescu", "--alpha", "pi", "--theta", "0.3", "--bmax", "1000", "--witnesses", "5"});
  CHECK(z.code == 0);
  CHECK(has(z.out, "witnesses: 1 2 3 4 5\n"));

  const Outcome s = invoke({"screen", "--alphas", "pi,e,rat:1/3", "--k", "2", "--bmax", "100"});
  CHECK(s.code == 0);
  const auto ranked = lines(s.out);
  REQUIRE(ranked.size() >= 3);
  CHECK(ranked[0].rfind("1. e ", 0) == 0);
  CHECK(ranked[1].rfind("2. pi ", 0) == 0);
  CHECK(ranked[2].rfind("3. rat:1/3 ", 0) == 0);

  const Outcome c = invoke({"conjecture", "--alpha", "quad:(0+1*sqrt(2))/1", "--bmax", "1000"});
  CHECK(c.code == 0);
  CHECK(has(c.out, "at b=13\n"));
  const Outcome b = invoke({"bf", "--alpha", "pi", "--epsilon", "0.1", "--bmax", "1000", "--threads", "2"});
  CHECK(b.code == 0);
  CHECK(has(b.out, "bf_inf: 5.79504360337"));
}

TEST_CASE("cli: output is line-stable") {
  for (const char* threads : {"1", "3"}) {
    CAPTURE(threads);
    const Outcome x = invoke({"conjecture", "--alpha", "pi", "--bmax", "20000"});
    const Outcome y = invoke({"conjecture", "--alpha", "pi", "--bmax", "20000", "--threads", threads});
    CHECK(x.out == y.out);
  }
}

TEST_CASE("cli: batch exit codes") {
  const fs::path dir = fs::temp_directory_path() / "diolab-test-batch";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write_config = [&](const std::string& name, const std::string& out_dir, const char* cap) {
    const fs::path p = dir / name;
    std::ofstream(p) << R"({"targets": [{"label": "t", "alpha": "rat:2/7"}],
      "tasks": [{"type": "sweep", "k": 1, "bmax": 20}, {"type": "prime", "pmax": 20}],
      "retention": "full", "retention_cap": )"
                     << cap << R"(, "output": {"dir": ")" << out_dir << R"("}})";
    return p.string();
  };
  const std::string ok = write_config("ok.json", (dir / "a").string(), "100");
  CHECK(invoke({"batch", "--config", ok.c_str()}).code == 0);
  CHECK(fs::exists(dir / "a" / "summary.json"));

  const std::string partial = write_config("partial.json", (dir / "b").string(), "10");
  CHECK(invoke({"batch", "--config", partial.c_str()}).code == 3);

  std::ofstream(dir / "file") << "x";
  const std::string none = write_config("none.json", (dir / "file" / "out").string(), "100");
  const Outcome o = invoke({"batch", "--config", none.c_str()});
  CHECK(o.code == 2);
  fs::remove_all(dir);
}
