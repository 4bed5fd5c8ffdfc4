#include <string>
#include <vector>

#include "diolab/errors.hpp"
#include "diolab/real.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace diolab;

namespace {

// 50-digit references
const char* kSqrt2 = "1.41421356237309504880168872420969807856967187537694";
const char* kPi = "3.14159265358979323846264338327950288419716939937510";
const char* kE = "2.71828182845904523536028747135266249775724709369995";
const char* kPhi = "1.61803398874989484820458683436563811772030917980576";

mpq_class ref(const char* digits) { return parse_decimal_rational(digits); }

bool encloses(const BallValue& v, const mpq_class& truncated) {
  const mpq_class slack(1, mpz_class("1" + std::string(50, '0')));
  return abs(v.center - truncated) <= v.radius + slack;
}

std::vector<long> terms_of(const ContinuedFraction& cf) {
  std::vector<long> out{cf.a0.get_si()};
  for (const auto& t : cf.terms) out.push_back(t.get_si());
  return out;
}

mpq_class pow2(int e) {
  mpq_class x = 1;
  if (e >= 0) {
    mpz_mul_2exp(x.get_num_mpz_t(), x.get_num_mpz_t(), e);
  } else {
    mpz_mul_2exp(x.get_den_mpz_t(), x.get_den_mpz_t(), -e);
  }
  return x;
}

}  // namespace

TEST_CASE("parse_real: rationals are reduced") {
  const RealSpec r = parse_real("rat:2/8");
  REQUIRE(r.kind() == RealKind::rational);
  CHECK(r.as_rational() == mpq_class(1, 4));
  CHECK(r.text() == "rat:1/4");
  CHECK(parse_real("rat:-3/6").as_rational() == mpq_class(-1, 2));
  CHECK(parse_real("rat:3/-6").as_rational() == mpq_class(-1, 2));
  CHECK(parse_real("rat:5/1").text() == "rat:5/1");
  CHECK(parse_real("  rat:1/3\n").text() == "rat:1/3");
}

TEST_CASE("parse_real: golden ratio") {
  const RealSpec g = parse_real("quad:(1+1*sqrt(5))/2");
  REQUIRE(g.kind() == RealKind::quadratic);
  const auto& s = g.as_quadratic();
  CHECK(s.p == 1);
  CHECK(s.q == 1);
  CHECK(s.d == 5);
  CHECK(s.r == 2);
  CHECK(g.text() == "quad:(1+1*sqrt(5))/2");
}

TEST_CASE("parse_real: quadratic normalization") {
  // 2*sqrt(8) = 4*sqrt(2)
  CHECK(parse_real("quad:(0+2*sqrt(8))/1").text() == "quad:(0+4*sqrt(2))/1");
  // common factor removed
  CHECK(parse_real("quad:(2+2*sqrt(5))/4").text() == "quad:(1+1*sqrt(5))/2");
  // sign absorbed so that Q > 0
  CHECK(parse_real("quad:(1+-1*sqrt(5))/-2").text() == "quad:(-1+1*sqrt(5))/2");
  CHECK(parse_real("quad:(1+-1*sqrt(5))/2").text() == "quad:(-1+1*sqrt(5))/-2");
}

TEST_CASE("parse_real: degenerate quadratics become rational") {
  CHECK(parse_real("quad:(3+0*sqrt(7))/2").text() == "rat:3/2");
  CHECK(parse_real("quad:(1+1*sqrt(9))/2").text() == "rat:2/1");
  CHECK(parse_real("quad:(1+5*sqrt(0))/2").text() == "rat:1/2");
  CHECK(parse_real("quad:(0+1*sqrt(1))/1").text() == "rat:1/1");
}

TEST_CASE("parse_real: named constants and decimals") {
  CHECK(parse_real("pi").kind() == RealKind::named_constant);
  CHECK(parse_real("pi").as_constant() == NamedConstant::pi);
  CHECK(parse_real("e").as_constant() == NamedConstant::euler_e);
  const RealSpec d = parse_real("dec:3.14159");
  REQUIRE(d.kind() == RealKind::decimal_literal);
  CHECK(d.as_decimal().value == mpq_class(314159, 100000));
  CHECK(d.as_decimal().uncertainty == mpq_class(1, 200000));
  CHECK(d.text() == "dec:3.14159");
  CHECK(parse_real("dec:7").as_decimal().uncertainty == mpq_class(1, 2));
  CHECK(parse_real("dec:-0.25").as_decimal().value == mpq_class(-1, 4));
}

TEST_CASE("parse_real: malformed input is rejected") {
  for (const char* bad :
       {"", "rat:", "rat:1/", "rat:/2", "rat:1/0", "rat:1.5/2", "rat:1/2x", "quad:(1+1*sqrt(5))/0",
        "quad:(1+1*sqrt(-5))/2", "quad:(1+1*sqrt(5)/2", "quad:1+1*sqrt(5)/2", "pie", "PI", "E",
        "dec:", "dec:1.", "dec:.5", "dec:1.2.3", "sqrt(2)", "rat:1//2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_real(bad), ParseError);
  }
}

TEST_CASE("parse_real: text round-trips") {
  for (int i = 0; i < 200; ++i) {
    const RealSpec s = gen::any_target();
    CAPTURE(s.text());
    CHECK(parse_real(s.text()) == s);
  }
}

TEST_CASE("eval: reference values") {
  const BallValue third = eval(parse_real("rat:1/3"), 10);
  CHECK(third.contains(mpq_class(1, 3)));
  CHECK(third.radius <= pow2(-9));

  const BallValue quarter = eval(parse_real("rat:1/4"), 10);
  CHECK(quarter.is_exact());
  CHECK(quarter.center == mpq_class(1, 4));

  const BallValue r2 = eval(parse_real("quad:(0+1*sqrt(2))/1"), 64);
  CHECK(r2.radius <= pow2(-63));
  CHECK(encloses(r2, ref(kSqrt2)));

  const BallValue pi = eval(parse_real("pi"), 64);
  CHECK(pi.radius <= pow2(-63));
  CHECK(encloses(pi, ref(kPi)));

  CHECK(encloses(eval(parse_real("e"), 160), ref(kE)));
  CHECK(encloses(eval(parse_real("quad:(1+1*sqrt(5))/2"), 160), ref(kPhi)));
  CHECK(encloses(eval(parse_real("pi"), 160), ref(kPi)));
}

TEST_CASE("eval: high precision agrees with the references to 50 digits") {
  for (const auto& [spec, digits] : {std::pair{"pi", kPi}, std::pair{"e", kE},
                                     std::pair{"quad:(0+1*sqrt(2))/1", kSqrt2}}) {
    const BallValue v = eval(parse_real(spec), 400);
    CAPTURE(spec);
    CHECK(abs(v.center - ref(digits)) < mpq_class(1, mpz_class("1" + std::string(49, '0'))));
  }
}

TEST_CASE("eval: decimal literal precision contract") {
  const RealSpec d = parse_real("dec:3.14159");
  const BallValue v = eval(d, 10);
  CHECK(v.center == mpq_class(314159, 100000));
  CHECK(v.radius == mpq_class(1, 200000));
  CHECK_THROWS_AS(eval(d, 40), PrecisionError);
  CHECK_THROWS_AS(eval(parse_real("pi"), 1), std::invalid_argument);
}

TEST_CASE("property: eval width and nesting") {
  for (int i = 0; i < 60; ++i) {
    const RealSpec s = gen::any_target();
    const int bits = static_cast<int>(gen::integer(2, 300));
    CAPTURE(s.text());
    CAPTURE(bits);
    const BallValue outer = eval(s, bits);
    const BallValue inner = eval(s, bits + 32);
    CHECK(outer.radius <= pow2(1 - bits));
    CHECK(inner.radius <= pow2(1 - bits - 32));
    CHECK(outer.contains(inner));
    if (s.kind() == RealKind::rational) CHECK(outer.contains(s.as_rational()));
  }
}

TEST_CASE("cf_expand: classical expansions") {
  CHECK(terms_of(cf_expand(parse_real("quad:(1+1*sqrt(5))/2"), 5)) == std::vector<long>{1, 1, 1, 1, 1});
  CHECK(terms_of(cf_expand(parse_real("quad:(0+1*sqrt(2))/1"), 4)) == std::vector<long>{1, 2, 2, 2});
  const ContinuedFraction r = cf_expand(parse_real("rat:7/3"), 10);
  CHECK(terms_of(r) == std::vector<long>{2, 3});
  CHECK(r.terminated);
  CHECK(terms_of(cf_expand(parse_real("pi"), 10)) ==
        std::vector<long>{3, 7, 15, 1, 292, 1, 1, 1, 2, 1});
  CHECK(terms_of(cf_expand(parse_real("e"), 12)) ==
        std::vector<long>{2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8});
  // sqrt(7) = [2; 1, 1, 1, 4, ...]
  CHECK(terms_of(cf_expand(parse_real("quad:(0+1*sqrt(7))/1"), 9)) ==
        std::vector<long>{2, 1, 1, 1, 4, 1, 1, 1, 4});
  CHECK(terms_of(cf_expand(parse_real("rat:-7/3"), 10)) == std::vector<long>{-3, 1, 2});
  CHECK(terms_of(cf_expand(parse_real("rat:2/1"), 10)) == std::vector<long>{2});
  CHECK_FALSE(cf_expand(parse_real("pi"), 3).terminated);
}

TEST_CASE("cf_expand: pi deep terms") {
  // pi = [3; 7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2, ...]
  const auto t = terms_of(cf_expand(parse_real("pi"), 20));
  CHECK(t == std::vector<long>{3, 7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2});
}

TEST_CASE("cf_expand: decimal literal reports its certified prefix") {
  const RealSpec d = parse_real("dec:3.14159");
  // [3.141585, 3.141595] = [3; 7, 15 or 16, ...]
  CHECK(terms_of(cf_expand(d, 2)) == std::vector<long>{3, 7});
  try {
    cf_expand(d, 3);
    FAIL("expected a certification error");
  } catch (const CertificationError& e) {
    CHECK(e.certified_prefix() == 2);
  }
  CHECK(terms_of(cf_expand(parse_real("dec:3.14159265358979"), 8)) ==
        std::vector<long>{3, 7, 15, 1, 292, 1, 1, 1});
}

TEST_CASE("convergents: recurrence") {
  const auto c = convergents(cf_expand(parse_real("quad:(1+1*sqrt(5))/2"), 5));
  REQUIRE(c.size() == 5);
  const long expect[5][2] = {{1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}};
  for (int i = 0; i < 5; ++i) {
    CHECK(c[i].p == expect[i][0]);
    CHECK(c[i].q == expect[i][1]);
  }
  const auto r = convergents(cf_expand(parse_real("rat:7/3"), 5));
  REQUIRE(r.size() == 2);
  CHECK(r[0].p == 2);
  CHECK(r[0].q == 1);
  CHECK(r[1].p == 7);
  CHECK(r[1].q == 3);
}

TEST_CASE("property: convergent determinant identity") {
  for (int i = 0; i < 80; ++i) {
    const RealSpec s = gen::any_target();
    CAPTURE(s.text());
    const auto c = convergents(cf_expand(s, 25));
    for (std::size_t n = 1; n < c.size(); ++n) {
      const mpz_class det = c[n].p * c[n - 1].q - c[n - 1].p * c[n].q;
      CHECK(det == ((n - 1) % 2 == 0 ? 1 : -1));
      CHECK(gcd(c[n].p, c[n].q) == 1);
      CHECK(c[n].q > 0);
    }
  }
}

TEST_CASE("property: rational round-trip and canonical last term") {
  for (int i = 0; i < 200; ++i) {
    const RealSpec s = gen::rational(100000);
    CAPTURE(s.text());
    const ContinuedFraction cf = cf_expand(s, 1000);
    REQUIRE(cf.terminated);
    const auto c = convergents(cf);
    CHECK(mpq_class(c.back().p, c.back().q) == s.as_rational());
    if (cf.size() > 1) CHECK(cf.terms.back() >= 2);
    for (const auto& t : cf.terms) CHECK(t >= 1);
  }
}

TEST_CASE("property: integer shift changes only a0") {
  for (int i = 0; i < 80; ++i) {
    const RealSpec s = gen::integer(0, 1) ? gen::quadratic() : gen::rational();
    const long m = static_cast<long>(gen::integer(-1000, 1000));
    CAPTURE(s.text());
    CAPTURE(m);
    const ContinuedFraction a = cf_expand(s, 20);
    const ContinuedFraction b = cf_expand(s.shifted(m), 20);
    CHECK(b.a0 == a.a0 + m);
    CHECK(b.terms == a.terms);
    CHECK(b.terminated == a.terminated);
  }
}

TEST_CASE("property: quadratic expansion matches an interval expansion") {
  // The exact periodic algorithm against floors taken from a 2000-bit ball.
  for (int i = 0; i < 40; ++i) {
    const RealSpec s = gen::quadratic();
    CAPTURE(s.text());
    const ContinuedFraction cf = cf_expand(s, 30);
    BallValue v = eval(s, 2000);
    mpq_class x = v.center;
    for (std::size_t n = 0; n < cf.size(); ++n) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
      CHECK(f == cf[n]);
      x = 1 / (x - mpq_class(f));
    }
  }
}

TEST_CASE("negation and shifts of named constants are refused") {
  CHECK_THROWS(parse_real("pi").shifted(1));
  CHECK_THROWS(parse_real("e").negated());
  CHECK(parse_real("quad:(1+1*sqrt(5))/2").negated().text() == "quad:(1+1*sqrt(5))/-2");
}

TEST_CASE("parse: documented canonical forms") {
  const std::pair<const char*, const char*> table[] = {
      {"rat:6/-4", "rat:-3/2"},
      {"quad:(2+2*sqrt(8))/4", "quad:(1+2*sqrt(2))/2"},
      {"quad:(1+3*sqrt(9))/2", "rat:5/1"},
      {"quad:(7+0*sqrt(5))/3", "rat:7/3"},
      {"quad:(1+-1*sqrt(5))/2", "quad:(-1+1*sqrt(5))/-2"},
      {"dec:3.140", "dec:3.140"},
      {" \tpi\n", "pi"},
  };
  for (const auto& [in, out] : table) CHECK(parse_real(in).text() == out);
  for (const char* bad : {"dec:3.", "dec:.5", "rat:1 /2", "rat:+1/2", "Pi", "rat:1/0", "1e-3"}) {
    CHECK_THROWS_AS(parse_real(bad), ParseError);
  }
}
