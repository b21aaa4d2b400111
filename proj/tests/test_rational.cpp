#include "cubsc/rational.hpp"

#include <doctest.h>

#include <stdexcept>
#include <vector>

using cubsc::Frac;

TEST_CASE("construction normalizes") {
  CHECK(Frac(2, 4) == Frac(1, 2));
  CHECK(Frac(-2, 4) == Frac(1, -2));
  CHECK(Frac(3, -6).num() == -1);
  CHECK(Frac(3, -6).den() == 2);
  CHECK(Frac(0, 7) == Frac(0));
  CHECK(Frac(0, -7).den() == 1);
  CHECK_THROWS_AS(Frac(1, 0), std::domain_error);
}

TEST_CASE("field identities on a small grid") {
  std::vector<Frac> xs;
  for (int p = -6; p <= 6; ++p)
    for (int q = 1; q <= 6; ++q) xs.push_back(Frac(p, q));
  for (const Frac& a : xs) {
    CHECK(a + Frac(0) == a);
    CHECK(a * Frac(1) == a);
    CHECK(a - a == Frac(0));
    if (!a.is_zero()) CHECK(a / a == Frac(1));
    for (const Frac& b : xs) {
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      CHECK((a + b) - b == a);
      CHECK(a * (b + Frac(1)) == a * b + a);
    }
  }
}

TEST_CASE("ordering agrees with cross multiplication") {
  CHECK(Frac(1, 3) < Frac(1, 2));
  CHECK(Frac(-1, 2) < Frac(-1, 3));
  CHECK(Frac(7, 144) < Frac(1, 20));
  CHECK(Frac(5, 7) > Frac(2, 3));
  CHECK(Frac(2, 4) <= Frac(1, 2));
  CHECK(Frac(1, 144) * Frac(144) == Frac(1));
}

TEST_CASE("string round trip") {
  CHECK(Frac(1, 2).str() == "1/2");
  CHECK(Frac(-3, 4).str() == "-3/4");
  CHECK(Frac(5).str() == "5");
  CHECK(Frac::parse("1/144").value() == Frac(1, 144));
  CHECK(Frac::parse("-2/6").value() == Frac(-1, 3));
  CHECK(Frac::parse("12").value() == Frac(12));
  CHECK(!Frac::parse("1/0").has_value());
  CHECK(!Frac::parse("a/3").has_value());
  CHECK(!Frac::parse("1/2x").has_value());
  CHECK(!Frac::parse("").has_value());
}

TEST_CASE("overflow is an error, never a wrong answer") {
  const Frac big(int64_t{1} << 62);
  CHECK_THROWS_AS(big * big, std::overflow_error);
  CHECK_THROWS_AS(big + big * Frac(3), std::overflow_error);
}

TEST_CASE("approx stays close for exact doubles") {
  CHECK(Frac(1, 2).approx() == 0.5);
  CHECK(Frac(-3, 4).approx() == -0.75);
}
