#include "fspectra/io.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

using namespace fspectra;

namespace {

bool same_kernel(const Kernel& a, const Kernel& b) {
  if (!(a.partition() == b.partition()) || a.band() != b.band()) return false;
  const int K = a.band();
  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j)
      for (std::size_t p = 0; p < a.intervals(); ++p)
        for (std::size_t q = 0; q < a.intervals(); ++q)
          if (!(a.exact(i, j, p, q) == b.exact(i, j, p, q))) return false;
  return true;
}

}  // namespace

TEST_CASE("rationals from JSON") {
  CHECK(rational_from_json(Json("3/4")) == Rational(3, 4));
  CHECK(rational_from_json(Json("-0.125")) == Rational(-1, 8));
  CHECK(rational_from_json(Json(7)) == 7);
  CHECK(rational_from_json(Json(0.1)) == Rational(1, 10));
  CHECK(rational_from_json(Json("12345678901234567890")) == Rational("12345678901234567890"));
  CHECK_THROWS_AS(rational_from_json(Json(true)), PreconditionError);
  CHECK_THROWS_AS(rational_from_json(Json("1/0x")), PreconditionError);
}

TEST_CASE("kernel and filter documents round-trip exactly") {
  for (std::uint64_t seed : {1u, 8u}) {
    const Kernel k = testing::random_two_interval_kernel(seed);
    const Kernel back = kernel_from_json(Json::parse(kernel_to_json(k).dump()));
    CHECK(same_kernel(k, back));
  }
  const Filter h = compass_filter();
  const Filter hb = filter_from_json(Json::parse(filter_to_json(h).dump()));
  CHECK(hb.entries() == h.entries());
  CHECK(same_kernel(kernel_from_document(filter_to_json(h)), kernel_from_filter(h)));
}

TEST_CASE("malformed documents are rejected with a message") {
  CHECK_THROWS_AS(kernel_from_json(Json{{"type", "filter"}}), PreconditionError);
  CHECK_THROWS_AS(kernel_from_json(Json::parse(R"({"type":"kernel","coeffs":[[0,0,0,0,1]]})")), PreconditionError);
  CHECK_THROWS_AS(filter_from_json(Json::parse(R"({"type":"filter","entries":[[1,0,1]]})")), PreconditionError);
  CHECK_THROWS_AS(kernel_from_document(Json{{"type", "walk"}}), PreconditionError);
  CHECK_THROWS_AS(relation_from_json(Json{{"type", "kernel"}}), PreconditionError);
  CHECK_THROWS_AS(curve_from_json(Json::array()), PreconditionError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), PreconditionError);
}

TEST_CASE("relations and curves") {
  const auto rel = relation_from_json(Json::parse(R"({"type":"rational","numerator":["1"],"denominator":["-1","1"]})"));
  CHECK(rel.terms() == bivariate({{1, 1, Rational(1)}, {0, 1, Rational(-1)}, {0, 0, Rational(-1)}}).terms());
  const auto F = bivariate({{2, 4, Rational(4)}, {3, 3, Rational(-1)}, {0, 0, Rational(1, 3)}});
  CHECK(curve_from_json(Json::parse(curve_to_json(F).dump())).terms() == F.terms());
}

TEST_CASE("walk documents") {
  const auto w = walk_from_json(Json::parse(R"({"type":"walk","l":1,"z":[[0.1,0.2],0.3,[0,0]]})"));
  CHECK(w.l == 1);
  CHECK(w.t_max == 60);
  REQUIRE(w.z.size() == 3);
  CHECK(w.z[0] == Complex(0.1, 0.2));
  CHECK(w.z[1] == Complex(0.3, 0.0));
}

TEST_CASE("CSV output") {
  CsvTable t({"a", "b"});
  t.row() << 0.1 << "x,y";
  t.row() << 3 << true;
  CHECK(t.str() == "a,b\n0.10000000000000001,\"x,y\"\n3,true\n");
  CsvTable bad({"a"});
  bad.row() << 1 << 2;
  CHECK_THROWS_AS(bad.str(), Error);
}

TEST_CASE("hashes") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
}
