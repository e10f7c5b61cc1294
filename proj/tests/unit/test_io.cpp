#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qmp/error.hpp"
#include "qmp/io.hpp"

using namespace qmp;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(QMP_FIXTURES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("input documents") {
  const InputDocument in = parse_input(fixture("generic.json"));
  CHECK(in.beta.get(0, 0) == doctest::Approx(2.7));
  REQUIRE(in.tol_moment);
  CHECK(*in.tol_moment == 1e-8);
  CHECK_FALSE(in.tol_rank);

  CHECK_THROWS_AS(parse_input(fixture("missing_key.json")), InputError);
  CHECK_THROWS_AS(parse_input("{"), InputError);
  CHECK_THROWS_AS(parse_input("[]"), InputError);
  CHECK_THROWS_AS(parse_input(R"({"beta": {"00": 1}})"), InputError);
}

TEST_CASE("bad fields") {
  Json doc = parse_json(fixture("lines.json"));
  doc["extra"] = 1;
  CHECK_NOTHROW(parse_input(dump(doc)));

  Json bad = doc;
  bad["beta"]["50"] = 1.0;
  CHECK_THROWS_AS(parse_input(dump(bad)), InputError);
  bad = doc;
  bad["beta"]["11"] = "x";
  CHECK_THROWS_AS(parse_input(dump(bad)), InputError);
  bad = doc;
  bad["beta"]["00"] = -1.0;
  CHECK_THROWS_AS(parse_input(dump(bad)), InputError);
  bad = doc;
  bad["options"] = {{"tol_rank", 0.0}};
  CHECK_THROWS_AS(parse_input(dump(bad)), InputError);
  bad = doc;
  bad["options"] = {{"colour", 1}};
  CHECK_THROWS_AS(parse_input(dump(bad)), InputError);
}

TEST_CASE("dump keeps every bit") {
  const double x = 0.1 + 0.2;
  const Json back = parse_json(dump(Json{{"x", x}, {"v", {1.0 / 3.0, -2e-300}}}));
  CHECK(back["x"].get<double>() == x);
  CHECK(back["v"][0].get<double>() == 1.0 / 3.0);
  CHECK(back["v"][1].get<double>() == -2e-300);
  CHECK(dump(Json{{"nan", std::nan("")}}).find("null") != std::string::npos);
}

TEST_CASE("moments and atoms round trip") {
  const AtomicMeasure mu = parse_atoms(parse_json(fixture("atoms_generic.json")));
  REQUIRE(mu.size() == 6);
  const MomentSequence beta = moments_of_measure(mu, 4);
  Json doc;
  doc["beta"] = to_json(beta);
  doc["atoms"] = to_json(mu);
  const InputDocument in = parse_input(dump(doc));
  for (std::size_t k = 0; k < beta.size(); ++k) CHECK(in.beta.values()[k] == beta.values()[k]);
  const AtomicMeasure back = parse_atoms(doc);
  CHECK(back.atoms[4].w == mu.atoms[4].w);
  CHECK_THROWS_AS(parse_atoms(Json{{"atoms", {{{"x", 1}}}}}), InputError);
}
