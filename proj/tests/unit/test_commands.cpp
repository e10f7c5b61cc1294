#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qmp/commands.hpp"
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

TEST_CASE("solve then verify") {
  const CommandResult s = cmd_solve(fixture("generic.json"));
  REQUIRE(s.exit_code == kExitOk);
  const Json doc = parse_json(s.output);
  CHECK(doc["atoms"].size() == 6);
  CHECK(doc["report"]["success"].get<bool>());
  CHECK_FALSE(doc.contains("matrices"));
  CHECK(cmd_verify(s.output).exit_code == kExitOk);
  CHECK(cmd_verify(fixture("generic.json"), fixture("atoms_generic.json"), {}).exit_code == kExitOk);

  CommandFlags flags;
  flags.trace = true;
  CHECK(parse_json(cmd_solve(fixture("generic.json"), flags).output).contains("matrices"));
}

TEST_CASE("verify rejects a wrong measure") {
  Json atoms = parse_json(fixture("atoms_generic.json"));
  atoms["atoms"][0]["w"] = 0.9;
  CHECK(cmd_verify(fixture("generic.json"), dump(atoms), {}).exit_code == kExitFailed);
}

TEST_CASE("exit codes") {
  CHECK(cmd_solve(fixture("missing_key.json")).exit_code == kExitBadInput);
  CHECK(cmd_solve("not json").exit_code == kExitBadInput);
  const CommandResult pm = cmd_solve(fixture("point_mass.json"));
  CHECK(pm.exit_code == kExitNotPositive);
  CHECK(parse_json(pm.output)["error"]["kind"] == "not_positive_definite");
}

TEST_CASE("classify, normalize, reduce") {
  const Json c = parse_json(cmd_classify(fixture("lines.json")).output);
  CHECK(c["conic"] == "IntersectingLines");

  const Json n = parse_json(cmd_normalize(fixture("generic.json")).output);
  CHECK(n["beta"]["00"].get<double>() == doctest::Approx(1.0));
  CHECK(n["beta"]["10"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(n["beta"]["20"].get<double>() == doctest::Approx(1.0));
  CHECK(n["beta"]["11"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  const Json r = parse_json(cmd_reduce(fixture("generic.json")).output);
  CHECK(r["rank"] == 5);
  CHECK(r["u0"].get<double>() > 0);
}

TEST_CASE("gen is deterministic") {
  const GeneratedDocuments a = cmd_gen(3, 77);
  const GeneratedDocuments b = cmd_gen(3, 77);
  REQUIRE(a.exit_code == kExitOk);
  CHECK(a.documents == b.documents);
  CHECK(cmd_gen(0, 77).exit_code == kExitBadInput);
  const CommandResult s = cmd_solve(a.documents[0]);
  CHECK(s.exit_code == kExitOk);
}
