#include <doctest.h>

#include <string>

#include "bandlab/config.hpp"
#include "bandlab/report.hpp"
#include "bandlab/types.hpp"

using namespace bandlab;
using nlohmann::json;

namespace {

std::string errorOf(ExperimentConfig c, std::optional<int> W) {
  try {
    validateConfig(c, W);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  ExperimentConfig c;
  CHECK(c.kappa == 0.3);
  CHECK(c.eps2 == 0.05);
  CHECK(c.nE == 5);
  CHECK(c.nEta == 8);
  CHECK(c.trials == 20);
  CHECK(c.parallel == 1);
  CHECK(c.mode == "full");
  CHECK_FALSE(c.seed.has_value());
}

TEST_CASE("fields from JSON") {
  const auto c = applyConfigJson(
      {}, json::parse(R"({"kind": "deloc", "N": 256, "seed": 7, "ensemble": "three-point",
                          "domain": {"nE": 3, "eta_min": 0.01}, "profile": "p.json"})"));
  CHECK((c.kind == ExperimentKind::Deloc));
  CHECK(*c.N == 256);
  CHECK(*c.seed == 7);
  CHECK(c.ensemble == "three-point");
  CHECK(c.nE == 3);
  CHECK(*c.etaMin == 0.01);
  CHECK(c.profilePath == "p.json");
  const auto inl = applyConfigJson({}, json::parse(R"({"profile": {"W": 2, "edges": [[1, 2, 0.2]]}})"));
  CHECK(inl.profile.has_value());
}

TEST_CASE("unknown fields and bad types are rejected") {
  CHECK_THROWS_WITH_AS(applyConfigJson({}, json::parse(R"({"sede": 1})")),
                       "config: unknown field 'sede'", InvalidArgument);
  CHECK_THROWS_WITH_AS(applyConfigJson({}, json::parse(R"({"N": "big"})")),
                       "config: field 'N' has the wrong type", InvalidArgument);
  CHECK_THROWS_AS(applyConfigJson({}, json::parse(R"({"kind": "fourier"})")), InvalidArgument);
  CHECK_THROWS_AS(applyConfigJson({}, json::parse("[1, 2]")), InvalidArgument);
  CHECK_THROWS_AS(applyDomainJson({}, json::parse(R"({"trials": 3})")), InvalidArgument);
}

TEST_CASE("validation") {
  ExperimentConfig c;
  c.kind = ExperimentKind::LocalLaw;
  c.N = 512;
  CHECK(contains(errorOf(c, 4), "'seed'"));
  c.seed = 1;
  CHECK(errorOf(c, 4).empty());
  validateConfig(c, 4);
  CHECK(*c.M == 128);

  ExperimentConfig d;
  d.seed = 1;
  d.N = 510;
  CHECK(contains(errorOf(d, 4), "'N' must be divisible"));
  d.N.reset();
  d.M = 16;
  validateConfig(d, 4);
  CHECK(*d.N == 64);
  d.N = 68;
  CHECK(contains(errorOf(d, 4), "must equal M * W"));

  ExperimentConfig e;
  e.kind = ExperimentKind::ProfileCheck;
  CHECK(errorOf(e, std::nullopt).empty());
  e.kappa = 2;
  CHECK(contains(errorOf(e, std::nullopt), "'kappa'"));
  e.kappa = 0.3;
  e.mode = "partial";
  CHECK(contains(errorOf(e, std::nullopt), "'mode'"));
  e.mode = "sampled";
  e.ensemble = "cauchy";
  CHECK(contains(errorOf(e, std::nullopt), "'ensemble'"));
}

TEST_CASE("resolved config omits run-only fields") {
  ExperimentConfig c;
  c.seed = 3;
  c.N = 64;
  c.out = "a";
  c.parallel = 1;
  ExperimentConfig d = c;
  d.out = "b";
  d.parallel = 8;
  CHECK(resolvedConfigJson(c) == resolvedConfigJson(d));
  CHECK(metadataLine(resolvedConfigJson(c)) == metadataLine(resolvedConfigJson(d)));
  d.seed = 4;
  CHECK(resolvedConfigJson(c) != resolvedConfigJson(d));
  CHECK_FALSE(resolvedConfigJson(c).contains("parallel"));
  CHECK_FALSE(resolvedConfigJson(c).contains("out"));
}

TEST_CASE("experiment kinds") {
  for (auto k : {ExperimentKind::ProfileCheck, ExperimentKind::Sample, ExperimentKind::Resolvent,
                 ExperimentKind::LocalLaw, ExperimentKind::Deloc, ExperimentKind::LindebergProbe,
                 ExperimentKind::LindebergCompare, ExperimentKind::Saddle, ExperimentKind::Wick})
    CHECK((parseExperimentKind(toString(k)) == k));
  CHECK_FALSE(isStochastic(ExperimentKind::ProfileCheck));
  CHECK(isStochastic(ExperimentKind::LocalLaw));
}

TEST_CASE("report formatting") {
  CHECK(sha256Hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256Hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(formatNumber(0.1) == "0.1");
  CHECK(formatNumber(1e-300) == "1e-300");
  CHECK(formatNumber(-2.5) == "-2.5");
  CHECK(formatNumber(3) == "3");
  CHECK(std::stod(formatNumber(1.0 / 3)) == 1.0 / 3);
  const json cfg = {{"seed", 1}};
  const std::string line = metadataLine(cfg);
  CHECK(line == "# bandlab v0.1.0 config=" + sha256Hex(cfg.dump()));
  CsvTable t{{"a", "b"}, {}};
  t.add({"1", "2"});
  CHECK(toCsvString(cfg, t) == line + "\na,b\n1,2\n");
}

}
