#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace bandlab {

enum class ExperimentKind {
  ProfileCheck,
  Sample,
  Resolvent,
  LocalLaw,
  Deloc,
  LindebergProbe,
  LindebergCompare,
  Saddle,
  Wick,
};

std::string toString(ExperimentKind k);
ExperimentKind parseExperimentKind(const std::string& s);
bool isStochastic(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::LocalLaw;
  std::string profilePath;
  std::optional<nlohmann::json> profile;  // inline profile, wins over the path
  std::optional<int> N;
  std::optional<int> M;
  std::string ensemble = "gaussian";
  double kappa = 0.3;
  double eps2 = 0.05;
  int nE = 5;
  int nEta = 8;
  std::optional<double> etaMin;
  std::optional<double> etaMax;
  int trials = 20;
  std::optional<std::uint64_t> seed;
  std::string out;
  int parallel = 1;

  std::string inPath;      // resolvent: sample summary or dump
  std::string domainPath;  // resolvent, locallaw: domain JSON
  std::string mode = "full";
  int pairs = 4096;
  bool dump = false;

  double C = 1.0;          // profile check
  double E = 0.0;          // saddle, lindeberg
  double eta = 0.0;        // lindeberg; 0 means 1/M
  int samples = 100000;    // saddle
  int blockM = 64;         // saddle: M in the measure bound
  int mMax = 5;            // lindeberg probe
  int n = 1;               // lindeberg compare
  int positions = 10;      // lindeberg compare
  int k = 5;               // wick
};

// Reads the fields present in `j` on top of `base`. Unknown keys are an error.
ExperimentConfig applyConfigJson(ExperimentConfig base, const nlohmann::json& j);
ExperimentConfig loadConfigFile(ExperimentConfig base, const std::string& path);

// Range and consistency checks; `W` is the profile block count when known.
// Fills M from N (or N from M). Throws InvalidArgument naming the field.
void validateConfig(ExperimentConfig& c, std::optional<int> W);

// Every field that affects results; parallelism and the output path are
// excluded so that the hash is a function of the experiment alone.
nlohmann::json resolvedConfigJson(const ExperimentConfig& c);

// Domain keys: kappa, eps2, nE, nEta, eta_min, eta_max.
ExperimentConfig applyDomainJson(ExperimentConfig c, const nlohmann::json& j);

}  // namespace bandlab
