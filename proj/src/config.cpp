#include "bandlab/config.hpp"

#include <fstream>
#include <numbers>

#include "bandlab/types.hpp"

namespace bandlab {

namespace {

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::ProfileCheck, "profile-check"},
    {ExperimentKind::Sample, "sample"},
    {ExperimentKind::Resolvent, "resolvent"},
    {ExperimentKind::LocalLaw, "locallaw"},
    {ExperimentKind::Deloc, "deloc"},
    {ExperimentKind::LindebergProbe, "lindeberg-probe"},
    {ExperimentKind::LindebergCompare, "lindeberg-compare"},
    {ExperimentKind::Saddle, "saddle"},
    {ExperimentKind::Wick, "wick"},
};

template <class T>
T field(const nlohmann::json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config: field '") + name + "' has the wrong type");
  }
}

void fieldCheck(bool ok, const char* name, const std::string& what) {
  if (!ok) throw InvalidArgument(std::string("config: field '") + name + "' " + what);
}

}  // namespace

std::string toString(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind parseExperimentKind(const std::string& s) {
  for (const auto& [kind, name] : kKinds)
    if (s == name) return kind;
  throw InvalidArgument("config: field 'kind' has unknown value '" + s + "'");
}

bool isStochastic(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ProfileCheck:
    case ExperimentKind::Resolvent:
      return false;
    default:
      return true;
  }
}

ExperimentConfig applyConfigJson(ExperimentConfig c, const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") c.kind = parseExperimentKind(field<std::string>(j, "kind"));
    else if (key == "profile") {
      if (value.is_string()) c.profilePath = value.get<std::string>();
      else c.profile = value;
    }
    else if (key == "N") c.N = field<int>(j, "N");
    else if (key == "M") c.M = field<int>(j, "M");
    else if (key == "ensemble") c.ensemble = field<std::string>(j, "ensemble");
    else if (key == "kappa") c.kappa = field<double>(j, "kappa");
    else if (key == "eps2") c.eps2 = field<double>(j, "eps2");
    else if (key == "nE") c.nE = field<int>(j, "nE");
    else if (key == "nEta") c.nEta = field<int>(j, "nEta");
    else if (key == "eta_min") c.etaMin = field<double>(j, "eta_min");
    else if (key == "eta_max") c.etaMax = field<double>(j, "eta_max");
    else if (key == "trials") c.trials = field<int>(j, "trials");
    else if (key == "seed") c.seed = field<std::uint64_t>(j, "seed");
    else if (key == "out") c.out = field<std::string>(j, "out");
    else if (key == "parallel") c.parallel = field<int>(j, "parallel");
    else if (key == "in") c.inPath = field<std::string>(j, "in");
    else if (key == "domain") {
      if (value.is_string()) c.domainPath = value.get<std::string>();
      else c = applyDomainJson(c, value);
    }
    else if (key == "mode") c.mode = field<std::string>(j, "mode");
    else if (key == "pairs") c.pairs = field<int>(j, "pairs");
    else if (key == "dump") c.dump = field<bool>(j, "dump");
    else if (key == "C") c.C = field<double>(j, "C");
    else if (key == "E") c.E = field<double>(j, "E");
    else if (key == "eta") c.eta = field<double>(j, "eta");
    else if (key == "samples") c.samples = field<int>(j, "samples");
    else if (key == "block_M") c.blockM = field<int>(j, "block_M");
    else if (key == "m_max") c.mMax = field<int>(j, "m_max");
    else if (key == "n") c.n = field<int>(j, "n");
    else if (key == "positions") c.positions = field<int>(j, "positions");
    else if (key == "k") c.k = field<int>(j, "k");
    else throw InvalidArgument("config: unknown field '" + key + "'");
  }
  return c;
}

ExperimentConfig loadConfigFile(ExperimentConfig base, const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config: " + path + " is not valid JSON: " + e.what());
  }
  return applyConfigJson(std::move(base), j);
}

ExperimentConfig applyDomainJson(ExperimentConfig c, const nlohmann::json& j) {
  require(j.is_object(), "domain: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kappa") c.kappa = field<double>(j, "kappa");
    else if (key == "eps2") c.eps2 = field<double>(j, "eps2");
    else if (key == "nE") c.nE = field<int>(j, "nE");
    else if (key == "nEta") c.nEta = field<int>(j, "nEta");
    else if (key == "eta_min") c.etaMin = field<double>(j, "eta_min");
    else if (key == "eta_max") c.etaMax = field<double>(j, "eta_max");
    else throw InvalidArgument("domain: unknown field '" + key + "'");
  }
  return c;
}

void validateConfig(ExperimentConfig& c, std::optional<int> W) {
  if (isStochastic(c.kind)) fieldCheck(c.seed.has_value(), "seed", "is required for stochastic runs");
  if (c.N) fieldCheck(*c.N >= 1, "N", "must be positive");
  if (c.M) fieldCheck(*c.M >= 1, "M", "must be positive");
  if (W) {
    if (c.N && !c.M) {
      fieldCheck(*c.N % *W == 0, "N", "must be divisible by the profile block count W = " +
                                          std::to_string(*W));
      c.M = *c.N / *W;
    } else if (c.M && !c.N) {
      c.N = *c.M * *W;
    } else if (c.M && c.N) {
      fieldCheck(*c.N % *W == 0, "N", "must be divisible by the profile block count W = " +
                                          std::to_string(*W));
      fieldCheck(*c.N == *c.M * *W, "N", "must equal M * W");
    }
  }
  fieldCheck(c.ensemble == "gaussian" || c.ensemble == "three-point", "ensemble",
             "must be 'gaussian' or 'three-point'");
  fieldCheck(c.kappa > 0 && c.kappa < std::numbers::sqrt2, "kappa", "must lie in (0, sqrt 2)");
  fieldCheck(c.eps2 > 0, "eps2", "must be positive");
  fieldCheck(c.nE >= 1, "nE", "must be >= 1");
  fieldCheck(c.nEta >= 1, "nEta", "must be >= 1");
  fieldCheck(c.trials >= 1, "trials", "must be >= 1");
  fieldCheck(c.parallel >= 1, "parallel", "must be >= 1");
  fieldCheck(c.mode == "full" || c.mode == "sampled", "mode", "must be 'full' or 'sampled'");
  fieldCheck(c.pairs >= 1, "pairs", "must be >= 1");
  fieldCheck(c.C > 0, "C", "must be positive");
  fieldCheck(c.samples >= 1, "samples", "must be >= 1");
  fieldCheck(c.blockM >= 1, "block_M", "must be >= 1");
  fieldCheck(c.mMax >= 1 && c.mMax <= 8, "m_max", "must lie in [1, 8]");
  fieldCheck(c.n == 1 || c.n == 2, "n", "must be 1 or 2");
  fieldCheck(c.positions >= 1, "positions", "must be >= 1");
  fieldCheck(c.k >= 1 && c.k <= 6, "k", "must lie in [1, 6]");
  fieldCheck(c.eta >= 0, "eta", "must be non-negative");
}

nlohmann::json resolvedConfigJson(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = toString(c.kind);
  if (c.profile) j["profile"] = *c.profile;
  else j["profile"] = c.profilePath;
  j["N"] = c.N ? nlohmann::json(*c.N) : nlohmann::json(nullptr);
  j["M"] = c.M ? nlohmann::json(*c.M) : nlohmann::json(nullptr);
  j["ensemble"] = c.ensemble;
  j["kappa"] = c.kappa;
  j["eps2"] = c.eps2;
  j["nE"] = c.nE;
  j["nEta"] = c.nEta;
  j["eta_min"] = c.etaMin ? nlohmann::json(*c.etaMin) : nlohmann::json(nullptr);
  j["eta_max"] = c.etaMax ? nlohmann::json(*c.etaMax) : nlohmann::json(nullptr);
  j["trials"] = c.trials;
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  j["in"] = c.inPath;
  j["mode"] = c.mode;
  j["pairs"] = c.pairs;
  j["C"] = c.C;
  j["E"] = c.E;
  j["eta"] = c.eta;
  j["samples"] = c.samples;
  j["block_M"] = c.blockM;
  j["m_max"] = c.mMax;
  j["n"] = c.n;
  j["positions"] = c.positions;
  j["k"] = c.k;
  return j;
}

}  // namespace bandlab
