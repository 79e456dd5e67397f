// bandlab command line: one subcommand per experiment.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "bandlab/config.hpp"
#include "bandlab/deloc.hpp"
#include "bandlab/ensembles.hpp"
#include "bandlab/graph_profile.hpp"
#include "bandlab/grassmann.hpp"
#include "bandlab/lindeberg.hpp"
#include "bandlab/linalg.hpp"
#include "bandlab/locallaw.hpp"
#include "bandlab/parallel.hpp"
#include "bandlab/report.hpp"
#include "bandlab/rng.hpp"
#include "bandlab/saddle.hpp"
#include "bandlab/spectral.hpp"

using namespace bandlab;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kAssertion = 1, kUsage = 2, kSystem = 3 };

// Flag values are only applied when the flag was given, so they override
// the config file without clobbering it.
struct Overrides {
  std::vector<std::function<void(ExperimentConfig&)>> apply;

  template <class T, class F>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& desc, F set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, desc);
    apply.push_back([value, opt, set](ExperimentConfig& c) {
      if (opt->count()) set(c, *value);
    });
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& desc,
                    std::function<void(ExperimentConfig&)> set) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(name, *value, desc);
    apply.push_back([value, set](ExperimentConfig& c) {
      if (*value) set(c);
    });
    return opt;
  }
};

json readJson(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + " is not valid JSON: " + e.what());
  }
}

bool looksLikeProfile(const json& j) {
  return j.is_object() && (j.contains("edges") || j.contains("torus") || j.contains("W"));
}

VarianceProfile loadProfile(ExperimentConfig& c) {
  if (!c.profile) {
    require(!c.profilePath.empty(), "config: field 'profile' is required");
    c.profile = readJson(c.profilePath);
  }
  const auto p = VarianceProfile::fromJson(*c.profile);
  // Canonical form, so that the config hash does not depend on the file path.
  c.profile = p.toJson();
  return p;
}

Complex parseZ(const std::string& s) {
  const auto comma = s.find(',');
  require(comma != std::string::npos, "--z expects E,eta");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("--z expects E,eta, got '" + s + "'");
  }
}

SpectralDomain domainOf(const ExperimentConfig& c) {
  if (c.etaMin || c.etaMax) {
    const double lo = c.etaMin.value_or(std::pow(double(*c.N), -1 + c.eps2));
    const double hi = c.etaMax.value_or(std::pow(double(*c.N), c.eps2) / *c.M);
    return buildDomain(*c.N, *c.M, c.kappa, c.eps2, c.nE, c.nEta, lo, hi);
  }
  return buildDomain(*c.N, *c.M, c.kappa, c.eps2, c.nE, c.nEta);
}

class Output {
 public:
  explicit Output(const ExperimentConfig& c) : path_(c.out), cfg_(resolvedConfigJson(c)) {}

  const json& config() const { return cfg_; }

  void csv(const CsvTable& t, const std::string& suffix = "") const {
    write(suffix, toCsvString(cfg_, t));
  }
  void document(json body, const std::string& suffix = "") const {
    body["meta"] = {{"version", kVersion},
                    {"config_sha256", sha256Hex(cfg_.dump())},
                    {"seed", cfg_.value("seed", json(nullptr))}};
    write(suffix, body.dump(2) + "\n");
  }
  void dumpConfig() const {
    if (!path_.empty()) writeFile(path_ + ".config.json", cfg_.dump(2) + "\n");
  }
  std::string sibling(const std::string& suffix) const { return path_ + suffix; }
  bool toFile() const { return !path_.empty(); }

 private:
  void write(const std::string& suffix, const std::string& text) const {
    if (path_.empty()) {
      if (!suffix.empty()) return;  // secondary artifacts need --out
      std::cout << text;
    } else {
      writeFile(suffix.empty() ? path_ : path_ + suffix, text);
    }
  }
  static void writeFile(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    require(bool(f), "cannot write " + path);
    f << text;
  }

  std::string path_;
  json cfg_;
};

// Raw sample dump: "BANDLAB1", int64 N, then N*N complex doubles in
// column-major order, little endian.
void writeDump(const std::string& path, const ComplexMatrix& H) {
  std::ofstream f(path, std::ios::binary);
  require(bool(f), "cannot write " + path);
  const std::int64_t N = H.rows();
  f.write("BANDLAB1", 8);
  f.write(reinterpret_cast<const char*>(&N), sizeof N);
  f.write(reinterpret_cast<const char*>(H.data()), std::streamsize(sizeof(Complex) * N * N));
}

ComplexMatrix readDump(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(bool(f), "cannot open " + path);
  char magic[8];
  std::int64_t N = 0;
  f.read(magic, 8);
  f.read(reinterpret_cast<char*>(&N), sizeof N);
  require(f && std::string(magic, 8) == "BANDLAB1" && N > 0, path + " is not a sample dump");
  ComplexMatrix H(N, N);
  f.read(reinterpret_cast<char*>(H.data()), std::streamsize(sizeof(Complex) * N * N));
  require(bool(f), path + " is truncated");
  return H;
}

json marginJson(const MarginReport& m) {
  return {{"samples", m.samples},         {"min_value", m.minValue},
          {"min_ratio", m.minRatio},      {"min_far_ratio", m.minFarRatio},
          {"violations", m.violations},   {"tolerance", m.tolerance},
          {"pass", m.pass}};
}

// ---------------------------------------------------------------------------

int runProfileCheck(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  const Output out(c);
  const auto rep = checkAssumptions(p, c.C);
  json body = toJson(rep);
  body["W"] = p.blocks();
  body["profile_id"] = p.id();
  out.document(body);
  out.dumpConfig();
  return rep.allPass() ? kOk : kAssertion;
}

int runSample(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  require(c.M.has_value(), "config: field 'M' (or 'N') is required");
  require(!c.dump || !c.out.empty(), "--dump needs --out");
  const Output out(c);
  const auto s = sampleBlockBand(p, *c.M, EntryDistribution::of(parseEnsemble(c.ensemble)),
                                 *c.seed, c.parallel);
  json body{{"N", s.N},
            {"M", s.M},
            {"W", s.W},
            {"ensemble", c.ensemble},
            {"seed", *c.seed},
            {"profile", p.toJson()},
            {"profile_id", s.profileId},
            {"max_abs_entry", maxNorm(s.H)},
            {"max_abs_entry_sqrtM", maxNorm(s.H) * std::sqrt(double(s.M))},
            {"hermitian_defect", maxNorm(s.H - s.H.adjoint())},
            {"mean_row_norm_sq", s.H.cwiseAbs2().sum() / s.N},
            {"dump", nullptr}};
  if (c.dump) {
    const std::string path = out.sibling(".bin");
    writeDump(path, s.H);
    body["dump"] = path;
  }
  out.document(body);
  out.dumpConfig();
  return kOk;
}

int runResolvent(ExperimentConfig& c) {
  require(!c.inPath.empty(), "resolvent: --in <sample summary> is required");
  const json in = readJson(c.inPath);
  for (const char* key : {"profile", "M", "ensemble", "seed"})
    require(in.contains(key), std::string("resolvent: sample summary lacks '") + key + "'");
  c.profile = in.at("profile");
  c.M = in.at("M").get<int>();
  c.N.reset();
  c.ensemble = in.at("ensemble").get<std::string>();
  c.seed = in.at("seed").get<std::uint64_t>();
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  const Output out(c);

  ComplexMatrix H;
  if (in.contains("dump") && in.at("dump").is_string()) {
    std::filesystem::path dump = in.at("dump").get<std::string>();
    if (dump.is_relative() && !std::filesystem::exists(dump))
      dump = std::filesystem::path(c.inPath).parent_path() / dump.filename();
    H = readDump(dump.string());
    require(H.rows() == *c.N, "resolvent: dump size does not match the summary");
  } else {
    H = sampleBlockBand(p, *c.M, EntryDistribution::of(parseEnsemble(c.ensemble)), *c.seed,
                        c.parallel)
            .H;
  }
  const auto dom = domainOf(c);
  const auto dec = decompose(H);
  std::vector<std::vector<std::string>> rows(dom.zGrid.size());
  parallelFor(dom.zGrid.size(), c.parallel, [&](std::size_t k) {
    const Complex z = dom.zGrid[k];
    const EntryMode mode = c.mode == "full" ? EntryMode::full()
                                            : EntryMode::sampled(c.pairs, deriveSeed(*c.seed, k));
    const auto st = resolventEntryStats(dec, z, mode);
    const auto sc = selfConsistencyResiduals(dec, p, *c.M, z);
    const double psi = std::max(st.psiOff, st.psiDiag);
    rows[k] = {formatNumber(z.real()),
               formatNumber(z.imag()),
               formatNumber(st.psiOff),
               formatNumber(st.psiDiag),
               formatNumber(st.lambdaD),
               formatNumber(std::sqrt(*c.N * z.imag()) * psi),
               formatNumber(std::sqrt(*c.M * z.imag()) * psi),
               formatNumber(stabilityGamma(p, *c.M, z)),
               formatNumber(sc.maxAbsDelta)};
  });
  CsvTable t{{"E", "eta", "psi_off", "psi_diag", "lambda_d", "sqrtNeta_psi", "sqrtMeta_psi",
              "gamma_z", "max_abs_delta"},
             std::move(rows)};
  out.csv(t);
  out.dumpConfig();
  return kOk;
}

int runLocalLaw(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  require(c.M.has_value(), "config: field 'M' (or 'N') is required");
  const Output out(c);
  const auto rep = runLocalLawExperiment(p, *c.M, EntryDistribution::of(parseEnsemble(c.ensemble)),
                                         domainOf(c), c.trials, *c.seed, c.parallel);
  out.csv(localLawTable(rep));
  out.csv(localLawSummaryTable(rep), ".summary.csv");
  out.dumpConfig();
  for (const auto& f : rep.failures)
    std::cerr << "trial " << f.trial << " failed: " << f.message << "\n";
  return rep.failures.empty() ? kOk : kAssertion;
}

int runDeloc(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  require(c.M.has_value(), "config: field 'M' (or 'N') is required");
  const Output out(c);
  const auto rep = runDelocExperiment(p, *c.M, EntryDistribution::of(parseEnsemble(c.ensemble)),
                                      c.trials, c.kappa, *c.seed, c.parallel);
  out.csv(delocTable(rep));
  json hist{{"lo", rep.histogram.lo},
            {"width", rep.histogram.width},
            {"counts", rep.histogram.counts},
            {"exploratory", rep.exploratory}};
  out.document(hist, ".histogram.json");
  out.dumpConfig();
  if (rep.exploratory)
    std::cerr << "note: M < N^{6/7}; results are exploratory for this band width\n";
  for (const auto& f : rep.failures)
    std::cerr << "trial " << f.trial << " failed: " << f.message << "\n";
  return rep.failures.empty() ? kOk : kAssertion;
}

Complex lindebergZ(const ExperimentConfig& c) {
  return {c.E, c.eta > 0 ? c.eta : 1.0 / *c.M};
}

int runLindebergProbe(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  require(c.M.has_value(), "config: field 'M' (or 'N') is required");
  const Output out(c);
  const auto rep =
      remainderDecayProbe(p, *c.M, EntryDistribution::of(parseEnsemble(c.ensemble)),
                          lindebergZ(c), c.mMax, c.trials, *c.seed, c.parallel);
  out.csv(decayTable(rep));
  out.dumpConfig();
  return rep.slope < 0 ? kOk : kAssertion;
}

int runLindebergCompare(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  require(c.M.has_value(), "config: field 'M' (or 'N') is required");
  const Output out(c);
  StreamRng rng(*c.seed, 0xC1);
  std::vector<MomentPair> pairs;
  for (int k = 0; k < c.positions; ++k)
    pairs.push_back({int(rng.below(*c.N)), int(rng.below(*c.N)), lindebergZ(c)});
  const auto candidate = c.ensemble == "gaussian" ? EntryDistribution::fourMomentMatched()
                                                  : EntryDistribution::of(parseEnsemble(c.ensemble));
  const auto rep = twoEnsembleMomentCompare(p, *c.M, candidate, pairs, c.n, c.trials, *c.seed,
                                            c.parallel);
  out.csv(compareTable(rep));
  out.dumpConfig();
  int ok = 0;
  for (const auto& e : rep.estimates) ok += std::abs(e.zscore) <= 3;
  return 10 * ok >= 9 * int(rep.estimates.size()) ? kOk : kAssertion;
}

int runSaddle(ExperimentConfig& c) {
  const auto p = loadProfile(c);
  validateConfig(c, p.blocks());
  const Output out(c);
  const auto ctx = makeContext(c.E, p, c.kappa);

  const double ref = std::max(1.0, std::abs(lSaddle(ctx)));
  const double sum = std::abs(kSaddle(ctx) + lSaddle(ctx));
  double lsMax = 0;
  double reDiff = 0;
  for (auto type : {SaddleType::Dpm, SaddleType::Dp, SaddleType::Dm}) {
    const auto pt = saddlePoint(ctx, type);
    lsMax = std::max({lsMax, std::abs(ellSB(pt, ctx.S)), std::abs(ellSX(pt, ctx.S))});
    reDiff = std::max(reDiff, std::abs(kFunctional(pt, ctx).real() - kSaddle(ctx).real()));
  }
  const double prod = std::abs(ctx.aPlus * ctx.aMinus + 1.0);
  const bool identitiesPass = sum <= 1e-12 * ref && lsMax <= 1e-12 && reDiff <= 1e-12 * ref &&
                              prod <= 1e-12;

  const auto L = verifyLLowerBound(ctx, c.samples, deriveSeed(*c.seed, 1));
  const auto K = verifyKLowerBound(ctx, c.samples, deriveSeed(*c.seed, 2));
  const auto sv = svPositivityCheck(ctx, std::min(c.samples, 10000), deriveSeed(*c.seed, 3));
  const auto mb = measureBoundCheck(ctx, c.blockM, c.samples, deriveSeed(*c.seed, 4));
  const auto dr = submatrixDetRatioCheck(ctx, std::min(c.samples, 1000), deriveSeed(*c.seed, 5));

  json body;
  body["E"] = c.E;
  body["W"] = p.blocks();
  body["profile_id"] = p.id();
  body["saddle_identities"] = {{"K_plus_L", sum},
                               {"max_abs_ell_S", lsMax},
                               {"max_re_K_spread", reDiff},
                               {"a_plus_a_minus_plus_one", prod},
                               {"pass", identitiesPass}};
  body["L_lower_bound"] = marginJson(L);
  body["K_lower_bound"] = marginJson(K.bound);
  body["K_lower_bound"]["c"] = ctx.c0;
  body["K_nonnegative"] = marginJson(K.positive);
  body["K_saddle_manifolds"] = {{"max_abs_re_K_ring", K.saddleMaxAbs}, {"pass", K.saddlePass}};
  body["Sv_positivity"] = {{"samples", sv.samples},
                           {"min_eigenvalue", sv.minEigen},
                           {"c0", sv.c0},
                           {"max_row_sum", sv.maxRowSum},
                           {"pass", sv.pass}};
  body["measure_bound"] = {{"samples", mb.samples},
                           {"M", c.blockM},
                           {"min_log_margin", mb.minLogMargin},
                           {"min_pointwise_first", mb.minPointwiseFirst},
                           {"min_pointwise_second", mb.minPointwiseSecond},
                           {"min_sector_over_rmin_sq", mb.minSector},
                           {"pass", mb.pass}};
  body["det_ratio"] = {{"trials", dr.trials},
                       {"max_Aplus_ratio", dr.maxAplusRatio},
                       {"max_Aminus_ratio", dr.maxAminusRatio},
                       {"max_S_ratio_over_bound", dr.maxSRatioMargin},
                       {"min_singular_value_Aplus", dr.minSingularValue},
                       {"max_minor_sign_error", dr.maxSignError},
                       {"pass", dr.pass}};
  const bool all = identitiesPass && L.pass && K.bound.pass && K.positive.pass && K.saddlePass &&
                   sv.pass && mb.pass && dr.pass;
  body["pass"] = all;
  out.document(body);
  out.dumpConfig();
  return all ? kOk : kAssertion;
}

std::string joinIndices(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s + "}";
}

int runWick(ExperimentConfig& c) {
  validateConfig(c, std::nullopt);
  const Output out(c);
  StreamRng rng(*c.seed, 0x3C);
  CsvTable t{{"trial", "k", "l", "I", "J", "lhs", "rhs", "degenerate", "result"}, {}};
  bool all = true;
  for (int trial = 0; trial < c.trials; ++trial) {
    Matrix<std::int64_t> B(c.k, c.k);
    for (int i = 0; i < c.k; ++i)
      for (int j = 0; j < c.k; ++j) B(i, j) = std::int64_t(rng.below(7)) - 3;
    const int l = int(rng.below(std::min(c.k, 3) + 1));
    auto pick = [&] {
      std::vector<int> all(c.k);
      for (int i = 0; i < c.k; ++i) all[i] = i;
      for (int i = 0; i < l; ++i) std::swap(all[i], all[i + rng.below(c.k - i)]);
      all.resize(l);
      return all;
    };
    const auto I = pick(), J = pick();
    const auto w = wickDeterminantCheck(B, I, J);
    all &= w.equal;
    t.add({std::to_string(trial), std::to_string(c.k), std::to_string(l), joinIndices(I),
           joinIndices(J), formatNumber(w.lhs.real()), formatNumber(w.rhs.real()),
           w.degenerate ? "1" : "0", w.equal ? "PASS" : "FAIL"});
  }
  out.csv(t);
  out.dumpConfig();
  return all ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on random block band matrices", "bandlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Overrides global;
  std::string configPath;
  app.add_option("--config", configPath, "JSON config file; flags override its fields");
  global.add<std::uint64_t>(&app, "--seed", "RNG seed, required for stochastic runs",
                            [](ExperimentConfig& c, std::uint64_t v) { c.seed = v; });
  global.add<int>(&app, "--parallel", "worker threads (default 1); does not change results",
                  [](ExperimentConfig& c, int v) { c.parallel = v; });
  global.add<std::string>(&app, "--out", "output path (default: stdout)",
                          [](ExperimentConfig& c, const std::string& v) { c.out = v; });

  Overrides local;
  auto profileOpt = [&](CLI::App* sub) {
    local.add<std::string>(sub, "--profile", "variance profile JSON",
                           [](ExperimentConfig& c, const std::string& v) {
                             c.profilePath = v;
                             c.profile.reset();
                           });
  };
  auto sizeOpts = [&](CLI::App* sub) {
    local.add<int>(sub, "--M", "block size", [](ExperimentConfig& c, int v) { c.M = v; });
    local.add<int>(sub, "--N", "matrix size (N = M W)", [](ExperimentConfig& c, int v) { c.N = v; });
  };
  auto ensembleOpt = [&](CLI::App* sub) {
    local.add<std::string>(sub, "--ensemble", "gaussian | three-point (default gaussian)",
                           [](ExperimentConfig& c, const std::string& v) { c.ensemble = v; });
  };
  auto trialsOpt = [&](CLI::App* sub) {
    local.add<int>(sub, "--trials", "number of independent samples (default 20)",
                   [](ExperimentConfig& c, int v) { c.trials = v; });
  };
  auto domainOpts = [&](CLI::App* sub) {
    local.add<std::string>(sub, "--domain", "domain JSON: kappa, eps2, nE, nEta, eta_min, eta_max",
                           [](ExperimentConfig& c, const std::string& v) { c.domainPath = v; });
    local.add<double>(sub, "--kappa", "distance of the energy window from sqrt 2 (default 0.3)",
                      [](ExperimentConfig& c, double v) { c.kappa = v; });
    local.add<double>(sub, "--eps2", "domain exponent (default 0.05)",
                      [](ExperimentConfig& c, double v) { c.eps2 = v; });
    local.add<int>(sub, "--nE", "energy grid size (default 5)",
                   [](ExperimentConfig& c, int v) { c.nE = v; });
    local.add<int>(sub, "--nEta", "eta grid size (default 8)",
                   [](ExperimentConfig& c, int v) { c.nEta = v; });
    local.add<double>(sub, "--eta-min", "lower end of the eta grid",
                      [](ExperimentConfig& c, double v) { c.etaMin = v; });
    local.add<double>(sub, "--eta-max", "upper end of the eta grid",
                      [](ExperimentConfig& c, double v) { c.etaMax = v; });
  };

  ExperimentKind kind = ExperimentKind::LocalLaw;
  auto select = [&](CLI::App* sub, ExperimentKind k) {
    sub->callback([&kind, k] { kind = k; });
  };

  auto* profile = app.add_subcommand("profile", "variance profile tools");
  profile->require_subcommand(1);
  auto* check = profile->add_subcommand("check", "check the profile assumptions; --config is the profile");
  profileOpt(check);
  local.add<double>(check, "--C", "constant in ||(S^(i))^-1||_max <= C W^gamma (default 1)",
                    [](ExperimentConfig& c, double v) { c.C = v; });
  select(check, ExperimentKind::ProfileCheck);

  auto* sample = app.add_subcommand("sample", "draw one block band matrix");
  profileOpt(sample);
  sizeOpts(sample);
  ensembleOpt(sample);
  local.flag(sample, "--dump", "also write the matrix to <out>.bin",
             [](ExperimentConfig& c) { c.dump = true; });
  select(sample, ExperimentKind::Sample);

  auto* resolventCmd = app.add_subcommand("resolvent", "resolvent statistics of a saved sample");
  local.add<std::string>(resolventCmd, "--in", "sample summary JSON written by 'sample'",
                         [](ExperimentConfig& c, const std::string& v) { c.inPath = v; });
  domainOpts(resolventCmd);
  local.add<std::string>(resolventCmd, "--mode", "full | sampled (default full)",
                         [](ExperimentConfig& c, const std::string& v) { c.mode = v; });
  local.add<int>(resolventCmd, "--pairs", "off-diagonal pairs in sampled mode (default 4096)",
                 [](ExperimentConfig& c, int v) { c.pairs = v; });
  select(resolventCmd, ExperimentKind::Resolvent);

  auto* locallaw = app.add_subcommand("locallaw", "entrywise local law over a spectral grid");
  profileOpt(locallaw);
  sizeOpts(locallaw);
  ensembleOpt(locallaw);
  trialsOpt(locallaw);
  domainOpts(locallaw);
  select(locallaw, ExperimentKind::LocalLaw);

  auto* deloc = app.add_subcommand("deloc", "sup norms of bulk eigenvectors");
  profileOpt(deloc);
  sizeOpts(deloc);
  ensembleOpt(deloc);
  trialsOpt(deloc);
  local.add<double>(deloc, "--kappa", "bulk window |lambda| <= sqrt 2 - kappa (default 0.3)",
                    [](ExperimentConfig& c, double v) { c.kappa = v; });
  select(deloc, ExperimentKind::Deloc);

  auto* lindeberg = app.add_subcommand("lindeberg", "resolvent expansion and ensemble comparison");
  lindeberg->require_subcommand(1);
  auto lindebergOpts = [&](CLI::App* sub) {
    profileOpt(sub);
    sizeOpts(sub);
    ensembleOpt(sub);
    trialsOpt(sub);
    local.add<std::string>(sub, "--z", "spectral parameter E,eta (default 0,1/M)",
                           [](ExperimentConfig& c, const std::string& v) {
                             const Complex z = parseZ(v);
                             c.E = z.real();
                             c.eta = z.imag();
                           });
  };
  auto* probe = lindeberg->add_subcommand("probe", "remainder decay of the resolvent expansion");
  lindebergOpts(probe);
  local.add<int>(probe, "--m-max", "highest expansion order (default 5)",
                 [](ExperimentConfig& c, int v) { c.mMax = v; });
  select(probe, ExperimentKind::LindebergProbe);
  auto* compare = lindeberg->add_subcommand("compare", "E|G_ab|^{2n}, Gaussian vs matched ensemble");
  lindebergOpts(compare);
  local.add<int>(compare, "--n", "moment order n in E|G_ab|^{2n} (1 or 2)",
                 [](ExperimentConfig& c, int v) { c.n = v; });
  local.add<int>(compare, "--positions", "number of random entries (default 10)",
                 [](ExperimentConfig& c, int v) { c.positions = v; });
  select(compare, ExperimentKind::LindebergCompare);

  auto* saddle = app.add_subcommand("saddle", "saddle point analysis");
  saddle->require_subcommand(1);
  auto* verify = saddle->add_subcommand("verify", "identities and lower bounds on the contours");
  profileOpt(verify);
  local.add<double>(verify, "--E", "energy (default 0)", [](ExperimentConfig& c, double v) { c.E = v; });
  local.add<int>(verify, "--samples", "random contour points per sweep (default 100000)",
                 [](ExperimentConfig& c, int v) { c.samples = v; });
  local.add<double>(verify, "--kappa", "energy window parameter (default 0.3)",
                    [](ExperimentConfig& c, double v) { c.kappa = v; });
  local.add<int>(verify, "--block-M", "M in the Gaussian measure bound (default 64)",
                 [](ExperimentConfig& c, int v) { c.blockM = v; });
  select(verify, ExperimentKind::Saddle);

  auto* wick = app.add_subcommand("wick", "Gaussian Grassmann integrals against minors");
  local.add<int>(wick, "--k", "number of generator pairs (default 5, at most 6)",
                 [](ExperimentConfig& c, int v) { c.k = v; });
  trialsOpt(wick);
  select(wick, ExperimentKind::Wick);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    ExperimentConfig cfg;
    if (!configPath.empty()) {
      const json j = readJson(configPath);
      if (kind == ExperimentKind::ProfileCheck && looksLikeProfile(j)) {
        cfg.profile = j;
      } else {
        cfg = applyConfigJson(cfg, j);
      }
    }
    cfg.kind = kind;
    for (const auto& f : global.apply) f(cfg);
    for (const auto& f : local.apply) f(cfg);
    if (!cfg.domainPath.empty()) {
      // Domain file first, then any explicit domain flags again on top.
      cfg = applyDomainJson(cfg, readJson(cfg.domainPath));
      for (const auto& f : local.apply) f(cfg);
      cfg.domainPath.clear();
    }
    if (kind != ExperimentKind::Wick && kind != ExperimentKind::Resolvent && !cfg.profile &&
        cfg.profilePath.empty())
      throw InvalidArgument("config: field 'profile' is required (--profile <file>)");
    if (isStochastic(kind) && !cfg.seed)
      throw InvalidArgument("config: field 'seed' is required for stochastic runs (--seed <u64>)");

    switch (kind) {
      case ExperimentKind::ProfileCheck: return runProfileCheck(cfg);
      case ExperimentKind::Sample: return runSample(cfg);
      case ExperimentKind::Resolvent: return runResolvent(cfg);
      case ExperimentKind::LocalLaw: return runLocalLaw(cfg);
      case ExperimentKind::Deloc: return runDeloc(cfg);
      case ExperimentKind::LindebergProbe: return runLindebergProbe(cfg);
      case ExperimentKind::LindebergCompare: return runLindebergCompare(cfg);
      case ExperimentKind::Saddle: return runSaddle(cfg);
      case ExperimentKind::Wick: return runWick(cfg);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "bandlab: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "bandlab: " << e.what() << "\n";
    return kSystem;
  }
  return kSystem;
}
