#include "bandlab/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

namespace bandlab {

std::string sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string formatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string metadataLine(const nlohmann::json& cfg) {
  return std::string("# bandlab v") + kVersion + " config=" + sha256Hex(cfg.dump());
}

void writeCsv(std::ostream& out, const nlohmann::json& cfg, const CsvTable& t) {
  out << metadataLine(cfg) << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

std::string toCsvString(const nlohmann::json& cfg, const CsvTable& t) {
  std::ostringstream s;
  writeCsv(s, cfg, t);
  return s.str();
}

namespace {
std::string num(double x) { return formatNumber(x); }
std::string num(int x) { return std::to_string(x); }
}  // namespace

CsvTable localLawTable(const LocalLawReport& r) {
  CsvTable t{{"trial", "E", "eta", "psi_off", "psi_diag", "sqrtNeta_psi", "sqrtMeta_psi"}, {}};
  for (const auto& x : r.records)
    t.add({num(x.trial), num(x.z.real()), num(x.z.imag()), num(x.psiOff), num(x.psiDiag),
           num(x.scaledN), num(x.scaledM)});
  return t;
}

CsvTable localLawSummaryTable(const LocalLawReport& r) {
  CsvTable t{{"E", "eta", "count", "sqrtNeta_q10", "sqrtNeta_median", "sqrtNeta_q90",
              "sqrtNeta_max", "sqrtMeta_q10", "sqrtMeta_median", "sqrtMeta_q90", "sqrtMeta_max"},
             {}};
  for (const auto& s : r.summary)
    t.add({num(s.z.real()), num(s.z.imag()), num(s.count), num(s.scaledN.q10),
           num(s.scaledN.median), num(s.scaledN.q90), num(s.scaledN.max), num(s.scaledM.q10),
           num(s.scaledM.median), num(s.scaledM.q90), num(s.scaledM.max)});
  return t;
}

CsvTable delocTable(const DelocReport& r) {
  CsvTable t{{"trial", "bulk_count", "degenerate_excluded", "max_sqrtN_supnorm", "status"}, {}};
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    bool failed = false;
    for (const auto& f : r.failures) failed |= f.trial == int(i);
    const auto& x = r.trials[i];
    t.add({num(int(i)), num(x.bulkCount), num(x.degenerate), num(x.maxScaled),
           failed ? "failed" : "ok"});
  }
  return t;
}

CsvTable decayTable(const DecayReport& r) {
  CsvTable t{{"m", "median_abs_remainder", "median_ratio", "ensemble"}, {}};
  for (std::size_t m = 0; m < r.medianRemainder.size(); ++m)
    t.add({num(int(m)), num(r.medianRemainder[m]), m == 0 ? "" : num(r.medianRatio[m - 1]),
           r.ensemble});
  return t;
}

CsvTable compareTable(const CompareReport& r) {
  CsvTable t{{"a", "b", "E", "eta", "n", "mean_gaussian", "se_gaussian", "mean_matched",
              "se_matched", "diff", "combined_se", "zscore"},
             {}};
  for (const auto& e : r.estimates)
    t.add({num(e.pair.a), num(e.pair.b), num(e.pair.z.real()), num(e.pair.z.imag()), num(r.n),
           num(e.meanReference), num(e.seReference), num(e.meanCandidate), num(e.seCandidate),
           num(e.diff), num(e.combinedSe), num(e.zscore)});
  return t;
}

}  // namespace bandlab
