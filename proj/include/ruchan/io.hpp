#pragma once

// File formats and report assembly.  Channels travel as JSON objects with a
// mandatory schema_version, a dimension, and exactly one of "kraus" (list of
// d x d matrices) or "choi" (a d^2 x d^2 matrix).  Matrices are nested arrays
// in row-major order; every complex scalar is a two-element [re, im] array.
// Serialization is canonical (sorted keys, shortest round-trip floats), so a
// fixed seed yields byte-identical reports.

#include "ruchan/chanfactory.hpp"
#include "ruchan/core.hpp"
#include "ruchan/ensemble.hpp"
#include "ruchan/qstate.hpp"
#include "ruchan/rudistance.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace ruchan::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Encoding.

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline cplx complex_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw parse_error(std::string(what) +
                      ": complex scalar must be a [re, im] number pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Mat matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw parse_error(std::string(what) + ": matrix must be a nonempty array");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw parse_error(std::string(what) + ": matrix rows must be arrays");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw parse_error(std::string(what) + ": ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(j[i][k], what);
  }
  return m;
}

inline json channel_file(const KrausChannel& ch) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "channel";
  j["dim"] = ch.d;
  json ops = json::array();
  for (const auto& k : ch.kraus) ops.push_back(to_json(k));
  j["kraus"] = std::move(ops);
  return j;
}

inline json channel_file(const BipartiteState& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "channel";
  j["dim"] = s.d;
  j["choi"] = to_json(s.matrix);
  return j;
}

// Parsed channel: the Choi state is always populated (derived from Kraus
// operators when those were given); the Kraus form is kept when present.
struct ChannelInput {
  int d = 0;
  std::optional<KrausChannel> kraus;
  BipartiteState choi;
};

inline ChannelInput parse_channel(const json& j) {
  if (!j.is_object()) throw parse_error("channel file: not a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw parse_error("channel file: missing integer schema_version");
  if (j["schema_version"].get<int>() != kSchemaVersion)
    throw parse_error("channel file: unsupported schema_version");
  if (j.contains("kind") && j["kind"] != "channel")
    throw parse_error("channel file: kind is not 'channel'");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw parse_error("channel file: missing integer dim");
  const int d = j["dim"].get<int>();
  if (d < 2) throw parse_error("channel file: dim must be >= 2");
  const bool has_kraus = j.contains("kraus");
  const bool has_choi = j.contains("choi");
  if (has_kraus == has_choi)
    throw parse_error("channel file: need exactly one of 'kraus' or 'choi'");

  ChannelInput in;
  in.d = d;
  if (has_kraus) {
    if (!j["kraus"].is_array() || j["kraus"].empty())
      throw parse_error("channel file: 'kraus' must be a nonempty array");
    std::vector<Mat> ops;
    for (const auto& jk : j["kraus"]) {
      Mat k = matrix_from_json(jk, "kraus operator");
      if (k.rows() != d || k.cols() != d)
        throw parse_error("channel file: Kraus operator is not dim x dim");
      ops.push_back(std::move(k));
    }
    in.kraus = make_channel(d, std::move(ops));
    in.choi = choi_of(*in.kraus);
  } else {
    Mat choi = matrix_from_json(j["choi"], "choi matrix");
    if (choi.rows() != d * d || choi.cols() != d * d)
      throw parse_error("channel file: Choi matrix is not dim^2 x dim^2");
    in.choi = make_state(d, std::move(choi));
  }
  return in;
}

inline json load_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw parse_error("cannot open '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw parse_error("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw parse_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Write-then-rename so readers never observe a half-written file.
inline void write_file_atomic(const std::string& path,
                              const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw error("cannot open '" + tmp + "' for writing");
    f << bytes;
    if (!f.good()) throw error("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw error("cannot rename '" + tmp + "' to '" + path + "'");
}

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Report assembly.

struct AnalyzeOptions {
  DistanceOptions dist;
  double classify_tol = 1e-8;
  bool run_distance = true;
  bool run_extremality = true;
  bool run_assistance = true;
  int eoa_restarts = 4;
};

inline json flags_block(const StateFlags& f) {
  json j;
  j["is_psd"] = f.is_psd;
  j["trace_preserving"] = f.trace_preserving;
  j["unital"] = f.unital;
  j["doubly_stochastic"] = f.in_doubly_stochastic;
  j["min_eigenvalue"] = f.min_eigenvalue;
  j["trace"] = f.trace;
  j["dist_tp"] = f.dist_tp;
  j["dist_unital"] = f.dist_unital;
  return j;
}

inline json distance_block(const DistanceReport& rep) {
  json j;
  j["upper"] = rep.upper;
  j["lower_reduction"] = rep.lower_reduction;
  j["d2_to_mixed_unitary_upper"] = rep.m_upper;
  j["verdict"] = to_string(rep.verdict);
  j["cardinality"] = rep.cardinality;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["ensemble_route_value"] = rep.ensemble_route_value;
  j["restart_values"] = rep.restart_values;
  j["diagnostics"] = rep.diagnostics;
  json cert = json::array();
  for (const auto& m : rep.certificate) {
    json e;
    e["weight"] = m.weight;
    e["negligible"] = m.negligible;
    if (!m.negligible) e["state"] = to_json(m.state);
    cert.push_back(std::move(e));
  }
  j["certificate"] = std::move(cert);
  return j;
}

inline json extremality_block(const ExtremalityResult& r) {
  json j;
  j["independent"] = r.independent;
  j["rank"] = r.rank;
  j["needed"] = r.needed;
  return j;
}

inline json analyze_report(const ChannelInput& in, const AnalyzeOptions& opt,
                           const std::string& digest) {
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["kind"] = "report";
  rep["input_digest"] = digest;
  rep["dim"] = in.d;
  rep["flags"] = flags_block(classify(in.choi, opt.classify_tol));

  if (opt.run_distance)
    rep["distance"] = distance_block(distance(in.choi, opt.dist));

  if (opt.run_extremality) {
    const KrausChannel ch = in.kraus ? *in.kraus : kraus_of(in.choi);
    json ext;
    ext["kraus_rank"] = static_cast<int>(ch.kraus.size());
    ext["cpt"] = extremality_block(extremal_cpt_check(ch));
    ext["unital_cpt"] = extremality_block(extremal_unital_cpt_check(ch));
    rep["extremality"] = std::move(ext);
  }

  if (opt.run_assistance) {
    json assist;
    if (in.d == 2) {
      const AssistanceValue ca = concurrence_of_assistance(in.choi);
      assist["ca_printed"] = ca.printed;
      assist["ca_conjugated"] = ca.conjugated;
      assist["ca_variants_differ"] = ca.differ;
    }
    OptimizerConfig eoa_cfg;
    eoa_cfg.restarts = opt.eoa_restarts;
    eoa_cfg.seed = mix_seed(opt.dist.seed, 0xe0a);
    assist["eoa"] = eoa_estimate(in.choi, eoa_cfg);
    rep["assistance"] = std::move(assist);
  }

  json cfg;
  cfg["seed"] = opt.dist.seed;
  cfg["restarts"] = opt.dist.restarts;
  cfg["cardinality"] = opt.dist.cardinality;
  cfg["escalate"] = opt.dist.escalate;
  cfg["member_tol"] = opt.dist.member_tol;
  cfg["cert_tol"] = opt.dist.cert_tol;
  cfg["classify_tol"] = opt.classify_tol;
  rep["config"] = std::move(cfg);
  return rep;
}

// Human-readable rendering; numbers carry 9 significant digits.
inline std::string render_report(const json& rep) {
  const auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "input digest   " << rep["input_digest"].get<std::string>() << "\n";
  out << "dimension      " << rep["dim"].get<int>() << "\n";
  const auto& f = rep["flags"];
  out << "flags          psd=" << (f["is_psd"].get<bool>() ? "yes" : "no")
      << " tp=" << (f["trace_preserving"].get<bool>() ? "yes" : "no")
      << " unital=" << (f["unital"].get<bool>() ? "yes" : "no")
      << " doubly_stochastic="
      << (f["doubly_stochastic"].get<bool>() ? "yes" : "no") << "\n";
  out << "reductions     |tp defect|=" << num(f["dist_tp"].get<double>())
      << " |unital defect|=" << num(f["dist_unital"].get<double>()) << "\n";
  if (rep.contains("distance")) {
    const auto& d = rep["distance"];
    out << "distance       upper=" << num(d["upper"].get<double>())
        << " lower=" << num(d["lower_reduction"].get<double>())
        << " verdict=" << d["verdict"].get<std::string>() << "\n";
    out << "               cardinality=" << d["cardinality"].get<int>()
        << " converged=" << (d["converged"].get<bool>() ? "yes" : "no")
        << " d2_upper=" << num(d["d2_to_mixed_unitary_upper"].get<double>())
        << "\n";
  }
  if (rep.contains("extremality")) {
    const auto& e = rep["extremality"];
    const auto line = [&](const char* name, const json& b) {
      out << name << (b["independent"].get<bool>() ? "extremal" : "not extremal")
          << " (rank " << b["rank"].get<int>() << "/" << b["needed"].get<int>()
          << ")\n";
    };
    out << "kraus rank     " << e["kraus_rank"].get<int>() << "\n";
    line("extremal cpt   ", e["cpt"]);
    line("extremal ds    ", e["unital_cpt"]);
  }
  if (rep.contains("assistance")) {
    const auto& a = rep["assistance"];
    if (a.contains("ca_printed"))
      out << "assistance     ca=" << num(a["ca_printed"].get<double>())
          << " ca_conj=" << num(a["ca_conjugated"].get<double>())
          << (a["ca_variants_differ"].get<bool>() ? " (variants differ)" : "")
          << "\n";
    out << "assistance     eoa=" << num(a["eoa"].get<double>()) << "\n";
  }
  return out.str();
}

}  // namespace ruchan::io
