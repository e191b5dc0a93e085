// Command-line interface: analyze/decide channels, generate channel files,
// run extremality checks and the saturation experiment.
//
// Exit codes: 0 success (including an UNDECIDED verdict), 2 for input,
// parsing, or validation problems, 3 for numerical failures.

#include "ruchan/ruchan.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using ruchan::io::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RUCHAN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ruchan::parse_error("RUCHAN_SEED is not an unsigned integer");
    }
  }
  return 12345;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    ruchan::io::write_file_atomic(out_path, text);
}

struct DistanceFlags {
  std::uint64_t seed = 12345;
  int restarts = 0;
  int cardinality = 0;
  bool escalate = false;
  double member_tol = 1e-6;
  double cert_tol = 1e-8;
  int max_iters = 2000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (overrides RUCHAN_SEED)");
    cmd->add_option("--restarts", restarts,
                    "optimizer restarts (0 = 8 for d=2, 16 otherwise)");
    cmd->add_option("--cardinality", cardinality,
                    "ensemble size K (0 = d^2; must be >= d^2)");
    cmd->add_flag("--escalate-K", escalate,
                  "sweep K through d^2, 2d^2, d^4 with warm starts");
    cmd->add_option("--member-tol", member_tol,
                    "upper bound below this is reported RU_numerical");
    cmd->add_option("--cert-tol", cert_tol,
                    "reduction defect above this certifies NOT_RU");
    cmd->add_option("--max-iters", max_iters, "iterations per restart");
  }

  ruchan::DistanceOptions options() const {
    ruchan::DistanceOptions d;
    d.seed = seed;
    d.restarts = restarts;
    d.cardinality = cardinality;
    d.escalate = escalate;
    d.member_tol = member_tol;
    d.cert_tol = cert_tol;
    d.opt.max_iters = max_iters;
    return d;
  }
};

int run(int argc, char** argv) {
  CLI::App app{
      "Random-unitary channel analysis: distance of a doubly stochastic map "
      "from the mixtures of unitaries, with certificates, extremality checks "
      "and channel generators"};
  app.require_subcommand(1);
  const std::uint64_t env_seed = default_seed();

  // analyze ------------------------------------------------------------
  std::string an_input, an_output;
  bool an_json = false, an_no_ext = false, an_no_assist = false;
  DistanceFlags an_dist;
  an_dist.seed = env_seed;
  double an_classify_tol = 1e-8;
  int an_eoa_restarts = 4;
  auto* an = app.add_subcommand(
      "analyze", "full report: flags, distance verdict, extremality, "
                 "assistance measures");
  an->add_option("input", an_input, "channel JSON file")->required();
  an->add_option("-o,--output", an_output, "write report here (atomic)");
  an->add_flag("--json", an_json, "emit the JSON report instead of text");
  an->add_flag("--no-extremality", an_no_ext, "skip extremality checks");
  an->add_flag("--no-assistance", an_no_assist, "skip assistance measures");
  an->add_option("--classify-tol", an_classify_tol, "flag tolerance");
  an->add_option("--eoa-restarts", an_eoa_restarts,
                 "restarts for the assistance-entropy estimate");
  an_dist.attach(an);

  // distance -----------------------------------------------------------
  std::string di_input, di_output;
  bool di_json = false;
  DistanceFlags di_dist;
  di_dist.seed = env_seed;
  auto* di = app.add_subcommand(
      "distance", "distance estimate and verdict only");
  di->add_option("input", di_input, "channel JSON file")->required();
  di->add_option("-o,--output", di_output, "write report here (atomic)");
  di->add_flag("--json", di_json, "emit the JSON report instead of text");
  di_dist.attach(di);

  // generate -----------------------------------------------------------
  std::string ge_kind, ge_output;
  int ge_d = 2, ge_rank = 0, ge_count = 2;
  double ge_param = 1.0, ge_pocs_tol = 1e-10;
  int ge_pocs_iters = 500;
  std::uint64_t ge_seed = env_seed;
  auto* ge = app.add_subcommand(
      "generate",
      "write a channel file: cp | cpt | unital | doubly-stochastic | "
      "identity | loss | depolarizing | landau-streater | unitary-mixture");
  ge->add_option("kind", ge_kind, "channel family")->required();
  ge->add_option("-o,--output", ge_output, "output path (atomic)")->required();
  ge->add_option("-d,--dim", ge_d, "local dimension");
  ge->add_option("--rank", ge_rank, "Kraus rank for random kinds (0 = d^2)");
  ge->add_option("--count", ge_count, "unitaries in a mixture");
  ge->add_option("--param", ge_param, "depolarizing strength p");
  ge->add_option("--seed", ge_seed, "RNG seed (overrides RUCHAN_SEED)");
  ge->add_option("--pocs-tol", ge_pocs_tol,
                 "feasibility tolerance for doubly-stochastic");
  ge->add_option("--pocs-iters", ge_pocs_iters,
                 "projection sweeps allowed for doubly-stochastic");

  // extremal -----------------------------------------------------------
  std::string ex_input;
  bool ex_json = false;
  auto* ex = app.add_subcommand("extremal",
                                "Kraus-product independence checks");
  ex->add_option("input", ex_input, "channel JSON file")->required();
  ex->add_flag("--json", ex_json, "emit JSON");

  // ca -----------------------------------------------------------------
  std::string ca_input;
  bool ca_json = false;
  auto* ca = app.add_subcommand(
      "ca", "two-qubit concurrence of assistance (both closed-form variants)");
  ca->add_option("input", ca_input, "channel JSON file")->required();
  ca->add_flag("--json", ca_json, "emit JSON");

  // offdiag ------------------------------------------------------------
  std::string od_input, od_output;
  double od_tol = 1e-13;
  auto* od = app.add_subcommand(
      "offdiag", "rotate a traceless Hermitian matrix to zero diagonal");
  od->add_option("input", od_input,
                 "JSON file with a row-major complex 'matrix'")->required();
  od->add_option("-o,--output", od_output, "write result here (atomic)");
  od->add_option("--tol", od_tol, "relative diagonal target");

  // experiment ---------------------------------------------------------
  int xp_dmax = 6, xp_trials = 100;
  std::uint64_t xp_seed = env_seed;
  bool xp_json = false;
  auto* xp = app.add_subcommand(
      "experiment",
      "fraction of extremal maps among random channels at the critical "
      "Kraus rank");
  xp->add_option("--dmax", xp_dmax, "largest dimension");
  xp->add_option("--trials", xp_trials, "trials per dimension and branch");
  xp->add_option("--seed", xp_seed, "RNG seed (overrides RUCHAN_SEED)");
  xp->add_flag("--json", xp_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*an || *di) {
    const bool is_an = static_cast<bool>(*an);
    const std::string& input = is_an ? an_input : di_input;
    const std::string& output = is_an ? an_output : di_output;
    const bool as_json = is_an ? an_json : di_json;
    ruchan::io::AnalyzeOptions opt;
    opt.dist = (is_an ? an_dist : di_dist).options();
    if (is_an) {
      opt.classify_tol = an_classify_tol;
      opt.run_extremality = !an_no_ext;
      opt.run_assistance = !an_no_assist;
      opt.eoa_restarts = an_eoa_restarts;
    } else {
      opt.run_extremality = false;
      opt.run_assistance = false;
    }
    const std::string bytes = ruchan::io::read_file_bytes(input);
    const auto channel = ruchan::io::parse_channel(json::parse(bytes));
    const json rep = ruchan::io::analyze_report(
        channel, opt, ruchan::io::fnv1a_hex(bytes));
    emit(as_json ? rep.dump(2) + "\n" : ruchan::io::render_report(rep),
         output);
    return 0;
  }

  if (*ge) {
    const int rank = ge_rank > 0 ? ge_rank : ge_d * ge_d;
    json file;
    if (ge_kind == "cp") {
      file = ruchan::io::channel_file(ruchan::random_cp(ge_d, rank, ge_seed));
    } else if (ge_kind == "cpt") {
      file = ruchan::io::channel_file(
          ruchan::project_tp(ruchan::random_cp(ge_d, rank, ge_seed)));
    } else if (ge_kind == "unital") {
      file = ruchan::io::channel_file(
          ruchan::project_unital(ruchan::random_cp(ge_d, rank, ge_seed)));
    } else if (ge_kind == "doubly-stochastic") {
      auto [choi, trace] = ruchan::random_doubly_stochastic(
          ge_d, rank, ge_seed, ge_pocs_tol, ge_pocs_iters);
      std::cerr << "feasible after " << trace.iterations
                << " projection sweeps\n";
      file = ruchan::io::channel_file(choi);
    } else {
      file = ruchan::io::channel_file(ruchan::example_channel(
          ge_kind, ge_d, ge_param, ge_count, ge_seed));
    }
    ruchan::io::write_file_atomic(ge_output, file.dump(2) + "\n");
    return 0;
  }

  if (*ex) {
    const auto channel =
        ruchan::io::parse_channel(ruchan::io::load_json_file(ex_input));
    const ruchan::KrausChannel ch =
        channel.kraus ? *channel.kraus : ruchan::kraus_of(channel.choi);
    const auto cpt = ruchan::extremal_cpt_check(ch);
    const auto uni = ruchan::extremal_unital_cpt_check(ch);
    if (ex_json) {
      json j;
      j["schema_version"] = ruchan::io::kSchemaVersion;
      j["kind"] = "extremality";
      j["kraus_rank"] = static_cast<int>(ch.kraus.size());
      j["cpt"] = ruchan::io::extremality_block(cpt);
      j["unital_cpt"] = ruchan::io::extremality_block(uni);
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "kraus rank " << ch.kraus.size() << "\n"
                << "cpt:    " << (cpt.independent ? "extremal" : "not extremal")
                << " (rank " << cpt.rank << "/" << cpt.needed << ")\n"
                << "unital: " << (uni.independent ? "extremal" : "not extremal")
                << " (rank " << uni.rank << "/" << uni.needed << ")\n";
    }
    return 0;
  }

  if (*ca) {
    const auto channel =
        ruchan::io::parse_channel(ruchan::io::load_json_file(ca_input));
    const auto v = ruchan::concurrence_of_assistance(channel.choi);
    if (ca_json) {
      json j;
      j["schema_version"] = ruchan::io::kSchemaVersion;
      j["kind"] = "assistance";
      j["ca_printed"] = v.printed;
      j["ca_conjugated"] = v.conjugated;
      j["ca_variants_differ"] = v.differ;
      std::cout << j.dump(2) << "\n";
    } else {
      char buf[96];
      std::snprintf(buf, sizeof buf, "ca=%.9g ca_conj=%.9g%s\n", v.printed,
                    v.conjugated, v.differ ? " (variants differ)" : "");
      std::cout << buf;
    }
    return 0;
  }

  if (*od) {
    const json in = ruchan::io::load_json_file(od_input);
    if (!in.is_object() || !in.contains("matrix"))
      throw ruchan::parse_error("offdiag input: missing 'matrix'");
    const ruchan::Mat a =
        ruchan::io::matrix_from_json(in["matrix"], "offdiag matrix");
    const auto res = ruchan::off_diagonalize(a, od_tol);
    const ruchan::Mat rotated = res.t.adjoint() * a * res.t;
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < rotated.rows(); ++i)
      max_diag = std::max(max_diag, std::abs(rotated(i, i)));
    json j;
    j["schema_version"] = ruchan::io::kSchemaVersion;
    j["kind"] = "offdiag_result";
    j["t"] = ruchan::io::to_json(res.t);
    j["rotations"] = res.rotations;
    j["max_abs_diag"] = max_diag;
    emit(j.dump(2) + "\n", od_output);
    return 0;
  }

  if (*xp) {
    const auto rows = ruchan::saturation_experiment(xp_dmax, xp_trials, xp_seed);
    if (xp_json) {
      json arr = json::array();
      for (const auto& r : rows) {
        json j;
        j["d"] = r.d;
        j["branch"] = r.branch;
        j["rank"] = r.rank;
        j["trials"] = r.trials;
        j["extremal"] = r.extremal;
        j["failures"] = r.failures;
        j["fraction"] = r.fraction;
        arr.push_back(std::move(j));
      }
      json out;
      out["schema_version"] = ruchan::io::kSchemaVersion;
      out["kind"] = "experiment";
      out["rows"] = std::move(arr);
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "  d branch   rank trials extremal fraction\n";
      for (const auto& r : rows) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%3d %-8s %4d %6d %8d %.9g\n", r.d,
                      r.branch.c_str(), r.rank, r.trials, r.extremal,
                      r.fraction);
        std::cout << buf;
      }
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ruchan::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ruchan::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ruchan::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return 3;
  }
}
