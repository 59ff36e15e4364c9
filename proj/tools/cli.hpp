#pragma once

// Command-line front end. `run` takes the arguments after the program name and
// writes to the given streams, so tests can drive it in-process.

#include "schmidtnorm/schmidtnorm.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace schmidtnorm::cli {

enum ExitCode : int { kOk = 0, kBadInput = 2, kNumerical = 3 };

struct CliConfig {
  std::string subcommand;
  std::string input;
  std::string output = "text";
  std::string witness_out;
  int k = 0;
  bool k_given = false;
  bool normalize = false;
  std::string method = "bounds";
  int restarts = HeuristicOptions{}.restarts;
  long samples = 100000;
  std::uint64_t seed = 0;
  int n = 0;
  double alpha = 0.0;
  int r_max = 0;
  std::int64_t size_cap = kDefaultSizeCap;
  double tol = kDefaultSchmidtTol;
};

namespace detail {

using nlohmann::json;

inline std::string fmt6(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

inline json real_array(const RealVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json frame_json(const Matrix& frame) {
  json cols = json::array();
  for (Index j = 0; j < frame.cols(); ++j) {
    json col = json::array();
    for (Index i = 0; i < frame.rows(); ++i) col.push_back({frame(i, j).real(), frame(i, j).imag()});
    cols.push_back(std::move(col));
  }
  return cols;
}

inline void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline void write_witness(const CliConfig& cfg, const std::optional<PureState>& w) {
  if (cfg.witness_out.empty() || !w) return;
  std::ofstream f(cfg.witness_out);
  if (!f) throw InputError("cannot open witness output file " + cfg.witness_out);
  f << to_json(*w).dump(2) << '\n';
}

inline BipartiteOperator require_operator(const Payload& p) {
  if (const auto* x = std::get_if<BipartiteOperator>(&p)) return *x;
  throw InputError("expected \"kind\": \"operator\" in input file");
}

inline const VectorPayload& require_vector(const Payload& p) {
  if (const auto* v = std::get_if<VectorPayload>(&p)) return *v;
  throw InputError("expected \"kind\": \"vector\" in input file");
}

inline int cmd_vecnorm(const CliConfig& cfg, std::ostream& out) {
  const Payload payload = read_payload_file(cfg.input);
  const VectorPayload& vp = require_vector(payload);
  check_schmidt_index(vp.dims, cfg.k);
  const PureState v = cfg.normalize ? PureState::normalized(vp.amplitudes, vp.dims) : PureState(vp.amplitudes, vp.dims);
  const SchmidtDecomposition sd = schmidt_decompose(v);
  const double norm = vector_k_norm(v, cfg.k);
  if (cfg.output == "json") {
    emit_json(out, {{"n", vp.dims.n},
                    {"m", vp.dims.m},
                    {"k", cfg.k},
                    {"norm", norm},
                    {"schmidt_rank", sd.rank},
                    {"schmidt_coefficients", real_array(sd.coefficients)}});
  } else {
    out << "dims: " << vp.dims.n << " x " << vp.dims.m << '\n';
    out << "k: " << cfg.k << '\n';
    out << "k-norm: " << fmt6(norm) << '\n';
    out << "schmidt rank: " << sd.rank << '\n';
    out << "schmidt coefficients:";
    for (Index i = 0; i < sd.coefficients.size(); ++i) out << ' ' << fmt6(sd.coefficients(i));
    out << '\n';
  }
  return kOk;
}

inline int cmd_opnorm(const CliConfig& cfg, std::ostream& out) {
  const BipartiteOperator x = require_operator(read_payload_file(cfg.input));
  check_schmidt_index(x.dims(), cfg.k);
  HeuristicOptions hopts;
  hopts.restarts = cfg.restarts;
  hopts.seed = cfg.seed;

  NormBounds nb;
  if (cfg.method == "bounds") {
    BoundsOptions bopts;
    bopts.heuristic = hopts;
    nb = op_norm_bounds(x, cfg.k, bopts);
  } else if (cfg.method == "heuristic") {
    nb = op_norm_heuristic(x, cfg.k, hopts);
  } else {
    require_hermitian(x, "opnorm --method brute");
    if (!is_positive_semidefinite(x)) throw InputError("opnorm --method brute: operator is not positive semidefinite");
    nb.k = cfg.k;
    nb.lower = op_norm_bruteforce(x, cfg.k, cfg.samples, cfg.seed);
    nb.upper = operator_norm(x);
    nb.methods = {"bruteforce", "operator_norm"};
  }
  write_witness(cfg, nb.lower_witness);

  if (cfg.output == "json") {
    json j = {{"n", x.dims().n}, {"m", x.dims().m}, {"k", nb.k},
              {"lower", nb.lower}, {"upper", nb.upper}, {"methods", nb.methods}};
    j["witness"] = nb.lower_witness ? to_json(*nb.lower_witness) : json(nullptr);
    emit_json(out, j);
  } else {
    out << "k: " << nb.k << '\n';
    out << "bounds: [" << fmt6(nb.lower) << ", " << fmt6(nb.upper) << "]\n";
    out << "lower method: " << nb.methods.at(0) << '\n';
    if (nb.methods.size() > 1) out << "upper method: " << nb.methods.at(1) << '\n';
    out << "witness: " << (nb.lower_witness ? "yes" : "no") << '\n';
  }
  return kOk;
}

inline int cmd_kpos(const CliConfig& cfg, std::ostream& out) {
  const BipartiteOperator x = require_operator(read_payload_file(cfg.input));
  check_schmidt_index(x.dims(), cfg.k);
  TestOptions topts;
  topts.heuristic.restarts = cfg.restarts;
  topts.heuristic.seed = cfg.seed;
  const Verdict v = certify(x, cfg.k, topts);
  write_witness(cfg, v.witness);

  if (cfg.output == "json") {
    json bounds = json::array();
    for (const auto& b : v.bounds) bounds.push_back({{"name", b.name}, {"lower", b.lower}, {"upper", b.upper}});
    json j = {{"n", x.dims().n}, {"m", x.dims().m}, {"k", v.k}, {"status", to_string(v.status)},
              {"rule", v.rule}, {"detail", v.detail}, {"bounds", bounds}};
    j["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
    j["witness_value"] = v.witness_value ? json(*v.witness_value) : json(nullptr);
    j["negative_count"] = v.negative_count ? json(*v.negative_count) : json(nullptr);
    j["negative_limit"] = v.negative_limit ? json(*v.negative_limit) : json(nullptr);
    emit_json(out, j);
  } else {
    out << "k: " << v.k << '\n';
    out << "status: " << to_string(v.status) << '\n';
    out << "rule: " << v.rule << '\n';
    if (!v.detail.empty()) out << "detail: " << v.detail << '\n';
    if (v.negative_count) out << "negative eigenvalues: " << *v.negative_count << '\n';
    if (v.negative_limit) out << "negative limit: " << *v.negative_limit << '\n';
    if (v.witness_value) out << "witness value: " << fmt6(*v.witness_value) << '\n';
    for (const auto& b : v.bounds) out << b.name << ": [" << fmt6(b.lower) << ", " << fmt6(b.upper) << "]\n";
  }
  return kOk;
}

inline int cmd_werner(const CliConfig& cfg, std::ostream& out) {
  const WernerParams p(cfg.n, cfg.alpha);
  if (cfg.k_given && (cfg.k < 1 || cfg.k > p.n)) {
    throw RangeError("k = " + std::to_string(cfg.k) + " must satisfy 1 <= k <= n = " + std::to_string(p.n));
  }
  const bool ppt = werner_is_ppt(p);
  if (cfg.output == "json") {
    json rows = json::array();
    for (int k = 1; k <= p.n; ++k) {
      rows.push_back({{"k", k}, {"threshold", 1.0 / k}, {"k_block_positive", werner_pt_kpos(p, k)}});
    }
    json j = {{"n", p.n}, {"alpha", p.alpha}, {"ppt", ppt}, {"thresholds", rows}};
    if (cfg.k_given) {
      j["k"] = cfg.k;
      j["k_block_positive"] = werner_pt_kpos(p, cfg.k);
    }
    emit_json(out, j);
    return kOk;
  }
  out << "n: " << p.n << '\n';
  out << "alpha: " << fmt6(p.alpha) << '\n';
  out << "PPT: " << (ppt ? "true" : "false") << '\n';
  if (cfg.k_given) {
    out << "k: " << cfg.k << '\n';
    out << "threshold: " << fmt6(1.0 / cfg.k) << '\n';
    out << "k-block positive: " << (werner_pt_kpos(p, cfg.k) ? "true" : "false") << '\n';
  } else {
    for (int k = 1; k <= p.n; ++k) {
      out << "k=" << k << " threshold " << fmt6(1.0 / k)
          << " k-block positive: " << (werner_pt_kpos(p, k) ? "true" : "false") << '\n';
    }
  }
  return kOk;
}

inline int cmd_werner_limit(const CliConfig& cfg, std::ostream& out) {
  LimitReportOptions opts;
  opts.size_cap = cfg.size_cap;
  opts.heuristic.restarts = cfg.restarts;
  opts.heuristic.seed = cfg.seed;
  const std::vector<LimitRow> rows = werner_limit_report(cfg.n, cfg.r_max, opts);

  if (cfg.output == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json j = {{"r", row.r}, {"rank", row.rank.str()}, {"bound_Ineq2", row.bound_ineq2},
                {"bound_Ineq1", row.bound_ineq1}, {"threshold", row.threshold}};
      j["heuristic"] = row.heuristic ? json(*row.heuristic) : json(nullptr);
      j["exceeds_threshold"] = row.exceeds_threshold ? json(*row.exceeds_threshold) : json(nullptr);
      arr.push_back(std::move(j));
    }
    emit_json(out, arr);
    return kOk;
  }

  std::vector<std::vector<std::string>> cells = {{"r", "rank", "bound_Ineq2", "bound_Ineq1", "heuristic", "threshold"}};
  for (const auto& row : rows) {
    cells.push_back({std::to_string(row.r), row.rank.str(), fmt6(row.bound_ineq2), fmt6(row.bound_ineq1),
                     row.heuristic ? fmt6(*row.heuristic) : "-", fmt6(row.threshold)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << '\n';
  }
  if (cfg.n >= 4) {
    int flagged = 0;
    for (const auto& row : rows) flagged += row.exceeds_threshold.value_or(false) ? 1 : 0;
    out << "rows above threshold: " << flagged << '\n';
  }
  return kOk;
}

inline int cmd_schmidt(const CliConfig& cfg, std::ostream& out) {
  const Payload payload = read_payload_file(cfg.input);
  const VectorPayload& vp = require_vector(payload);
  const PureState v(vp.amplitudes, vp.dims);
  const SchmidtDecomposition sd = schmidt_decompose(v, cfg.tol);
  if (cfg.output == "json") {
    emit_json(out, {{"n", vp.dims.n},
                    {"m", vp.dims.m},
                    {"rank", sd.rank},
                    {"coefficients", real_array(sd.coefficients)},
                    {"left_frame", frame_json(sd.left_frame)},
                    {"right_frame", frame_json(sd.right_frame)}});
    return kOk;
  }
  out << "dims: " << vp.dims.n << " x " << vp.dims.m << '\n';
  out << "schmidt rank: " << sd.rank << '\n';
  for (Index i = 0; i < sd.coefficients.size(); ++i) {
    out << "alpha_" << i + 1 << " = " << fmt6(sd.coefficients(i)) << '\n';
    out << "  u:";
    for (Index j = 0; j < sd.left_frame.rows(); ++j)
      out << " (" << fmt6(sd.left_frame(j, i).real()) << "," << fmt6(sd.left_frame(j, i).imag()) << ")";
    out << "\n  v:";
    for (Index j = 0; j < sd.right_frame.rows(); ++j)
      out << " (" << fmt6(sd.right_frame(j, i).real()) << "," << fmt6(sd.right_frame(j, i).imag()) << ")";
    out << '\n';
  }
  return kOk;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Schmidt k-norms, k-block positivity and Werner-state diagnostics", "schmidtnorm"};
  app.require_subcommand(1);

  const std::vector<std::string> formats = {"text", "json"};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "Output format")->check(CLI::IsMember(formats));
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "JSON vector/operator file")->required();
  };

  auto* vecnorm = app.add_subcommand("vecnorm", "Vector k-norm and Schmidt spectrum");
  add_input(vecnorm);
  vecnorm->add_option("-k", cfg.k, "Schmidt index")->required();
  vecnorm->add_flag("--normalize", cfg.normalize, "Normalize the input vector first");
  add_common(vecnorm);

  auto* opnorm = app.add_subcommand("opnorm", "Bounds on the operator k-norm");
  add_input(opnorm);
  opnorm->add_option("-k", cfg.k, "Schmidt index")->required();
  opnorm->add_option("--method", cfg.method, "bounds, heuristic or brute")
      ->check(CLI::IsMember({"bounds", "heuristic", "brute"}));
  opnorm->add_option("--restarts", cfg.restarts, "Heuristic restarts")->check(CLI::NonNegativeNumber);
  opnorm->add_option("--samples", cfg.samples, "Brute-force samples")->check(CLI::PositiveNumber);
  opnorm->add_option("--seed", cfg.seed, "RNG seed");
  opnorm->add_option("--witness-out", cfg.witness_out, "Write the lower-bound witness here");
  add_common(opnorm);

  auto* kpos = app.add_subcommand("kpos", "Certify k-block positivity");
  add_input(kpos);
  kpos->add_option("-k", cfg.k, "Schmidt index")->required();
  kpos->add_option("--seed", cfg.seed, "RNG seed for the witness search");
  kpos->add_option("--restarts", cfg.restarts, "Witness search restarts")->check(CLI::NonNegativeNumber);
  kpos->add_option("--witness-out", cfg.witness_out, "Write the negative witness here");
  add_common(kpos);

  auto* werner = app.add_subcommand("werner", "Werner-state thresholds");
  werner->add_option("--n", cfg.n, "Local dimension")->required();
  werner->add_option("--alpha", cfg.alpha, "Werner parameter in [-1, 1]")->required();
  auto* werner_k = werner->add_option("-k", cfg.k, "Schmidt index");
  add_common(werner);

  auto* limit = app.add_subcommand("werner-limit", "Lower bounds on ||P_r^-||_{S(2)}");
  limit->add_option("--n", cfg.n, "Local dimension")->required();
  limit->add_option("--rmax", cfg.r_max, "Largest tensor power")->required();
  limit->add_option("--size-cap", cfg.size_cap, "Largest matrix side to materialize")->check(CLI::PositiveNumber);
  limit->add_option("--seed", cfg.seed, "RNG seed");
  limit->add_option("--restarts", cfg.restarts, "Heuristic restarts")->check(CLI::NonNegativeNumber);
  add_common(limit);

  auto* schmidt = app.add_subcommand("schmidt", "Schmidt decomposition");
  add_input(schmidt);
  schmidt->add_option("--tol", cfg.tol, "Relative Schmidt-rank tolerance")->check(CLI::NonNegativeNumber);
  add_common(schmidt);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.k_given = werner_k->count() > 0;

  try {
    if (cfg.subcommand == "vecnorm") return detail::cmd_vecnorm(cfg, out);
    if (cfg.subcommand == "opnorm") return detail::cmd_opnorm(cfg, out);
    if (cfg.subcommand == "kpos") return detail::cmd_kpos(cfg, out);
    if (cfg.subcommand == "werner") return detail::cmd_werner(cfg, out);
    if (cfg.subcommand == "werner-limit") return detail::cmd_werner_limit(cfg, out);
    return detail::cmd_schmidt(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace schmidtnorm::cli
