// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.
//
// Single binary exposing the library as subcommands with JSON problem and
// report schemas. Exit codes: 0 success, 1 unknown subcommand, 2 schema
// error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "bl/forward.hpp"
#include "bl/gaussian.hpp"
#include "bl/json_io.hpp"
#include "bl/reverse.hpp"
#include "bl/special.hpp"

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct RunConfig {
  std::uint64_t seed = 0;
  int restarts = 32;
  int workers = 0;
  std::string out_path;
  std::vector<std::string> tol_overrides;
  std::map<std::string, double> tols;

  void parse_tols() {
    for (const std::string& kv : tol_overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw bl::SchemaError("--tol expects KEY=VAL, got: " + kv);
      tols[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
  }
  double tol(const std::string& key, double dflt) const {
    auto it = tols.find(key);
    return it == tols.end() ? dflt : it->second;
  }
  bl::OptimizerOptions opt_options() const {
    bl::OptimizerOptions o;
    o.seed = seed;
    o.restarts = restarts;
    o.workers = workers;
    return o;
  }
};

double to_bits(double nats) {
  return std::isfinite(nats) ? nats / kLn2 : nats;
}

// Extended reals serialize as strings so the report stays valid JSON.
bl::Json num(double v) {
  if (v == bl::kInf) return "inf";
  if (v == -bl::kInf) return "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

void put_value(bl::Json& values, const std::string& name, double nats) {
  values[name + "_nats"] = num(nats);
  values[name + "_bits"] = num(to_bits(nats));
}

bl::Json read_input(const std::string& path, std::string* raw) {
  std::ifstream in(path);
  if (!in) throw bl::SchemaError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  *raw = ss.str();
  bl::Json j = bl::Json::parse(*raw, nullptr, false);
  if (j.is_discarded()) throw bl::SchemaError("malformed JSON in " + path);
  return j;
}

int emit_report(const RunConfig& cfg, const std::string& subcommand,
                const std::string& raw_input, bl::Json values,
                bl::Json certificates, bl::Json tolerances) {
  bl::Json report;
  report["schema"] = "blduality/1";
  report["subcommand"] = subcommand;
  report["inputs_digest"] = bl::digest_hex(raw_input);
  report["units"] = "nats";
  report["seed"] = cfg.seed;
  report["values"] = std::move(values);
  report["certificates"] = std::move(certificates);
  report["tolerances"] = std::move(tolerances);
  std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    if (!out) throw bl::SchemaError("cannot open output file: " + cfg.out_path);
    out << text << "\n";
  }
  return 0;
}

double number_or_inf(const bl::Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && j.get<std::string>() == "inf") return bl::kInf;
  throw bl::SchemaError(std::string(what) + ": expected a number or \"inf\"");
}

// ---------------------------------------------------------------------------
// Subcommand handlers. Each returns the process exit code.

int run_forward_constant(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::ForwardProblem prob = bl::forward_problem_from_json(read_input(path, &raw));
  bl::DualityReport rep = bl::best_constant_entropy(prob, cfg.opt_options());
  bl::Json values, certs;
  put_value(values, "d_star", rep.d_star);
  values["argmax_p"] = bl::to_json(rep.argmax_p);
  if (std::isfinite(rep.d_star)) {
    bl::TestFunctions tight = bl::tight_test_functions(prob, rep.argmax_p);
    double lhs = bl::functional_lhs(prob, tight, rep.d_star);
    double rhs = bl::functional_rhs(prob, tight);
    values["functional_gap"] = num(rhs - lhs);
    certs["tight_functions_ratio"] = num(rhs > 0 ? lhs / rhs : 0.0);
  }
  certs["certified_by_grid"] = rep.certified_by_grid;
  certs["n_restarts_used"] = rep.n_restarts_used;
  return emit_report(cfg, "forward-constant", raw, values, certs,
                     {{"functional_gap", cfg.tol("functional_gap", 1e-6)}});
}

int run_verify_forward(const RunConfig& cfg, const std::string& path, double d,
                       int samples) {
  std::string raw;
  bl::ForwardProblem prob = bl::forward_problem_from_json(read_input(path, &raw));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(1e-3, 3.0);
  double min_gap = bl::kInf;
  int violations = 0;
  const double tol = cfg.tol("verify_gap", 1e-9);
  for (int k = 0; k < samples; ++k) {
    bl::TestFunctions f;
    for (const bl::Channel& w : prob.channels) {
      std::vector<double> fj(w.output_size());
      for (double& v : fj) v = unif(rng);
      f.f.push_back(std::move(fj));
    }
    double gap = bl::functional_rhs(prob, f) - bl::functional_lhs(prob, f, d);
    min_gap = std::min(min_gap, gap);
    if (gap < -tol) ++violations;
  }
  bl::Json values, certs;
  values["d"] = num(d);
  values["min_gap"] = num(min_gap);
  values["violations"] = violations;
  certs["samples"] = samples;
  return emit_report(cfg, "verify-forward", raw, values, certs,
                     {{"verify_gap", tol}});
}

int run_sdpi(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  bl::Dist qx = bl::dist_from_json(j.contains("qx") ? j.at("qx") : bl::Json());
  bl::Channel w =
      bl::channel_from_json(j.contains("channel") ? j.at("channel") : bl::Json());
  double c;
  try {
    c = bl::sdpi_constant(qx, w, cfg.opt_options());
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  values["c_star"] = num(c);
  certs["grid_resolution"] = qx.size() == 2 ? 1e-5 : (qx.size() == 3 ? 1e-3 : 0.0);
  return emit_report(cfg, "sdpi", raw, values, certs,
                     {{"sdpi", cfg.tol("sdpi", 1e-3)}});
}

int run_hypercontractivity(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  if (!j.contains("n1") || !j.contains("n2"))
    throw bl::SchemaError("hypercontractivity: need n1, n2");
  bl::HCQuery q{
      bl::dist_from_json(j.contains("q_joint") ? j.at("q_joint") : bl::Json()),
      j.at("n1").get<std::size_t>(), j.at("n2").get<std::size_t>(),
      number_or_inf(j.contains("p1") ? j.at("p1") : bl::Json(), "p1"),
      number_or_inf(j.contains("p2") ? j.at("p2") : bl::Json(), "p2")};
  double deficit;
  try {
    deficit = bl::hc_entropy_deficit(q, cfg.opt_options());
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  const double tol = cfg.tol("hc_deficit", 1e-8);
  bl::Json values, certs;
  put_value(values, "deficit", deficit);
  values["hypercontractive"] = deficit >= -tol;
  return emit_report(cfg, "hypercontractivity", raw, values, certs,
                     {{"hc_deficit", tol}});
}

int run_renyi_var(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  if (!j.contains("alpha")) throw bl::SchemaError("renyi-var: need alpha");
  double alpha = j.at("alpha").get<double>();
  bl::Dist q = bl::dist_from_json(j.contains("q") ? j.at("q") : bl::Json());
  bl::Dist r = bl::dist_from_json(j.contains("r") ? j.at("r") : bl::Json());
  bl::RenyiVarResult res;
  double closed;
  try {
    res = bl::renyi_variational_max(alpha, q, r, cfg.opt_options());
    closed = bl::renyi_divergence(alpha, q, r);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  put_value(values, "value", res.value);
  put_value(values, "closed_form", closed);
  values["g_star"] = res.g_star;
  certs["ascent_vs_closed_form"] =
      num(std::isfinite(res.value) ? std::fabs(res.value - closed) : 0.0);
  return emit_report(cfg, "renyi-var", raw, values, certs,
                     {{"renyi_var", cfg.tol("renyi_var", 1e-6)}});
}

int run_shearer(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  bl::Dist p = bl::dist_from_json(j.contains("p_joint") ? j.at("p_joint") : bl::Json());
  if (!j.contains("m")) throw bl::SchemaError("shearer: need m");
  std::size_t m = j.at("m").get<std::size_t>();
  double gap;
  try {
    gap = bl::shearer_gap(p, m);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  put_value(values, "gap", gap);
  return emit_report(cfg, "shearer", raw, values, certs,
                     {{"shearer", cfg.tol("shearer", 1e-12)}});
}

int run_loomis_whitney(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  if (!j.contains("fs") || !j.at("fs").is_array())
    throw bl::SchemaError("loomis-whitney: need fs (array of arrays)");
  std::vector<std::vector<double>> fs;
  for (const auto& f : j.at("fs")) fs.push_back(f.get<std::vector<double>>());
  double gap;
  try {
    gap = bl::loomis_whitney_gap(fs);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  values["gap"] = num(gap);
  return emit_report(cfg, "loomis-whitney", raw, values, certs,
                     {{"loomis_whitney", cfg.tol("loomis_whitney", 1e-12)}});
}

int run_reverse_constant(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::ReverseProblem prob = bl::reverse_problem_from_json(read_input(path, &raw));
  bl::ReverseReport rep = bl::best_constant_reverse(prob, cfg.opt_options());
  bl::Json values, certs;
  put_value(values, "d_star", rep.d_star);
  bl::Json marg = bl::Json::array();
  for (const bl::Dist& p : rep.witness_marginals) marg.push_back(bl::to_json(p));
  values["witness_marginals"] = std::move(marg);
  values["witness_coupling"] = bl::to_json(rep.witness_coupling.joint);
  certs["certified_by_grid"] = rep.certified_by_grid;
  return emit_report(cfg, "reverse-constant", raw, values, certs,
                     {{"reverse", cfg.tol("reverse", 5e-3)}});
}

int run_coupling(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  if (!j.contains("marginals") || !j.at("marginals").is_array())
    throw bl::SchemaError("coupling: need marginals");
  std::vector<bl::Dist> marginals;
  for (const auto& p : j.at("marginals")) marginals.push_back(bl::dist_from_json(p));
  bl::Channel mac =
      bl::channel_from_json(j.contains("mac") ? j.at("mac") : bl::Json());
  bl::Measure r_y =
      bl::measure_from_json(j.contains("r_y") ? j.at("r_y") : bl::Json());
  bl::CouplingResult res;
  try {
    res = bl::min_coupling_divergence(marginals, mac, r_y, cfg.opt_options());
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  put_value(values, "value", res.value);
  values["coupling"] = bl::to_json(res.coupling.joint);
  certs["fw_gap"] = num(res.fw_gap);
  certs["exact_oracle"] = res.certified;
  return emit_report(cfg, "coupling", raw, values, certs,
                     {{"fw_gap", cfg.tol("fw_gap", 1e-6)}});
}

int run_reverse_verify(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  bl::ReverseProblem prob = bl::reverse_problem_from_json(j);
  if (!j.contains("F") || !j.contains("fs") || !j.contains("d"))
    throw bl::SchemaError("reverse-verify: need F, fs, d");
  std::vector<double> big_f = j.at("F").get<std::vector<double>>();
  std::vector<std::vector<double>> fs;
  for (const auto& f : j.at("fs")) fs.push_back(f.get<std::vector<double>>());
  double d = j.at("d").get<double>();
  bl::ReverseVerification v;
  try {
    v = bl::verify_reverse_functional(prob, big_f, fs, d);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  values["admissible"] = v.admissible;
  values["gap"] = num(v.gap);
  return emit_report(cfg, "reverse-verify", raw, values, certs,
                     {{"reverse_gap", cfg.tol("reverse_gap", 1e-6)}});
}

int run_gaussian_f0(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::GaussianProblem prob = bl::gaussian_problem_from_json(read_input(path, &raw));
  bl::GaussianMinOptions opts;
  opts.seed = cfg.seed;
  bl::GaussianMinResult res = bl::minimize_f0(prob, opts);
  if (res.unbounded) {
    std::cerr << "gaussian-f0: objective is unbounded below\n";
    return 3;
  }
  bl::Json values, certs;
  put_value(values, "value", res.value);
  values["k_star"] = bl::to_json(res.k_star);
  certs["proj_grad_norm"] = num(res.proj_grad_norm);
  return emit_report(cfg, "gaussian-f0", raw, values, certs,
                     {{"stationarity", opts.stat_tol}});
}

int run_gaussian_bl(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  if (!j.contains("problem") || !j.contains("qx_ref") || !j.contains("refs"))
    throw bl::SchemaError("gaussian-bl: need problem, qx_ref, refs");
  bl::GaussianProblem prob = bl::gaussian_problem_from_json(j.at("problem"));
  bl::GaussianRef qx = bl::gaussian_ref_from_json(j.at("qx_ref"));
  std::vector<bl::GaussianRef> refs;
  for (const auto& r : j.at("refs")) refs.push_back(bl::gaussian_ref_from_json(r));
  bl::GaussianMinOptions opts;
  opts.seed = cfg.seed;
  bl::GaussianBLResult res;
  try {
    res = bl::gaussian_gbll_constant(prob, qx, refs, opts);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  put_value(values, "d", res.d);
  values["finite"] = res.finite;
  if (res.finite) {
    values["mean_star"] = bl::to_json(res.mean_star);
    values["k_star"] = bl::to_json(res.k_star);
  }
  // The covariance constraint, when present, is read as a cap on Cov(X).
  certs["sigma_cap_reading"] = "cov_of_x";
  return emit_report(cfg, "gaussian-bl", raw, values, certs,
                     {{"stationarity", opts.stat_tol}});
}

int run_nelson(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  Eigen::MatrixXd sigma =
      bl::matrix_from_json(j.contains("sigma") ? j.at("sigma") : bl::Json());
  if (!j.contains("p")) throw bl::SchemaError("nelson: need p");
  std::vector<double> p = j.at("p").get<std::vector<double>>();
  double margin;
  try {
    margin = bl::nelson_margin(sigma, p);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  values["hypercontractive"] = margin >= -1e-10;
  certs["min_eigenvalue"] = num(margin);
  return emit_report(cfg, "nelson", raw, values, certs,
                     {{"eigenvalue_margin", 1e-10}});
}

int run_wyner(const RunConfig& cfg, const std::string& path) {
  std::string raw;
  bl::Json j = read_input(path, &raw);
  Eigen::MatrixXd sigma =
      bl::matrix_from_json(j.contains("sigma") ? j.at("sigma") : bl::Json());
  bl::WynerResult res;
  try {
    res = bl::wyner_ci(sigma);
  } catch (const std::invalid_argument& e) {
    throw bl::SchemaError(e.what());
  }
  bl::Json values, certs;
  put_value(values, "value", res.value);
  values["lambda_star"] = bl::to_json(res.lambda_star);
  certs["barrier_path_mu_final"] = 1e-9;
  return emit_report(cfg, "wyner", raw, values, certs,
                     {{"wyner", cfg.tol("wyner", 1e-6)}});
}

// ---------------------------------------------------------------------------
// Selftest: desk-scale invariant suites for every module.

struct SelftestState {
  int checks = 0;
  int failures = 0;
  void report(const std::string& module, const std::string& property, bool ok,
              std::uint64_t seed) {
    ++checks;
    if (!ok) {
      ++failures;
      std::printf("FAIL %s :: %s (seed %llu)\n", module.c_str(),
                  property.c_str(), static_cast<unsigned long long>(seed));
    }
  }
};

int run_selftest(const RunConfig& cfg, const std::string& level) {
  if (level != "quick" && level != "full")
    throw bl::SchemaError("selftest: level must be quick or full");
  const bool full = level == "full";
  SelftestState st;
  std::mt19937_64 rng(cfg.seed);
  std::exponential_distribution<double> exp1(1.0);
  auto rand_dist = [&](std::size_t n) {
    std::vector<double> p(n);
    double s = 0.0;
    for (double& v : p) {
      v = exp1(rng) + 1e-6;
      s += v;
    }
    for (double& v : p) v /= s;
    return bl::Dist(std::move(p));
  };
  auto rand_channel = [&](std::size_t in, std::size_t out) {
    std::vector<bl::Dist> rows;
    for (std::size_t i = 0; i < in; ++i) rows.push_back(rand_dist(out));
    return bl::Channel(std::move(rows));
  };

  // finite_prob: divergence nonnegativity and data processing.
  {
    bool ok = true;
    const double tol = cfg.tol("kl_nonneg", 1e-12);
    for (int t = 0; t < (full ? 1000 : 200); ++t) {
      bl::Dist p = rand_dist(3), q = rand_dist(3);
      if (bl::kl_divergence(p, bl::Measure(q)) < -tol) ok = false;
      bl::Channel w = rand_channel(3, 3);
      double before = bl::kl_divergence(p, bl::Measure(q));
      double after = bl::kl_divergence(bl::pushforward(p, w),
                                       bl::Measure(bl::pushforward(q, w)));
      if (after > before + 1e-9) ok = false;
    }
    st.report("finite_prob", "kl nonnegativity + data processing", ok, cfg.seed);
  }

  // forward_duality: soundness of sampled test functions at d_star.
  {
    bool ok = true;
    std::uniform_real_distribution<double> unif(1e-2, 2.0);
    bl::OptimizerOptions o = cfg.opt_options();
    o.restarts = 8;
    for (int t = 0; t < (full ? 10 : 3) && ok; ++t) {
      bl::Dist qx = rand_dist(2);
      bl::Channel w = rand_channel(2, 2);
      bl::ForwardProblem prob(qx, {w}, {bl::Measure(rand_dist(2))}, {1.0});
      bl::DualityReport rep = bl::best_constant_entropy(prob, o);
      if (!std::isfinite(rep.d_star)) continue;
      for (int k = 0; k < (full ? 500 : 100); ++k) {
        bl::TestFunctions f{{{unif(rng), unif(rng)}}};
        if (bl::functional_lhs(prob, f, rep.d_star + 1e-6) >
            bl::functional_rhs(prob, f) * (1 + 1e-9))
          ok = false;
      }
    }
    st.report("forward_duality", "functional soundness at d_star", ok, cfg.seed);
  }

  // special_ineq: SDPI BSC value and Renyi ascent vs closed form.
  {
    double c = bl::sdpi_constant(bl::Dist::uniform(2), bl::Channel::bsc(0.1));
    st.report("special_ineq", "sdpi BSC(0.1) = 1.5625",
              std::fabs(c - 1.5625) <= cfg.tol("sdpi_bsc", 1e-3), cfg.seed);
    bool ok = true;
    bl::OptimizerOptions o = cfg.opt_options();
    o.restarts = 4;
    for (int t = 0; t < (full ? 10 : 3); ++t) {
      bl::Dist q = rand_dist(4), r = rand_dist(4);
      double target = bl::renyi_divergence(2.0, q, r);
      bl::RenyiVarResult res = bl::renyi_variational_max(2.0, q, r, o);
      if (std::fabs(res.value - target) > cfg.tol("renyi_var", 1e-6)) ok = false;
    }
    st.report("special_ineq", "renyi ascent matches closed form", ok, cfg.seed);
    ok = true;
    for (int t = 0; t < (full ? 1000 : 200); ++t) {
      bl::Dist p = rand_dist(8);
      if (bl::shearer_gap(p, 3) < -cfg.tol("shearer", 1e-12)) ok = false;
    }
    st.report("special_ineq", "shearer gap nonnegative", ok, cfg.seed);
  }

  // reverse_duality: coupling minimum below random feasible couplings.
  {
    bool ok = true;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < (full ? 10 : 3) && ok; ++t) {
      std::vector<bl::Dist> qs{rand_dist(2), rand_dist(2)};
      bl::Channel mac = rand_channel(4, 2);
      bl::Measure r(rand_dist(2));
      bl::CouplingResult res = bl::min_coupling_divergence(qs, mac, r);
      double a0 = qs[0][0], b0 = qs[1][0];
      double lo = std::max(0.0, a0 + b0 - 1.0), hi = std::min(a0, b0);
      for (int k = 0; k < (full ? 300 : 60); ++k) {
        double s = lo + (hi - lo) * unif(rng);
        std::vector<double> joint{s, a0 - s, b0 - s, 1.0 - a0 - b0 + s};
        for (double& v : joint) v = std::max(v, 0.0);
        std::vector<double> py(2, 0.0);
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t y = 0; y < 2; ++y) py[y] += joint[i] * mac(y, i);
        double val = 0.0;
        bool inf = false;
        for (std::size_t y = 0; y < 2; ++y) {
          if (py[y] == 0.0) continue;
          if (r[y] == 0.0) {
            inf = true;
            break;
          }
          val += py[y] * std::log(py[y] / r[y]);
        }
        if (!inf && res.value > val + cfg.tol("coupling_opt", 1e-9)) ok = false;
      }
    }
    st.report("reverse_duality", "coupling minimum is a lower bound", ok,
              cfg.seed);
  }

  // gaussian_opt: gradient check and Wyner closed form.
  {
    bool ok = true;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < (full ? 30 : 8) && ok; ++t) {
      std::size_t n = 1 + t % 3;
      bl::GaussianProblem p;
      bl::GaussianChannel ch;
      Eigen::MatrixXd a(n, n);
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = gauss(rng);
      ch.A = a;
      ch.b = Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd s(n, n);
      for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = gauss(rng);
      ch.sigma_noise = s * s.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
      p.channels.push_back(ch);
      p.c = {0.8};
      p.c0 = 0.5;
      Eigen::MatrixXd mm(n, n);
      for (Eigen::Index i = 0; i < mm.size(); ++i) mm(i) = gauss(rng);
      p.M = mm * mm.transpose() / double(n);
      Eigen::MatrixXd kb(n, n);
      for (Eigen::Index i = 0; i < kb.size(); ++i) kb(i) = gauss(rng);
      Eigen::MatrixXd k =
          kb * kb.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd g = bl::f0_grad(p, bl::CovMatrix(k));
      const double h = 1e-5;
      double scale = std::max(1.0, g.norm());
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i; j < n; ++j) {
          Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
          e(i, j) = e(j, i) = 1.0;
          double fd = (bl::f0_eval(p, bl::CovMatrix(k + h * e)) -
                       bl::f0_eval(p, bl::CovMatrix(k - h * e))) /
                      (2 * h);
          double an = (i == j) ? g(i, j) : 2 * g(i, j);
          if (std::fabs(fd - an) > cfg.tol("f0_grad", 1e-5) * scale + 1e-7)
            ok = false;
        }
    }
    st.report("gaussian_opt", "f0 gradient matches finite differences", ok,
              cfg.seed);
    Eigen::MatrixXd sig(2, 2);
    sig << 1.0, 0.5, 0.5, 1.0;
    st.report("gaussian_opt", "wyner rho=0.5 closed form",
              std::fabs(bl::wyner_ci(sig).value - 0.5 * std::log(3.0)) <=
                  cfg.tol("wyner", 1e-6),
              cfg.seed);
  }

  std::printf("%s: %d checks, %d failures -> %s\n", level.c_str(), st.checks,
              st.failures, st.failures == 0 ? "PASS" : "FAIL");
  return st.failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brascamp-Lieb-type constants via entropy/functional duality"};
  app.require_subcommand(0, 1);

  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "RNG seed (deterministic reports)");
  app.add_option("--restarts", cfg.restarts, "optimizer restarts");
  app.add_option("--workers", cfg.workers, "parallel workers (0 = cores)");
  app.add_option("--out", cfg.out_path, "also write the report to this file");
  app.add_option("--tol", cfg.tol_overrides, "tolerance override KEY=VAL")
      ->take_all();

  std::string input, level = "quick";
  double d_value = 0.0;
  int samples = 1000;

  CLI::App* c_forward = app.add_subcommand("forward-constant");
  c_forward->add_option("input", input)->required();
  CLI::App* c_verify = app.add_subcommand("verify-forward");
  c_verify->add_option("input", input)->required();
  c_verify->add_option("--d", d_value)->required();
  c_verify->add_option("--samples", samples);
  CLI::App* c_sdpi = app.add_subcommand("sdpi");
  c_sdpi->add_option("input", input)->required();
  CLI::App* c_hc = app.add_subcommand("hypercontractivity");
  c_hc->add_option("input", input)->required();
  CLI::App* c_renyi = app.add_subcommand("renyi-var");
  c_renyi->add_option("input", input)->required();
  CLI::App* c_shearer = app.add_subcommand("shearer");
  c_shearer->add_option("input", input)->required();
  CLI::App* c_lw = app.add_subcommand("loomis-whitney");
  c_lw->add_option("input", input)->required();
  CLI::App* c_rev = app.add_subcommand("reverse-constant");
  c_rev->add_option("input", input)->required();
  CLI::App* c_coup = app.add_subcommand("coupling");
  c_coup->add_option("input", input)->required();
  CLI::App* c_rver = app.add_subcommand("reverse-verify");
  c_rver->add_option("input", input)->required();
  CLI::App* c_gf0 = app.add_subcommand("gaussian-f0");
  c_gf0->add_option("input", input)->required();
  CLI::App* c_gbl = app.add_subcommand("gaussian-bl");
  c_gbl->add_option("input", input)->required();
  CLI::App* c_nelson = app.add_subcommand("nelson");
  c_nelson->add_option("input", input)->required();
  CLI::App* c_wyner = app.add_subcommand("wyner");
  c_wyner->add_option("input", input)->required();
  CLI::App* c_self = app.add_subcommand("selftest");
  c_self->add_option("level", level)->check(CLI::IsMember({"quick", "full"}));

  // Global flags (--seed, --tol, ...) may appear after the subcommand name.
  for (CLI::App* sub :
       app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << app.help() << "\n";
    return 1;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    cfg.parse_tols();
    if (c_forward->parsed()) return run_forward_constant(cfg, input);
    if (c_verify->parsed()) return run_verify_forward(cfg, input, d_value, samples);
    if (c_sdpi->parsed()) return run_sdpi(cfg, input);
    if (c_hc->parsed()) return run_hypercontractivity(cfg, input);
    if (c_renyi->parsed()) return run_renyi_var(cfg, input);
    if (c_shearer->parsed()) return run_shearer(cfg, input);
    if (c_lw->parsed()) return run_loomis_whitney(cfg, input);
    if (c_rev->parsed()) return run_reverse_constant(cfg, input);
    if (c_coup->parsed()) return run_coupling(cfg, input);
    if (c_rver->parsed()) return run_reverse_verify(cfg, input);
    if (c_gf0->parsed()) return run_gaussian_f0(cfg, input);
    if (c_gbl->parsed()) return run_gaussian_bl(cfg, input);
    if (c_nelson->parsed()) return run_nelson(cfg, input);
    if (c_wyner->parsed()) return run_wyner(cfg, input);
    if (c_self->parsed()) return run_selftest(cfg, level);
  } catch (const bl::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const bl::Json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  std::cerr << app.help() << "\n";
  return 1;
}
