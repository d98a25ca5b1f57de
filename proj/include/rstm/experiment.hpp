// Copyright 2026 The rstm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configs (JSON), multi-seed runs, parameter sweeps and CSV
// artifacts. Used by the rstm command-line tool.

#ifndef RSTM_EXPERIMENT_HPP
#define RSTM_EXPERIMENT_HPP

#include <rstm/rstm.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rstm {

using Json = nlohmann::json;

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxInlineDim = 64;

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

inline const Json& need(const Json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline double positive(const Json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + ": must be positive");
  return v;
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

inline std::uint64_t seed_value(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    throw ConfigError(where + ": expected a non-negative integer seed");
  return j.get<std::uint64_t>();
}

inline Eigen::VectorXd vector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where);
  return v;
}

inline std::vector<std::size_t> dims(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of block sizes");
  std::vector<std::size_t> d;
  for (const auto& e : j) {
    const auto v = count(e, where);
    if (v == 0) throw ConfigError(where + ": block sizes must be positive");
    d.push_back(v);
  }
  return d;
}

inline Eigen::MatrixXd matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(where + ": expected an array of rows");
  const std::size_t r = j.size(), c = j[0].size();
  if (r > kMaxInlineDim || c > kMaxInlineDim)
    throw ConfigError(where + ": inline matrices are limited to 64x64; use a generator");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) throw ConfigError(where + ": rows have different lengths");
    for (std::size_t k = 0; k < c; ++k) m(Eigen::Index(i), Eigen::Index(k)) = number(j[i][k], where);
  }
  return m;
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

inline Eigen::MatrixXd gaussian(Rng& r, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, c) = r.normal();
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// problems

/// Returns the canonical form of a problem description (defaults filled in).
inline Json canonical_problem(const Json& j) {
  const std::string w = "problem";
  if (!j.is_object()) throw ConfigError(w + ": expected an object");
  const auto& t = detail::need(j, w, "type");
  if (!t.is_string()) throw ConfigError(w + ".type: expected a string");
  const std::string type = t.get<std::string>();
  Json out = {{"type", type}};
  const bool gen = j.contains("generator");
  if (type == "tridiagonal_quadratic") {
    detail::only_keys(j, w, {"type", "dim", "L", "dims"});
    const auto d = detail::count(detail::need(j, w, "dim"), w + ".dim");
    if (d == 0) throw ConfigError(w + ".dim: must be positive");
    out["dim"] = d;
    out["L"] = j.contains("L") ? detail::positive(j["L"], w + ".L") : 1.0;
    out["dims"] = j.contains("dims") ? Json(detail::dims(j["dims"], w + ".dims")) : Json(std::vector<std::size_t>(d, 1));
    return out;
  }
  if (type != "separable_quadratic" && type != "coupled_quadratic" && type != "simplex_quadratic")
    throw ConfigError(w + ".type: unknown problem '" + type + "'");
  if (gen) {
    detail::only_keys(j, w, {"type", "generator"});
    const auto& g = j["generator"];
    const std::string gw = w + ".generator";
    Json go;
    if (type == "separable_quadratic") {
      detail::only_keys(g, gw, {"seed", "blocks", "block_dim", "L_min", "L_max", "box"});
      go["L_min"] = g.contains("L_min") ? detail::positive(g["L_min"], gw + ".L_min") : 1.0;
      go["L_max"] = g.contains("L_max") ? detail::positive(g["L_max"], gw + ".L_max") : 1.0;
      if (go["L_min"].get<double>() > go["L_max"].get<double>()) throw ConfigError(gw + ": L_min > L_max");
      if (g.contains("box")) {
        const auto b = detail::vector(g["box"], gw + ".box");
        if (b.size() != 2 || !(b[0] <= b[1])) throw ConfigError(gw + ".box: expected [lo, hi] with lo <= hi");
        go["box"] = detail::to_json(b);
      }
    } else if (type == "coupled_quadratic") {
      detail::only_keys(g, gw, {"seed", "blocks", "block_dim", "lambda_min", "lambda_max"});
      go["lambda_min"] = g.contains("lambda_min") ? detail::positive(g["lambda_min"], gw + ".lambda_min") : 1e-3;
      go["lambda_max"] = g.contains("lambda_max") ? detail::positive(g["lambda_max"], gw + ".lambda_max") : 1.0;
      if (go["lambda_min"].get<double>() > go["lambda_max"].get<double>())
        throw ConfigError(gw + ": lambda_min > lambda_max");
    } else {
      detail::only_keys(g, gw, {"seed", "blocks", "block_dim", "rows"});
      go["rows"] = g.contains("rows") ? detail::count(g["rows"], gw + ".rows") : 0;
    }
    go["seed"] = g.contains("seed") ? detail::seed_value(g["seed"], gw + ".seed") : 0;
    go["blocks"] = detail::count(detail::need(g, gw, "blocks"), gw + ".blocks");
    go["block_dim"] = g.contains("block_dim") ? detail::count(g["block_dim"], gw + ".block_dim") : 1;
    if (go["blocks"].get<std::size_t>() == 0 || go["block_dim"].get<std::size_t>() == 0)
      throw ConfigError(gw + ": blocks and block_dim must be positive");
    out["generator"] = go;
    return out;
  }
  if (type == "separable_quadratic") {
    detail::only_keys(j, w, {"type", "L", "dims", "centre", "box"});
    const auto L = detail::vector(detail::need(j, w, "L"), w + ".L");
    const auto d = j.contains("dims") ? detail::dims(j["dims"], w + ".dims")
                                      : std::vector<std::size_t>(static_cast<std::size_t>(L.size()), 1);
    out["L"] = detail::to_json(L);
    out["dims"] = d;
    out["centre"] = detail::to_json(detail::vector(detail::need(j, w, "centre"), w + ".centre"));
    if (j.contains("box")) {
      detail::only_keys(j["box"], w + ".box", {"lo", "hi"});
      out["box"] = {{"lo", detail::to_json(detail::vector(detail::need(j["box"], w + ".box", "lo"), w + ".box.lo"))},
                    {"hi", detail::to_json(detail::vector(detail::need(j["box"], w + ".box", "hi"), w + ".box.hi"))}};
    }
  } else if (type == "coupled_quadratic") {
    detail::only_keys(j, w, {"type", "A", "b", "dims"});
    const auto A = detail::matrix(detail::need(j, w, "A"), w + ".A");
    out["A"] = detail::to_json(A);
    out["b"] = detail::to_json(detail::vector(detail::need(j, w, "b"), w + ".b"));
    out["dims"] = j.contains("dims") ? Json(detail::dims(j["dims"], w + ".dims"))
                                     : Json(std::vector<std::size_t>(static_cast<std::size_t>(A.rows()), 1));
  } else {
    detail::only_keys(j, w, {"type", "M", "b", "dims"});
    out["M"] = detail::to_json(detail::matrix(detail::need(j, w, "M"), w + ".M"));
    out["b"] = detail::to_json(detail::vector(detail::need(j, w, "b"), w + ".b"));
    out["dims"] = detail::dims(detail::need(j, w, "dims"), w + ".dims");
  }
  return out;
}

/// Rotated quadratic with eigenvalues geometric in [lambda_min, lambda_max]
/// and x_* having unit weight on every eigenvector: residuals decay like L/k^2
/// for a wide range of k.
inline std::shared_ptr<CoupledQuadratic> make_spectral_quadratic(std::uint64_t seed, std::vector<std::size_t> dims,
                                                                 double lambda_min, double lambda_max) {
  const auto d = static_cast<Eigen::Index>(detail::offsets_of(dims).back());
  Rng r(seed);
  const Eigen::MatrixXd G = detail::gaussian(r, d, d);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd lam(d);
  for (Eigen::Index j = 0; j < d; ++j)
    lam[j] = d == 1 ? lambda_max : lambda_max * std::pow(lambda_min / lambda_max, double(j) / double(d - 1));
  Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose()).eval();
  const Eigen::VectorXd xs = Q * Eigen::VectorXd::Ones(d);
  Eigen::VectorXd b = A * xs;
  return make_coupled_quadratic(std::move(A), std::move(b), std::move(dims));
}

/// Builds a problem from its canonical description.
inline ProblemPtr build_problem(const Json& canonical) {
  const std::string type = canonical.at("type").get<std::string>();
  const std::string w = "problem";
  try {
    if (type == "tridiagonal_quadratic")
      return make_tridiagonal_quadratic(canonical["dim"].get<std::size_t>(), canonical["L"].get<double>(),
                                        canonical["dims"].get<std::vector<std::size_t>>());
    if (canonical.contains("generator")) {
      const auto& g = canonical["generator"];
      const auto n = g["blocks"].get<std::size_t>();
      const auto bd = g["block_dim"].get<std::size_t>();
      const auto p = static_cast<Eigen::Index>(n * bd);
      std::vector<std::size_t> dims(n, bd);
      Rng r(g["seed"].get<std::uint64_t>());
      if (type == "separable_quadratic") {
        const double lo = g["L_min"].get<double>(), hi = g["L_max"].get<double>();
        std::vector<double> L;
        for (std::size_t i = 0; i < n; ++i) L.push_back(lo * std::pow(hi / lo, r.uniform()));
        Eigen::VectorXd c(p);
        for (Eigen::Index j = 0; j < p; ++j) c[j] = r.normal();
        std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box;
        if (g.contains("box"))
          box.emplace(Eigen::VectorXd::Constant(p, g["box"][0].get<double>()),
                      Eigen::VectorXd::Constant(p, g["box"][1].get<double>()));
        return make_separable_quadratic(std::move(L), std::move(dims), std::move(c), std::move(box));
      }
      if (type == "coupled_quadratic")
        return make_spectral_quadratic(g["seed"].get<std::uint64_t>(), std::move(dims), g["lambda_min"].get<double>(),
                                       g["lambda_max"].get<double>());
      auto rows = static_cast<Eigen::Index>(g["rows"].get<std::size_t>());
      if (rows == 0) rows = p;
      Eigen::MatrixXd M = detail::gaussian(r, rows, p);
      Eigen::VectorXd b = detail::gaussian(r, rows, 1).col(0);
      return make_simplex_quadratic(std::move(M), std::move(b), std::move(dims));
    }
    if (type == "separable_quadratic") {
      const auto L = detail::vector(canonical["L"], w);
      auto dims = canonical["dims"].get<std::vector<std::size_t>>();
      std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box;
      if (canonical.contains("box"))
        box.emplace(detail::vector(canonical["box"]["lo"], w), detail::vector(canonical["box"]["hi"], w));
      return make_separable_quadratic(std::vector<double>(L.data(), L.data() + L.size()), std::move(dims),
                                      detail::vector(canonical["centre"], w), std::move(box));
    }
    if (type == "coupled_quadratic")
      return make_coupled_quadratic(detail::matrix(canonical["A"], w), detail::vector(canonical["b"], w),
                                    canonical["dims"].get<std::vector<std::size_t>>());
    return make_simplex_quadratic(detail::matrix(canonical["M"], w), detail::vector(canonical["b"], w),
                                  canonical["dims"].get<std::vector<std::size_t>>());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// experiment config

struct ExperimentConfig {
  Json problem;  // canonical
  RunConfig run;
  std::vector<std::uint64_t> seeds;
  std::string output = "rstm_out";
};

inline ExperimentConfig parse_config(const Json& j) {
  detail::only_keys(j, "config", {"problem", "oracle", "rho", "regime", "P0", "stop", "u0", "seeds", "output"});
  ExperimentConfig c;
  c.problem = canonical_problem(detail::need(j, "config", "problem"));

  const auto& o = detail::need(j, "config", "oracle");
  detail::only_keys(o, "oracle", {"variant", "noise", "tau"});
  const auto& v = detail::need(o, "oracle", "variant");
  const auto variant = v.is_string() ? variant_from_string(v.get<std::string>()) : std::nullopt;
  if (!variant) throw ConfigError("oracle.variant: unknown variant");
  c.run.oracle.variant = *variant;
  if (o.contains("noise")) {
    const auto& n = o["noise"];
    detail::only_keys(n, "oracle.noise", {"model", "level"});
    const std::string m = n.contains("model") && n["model"].is_string() ? n["model"].get<std::string>() : "none";
    if (m == "none")
      c.run.oracle.noise.kind = NoiseKind::none;
    else if (m == "adversarial")
      c.run.oracle.noise.kind = NoiseKind::adversarial;
    else if (m == "uniform")
      c.run.oracle.noise.kind = NoiseKind::uniform;
    else
      throw ConfigError("oracle.noise.model: expected none, adversarial or uniform");
    c.run.oracle.noise.level = n.contains("level") ? detail::number(n["level"], "oracle.noise.level") : 0.0;
    if (!(c.run.oracle.noise.level >= 0.0)) throw ConfigError("oracle.noise.level: must be >= 0");
  }
  if (o.contains("tau")) {
    const auto& t = o["tau"];
    detail::only_keys(t, "oracle.tau", {"policy", "value"});
    const std::string p = t.contains("policy") && t["policy"].is_string() ? t["policy"].get<std::string>() : "";
    if (p == "balanced") {
      c.run.oracle.tau_policy = TauPolicy::balanced;
      if (t.contains("value")) throw ConfigError("oracle.tau: balanced policy takes no value");
    } else if (p == "fixed") {
      c.run.oracle.tau_policy = TauPolicy::fixed;
      c.run.oracle.tau = detail::positive(detail::need(t, "oracle.tau", "value"), "oracle.tau.value");
    } else {
      throw ConfigError("oracle.tau.policy: expected balanced or fixed");
    }
  }

  if (j.contains("rho")) {
    const double r = detail::number(j["rho"], "rho");
    if (!(r >= 1.0)) throw ConfigError("rho: must be >= 1");
    c.run.rho = r;
  }
  if (j.contains("regime")) {
    const std::string r = j["regime"].is_string() ? j["regime"].get<std::string>() : "";
    if (r == "controlled")
      c.run.regime = Regime::controlled;
    else if (r == "uncontrolled")
      c.run.regime = Regime::uncontrolled;
    else
      throw ConfigError("regime: expected controlled or uncontrolled");
  }
  if (j.contains("P0")) c.run.P0 = detail::positive(j["P0"], "P0");
  const auto& s = detail::need(j, "config", "stop");
  detail::only_keys(s, "stop", {"iterations", "epsilon"});
  if (s.contains("iterations") == s.contains("epsilon")) throw ConfigError("stop: give exactly one of iterations, epsilon");
  c.run.stop = s.contains("iterations") ? StopRule::fixed(detail::count(s["iterations"], "stop.iterations"))
                                        : StopRule::accuracy(detail::positive(s["epsilon"], "stop.epsilon"));
  if (j.contains("u0")) c.run.u0 = detail::vector(j["u0"], "u0");
  const auto& seeds = detail::need(j, "config", "seeds");
  if (!seeds.is_array() || seeds.empty()) throw ConfigError("seeds: expected a non-empty array");
  std::set<std::uint64_t> seen;
  for (const auto& e : seeds) {
    const auto sd = detail::seed_value(e, "seeds");
    if (!seen.insert(sd).second) throw ConfigError("seeds: duplicate seed " + std::to_string(sd));
    c.seeds.push_back(sd);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string() || j["output"].get<std::string>().empty())
      throw ConfigError("output: expected a non-empty string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["problem"] = c.problem;
  const auto& o = c.run.oracle;
  Json oj = {{"variant", to_string(o.variant)},
             {"noise", {{"model", to_string(o.noise.kind)}, {"level", o.noise.level}}}};
  oj["tau"] = o.tau_policy == TauPolicy::balanced ? Json{{"policy", "balanced"}}
                                                  : Json{{"policy", "fixed"}, {"value", o.tau}};
  j["oracle"] = oj;
  if (c.run.rho) j["rho"] = *c.run.rho;
  j["regime"] = to_string(c.run.regime);
  if (c.run.P0) j["P0"] = *c.run.P0;
  j["stop"] = c.run.stop.kind == StopRule::Kind::fixed_iters ? Json{{"iterations", c.run.stop.iterations}}
                                                             : Json{{"epsilon", c.run.stop.epsilon}};
  if (c.run.u0.size()) j["u0"] = detail::to_json(c.run.u0);
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  return j;
}

/// Sorted keys, two-space indent, shortest round-trip numbers, trailing newline.
inline std::string canonical_text(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace detail

inline constexpr const char* kTraceHeader = "k,A,alpha,f,residual,delta,support,wall_ns";
inline constexpr const char* kSummaryHeader = "k,A,mean_residual,bound,bound_ratio,delta";

inline void write_trace(const Trace& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const auto& r : t.records)
    out << r.k << ',' << detail::fmt(r.A) << ',' << detail::fmt(r.alpha) << ',' << detail::fmt(r.f) << ','
        << detail::fmt(r.residual) << ',' << detail::fmt(r.delta) << ',' << r.support << ',' << r.wall_ns << '\n';
}

struct SummaryRow {
  std::size_t k = 0;
  double A = 0.0;
  double mean_residual = 0.0;
  double bound = 0.0;
  double bound_ratio = 0.0;
  double delta = 0.0;
};

/// Mean residual over seeds against the matching theoretical bound.
inline std::vector<SummaryRow> summarize(const std::vector<Trace>& traces, Regime regime) {
  if (traces.empty()) return {};
  std::vector<SummaryRow> rows;
  const auto& first = traces.front();
  for (std::size_t k = 0; k < first.records.size(); ++k) {
    SummaryRow s;
    const auto& r0 = first.records[k];
    s.k = r0.k;
    s.A = r0.A;
    double sum = 0.0, dsum = 0.0;
    for (const auto& t : traces) {
      sum += t.records[k].residual;
      dsum += t.records[k].delta;
    }
    s.mean_residual = sum / double(traces.size());
    s.delta = dsum / double(traces.size());
    // the delta of the steps taken so far; k = 0 has no oracle call yet
    const double delta = k == 0 && first.records.size() > 1 ? first.records[1].delta : s.delta;
    s.bound = theoretical_bound(s.A, first.P0, first.rho, delta, regime);
    s.bound_ratio = std::isfinite(s.bound) && s.bound > 0.0 ? s.mean_residual / s.bound : 0.0;
    rows.push_back(s);
  }
  return rows;
}

inline void write_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kSummaryHeader << '\n';
  for (const auto& s : rows)
    out << s.k << ',' << detail::fmt(s.A) << ',' << detail::fmt(s.mean_residual) << ',' << detail::fmt(s.bound) << ','
        << detail::fmt(s.bound_ratio) << ',' << detail::fmt(s.delta) << '\n';
}

inline std::vector<SummaryRow> read_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader)
    throw ConfigError(path.string() + ": not a summary file (header mismatch)");
  std::vector<SummaryRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 6) throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected 6 fields");
    SummaryRow s;
    const double k = detail::parse_double(f[0]);
    if (!(k >= 0.0) || k != std::floor(k)) throw ConfigError(path.string() + ":" + std::to_string(n) + ": bad k");
    s.k = static_cast<std::size_t>(k);
    s.A = detail::parse_double(f[1]);
    s.mean_residual = detail::parse_double(f[2]);
    s.bound = detail::parse_double(f[3]);
    s.bound_ratio = detail::parse_double(f[4]);
    s.delta = detail::parse_double(f[5]);
    rows.push_back(s);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// runs

struct RunOptions {
  std::filesystem::path out_dir;  // empty: the config's output
  std::size_t workers = 1;
  std::uint64_t seed_offset = 0;
};

struct ExperimentResult {
  std::vector<Trace> traces;
  std::vector<SummaryRow> summary;
  std::filesystem::path out_dir;
};

inline std::string trace_file_name(std::uint64_t seed) { return "trace_seed_" + std::to_string(seed) + ".csv"; }

/// Fails fast on configs that cannot run (oracle/prox pairing, u0, P0).
inline void validate(const ExperimentConfig& c, const ProblemPtr& problem) {
  try {
    Oracle oracle(problem, c.run.oracle);
    if (c.run.u0.size()) {
      if (static_cast<std::size_t>(c.run.u0.size()) != problem->total_dim())
        throw ConfigError("u0: has dimension " + std::to_string(c.run.u0.size()) + ", problem has " +
                          std::to_string(problem->total_dim()));
      if (auto why = oracle.setup().violation(BlockPoint(oracle.structure(), c.run.u0), true); !why.empty())
        throw ConfigError("u0: " + why);
    }
    if (is_derivative_free(c.run.oracle.variant) && c.run.regime == Regime::uncontrolled)
      oracle.taus(oracle.level());
    RunConfig probe = c.run;
    probe.stop = StopRule::fixed(0);
    solve(problem, probe);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

inline ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& opts) {
  const ProblemPtr problem = build_problem(c.problem);
  validate(c, problem);
  ExperimentResult res;
  res.out_dir = opts.out_dir.empty() ? std::filesystem::path(c.output) : opts.out_dir;
  std::filesystem::create_directories(res.out_dir);

  std::vector<std::uint64_t> seeds;
  for (auto s : c.seeds) seeds.push_back(s + opts.seed_offset);
  res.traces.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        RunConfig rc = c.run;
        rc.oracle.seed = seeds[i];
        res.traces[i] = solve(problem, rc);
        write_trace(res.traces[i], res.out_dir / trace_file_name(seeds[i]));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const std::size_t w = std::clamp<std::size_t>(opts.workers, 1, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);

  res.summary = summarize(res.traces, c.run.regime);
  write_summary(res.summary, res.out_dir / "summary.csv");
  return res;
}

// ---------------------------------------------------------------------------
// sweeps

inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p{"delta", "n", "rho", "tau", "epsilon"};
  return p;
}

/// The config with one parameter set to `value`.
///
/// delta sets the noise level whose bias bound equals delta (adversarial noise
/// if none was configured); n sets the generator block count (or the
/// tridiagonal dimension with scalar blocks).
inline ExperimentConfig with_parameter(ExperimentConfig c, const std::string& param, double value) {
  if (param == "delta") {
    if (!(value >= 0.0)) throw ConfigError("delta values must be >= 0");
    if (c.run.oracle.noise.kind == NoiseKind::none) c.run.oracle.noise.kind = NoiseKind::adversarial;
    const ProblemPtr p = build_problem(c.problem);
    const Oracle o(p, c.run.oracle);
    c.run.oracle.noise.level = o.level_for_delta(value);
    c.run.regime = Regime::uncontrolled;
  } else if (param == "n") {
    if (!(value >= 1.0) || value != std::floor(value)) throw ConfigError("n values must be positive integers");
    const auto n = static_cast<std::size_t>(value);
    if (c.problem.contains("generator"))
      c.problem["generator"]["blocks"] = n;
    else if (c.problem["type"] == "tridiagonal_quadratic") {
      c.problem["dim"] = n;
      c.problem["dims"] = std::vector<std::size_t>(n, 1);
    } else
      throw ConfigError("sweeping n needs a generated or tridiagonal problem");
    c.run.u0.resize(0);
  } else if (param == "rho") {
    if (!(value >= 1.0)) throw ConfigError("rho values must be >= 1");
    c.run.rho = value;
  } else if (param == "tau") {
    if (!(value > 0.0)) throw ConfigError("tau values must be positive");
    c.run.oracle.tau_policy = TauPolicy::fixed;
    c.run.oracle.tau = value;
  } else if (param == "epsilon") {
    if (!(value > 0.0)) throw ConfigError("epsilon values must be positive");
    c.run.stop = StopRule::accuracy(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + param + "'");
  }
  return c;
}

inline constexpr const char* kSweepHeader = "param,value,iterations,final_A,final_mean_residual,floor,final_bound,floor_term,k_to_epsilon";

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::size_t iterations = 0;
  double final_A = 0.0;
  double final_mean_residual = 0.0;
  double floor = 0.0;       // mean residual over the last tenth of the run
  double final_bound = 0.0;
  double floor_term = 0.0;  // 4 A_K rho^2 delta^2
  double k_to_epsilon = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& param,
                                       const std::vector<double>& values, const RunOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const std::filesystem::path root = opts.out_dir.empty() ? std::filesystem::path(base.output) : opts.out_dir;
  std::vector<SweepRow> rows;
  for (double v : values) {
    const ExperimentConfig c = with_parameter(base, param, v);
    RunOptions o = opts;
    o.out_dir = root / (param + "_" + detail::fmt(v));
    const auto res = run_experiment(c, o);
    SweepRow r;
    r.param = param;
    r.value = v;
    const auto& s = res.summary;
    r.iterations = s.empty() ? 0 : s.back().k;
    r.final_A = s.back().A;
    r.final_mean_residual = s.back().mean_residual;
    const std::size_t from = s.size() - std::max<std::size_t>(1, s.size() / 10);
    double acc = 0.0;
    for (std::size_t k = from; k < s.size(); ++k) acc += s[k].mean_residual;
    r.floor = acc / double(s.size() - from);
    r.final_bound = s.back().bound;
    const double rho = res.traces.front().rho;
    r.floor_term = 4.0 * s.back().A * rho * rho * s.back().delta * s.back().delta;
    if (c.run.stop.kind == StopRule::Kind::target_accuracy)
      for (const auto& row : s)
        if (row.mean_residual <= c.run.stop.epsilon) {
          r.k_to_epsilon = double(row.k);
          break;
        }
    rows.push_back(r);
  }
  std::ofstream out(root / "sweep.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sweep.csv");
  out << kSweepHeader << '\n';
  for (const auto& r : rows)
    out << r.param << ',' << detail::fmt(r.value) << ',' << r.iterations << ',' << detail::fmt(r.final_A) << ','
        << detail::fmt(r.final_mean_residual) << ',' << detail::fmt(r.floor) << ',' << detail::fmt(r.final_bound) << ','
        << detail::fmt(r.floor_term) << ',' << detail::fmt(r.k_to_epsilon) << '\n';
  return rows;
}

// ---------------------------------------------------------------------------
// reports

inline constexpr const char* kReportHeader = "series,k,value";

/// Long-format merge of summaries: three series per input file.
inline std::string report(const std::vector<std::filesystem::path>& summaries) {
  if (summaries.empty()) throw ConfigError("report needs at least one summary file");
  std::ostringstream out;
  out << kReportHeader << '\n';
  for (const auto& path : summaries) {
    const auto rows = read_summary(path);
    const std::string label = path.generic_string();
    if (label.find(',') != std::string::npos) throw ConfigError(label + ": commas are not allowed in file names");
    for (const char* series : {"mean_residual", "bound", "bound_ratio"})
      for (const auto& r : rows) {
        const double v = std::string(series) == "mean_residual" ? r.mean_residual
                         : std::string(series) == "bound"       ? r.bound
                                                                : r.bound_ratio;
        out << label << ':' << series << ',' << r.k << ',' << detail::fmt(v) << '\n';
      }
  }
  return out.str();
}

}  // namespace rstm

#endif  // RSTM_EXPERIMENT_HPP
