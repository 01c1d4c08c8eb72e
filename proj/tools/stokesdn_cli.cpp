// stokesdn: reproducible experiments driven by INI-style config files.
//
//   stokesdn <symbols|factorize|verify|equivalence|oracle|recover> --config FILE
//            [--out DIR] [--seed N] [--K N]
//
// Writes DIR/<command>/report.json, tables/*.csv and, for oracle, plotdata/*.dat.
//
// Exit status: 0 all assertions pass, 1 an assertion failed, 2 configuration error.

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "stokesdn/catalog.hpp"
#include "stokesdn/dn_oracle.hpp"
#include "stokesdn/manufactured.hpp"
#include "stokesdn/recovery.hpp"
#include "stokesdn/verification.hpp"
#include "stokesdn/version.hpp"

using namespace stokesdn;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- configuration ----------------------------------------------------------

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"problem", {"n", "metric", "kappa", "eps", "viscosity", "mu_value", "mu_amp", "mu_rate", "rho"}},
    {"run", {"seed", "K", "samples", "lambdas"}},
    {"oracle", {"depth", "ladder", "direction", "K_list", "mesh_scale", "max_condition"}},
    {"recover", {"points", "frequencies"}},
    {"tolerances",
     {"degree2", "unitarity", "sylvester", "factorization", "homogeneity", "structure", "ratio_lo", "ratio_hi",
      "divergence", "equivalence_C", "divergence_identity", "p_K2", "p_K3", "recovery"}},
    {"output", {"dir"}},
};

const std::map<std::string, double> kDefaultTolerances{
    {"degree2", 1e-10},   {"unitarity", 1e-12},   {"sylvester", 1e-10},          {"factorization", 1e-9},
    {"homogeneity", 1e-10}, {"structure", 1e-14}, {"ratio_lo", 3.5},             {"ratio_hi", 4.5},
    {"divergence", 1e-9}, {"equivalence_C", 10.0}, {"divergence_identity", 1e-11}, {"p_K2", 0.9},
    {"p_K3", 1.8},        {"recovery", 1e-8},
};

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      size_t used = 0;
      const std::string tok = item.substr(b, e - b + 1);
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "': not a number list: " + s);
    }
  }
  return out;
}

// "a,b; c,d" -> {{a,b},{c,d}}
std::vector<std::vector<double>> parse_vectors(const std::string& s, const std::string& key) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto v = parse_list(item, key);
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

struct RunConfig {
  std::string text;  // raw bytes, hashed into every report
  pt::ptree tree;

  int n = 2;
  std::string metric = "flat", viscosity = "constant";
  catalog::MetricParams mp;
  catalog::ViscosityParams vp;
  double rho = 1.0;

  std::uint64_t seed = 1;
  int K = 2;
  int samples = 20;
  std::vector<double> lambdas{2.0, 5.0, 10.0};

  double depth = 1.0;
  std::vector<double> ladder{8, 16, 32, 64};
  std::vector<double> direction;
  std::vector<int> K_list{1, 2, 3};
  double mesh_scale = 1.0, max_condition = 1e12;

  std::vector<std::vector<double>> points, frequencies;
  std::map<std::string, double> tol = kDefaultTolerances;
  std::string out_dir = "out";

  ProblemData problem() const {
    return ProblemData{catalog::metric(metric, n, mp), catalog::viscosity(viscosity, n, vp), rho};
  }
};

template <class T>
T get(const pt::ptree& t, const std::string& path, T fallback) {
  try {
    return t.get<T>(path, fallback);
  } catch (const pt::ptree_error&) {
    throw ConfigError("'" + path + "': bad value '" + t.get<std::string>(path, "") + "'");
  }
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  RunConfig c;
  c.text.assign(std::istreambuf_iterator<char>(in), {});
  std::istringstream is(c.text);
  try {
    pt::ini_parser::read_ini(is, c.tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [sec, body] : c.tree) {
    auto it = kKnownKeys.find(sec);
    if (it == kKnownKeys.end()) throw ConfigError("unknown section [" + sec + "]");
    for (const auto& [key, v] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + sec + "." + key + "'");
  }
  const pt::ptree& t = c.tree;
  c.n = get(t, "problem.n", 2);
  if (c.n != 2 && c.n != 3) throw ConfigError("problem.n must be 2 or 3");
  c.metric = get<std::string>(t, "problem.metric", "flat");
  if (std::find(catalog::metric_names().begin(), catalog::metric_names().end(), c.metric) ==
      catalog::metric_names().end())
    throw ConfigError("unknown metric '" + c.metric + "'");
  c.mp.kappa = parse_list(get<std::string>(t, "problem.kappa", ""), "problem.kappa");
  c.mp.eps = get(t, "problem.eps", c.mp.eps);
  c.viscosity = get<std::string>(t, "problem.viscosity", "constant");
  if (c.viscosity != "constant" && c.viscosity != "sine" && c.viscosity != "exp" && c.viscosity != "mixed")
    throw ConfigError("unknown viscosity '" + c.viscosity + "'");
  c.vp.value = get(t, "problem.mu_value", c.vp.value);
  c.vp.amp = get(t, "problem.mu_amp", c.vp.amp);
  c.vp.rate = get(t, "problem.mu_rate", c.vp.rate);
  if (c.viscosity == "constant" && !(c.vp.value > 0.0)) throw ConfigError("problem.mu_value must be positive");
  c.rho = get(t, "problem.rho", c.rho);
  if (!(c.rho >= 0.0)) throw ConfigError("problem.rho must be nonnegative");

  c.seed = get<std::uint64_t>(t, "run.seed", c.seed);
  c.K = get(t, "run.K", c.K);
  c.samples = get(t, "run.samples", c.samples);
  if (c.samples < 1) throw ConfigError("run.samples must be positive");
  if (t.get_optional<std::string>("run.lambdas")) c.lambdas = parse_list(t.get<std::string>("run.lambdas"), "run.lambdas");
  for (double l : c.lambdas)
    if (!(l > 0.0)) throw ConfigError("run.lambdas must be positive");

  c.depth = get(t, "oracle.depth", c.depth);
  if (t.get_optional<std::string>("oracle.ladder")) c.ladder = parse_list(t.get<std::string>("oracle.ladder"), "oracle.ladder");
  c.direction = parse_list(get<std::string>(t, "oracle.direction", ""), "oracle.direction");
  if (c.direction.empty()) c.direction = c.n == 2 ? std::vector<double>{1.0} : std::vector<double>{0.6, 0.8};
  if (static_cast<int>(c.direction.size()) != c.n - 1) throw ConfigError("oracle.direction needs n-1 components");
  if (!(norm(c.direction) > 0.0)) throw ConfigError("oracle.direction must be nonzero");
  if (t.get_optional<std::string>("oracle.K_list")) {
    c.K_list.clear();
    for (double k : parse_list(t.get<std::string>("oracle.K_list"), "oracle.K_list")) c.K_list.push_back(static_cast<int>(k));
  }
  c.mesh_scale = get(t, "oracle.mesh_scale", c.mesh_scale);
  c.max_condition = get(t, "oracle.max_condition", c.max_condition);

  c.points = parse_vectors(get<std::string>(t, "recover.points", ""), "recover.points");
  c.frequencies = parse_vectors(get<std::string>(t, "recover.frequencies", ""), "recover.frequencies");

  for (auto& [k, v] : c.tol) {
    v = get(t, "tolerances." + k, v);
    if (!(v > 0.0)) throw ConfigError("tolerances." + k + " must be positive");
  }
  c.out_dir = get<std::string>(t, "output.dir", c.out_dir);
  return c;
}

// ---- reporting ---------------------------------------------------------------

struct Report {
  std::string command;
  const RunConfig& cfg;
  json results = json::object();
  json assertions = json::array();
  json info = json::object();
  std::map<std::string, std::string> tables;    // name -> csv text
  std::map<std::string, std::string> plotdata;  // name -> whitespace columns
  bool pass = true;

  Report(std::string cmd, const RunConfig& c) : command(std::move(cmd)), cfg(c) {}

  // value <= tol (or >= tol when lower_bound)
  void check(const std::string& name, double value, double tol, bool lower_bound = false, const std::string& where = "") {
    const bool ok = lower_bound ? value >= tol : value <= tol;
    json a{{"name", name}, {"value", value}, {lower_bound ? "min" : "max", tol}, {"pass", ok}};
    if (!where.empty()) a["where"] = where;
    assertions.push_back(a);
    if (!ok) {
      pass = false;
      std::cerr << "assertion failed: " << name << " = " << value << (lower_bound ? " < " : " > ") << tol
                << (where.empty() ? "" : " at " + where) << "\n";
    }
  }

  void flag(const std::string& name, bool ok, const std::string& where = "") {
    json a{{"name", name}, {"pass", ok}};
    if (!where.empty()) a["where"] = where;
    assertions.push_back(a);
    if (!ok) {
      pass = false;
      std::cerr << "assertion failed: " << name << (where.empty() ? "" : " at " + where) << "\n";
    }
  }

  json problem_json() const {
    return json{{"n", cfg.n},           {"metric", cfg.metric}, {"kappa", cfg.mp.kappa}, {"eps", cfg.mp.eps},
                {"viscosity", cfg.viscosity}, {"mu_value", cfg.vp.value}, {"mu_amp", cfg.vp.amp},
                {"mu_rate", cfg.vp.rate}, {"rho", cfg.rho}};
  }

  void write(const fs::path& dir) const {
    fs::create_directories(dir);
    json j;
    j["tool"] = "stokesdn";
    j["version"] = version;
    j["command"] = command;
    j["config_hash"] = "fnv1a64:" + fnv1a(cfg.text);
    j["seed"] = cfg.seed;
    j["problem"] = problem_json();
    j["results"] = results;
    if (!info.empty()) j["informational"] = info;
    j["assertions"] = assertions;
    j["pass"] = pass;
    std::ofstream(dir / "report.json") << j.dump(2) << "\n";
    if (!tables.empty()) fs::create_directories(dir / "tables");
    for (const auto& [name, text] : tables) std::ofstream(dir / "tables" / (name + ".csv")) << text;
    if (!plotdata.empty()) fs::create_directories(dir / "plotdata");
    for (const auto& [name, text] : plotdata) std::ofstream(dir / "plotdata" / (name + ".dat")) << text;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string vec_str(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

json worst_json(const Worst& w, const std::vector<CotangentSample>& samples) {
  json j{{"value", w.value}, {"sample", w.sample}};
  if (w.sample >= 0) j["at"] = describe(samples[w.sample]);
  return j;
}

std::string where(const Worst& w, const std::vector<CotangentSample>& samples) {
  return w.sample >= 0 ? "sample " + std::to_string(w.sample) + " " + describe(samples[w.sample]) : "";
}

// ---- subcommands --------------------------------------------------------------

void cmd_symbols(Report& r) {
  const RunConfig& c = r.cfg;
  ProblemData d = c.problem();
  auto samples = manufactured::random_samples(c.n, c.samples, c.seed);
  std::ostringstream csv;
  csv << "sample,term,row,col,re,im\n";
  Worst deg2;
  for (size_t i = 0; i < samples.size(); ++i) {
    SymbolContext ctx = make_context(d, samples[i], 3);
    InteriorSymbols sym = interior_symbols(ctx);
    CJetMat q1 = principal_q1(ctx);
    deg2.update(principal_residual(q1, sym.b1, sym.c2), static_cast<int>(i));
    const std::vector<std::pair<const char*, const CJetMat*>> terms{
        {"b1", &sym.b1}, {"b0", &sym.b0}, {"c2", &sym.c2}, {"c1", &sym.c1}, {"c0", &sym.c0}, {"q1", &q1}};
    for (auto [name, M] : terms) {
      Eigen::MatrixXcd v = values(*M);
      for (int a = 0; a < v.rows(); ++a)
        for (int b = 0; b < v.cols(); ++b)
          csv << i << "," << name << "," << a << "," << b << "," << num(v(a, b).real()) << "," << num(v(a, b).imag())
              << "\n";
    }
  }
  r.tables["symbols"] = csv.str();
  r.results["samples"] = c.samples;
  r.results["degree2_residual"] = worst_json(deg2, samples);
  r.check("degree-2 identity", deg2.value, c.tol.at("degree2"), false, where(deg2, samples));
}

void cmd_factorize(Report& r) {
  const RunConfig& c = r.cfg;
  if (c.K < 0) throw ConfigError("run.K must be nonnegative for factorize");
  ProblemData d = c.problem();
  auto samples = manufactured::random_samples(c.n, c.samples, c.seed);
  std::ostringstream csv;
  csv << "sample,degree,sylvester_residual,factorization_residual,norm\n";
  Worst unit, syl, comp;
  for (size_t i = 0; i < samples.size(); ++i) {
    const int si = static_cast<int>(i);
    FactorizationResult f = full_symbol(d, samples[i], c.K);
    unit.update(f.unitarity, si);
    for (const auto& [deg, q] : f.q.terms) {
      const double sres = f.sylvester_residual.count(deg) ? f.sylvester_residual.at(deg) : 0.0;
      const double cres = f.compose_residual.count(deg + 1) ? f.compose_residual.at(deg + 1) : 0.0;
      csv << i << "," << deg << "," << num(sres) << "," << num(cres) << "," << num(values(q).norm()) << "\n";
    }
    for (auto [deg, e] : f.sylvester_residual) syl.update(e, si);
    for (auto [deg, e] : f.compose_residual) comp.update(e, si);
  }
  r.tables["factorize"] = csv.str();
  r.results["K"] = c.K;
  r.results["samples"] = c.samples;
  r.results["unitarity"] = worst_json(unit, samples);
  r.results["sylvester_residual"] = worst_json(syl, samples);
  r.results["factorization_residual"] = worst_json(comp, samples);
  r.check("U U^-1 = I", unit.value, c.tol.at("unitarity"), false, where(unit, samples));
  r.check("Sylvester residual", syl.value, c.tol.at("sylvester"), false, where(syl, samples));
  r.check("factorization residual", comp.value, c.tol.at("factorization"), false, where(comp, samples));
}

void cmd_verify(Report& r) {
  const RunConfig& c = r.cfg;
  ProblemData d = c.problem();
  const int K = std::max(c.K, 0);
  auto samples = manufactured::random_samples(c.n, c.samples, c.seed);
  IdentityStats st = identity_suite(d, samples, K, c.lambdas);
  json res;
  res["K"] = K;
  res["samples"] = st.samples;
  res["degree2"] = worst_json(st.degree2, samples);
  res["unitarity"] = worst_json(st.unitarity, samples);
  res["sylvester"] = worst_json(st.sylvester, samples);
  res["factorization"] = worst_json(st.compose, samples);
  json h = json::object();
  for (const auto& [deg, w] : st.homogeneity) h[std::to_string(deg)] = worst_json(w, samples);
  res["homogeneity"] = h;
  res["b1_square"] = worst_json(st.b1_square, samples);
  res["q1_nilpotent"] = worst_json(st.q1_nilpotent, samples);
  res["b1q1_commute"] = worst_json(st.b1q1_commute, samples);
  res["kronecker_cross"] = worst_json(st.kron_cross, samples);

  r.check("degree-2 identity", st.degree2.value, c.tol.at("degree2"), false, where(st.degree2, samples));
  r.check("U U^-1 = I", st.unitarity.value, c.tol.at("unitarity"), false, where(st.unitarity, samples));
  r.check("Sylvester residual", st.sylvester.value, c.tol.at("sylvester"), false, where(st.sylvester, samples));
  r.check("factorization residual", st.compose.value, c.tol.at("factorization"), false, where(st.compose, samples));
  for (const auto& [deg, w] : st.homogeneity)
    r.check("homogeneity degree " + std::to_string(deg), w.value, c.tol.at("homogeneity"), false, where(w, samples));
  r.check("b1^2 = 0", st.b1_square.value, c.tol.at("structure"), false, where(st.b1_square, samples));
  r.check("(q1 - sI)^2 = 0", st.q1_nilpotent.value, c.tol.at("structure"), false, where(st.q1_nilpotent, samples));
  r.check("b1 q1 = q1 b1", st.b1q1_commute.value, c.tol.at("structure"), false, where(st.b1q1_commute, samples));
  r.check("Kronecker cross-commutation", st.kron_cross.value, c.tol.at("structure"), false,
          where(st.kron_cross, samples));

  if (c.metric == "flat") {
    FlatStats flat = flat_specialization(d, samples);
    double xi_max = 0.0;
    for (const auto& smp : samples) xi_max = std::max(xi_max, norm(smp.xi));
    res["flat_q1_scalar"] = worst_json(flat.q1_scalar, samples);
    r.check("flat: q1 = |xi'| I", flat.q1_scalar.value, c.tol.at("structure") * xi_max, false,
            where(flat.q1_scalar, samples));
    if (c.viscosity == "constant") {
      res["flat_b1"] = worst_json(flat.b1_zero, samples);
      res["flat_c0"] = worst_json(flat.c0_zero, samples);
      r.flag("flat constant viscosity: b1 = 0", flat.b1_zero.value == 0.0, where(flat.b1_zero, samples));
      r.flag("flat constant viscosity: c0 = 0", flat.c0_zero.value == 0.0, where(flat.c0_zero, samples));
    }
  } else {
    // curvature commutation residual under step halving at the sample points
    std::ostringstream csv;
    csv << "sample,function,h,residual\n";
    double lo = 1e300, hi = 0.0;
    for (size_t i = 0; i < samples.size() && i < 5; ++i)
      for (int which = 0; which < 3; ++which) {
        auto f = manufactured::test_function(which, c.n);
        const double r1 = commutation_residual(d.metric, f, samples[i].x, 0.04).norm();
        const double r2 = commutation_residual(d.metric, f, samples[i].x, 0.02).norm();
        csv << i << "," << f.name << ",0.04," << num(r1) << "\n" << i << "," << f.name << ",0.02," << num(r2) << "\n";
        if (r1 < 1e-12) continue;  // exact for this pair
        const double ratio = r1 / r2;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        const std::string at = "sample " + std::to_string(i) + " " + describe(samples[i]) + " f=" + f.name;
        r.check("curvature commutation halving ratio (low)", ratio, c.tol.at("ratio_lo"), true, at);
        r.check("curvature commutation halving ratio (high)", ratio, c.tol.at("ratio_hi"), false, at);
      }
    r.tables["commutation"] = csv.str();
    res["commutation_ratio"] = json{{"min", lo}, {"max", hi}};
  }
  r.results = res;
}

void cmd_equivalence(Report& r) {
  const RunConfig& c = r.cfg;
  ProblemData d = c.problem();
  auto samples = manufactured::random_samples(c.n, c.samples, c.seed);
  std::ostringstream csv;
  csv << "kind,sample,value\n";

  // divergence identity on the configured geometry, generic smooth inputs
  Worst id;
  for (size_t i = 0; i < samples.size(); ++i) {
    DivergenceIdentity di = divergence_identity(d, manufactured::generic_pair(c.n), samples[i].x);
    const double e = std::abs(di.direct - di.formula);
    id.update(e, static_cast<int>(i));
    csv << "divergence_identity," << i << "," << num(e) << "\n";
  }
  r.results["divergence_identity"] = worst_json(id, samples);
  r.check("divergence identity", id.value, c.tol.at("divergence_identity"), false, where(id, samples));

  // layered lift: only for flat metric and a layered viscosity
  if (c.metric == "flat" && catalog::is_layered(c.viscosity)) {
    std::vector<double> k = c.direction;
    double worstC = 0.0, worstDiv = 0.0;
    LayeredPair lp = layered_manufacture(d, k, manufactured::layered_seeds(c.n, 0.3));
    int j = 0;
    for (double y : {0.1, 0.3, 0.45, 0.7, 0.9}) {
      std::vector<double> x(c.n, -0.3);
      x[c.n - 1] = y;
      EquivalenceSample s = equivalence_sample(d, lp.fields, Point{x}, false);
      const double C = s.momentum.norm() / s.l.head(c.n).norm();
      worstC = std::max(worstC, C);
      worstDiv = std::max(worstDiv, std::abs(s.div));
      csv << "layered_C," << j << "," << num(C) << "\nlayered_div," << j << "," << num(std::abs(s.div)) << "\n";
      ++j;
    }
    r.results["layered"] = json{{"C", worstC}, {"div", worstDiv}};
    r.check("layered |div u|", worstDiv, c.tol.at("divergence"));
    r.check("layered momentum/new-system ratio C", worstC, c.tol.at("equivalence_C"));
  } else {
    r.results["layered"] = "skipped (needs flat metric and layered viscosity)";
  }

  // pointwise lift against mu a L_j; exact on flat metrics only, so curved
  // metrics report it without asserting
  Worst gap;
  for (size_t i = 0; i < samples.size(); ++i) {
    EquivalenceSample s = equivalence_sample(d, manufactured::generic_pair(c.n), samples[i].x);
    const double e = (s.momentum - s.scaled_l).norm() / std::max(1.0, s.l.norm());
    gap.update(e, static_cast<int>(i));
    csv << "lift_gap," << i << "," << num(e) << "\n";
  }
  if (c.metric == "flat") {
    r.results["lift_gap"] = worst_json(gap, samples);
    r.check("flat lift: momentum = mu a L", gap.value, 1e-9, false, where(gap, samples));
  } else {
    r.info["curved_lift_gap"] = worst_json(gap, samples);
    r.info["note"] = "on curved metrics the lift differs from mu a L by connection terms of the gradient part";
  }
  r.tables["equivalence"] = csv.str();
}

void cmd_oracle(Report& r, bool K_given) {
  const RunConfig& c = r.cfg;
  if (c.metric != "flat" || !catalog::is_layered(c.viscosity))
    throw ConfigError("oracle needs metric = flat and a layered viscosity (constant or exp)");
  if (c.ladder.size() < 4) throw ConfigError("oracle.ladder needs at least 4 frequencies");
  std::vector<int> Ks = c.K_list;
  if (K_given) {
    Ks.clear();
    for (int k = 1; k <= c.K; ++k) Ks.push_back(k);
  }
  if (Ks.empty() || *std::min_element(Ks.begin(), Ks.end()) < 1) throw ConfigError("K values must be >= 1");
  LayeredProfile p;
  p.n = c.n;
  p.mu = c.problem().mu;
  p.rho = c.rho;
  p.depth = c.depth;
  if (!(p.depth > 0.0)) throw ConfigError("oracle.depth must be positive");
  const double dn = norm(c.direction);
  std::vector<std::vector<double>> ladder;
  for (double kn : c.ladder) {
    std::vector<double> k;
    for (double v : c.direction) k.push_back(v * kn / dn);
    ladder.push_back(k);
  }
  ConvergenceReport rep = convergence_report(p, ladder, Ks, OracleOptions{c.mesh_scale, c.max_condition});

  std::ostringstream csv, dat;
  csv << "k,condition";
  dat << "# k";
  for (int K : Ks) {
    csv << ",residual_K" << K;
    dat << " residual_K" << K;
  }
  csv << "\n";
  dat << "\n";
  for (size_t i = 0; i < rep.knorm.size(); ++i) {
    csv << num(rep.knorm[i]) << "," << num(rep.condition[i]);
    dat << num(rep.knorm[i]);
    for (int K : Ks) {
      csv << "," << num(rep.residual.at(K)[i]);
      dat << " " << num(rep.residual.at(K)[i]);
    }
    csv << "\n";
    dat << "\n";
  }
  csv << "fitted_p,";
  for (int K : Ks) csv << "," << num(rep.order.at(K));
  csv << "\n";
  r.tables["oracle"] = csv.str();
  r.plotdata["oracle"] = dat.str();

  json res;
  res["ladder"] = rep.knorm;
  res["condition"] = rep.condition;
  json per = json::object();
  for (int K : Ks) per[std::to_string(K)] = json{{"residual", rep.residual.at(K)}, {"p", rep.order.at(K)}};
  res["K"] = per;
  res["strip_ok"] = rep.strip_ok;
  r.results = res;

  r.flag("T|k| >= 8 on the ladder", rep.strip_ok);
  if (c.viscosity == "constant") {
    // strip correction only: far below any power law once T|k| >= 8
    for (int K : Ks)
      if (K >= 2) r.check("constant viscosity residual K=" + std::to_string(K), rep.residual.at(K).back(), 1e-9);
  } else {
    if (rep.order.count(2)) r.check("decay order K=2", rep.order.at(2), c.tol.at("p_K2"), true);
    if (rep.order.count(3)) r.check("decay order K=3", rep.order.at(3), c.tol.at("p_K3"), true);
  }
}

void cmd_recover(Report& r) {
  const RunConfig& c = r.cfg;
  if (c.points.empty()) throw ConfigError("recover.points is empty");
  if (c.frequencies.empty()) throw ConfigError("recover.frequencies is empty");
  for (const auto& p : c.points)
    if (static_cast<int>(p.size()) != c.n - 1) throw ConfigError("recover.points need n-1 coordinates each");
  for (const auto& f : c.frequencies)
    if (static_cast<int>(f.size()) != c.n - 1) throw ConfigError("recover.frequencies need n-1 components each");
  RecoveryReport rep = roundtrip_recover(c.problem(), c.points, c.frequencies, c.tol.at("recovery"));
  std::ostringstream csv;
  csv << "x,indeterminate,t,mu,mu_true,mu_rel_err,dmu,dmu_true,dmu_rel_err,spread\n";
  json pts = json::array();
  for (const auto& p : rep.points) {
    csv << vec_str(p.x.x) << "," << p.indeterminate << "," << num(p.t) << "," << num(p.mu) << "," << num(p.mu_true)
        << "," << num(p.mu_rel_err) << "," << num(p.dmu) << "," << num(p.dmu_true) << "," << num(p.dmu_rel_err) << ","
        << num(p.spread) << "\n";
    pts.push_back(json{{"x", p.x.x},
                       {"indeterminate", p.indeterminate},
                       {"t", p.t},
                       {"mu", p.mu},
                       {"mu_true", p.mu_true},
                       {"mu_rel_err", p.mu_rel_err},
                       {"dmu", p.dmu},
                       {"dmu_true", p.dmu_true},
                       {"dmu_rel_err", p.dmu_rel_err}});
  }
  r.tables["recover"] = csv.str();
  r.results = json{{"points", pts}, {"max_mu_rel", rep.max_mu_rel}, {"max_dmu_rel", rep.max_dmu_rel}};
  r.check("recovered mu (relative)", rep.max_mu_rel, c.tol.at("recovery"));
  r.check("recovered d_n mu (relative)", rep.max_dmu_rel, c.tol.at("recovery"));
  if (c.metric == "flat") r.info["note"] = "flat boundary: q1 carries no viscosity, mu taken from ground truth";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol calculus and DN-map experiments for the variable-viscosity Stokes system"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed = 0;
  int K = 0;
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"symbols", "interior symbols b, c and q1 at random samples"},
      {"factorize", "full symbol q1, q0, ... with Sylvester and factorization residuals"},
      {"verify", "identity suite: degree-2 identity, Sylvester, homogeneity, structure"},
      {"equivalence", "lift of the new system against Stokes; divergence identity"},
      {"oracle", "layered-strip DN matrix against the truncated symbol sum"},
      {"recover", "boundary viscosity and normal derivative from forward symbols"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : cmds) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config, "INI config file")->required();
    s->add_option("--out", out, "output directory (overrides output.dir)");
    s->add_option("--seed", seed, "random seed (overrides run.seed)");
    s->add_option("--K", K, "truncation depth (overrides run.K)");
    subs[name] = s;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, s] : subs)
    if (s->parsed()) command = name;
  CLI::App* s = subs.at(command);

  try {
    RunConfig cfg = load_config(config);
    if (s->count("--seed")) cfg.seed = seed;
    const bool K_given = s->count("--K") > 0;
    if (K_given) cfg.K = K;
    if (s->count("--out")) cfg.out_dir = out;

    Report rep(command, cfg);
    if (command == "symbols") cmd_symbols(rep);
    if (command == "factorize") cmd_factorize(rep);
    if (command == "verify") cmd_verify(rep);
    if (command == "equivalence") cmd_equivalence(rep);
    if (command == "oracle") cmd_oracle(rep, K_given);
    if (command == "recover") cmd_recover(rep);
    const fs::path dir = fs::path(cfg.out_dir) / command;
    rep.write(dir);
    std::cout << command << ": " << (rep.pass ? "pass" : "FAIL") << " (" << rep.assertions.size()
              << " assertions), report in " << (dir / "report.json").string() << "\n";
    return rep.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FieldError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // numerical failures (resonant shift, indeterminate recovery, ...) are assertion failures
    std::cerr << "assertion failed: " << e.what() << "\n";
    return 1;
  }
}
