#include "martvar/runner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "martvar/constructions.hpp"
#include "martvar/distribution.hpp"
#include "martvar/maxvar.hpp"
#include "martvar/repeated_game.hpp"
#include "martvar/splitting_tree.hpp"

namespace martvar::runner {

namespace fs = std::filesystem;

namespace {

constexpr char kVersion[] = "0.1.0";

using Clock = std::chrono::steady_clock;

class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST)
        throw ConfigError("results directory is locked by another run: " + path_.string());
      throw std::runtime_error("cannot create lock file " + path_.string());
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd_, pid.data(), pid.size());
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;
  ~DirLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }

 private:
  fs::path path_;
  int fd_ = -1;
};

struct Ctx {
  const RunConfig& cfg;
  fs::path dir;
  RunRecord& rec;
  Clock::time_point start;

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

  void emit(const std::string& name, const std::string& content) {
    const fs::path tmp = dir / ("." + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, dir / name);
    rec.outputs.push_back((dir / name).string());
  }

  void emit_json(const std::string& name, const nlohmann::json& j) { emit(name, j.dump(2) + "\n"); }
};

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

nlohmann::json certs_json(const std::vector<BoundCertificate>& certs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : certs) arr.push_back(c.to_json());
  return arr;
}

int require_int(const nlohmann::json& params, const char* key, long long lo, long long hi) {
  if (!params.contains(key))
    throw ConfigError(std::string("missing required parameter: ") + key);
  long long v;
  try {
    v = params.at(key).get<long long>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("parameter is not an integer: ") + key);
  }
  if (v < lo || v > hi)
    throw ConfigError(std::string("parameter out of range: ") + key + " = " + std::to_string(v));
  return static_cast<int>(v);
}

double opt_double(const nlohmann::json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<double>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("parameter is not a number: ") + key);
  }
}

// ---------------------------------------------------------------- bounds --

void run_bounds(Ctx& ctx) {
  const auto& params = ctx.cfg.params;
  const int k = require_int(params, "k", 0, 1000000);
  Distribution p = [&] {
    if (params.contains("p")) {
      auto probs = params.at("p").get<std::vector<double>>();
      const std::size_t n = probs.size();
      return Distribution(Distribution::uniform(n).labels(), std::move(probs));
    }
    if (params.contains("d")) return Distribution::uniform(
        static_cast<std::size_t>(require_int(params, "d", 1, 1000000)));
    throw ConfigError("bounds: provide either d or p");
  }();
  const std::size_t d = p.size();

  const std::vector<std::pair<std::string, double>> bounds = {
      {"entropy_bound", bound_entropy(k, p)},
      {"logd_bound", bound_logd(k, d)},
      {"classical_bound", bound_classical(k, d)},
      {"trivial_bound", bound_trivial(k)},
      {"per_coordinate_bound", bound_per_coordinate(k, p)},
  };

  std::string csv = "bound,value\n";
  nlohmann::json jb;
  for (const auto& [name, value] : bounds) {
    csv += csv_join({name, format_double(value)});
    jb[name] = value;
  }
  ctx.emit("bounds.csv", csv);
  ctx.rec.summary = {{"k", k}, {"d", d}, {"p", p.probs()}, {"bounds", jb}};
  ctx.emit_json("bounds_summary.json", ctx.rec.summary);
}

// ------------------------------------------------------------- construct --

// max deviation of any edge's L1 step from 1 (doubling trees move exactly
// one unit of L1 mass per stage)
double max_edge_l1_deviation(const SplittingTree& t) {
  double dev = 0.0;
  std::unordered_set<const SplittingTree::Node*> seen;
  std::vector<SplittingTree::NodePtr> stack{t.root()};
  while (!stack.empty()) {
    SplittingTree::NodePtr n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.get()).second) continue;
    const Distribution dist = node_dist(n);
    for (const auto& e : node_edges(n)) {
      dev = std::max(dev, std::abs(l1_distance(node_dist(e.child), dist) - 1.0));
      stack.push_back(e.child);
    }
  }
  return dev;
}

void run_construct(Ctx& ctx) {
  const auto& params = ctx.cfg.params;
  const std::string kind = params.value("kind", "");
  nlohmann::json summary;
  summary["kind"] = kind;

  SplittingTree tree = [&]() -> SplittingTree {
    if (kind == "doubling") {
      const int ell = require_int(params, "ell", 1, 24);
      summary["ell"] = ell;
      return doubling_martingale(ell);
    }
    if (kind == "walk") {
      const int k = require_int(params, "k", 1, 10000);
      const double p0 = opt_double(params, "p0", 0.5);
      const double delta = opt_double(params, "delta", 0.1);
      summary["k"] = k;
      summary["p0"] = p0;
      summary["delta"] = delta;
      return binary_walk(k, p0, delta);
    }
    if (kind == "witness") {
      const int k = require_int(params, "k", 1, 128);
      const int d = require_int(params, "d", 2, 1 << 20);
      summary["k"] = k;
      summary["d"] = d;
      return variation_witness(k, static_cast<std::size_t>(d));
    }
    throw ConfigError("construct: kind must be doubling, walk or witness");
  }();

  if (auto violations = validate(tree); !violations.empty())
    throw SolverError("construct: built tree violates consistency: " + violations.front().message);

  const double var = variation(tree);
  const int depth = tree.depth();
  const std::size_t d = tree.root_dist().size();
  summary["depth"] = depth;
  summary["support"] = d;
  summary["variation"] = var;
  if (depth >= 1 && d >= 2)
    summary["ratio"] = var / std::sqrt(static_cast<double>(depth) * std::log(static_cast<double>(d)));

  std::vector<BoundCertificate> certs = certify(tree);
  if (kind == "doubling") {
    const double ell = params.at("ell").get<double>();
    certs.push_back(BoundCertificate::make("doubling_variation_exact", std::abs(var - ell), 0.0));
    certs.push_back(BoundCertificate::make("doubling_edge_l1_unit", max_edge_l1_deviation(tree), 0.0));
  }
  if (kind == "witness")
    certs.push_back(BoundCertificate::make(
        "witness_floor",
        0.25 * std::sqrt(static_cast<double>(depth) * std::log(static_cast<double>(d))), var));
  ctx.rec.certificates = certs;
  summary["certificates"] = certs_json(certs);

  std::string csv = "name,lhs,rhs,slack,holds\n";
  for (const auto& c : certs)
    csv += csv_join({c.name, format_double(c.lhs), format_double(c.rhs), format_double(c.slack),
                     c.holds ? "true" : "false"});
  ctx.emit("construct_certificates.csv", csv);

  const std::size_t tree_budget = static_cast<std::size_t>(
      params.value("tree_budget", static_cast<long long>(100000)));
  try {
    ctx.emit("construct_tree.json", tree_to_json(tree, tree_budget).dump(2) + "\n");
    summary["tree_omitted"] = false;
  } catch (const SizeError&) {
    summary["tree_omitted"] = true;
  }
  ctx.rec.summary = summary;
  ctx.emit_json("construct_summary.json", summary);
}

// ---------------------------------------------------------------- maxvar --

void run_maxvar(Ctx& ctx) {
  const auto& params = ctx.cfg.params;
  const int k = require_int(params, "k", 0, 2000);
  const double h = opt_double(params, "h", 1e-2);
  ValueTable table = maxvar_binary(k, h);

  std::string csv = "p,value,entropy_bound,classical_bound,slack_entropy,slack_classical\n";
  double excess_entropy = -1e300, excess_classical = -1e300, asym = 0.0;
  const std::size_t n = table.xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = table.xs[i];
    const double v = table.values[i];
    const Distribution dp(LabelSet{"x1", "x2"}, {p, 1.0 - p});
    const double eb = bound_entropy(k, dp);
    const double cb = bound_classical(k, 2);
    csv += csv_join({format_double(p), format_double(v), format_double(eb), format_double(cb),
                     format_double(eb - v), format_double(cb - v)});
    excess_entropy = std::max(excess_entropy, v - eb);
    excess_classical = std::max(excess_classical, v - cb);
    asym = std::max(asym, std::abs(v - table.values[n - 1 - i]));
  }
  ctx.emit("maxvar.csv", csv);

  std::vector<BoundCertificate> certs = {
      BoundCertificate::make("maxvar_below_entropy_bound", excess_entropy, 0.0),
      BoundCertificate::make("maxvar_below_classical_bound", excess_classical, 0.0),
      BoundCertificate::make("maxvar_endpoints_zero",
                             std::abs(table.values.front()) + std::abs(table.values.back()), 0.0),
      BoundCertificate::make("maxvar_symmetric", asym, 0.0),
  };
  ctx.rec.certificates = certs;

  nlohmann::json summary = {{"k", k},
                            {"h", h},
                            {"value_at_half", table.at(0.5)},
                            {"runtime_ms", ctx.elapsed_ms()},
                            {"certificates", certs_json(certs)}};
  if (k >= 1) summary["ratio"] = table.at(0.5) / std::sqrt(static_cast<double>(k));
  ctx.rec.summary = summary;
  ctx.emit_json("maxvar_summary.json", summary);
}

// ------------------------------------------------------------------ game --

IncompleteInfoGame load_game(const nlohmann::json& params) {
  if (params.contains("game_file")) {
    const std::string path = params.at("game_file").get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("game: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return IncompleteInfoGame::from_json(j);
  }
  return example_game();
}

void run_game(Ctx& ctx) {
  const auto& params = ctx.cfg.params;
  const std::string action = params.value("action", "");
  IncompleteInfoGame g = load_game(params);
  nlohmann::json summary;
  summary["action"] = action;
  summary["states"] = g.num_states();
  summary["p1_actions"] = g.num_p1_actions();
  summary["p2_actions"] = g.num_p2_actions();
  summary["norm"] = game_norm(g);

  if (action == "example") {
    ctx.emit_json("example_game.json", example_game().to_json());
  } else if (action == "value") {
    const int k = require_int(params, "k", 1, 10000);
    const std::string method = params.value("method", "exact");
    summary["k"] = k;
    summary["method"] = method;
    bool approximate = false;
    double value = 0.0;
    if (method == "exact") {
      try {
        GameValueResult res = value_exact(g, k, ctx.cfg.budget);
        value = res.value;
        summary["duality_gap"] = res.duality_gap;
        ctx.rec.certificates.push_back(res.certificate);
      } catch (const SizeError& e) {
        // budget exceeded: degrade to the recursion, never silently
        summary["budget_note"] = e.what();
        approximate = true;
        value = value_recursive(g, k).at(g.prior[0]);
      }
    } else if (method == "recursive") {
      ValueTable table = value_recursive(g, k);
      value = table.at(g.prior[0]);
      std::string csv = "p,v_k\n";
      for (std::size_t i = 0; i < table.xs.size(); ++i)
        csv += csv_join({format_double(table.xs[i]), format_double(table.values[i])});
      ctx.emit("game_values.csv", csv);
    } else {
      throw ConfigError("game value: method must be exact or recursive");
    }
    summary["approximate"] = approximate;
    summary["value"] = value;
  } else if (action == "cavu") {
    const double h = opt_double(params, "h", 1e-2);
    CavUResult cu = cav_u_binary(g, h);
    std::string csv = "p,u,cav_u\n";
    double under = 0.0, convexity = 0.0;
    for (std::size_t i = 0; i < cu.u.xs.size(); ++i) {
      csv += csv_join({format_double(cu.u.xs[i]), format_double(cu.u.values[i]),
                       format_double(cu.cav_u.values[i])});
      under = std::max(under, cu.u.values[i] - cu.cav_u.values[i]);
      if (i + 1 < cu.u.xs.size() && i > 0)
        convexity = std::max(convexity, cu.cav_u.values[i - 1] + cu.cav_u.values[i + 1] -
                                            2.0 * cu.cav_u.values[i]);
    }
    ctx.emit("game_cavu.csv", csv);
    ctx.rec.certificates = {BoundCertificate::make("cav_u_dominates_u", under, 0.0),
                            BoundCertificate::make("cav_u_concave", convexity, 0.0)};
    summary["h"] = h;
    summary["cav_u_at_prior"] = cu.cav_u.at(g.prior[0]);
    summary["certificates"] = certs_json(ctx.rec.certificates);
  } else if (action == "certify") {
    const int k = require_int(params, "k", 1, 2000);
    ErrorTermReport rep = certify_error_term(g, k, ctx.cfg.budget);
    ctx.rec.certificates = rep.certificates;
    summary["k"] = k;
    summary["used_exact"] = rep.used_exact;
    summary["value"] = rep.value;
    summary["cav_u_at_prior"] = rep.cav_u_at_prior;
    summary["error_term"] = rep.value - rep.cav_u_at_prior;
    summary["certificates"] = certs_json(rep.certificates);

    // per-belief table with the recursion when the game shape allows it
    try {
      ValueTable vk = value_recursive(g, k);
      ValueTable mv = maxvar_binary(k, 1e-2);
      CavUResult cu = cav_u_binary(g, 1e-2);
      const double bound_logd =
          rep.norm * std::sqrt(2.0 * std::log(2.0) / static_cast<double>(k));
      std::string csv = "p,v_k,cav_u,error_term,bound_variation,bound_logd\n";
      for (std::size_t i = 0; i < vk.xs.size(); ++i) {
        const double p = vk.xs[i];
        const double bound_var =
            rep.norm * (mv.at(p) + 10.0 * 1e-2 * k) / static_cast<double>(k);
        csv += csv_join({format_double(p), format_double(vk.values[i]),
                         format_double(cu.cav_u.at(p)),
                         format_double(vk.values[i] - cu.cav_u.at(p)),
                         format_double(bound_var), format_double(bound_logd)});
      }
      ctx.emit("game_certify.csv", csv);
    } catch (const ConfigError&) {
      summary["table_omitted"] = true;
    }
  } else if (action == "tensor") {
    const int times = require_int(params, "times", 1, 6);
    IncompleteInfoGame total = g;
    for (int i = 1; i < times; ++i) total = tensor_games(total, g);
    ctx.emit_json("tensor_game.json", total.to_json());
    summary["times"] = times;
    summary["tensor_states"] = total.num_states();
    summary["tensor_p1_actions"] = total.num_p1_actions();
    summary["tensor_p2_actions"] = total.num_p2_actions();
    summary["tensor_norm"] = game_norm(total);
  } else {
    throw ConfigError("game: action must be example, value, cavu, certify or tensor");
  }

  ctx.rec.summary = summary;
  ctx.emit_json("game_summary.json", summary);
}

// ------------------------------------------------------------ verify-all --

struct CertRow {
  std::string family;
  std::string instance;
  BoundCertificate cert;
};

void verify_tree_bounds_random(Rng& rng, bool quick, std::vector<CertRow>& rows) {
  const int trees = quick ? 1500 : 10000;
  const char* names[] = {"entropy_bound", "logd_bound", "classical_bound", "trivial_bound",
                         "per_coordinate_bound"};
  double excess[5] = {-1e300, -1e300, -1e300, -1e300, -1e300};
  for (int t = 0; t < trees; ++t) {
    const std::size_t support = 2 + rng.uniform_index(7);
    const int depth = 1 + static_cast<int>(rng.uniform_index(6));
    SplittingTree tree = random_tree(rng, support, depth);
    std::vector<BoundCertificate> certs = certify(tree);
    for (std::size_t b = 0; b < certs.size() && b < 5; ++b)
      excess[b] = std::max(excess[b], -certs[b].slack);
  }
  const std::string inst = "random_trees(n=" + std::to_string(trees) + ")";
  for (int b = 0; b < 5; ++b)
    rows.push_back({"tree_bounds_random", inst,
                    BoundCertificate::make(std::string(names[b]) + "_max_excess", excess[b], 0.0)});
}

void verify_tree_bounds_constructions(bool quick, std::vector<CertRow>& rows) {
  const std::string fam = "tree_bounds_constructions";

  const int max_ell = quick ? 8 : 12;
  for (int ell = 1; ell <= max_ell; ++ell) {
    SplittingTree t = doubling_martingale(ell);
    const std::string inst = "doubling(ell=" + std::to_string(ell) + ")";
    for (auto& c : certify(t)) rows.push_back({fam, inst, c});
    const double var = variation(t);
    rows.push_back({fam, inst,
                    BoundCertificate::make("doubling_variation_exact",
                                           std::abs(var - static_cast<double>(ell)), 0.0)});
    rows.push_back(
        {fam, inst, BoundCertificate::make("doubling_edge_l1_unit", max_edge_l1_deviation(t), 0.0)});
  }

  const std::vector<std::tuple<int, double, double>> walks = {
      {1, 0.5, 0.5}, {4, 0.5, 0.125}, {16, 0.5, 0.25}, {100, 0.5, 0.1}};
  for (const auto& [k, p0, delta] : walks) {
    SplittingTree t = binary_walk(k, p0, delta);
    std::ostringstream name;
    name << "walk(k=" << k << ",p0=" << p0 << ",delta=" << delta << ")";
    for (auto& c : certify(t)) rows.push_back({fam, name.str(), c});
  }

  std::vector<std::pair<int, std::size_t>> pairs = {{8, 4}, {16, 4}, {16, 16}};
  if (!quick) {
    pairs.push_back({32, 16});
    pairs.push_back({64, 64});
  }
  for (const auto& [k, d] : pairs) {
    SplittingTree t = variation_witness(k, d);
    const std::string inst =
        "witness(k=" + std::to_string(k) + ",d=" + std::to_string(d) + ")";
    for (auto& c : certify(t)) rows.push_back({fam, inst, c});
    const double floor =
        0.25 * std::sqrt(static_cast<double>(k) * std::log(static_cast<double>(d)));
    rows.push_back({fam, inst, BoundCertificate::make("witness_floor", floor, variation(t))});
  }
}

void verify_concat_additivity(Rng& rng, bool quick, std::vector<CertRow>& rows) {
  const int pairs = quick ? 200 : 1000;
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    SplittingTree a = random_tree(rng, 2 + rng.uniform_index(3), 1 + static_cast<int>(rng.uniform_index(3)));
    SplittingTree b = random_tree(rng, 2 + rng.uniform_index(3), 1 + static_cast<int>(rng.uniform_index(3)));
    const double joint = variation(concat(a, b));
    worst = std::max(worst, std::abs(joint - variation(a) - variation(b)));
  }
  rows.push_back({"concat_additivity", "random_pairs(n=" + std::to_string(pairs) + ")",
                  BoundCertificate::make("variation_additive_max_error", worst, 0.0)});
}

void verify_pinsker(Rng& rng, bool quick, std::vector<CertRow>& rows) {
  const int n = quick ? 2000 : 10000;
  double worst = -1e300;
  for (int i = 0; i < n; ++i) {
    const std::size_t d = 2 + rng.uniform_index(7);
    const LabelSet labels = Distribution::uniform(d).labels();
    Distribution p(labels, rng.dirichlet(d));
    Distribution q(labels, rng.dirichlet(d));
    KlResult kl = kl_divergence(p, q);
    if (!kl.finite) continue;
    worst = std::max(worst, l1_distance(p, q) - std::sqrt(2.0 * kl.nats));
  }
  rows.push_back({"pinsker", "random_pairs(n=" + std::to_string(n) + ")",
                  BoundCertificate::make("pinsker_max_excess", worst, 0.0)});

  double worst2 = -1e300;
  for (int i = 0; i < n; ++i) {
    const std::size_t m = 2 + rng.uniform_index(15);
    std::vector<double> w = rng.dirichlet(m);
    std::vector<double> z(m);
    for (auto& v : z) v = rng.uniform() < 0.1 ? 0.0 : 4.0 * rng.exponential();
    auto [lhs, rhs] = mean_abs_deviation_entropy_bound(w, z);
    worst2 = std::max(worst2, lhs - rhs);
  }
  rows.push_back({"pinsker", "mean_abs_deviation(n=" + std::to_string(n) + ")",
                  BoundCertificate::make("mean_abs_deviation_max_excess", worst2, 0.0)});
}

void verify_maxvar(bool quick, std::vector<CertRow>& rows) {
  const std::string fam = "maxvar";
  ValueTable t1 = maxvar_binary(1, 1e-2);
  rows.push_back({fam, "k=1,h=1e-2",
                  BoundCertificate::make("value_at_half_is_one", std::abs(t1.at(0.5) - 1.0), 0.0)});
  ValueTable t2 = maxvar_binary(2, 1e-2);
  rows.push_back({fam, "k=2,h=1e-2",
                  BoundCertificate::make("value_at_half_is_1.25", std::abs(t2.at(0.5) - 1.25), 0.0)});
  ValueTable t3 = maxvar_binary(3, 1e-2);
  double mono = 0.0, asym = 0.0;
  for (std::size_t i = 0; i < t2.values.size(); ++i) {
    mono = std::max(mono, t2.values[i] - t3.values[i]);
    asym = std::max(asym, std::abs(t3.values[i] - t3.values[t3.values.size() - 1 - i]));
  }
  rows.push_back({fam, "k=2..3,h=1e-2", BoundCertificate::make("monotone_in_k", mono, 0.0)});
  rows.push_back({fam, "k=3,h=1e-2", BoundCertificate::make("symmetric_about_half", asym, 0.0)});

  MaxvarWitness w = witness_tree(4, 0.3, 1e-2);
  rows.push_back({fam, "witness(k=4,p=0.3,h=1e-2)",
                  BoundCertificate::make("witness_matches_table",
                                         std::abs(variation(w.tree) - w.table_value), 1e-6)});
  if (!quick) {
    const double ratio = maxvar_ratio(400, 1e-3);
    rows.push_back({fam, "k=400,h=1e-3",
                    BoundCertificate::make("ratio_near_limit", std::abs(ratio - 0.797885), 0.03)});
  }
}

void verify_games(Rng& rng, bool quick, std::vector<CertRow>& rows, std::size_t budget) {
  const std::string fam = "games";
  IncompleteInfoGame ex = example_game();

  CavUResult cu = cav_u_binary(ex, 1e-2);
  double umax = 0.0, cavmax = 0.0;
  for (std::size_t i = 0; i < cu.u.values.size(); ++i) {
    umax = std::max(umax, std::abs(cu.u.values[i]));
    cavmax = std::max(cavmax, std::abs(cu.cav_u.values[i]));
  }
  rows.push_back({fam, "example", BoundCertificate::make("u_identically_zero", umax, 0.0)});
  rows.push_back({fam, "example", BoundCertificate::make("cav_u_identically_zero", cavmax, 0.0)});

  const double v1_exact = value_exact(ex, 1, budget).value;
  const double v1_rec = value_recursive(ex, 1).at(0.5);
  rows.push_back(
      {fam, "example k=1",
       BoundCertificate::make("exact_value_half", std::abs(v1_exact - 0.5), 0.0)});
  rows.push_back(
      {fam, "example k=1",
       BoundCertificate::make("recursive_value_half", std::abs(v1_rec - 0.5), 0.0)});

  for (int k : (quick ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3})) {
    ErrorTermReport rep = certify_error_term(ex, k, budget);
    for (auto& c : rep.certificates)
      rows.push_back({fam, "example certify k=" + std::to_string(k), c});
  }

  // cross-agreement of the two solvers on the example and random games
  const int random_games = quick ? 3 : 10;
  const std::vector<int> ks = quick ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3};
  for (int k : ks) {
    const double ve = value_exact(ex, k, budget).value;
    const double vr = value_recursive(ex, k).at(0.5);
    rows.push_back({fam, "cross example k=" + std::to_string(k),
                    BoundCertificate::make("solver_agreement", std::abs(ve - vr), 5e-3)});
  }
  for (int gidx = 0; gidx < random_games; ++gidx) {
    IncompleteInfoGame g;
    g.states = {"0", "1"};
    const double p0 = static_cast<double>(1 + rng.uniform_index(9)) / 10.0;
    g.prior = {p0, 1.0 - p0};
    for (int x = 0; x < 2; ++x) {
      Matrix m(2, std::vector<double>(2));
      for (auto& row : m)
        for (auto& v : row) v = rng.uniform(-3.0, 3.0);
      g.payoffs.push_back(std::move(m));
    }
    for (int k : ks) {
      const double ve = value_exact(g, k, budget).value;
      const double vr = value_recursive(g, k).at(p0);
      rows.push_back({fam, "cross random#" + std::to_string(gidx) + " k=" + std::to_string(k),
                      BoundCertificate::make("solver_agreement", std::abs(ve - vr), 5e-3)});
    }
  }

  const double v2_tensor = value_exact(tensor_games(ex, ex), 2, budget).value;
  rows.push_back({fam, "example tensor square",
                  BoundCertificate::make("tensor_superadditivity", v1_exact, v2_tensor)});

  // matrix solver duality gaps on random matrices
  const int matrices = quick ? 200 : 1000;
  double gap = 0.0;
  for (int i = 0; i < matrices; ++i) {
    const std::size_t m = 1 + rng.uniform_index(8), n = 1 + rng.uniform_index(8);
    Matrix a(m, std::vector<double>(n));
    for (auto& row : a)
      for (auto& v : row) v = rng.uniform(-10.0, 10.0);
    gap = std::max(gap, matrix_value(a).duality_gap);
  }
  rows.push_back({fam, "random_matrices(n=" + std::to_string(matrices) + ")",
                  BoundCertificate::make("matrix_duality_gap", gap, kDualityGapTolerance)});
}

void run_verify_all(Ctx& ctx) {
  if (!ctx.cfg.has_seed) throw ConfigError("verify-all: --seed is required");
  Rng rng(ctx.cfg.seed);
  const bool quick = ctx.cfg.quick;

  std::vector<CertRow> rows;
  verify_tree_bounds_random(rng, quick, rows);
  verify_tree_bounds_constructions(quick, rows);
  verify_concat_additivity(rng, quick, rows);
  verify_pinsker(rng, quick, rows);
  verify_maxvar(quick, rows);
  verify_games(rng, quick, rows, ctx.cfg.budget);

  std::string csv = "family,case,name,lhs,rhs,slack,holds\n";
  nlohmann::json families = nlohmann::json::object();
  for (const auto& r : rows) {
    csv += csv_join({r.family, r.instance, r.cert.name, format_double(r.cert.lhs),
                     format_double(r.cert.rhs), format_double(r.cert.slack),
                     r.cert.holds ? "true" : "false"});
    ctx.rec.certificates.push_back(r.cert);
    auto& f = families[r.family];
    if (f.is_null()) f = nlohmann::json{{"total", 0}, {"failed", 0}};
    f["total"] = f.value("total", 0) + 1;
    if (!r.cert.holds) f["failed"] = f.value("failed", 0) + 1;
  }
  ctx.emit("verify_certificates.csv", csv);

  bool all = true;
  for (const auto& c : ctx.rec.certificates) all = all && c.holds;
  nlohmann::json summary = {{"quick", quick},
                            {"seed", ctx.cfg.seed},
                            {"certificates", rows.size()},
                            {"families", families},
                            {"all_hold", all},
                            {"runtime_ms", ctx.elapsed_ms()}};
  ctx.rec.summary = summary;
  ctx.emit_json("verify_summary.json", summary);
}

}  // namespace

nlohmann::json RunRecord::to_json() const {
  return nlohmann::json{{"config", config},       {"version", version},
                        {"duration_ms", duration_ms}, {"outputs", outputs},
                        {"certificates", certs_json(certificates)}, {"all_hold", all_hold},
                        {"summary", summary}};
}

std::filesystem::path resolve_results_dir(const RunConfig& cfg) {
  if (!cfg.results_dir.empty()) return cfg.results_dir;
  if (const char* env = std::getenv("MARTVAR_RESULTS_DIR"); env && *env) return fs::path(env);
  return fs::path("results");
}

RunRecord run(const RunConfig& cfg) {
  RunRecord rec;
  rec.version = kVersion;
  rec.config = {{"command", cfg.command}, {"params", cfg.params},   {"quick", cfg.quick},
                {"budget", cfg.budget},   {"seed", cfg.seed},       {"has_seed", cfg.has_seed}};

  const fs::path dir = resolve_results_dir(cfg);
  fs::create_directories(dir);
  DirLock lock(dir);

  Ctx ctx{cfg, dir, rec, Clock::now()};
  if (cfg.command == "bounds")
    run_bounds(ctx);
  else if (cfg.command == "construct")
    run_construct(ctx);
  else if (cfg.command == "maxvar")
    run_maxvar(ctx);
  else if (cfg.command == "game")
    run_game(ctx);
  else if (cfg.command == "verify-all")
    run_verify_all(ctx);
  else
    throw ConfigError("unknown command: " + cfg.command);

  rec.all_hold = true;
  for (const auto& c : rec.certificates) rec.all_hold = rec.all_hold && c.holds;
  rec.duration_ms = ctx.elapsed_ms();

  std::ofstream index(dir / "runs.ndjson", std::ios::app);
  if (!index) throw std::runtime_error("cannot append to runs.ndjson");
  index << rec.to_json().dump() << "\n";
  return rec;
}

}  // namespace martvar::runner
