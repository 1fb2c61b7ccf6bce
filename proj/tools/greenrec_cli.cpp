// Command-line driver: configures models, runs the solvers and samplers, and
// emits CSV/JSON for plotting and regression.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "greenrec/chain1d.hpp"
#include "greenrec/errors.hpp"
#include "greenrec/graph.hpp"
#include "greenrec/looptree.hpp"
#include "greenrec/oracle.hpp"
#include "greenrec/percolation.hpp"
#include "greenrec/siegel.hpp"
#include "greenrec/tree.hpp"

#ifndef GREENREC_BUILD_ID
#define GREENREC_BUILD_ID "unknown"
#endif

namespace {

using greenrec::HPoint;
using greenrec::SpectralParam;
using nlohmann::json;

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw config_error(context + ": unknown key \"" + it.key() + "\"");
  }
}

const json& require(const json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw config_error(context + ": missing key \"" + key + "\"");
  return *it;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// ---- parsing ---------------------------------------------------------------

greenrec::Distribution parse_dist(const json& j, const std::string& context) {
  check_keys(j, {"type", "lo", "hi", "p", "values"}, context);
  const std::string type = require(j, "type", context).get<std::string>();
  if (type == "bernoulli_pm1") return greenrec::Distribution::bernoulli_pm1();
  if (type == "uniform")
    return greenrec::Distribution::uniform(require(j, "lo", context).get<double>(),
                                           require(j, "hi", context).get<double>());
  if (type == "two_point") {
    const auto& vals = require(j, "values", context);
    if (!vals.is_array() || vals.size() != 2)
      throw config_error(context + ": \"values\" must be a 2-element array");
    return greenrec::Distribution::two_point(require(j, "p", context).get<double>(),
                                             vals[0].get<double>(), vals[1].get<double>());
  }
  throw config_error(context + ": unknown distribution type \"" + type + "\"");
}

greenrec::JointPairDistribution parse_joint(const json& j, const std::string& context) {
  check_keys(j, {"type", "atoms", "marginal"}, context);
  const std::string type = require(j, "type", context).get<std::string>();
  if (type == "atoms") {
    std::vector<greenrec::JointPairDistribution::Atom> atoms;
    for (const auto& a : require(j, "atoms", context)) {
      if (!a.is_array() || a.size() != 3)
        throw config_error(context + ": each atom is [q1, q2, prob]");
      atoms.push_back({a[0].get<double>(), a[1].get<double>(), a[2].get<double>()});
    }
    return greenrec::JointPairDistribution::from_atoms(std::move(atoms));
  }
  if (type == "independent_product") {
    const auto m = parse_dist(require(j, "marginal", context), context + ".marginal");
    return greenrec::JointPairDistribution::product(m, m);
  }
  if (type == "fully_correlated") {
    const auto m = parse_dist(require(j, "marginal", context), context + ".marginal");
    return greenrec::JointPairDistribution::fully_correlated(m);
  }
  throw config_error(context + ": unknown joint type \"" + type + "\"");
}

greenrec::PotentialSeq parse_potential(const json& j, const std::string& context) {
  check_keys(j, {"type", "values", "amp", "ratio", "limit", "dist", "scale_amp", "scale_ratio"},
             context);
  const std::string type = require(j, "type", context).get<std::string>();
  if (type == "zero") return greenrec::PotentialSeq::zero();
  if (type == "explicit") {
    std::vector<double> v;
    for (const auto& x : require(j, "values", context)) v.push_back(x.get<double>());
    return greenrec::PotentialSeq::from_list(std::move(v));
  }
  if (type == "l1") {  // q_n = amp * ratio^n, |ratio| < 1
    const double amp = require(j, "amp", context).get<double>();
    const double ratio = require(j, "ratio", context).get<double>();
    if (!(std::abs(ratio) < 1.0)) throw config_error(context + ": l1 needs |ratio| < 1");
    return greenrec::PotentialSeq::from_function(
        [amp, ratio](std::size_t n) { return amp * std::pow(ratio, double(n)); },
        std::abs(amp));
  }
  if (type == "mourre") {  // q_n = limit + amp/(n+1)
    const double amp = require(j, "amp", context).get<double>();
    const double limit = require(j, "limit", context).get<double>();
    return greenrec::PotentialSeq::from_function(
        [amp, limit](std::size_t n) { return limit + amp / double(n + 1); },
        std::abs(limit) + std::abs(amp));
  }
  if (type == "random") {  // q_n = scale_amp * scale_ratio^n * X_n
    const auto dist = parse_dist(require(j, "dist", context), context + ".dist");
    const double amp = require(j, "scale_amp", context).get<double>();
    const double ratio = j.value("scale_ratio", 1.0);
    if (!(ratio >= 0.0 && ratio <= 1.0))
      throw config_error(context + ": scale_ratio must be in [0,1]");
    const double sq_sum = ratio < 1.0 ? amp * amp / (1.0 - ratio * ratio) : -1.0;
    return greenrec::PotentialSeq::random_centered(
        dist, [amp, ratio](std::size_t n) { return amp * std::pow(ratio, double(n)); },
        sq_sum, std::abs(amp) * dist.bound());
  }
  throw config_error(context + ": unknown potential type \"" + type + "\"");
}

struct LambdaGrid {
  std::vector<std::complex<double>> points;
};

LambdaGrid parse_lambda(const json& cfg, const std::string& context) {
  LambdaGrid grid;
  const bool has_single = cfg.contains("lambda");
  const bool has_grid = cfg.contains("lambda_grid");
  if (has_single == has_grid)
    throw config_error(context + ": exactly one of \"lambda\" / \"lambda_grid\" required");
  if (has_single) {
    const json& l = cfg["lambda"];
    check_keys(l, {"re", "im"}, context + ".lambda");
    grid.points.emplace_back(require(l, "re", context).get<double>(), l.value("im", 0.0));
  } else {
    const json& l = cfg["lambda_grid"];
    check_keys(l, {"lo", "hi", "count", "im"}, context + ".lambda_grid");
    const double lo = require(l, "lo", context).get<double>();
    const double hi = require(l, "hi", context).get<double>();
    const std::size_t count = require(l, "count", context).get<std::size_t>();
    const double im = require(l, "im", context).get<double>();
    if (count < 1 || !(lo <= hi)) throw config_error(context + ": bad lambda_grid");
    for (std::size_t i = 0; i < count; ++i) {
      const double re = count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1);
      grid.points.emplace_back(re, im);
    }
  }
  return grid;
}

struct ModelConfig {
  std::string type;
  greenrec::oracle::ModelDescriptor desc;
  std::size_t depth = 0;
  greenrec::PotentialSeq chain_pot = greenrec::PotentialSeq::zero();
};

ModelConfig parse_green_model(const json& j, const std::string& context) {
  check_keys(j, {"type", "k", "d", "gamma", "depth", "levels", "potential", "q_del"}, context);
  ModelConfig m;
  m.type = require(j, "type", context).get<std::string>();
  using T = greenrec::oracle::ModelDescriptor::Type;
  if (m.type == "chain") {
    m.desc.type = T::chain;
    m.depth = j.value("depth", std::size_t{0});
    if (j.contains("potential")) m.chain_pot = parse_potential(j["potential"], context);
  } else if (m.type == "kary_tree") {
    m.desc.type = T::kary_tree;
    m.desc.k = j.value("k", std::size_t{2});
    m.depth = require(j, "depth", context).get<std::size_t>();
  } else if (m.type == "box") {
    m.desc.type = T::box;
    m.desc.dims = j.value("d", std::size_t{2});
    m.depth = require(j, "depth", context).get<std::size_t>();
  } else if (m.type == "regular_loop_tree") {
    m.desc.type = T::regular_loop_tree;
    m.desc.gamma = require(j, "gamma", context).get<double>();
    m.depth = require(j, "levels", context).get<std::size_t>();
  } else if (m.type == "percolation_sample") {
    m.desc.type = T::percolation_sample;
    m.desc.q_del = require(j, "q_del", context).get<double>();
    m.depth = require(j, "depth", context).get<std::size_t>();
  } else {
    throw config_error(context + ": unknown model type \"" + m.type + "\"");
  }
  return m;
}

// ---- shared run options ----------------------------------------------------

struct RunOptions {
  std::string config_path;
  std::string out_path = "-";
  long long seed = -1;  // <0: not set on the command line
  bool oracle = false;
  unsigned threads = 1;
};

json load_config(const RunOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw config_error("cannot open config file " + opt.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  if (!cfg.is_object()) throw config_error("config root must be an object");
  return cfg;
}

std::uint64_t stochastic_seed(const json& cfg, const RunOptions& opt,
                              const std::string& context) {
  if (opt.seed >= 0) return static_cast<std::uint64_t>(opt.seed);
  if (!cfg.contains("seed"))
    throw config_error(context + ": missing key \"seed\" (mandatory for stochastic runs)");
  return cfg["seed"].get<std::uint64_t>();
}

std::string out_path(const json& cfg, const RunOptions& opt) {
  if (opt.out_path != "-") return opt.out_path;
  return cfg.value("out", std::string("-"));
}

std::string stochastic_header(std::uint64_t seed, std::size_t pool, std::size_t generations) {
  std::ostringstream os;
  os << "# seed=" << seed << "\r\n# pool=" << pool << "\r\n# generations=" << generations
     << "\r\n# build=" << GREENREC_BUILD_ID << "\r\n";
  return os.str();
}

// ---- commands --------------------------------------------------------------

int cmd_green(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg, {"model", "lambda", "lambda_grid", "depth", "out", "seed"}, "green");
  const ModelConfig model = parse_green_model(require(cfg, "model", "green"), "green.model");
  const LambdaGrid grid = parse_lambda(cfg, "green");

  std::ostringstream os;
  os << "lambda_re,lambda_im,G_re,G_im,method,oracle_diff\r\n";
  std::vector<std::string> rows(grid.points.size());
  using T = greenrec::oracle::ModelDescriptor::Type;

  const auto run_point = [&](std::size_t i) {
    const SpectralParam lam(grid.points[i]);
    HPoint g(0.0, 1.0);
    std::string method;
    if (model.desc.type == T::chain) {
      const std::size_t depth =
          model.depth > 0 ? model.depth : greenrec::default_depth(lam);
      g = greenrec::green_1d(model.chain_pot, lam, depth, HPoint(0.0, 1.0));
      method = "chain";
    } else if (model.desc.type == T::regular_loop_tree) {
      g = greenrec::loop_green_root(model.desc.gamma, lam, model.depth);
      method = "loopfft";
    } else {
      const greenrec::RootedGraph graph = greenrec::oracle::build_graph(model.desc, model.depth);
      g = greenrec::green_root_graph(graph, {}, lam, model.depth,
                                     greenrec::SeedSpec::dirichlet());
      method = "sphere";
    }
    std::string diff;
    if (opt.oracle) {
      const std::size_t oracle_depth =
          model.desc.type == T::chain ? std::min<std::size_t>(model.depth ? model.depth : 4000,
                                                              30000)
                                      : model.depth;
      const auto h = greenrec::oracle::build_truncation(model.desc, oracle_depth, 0,
                                                        [&] {
                                                          std::vector<double> pot;
                                                          if (model.desc.type == T::chain) {
                                                            pot.resize(oracle_depth + 1);
                                                            for (std::size_t n = 0;
                                                                 n <= oracle_depth; ++n)
                                                              pot[n] = model.chain_pot.random()
                                                                           ? 0.0
                                                                           : model.chain_pot.at(n);
                                                          }
                                                          return pot;
                                                        }());
      const std::complex<double> ref = greenrec::oracle::solve_green(h, lam, 0);
      diff = fmt17(std::abs(g.value() - ref));
    }
    rows[i] = fmt17(lam.re()) + "," + fmt17(lam.im()) + "," + fmt17(g.re()) + "," +
              fmt17(g.im()) + "," + method + "," + diff + "\r\n";
  };

  if (opt.threads <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> workers;
    const unsigned n_workers = std::min<std::size_t>(opt.threads, rows.size());
    for (unsigned w = 0; w < n_workers; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < rows.size(); i += n_workers) run_point(i);
      });
    for (auto& t : workers) t.join();
  }
  for (const auto& r : rows) os << r;
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

int cmd_density(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg, {"potential", "interval", "eps", "grid", "depth", "out", "seed"}, "density");
  greenrec::PotentialSeq pot = greenrec::PotentialSeq::zero();
  if (cfg.contains("potential")) pot = parse_potential(cfg["potential"], "density.potential");
  const auto& iv = require(cfg, "interval", "density");
  if (!iv.is_array() || iv.size() != 2)
    throw config_error("density: \"interval\" must be [c, d]");
  const double eps = require(cfg, "eps", "density").get<double>();
  const std::size_t grid = require(cfg, "grid", "density").get<std::size_t>();
  const std::size_t depth =
      cfg.value("depth", greenrec::default_depth(SpectralParam(0.0, eps)));

  const auto rows =
      greenrec::density_profile(pot, iv[0].get<double>(), iv[1].get<double>(), eps, grid, depth);
  std::ostringstream os;
  os << "lambda,density\r\n";
  for (const auto& [l, d] : rows) os << fmt17(l) << "," << fmt17(d) << "\r\n";
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

int cmd_moments(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg,
             {"model", "lambda", "eps_ladder", "pool", "generations", "p", "seed", "out",
              "start"},
             "moments");
  const json& mj = require(cfg, "model", "moments");
  check_keys(mj, {"type", "k", "dist", "disorder", "joint", "root"}, "moments.model");
  const std::string mtype = require(mj, "type", "moments.model").get<std::string>();

  greenrec::TreeModel model = greenrec::TreeModel::free_tree();
  if (mtype == "iid_tree") {
    model = greenrec::TreeModel::iid(
        mj.value("k", std::size_t{2}),
        parse_dist(require(mj, "dist", "moments.model"), "moments.model.dist"),
        require(mj, "disorder", "moments.model").get<double>());
  } else if (mtype == "two_periodic") {
    model = greenrec::TreeModel::two_periodic(
        parse_joint(require(mj, "joint", "moments.model"), "moments.model.joint"),
        require(mj, "disorder", "moments.model").get<double>());
  } else if (mtype == "free_tree") {
    model = greenrec::TreeModel::free_tree(mj.value("k", std::size_t{2}));
  } else {
    throw config_error("moments.model: unknown type \"" + mtype + "\"");
  }

  const double lam_re = require(cfg, "lambda", "moments").get<double>();
  std::vector<double> ladder;
  for (const auto& e : require(cfg, "eps_ladder", "moments")) ladder.push_back(e.get<double>());
  std::sort(ladder.rbegin(), ladder.rend());  // rows ordered by descending eps
  const std::size_t pool = require(cfg, "pool", "moments").get<std::size_t>();
  const std::size_t generations = cfg.value("generations", std::size_t{300});
  const double p = cfg.value("p", 1.5);
  const std::uint64_t seed = stochastic_seed(cfg, opt, "moments");
  const std::string start = cfg.value("start", std::string("fixed_point"));

  std::ostringstream os;
  os << stochastic_header(seed, pool, generations);
  os << "eps,M_p_estimate,stderr,pool_size,generations\r\n";
  for (double eps : ladder) {
    const SpectralParam lam(lam_re, eps);
    const HPoint z_ref = greenrec::tree_fixed_point(model.branching, lam);
    const HPoint init = start == "fixed_point" ? z_ref : HPoint(0.0, 1.0);
    const greenrec::SamplePool out =
        greenrec::population_green(model, lam, pool, generations, seed, init, opt.threads);
    const auto stat = greenrec::moment_Mp_stats(out, p, z_ref);
    os << fmt17(eps) << "," << fmt17(stat.mean) << "," << fmt17(stat.std_error) << "," << pool
       << "," << generations << "\r\n";
  }
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

int cmd_percolation(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg,
             {"model", "q_del", "lambda", "eps_ladder", "pool", "generations", "p", "seed",
              "out", "start"},
             "percolation");
  if (cfg.contains("model") && cfg["model"].get<std::string>() != "percolation")
    throw config_error("percolation: \"model\" must be \"percolation\"");
  const greenrec::PercolationSpec spec(require(cfg, "q_del", "percolation").get<double>());
  const double lam_re = require(cfg, "lambda", "percolation").get<double>();
  std::vector<double> ladder;
  for (const auto& e : require(cfg, "eps_ladder", "percolation"))
    ladder.push_back(e.get<double>());
  std::sort(ladder.rbegin(), ladder.rend());
  const std::size_t pool = require(cfg, "pool", "percolation").get<std::size_t>();
  const std::size_t generations = cfg.value("generations", std::size_t{300});
  const double p = cfg.value("p", 1.5);
  const std::uint64_t seed = stochastic_seed(cfg, opt, "percolation");
  const std::string start = cfg.value("start", std::string("fixed_point"));

  std::ostringstream os;
  os << stochastic_header(seed, pool, generations);
  os << "eps,M_p_estimate,stderr,pool_size,generations,freq_both,freq_left,freq_right\r\n";
  for (double eps : ladder) {
    const SpectralParam lam(lam_re, eps);
    const HPoint z_ref = greenrec::tree_fixed_point(2, lam);
    const HPoint init = start == "fixed_point" ? z_ref : HPoint(0.0, 1.0);
    const greenrec::PercolationRun run =
        greenrec::percolation_population(spec, lam, pool, generations, seed, init, opt.threads);
    const auto stat = greenrec::moment_Mp_stats(run.pool, p, z_ref);
    std::uint64_t both = 0, left = 0, right = 0;
    for (const auto& c : run.outcome_counts) {
      both += c[0];
      left += c[1];
      right += c[2];
    }
    const double total = double(both + left + right);
    os << fmt17(eps) << "," << fmt17(stat.mean) << "," << fmt17(stat.std_error) << "," << pool
       << "," << generations << "," << fmt17(both / total) << "," << fmt17(left / total) << ","
       << fmt17(right / total) << "\r\n";
  }
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

int cmd_looptree(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg, {"gamma", "lambda", "levels", "out", "seed"}, "looptree");
  const double gamma = require(cfg, "gamma", "looptree").get<double>();
  const json& l = require(cfg, "lambda", "looptree");
  check_keys(l, {"re", "im"}, "looptree.lambda");
  const SpectralParam lam(require(l, "re", "looptree").get<double>(), l.value("im", 1e-3));
  const std::size_t levels = require(cfg, "levels", "looptree").get<std::size_t>();

  const auto stack = greenrec::loop_levels(gamma, lam, levels);
  std::ostringstream os;
  os << "level,k,theta,f_re,f_im\r\n";
  for (const auto& spec : stack) {
    const std::size_t n = static_cast<std::size_t>(spec.f.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double theta = 2.0 * M_PI * double(k) / double(n);
      os << spec.level << "," << k << "," << fmt17(theta) << "," << fmt17(spec.f[k].real())
         << "," << fmt17(spec.f[k].imag()) << "\r\n";
    }
  }
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

int cmd_classify(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg, {"what", "delta", "lambda_grid", "lambda", "gamma", "c11", "c22", "c12",
                   "out", "seed"},
             "classify");
  const std::string what = require(cfg, "what", "classify").get<std::string>();
  json out;
  if (what == "oscillating") {
    const double delta = require(cfg, "delta", "classify").get<double>();
    const LambdaGrid grid = parse_lambda(cfg, "classify");
    out = json::array();
    for (const auto& l : grid.points) {
      const auto cls = greenrec::oscillating_ac_test(l.real(), delta);
      const char* name = cls == greenrec::AcClassification::ac_interior ? "ac_interior"
                         : cls == greenrec::AcClassification::not_ac    ? "not_ac"
                                                                        : "boundary";
      out.push_back({{"lambda", l.real()}, {"delta", delta}, {"classification", name}});
    }
  } else if (what == "meanfield") {
    const double gamma = require(cfg, "gamma", "classify").get<double>();
    const auto [a, b] = greenrec::meanfield_spectrum(gamma);
    out = {{"gamma", gamma}, {"intervals", {{a.lo, a.hi}, {b.lo, b.hi}}}};
  } else if (what == "two_periodic") {
    const auto check = greenrec::correlation_delta(
        require(cfg, "c11", "classify").get<double>(),
        require(cfg, "c22", "classify").get<double>(),
        require(cfg, "c12", "classify").get<double>());
    out = {{"delta", check.delta}, {"admissible", check.admissible}};
  } else {
    throw config_error("classify: unknown \"what\" value \"" + what + "\"");
  }
  write_atomic(out_path(cfg, opt), out.dump(2) + "\n");
  return 0;
}

int cmd_oracle_compare(const RunOptions& opt) {
  const json cfg = load_config(opt);
  check_keys(cfg, {"model", "lambda", "lambda_grid", "depth", "seed", "out"}, "oracle-compare");
  const ModelConfig model =
      parse_green_model(require(cfg, "model", "oracle-compare"), "oracle-compare.model");
  const LambdaGrid grid = parse_lambda(cfg, "oracle-compare");
  using T = greenrec::oracle::ModelDescriptor::Type;

  std::ostringstream os;
  os << "lambda_re,lambda_im,iterate_re,iterate_im,oracle_re,oracle_im,abs_diff\r\n";
  for (const auto& lc : grid.points) {
    const SpectralParam lam(lc);
    HPoint g(0.0, 1.0);
    std::vector<double> pot;
    if (model.desc.type == T::chain) {
      pot.resize(model.depth + 1);
      for (std::size_t n = 0; n <= model.depth; ++n)
        pot[n] = model.chain_pot.random() ? 0.0 : model.chain_pot.at(n);
      g = greenrec::green_1d(model.chain_pot, lam, model.depth, HPoint(0.0, 1.0));
    } else if (model.desc.type == T::regular_loop_tree) {
      g = greenrec::loop_green_root(model.desc.gamma, lam, model.depth);
    } else {
      const greenrec::RootedGraph graph = greenrec::oracle::build_graph(model.desc, model.depth);
      g = greenrec::green_root_graph(graph, {}, lam, model.depth,
                                     greenrec::SeedSpec::dirichlet());
    }
    const auto h = greenrec::oracle::build_truncation(model.desc, model.depth, 0, pot);
    const std::complex<double> ref = greenrec::oracle::solve_green(h, lam, 0);
    os << fmt17(lam.re()) << "," << fmt17(lam.im()) << "," << fmt17(g.re()) << ","
       << fmt17(g.im()) << "," << fmt17(ref.real()) << "," << fmt17(ref.imag()) << ","
       << fmt17(std::abs(g.value() - ref)) << "\r\n";
  }
  write_atomic(out_path(cfg, opt), os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green functions of discrete Schrodinger operators via Mobius recursions"};
  app.require_subcommand(1);

  RunOptions opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out_path, "output path (default: config \"out\" or stdout)");
    sub->add_option("--threads", opt.threads, "worker threads (results are thread-count independent)");
    sub->add_flag("--oracle", opt.oracle, "add brute-force comparison columns");
  };

  CLI::App* green = app.add_subcommand("green", "diagonal Green values on a lambda grid");
  CLI::App* density = app.add_subcommand("density", "smoothed spectral density profile");
  CLI::App* moments = app.add_subcommand("moments", "population-dynamics moment ladder");
  CLI::App* percolation = app.add_subcommand("percolation", "percolation moment ladder");
  CLI::App* looptree = app.add_subcommand("looptree", "per-theta loop-tree spectra");
  CLI::App* classify = app.add_subcommand("classify", "spectral-type classifications");
  CLI::App* oracle_cmp = app.add_subcommand("oracle-compare", "iterate vs direct solve");
  for (CLI::App* sub : {green, density, moments, percolation, looptree, classify, oracle_cmp})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (green->parsed()) return cmd_green(opt);
    if (density->parsed()) return cmd_density(opt);
    if (moments->parsed()) return cmd_moments(opt);
    if (percolation->parsed()) return cmd_percolation(opt);
    if (looptree->parsed()) return cmd_looptree(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (oracle_cmp->parsed()) return cmd_oracle_compare(opt);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const greenrec::size_cap_exceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const greenrec::boundary_underflow& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const greenrec::numerical_degeneracy& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
