#include "gnrk/bench/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gnrk/errors.hpp"

namespace gnrk::bench {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw InvalidArgument("config: '" + key + "' expects an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

void apply_key(VariantConfig& v, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "hessian") {
    if (value != "GN") throw InvalidArgument("config: hessian must be GN, got '" + value + "'");
  } else if (key == "cost_discretization") {
    if (value == "RK") v.cost_discretization = CostDiscretization::GNRK;
    else if (value == "SN") v.cost_discretization = CostDiscretization::SN;
    else throw InvalidArgument("config: cost_discretization must be SN or RK");
  } else if (key == "grid") {
    if (value == "uniform") v.grid = GridKind::Uniform;
    else if (value == "nonuniform") v.grid = GridKind::Nonuniform;
    else throw InvalidArgument("config: grid must be uniform or nonuniform");
  } else if (key == "algorithm") {
    if (value == "SQP") v.algorithm = Algorithm::SQP;
    else if (value == "RTI") v.algorithm = Algorithm::RTI;
    else throw InvalidArgument("config: algorithm must be SQP or RTI");
  } else if (key == "N") {
    v.N = parse_int(key, value);
  } else if (key == "T") {
    v.T = parse_double(key, value);
  } else if (key == "Ts") {
    v.Ts = parse_double(key, value);
  } else if (key == "n_stages") {
    v.n_stages = parse_int(key, value);
  } else if (key == "n_steps") {
    v.n_steps = parse_int(key, value);
  } else if (key == "cart_mass") {
    v.pendulum.cart_mass = parse_double(key, value);
  } else if (key == "pole_mass") {
    v.pendulum.pole_mass = parse_double(key, value);
  } else if (key == "length") {
    v.pendulum.length = parse_double(key, value);
  } else if (key == "gravity") {
    v.pendulum.gravity = parse_double(key, value);
  } else if (key == "Q") {
    const auto q = parse_list(key, value);
    if (q.size() != 4) throw InvalidArgument("config: Q expects 4 diagonal entries");
    v.weights.Q_diag = Eigen::Vector4d(q[0], q[1], q[2], q[3]);
  } else if (key == "R") {
    v.weights.R = parse_double(key, value);
  } else if (key == "gamma") {
    v.weights.gamma = parse_double(key, value);
  } else if (key == "p_min") {
    v.weights.p_min = parse_double(key, value);
  } else if (key == "p_max") {
    v.weights.p_max = parse_double(key, value);
  } else if (key == "u_min") {
    v.u_min = parse_double(key, value);
  } else if (key == "u_max") {
    v.u_max = parse_double(key, value);
  } else if (key == "x0") {
    const auto x = parse_list(key, value);
    if (x.size() != 4) throw InvalidArgument("config: x0 expects 4 entries");
    v.x0 = Eigen::Vector4d(x[0], x[1], x[2], x[3]);
  } else if (key == "theta0") {
    v.x0 = Eigen::Vector4d(0.0, parse_double(key, value), 0.0, 0.0);
  } else if (key == "dare_dt") {
    v.dare_dt = parse_double(key, value);
  } else if (key == "dare_weights") {
    if (value == "scaled") v.dare_scale_weights = true;
    else if (value == "unscaled") v.dare_scale_weights = false;
    else throw InvalidArgument("config: dare_weights must be scaled or unscaled");
  } else if (key == "terminal_cost") {
    if (value == "quadratic") v.terminal_cost = TerminalCost::Quadratic;
    else if (value == "nls") v.terminal_cost = TerminalCost::Nls;
    else throw InvalidArgument("config: terminal_cost must be quadratic or nls");
  } else if (key == "sim_duration") {
    v.sim_duration = parse_double(key, value);
  } else if (key == "timing_repeats") {
    v.timing_repeats = parse_int(key, value);
  } else if (key == "tol_stationarity") {
    v.tol_stationarity = parse_double(key, value);
  } else if (key == "max_iter") {
    v.max_iter = parse_int(key, value);
  } else if (key == "qp_tol") {
    v.qp_tol = parse_double(key, value);
  } else {
    throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

BenchConfig parse_tree(const pt::ptree& tree) {
  BenchConfig cfg;
  cfg.contraction_theta0 = {std::numbers::pi / 8.0, std::numbers::pi / 4.0};
  bool have_schema = false;
  VariantConfig defaults;
  std::vector<std::pair<std::string, const pt::ptree*>> sections;

  for (const auto& [key, node] : tree) {
    if (key == "schema") {
      cfg.schema = parse_int(key, trim(node.data()));
      have_schema = true;
    } else if (key == "baseline") {
      cfg.baseline = trim(node.data());
    } else if (key == "contraction_theta0") {
      cfg.contraction_theta0 = parse_list(key, node.data());
    } else if (key == "defaults") {
      for (const auto& [k, v] : node) apply_key(defaults, k, v.data());
    } else if (key.rfind("variant ", 0) == 0) {
      sections.emplace_back(trim(key.substr(8)), &node);
    } else {
      throw InvalidArgument("config: unknown key or section '" + key + "'");
    }
  }
  if (!have_schema) throw InvalidArgument("config: missing 'schema' key");
  if (cfg.schema != 1) throw InvalidArgument("config: unsupported schema " + std::to_string(cfg.schema));

  for (const auto& [id, node] : sections) {
    if (id.empty()) throw InvalidArgument("config: variant section without id");
    if (cfg.find(id) != nullptr) throw InvalidArgument("config: duplicate variant '" + id + "'");
    VariantConfig v = defaults;
    v.id = id;
    for (const auto& [k, val] : *node) apply_key(v, k, val.data());
    v.validate();
    cfg.variants.push_back(std::move(v));
  }
  if (!cfg.baseline.empty() && cfg.find(cfg.baseline) == nullptr)
    throw InvalidArgument("config: baseline '" + cfg.baseline + "' is not a declared variant");
  return cfg;
}

}  // namespace

void VariantConfig::validate() const {
  const auto fail = [this](const std::string& what) {
    throw InvalidArgument("variant '" + id + "': " + what);
  };
  if (N < 1) fail("N must be >= 1");
  if (!(T > 0.0)) fail("T must be positive");
  if (!(Ts > 0.0)) fail("Ts must be positive");
  if (grid == GridKind::Nonuniform && (N < 2 || !(Ts < T))) fail("nonuniform grid needs N >= 2 and Ts < T");
  if (n_stages < 1 || n_stages > 9) fail("n_stages must be in [1, 9]");
  if (n_steps < 1) fail("n_steps must be >= 1");
  if (!(u_min <= u_max)) fail("u_min must not exceed u_max");
  if (!(dare_dt >= 0.0)) fail("dare_dt must be nonnegative");
  if (!(sim_duration >= Ts)) fail("sim_duration must be at least Ts");
  if (timing_repeats < 1) fail("timing_repeats must be >= 1");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (!(tol_stationarity > 0.0) || !(qp_tol > 0.0)) fail("tolerances must be positive");
  const double steps = sim_duration / Ts;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) fail("sim_duration must be a multiple of Ts");
  pendulum.validate();
}

std::string VariantConfig::describe() const {
  std::ostringstream os;
  os << "GN" << (cost_discretization == CostDiscretization::GNRK ? "RK" : "SN") << " N=" << N
     << " T=" << T << ' ' << to_string(algorithm) << ' ' << to_string(grid);
  return os.str();
}

const VariantConfig* BenchConfig::find(const std::string& id) const {
  for (const auto& v : variants)
    if (v.id == id) return &v;
  return nullptr;
}

VariantConfig BenchConfig::baseline_variant() const {
  if (const VariantConfig* v = find(baseline)) return *v;
  VariantConfig ref = variants.empty() ? VariantConfig{} : variants.front();
  ref.id = "baseline";
  ref.cost_discretization = CostDiscretization::GNRK;
  ref.grid = GridKind::Uniform;
  ref.algorithm = Algorithm::SQP;
  ref.N = 200;
  ref.T = 4.0;
  return ref;
}

BenchConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return parse_tree(tree);
}

BenchConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

std::string to_string(CostDiscretization d) { return d == CostDiscretization::GNRK ? "RK" : "SN"; }
std::string to_string(GridKind g) { return g == GridKind::Uniform ? "uniform" : "nonuniform"; }
std::string to_string(Algorithm a) { return a == Algorithm::SQP ? "SQP" : "RTI"; }
std::string to_string(TerminalCost c) { return c == TerminalCost::Quadratic ? "quadratic" : "nls"; }

}  // namespace gnrk::bench
