#include "featdyn/config.hpp"

#include "featdyn/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace featdyn {

namespace pt = boost::property_tree;

std::string_view to_string(ModelKind kind) { return kind == ModelKind::diffusion ? "diffusion" : "classifier"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "classifier") return ModelKind::classifier;
  if (text == "diffusion") return ModelKind::diffusion;
  throw ConfigError("model must be classifier or diffusion, got '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
  if (m < 1) throw ConfigError("model.m must be >= 1");
  init.validate();
  train.validate();
  if (model == ModelKind::diffusion && !(t > 0.0)) throw ConfigError("model.t must be > 0");
  if (source == DataSource::synthetic) {
    synthetic.validate();
    if (n_test < 0) throw ConfigError("data.n_test must be >= 0");
  } else {
    mnist.noisy.validate();
    if (mnist.test_per_class < 0) throw ConfigError("data.test_per_class must be >= 0");
  }
  if (!(thresholds.signal > 0.0 && thresholds.small > 0.0 && thresholds.balance_lo > 0.0 &&
        thresholds.balance_hi >= thresholds.balance_lo))
    throw ConfigError("analysis thresholds must be positive with balance_lo <= balance_hi");
}

void SweepSpec::validate() const {
  base.validate();
  if (mu_values.empty()) throw ConfigError("sweep.mu_values must not be empty");
  if (seeds.empty()) throw ConfigError("sweep.seeds must not be empty");
  if (models.empty()) throw ConfigError("sweep.models must not be empty");
  if (jobs < 1) throw ConfigError("sweep.jobs must be >= 1");
  if (base.source != DataSource::synthetic) throw ConfigError("sweeps vary mu and need data.source = synthetic");
  for (double mu : mu_values)
    if (!(mu > 0.0)) throw ConfigError("sweep.mu_values must be positive");
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv("FEATDYN_OUT"); env && *env) return env;
  return "out";
}

std::filesystem::path default_mnist_dir() {
  if (const char* env = std::getenv("FEATDYN_MNIST_DIR"); env && *env) return env;
  return std::filesystem::path("data") / "mnist";
}

namespace {

// Typed access to one INI tree that remembers which keys were consumed, so
// leftovers can be reported.
class Reader {
public:
  Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  bool has(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    return sec && sec->find(key) != sec->not_found();
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto it = sec->find(key);
    if (it == sec->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  template <class T>
  void get(const std::string& section, const std::string& key, T& out) {
    auto text = raw(section, key);
    if (!text) return;
    out = convert<T>(*text, section + "." + key);
  }

  template <class T>
  T require(const std::string& section, const std::string& key) {
    auto text = raw(section, key);
    if (!text) throw ConfigError(origin_ + ": missing required key " + section + "." + key);
    return convert<T>(*text, section + "." + key);
  }

  template <class T>
  std::vector<T> list(const std::string& section, const std::string& key) {
    std::vector<T> out;
    auto text = raw(section, key);
    if (!text) return out;
    for (const auto& item : split(*text, ',')) {
      const std::string cell = trim(item);
      if (!cell.empty()) out.push_back(convert<T>(cell, section + "." + key));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty())
        throw ConfigError(origin_ + ": key '" + section + "' outside of any section");
      for (const auto& [key, value] : body) {
        (void)value;
        if (!used_.count(section + "." + key))
          throw ConfigError(origin_ + ": unknown key " + section + "." + key);
      }
    }
  }

  const std::string& origin() const { return origin_; }

private:
  template <class T>
  T convert(const std::string& text, const std::string& where) const {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      throw ConfigError(origin_ + ": " + where + " expects a boolean, got '" + text + "'");
    } else {
      std::istringstream in(text);
      T value{};
      in >> value;
      if (in.fail() || !(in >> std::ws).eof())
        throw ConfigError(origin_ + ": " + where + " has invalid value '" + text + "'");
      if constexpr (std::is_unsigned_v<T>) {
        if (text.front() == '-') throw ConfigError(origin_ + ": " + where + " must be nonnegative");
      }
      return value;
    }
  }

  const pt::ptree& tree_;
  std::string origin_;
  std::set<std::string> used_;
};

pt::ptree read_ini(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string stem_of(const std::string& origin) {
  const std::string stem = std::filesystem::path(origin).stem().string();
  return stem.empty() ? "experiment" : stem;
}

void read_experiment_keys(Reader& r, ExperimentSpec& spec) {
  if (auto model = r.raw("experiment", "model")) spec.model = parse_model_kind(*model);
  else throw ConfigError(r.origin() + ": missing required key experiment.model");
  r.get("experiment", "name", spec.name);
  std::string out_dir;
  r.get("experiment", "output_dir", out_dir);

  std::string source = "synthetic";
  r.get("data", "source", source);
  if (source == "synthetic") spec.source = DataSource::synthetic;
  else if (source == "mnist") spec.source = DataSource::mnist;
  else throw ConfigError(r.origin() + ": data.source must be synthetic or mnist");

  r.get("data", "d", spec.synthetic.d);
  r.get("data", "n", spec.synthetic.n);
  r.get("data", "mu", spec.synthetic.mu_norm);
  r.get("data", "sigma_xi", spec.synthetic.sigma_xi);
  r.get("data", "seed", spec.synthetic.seed);
  std::string signal_mode = "axis_aligned";
  r.get("data", "signal_mode", signal_mode);
  if (signal_mode == "axis_aligned") spec.synthetic.signal_mode = SignalMode::axis_aligned;
  else if (signal_mode == "random_orthogonal") spec.synthetic.signal_mode = SignalMode::random_orthogonal;
  else throw ConfigError(r.origin() + ": data.signal_mode must be axis_aligned or random_orthogonal");
  r.get("data", "n_test", spec.n_test);

  spec.mnist.dir = default_mnist_dir();
  std::string mnist_dir;
  r.get("data", "mnist_dir", mnist_dir);
  if (!mnist_dir.empty()) spec.mnist.dir = mnist_dir;
  r.get("data", "snr_tilde", spec.mnist.noisy.snr_tilde);
  auto classes = r.list<int>("data", "classes");
  if (!classes.empty()) {
    if (classes.size() != 2) throw ConfigError(r.origin() + ": data.classes needs exactly two digits");
    spec.mnist.noisy.classes = {classes[0], classes[1]};
  }
  r.get("data", "per_class", spec.mnist.noisy.per_class);
  r.get("data", "test_per_class", spec.mnist.test_per_class);
  std::string scaling = "unit";
  r.get("data", "pixel_scaling", scaling);
  if (scaling == "unit") spec.mnist.noisy.scaling = PixelScaling::unit;
  else if (scaling == "standardized") spec.mnist.noisy.scaling = PixelScaling::standardized;
  else throw ConfigError(r.origin() + ": data.pixel_scaling must be unit or standardized");
  if (spec.source == DataSource::mnist) spec.mnist.noisy.seed = spec.synthetic.seed;

  r.get("model", "m", spec.m);
  r.get("model", "sigma0", spec.init.sigma0);
  spec.init.seed = spec.synthetic.seed;
  r.get("model", "init_seed", spec.init.seed);
  r.get("model", "t", spec.t);

  r.get("train", "eta", spec.train.eta);
  std::string units = "raw";
  r.get("train", "eta_units", units);
  if (units == "raw") spec.train.eta_units = EtaUnits::raw;
  else if (units == "per_coordinate") spec.train.eta_units = EtaUnits::per_coordinate;
  else throw ConfigError(r.origin() + ": train.eta_units must be raw or per_coordinate");
  r.get("train", "iters", spec.train.iters);
  r.get("train", "record_every", spec.train.record_every);
  if (r.has("train", "grad_tol")) spec.train.grad_tol = r.require<double>("train", "grad_tol");
  r.get("train", "rel_grad_tol", spec.train.rel_grad_tol);
  std::string objective = "exact";
  r.get("train", "objective", objective);
  if (objective == "exact") spec.train.objective.kind = ObjectiveKind::exact;
  else if (objective == "monte_carlo") spec.train.objective.kind = ObjectiveKind::monte_carlo;
  else throw ConfigError(r.origin() + ": train.objective must be exact or monte_carlo");
  r.get("train", "n_eps", spec.train.objective.n_eps);
  spec.train.objective.seed = spec.synthetic.seed;
  r.get("train", "mc_seed", spec.train.objective.seed);

  r.get("analysis", "signal_thresh", spec.thresholds.signal);
  r.get("analysis", "small_thresh", spec.thresholds.small);
  r.get("analysis", "balance_lo", spec.thresholds.balance_lo);
  r.get("analysis", "balance_hi", spec.thresholds.balance_hi);

  const std::filesystem::path root = default_output_root();
  if (out_dir.empty()) spec.output_dir = root / spec.name;
  else if (std::filesystem::path(out_dir).is_absolute()) spec.output_dir = out_dir;
  else spec.output_dir = root / out_dir;
}

}  // namespace

ExperimentSpec parse_experiment(std::istream& in, const std::string& origin) {
  const pt::ptree tree = read_ini(in, origin);
  Reader r(tree, origin);
  ExperimentSpec spec;
  spec.name = stem_of(origin);
  read_experiment_keys(r, spec);
  r.reject_unknown();
  spec.validate();
  return spec;
}

SweepSpec parse_sweep(std::istream& in, const std::string& origin) {
  const pt::ptree tree = read_ini(in, origin);
  Reader r(tree, origin);
  SweepSpec sweep;
  sweep.base.name = stem_of(origin);
  read_experiment_keys(r, sweep.base);
  sweep.mu_values = r.list<double>("sweep", "mu_values");
  sweep.seeds = r.list<std::uint64_t>("sweep", "seeds");
  if (sweep.seeds.empty()) sweep.seeds.push_back(sweep.base.synthetic.seed);
  for (const auto& name : r.list<std::string>("sweep", "models")) sweep.models.push_back(parse_model_kind(name));
  if (sweep.models.empty()) sweep.models.push_back(sweep.base.model);
  r.get("sweep", "jobs", sweep.jobs);
  r.reject_unknown();
  sweep.validate();
  return sweep;
}

namespace {

std::ifstream open_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  return in;
}

}  // namespace

ExperimentSpec load_experiment(const std::filesystem::path& file) {
  auto in = open_spec(file);
  return parse_experiment(in, file.string());
}

SweepSpec load_sweep(const std::filesystem::path& file) {
  auto in = open_spec(file);
  return parse_sweep(in, file.string());
}

}  // namespace featdyn
