#include "featdyn/experiment.hpp"

#include "featdyn/csv.hpp"
#include "featdyn/svg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace featdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(17);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Commas and newlines would break the one-line CSV cells.
std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

IdxTensor read_mnist_part(const std::filesystem::path& dir, const std::string& name) {
  const auto file = dir / name;
  if (!std::filesystem::exists(file)) throw ConfigError("missing MNIST file " + file.string());
  return read_idx_file(file);
}

double empirical_n_snr2(const Dataset& data) {
  const double s = data.signal_patches().rowwise().squaredNorm().mean();
  const double x = data.noise_patches().rowwise().squaredNorm().mean();
  return static_cast<double>(data.size()) * s / x;
}

}  // namespace

ExperimentData prepare_data(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.source == DataSource::synthetic) {
    Dataset train = generate_dataset(spec.synthetic);
    Dataset test = spec.n_test > 0 ? generate_test_set(spec.synthetic, spec.n_test, spec.synthetic.seed) : Dataset();
    return {std::move(train), std::move(test), snr_quantities(spec.synthetic).n_snr2};
  }
  const auto& dir = spec.mnist.dir;
  const IdxTensor images = read_mnist_part(dir, "train-images-idx3-ubyte");
  const IdxTensor labels = read_mnist_part(dir, "train-labels-idx1-ubyte");
  Dataset train = build_noisy_mnist(images, labels, spec.mnist.noisy);
  Dataset test;
  if (spec.mnist.test_per_class > 0) {
    NoisyMnistConfig cfg = spec.mnist.noisy;
    cfg.per_class = spec.mnist.test_per_class;
    cfg.seed = spec.mnist.noisy.seed + 1;  // independent noise patches
    test = build_noisy_mnist(read_mnist_part(dir, "t10k-images-idx3-ubyte"),
                             read_mnist_part(dir, "t10k-labels-idx1-ubyte"), cfg);
  }
  const double n_snr2 = empirical_n_snr2(train);
  return {std::move(train), std::move(test), n_snr2};
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentData& data) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.model = spec.model;
  result.n_snr2 = data.n_snr2;
  result.train_accuracy = kNaN;
  result.test_accuracy = kNaN;
  const int d = data.train.dim();

  if (spec.model == ModelKind::classifier) {
    auto traj = train_classifier(init_classifier(spec.m, d, spec.init), data.train, spec.train);
    result.records = std::move(traj.records);
    result.stop_reason = traj.stop_reason;
    result.iterations_run = traj.iterations_run;
    if (traj.stop_reason != StopReason::nonfinite) {
      result.train_accuracy = accuracy(traj.final_params, data.train);
      if (!data.test.empty()) result.test_accuracy = accuracy(traj.final_params, data.test);
    }
    result.classifier = std::move(traj.final_params);
  } else {
    auto traj = train_denoiser(init_denoiser(spec.m, d, spec.init), data.train, make_schedule(spec.t), spec.train);
    result.records = std::move(traj.records);
    result.stop_reason = traj.stop_reason;
    result.iterations_run = traj.iterations_run;
    result.denoiser = std::move(traj.final_params);
  }
  result.phase = phase_classify(result.final_metrics(), spec.thresholds, result.n_snr2);
  result.seconds = seconds_since(start);
  return result;
}

namespace {

void write_summary(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r) {
  out << kSummaryCsvHeader << ',' << kMetricsCsvHeader << '\n';
  const auto& last = r.records.back();
  out << csv_safe(spec.name) << ',' << to_string(r.model) << ','
      << (spec.source == DataSource::synthetic ? "synthetic" : "mnist") << ',' << r.n_snr2 << ','
      << to_string(r.phase) << ',' << to_string(r.stop_reason) << ',' << r.iterations_run << ','
      << r.train_accuracy << ',' << r.test_accuracy << ',' << last.iter << ',' << last.loss
      << ',' << last.grad_norm << ',' << metrics_csv_fields(last.metrics) << '\n';
}

void write_trajectory_plot(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r) {
  Series sig_pos{"max_signal_pos", {}, {}}, sig_neg{"max_signal_neg", {}, {}}, noise{"max_noise", {}, {}};
  for (const auto& rec : r.records) {
    const double k = static_cast<double>(rec.iter);
    sig_pos.x.push_back(k), sig_pos.y.push_back(rec.metrics.max_signal_pos);
    sig_neg.x.push_back(k), sig_neg.y.push_back(rec.metrics.max_signal_neg);
    noise.x.push_back(k), noise.y.push_back(rec.metrics.max_noise);
  }
  ChartOptions opts;
  opts.title = spec.name + " (" + std::string(to_string(r.model)) + ")";
  opts.y_label = "inner product";
  opts.log_x = true;
  write_line_chart(out, {sig_pos, sig_neg, noise}, opts);
}

ImageTile tile_of(const Vector& v, Eigen::Index offset, const std::string& caption) {
  ImageTile t;
  t.caption = caption;
  t.pixels.assign(v.data() + offset, v.data() + offset + 784);
  return t;
}

void write_row(std::ostream& out, const std::string& prefix, const Vector& v, Eigen::Index offset, Eigen::Index len) {
  out << prefix;
  for (Eigen::Index k = 0; k < len; ++k) out << ',' << v[offset + k];
  out << '\n';
}

std::string pixel_header(const std::string& prefix, Eigen::Index len) {
  std::string h = prefix;
  for (Eigen::Index k = 0; k < len; ++k) h += ",p" + std::to_string(k);
  return h;
}

// A few samples of each class, test split when there is one.
std::vector<std::size_t> showcase(const Dataset& data, int per_class) {
  std::vector<std::size_t> idx;
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    int& count = data[i].label > 0 ? pos : neg;
    if (count < per_class) {
      idx.push_back(i);
      ++count;
    }
  }
  return idx;
}

void write_gradient_maps(const std::filesystem::path& dir, const ClassifierParams& params, const Dataset& data) {
  const Eigen::Index d = data.dim();
  auto csv = open_out(dir / "gradient_maps.csv");
  auto energy = open_out(dir / "gradient_energy.csv");
  csv << pixel_header("sample,label,patch", d) << '\n';
  energy << "sample,label,signal_energy,noise_energy\n";
  std::vector<ImageTile> tiles;
  for (std::size_t i : showcase(data, 4)) {
    const Sample& s = data[i];
    const Vector g = input_gradient_map(params, s);
    const std::string tag = std::to_string(i) + "," + std::to_string(s.label);
    write_row(csv, tag + ",signal", g, 0, d);
    write_row(csv, tag + ",noise", g, d, d);
    energy << tag << ',' << g.head(d).squaredNorm() << ',' << g.tail(d).squaredNorm() << '\n';
    if (d == 784) {
      Vector x(2 * d);
      x << s.x1, s.x2;
      tiles.push_back(tile_of(x, 0, "input"));
      tiles.push_back(tile_of(g, 0, "grad signal"));
      tiles.push_back(tile_of(g, d, "grad noise"));
    }
  }
  if (!tiles.empty()) {
    auto svg = open_out(dir / "gradient_maps.svg");
    write_image_grid(svg, tiles, 3);
  }
}

void write_reconstructions(const std::filesystem::path& dir, const DenoiserParams& params, const Dataset& data,
                           double t, std::uint64_t seed) {
  const Eigen::Index d = data.dim();
  const NoiseSchedule sched = make_schedule(t);
  const DenoiserParams zero = DenoiserParams::zeros(params.width(), params.dim());
  Rng rng = make_stream(seed, StreamId::diffusion_noise);
  auto csv = open_out(dir / "reconstructions.csv");
  auto err = open_out(dir / "reconstruction_error.csv");
  csv << pixel_header("sample,label,kind", d) << '\n';
  err << "sample,label,trained_error,baseline_error\n";
  std::vector<ImageTile> tiles;
  const std::size_t count = std::min<std::size_t>(data.size(), 20);
  for (std::size_t i = 0; i < count; ++i) {
    const Sample& s = data[i];
    Vector x0(2 * d), eps(2 * d);
    x0 << s.x1, s.x2;
    for (Eigen::Index k = 0; k < eps.size(); ++k) eps[k] = rng.normal();
    const Vector xt = sched.alpha * x0 + sched.beta * eps;
    const Vector rec = denoise_reconstruct_with(params, x0, sched, eps);
    const Vector base = denoise_reconstruct_with(zero, x0, sched, eps);
    const std::string tag = std::to_string(i) + "," + std::to_string(s.label);
    write_row(csv, tag + ",clean", x0, 0, d);
    write_row(csv, tag + ",noisy", xt, 0, d);
    write_row(csv, tag + ",reconstructed", rec, 0, d);
    err << tag << ',' << (rec.head(d) - x0.head(d)).norm() << ',' << (base.head(d) - x0.head(d)).norm() << '\n';
    if (d == 784 && i < 8) {
      tiles.push_back(tile_of(x0, 0, "clean"));
      tiles.push_back(tile_of(xt, 0, "noisy"));
      tiles.push_back(tile_of(rec, 0, "denoised"));
    }
  }
  if (!tiles.empty()) {
    auto svg = open_out(dir / "reconstructions.svg");
    write_image_grid(svg, tiles, 3);
  }
}

}  // namespace

void write_outputs(const ExperimentSpec& spec, const ExperimentData& data, const ExperimentResult& result) {
  const auto& dir = spec.output_dir;
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "trajectory.csv");
    write_trajectory_csv(out, result.records);
  }
  {
    auto out = open_out(dir / "summary.csv");
    write_summary(out, spec, result);
  }
  {
    auto out = open_out(dir / "plot.svg");
    write_trajectory_plot(out, spec, result);
  }
  const CheckpointHeader header{spec.m, data.train.dim(), spec.init.sigma0, spec.init.seed, result.iterations_run};
  {
    auto out = open_out(dir / "params_final.csv");
    if (result.classifier) write_checkpoint(out, header, *result.classifier);
    else write_checkpoint(out, header, *result.denoiser);
  }
  if (spec.source == DataSource::mnist && result.stop_reason != StopReason::nonfinite) {
    const Dataset& shown = data.test.empty() ? data.train : data.test;
    if (result.classifier) write_gradient_maps(dir, *result.classifier, shown);
    else write_reconstructions(dir, *result.denoiser, shown, spec.t, spec.synthetic.seed);
  }
}

int cmd_run(const std::filesystem::path& spec_file, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  ExperimentData data;
  try {
    spec = load_experiment(spec_file);
    data = prepare_data(spec);
  } catch (const std::invalid_argument& e) {  // ConfigError, ShapeError
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (spec.source == DataSource::synthetic) out << regime_report(spec.synthetic, spec.m, spec.init.sigma0, spec.train.eta).text();
    const ExperimentResult result = run_experiment(spec, data);
    write_outputs(spec, data, result);
    const auto& fm = result.final_metrics();
    out << spec.name << ": model=" << to_string(result.model) << " iterations=" << result.iterations_run
        << " stop=" << to_string(result.stop_reason) << " phase=" << to_string(result.phase)
        << " n*SNR^2=" << result.n_snr2 << " max_signal=" << fm.max_signal() << " max_noise=" << fm.max_noise
        << " ratio=" << fm.ratio;
    if (result.classifier)
      out << " train_acc=" << result.train_accuracy << " test_acc=" << result.test_accuracy;
    out << "\n  outputs in " << spec.output_dir.string() << '\n';
    if (result.stop_reason == StopReason::nonfinite) {
      err << "training diverged (nonfinite loss or gradient); partial outputs kept\n";
      return kExitNumeric;
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

namespace {

std::string format_mu(double mu) {
  std::ostringstream s;
  s << mu;
  return s.str();
}

SweepCell run_cell(const SweepSpec& sweep, ModelKind model, double mu, std::uint64_t seed) {
  ExperimentSpec spec = sweep.base;
  spec.model = model;
  spec.synthetic.mu_norm = mu;
  spec.synthetic.seed = seed;
  spec.init.seed = seed;
  spec.train.objective.seed = seed;
  spec.name = std::string(to_string(model)) + "_mu" + format_mu(mu) + "_s" + std::to_string(seed);
  spec.output_dir = sweep.base.output_dir / spec.name;
  if (model == ModelKind::classifier) spec.train.eta_units = EtaUnits::raw;

  SweepCell cell;
  cell.model = model;
  cell.mu = mu;
  cell.seed = seed;
  cell.n_snr2 = snr_quantities(spec.synthetic).n_snr2;
  cell.ratio = kNaN;
  cell.test_accuracy = kNaN;
  try {
    const ExperimentData data = prepare_data(spec);
    const ExperimentResult result = run_experiment(spec, data);
    write_outputs(spec, data, result);
    cell.ratio = result.final_metrics().ratio;
    cell.test_accuracy = result.test_accuracy;
    cell.phase = to_string(result.phase);
    cell.status = result.stop_reason == StopReason::nonfinite ? "nonfinite" : "ok";
  } catch (const std::exception& e) {
    cell.status = "failed: " + csv_safe(e.what());
  }
  return cell;
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepSpec& sweep, std::ostream& log) {
  sweep.validate();
  struct Job {
    ModelKind model;
    double mu;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (ModelKind model : sweep.models)
    for (double mu : sweep.mu_values)
      for (std::uint64_t seed : sweep.seeds) jobs.push_back({model, mu, seed});

  std::vector<SweepCell> cells(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      cells[i] = run_cell(sweep, jobs[i].model, jobs[i].mu, jobs[i].seed);
      std::lock_guard lock(log_mutex);
      const SweepCell& c = cells[i];
      log << "  " << to_string(c.model) << " mu=" << c.mu << " seed=" << c.seed << " n*SNR^2=" << c.n_snr2
          << " ratio=" << c.ratio << " phase=" << c.phase << " [" << c.status << "]\n";
    }
  };
  const int threads = std::max(1, std::min<int>(sweep.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  const auto& dir = sweep.base.output_dir;
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "ratio_vs_nsnr2.csv");
    out << "model,mu,seed,n_snr2,ratio,phase,test_accuracy,status\n";
    for (const auto& c : cells)
      out << to_string(c.model) << ',' << c.mu << ',' << c.seed << ',' << c.n_snr2 << ',' << c.ratio << ','
          << c.phase << ',' << c.test_accuracy << ',' << c.status << '\n';
  }
  {
    // mean ratio over seeds per (model, mu)
    std::map<std::pair<int, double>, std::pair<double, int>> acc;
    for (const auto& c : cells) {
      if (c.status != "ok" || !std::isfinite(c.ratio)) continue;
      auto& slot = acc[{static_cast<int>(c.model), c.n_snr2}];
      slot.first += c.ratio;
      slot.second += 1;
    }
    std::vector<Series> series;
    for (ModelKind model : sweep.models) {
      Series s{std::string(to_string(model)), {}, {}};
      for (const auto& [key, sum] : acc) {
        if (key.first != static_cast<int>(model)) continue;
        s.x.push_back(key.second);
        s.y.push_back(sum.first / sum.second);
      }
      series.push_back(std::move(s));
    }
    Series ref{"y = n*SNR^2", {}, {}};
    for (const auto& c : cells) {
      ref.x.push_back(c.n_snr2);
      ref.y.push_back(c.n_snr2);
    }
    std::vector<std::size_t> order(ref.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ref.x[a] < ref.x[b]; });
    Series sorted{ref.name, {}, {}};
    for (std::size_t i : order) sorted.x.push_back(ref.x[i]), sorted.y.push_back(ref.y[i]);
    series.push_back(std::move(sorted));
    ChartOptions opts;
    opts.title = "signal / noise learning ratio";
    opts.x_label = "n * SNR^2";
    opts.y_label = "mean_signal / mean_noise";
    opts.log_y = true;
    auto out = open_out(dir / "ratio_vs_nsnr2.svg");
    write_line_chart(out, series, opts);
  }
  return cells;
}

int cmd_sweep(const std::filesystem::path& sweep_file, std::optional<int> jobs, std::ostream& out,
              std::ostream& err) {
  SweepSpec sweep;
  try {
    sweep = load_sweep(sweep_file);
    if (jobs) sweep.jobs = *jobs;
    sweep.validate();
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  out << "sweep " << sweep.base.name << ": " << sweep.models.size() * sweep.mu_values.size() * sweep.seeds.size()
      << " cells, " << sweep.jobs << " job(s)\n";
  const auto cells = run_sweep(sweep, out);
  out << "aggregate in " << (sweep.base.output_dir / "ratio_vs_nsnr2.csv").string() << '\n';
  bool nonfinite = false, failed = false;
  for (const auto& c : cells) {
    nonfinite |= c.status == "nonfinite";
    failed |= c.status != "ok" && c.status != "nonfinite";
  }
  if (failed) {
    err << "some sweep cells failed, see ratio_vs_nsnr2.csv\n";
    return kExitCheckFailed;
  }
  if (nonfinite) {
    err << "some sweep cells diverged\n";
    return kExitNumeric;
  }
  return kExitOk;
}

namespace {

struct SmallInstance {
  Dataset data;
  NoiseSchedule sched;
  ClassifierParams cls;
  DenoiserParams den;
  std::string label;
};

SmallInstance random_instance(Rng& rng, int index) {
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)) % (hi - lo + 1); };
  SyntheticConfig cfg;
  cfg.d = pick(3, 30);
  cfg.n = pick(1, 8);
  cfg.mu_norm = 0.5 + 2.5 * rng.uniform();
  cfg.sigma_xi = (0.2 + 1.3 * rng.uniform()) / std::sqrt(static_cast<double>(cfg.d));
  cfg.seed = rng();
  const int m = pick(1, 4);
  const double t = 0.05 + 1.95 * rng.uniform();
  // weights of order one per neuron so every term of the objectives matters
  const InitConfig init{(0.3 + 0.7 * rng.uniform()) / std::sqrt(static_cast<double>(cfg.d)), rng()};
  SmallInstance inst{generate_dataset(cfg), make_schedule(t), init_classifier(m, cfg.d, init),
                     init_denoiser(m, cfg.d, init), ""};
  std::ostringstream label;
  label << "#" << index << " d=" << cfg.d << " n=" << cfg.n << " m=" << m << " t=" << t;
  inst.label = label.str();
  return inst;
}

double worst_of(const std::vector<GradcheckEntry>& entries, GradcheckEntry* where) {
  double worst = 0.0;
  for (const auto& e : entries) {
    if (!(e.rel_err <= worst)) {  // NaN counts as worst
      worst = std::isnan(e.rel_err) ? std::numeric_limits<double>::infinity() : e.rel_err;
      if (where) *where = e;
    }
  }
  return worst;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  if (options.instances < 0 || options.mc_instances < 0) throw ConfigError("instance counts must be >= 0");
  if (options.mc_draws < 2) throw ConfigError("mc_draws must be >= 2");
  const auto start = std::chrono::steady_clock::now();
  const DiffusionGradFn grad_fn = options.diffusion_grad ? options.diffusion_grad : DiffusionGradFn(ddpm_expected_grad);
  GradcheckReport report;
  std::vector<GradcheckEntry> all;
  Rng rng = make_stream(options.seed, StreamId::labels);

  for (int k = 0; k < options.instances; ++k) {
    const SmallInstance inst = random_instance(rng, k);
    const Dataset& data = inst.data;
    const NoiseSchedule& sched = inst.sched;

    const ClassifierParams fd_c = finite_diff_grad<ClassifierParams>(
        [&](const ClassifierParams& p) { return classification_loss(p, data); }, inst.cls);
    auto entries_c = compare_gradients(classification_loss_grad(inst.cls, data).grad, fd_c, "classifier " + inst.label);
    GradcheckEntry worst_c;
    const double wc = worst_of(entries_c, &worst_c);
    report.worst_classifier = std::max(report.worst_classifier, wc);
    if (!(wc <= options.fd_tol)) report.worst.push_back(worst_c);

    const DenoiserParams fd_d = finite_diff_grad<DenoiserParams>(
        [&](const DenoiserParams& p) { return ddpm_expected_loss(p, data, sched); }, inst.den);
    auto entries_d = compare_gradients(grad_fn(inst.den, data, sched), fd_d, "diffusion " + inst.label);
    GradcheckEntry worst_d;
    const double wd = worst_of(entries_d, &worst_d);
    report.worst_diffusion = std::max(report.worst_diffusion, wd);
    if (!(wd <= options.fd_tol)) report.worst.push_back(worst_d);

    if (!options.csv.empty()) {
      all.insert(all.end(), entries_c.begin(), entries_c.end());
      all.insert(all.end(), entries_d.begin(), entries_d.end());
    }
  }

  bool mc_ok = true;
  for (int k = 0; k < options.mc_instances; ++k) {
    const SmallInstance inst = random_instance(rng, options.instances + k);
    Rng draws = make_stream(options.seed + static_cast<std::uint64_t>(k), StreamId::diffusion_noise);
    const McEstimate mc = ddpm_mc_loss(inst.den, inst.data, inst.sched, options.mc_draws, draws);
    const double exact = ddpm_expected_loss(inst.den, inst.data, inst.sched);
    const double z = std::abs(exact - mc.estimate) / mc.std_err;
    report.worst_mc_sigmas = std::max(report.worst_mc_sigmas, z);
    const GradcheckEntry e{"mc " + inst.label, "loss", exact, mc.estimate, z};
    if (!(z <= options.mc_sigmas)) {
      mc_ok = false;
      report.worst.push_back(e);
    }
    if (!options.csv.empty()) all.push_back(e);
  }

  if (!options.csv.empty()) {
    if (options.csv.has_parent_path()) std::filesystem::create_directories(options.csv.parent_path());
    auto out = open_out(options.csv);
    write_gradcheck_csv(out, all);
  }
  report.passed = report.worst_classifier <= options.fd_tol && report.worst_diffusion <= options.fd_tol && mc_ok;
  report.seconds = seconds_since(start);
  return report;
}

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err) {
  GradcheckReport report;
  try {
    report = run_gradcheck(options);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  out << "gradcheck: " << options.instances << " FD instances, " << options.mc_instances << " MC instances, "
      << report.seconds << " s\n"
      << "  classifier worst rel err " << report.worst_classifier << " (tol " << options.fd_tol << ")\n"
      << "  diffusion  worst rel err " << report.worst_diffusion << " (tol " << options.fd_tol << ")\n"
      << "  closed form vs MC worst  " << report.worst_mc_sigmas << " std errs (tol " << options.mc_sigmas << ")\n";
  if (!options.csv.empty()) out << "  report: " << options.csv.string() << '\n';
  if (report.passed) {
    out << "PASS\n";
    return kExitOk;
  }
  err << "FAIL; worst coordinates:\n";
  std::vector<GradcheckEntry> worst = report.worst;
  std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) { return a.rel_err > b.rel_err; });
  if (worst.size() > 10) worst.resize(10);
  for (const auto& e : worst)
    err << "  " << e.instance << " coord " << e.coordinate << " analytic=" << e.analytic << " reference=" << e.fd
        << " err=" << e.rel_err << '\n';
  return kExitCheckFailed;
}

int emit_plot(const std::filesystem::path& csv, const std::vector<std::string>& columns,
              const std::filesystem::path& out_file, bool log_x, std::ostream& err) {
  CsvTable table;
  try {
    std::ifstream in(csv);
    if (!in) {
      err << "cannot open " << csv.string() << '\n';
      return kExitConfig;
    }
    table = read_csv(in);
  } catch (const FormatError& e) {
    err << csv.string() << ": " << e.what() << '\n';
    return kExitConfig;
  }
  if (table.rows.empty()) {
    err << csv.string() << ": no data rows\n";
    return kExitConfig;
  }
  if (columns.empty()) {
    err << "no columns requested\n";
    return kExitConfig;
  }
  const std::string x_name = table.index_of("iter") ? "iter" : table.columns.front();
  std::vector<Series> series;
  for (const auto& name : columns) {
    if (!table.index_of(name)) {
      err << csv.string() << ": no column '" << name << "'\n";
      return kExitConfig;
    }
    series.push_back({name, table.column(x_name), table.column(name)});
  }
  ChartOptions opts;
  opts.title = csv.filename().string();
  opts.x_label = x_name;
  opts.log_x = log_x;
  try {
    if (out_file.has_parent_path()) std::filesystem::create_directories(out_file.parent_path());
    auto out = open_out(out_file);
    write_line_chart(out, series, opts);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace featdyn
