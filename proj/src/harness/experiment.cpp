// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pnf/checkpoint.hpp"
#include "pnf/error.hpp"
#include "pnf/harness/baselines.hpp"
#include "pnf/harness/metrics.hpp"
#include "pnf/harness/sample_io.hpp"
#include "pnf/noisy_tabular.hpp"

namespace pnf::harness {
namespace {

using Clock = std::chrono::steady_clock;
using Signals = std::vector<std::vector<double>>;

constexpr std::uint64_t kInitTag = 0x696e6974;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_optional(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return "";
  std::ostringstream s;
  s << std::setprecision(10) << *v;
  return s.str();
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  if (!out) throw IoError("short write to " + path.string());
}

std::string echo_config(const ExperimentConfig& config) {
  auto doc = to_json(config);
  const std::string hash = hash_hex(config_hash(doc));
  doc["config_hash"] = hash;
  ensure_out_dir(config.out);
  write_file(config.out / "config.json", [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
  return hash;
}

nlohmann::json grid_json(const GridConfig& g) {
  return {{"d", g.d}, {"companding", g.mu_law ? "mu_law" : "linear"}, {"lo", g.lo},
          {"hi", g.hi}, {"mu", g.mu}};
}

SourceConfig heldout_source(const SourceConfig& s, std::size_t count) {
  SourceConfig h = s;
  h.count = count;
  h.seed = s.seed + 0x9e3779b97f4a7c15ULL;
  return h;
}

// Ground-truth signals for conditional tasks: `runs` signals of length n.
Signals truth_signals(const SourceConfig& source, const ExperimentConfig& config,
                      const DiscretizationGrid& grid) {
  SourceConfig s = source;
  s.count = config.runs;
  s.length = config.n;
  return synthetic_signals(s, grid);
}

TabularMarkovModel fit_tabular(const DiscretizationGrid& grid, std::size_t order, double pseudocount,
                               const Corpus& corpus) {
  if (!(pseudocount >= 0.0)) throw ConfigError("model.pseudocount must be non-negative");
  // The uniform model provides the row indexing for this order.
  const auto shape = TabularMarkovModel::uniform(grid, order);
  const std::size_t d = grid.size();
  std::vector<double> counts(shape.rows() * d, pseudocount);
  for (const auto& seq : corpus) {
    std::size_t row = shape.initial_row();
    for (auto b : seq) {
      counts[row * d + b] += 1.0;
      row = shape.next_row(row, b);
    }
  }
  for (std::size_t r = 0; r < shape.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) sum += counts[r * d + k];
    for (std::size_t k = 0; k < d; ++k) {
      counts[r * d + k] = sum > 0.0 ? counts[r * d + k] / sum : 1.0 / static_cast<double>(d);
    }
  }
  return TabularMarkovModel(grid, order, std::move(counts));
}

std::vector<std::unique_ptr<ConditionalModel>> load_models(const ExperimentConfig& config) {
  std::vector<std::unique_ptr<ConditionalModel>> models;
  for (const auto& p : config.model_paths) models.push_back(load_model(p));
  return models;
}

std::vector<NoisyModelStack> open_stacks(const ExperimentConfig& config, std::size_t expected) {
  if (config.stack_paths.size() != expected) {
    throw ConfigError("task " + std::string(task_name(config.task)) + " needs " +
                      std::to_string(expected) + " stack path(s)");
  }
  std::vector<NoisyModelStack> stacks;
  for (const auto& p : config.stack_paths) stacks.push_back(NoisyModelStack::open(p));
  return stacks;
}

std::optional<double> base_ll(const std::vector<std::unique_ptr<ConditionalModel>>& base,
                              std::span<const double> x, std::size_t n) {
  if (base.empty()) return std::nullopt;
  double total = 0.0;
  for (std::size_t s = 0; s < base.size(); ++s) {
    const std::vector<std::vector<double>> one{std::vector<double>(x.begin() + s * n,
                                                                   x.begin() + (s + 1) * n)};
    total += eval_ll(*base[s], one).median;
  }
  return total;
}

MeasurementModel task_measurement(const ExperimentConfig& config, std::size_t sources) {
  const auto& m = config.measurement;
  const auto expect = [&](const char* kind) {
    if (!m.kind.empty() && m.kind != kind) {
      throw ConfigError(std::string("task ") + task_name(config.task) + " needs a " + kind +
                        " measurement");
    }
  };
  std::optional<MeasurementModel> mm;
  try {
    switch (config.task) {
      case Task::separate:
        expect("mix");
        if (m.weights.size() != sources) {
          throw ConfigError("measurement.weights needs one weight per stack");
        }
        mm = MeasurementModel::mix(m.weights, config.n);
        break;
      case Task::superres:
        expect("decimate");
        mm = MeasurementModel::decimate(m.ratio, config.n);
        break;
      case Task::inpaint: {
        expect("mask");
        std::vector<std::uint8_t> observed;
        if (!m.mask_file.empty()) {
          observed = read_mask_file(m.mask_file);
          if (observed.size() != config.n) throw ConfigError("mask file length differs from n");
        } else {
          if (!(m.gap >= 0.0 && m.gap < 1.0)) throw ConfigError("measurement.gap must lie in [0, 1)");
          observed.assign(config.n, 1);
          const auto missing = static_cast<std::size_t>(std::floor(m.gap * static_cast<double>(config.n)));
          const std::size_t start = (config.n - missing) / 2;
          for (std::size_t i = start; i < start + missing; ++i) observed[i] = 0;
        }
        mm = MeasurementModel::mask(std::move(observed));
        break;
      }
      default:
        throw ConfigError("task has no measurement");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("measurement: ") + e.what());
  }
  if (m.isotropic) mm->set_covariance(MeasurementModel::Covariance::isotropic);
  return std::move(*mm);
}

PnfProblem make_problem(const std::vector<NoisyModelStack>& stacks, const MeasurementModel* mm,
                        std::span<const double> y, std::size_t n) {
  PnfProblem p;
  for (const auto& s : stacks) p.stacks.push_back(&s);
  p.measurement = mm;
  p.y = y;
  p.n = n;
  return p;
}

std::vector<double> sample_once(const PnfProblem& problem, const NoiseSchedule& schedule,
                                const ExperimentConfig& config, std::uint64_t seed,
                                StochasticStats* stats) {
  Rng rng = make_rng(config.seed, {seed});
  if (config.task == Task::sample_stochastic) {
    return run_stochastic_pnf(problem, schedule,
                              {config.block.c, config.block.workers, config.block.mode}, rng,
                              stats);
  }
  return run_pnf(problem, schedule, rng);
}

nlohmann::json sample_meta(const ExperimentConfig& config, const std::string& hash) {
  return {{"task", task_name(config.task)},
          {"seed", config.seed},
          {"grid", grid_json(config.grid)},
          {"config_hash", hash}};
}

// ------------------------------------------------------------------ tasks

void task_train(const ExperimentConfig& config, MetricReport& report) {
  const auto t0 = Clock::now();
  TrainReport tr;
  const auto model = train_base_model(config, &tr);
  save_model(config.out / "model.pnfm", *model);
  MetricRecord r;
  r.seed = config.seed;
  r.task = task_name(config.task);
  r.wall_ms = ms_since(t0);
  // Mean per-position held-out log-likelihood (nats), when a held-out set exists.
  if (config.heldout > 0) r.log_likelihood = -tr.final_heldout;
  report.records.push_back(r);
  write_file(config.out / "train_loss.csv", [&](std::ostream& out) {
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < tr.epoch_loss.size(); ++e) {
      out << e << ',' << std::setprecision(10) << tr.epoch_loss[e] << '\n';
    }
  });
}

void task_finetune(const ExperimentConfig& config, MetricReport& report) {
  if (config.model_paths.size() != 1) throw ConfigError("finetune needs exactly one model_path");
  const auto base = load_model(config.model_paths.front());
  const auto schedule = config.schedule.build();
  const auto t0 = Clock::now();
  const auto stack = build_stack(*base, config);
  save_stack(config.out / "stack.pnfs", stack.sigmas(),
             [&](std::size_t level) { return stack.load(level); });
  MetricRecord r;
  r.seed = config.seed;
  r.task = task_name(config.task);
  r.levels = schedule.levels();
  r.wall_ms = ms_since(t0);
  report.records.push_back(r);
}

void task_sample(const ExperimentConfig& config, const std::string& hash, MetricReport& report) {
  const auto stacks = open_stacks(config, 1);
  const auto schedule = config.schedule.build();
  const auto problem = make_problem(stacks, nullptr, {}, config.n);
  problem.validate(schedule);
  const auto base = load_models(config);
  if (config.task == Task::sample_stochastic && config.block.mode == BlockMode::async &&
      !sparse_updates(config.n, config.block.c, config.block.workers)) {
    report.warnings.push_back("workers > n / (4c): asynchronous writes will collide often");
  }

  Signals samples;
  std::ofstream stoch;
  if (config.task == Task::sample_stochastic) {
    stoch.open(config.out / "stochastic.csv", std::ios::trunc);
    if (!stoch) throw IoError("cannot write stochastic.csv");
    stoch << "seed,workers,c,overwrite_fraction,concurrent_write_fraction\n";
  }
  for (std::size_t run = 0; run < config.runs; ++run) {
    const auto t0 = Clock::now();
    StochasticStats stats;
    auto x = sample_once(problem, schedule, config, run, &stats);
    MetricRecord r;
    r.seed = run;
    r.task = task_name(config.task);
    r.steps = schedule.steps_per_level;
    r.levels = schedule.levels();
    r.wall_ms = ms_since(t0);
    r.log_likelihood = base_ll(base, x, config.n);
    report.records.push_back(r);
    if (stoch.is_open()) {
      stoch << run << ',' << config.block.workers << ',' << config.block.c << ','
            << stats.overwrite_fraction() << ',' << stats.concurrent_write_fraction() << '\n';
    }
    samples.push_back(std::move(x));
  }
  write_samples(config.out / "samples.f32", samples, sample_meta(config, hash));
}

void task_conditional(const ExperimentConfig& config, const std::string& hash,
                      MetricReport& report) {
  const bool separate = config.task == Task::separate;
  const std::size_t sources = separate ? config.stack_paths.size() : 1;
  if (separate && sources < 2) throw ConfigError("separate needs at least two stack paths");
  const auto stacks = open_stacks(config, sources);
  const auto schedule = config.schedule.build();
  const auto mm = task_measurement(config, sources);
  {
    // Validate against a placeholder observation before generating data.
    const std::vector<double> y0(mm.n_out(), 0.0);
    make_problem(stacks, &mm, y0, config.n).validate(schedule);
  }
  const auto base = load_models(config);
  if (!base.empty() && base.size() != sources) {
    throw ConfigError("model_path needs one base model per source");
  }

  const auto grid = config.grid.build();
  for (const auto& s : stacks) {
    if (!(s.grid() == grid)) throw ConfigError("stack grid differs from the configured grid");
  }
  std::vector<Signals> truth;
  if (separate) {
    if (config.sources.size() != sources) throw ConfigError("separate needs one source per stack");
    for (const auto& s : config.sources) truth.push_back(truth_signals(s, config, grid));
  } else {
    truth.push_back(truth_signals(config.source, config, grid));
  }

  const double peak = grid.hi() - grid.lo();
  Signals estimates;
  for (std::size_t run = 0; run < config.runs; ++run) {
    std::vector<double> x_true;
    for (const auto& t : truth) x_true.insert(x_true.end(), t[run].begin(), t[run].end());
    const auto y = mm.apply(x_true);
    const auto problem = make_problem(stacks, &mm, y, config.n);

    const auto t0 = Clock::now();
    Rng rng = make_rng(config.seed, {run});
    const auto x = run_pnf(problem, schedule, rng);
    const auto estimate = grid.snap(x);

    MetricRecord r;
    r.seed = run;
    r.task = task_name(config.task);
    r.steps = schedule.steps_per_level;
    r.levels = schedule.levels();
    r.wall_ms = ms_since(t0);
    r.log_likelihood = base_ll(base, x, config.n);
    r.constraint_residual = constraint_residual(mm, x, y);
    if (separate) {
      // SI-SDR is undefined for a silent source; average over the others.
      double pnf_sum = 0.0, mix_sum = 0.0;
      std::size_t scored = 0;
      for (std::size_t s = 0; s < sources; ++s) {
        const auto& t = truth[s][run];
        if (std::all_of(t.begin(), t.end(), [](double v) { return v == 0.0; })) {
          report.warnings.push_back("run " + std::to_string(run) + ": source " + std::to_string(s) +
                                    " is silent and is left out of SI-SDR");
          continue;
        }
        const std::span<const double> est(estimate.data() + s * config.n, config.n);
        pnf_sum += si_sdr(est, t);
        mix_sum += si_sdr(y, t);
        ++scored;
      }
      const double none = std::numeric_limits<double>::quiet_NaN();
      r.si_sdr = scored > 0 ? pnf_sum / static_cast<double>(scored) : none;
      report.baselines.push_back({run, "mixture", scored > 0 ? mix_sum / static_cast<double>(scored) : none, {}});
    } else {
      r.psnr = psnr(estimate, truth[0][run], peak);
      for (auto method : {Interpolation::cubic_spline, Interpolation::linear}) {
        const auto b = interpolation_baseline(mm, y, method);
        report.baselines.push_back({run, interpolation_name(method), {}, psnr(b, truth[0][run], peak)});
      }
    }
    report.records.push_back(r);
    estimates.push_back(x);
  }
  write_samples(config.out / "estimates.f32", estimates, sample_meta(config, hash));
  Signals flat_truth;
  for (std::size_t run = 0; run < config.runs; ++run) {
    std::vector<double> t;
    for (const auto& src : truth) t.insert(t.end(), src[run].begin(), src[run].end());
    flat_truth.push_back(std::move(t));
  }
  write_samples(config.out / "truth.f32", flat_truth, sample_meta(config, hash));
}

void task_eval_ll(const ExperimentConfig& config, MetricReport& report) {
  if (config.model_paths.size() != 1) throw ConfigError("eval-ll needs exactly one model_path");
  if (config.samples.empty()) throw ConfigError("eval-ll needs a samples file");
  const auto base = load_model(config.model_paths.front());
  const auto set = read_samples(config.samples);
  const auto t0 = Clock::now();
  const auto ll = eval_ll(*base, set.sequences);
  const double ms = ms_since(t0);
  for (std::size_t i = 0; i < ll.per_sample.size(); ++i) {
    MetricRecord r;
    r.seed = i;
    r.task = task_name(config.task);
    r.wall_ms = ms / static_cast<double>(ll.per_sample.size());
    r.log_likelihood = ll.per_sample[i];
    report.records.push_back(r);
  }
}

void task_bench(const ExperimentConfig& config, MetricReport& report) {
  const auto stacks = open_stacks(config, 1);
  const auto schedule = config.schedule.build();
  const auto problem = make_problem(stacks, nullptr, {}, config.n);
  problem.validate(schedule);
  if (config.bench_workers.empty()) throw ConfigError("bench_workers must not be empty");
  const auto base = load_models(config);
  for (std::size_t w : config.bench_workers) {
    if (config.block.mode == BlockMode::async && !sparse_updates(config.n, config.block.c, w)) {
      report.warnings.push_back("workers=" + std::to_string(w) +
                                " exceeds n / (4c): expect frequent overwrites");
    }
  }
  const auto evaluate = [&](std::span<const double> x) {
    const auto ll = base_ll(base, x, config.n);
    return ll ? *ll : std::nan("");
  };
  report.bench = throughput_bench(problem, schedule, config.block.c, config.block.mode,
                                  config.bench_workers, config.seed, evaluate);
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricReport& report) {
  out << "seed,task,T,L,wall_ms,log_likelihood,si_sdr,psnr,constraint_residual,config_hash\n";
  for (const auto& r : report.records) {
    out << r.seed << ',' << r.task << ',' << r.steps << ',' << r.levels << ','
        << format_optional(r.wall_ms) << ',' << format_optional(r.log_likelihood) << ','
        << format_optional(r.si_sdr) << ',' << format_optional(r.psnr) << ','
        << format_optional(r.constraint_residual) << ',' << report.config_hash << '\n';
  }
}

void write_baselines_csv(std::ostream& out, const MetricReport& report) {
  out << "seed,method,si_sdr,psnr,config_hash\n";
  for (const auto& b : report.baselines) {
    out << b.seed << ',' << b.method << ',' << format_optional(b.si_sdr) << ','
        << format_optional(b.psnr) << ',' << report.config_hash << '\n';
  }
}

void write_bench_csv(std::ostream& out, const MetricReport& report) {
  out << "workers,n,c,level,wall_ms,overwrite_fraction,final_ll\n";
  for (const auto& b : report.bench) {
    out << b.workers << ',' << b.n << ',' << b.c << ',' << b.level << ','
        << format_optional(b.wall_ms) << ',' << format_optional(b.overwrite_fraction) << ','
        << format_optional(b.final_ll) << '\n';
  }
}

std::unique_ptr<ConditionalModel> train_base_model(const ExperimentConfig& config,
                                                   TrainReport* report) {
  const auto grid = config.grid.build();
  const auto corpus = synthetic_corpus(config.source, grid);
  Corpus heldout;
  if (config.heldout > 0) heldout = synthetic_corpus(heldout_source(config.source, config.heldout), grid);

  if (config.model.kind == "tabular") {
    if (config.model.order == 0 || config.model.order > TabularMarkovModel::kMaxOrder) {
      throw ConfigError("model.order must lie in [1, " +
                        std::to_string(TabularMarkovModel::kMaxOrder) + "]");
    }
    auto tab = std::make_unique<TabularMarkovModel>(
        fit_tabular(grid, config.model.order, config.model.pseudocount, corpus));
    if (report != nullptr) {
      *report = {};
      if (!heldout.empty()) report->final_heldout = mean_cross_entropy(*tab, heldout, 0.0);
    }
    return tab;
  }
  auto net = std::make_unique<CausalConvNet>(grid, config.model.network);
  Rng rng = make_rng(config.seed, {kInitTag});
  net->initialize(rng);
  auto tr = train(*net, corpus, heldout, config.training);
  if (report != nullptr) *report = std::move(tr);
  return net;
}

NoisyModelStack build_stack(const ConditionalModel& base, const ExperimentConfig& config) {
  const auto schedule = config.schedule.build();
  std::vector<NoisyModelStack::Model> models;
  if (const auto* tab = dynamic_cast<const TabularMarkovModel*>(&base)) {
    for (double sigma : schedule.sigmas) {
      models.push_back(std::make_shared<ExactNoisyMarkovModel>(*tab, sigma, config.model.exact_window));
    }
    return NoisyModelStack::in_memory(schedule.sigmas, std::move(models));
  }
  const auto* net = dynamic_cast<const CausalConvNet*>(&base);
  if (net == nullptr) throw ConfigError("base model must be tabular or a convolutional network");
  const auto grid = net->grid();
  const auto corpus = synthetic_corpus(config.source, grid);
  Corpus heldout;
  if (config.heldout > 0) heldout = synthetic_corpus(heldout_source(config.source, config.heldout), grid);
  for (std::size_t level = 0; level < schedule.levels(); ++level) {
    auto copy = std::make_shared<CausalConvNet>(*net);
    TrainConfig tc = config.finetune;
    tc.seed = config.seed + level;
    finetune_noisy(*copy, schedule.sigmas[level], corpus, heldout, tc);
    models.push_back(std::move(copy));
  }
  return NoisyModelStack::in_memory(schedule.sigmas, std::move(models));
}

MetricReport run_experiment(const ExperimentConfig& config) {
  MetricReport report;
  // Cheap structural checks come first so a bad config fails before any compute.
  config.grid.build();
  if (config.task != Task::train && config.task != Task::eval_ll) config.schedule.build();
  report.config_hash = echo_config(config);

  switch (config.task) {
    case Task::train:
      task_train(config, report);
      break;
    case Task::finetune:
      task_finetune(config, report);
      break;
    case Task::sample:
    case Task::sample_stochastic:
      task_sample(config, report.config_hash, report);
      break;
    case Task::separate:
    case Task::superres:
    case Task::inpaint:
      task_conditional(config, report.config_hash, report);
      break;
    case Task::eval_ll:
      task_eval_ll(config, report);
      break;
    case Task::bench:
      task_bench(config, report);
      break;
  }

  write_file(config.out / "metrics.csv", [&](std::ostream& out) { write_metrics_csv(out, report); });
  if (!report.baselines.empty()) {
    write_file(config.out / "baselines.csv",
               [&](std::ostream& out) { write_baselines_csv(out, report); });
  }
  if (!report.bench.empty()) {
    write_file(config.out / "bench.csv", [&](std::ostream& out) { write_bench_csv(out, report); });
  }
  return report;
}

int exit_code(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const InvalidArgument*>(&e) != nullptr) return 2;
  if (dynamic_cast<const DivergenceError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 4;
  return 1;
}

}  // namespace pnf::harness
