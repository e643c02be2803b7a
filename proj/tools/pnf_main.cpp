// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per experiment task.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pnf/error.hpp"
#include "pnf/harness/config.hpp"
#include "pnf/harness/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> threads;
};

int run(pnf::harness::Task task, const Overrides& o) {
  using namespace pnf::harness;
  try {
    auto config = load_config(o.config);
    config.task = task;
    if (o.seed) config.seed = *o.seed;
    if (o.out) config.out = *o.out;
    if (o.workers) {
      if (task != Task::sample_stochastic) {
        throw pnf::ConfigError("--workers applies only to sample-stochastic");
      }
      if (*o.workers == 0) throw pnf::ConfigError("--workers must be positive");
      config.block.workers = *o.workers;
    }
    if (o.threads) {
      if (*o.threads == 0) throw pnf::ConfigError("--threads-override must be positive");
      config.block.workers = *o.threads;
      config.bench_workers = {*o.threads};
    }
    const auto report = run_experiment(config);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << config.out.string() << " (config " << report.config_hash << ", "
              << report.records.size() << " record(s))\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using pnf::harness::Task;
  CLI::App app{"Parallel-and-flexible sampling over smoothed autoregressive models"};
  app.require_subcommand(1);

  Overrides o;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 0, threads = 0;
  std::optional<Task> chosen;

  const Task tasks[] = {Task::train,    Task::finetune, Task::sample,  Task::sample_stochastic,
                        Task::separate, Task::superres, Task::inpaint, Task::eval_ll,
                        Task::bench};
  for (Task t : tasks) {
    auto* sub = app.add_subcommand(pnf::harness::task_name(t));
    sub->add_option("--config", o.config, "JSON experiment config")->required();
    auto* s = sub->add_option("--seed", seed, "override the config seed");
    auto* d = sub->add_option("--out", out, "override the output directory");
    auto* th = sub->add_option("--threads-override", threads,
                               "force the worker count (block.workers and the bench sweep)");
    CLI::Option* w = nullptr;
    if (t == Task::sample_stochastic) w = sub->add_option("--workers", workers, "block sampler workers");
    sub->callback([&o, &chosen, &seed, &out, &workers, &threads, t, s, d, th, w] {
      chosen = t;
      if (s->count() > 0) o.seed = seed;
      if (d->count() > 0) o.out = out;
      if (th->count() > 0) o.threads = threads;
      if (w != nullptr && w->count() > 0) o.workers = workers;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return run(*chosen, o);
}
