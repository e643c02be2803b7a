// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "pnf/error.hpp"

namespace pnf::harness {
namespace {

using nlohmann::json;

constexpr std::pair<Task, const char*> kTasks[] = {
    {Task::train, "train"},       {Task::finetune, "finetune"},
    {Task::sample, "sample"},     {Task::sample_stochastic, "sample-stochastic"},
    {Task::separate, "separate"}, {Task::superres, "superres"},
    {Task::inpaint, "inpaint"},   {Task::eval_ll, "eval-ll"},
    {Task::bench, "bench"},
};

// Reads the keys of one JSON object and complains about the rest.
class Section {
 public:
  Section(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + " has the wrong type");
    }
  }

  void get_path(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  // A single path or an array of paths.
  void get_paths(const char* key, std::vector<std::filesystem::path>& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    out.clear();
    if (it->is_string()) {
      out.emplace_back(it->get<std::string>());
      return;
    }
    if (!it->is_array()) throw ConfigError(where_ + "." + key + " must be a path or a list of paths");
    for (const auto& v : *it) {
      if (!v.is_string()) throw ConfigError(where_ + "." + key + " must contain strings");
      out.emplace_back(v.get<std::string>());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key " + where_ + "." + key);
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_source(const json& j, const std::string& where, SourceConfig& s) {
  Section sec(j, where);
  std::string kind = source_kind_name(s.kind);
  sec.get("kind", kind);
  s.kind = parse_source_kind(kind);
  sec.get("count", s.count);
  sec.get("length", s.length);
  sec.get("seed", s.seed);
  sec.get_path("table", s.table);
  sec.get("rho", s.rho);
  sec.get("spread", s.spread);
  sec.get("components", s.components);
  sec.get("f_lo", s.f_lo);
  sec.get("cutoff", s.cutoff);
  sec.get("amplitude", s.amplitude);
  sec.get("burst_prob", s.burst_prob);
  sec.get("burst_scale", s.burst_scale);
  sec.get("ar", s.ar);
  sec.get("background", s.background);
  sec.finish();
}

json source_json(const SourceConfig& s) {
  return {{"kind", source_kind_name(s.kind)},
          {"count", s.count},
          {"length", s.length},
          {"seed", s.seed},
          {"table", s.table.string()},
          {"rho", s.rho},
          {"spread", s.spread},
          {"components", s.components},
          {"f_lo", s.f_lo},
          {"cutoff", s.cutoff},
          {"amplitude", s.amplitude},
          {"burst_prob", s.burst_prob},
          {"burst_scale", s.burst_scale},
          {"ar", s.ar},
          {"background", s.background}};
}

void read_training(const json& j, const std::string& where, TrainConfig& t) {
  Section sec(j, where);
  sec.get("epochs", t.epochs);
  sec.get("learning_rate", t.learning_rate);
  sec.get("batch_size", t.batch_size);
  sec.get("segment_length", t.segment_length);
  sec.get("clip_norm", t.clip_norm);
  sec.finish();
}

json training_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"batch_size", t.batch_size},
          {"segment_length", t.segment_length},
          {"clip_norm", t.clip_norm}};
}

std::vector<std::string> path_strings(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

}  // namespace

const char* task_name(Task task) noexcept {
  for (const auto& [t, name] : kTasks) {
    if (t == task) return name;
  }
  return "?";
}

Task parse_task(const std::string& name) {
  for (const auto& [t, n] : kTasks) {
    if (name == n) return t;
  }
  throw ConfigError("unknown task '" + name + "'");
}

DiscretizationGrid GridConfig::build() const {
  try {
    return mu_law ? DiscretizationGrid::mu_law(d, mu) : DiscretizationGrid::linear(d, lo, hi);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

NoiseSchedule ScheduleConfig::build() const {
  try {
    return make_schedule(sigma1, sigmaL, levels, delta, steps);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section top(doc, "config");
  std::string task;
  top.get("task", task);
  if (task.empty()) throw ConfigError("config.task is required");
  c.task = parse_task(task);
  top.get("seed", c.seed);
  top.get("runs", c.runs);
  top.get("n", c.n);
  top.get_path("out", c.out);
  top.get("heldout", c.heldout);
  top.get_paths("model_path", c.model_paths);
  top.get_paths("stack", c.stack_paths);
  top.get_path("samples", c.samples);
  top.get("bench_workers", c.bench_workers);

  if (const auto* g = top.child("grid")) {
    Section sec(*g, "config.grid");
    std::string companding = c.grid.mu_law ? "mu_law" : "linear";
    sec.get("d", c.grid.d);
    sec.get("companding", companding);
    sec.get("lo", c.grid.lo);
    sec.get("hi", c.grid.hi);
    sec.get("mu", c.grid.mu);
    sec.finish();
    if (companding != "linear" && companding != "mu_law") {
      throw ConfigError("config.grid.companding must be linear or mu_law");
    }
    c.grid.mu_law = companding == "mu_law";
  }
  if (const auto* s = top.child("source")) read_source(*s, "config.source", c.source);
  if (const auto* s = top.child("sources")) {
    if (!s->is_array()) throw ConfigError("config.sources must be a list");
    for (std::size_t i = 0; i < s->size(); ++i) {
      SourceConfig sc;
      read_source((*s)[i], "config.sources[" + std::to_string(i) + "]", sc);
      c.sources.push_back(sc);
    }
  }
  if (const auto* m = top.child("model")) {
    Section sec(*m, "config.model");
    sec.get("kind", c.model.kind);
    sec.get("channels", c.model.network.channels);
    sec.get("kernel", c.model.network.kernel);
    sec.get("dilations", c.model.network.dilations);
    sec.get("order", c.model.order);
    sec.get("pseudocount", c.model.pseudocount);
    sec.get("exact_window", c.model.exact_window);
    sec.finish();
    if (c.model.kind != "neural" && c.model.kind != "tabular") {
      throw ConfigError("config.model.kind must be neural or tabular");
    }
  }
  if (const auto* t = top.child("training")) read_training(*t, "config.training", c.training);
  if (const auto* t = top.child("finetune")) read_training(*t, "config.finetune", c.finetune);
  if (const auto* s = top.child("schedule")) {
    Section sec(*s, "config.schedule");
    sec.get("sigma1", c.schedule.sigma1);
    sec.get("sigmaL", c.schedule.sigmaL);
    sec.get("levels", c.schedule.levels);
    sec.get("delta", c.schedule.delta);
    sec.get("steps", c.schedule.steps);
    sec.finish();
  }
  if (const auto* m = top.child("measurement")) {
    Section sec(*m, "config.measurement");
    std::string covariance = c.measurement.isotropic ? "isotropic" : "gram";
    sec.get("kind", c.measurement.kind);
    sec.get("weights", c.measurement.weights);
    sec.get("ratio", c.measurement.ratio);
    sec.get_path("mask_file", c.measurement.mask_file);
    sec.get("gap", c.measurement.gap);
    sec.get("covariance", covariance);
    sec.finish();
    const auto& k = c.measurement.kind;
    if (!k.empty() && k != "mix" && k != "decimate" && k != "mask") {
      throw ConfigError("config.measurement.kind must be mix, decimate or mask");
    }
    if (covariance != "gram" && covariance != "isotropic") {
      throw ConfigError("config.measurement.covariance must be gram or isotropic");
    }
    c.measurement.isotropic = covariance == "isotropic";
  }
  if (const auto* b = top.child("block")) {
    Section sec(*b, "config.block");
    std::string mode = c.block.mode == BlockMode::sync ? "sync" : "async";
    sec.get("c", c.block.c);
    sec.get("workers", c.block.workers);
    sec.get("mode", mode);
    sec.finish();
    if (mode != "async" && mode != "sync") throw ConfigError("config.block.mode must be async or sync");
    c.block.mode = mode == "sync" ? BlockMode::sync : BlockMode::async;
  }
  top.finish();

  if (c.runs == 0) throw ConfigError("config.runs must be positive");
  if (c.n == 0) throw ConfigError("config.n must be positive");
  c.training.seed = c.seed;
  c.finetune.seed = c.seed;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["task"] = task_name(c.task);
  doc["seed"] = c.seed;
  doc["runs"] = c.runs;
  doc["n"] = c.n;
  doc["out"] = c.out.string();
  doc["heldout"] = c.heldout;
  doc["model_path"] = path_strings(c.model_paths);
  doc["stack"] = path_strings(c.stack_paths);
  doc["samples"] = c.samples.string();
  doc["bench_workers"] = c.bench_workers;
  doc["grid"] = {{"d", c.grid.d},
                 {"companding", c.grid.mu_law ? "mu_law" : "linear"},
                 {"lo", c.grid.lo},
                 {"hi", c.grid.hi},
                 {"mu", c.grid.mu}};
  doc["source"] = source_json(c.source);
  doc["sources"] = json::array();
  for (const auto& s : c.sources) doc["sources"].push_back(source_json(s));
  doc["model"] = {{"kind", c.model.kind},
                  {"channels", c.model.network.channels},
                  {"kernel", c.model.network.kernel},
                  {"dilations", c.model.network.dilations},
                  {"order", c.model.order},
                  {"pseudocount", c.model.pseudocount},
                  {"exact_window", c.model.exact_window}};
  doc["training"] = training_json(c.training);
  doc["finetune"] = training_json(c.finetune);
  doc["schedule"] = {{"sigma1", c.schedule.sigma1},
                     {"sigmaL", c.schedule.sigmaL},
                     {"levels", c.schedule.levels},
                     {"delta", c.schedule.delta},
                     {"steps", c.schedule.steps}};
  doc["measurement"] = {{"kind", c.measurement.kind},
                        {"weights", c.measurement.weights},
                        {"ratio", c.measurement.ratio},
                        {"mask_file", c.measurement.mask_file.string()},
                        {"gap", c.measurement.gap},
                        {"covariance", c.measurement.isotropic ? "isotropic" : "gram"}};
  doc["block"] = {{"c", c.block.c},
                  {"workers", c.block.workers},
                  {"mode", c.block.mode == BlockMode::sync ? "sync" : "async"}};
  return doc;
}

std::uint64_t config_hash(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace pnf::harness
