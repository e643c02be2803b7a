// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "pnf/checkpoint.hpp"
#include "pnf/conv_net.hpp"
#include "pnf/error.hpp"
#include "pnf/noisy_tabular.hpp"
#include "pnf/stack.hpp"
#include "pnf/tabular.hpp"

using namespace pnf;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pnf_test_" + name);
}

}  // namespace

TEST_CASE("conv net checkpoint round trip") {
  CausalConvNet net(DiscretizationGrid::mu_law(16, 15.0), {6, 2, {1, 2, 4}});
  Rng rng = make_rng(1);
  std::normal_distribution<double> normal(0, 0.3);
  for (double& p : net.params()) p = static_cast<float>(normal(rng));  // exactly representable
  std::stringstream ss;
  save_model(ss, net);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "PNFM");
  const auto loaded = load_model(ss);
  const auto* back = dynamic_cast<const CausalConvNet*>(loaded.get());
  REQUIRE(back != nullptr);
  CHECK(back->grid() == net.grid());
  CHECK(back->window() == net.window());
  CHECK(std::equal(back->params().begin(), back->params().end(), net.params().begin()));
  const std::vector<double> ctx{0.1, -0.2, 0.3};
  CHECK(back->logits(ctx) == net.logits(ctx));

  std::stringstream again(bytes);
  skip_model(again);
  CHECK(again.tellg() == static_cast<std::streampos>(bytes.size()));
}

TEST_CASE("tabular and exact noisy checkpoints") {
  const auto grid = DiscretizationGrid::linear(3, -1, 1);
  const TabularMarkovModel tab(grid, 1, {0.5, 0.25, 0.25, 0.125, 0.5, 0.375, 1.0, 0.0, 0.0});
  std::stringstream ss;
  save_model(ss, tab);
  const auto loaded = load_model(ss);
  const auto* t = dynamic_cast<const TabularMarkovModel*>(loaded.get());
  REQUIRE(t != nullptr);
  CHECK(std::equal(t->table().begin(), t->table().end(), tab.table().begin()));

  const ExactNoisyMarkovModel noisy(tab, 0.3, 5);
  std::stringstream ns;
  save_model(ns, noisy);
  const auto nl = load_model(ns, 0.3);
  const auto* n = dynamic_cast<const ExactNoisyMarkovModel*>(nl.get());
  REQUIRE(n != nullptr);
  CHECK(n->sigma() == 0.3);
  CHECK(n->window() == 5);
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(load_model(bad), IoError);
  CausalConvNet net(DiscretizationGrid::linear(4, -1, 1), {2, 2, {1}});
  std::stringstream ss;
  save_model(ss, net);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 3);
  std::stringstream truncated(bytes);
  CHECK_THROWS_AS(load_model(truncated), IoError);
  CHECK_THROWS_AS(load_model(temp_file("does_not_exist")), IoError);
}

TEST_CASE("file-backed stack loads one level at a time") {
  const auto grid = DiscretizationGrid::linear(2, -1, 1);
  const auto tab = TabularMarkovModel::uniform(grid, 1);
  const std::vector<double> sigmas{1.0, 0.5, 0.1};
  const auto path = temp_file("stack.pnfs");
  save_stack(path, sigmas, [&](std::size_t l) {
    return std::make_shared<ExactNoisyMarkovModel>(tab, sigmas[l], 8);
  });
  const auto stack = NoisyModelStack::open(path);
  CHECK(stack.file_backed());
  CHECK(stack.levels() == 3);
  CHECK(std::equal(stack.sigmas().begin(), stack.sigmas().end(), sigmas.begin()));
  CHECK(stack.window() == 8);
  for (std::size_t l = 0; l < 3; ++l) {
    const auto m = stack.load(l);
    const auto* n = dynamic_cast<const ExactNoisyMarkovModel*>(m.get());
    REQUIRE(n != nullptr);
    CHECK(n->sigma() == sigmas[l]);
  }
  CHECK_THROWS_AS(stack.load(3), InvalidArgument);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(NoisyModelStack::in_memory({0.5, 1.0}, {nullptr, nullptr}), InvalidArgument);
  CHECK_THROWS_AS(save_stack(path, std::vector<double>{0.5, 0.5}, [&](std::size_t) {
                    return std::make_shared<TabularMarkovModel>(tab);
                  }),
                  InvalidArgument);
}
