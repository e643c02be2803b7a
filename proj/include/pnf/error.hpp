// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pnf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad sizes, non-positive sigma, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A sample value was not finite.
class InvalidSample : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration would exceed the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The observation cannot be reached by any discrete configuration.
class UnreachableObservation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A Langevin iterate became non-finite.
class DivergenceError : public Error {
 public:
  static constexpr std::size_t kNoWorker = static_cast<std::size_t>(-1);

  DivergenceError(std::size_t level, std::size_t step, std::size_t worker = kNoWorker)
      : Error(describe(level, step, worker)), level_(level), step_(step), worker_(worker) {}

  std::size_t level() const noexcept { return level_; }
  std::size_t step() const noexcept { return step_; }
  std::size_t worker() const noexcept { return worker_; }

 private:
  static std::string describe(std::size_t level, std::size_t step, std::size_t worker) {
    std::string msg = "non-finite iterate at level " + std::to_string(level) + ", step " +
                      std::to_string(step);
    if (worker != kNoWorker) msg += ", worker " + std::to_string(worker);
    return msg;
  }

  std::size_t level_;
  std::size_t step_;
  std::size_t worker_;
};

}  // namespace pnf
