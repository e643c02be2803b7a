// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/noisy_tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnf/error.hpp"

namespace pnf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log forward messages over context rows. Row j of `la` is the (unnormalized)
// log posterior of the context state after reading j noisy observations.
struct Trace {
  std::size_t start = 0;  // sequence position of the first observation
  std::size_t length = 0;
  std::vector<double> la;
};

}  // namespace

class NoisyFilterPass final : public ForwardPass {
 public:
  NoisyFilterPass(const ExactNoisyMarkovModel& model, std::span<const double> x)
      : model_(model), x_(x.begin(), x.end()) {
    const std::size_t d = model_.bins();
    const std::size_t n = x_.size();
    const std::size_t w = model_.window_;
    log_table_ = model_.base_.log_table();

    logits_ = Matrix(n, d);
    // Positions whose context fits the window share one filter from the start.
    prefix_ = run(0, std::min(n == 0 ? 0 : n - 1, w));
    trace_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i <= w) {
        trace_of_[i] = kPrefix;
        emit(prefix_, i, logits_.row(i));
      } else {
        extra_.push_back(run(i - w, w));
        trace_of_[i] = extra_.size() - 1;
        emit(extra_.back(), w, logits_.row(i));
      }
    }
  }

  void backward(const Matrix& upstream, std::span<double> grad_x) const override {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const auto up = upstream.row(i);
      if (std::all_of(up.begin(), up.end(), [](double v) { return v == 0.0; })) continue;
      const Trace& t = trace_of_[i] == kPrefix ? prefix_ : extra_[trace_of_[i]];
      const std::size_t m = trace_of_[i] == kPrefix ? i : t.length;
      back(t, m, up, grad_x);
    }
  }

 private:
  static constexpr std::size_t kPrefix = static_cast<std::size_t>(-1);

  Trace run(std::size_t start, std::size_t length) const {
    const auto& base = model_.base_;
    const std::size_t d = base.grid().size();
    const std::size_t rows = base.rows();
    const auto e = base.grid().values();
    const double inv_two_var = 1.0 / (2.0 * model_.sigma_ * model_.sigma_);

    Trace t;
    t.start = start;
    t.length = length;
    t.la.assign((length + 1) * rows, kNegInf);
    t.la[base.initial_row()] = 0.0;
    std::vector<double> mx(rows), sum(rows);
    for (std::size_t j = 1; j <= length; ++j) {
      const double* prev = t.la.data() + (j - 1) * rows;
      double* cur = t.la.data() + j * rows;
      std::fill(mx.begin(), mx.end(), kNegInf);
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        if (prev[r] == kNegInf) continue;
        for (std::size_t k = 0; k < d; ++k) {
          const std::size_t s = base.next_row(r, k);
          mx[s] = std::max(mx[s], prev[r] + log_table_[r * d + k]);
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        if (prev[r] == kNegInf) continue;
        for (std::size_t k = 0; k < d; ++k) {
          const std::size_t s = base.next_row(r, k);
          sum[s] += std::exp(prev[r] + log_table_[r * d + k] - mx[s]);
        }
      }
      const double xj = x_[start + j - 1];
      for (std::size_t s = 0; s < rows; ++s) {
        if (mx[s] == kNegInf) continue;
        const double diff = xj - e[s % d];
        cur[s] = mx[s] + std::log(sum[s]) - diff * diff * inv_two_var;
      }
    }
    return t;
  }

  // Predictive log-mass F_k of the next bin after `m` observations.
  void predictive(const Trace& t, std::size_t m, std::span<double> f) const {
    const auto& base = model_.base_;
    const std::size_t d = f.size();
    const std::size_t rows = base.rows();
    const double* la = t.la.data() + m * rows;
    std::vector<double> terms(rows);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t r = 0; r < rows; ++r) terms[r] = la[r] + log_table_[r * d + k];
      f[k] = log_sum_exp(terms);
    }
  }

  void emit(const Trace& t, std::size_t m, std::span<double> out) const {
    predictive(t, m, out);
    const double z = log_sum_exp(out);
    for (double& v : out) v = std::max(v - z, kMinLogit);
  }

  void back(const Trace& t, std::size_t m, std::span<const double> u,
            std::span<double> grad_x) const {
    const auto& base = model_.base_;
    const std::size_t d = base.grid().size();
    const std::size_t rows = base.rows();
    const auto e = base.grid().values();
    const double var = model_.sigma_ * model_.sigma_;
    const double inv_two_var = 0.5 / var;

    std::vector<double> f(d), q(d), df(d);
    predictive(t, m, f);
    softmax(f, q);
    // Clamped entries have zero derivative.
    const double z = log_sum_exp(f);
    for (std::size_t k = 0; k < d; ++k) df[k] = f[k] - z > kMinLogit ? u[k] : 0.0;
    double usum = 0.0;
    for (double v : df) usum += v;
    for (std::size_t k = 0; k < d; ++k) df[k] -= q[k] * usum;

    std::vector<double> dla(rows, 0.0), dprev(rows), dlev(d);
    {
      const double* la = t.la.data() + m * rows;
      for (std::size_t r = 0; r < rows; ++r) {
        if (la[r] == kNegInf) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          acc += df[k] * std::exp(la[r] + log_table_[r * d + k] - f[k]);
        }
        dla[r] = acc;
      }
    }
    for (std::size_t j = m; j >= 1; --j) {
      const double* prev = t.la.data() + (j - 1) * rows;
      const double* cur = t.la.data() + j * rows;
      const std::size_t pos = t.start + j - 1;
      const double xj = x_[pos];
      std::fill(dlev.begin(), dlev.end(), 0.0);
      for (std::size_t s = 0; s < rows; ++s) {
        if (cur[s] != kNegInf) dlev[s % d] += dla[s];
      }
      double g = 0.0;
      for (std::size_t k = 0; k < d; ++k) g -= dlev[k] * (xj - e[k]) / var;
      grad_x[pos] += g;

      std::fill(dprev.begin(), dprev.end(), 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        if (prev[r] == kNegInf) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const std::size_t s = base.next_row(r, k);
          const double diff = xj - e[s % d];
          const double pre = cur[s] + diff * diff * inv_two_var;
          acc += dla[s] * std::exp(prev[r] + log_table_[r * d + k] - pre);
        }
        dprev[r] = acc;
      }
      std::swap(dla, dprev);
    }
  }

  const ExactNoisyMarkovModel& model_;
  std::vector<double> x_;
  std::span<const double> log_table_;
  Trace prefix_;
  std::vector<Trace> extra_;
  std::vector<std::size_t> trace_of_;
};

ExactNoisyMarkovModel::ExactNoisyMarkovModel(TabularMarkovModel base, double sigma,
                                             std::size_t window)
    : base_(std::move(base)), sigma_(sigma), window_(window) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw InvalidArgument("sigma must be positive");
  if (window_ == 0) throw InvalidArgument("window must be positive");
}

std::unique_ptr<ForwardPass> ExactNoisyMarkovModel::forward(std::span<const double> x) const {
  return std::make_unique<NoisyFilterPass>(*this, x);
}

}  // namespace pnf
