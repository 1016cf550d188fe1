#pragma once

#include "nammd/kernels.hpp"
#include "nammd/stats.hpp"
#include "nammd/types.hpp"

namespace nammd {

enum class GradientMode { analytic, central_difference };

struct OptimizerConfig {
  double step_size = 0.01;
  int iterations = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double epsilon_stabilizer = 1e-8;
  GradientMode gradient_mode = GradientMode::analytic;
  double fd_step = 1e-5;  // central-difference step in log-parameter space
};

/// Regularizer added to the MMD variance in the t-statistic denominator.
inline constexpr double kVarianceRegularizer = 1e-8;

struct TStatistic {
  double value = 0.0;
  bool degenerate = false;  // variance estimate <= 0; value is then 0
};

/// Test-power proxy mmd2_hat / sqrt(v + 1e-8), v = ((4m-8) zeta1 + 2 zeta2) / (m-1).
TStatistic power_t_statistic(const Sample& x, const Sample& y, const KernelSpec& spec);

/// The same quantity written as nammd_hat / sigma, sigma = sqrt(v + 1e-8) / norm_hat
/// (unclamped). Equal to power_t_statistic up to rounding.
double power_t_statistic_nammd_form(const Sample& x, const Sample& y, const KernelSpec& spec);

/// Unconstrained parameters of a kernel: [log bandwidth] for gaussian and laplace,
/// log of the metric diagonal for (diagonal) mahalanobis.
Vector log_parameters(const KernelSpec& spec);
KernelSpec with_log_parameters(const KernelSpec& spec, const Vector& theta);

struct TStatisticGradient {
  TStatistic t;
  Vector gradient;  // d t / d log_parameters
};

TStatisticGradient power_t_gradient(const Sample& x, const Sample& y, const KernelSpec& spec,
                                    GradientMode mode = GradientMode::analytic, double fd_step = 1e-5);

struct KernelSelection {
  KernelSpec spec;
  double initial_t = 0.0;
  double final_t = 0.0;  // t-statistic of `spec`, the best iterate seen
  int iterations_run = 0;
  bool aborted = false;  // non-finite objective; `spec` is the best iterate before it
};

/// Adam ascent on the log-parameters, starting from `init`.
KernelSelection select_kernel(const Sample& x, const Sample& y, const KernelSpec& init,
                              const OptimizerConfig& config);

/// Starts from the median heuristic (identity metric for mahalanobis).
KernelSelection select_kernel(const Sample& x, const Sample& y, KernelFamily family,
                              const OptimizerConfig& config);

struct TrainTestSplit {
  Sample x_train;
  Sample y_train;
  Sample x_test;
  Sample y_test;
};

/// Random disjoint split of both samples; the first round(train_fraction * m) shuffled rows train.
TrainTestSplit split_train_test(const Sample& x, const Sample& y, double train_fraction, Rng& rng);

}  // namespace nammd
