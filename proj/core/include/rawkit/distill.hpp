#pragma once

// Cross-domain distillation losses (logit KL + feature L1) with analytic
// gradients and a seeded finite-difference verification harness.

#include <cstdint>
#include <vector>

#include "rawkit/types.hpp"

namespace rawkit::distill {

// Numerically stable softmax; outputs are clamped to >= 1e-12 and
// renormalized, so downstream logs stay finite even for extreme logits.
std::vector<double> softmax(const std::vector<double>& logits, double temperature = 1.0);

// L = sum_i y_t[i] * ln(y_t[i] / y_s[i]); probabilities are clamped at 1e-12
// before the logs. Non-negative for valid distributions (Gibbs).
double kl_logit_loss(const std::vector<double>& y_s, const std::vector<double>& y_t);

// d/d(logits) of kl_logit_loss(softmax(logits), y_t) = softmax(logits) - y_t.
std::vector<double> kl_grad_wrt_student_logits(const std::vector<double>& student_logits,
                                               const std::vector<double>& y_t);

// L = (1/C) * sum_i |z_s[i] - z_t[i]|.
double feature_l1_loss(const std::vector<double>& z_s, const std::vector<double>& z_t);

// (1/C) * sign(z_s - z_t), with sign(0) = 0.
std::vector<double> feature_l1_subgradient(const std::vector<double>& z_s,
                                           const std::vector<double>& z_t);

struct LossWeights {
  double ce = 1.0;
  double logit = 1.0;
  double feature = 1.0;
};

double combined_loss(double ce, double l_l, double l_f, const LossWeights& weights = {});

// ---------------------------------------------------------------------------
// Verification harness

struct GradCheckReport {
  std::size_t trials = 0;
  double max_kl_rel_err = 0.0;  // worst analytic-vs-central-difference gap
  double max_l1_rel_err = 0.0;
  double tolerance = 1e-6;
  bool passed = false;
};

// Runs `trials` randomized nondegenerate instances of both gradient checks
// (central differences, h = 1e-5) and reports the worst relative error.
GradCheckReport run_gradient_checks(std::uint64_t seed, std::size_t trials);

// Draws `pairs` random probability pairs and counts kl_logit_loss < 0
// occurrences (Gibbs' inequality says there must be none).
std::size_t count_kl_negativity_violations(std::uint64_t seed, std::size_t pairs);

}  // namespace rawkit::distill
