#include "rawkit/distill.hpp"

#include <algorithm>
#include <cmath>

#include "rawkit/error.hpp"
#include "rawkit/rng.hpp"

namespace rawkit::distill {

namespace {
constexpr double kEps = 1e-12;
}

std::vector<double> softmax(const std::vector<double>& logits, double temperature) {
  if (logits.empty()) throw ValidationError("softmax of an empty vector");
  if (!(temperature > 0)) throw ValidationError("softmax temperature must be positive");

  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp((logits[i] - peak) / temperature);
    sum += probs[i];
  }
  double clamped_sum = 0.0;
  for (double& p : probs) {
    p = std::max(p / sum, kEps);
    clamped_sum += p;
  }
  for (double& p : probs) p /= clamped_sum;
  return probs;
}

double kl_logit_loss(const std::vector<double>& y_s, const std::vector<double>& y_t) {
  if (y_s.size() != y_t.size())
    throw ValidationError("distribution dimensions differ: " + std::to_string(y_s.size()) +
                          " vs " + std::to_string(y_t.size()));
  if (y_s.empty()) throw ValidationError("KL of empty distributions");

  double loss = 0.0;
  for (std::size_t i = 0; i < y_s.size(); ++i) {
    const double t = std::max(y_t[i], kEps);
    const double s = std::max(y_s[i], kEps);
    loss += t * std::log(t / s);
  }
  return loss;
}

std::vector<double> kl_grad_wrt_student_logits(const std::vector<double>& student_logits,
                                               const std::vector<double>& y_t) {
  if (student_logits.size() != y_t.size())
    throw ValidationError("logit and target dimensions differ");
  std::vector<double> grad = softmax(student_logits);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= y_t[i];
  return grad;
}

double feature_l1_loss(const std::vector<double>& z_s, const std::vector<double>& z_t) {
  if (z_s.size() != z_t.size())
    throw ValidationError("feature dimensions differ: " + std::to_string(z_s.size()) +
                          " vs " + std::to_string(z_t.size()));
  if (z_s.empty()) throw ValidationError("L1 loss of empty features");

  double sum = 0.0;
  for (std::size_t i = 0; i < z_s.size(); ++i) sum += std::abs(z_s[i] - z_t[i]);
  return sum / static_cast<double>(z_s.size());
}

std::vector<double> feature_l1_subgradient(const std::vector<double>& z_s,
                                           const std::vector<double>& z_t) {
  if (z_s.size() != z_t.size())
    throw ValidationError("feature dimensions differ");
  if (z_s.empty()) throw ValidationError("L1 subgradient of empty features");

  const double inv_c = 1.0 / static_cast<double>(z_s.size());
  std::vector<double> grad(z_s.size());
  for (std::size_t i = 0; i < z_s.size(); ++i) {
    const double d = z_s[i] - z_t[i];
    grad[i] = d > 0 ? inv_c : (d < 0 ? -inv_c : 0.0);
  }
  return grad;
}

double combined_loss(double ce, double l_l, double l_f, const LossWeights& weights) {
  return weights.ce * ce + weights.logit * l_l + weights.feature * l_f;
}

namespace {

constexpr double kStep = 1e-5;

double rel_err(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double worst_abs = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst_abs = std::max(worst_abs, std::abs(analytic[i] - numeric[i]));
    scale = std::max(scale, std::abs(analytic[i]));
  }
  return worst_abs / std::max(scale, 1e-12);
}

}  // namespace

GradCheckReport run_gradient_checks(std::uint64_t seed, std::size_t trials) {
  if (trials == 0) throw ValidationError("gradient check needs at least one trial");

  GradCheckReport report;
  report.trials = trials;

  PhiloxStream rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // --- KL wrt student logits --------------------------------------------
    const std::size_t k = 2 + rng.next_below(15);
    std::vector<double> logits(k), teacher_logits(k);
    for (auto& v : logits) v = 3.0 * rng.next_gaussian();
    for (auto& v : teacher_logits) v = 3.0 * rng.next_gaussian();
    const std::vector<double> y_t = softmax(teacher_logits);

    const std::vector<double> analytic = kl_grad_wrt_student_logits(logits, y_t);
    std::vector<double> numeric(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> hi = logits, lo = logits;
      hi[i] += kStep;
      lo[i] -= kStep;
      numeric[i] =
          (kl_logit_loss(softmax(hi), y_t) - kl_logit_loss(softmax(lo), y_t)) / (2 * kStep);
    }
    report.max_kl_rel_err = std::max(report.max_kl_rel_err, rel_err(analytic, numeric));

    // --- feature L1 wrt student features ----------------------------------
    const std::size_t c = 2 + rng.next_below(31);
    std::vector<double> z_s(c), z_t(c);
    for (std::size_t i = 0; i < c; ++i) {
      z_s[i] = rng.next_gaussian();
      // keep every coordinate difference well away from the |.| kink
      double d;
      do {
        d = rng.next_gaussian();
      } while (std::abs(d) < 1e-3);
      z_t[i] = z_s[i] - d;
    }

    const std::vector<double> l1_analytic = feature_l1_subgradient(z_s, z_t);
    std::vector<double> l1_numeric(c);
    for (std::size_t i = 0; i < c; ++i) {
      std::vector<double> hi = z_s, lo = z_s;
      hi[i] += kStep;
      lo[i] -= kStep;
      l1_numeric[i] = (feature_l1_loss(hi, z_t) - feature_l1_loss(lo, z_t)) / (2 * kStep);
    }
    report.max_l1_rel_err = std::max(report.max_l1_rel_err, rel_err(l1_analytic, l1_numeric));
  }

  report.passed = report.max_kl_rel_err <= report.tolerance &&
                  report.max_l1_rel_err <= report.tolerance;
  return report;
}

std::size_t count_kl_negativity_violations(std::uint64_t seed, std::size_t pairs) {
  PhiloxStream rng(seed);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t k = 2 + rng.next_below(15);
    std::vector<double> a(k), b(k);
    for (auto& v : a) v = 4.0 * rng.next_gaussian();
    for (auto& v : b) v = 4.0 * rng.next_gaussian();
    if (kl_logit_loss(softmax(a), softmax(b)) < 0.0) ++violations;
  }
  return violations;
}

}  // namespace rawkit::distill
