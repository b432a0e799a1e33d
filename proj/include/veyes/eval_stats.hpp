#pragma once

#include <optional>
#include <vector>

namespace veyes {

struct RocPoint {
  double threshold;  // +inf for the (0,0) anchor
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // thresholds descending, (0,0) .. (1,1)
  double auc = 0.0;              // trapezoidal area under the points
};

struct DeLongResult {
  double auc_a = 0.0;
  double auc_b = 0.0;
  double delta = 0.0;    // auc_a - auc_b
  double variance = 0.0; // Var(delta)
  double z = 0.0;
  double p_two_sided = 1.0;
};

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

struct BaStats {
  double bias = 0.0;  // mean of b - a
  double sd = 0.0;    // sample std of differences
  double loa_low = 0.0;
  double loa_high = 0.0;
  std::vector<std::pair<double, double>> points;  // (pair mean, difference)
};

struct ConfusionMetrics {
  double threshold = 0.5;
  double accuracy = 0.0;
  std::optional<double> sensitivity;  // absent when no positives
  std::optional<double> specificity;  // absent when no negatives
};

/// Mann-Whitney estimator: mean over (positive, negative) pairs of
/// 1 / 0.5 / 0 for win / tie / loss.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// One operating point per distinct score, plus the (0,0) anchor.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

/// DeLong's test for two correlated AUCs measured on the same subjects.
/// Throws degenerate_variance when Var(delta) is zero.
DeLongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<int>& labels);

/// Mean squared error of probabilistic forecasts.
double brier(const std::vector<double>& probs, const std::vector<int>& labels);

/// Two-sample Kolmogorov-Smirnov statistic (exact sup of the ECDF gap)
/// with the asymptotic two-sided p-value at n_eff = na*nb/(na+nb).
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// Survival function of the Kolmogorov distribution,
/// Q(x) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2), terms below 1e-12
/// dropped; the theta-series form is used for small x where the
/// alternating series converges slowly.
double kolmogorov_sf(double x);

/// Mean difference (b - a) and 1.96-sd limits of agreement.
BaStats bland_altman(const std::vector<double>& a, const std::vector<double>& b);

/// 2x2 table at the threshold; prediction is positive when prob >= threshold.
ConfusionMetrics confusion_metrics(const std::vector<double>& probs,
                                   const std::vector<int>& labels,
                                   double threshold = 0.5);

}  // namespace veyes
