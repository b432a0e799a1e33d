#include "veyes/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "veyes/error.hpp"

namespace veyes {

namespace {

void check_binary_labels(const std::vector<int>& labels) {
  for (int l : labels)
    if (l != 0 && l != 1) throw Error(errc::schema_error, "labels must be 0 or 1");
}

std::pair<std::size_t, std::size_t> class_counts(const std::vector<int>& labels) {
  std::size_t pos = 0, neg = 0;
  for (int l : labels) (l == 1 ? pos : neg)++;
  return {pos, neg};
}

/// Placement values: per positive, the fraction of negatives it outranks;
/// per negative, the fraction of positives ranking above it. Ties count 1/2.
struct Placements {
  std::vector<double> per_positive;
  std::vector<double> per_negative;
  double auc = 0.0;
};

Placements placement_values(const std::vector<double>& scores,
                            const std::vector<int>& labels) {
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(scores[i]);

  Placements out;
  out.per_positive.assign(pos.size(), 0.0);
  out.per_negative.assign(neg.size(), 0.0);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = 0; j < neg.size(); ++j) {
      double credit = pos[i] > neg[j] ? 1.0 : pos[i] == neg[j] ? 0.5 : 0.0;
      out.per_positive[i] += credit;
      out.per_negative[j] += credit;
    }
  }
  for (auto& v : out.per_positive) v /= static_cast<double>(neg.size());
  for (auto& v : out.per_negative) v /= static_cast<double>(pos.size());
  for (double v : out.per_positive) out.auc += v;
  out.auc /= static_cast<double>(pos.size());
  return out;
}

double sample_cov(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mx) * (y[i] - my);
  return acc / static_cast<double>(n - 1);
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(errc::length_mismatch, "scores vs labels");
  check_binary_labels(labels);
  auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw Error(errc::degenerate_labels, "need both classes");
  return placement_values(scores, labels).auc;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(errc::length_mismatch, "scores vs labels");
  check_binary_labels(labels);
  auto [npos, nneg] = class_counts(labels);
  if (npos == 0 || nneg == 0) throw Error(errc::degenerate_labels, "need both classes");

  // Per distinct score (descending): counts of positives/negatives at it.
  std::map<double, std::pair<std::size_t, std::size_t>, std::greater<>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& g = groups[scores[i]];
    (labels[i] == 1 ? g.first : g.second)++;
  }

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (const auto& [score, counts] : groups) {
    tp += counts.first;
    fp += counts.second;
    curve.points.push_back({score, static_cast<double>(fp) / static_cast<double>(nneg),
                            static_cast<double>(tp) / static_cast<double>(npos)});
  }

  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p0 = curve.points[i - 1];
    const auto& p1 = curve.points[i];
    area += (p1.fpr - p0.fpr) * (p1.tpr + p0.tpr) / 2.0;
  }
  curve.auc = area;
  return curve;
}

DeLongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<int>& labels) {
  if (scores_a.size() != labels.size() || scores_b.size() != labels.size())
    throw Error(errc::length_mismatch, "scores vs labels");
  check_binary_labels(labels);
  auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw Error(errc::degenerate_labels, "need both classes");

  Placements pa = placement_values(scores_a, labels);
  Placements pb = placement_values(scores_b, labels);

  double s10_aa = sample_cov(pa.per_positive, pa.per_positive);
  double s10_bb = sample_cov(pb.per_positive, pb.per_positive);
  double s10_ab = sample_cov(pa.per_positive, pb.per_positive);
  double s01_aa = sample_cov(pa.per_negative, pa.per_negative);
  double s01_bb = sample_cov(pb.per_negative, pb.per_negative);
  double s01_ab = sample_cov(pa.per_negative, pb.per_negative);

  DeLongResult result;
  result.auc_a = pa.auc;
  result.auc_b = pb.auc;
  result.delta = pa.auc - pb.auc;
  result.variance = (s10_aa + s10_bb - 2.0 * s10_ab) / static_cast<double>(pos) +
                    (s01_aa + s01_bb - 2.0 * s01_ab) / static_cast<double>(neg);
  if (!(result.variance > 0.0))
    throw Error(errc::degenerate_variance, "Var(delta AUC) is zero");

  result.z = result.delta / std::sqrt(result.variance);
  result.p_two_sided = std::erfc(std::fabs(result.z) / std::sqrt(2.0));
  result.p_two_sided = std::max(result.p_two_sided, std::numeric_limits<double>::min());
  return result;
}

double brier(const std::vector<double>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size()) throw Error(errc::length_mismatch, "probs vs labels");
  if (probs.empty()) throw Error(errc::empty_input, "no forecasts");
  check_binary_labels(labels);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double d = probs[i] - static_cast<double>(labels[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(probs.size());
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  constexpr double kTermFloor = 1e-12;
  double p;
  if (x < 1.18) {
    // Theta-series form of the CDF; the alternating series needs too many
    // terms here to honour the truncation rule.
    double t = std::exp(-M_PI * M_PI / (8.0 * x * x));
    double sum = 0.0;
    for (int k = 1;; k += 2) {  // exponents (2j-1)^2 = 1, 9, 25, ...
      double term = std::pow(t, static_cast<double>(k) * k);
      sum += term;
      if (term < kTermFloor || k > 99) break;
    }
    double cdf = std::sqrt(2.0 * M_PI) / x * sum;
    p = 1.0 - cdf;
  } else {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1000; ++k) {
      double term = std::exp(-2.0 * static_cast<double>(k) * k * x * x);
      if (term < kTermFloor) break;
      sum += sign * term;
      sign = -sign;
    }
    p = 2.0 * sum;
  }
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(errc::empty_input, "KS needs both samples");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const std::int64_t na = static_cast<std::int64_t>(sa.size());
  const std::int64_t nb = static_cast<std::int64_t>(sb.size());

  // Walk the pooled order; the ECDF gap numerator stays integer, so the
  // supremum is exact.
  std::int64_t ia = 0, ib = 0, best_num = 0;
  while (ia < na || ib < nb) {
    double x = (ia < na && (ib >= nb || sa[ia] <= sb[ib])) ? sa[ia] : sb[ib];
    while (ia < na && sa[ia] == x) ++ia;
    while (ib < nb && sb[ib] == x) ++ib;
    best_num = std::max<std::int64_t>(best_num, std::abs(ia * nb - ib * na));
  }

  KsResult result;
  result.d = static_cast<double>(best_num) / static_cast<double>(na * nb);
  double n_eff = static_cast<double>(na) * static_cast<double>(nb) /
                 static_cast<double>(na + nb);
  result.p = kolmogorov_sf(std::sqrt(n_eff) * result.d);
  return result;
}

BaStats bland_altman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(errc::length_mismatch, "paired samples");
  if (a.size() < 2) throw Error(errc::empty_input, "need at least 2 pairs");

  BaStats stats;
  stats.points.reserve(a.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = b[i] - a[i];
    stats.points.emplace_back((a[i] + b[i]) / 2.0, diff);
    sum += diff;
  }
  const double n = static_cast<double>(a.size());
  stats.bias = sum / n;
  double ss = 0.0;
  for (const auto& [mean, diff] : stats.points) ss += (diff - stats.bias) * (diff - stats.bias);
  stats.sd = std::sqrt(ss / (n - 1.0));
  stats.loa_low = stats.bias - 1.96 * stats.sd;
  stats.loa_high = stats.bias + 1.96 * stats.sd;
  return stats;
}

ConfusionMetrics confusion_metrics(const std::vector<double>& probs,
                                   const std::vector<int>& labels, double threshold) {
  if (probs.size() != labels.size()) throw Error(errc::length_mismatch, "probs vs labels");
  if (probs.empty()) throw Error(errc::empty_input, "no predictions");
  check_binary_labels(labels);

  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) (predicted ? tp : fn)++;
    else (predicted ? fp : tn)++;
  }

  ConfusionMetrics m;
  m.threshold = threshold;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(probs.size());
  if (tp + fn > 0) m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tn + fp > 0) m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return m;
}

}  // namespace veyes
