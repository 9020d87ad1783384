#include "netdag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace netdag {

double jaccard_index(double tp, double fp, double s0) {
  if (fp + s0 == 0.0) return 1.0;  // empty truth, empty prediction
  return tp / (fp + s0);
}

double shd_value(double fp, double fn, double r) { return fp + fn + r; }

double fdr_value(double fp, double predicted) { return predicted > 0.0 ? fp / predicted : 0.0; }

double EdgeConfusion::fdr() const {
  return fdr_value(static_cast<double>(false_positive), static_cast<double>(predicted));
}

double EdgeConfusion::jaccard() const {
  return jaccard_index(static_cast<double>(true_positive), static_cast<double>(false_positive),
                       static_cast<double>(s0));
}

double EdgeConfusion::shd() const {
  return shd_value(static_cast<double>(false_positive), static_cast<double>(false_negative),
                   static_cast<double>(reversed));
}

BoolMatrix threshold_dag(const Matrix& b_hat, double tau) {
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  const Index p = b_hat.rows();
  BoolMatrix out = BoolMatrix::Constant(p, b_hat.cols(), false);
  for (Index j = 0; j < b_hat.cols(); ++j)
    for (Index i = 0; i < p; ++i)
      if (i != j && std::abs(b_hat(i, j)) > tau) out(i, j) = true;
  return out;
}

EdgeConfusion confusion(const BoolMatrix& pred, const BoolMatrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw std::invalid_argument("prediction and truth shapes differ");
  if (!topological_order(truth)) throw std::invalid_argument("truth graph has a cycle");
  const Index p = pred.rows();
  EdgeConfusion c;
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < p; ++i) {
      if (i == j) continue;
      if (truth(i, j)) ++c.s0;
      if (!pred(i, j)) continue;
      ++c.predicted;
      if (truth(i, j))
        ++c.true_positive;
      else if (truth(j, i))
        ++c.reversed;
      else
        ++c.false_positive;
    }
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < p; ++i)
      if (i != j && truth(i, j) && !pred(i, j) && !pred(j, i)) ++c.false_negative;
  return c;
}

namespace {

// Distinct nonzero magnitudes, descending, with multiplicities.
std::vector<std::pair<double, long>> magnitude_tiers(const Matrix& b_hat) {
  std::map<double, long, std::greater<>> tiers;
  for (Index j = 0; j < b_hat.cols(); ++j)
    for (Index i = 0; i < b_hat.rows(); ++i) {
      if (i == j) continue;
      const double m = std::abs(b_hat(i, j));
      if (m > 0.0) ++tiers[m];
    }
  return {tiers.begin(), tiers.end()};
}

}  // namespace

RocCurve roc_sweep(const Matrix& b_hat, const BoolMatrix& truth, int num_thresholds) {
  if (num_thresholds < 2) throw std::invalid_argument("need at least 2 thresholds");
  const Index p = b_hat.rows();
  long s0 = 0;
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < p; ++i)
      if (i != j && truth(i, j)) ++s0;
  const double possible_nonedges =
      static_cast<double>(p * (p - 1) / 2 - s0);

  auto tiers = magnitude_tiers(b_hat);
  std::vector<double> taus;
  if (!tiers.empty()) {
    std::vector<double> distinct;
    distinct.reserve(tiers.size());
    for (const auto& [m, cnt] : tiers) distinct.push_back(m);
    if (static_cast<int>(distinct.size()) > num_thresholds) {
      for (int k = 0; k < num_thresholds; ++k) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(distinct.size() - 1) /
                         static_cast<double>(num_thresholds - 1)));
        taus.push_back(distinct[idx]);
      }
      taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    } else {
      taus = distinct;
    }
  }
  taus.push_back(0.0);  // keep-all-nonzeros endpoint

  RocCurve curve;
  for (double tau : taus) {
    const EdgeConfusion c = confusion(threshold_dag(b_hat, tau), truth);
    const double tpr = s0 > 0 ? static_cast<double>(c.true_positive) / static_cast<double>(s0) : 0.0;
    const double fpr = possible_nonedges > 0.0
                           ? static_cast<double>(c.false_positive) / possible_nonedges
                           : 0.0;
    curve.thresholds.push_back(tau);
    curve.points.emplace_back(fpr, tpr);
  }

  // Trapezoid over the curve with (0,0) and (1,1) anchors.
  std::vector<std::pair<double, double>> pts = curve.points;
  pts.insert(pts.begin(), {0.0, 0.0});
  pts.emplace_back(1.0, 1.0);
  double auc = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double dx = pts[k].first - pts[k - 1].first;
    if (dx > 0.0) auc += dx * 0.5 * (pts[k].second + pts[k - 1].second);
  }
  curve.auc = auc;
  return curve;
}

double threshold_for_count(const Matrix& b_hat, long target) {
  if (target < 0) throw std::invalid_argument("target must be nonnegative");
  auto tiers = magnitude_tiers(b_hat);
  if (tiers.empty()) {
    if (target > 0) throw std::invalid_argument("target unreachable: matrix has no nonzeros");
    return 0.0;
  }
  if (target == 0) return tiers.front().first;
  long cum = 0;
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    if (cum + tiers[k].second > target) return tiers[k].first;  // drop this tier and below
    cum += tiers[k].second;
  }
  return 0.0;  // every nonzero fits
}

std::pair<double, double> match_predicted_count(const Matrix& b_hat_a, const Matrix& b_hat_b,
                                                long target) {
  return {threshold_for_count(b_hat_a, target), threshold_for_count(b_hat_b, target)};
}

}  // namespace netdag
