#pragma once

#include "netdag/types.hpp"

#include <utility>
#include <vector>

namespace netdag {

// Edge confusion under the reversal-aware convention: a predicted edge is
// correct (TP), reversed (R), or spurious (FP); FN counts true edges missing
// from the predicted skeleton, so P = TP + FP + R and FN = s0 - TP - R.
struct EdgeConfusion {
  long predicted = 0;
  long true_positive = 0;
  long false_positive = 0;
  long false_negative = 0;
  long reversed = 0;
  long s0 = 0;

  double fdr() const;
  double jaccard() const;
  double shd() const;
};

double jaccard_index(double tp, double fp, double s0);
double shd_value(double fp, double fn, double r);
double fdr_value(double fp, double predicted);

// Entry true iff |b_hat_ij| > tau; the diagonal is ignored.
BoolMatrix threshold_dag(const Matrix& b_hat, double tau);

EdgeConfusion confusion(const BoolMatrix& pred, const BoolMatrix& truth);

struct RocCurve {
  std::vector<double> thresholds;                 // descending
  std::vector<std::pair<double, double>> points;  // (FP-rate, TP-rate)
  double auc = 0.0;
};

// Thresholds at the distinct |b_hat| values (quantile-subsampled down to
// num_thresholds); TP-rate = TP/s0, FP-rate = FP / (p(p-1)/2 - s0), the count
// of ordered non-edges. AUC by the trapezoid rule with (0,0) and (1,1) anchors.
RocCurve roc_sweep(const Matrix& b_hat, const BoolMatrix& truth, int num_thresholds);

// Threshold giving the largest predicted-edge count <= target; ties at equal
// magnitude are kept only when the whole tier fits.
double threshold_for_count(const Matrix& b_hat, long target);

std::pair<double, double> match_predicted_count(const Matrix& b_hat_a, const Matrix& b_hat_b,
                                                long target);

}  // namespace netdag
