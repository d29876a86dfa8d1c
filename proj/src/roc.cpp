#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "gfm/bench.hpp"

namespace gfm {

RocResult roc_auc(const Matrix& cond_corr, const BoolMatrix& truth) {
  const Index p = cond_corr.rows();
  if (truth.rows() != p || truth.cols() != p || cond_corr.cols() != p) {
    throw Error(ErrorCode::kInvalidArgument, "roc_auc: dimension mismatch");
  }
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(std::size_t(p * (p - 1) / 2));
  Index positives = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      scored.emplace_back(std::abs(cond_corr(i, j)), truth(i, j));
      positives += truth(i, j) ? 1 : 0;
    }
  }
  const Index negatives = Index(scored.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kDegenerateTruth,
                "ROC needs at least one edge and one non-edge");
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  RocResult roc;
  roc.fpr.push_back(0.0);
  roc.tpr.push_back(0.0);
  Index tp = 0, fp = 0;
  for (std::size_t k = 0; k < scored.size();) {
    const double threshold = scored[k].first;
    while (k < scored.size() && scored[k].first == threshold) {
      (scored[k].second ? tp : fp) += 1;
      ++k;
    }
    roc.fpr.push_back(double(fp) / double(negatives));
    roc.tpr.push_back(double(tp) / double(positives));
  }
  double area = 0;
  for (std::size_t k = 1; k < roc.fpr.size(); ++k) {
    area += (roc.fpr[k] - roc.fpr[k - 1]) * (roc.tpr[k] + roc.tpr[k - 1]) / 2;
  }
  roc.auc = area;
  return roc;
}

std::vector<double> interpolate_roc(const RocResult& roc,
                                    std::span<const double> fpr_grid) {
  std::vector<double> out;
  out.reserve(fpr_grid.size());
  const auto& f = roc.fpr;
  const auto& t = roc.tpr;
  for (double x : fpr_grid) {
    // First index with fpr > x; the point before it is the upper endpoint of
    // any vertical segment at x.
    const auto it = std::upper_bound(f.begin(), f.end(), x);
    const std::size_t hi = std::size_t(it - f.begin());
    if (hi == 0) {
      out.push_back(t.front());
    } else if (hi == f.size()) {
      out.push_back(t.back());
    } else {
      const std::size_t lo = hi - 1;
      if (f[lo] == x) {
        out.push_back(t[lo]);
      } else {
        const double w = (x - f[lo]) / (f[hi] - f[lo]);
        out.push_back(t[lo] + w * (t[hi] - t[lo]));
      }
    }
  }
  return out;
}

std::vector<double> roc_grid() {
  std::vector<double> g(kRocGridPoints);
  for (int i = 0; i < kRocGridPoints; ++i)
    g[std::size_t(i)] = double(i) / double(kRocGridPoints - 1);
  return g;
}

}  // namespace gfm
