#pragma once

#include "floatquad/math.hpp"

namespace floatquad {

/// Running mean/variance of observation entries (Chan's parallel update),
/// used to whiten policy inputs. Stats update during rollout collection only
/// and are frozen inside checkpoints for evaluation.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim)
      : mean_(VecX::Zero(dim)), m2_(VecX::Zero(dim)), count_(1e-4) {}

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const VecX& mean() const { return mean_; }
  VecX variance() const { return (m2_ / count_).cwiseMax(1e-8); }

  void update(const MatX& batch) {
    const double n = static_cast<double>(batch.rows());
    if (n == 0.0) return;
    const VecX bmean = batch.colwise().mean();
    VecX bm2 = VecX::Zero(dim());
    for (Eigen::Index r = 0; r < batch.rows(); ++r) {
      const VecX d = batch.row(r).transpose() - bmean;
      bm2 += d.cwiseProduct(d);
    }
    const VecX delta = bmean - mean_;
    const double tot = count_ + n;
    mean_ += delta * (n / tot);
    m2_ += bm2 + delta.cwiseProduct(delta) * (count_ * n / tot);
    count_ = tot;
  }

  VecX normalize(const VecX& x, double clip = 10.0) const {
    const VecX s = variance().cwiseSqrt();
    VecX z = (x - mean_).cwiseQuotient(s);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = clamp(z(i), -clip, clip);
    return z;
  }

  MatX normalize_batch(const MatX& x, double clip = 10.0) const {
    const VecX s = variance().cwiseSqrt();
    MatX z = (x.rowwise() - mean_.transpose());
    z.array().rowwise() /= s.transpose().array();
    return z.cwiseMax(-clip).cwiseMin(clip);
  }

  void set_raw(const VecX& mean, const VecX& m2, double count) {
    mean_ = mean;
    m2_ = m2;
    count_ = count;
  }
  const VecX& m2() const { return m2_; }

 private:
  VecX mean_;
  VecX m2_;
  double count_ = 1e-4;
};

}  // namespace floatquad
