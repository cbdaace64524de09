#pragma once

#include <vector>

#include "floatquad/math.hpp"
#include "floatquad/rng.hpp"

namespace floatquad {

/// Orthogonal matrix of shape (rows, cols) scaled by gain, from a Gaussian
/// draw via Householder QR with sign correction.
inline MatX orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
  const bool wide = cols > rows;
  const int r = wide ? cols : rows;
  const int c = wide ? rows : cols;
  MatX g(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatX> qr(g);
  MatX q = qr.householderQ() * MatX::Identity(r, c);
  const MatX rr = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (int j = 0; j < c; ++j)
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  MatX out = wide ? MatX(q.transpose()) : q;
  return gain * out;
}

/// Fully connected feed-forward network with tanh hidden layers and a linear
/// output layer. Forward/backward operate on row-major batches (n x dim).
class MlpNet {
 public:
  MlpNet() = default;

  /// sizes = {in, h1, ..., out}. Hidden layers use orthogonal init with gain
  /// sqrt(2); the output layer uses `out_gain`.
  MlpNet(const std::vector<int>& sizes, double out_gain, Rng& rng) : sizes_(sizes) {
    const int nl = static_cast<int>(sizes.size()) - 1;
    w_.resize(nl);
    b_.resize(nl);
    for (int i = 0; i < nl; ++i) {
      const double gain = i + 1 == nl ? out_gain : std::sqrt(2.0);
      w_[i] = orthogonal_matrix(sizes[i + 1], sizes[i], gain, rng);
      b_[i] = VecX::Zero(sizes[i + 1]);
    }
  }

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(w_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  MatX& weight(int i) { return w_[i]; }
  VecX& bias(int i) { return b_[i]; }
  const MatX& weight(int i) const { return w_[i]; }
  const VecX& bias(int i) const { return b_[i]; }

  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for (size_t i = 0; i < w_.size(); ++i) n += w_[i].size() + b_[i].size();
    return n;
  }

  struct Cache {
    std::vector<MatX> act;  // act[0] = input, act[i+1] = output of layer i
  };

  MatX forward(const MatX& x) const {
    MatX h = x;
    const int nl = num_layers();
    for (int i = 0; i < nl; ++i) {
      h = (h * w_[i].transpose()).rowwise() + b_[i].transpose();
      if (i + 1 < nl) h = h.array().tanh();
    }
    return h;
  }

  MatX forward(const MatX& x, Cache& cache) const {
    const int nl = num_layers();
    cache.act.resize(nl + 1);
    cache.act[0] = x;
    for (int i = 0; i < nl; ++i) {
      MatX h = (cache.act[i] * w_[i].transpose()).rowwise() + b_[i].transpose();
      if (i + 1 < nl) h = h.array().tanh();
      cache.act[i + 1] = std::move(h);
    }
    return cache.act[nl];
  }

  struct Grads {
    std::vector<MatX> w;
    std::vector<VecX> b;

    void init_like(const MlpNet& net) {
      w.resize(net.num_layers());
      b.resize(net.num_layers());
      for (int i = 0; i < net.num_layers(); ++i) {
        w[i] = MatX::Zero(net.w_[i].rows(), net.w_[i].cols());
        b[i] = VecX::Zero(net.b_[i].size());
      }
    }
    void set_zero() {
      for (auto& m : w) m.setZero();
      for (auto& v : b) v.setZero();
    }
  };

  /// Backpropagate d(loss)/d(output); accumulates into grads.
  void backward(const Cache& cache, const MatX& dout, Grads& grads) const {
    const int nl = num_layers();
    MatX delta = dout;
    for (int i = nl - 1; i >= 0; --i) {
      grads.w[i].noalias() += delta.transpose() * cache.act[i];
      grads.b[i] += delta.colwise().sum().transpose();
      if (i > 0) {
        MatX dprev = delta * w_[i];
        // tanh'(z) = 1 - a^2 from the stored activation.
        delta = dprev.array() * (1.0 - cache.act[i].array().square());
      }
    }
  }

 private:
  std::vector<int> sizes_;
  std::vector<MatX> w_;
  std::vector<VecX> b_;
};

/// Adam with the usual bias correction; epsilon follows the common PPO
/// implementations (1e-5).
class Adam {
 public:
  Adam() = default;
  Adam(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void register_size(Eigen::Index rows, Eigen::Index cols) {
    m_.push_back(MatX::Zero(rows, cols));
    v_.push_back(MatX::Zero(rows, cols));
  }

  /// Apply one step to parameter block `idx` (blocks in registration order).
  template <typename Param, typename Grad>
  void update(int idx, Param&& p, const Grad& g, double lr) {
    MatX& m = m_[idx];
    MatX& v = v_[idx];
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    p -= (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + eps_).matrix());
  }

  void begin_step() { ++t_; }
  std::int64_t step_count() const { return t_; }

  void save(std::ostream& os) const {
    const std::int64_t t = t_;
    os.write(reinterpret_cast<const char*>(&t), sizeof(t));
    const std::uint32_t n = static_cast<std::uint32_t>(m_.size());
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (std::uint32_t i = 0; i < n; ++i) {
      write_mat(os, m_[i]);
      write_mat(os, v_[i]);
    }
  }
  void load(std::istream& is) {
    std::int64_t t;
    is.read(reinterpret_cast<char*>(&t), sizeof(t));
    t_ = t;
    std::uint32_t n;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    m_.resize(n);
    v_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      read_mat(is, m_[i]);
      read_mat(is, v_[i]);
    }
  }

  static void write_mat(std::ostream& os, const MatX& m) {
    const std::int64_t r = m.rows(), c = m.cols();
    os.write(reinterpret_cast<const char*>(&r), sizeof(r));
    os.write(reinterpret_cast<const char*>(&c), sizeof(c));
    os.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size());
  }
  static void read_mat(std::istream& is, MatX& m) {
    std::int64_t r, c;
    is.read(reinterpret_cast<char*>(&r), sizeof(r));
    is.read(reinterpret_cast<char*>(&c), sizeof(c));
    m.resize(r, c);
    is.read(reinterpret_cast<char*>(m.data()), sizeof(double) * m.size());
  }

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-5;
  std::int64_t t_ = 0;
  std::vector<MatX> m_;
  std::vector<MatX> v_;
};

}  // namespace floatquad
