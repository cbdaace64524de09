#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "floatquad/checkpoint.hpp"
#include "floatquad/policy.hpp"

using namespace floatquad;
using Catch::Approx;

TEST_CASE("zeroed network outputs zero mean and value") {
  Rng rng(1);
  GaussianPolicy p(6, 3, rng);
  for (int i = 0; i < p.mean_net().num_layers(); ++i) {
    p.mean_net().weight(i).setZero();
    p.mean_net().bias(i).setZero();
    p.value_net().weight(i).setZero();
    p.value_net().bias(i).setZero();
  }
  VecX mean;
  double value;
  p.forward(VecX::Ones(6), mean, value);
  CHECK(mean.norm() == 0.0);
  CHECK(value == 0.0);
}

TEST_CASE("policy parameter count matches the architecture") {
  Rng rng(2);
  // Asymmetric attitude task dimensions: 18 observations, 8 actions.
  GaussianPolicy p(18, 8, rng);
  const std::int64_t n = p.policy_parameter_count();
  CHECK(n == 18 * 128 + 128 + 128 * 128 + 128 + 128 * 128 + 128 + 128 * 8 + 8 + 8);
  CHECK(n >= 31000);
  CHECK(n <= 39000);
}

TEST_CASE("batched forward is row-order invariant") {
  Rng rng(3);
  GaussianPolicy p(5, 2, rng);
  MatX obs(4, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) obs(i, j) = 0.1 * i - 0.2 * j;
  const MatX mean = p.mean_batch(obs);
  MatX perm(4, 5);
  perm.row(0) = obs.row(2);
  perm.row(1) = obs.row(0);
  perm.row(2) = obs.row(3);
  perm.row(3) = obs.row(1);
  const MatX mean_p = p.mean_batch(perm);
  CHECK((mean_p.row(0) - mean.row(2)).norm() < 1e-14);
  CHECK((mean_p.row(1) - mean.row(0)).norm() < 1e-14);
  CHECK((mean_p.row(3) - mean.row(1)).norm() < 1e-14);
}

TEST_CASE("sampling statistics match the learned covariance") {
  Rng rng(4);
  GaussianPolicy p(4, 3, rng);
  p.log_std() << -0.2, 0.3, -1.0;
  const VecX obs = VecX::Constant(4, 0.5);
  VecX mean;
  double value;
  p.forward(obs, mean, value);

  const int n = 100000;
  VecX sum = VecX::Zero(3), sumsq = VecX::Zero(3);
  Rng noise(5);
  for (int i = 0; i < n; ++i) {
    const PolicySample s = p.sample(obs, noise);
    const VecX d = s.action - mean;
    sum += d;
    sumsq += d.cwiseProduct(d);
  }
  for (int j = 0; j < 3; ++j) {
    const double std_emp = std::sqrt(sumsq(j) / n - square(sum(j) / n));
    CHECK(std_emp == Approx(std::exp(p.log_std()(j))).epsilon(0.02));
  }
}

TEST_CASE("log density and entropy analytics") {
  Rng rng(6);
  GaussianPolicy p(3, 1, rng);
  p.log_std()(0) = 0.0;

  SECTION("entropy of a unit Gaussian") {
    CHECK(p.entropy() == Approx(1.4189385332046727).margin(1e-12));
  }
  SECTION("log density at the mean") {
    const VecX obs = VecX::Zero(3);
    const VecX mean = p.deterministic_act(obs);
    const double lp = p.log_prob(mean, mean);
    CHECK(lp == Approx(-0.5 * kLog2Pi).margin(1e-12));  // -sum(log_std) - d/2 log 2pi
  }
  SECTION("gradient of log density with respect to the mean") {
    p.log_std()(0) = -0.4;
    const VecX mean = VecX::Constant(1, 0.3);
    const VecX action = VecX::Constant(1, 0.9);
    const double sigma2 = std::exp(2.0 * p.log_std()(0));
    const double analytic = (action(0) - mean(0)) / sigma2;
    const double h = 1e-6;
    const double num = (p.log_prob(VecX::Constant(1, 0.3 + h), action) -
                        p.log_prob(VecX::Constant(1, 0.3 - h), action)) /
                       (2 * h);
    CHECK(num == Approx(analytic).epsilon(1e-5));
  }
}

TEST_CASE("log-density parameter gradients match finite differences") {
  // Backprop d(logp)/d(theta) through a small mean network against central
  // differences over every parameter.
  Rng rng(7);
  GaussianPolicy p(2, 2, rng, 4);
  p.log_std() << -0.3, 0.1;
  const VecX obs = (VecX(2) << 0.4, -0.7).finished();
  const VecX action = (VecX(2) << 0.2, 0.5).finished();

  const auto logp_of_net = [&]() {
    return p.log_prob(p.deterministic_act(obs), action);
  };

  // Analytic gradient: dout = dlogp/dmean backpropagated.
  MlpNet::Cache cache;
  const MatX mean = p.mean_net().forward(obs.transpose(), cache);
  MatX dout(1, 2);
  for (int j = 0; j < 2; ++j) {
    const double sigma2 = std::exp(2.0 * p.log_std()(j));
    dout(0, j) = (action(j) - mean(0, j)) / sigma2;
  }
  MlpNet::Grads grads;
  grads.init_like(p.mean_net());
  p.mean_net().backward(cache, dout, grads);

  const double h = 1e-5;
  double worst = 0.0;
  for (int layer = 0; layer < p.mean_net().num_layers(); ++layer) {
    MatX& w = p.mean_net().weight(layer);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) {
        const double keep = w(r, c);
        w(r, c) = keep + h;
        const double up = logp_of_net();
        w(r, c) = keep - h;
        const double dn = logp_of_net();
        w(r, c) = keep;
        const double num = (up - dn) / (2 * h);
        const double ana = grads.w[layer](r, c);
        const double scale = std::max({std::abs(num), std::abs(ana), 1e-6});
        worst = std::max(worst, std::abs(num - ana) / scale);
      }
  }
  CHECK(worst < 1e-4);

  // log_std gradient: d logp / d log_std_j = z_j^2 - 1.
  for (int j = 0; j < 2; ++j) {
    const double keep = p.log_std()(j);
    p.log_std()(j) = keep + h;
    const double up = logp_of_net();
    p.log_std()(j) = keep - h;
    const double dn = logp_of_net();
    p.log_std()(j) = keep;
    const double z = (action(j) - mean(0, j)) * std::exp(-keep);
    CHECK((up - dn) / (2 * h) == Approx(z * z - 1.0).margin(1e-5));
  }
}

TEST_CASE("deterministic action equals the mean and near-zero noise sampling") {
  Rng rng(8);
  GaussianPolicy p(6, 4, rng);
  const VecX obs = VecX::Constant(6, 0.2);
  const VecX mean = p.deterministic_act(obs);
  VecX mean2;
  double value;
  p.forward(obs, mean2, value);
  CHECK((mean - mean2).norm() == 0.0);
  CHECK((p.deterministic_act(obs) - mean).norm() == 0.0);  // idempotent

  p.log_std().setConstant(-40.0);  // sigma ~ 4e-18
  Rng noise(9);
  const PolicySample s = p.sample(obs, noise);
  CHECK((s.action - mean).norm() < 1e-12);
}

TEST_CASE("doubling the affine output layer doubles the mean") {
  Rng rng(10);
  GaussianPolicy p(5, 3, rng);
  const int last = p.mean_net().num_layers() - 1;
  p.mean_net().bias(last).setZero();
  const VecX obs = VecX::Constant(5, -0.3);
  const VecX m1 = p.deterministic_act(obs);
  p.mean_net().weight(last) *= 2.0;
  const VecX m2 = p.deterministic_act(obs);
  CHECK((m2 - 2.0 * m1).norm() < 1e-14);
}

TEST_CASE("checkpoint round trip is bit exact") {
  Rng rng(11);
  GaussianPolicy p(18, 8, rng);
  Checkpoint ck;
  ck.policy = p;
  ck.normalizer = RunningNormalizer(18);
  MatX batch(32, 18);
  Rng rb(12);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 18; ++j) batch(i, j) = rb.normal(0.5, 2.0);
  ck.normalizer.update(batch);
  ck.has_normalizer = true;
  ck.config_hash = 0xdeadbeefcafe1234ull;

  std::stringstream ss;
  save_checkpoint(ss, ck);
  const Checkpoint lk = load_checkpoint(ss);

  CHECK(lk.config_hash == ck.config_hash);
  CHECK(lk.policy.obs_dim() == 18);
  CHECK(lk.policy.act_dim() == 8);
  REQUIRE(lk.has_normalizer);

  const VecX obs = VecX::Constant(18, 0.7);
  CHECK((lk.policy.deterministic_act(obs) - p.deterministic_act(obs)).norm() == 0.0);
  CHECK((lk.normalizer.normalize(obs) - ck.normalizer.normalize(obs)).norm() == 0.0);
  CHECK((lk.policy.log_std() - p.log_std()).norm() == 0.0);

  SECTION("corrupt magic is rejected") {
    std::stringstream bad;
    bad << "NOTACKPT";
    CHECK_THROWS(load_checkpoint(bad));
  }
}

TEST_CASE("orthogonal initialization produces orthonormal columns") {
  Rng rng(13);
  const MatX q = orthogonal_matrix(16, 8, 1.0, rng);
  const MatX gram = q.transpose() * q;
  CHECK((gram - MatX::Identity(8, 8)).norm() < 1e-10);
  const MatX wide = orthogonal_matrix(4, 12, std::sqrt(2.0), rng);
  const MatX gram2 = wide * wide.transpose() / 2.0;
  CHECK((gram2 - MatX::Identity(4, 4)).norm() < 1e-10);
}
