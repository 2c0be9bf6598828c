#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hsr/network.hpp"

using namespace hsr;

namespace {

NetConfig tiny_config() {
  NetConfig cfg;
  cfg.conv_channels = {4, 4};
  cfg.dense_widths = {8};
  cfg.head_p_size = 6;
  cfg.init_seed = 7;
  return cfg;
}

std::vector<NetExample> sample_batch() {
  std::vector<NetExample> batch;
  NetExample a;
  a.input = {0.5, 1.0, 0.25, 0.0, 1.0};
  a.p_head = true;
  a.pi = {0.0, 0.1, 0.6, 0.3, 0.0, 0.0};
  a.z = 1.0;
  NetExample b;
  b.input = {1.0, 0.5, 0.75, 0.3, -1.0};
  b.p_head = false;
  b.pi = {0.2, 0.8};
  b.z = -1.0;
  NetExample c;
  c.input = {0.25, 0.25, 0.5, 0.1, 1.0};
  c.p_head = true;
  c.pi = {0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  c.z = 1.0;
  batch.push_back(a);
  batch.push_back(b);
  batch.push_back(c);
  return batch;
}

double mean_loss(const Network& net, const std::vector<NetExample>& batch) {
  double total = 0.0;
  for (const NetExample& ex : batch) total += net.example_loss(ex);
  return total / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("outputs are proper distributions and a bounded value") {
  Network net(tiny_config());
  PolicyValue pv = net.evaluate({0.5, 0.5, 0.5, 0.0, 1.0});
  REQUIRE(pv.policy_p.size() == 6);
  double p_mass = 0.0;
  for (double p : pv.policy_p) {
    CHECK(p > 0.0);
    p_mass += p;
  }
  CHECK(p_mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pv.policy_op[0] + pv.policy_op[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pv.value > -1.0);
  CHECK(pv.value < 1.0);
}

TEST_CASE("initialization is seed-deterministic") {
  Network a(tiny_config());
  Network b(tiny_config());
  REQUIRE(a.tensors().size() == b.tensors().size());
  for (std::size_t i = 0; i < a.tensors().size(); ++i) {
    CHECK(a.tensors()[i].w == b.tensors()[i].w);
  }

  NetConfig other = tiny_config();
  other.init_seed = 8;
  Network c(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.tensors().size(); ++i) {
    if (a.tensors()[i].w != c.tensors()[i].w) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("tensor inventory covers the whole architecture") {
  Network net(tiny_config());
  // conv0, conv1 (weight+bias), dense0 (w+b), three heads (w+b each).
  REQUIRE(net.tensors().size() == 12);
  bool has_value_head = false;
  for (const ParamTensor& t : net.tensors()) {
    CHECK(!t.name.empty());
    CHECK(t.w.size() == t.vel.size());
    std::size_t n = 1;
    for (int d : t.shape) n *= static_cast<std::size_t>(d);
    CHECK(t.w.size() == n);
    if (t.name.find("value") != std::string::npos) has_value_head = true;
  }
  CHECK(has_value_head);
}

TEST_CASE("finite differences confirm every gradient") {
  Network net(tiny_config());
  std::vector<NetExample> batch = sample_batch();
  net.compute_gradients(batch);

  int checked = 0;
  int worst_tensor = -1;
  double worst = 0.0;
  for (std::size_t ti = 0; ti < net.tensors().size(); ++ti) {
    ParamTensor& t = net.tensors()[ti];
    for (std::size_t i = 0; i < t.w.size(); ++i) {
      float saved = t.w[i];
      float hi = saved + 1e-3f;
      float lo = saved - 1e-3f;
      t.w[i] = hi;
      double loss_hi = mean_loss(net, batch);
      t.w[i] = lo;
      double loss_lo = mean_loss(net, batch);
      t.w[i] = saved;
      double h = static_cast<double>(hi) - static_cast<double>(lo);
      double fd = (loss_hi - loss_lo) / h;
      double analytic = t.grad[i];
      double rel = std::abs(fd - analytic) /
                   std::max(1e-6, std::abs(fd) + std::abs(analytic));
      if (rel > worst) {
        worst = rel;
        worst_tensor = static_cast<int>(ti);
      }
      ++checked;
    }
  }
  INFO("worst relative error ", worst, " in tensor ", worst_tensor);
  CHECK(checked > 300);
  CHECK(worst < 1e-3);
}

TEST_CASE("gradient stats are populated") {
  Network net(tiny_config());
  TrainStats stats = net.compute_gradients(sample_batch());
  CHECK(stats.examples == 3);
  CHECK(stats.loss > 0.0);
  CHECK(stats.grad_norm > 0.0);
  CHECK(stats.value_mse >= 0.0);
  CHECK(stats.policy_ce >= 0.0);
  CHECK(stats.loss ==
        doctest::Approx(stats.value_mse + stats.policy_ce).epsilon(1e-9));
  // compute_gradients alone must not advance the step counter.
  CHECK(net.training_steps() == 0);
}

TEST_CASE("plain SGD step matches the update rule exactly") {
  Network net(tiny_config());
  std::vector<NetExample> batch = sample_batch();

  Network probe(tiny_config());
  probe.compute_gradients(batch);

  TrainHyper hyper;
  hyper.learning_rate = 0.01;
  hyper.momentum = 0.0;
  net.train_batch(batch, hyper);
  CHECK(net.training_steps() == 1);

  for (std::size_t ti = 0; ti < net.tensors().size(); ++ti) {
    const ParamTensor& before = probe.tensors()[ti];
    const ParamTensor& after = net.tensors()[ti];
    for (std::size_t i = 0; i < before.w.size(); ++i) {
      float vel = static_cast<float>(before.grad[i]);
      float expect = static_cast<float>(before.w[i] - 0.01 * vel);
      CHECK(after.w[i] == expect);
      CHECK(after.vel[i] == vel);
    }
  }
}

TEST_CASE("momentum accumulates velocity across steps") {
  Network net(tiny_config());
  std::vector<NetExample> batch = sample_batch();
  TrainHyper hyper;
  hyper.learning_rate = 0.01;
  hyper.momentum = 0.9;
  net.train_batch(batch, hyper);
  float vel_after_one = net.tensors()[0].vel[0];
  net.train_batch(batch, hyper);
  // Same-direction gradients grow the velocity under momentum.
  CHECK(std::abs(net.tensors()[0].vel[0]) >= std::abs(vel_after_one) * 0.5);
  CHECK(net.training_steps() == 2);
}

TEST_CASE("training drives the loss down and overfits one example") {
  Network net(tiny_config());
  NetExample ex;
  ex.input = {0.5, 1.0, 0.25, 0.0, 1.0};
  ex.p_head = true;
  ex.pi = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  ex.z = 1.0;
  std::vector<NetExample> batch{ex};

  double initial = mean_loss(net, batch);
  TrainHyper hyper;
  hyper.learning_rate = 0.05;
  hyper.momentum = 0.9;
  double final_loss = initial;
  for (int step = 0; step < 2000 && final_loss >= 1e-3; ++step) {
    final_loss = net.train_batch(batch, hyper).loss;
  }
  CHECK(final_loss < 1e-3);
  CHECK(final_loss < initial);
}

TEST_CASE("checkpoint round trip is bit-exact") {
  Network net(tiny_config());
  net.train_batch(sample_batch(), TrainHyper{});

  std::ostringstream first;
  net.save(first);
  std::istringstream in(first.str());
  Network back = Network::load(in);

  CHECK(back.config() == net.config());
  CHECK(back.training_steps() == net.training_steps());
  CHECK(back.rng_state() == net.rng_state());
  REQUIRE(back.tensors().size() == net.tensors().size());
  for (std::size_t i = 0; i < net.tensors().size(); ++i) {
    const ParamTensor& a = net.tensors()[i];
    const ParamTensor& b = back.tensors()[i];
    CHECK(a.name == b.name);
    CHECK(a.shape == b.shape);
    REQUIRE(a.w.size() == b.w.size());
    CHECK(std::memcmp(a.w.data(), b.w.data(), a.w.size() * sizeof(float)) ==
          0);
    CHECK(std::memcmp(a.vel.data(), b.vel.data(),
                      a.vel.size() * sizeof(float)) == 0);
  }

  // Save of the loaded copy reproduces the byte stream.
  std::ostringstream second;
  back.save(second);
  CHECK(first.str() == second.str());

  // Identical evaluation after the round trip.
  std::array<double, 5> x{0.3, 0.7, 0.2, 0.1, -1.0};
  PolicyValue pa = net.evaluate(x);
  PolicyValue pb = back.evaluate(x);
  CHECK(pa.policy_p == pb.policy_p);
  CHECK(pa.policy_op == pb.policy_op);
  CHECK(pa.value == pb.value);
}

TEST_CASE("checkpoint rejects corruption distinctly") {
  Network net(tiny_config());
  std::ostringstream out;
  net.save(out);
  std::string blob = out.str();

  SUBCASE("bad magic") {
    std::string bad = blob;
    bad[0] = 'X';
    std::istringstream in(bad);
    CHECK_THROWS_AS(Network::load(in), CheckpointError);
  }
  SUBCASE("unsupported version") {
    std::string bad = blob;
    bad[8] = 2;  // little-endian version word
    std::istringstream in(bad);
    CHECK_THROWS_AS(Network::load(in), CheckpointVersionError);
  }
  SUBCASE("truncated payload") {
    std::string bad = blob.substr(0, blob.size() / 2);
    std::istringstream in(bad);
    CHECK_THROWS_AS(Network::load(in), CheckpointError);
  }
  SUBCASE("truncated header") {
    std::string bad = blob.substr(0, 10);
    std::istringstream in(bad);
    CHECK_THROWS_AS(Network::load(in), CheckpointError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(Network::load("/nonexistent/net.ckpt"), CheckpointError);
  }
}

TEST_CASE("rejects malformed training targets") {
  Network net(tiny_config());
  NetExample ex;
  ex.input = {0.5, 1.0, 0.25, 0.0, 1.0};
  ex.p_head = true;
  ex.pi = {1.0};  // wrong head width
  ex.z = 1.0;
  CHECK_THROWS(net.compute_gradients({ex}));
}
