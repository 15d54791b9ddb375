#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "influencerrank/errors.hpp"
#include "influencerrank/trainer.hpp"
#include "test_util.hpp"

using namespace infrank;
using namespace infrank::testing;

namespace {

// Plackett-Luce NLL straight from the definition, in long double.
long double listmle_oracle(const std::vector<double>& s, const std::vector<std::size_t>& order) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < order.size(); ++i) {
    long double z = 0.0L;
    for (std::size_t j = i; j < order.size(); ++j) z += std::exp(static_cast<long double>(s[order[j]]));
    total += std::log(z) - s[order[i]];
  }
  return total;
}

TrainConfig tiny_train(std::size_t epochs = 3) {
  TrainConfig c;
  c.list_size = 4;
  c.lists_per_batch = 8;
  c.epochs = epochs;
  c.learning_rate = 0.01;
  c.history = 3;
  c.validation_fraction = 0.2;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("listmle examples") {
    const std::vector<double> eng{0.2, 0.1};
    CHECK(std::abs(listmle_loss(std::vector<double>{0.0, 0.0}, eng) - std::log(2.0)) <= 1e-15);
    CHECK(listmle_loss(std::vector<double>{10.0, 0.0}, eng) == doctest::Approx(std::log1p(std::exp(-10.0))));
    CHECK(listmle_loss(std::vector<double>{0.0, 10.0}, eng) == doctest::Approx(10.0 + std::log1p(std::exp(-10.0))));
    CHECK(listmle_loss(std::vector<double>{3.0}, std::vector<double>{0.5}) == 0.0);
  }

  TEST_CASE("truth order breaks ties by id") {
    const std::vector<double> eng{0.1, 0.3, 0.1, 0.3};
    const std::vector<std::size_t> ids{9, 4, 2, 7};
    CHECK(truth_order(eng, ids) == std::vector<std::size_t>{1, 3, 2, 0});
  }

  TEST_CASE("listmle matches the definition, is non-negative and shift invariant") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t m = 1 + rng.below(10);
      std::vector<double> s(m), e(m);
      for (auto& v : s) v = rng.uniform(-5.0, 5.0);
      for (auto& v : e) v = rng.uniform(0.0, 0.2);
      const std::vector<std::size_t> ids;
      const double loss = listmle_loss(s, e);
      CHECK(loss >= 0.0);
      std::vector<std::size_t> pos(m);
      std::iota(pos.begin(), pos.end(), 0);
      CHECK(std::abs(loss - static_cast<double>(listmle_oracle(s, truth_order(e, pos)))) <= 1e-12);
      auto shifted = s;
      const double c = rng.uniform(-100.0, 100.0);
      for (auto& v : shifted) v += c;
      CHECK(std::abs(listmle_loss(shifted, e) - loss) <= 1e-9);

      // gradient vs central differences of the oracle
      const auto g = listmle_gradient(s, e);
      double gsum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        auto up = s, dn = s;
        up[i] += 1e-5;
        dn[i] -= 1e-5;
        const auto order = truth_order(e, pos);
        const double fd = static_cast<double>((listmle_oracle(up, order) - listmle_oracle(dn, order)) / 2e-5L);
        CHECK(std::abs(g[i] - fd) < 1e-6);
        gsum += g[i];
      }
      CHECK(std::abs(gsum) <= 1e-12);
    }
  }

  TEST_CASE("listmle handles large scores") {
    const std::vector<double> s{800.0, -800.0, 0.0};
    const std::vector<double> e{0.0, 0.1, 0.2};
    CHECK(std::isfinite(listmle_loss(s, e)));
    for (double g : listmle_gradient(s, e)) CHECK(std::isfinite(g));
  }

  TEST_CASE("batch loss is the mean of list losses and its gradient agrees") {
    Rng rng(2);
    const std::vector<double> eng{0.01, 0.05, 0.02, 0.09, 0.03, 0.07};
    const std::vector<std::size_t> pool{0, 1, 2, 3, 4, 5};
    const auto lists = sample_lists(pool, eng, 3, 4, rng);
    const auto sc = random_dense(6, 1, rng);
    double expected = 0.0;
    for (const auto& l : lists) {
      std::vector<double> s;
      for (auto id : l.ids) s.push_back(sc(id, 0));
      expected += listmle_loss(s, l.engagement, l.ids);
    }
    expected /= static_cast<double>(lists.size());
    Tape t;
    CHECK(listmle_batch(t.constant(sc), lists).value()(0, 0) == doctest::Approx(expected).epsilon(1e-14));

    std::vector<DenseMatrix> p{sc};
    const auto r = finite_diff_check(p, [&](Tape&, std::span<const Var> v) { return listmle_batch(v[0], lists); }, 1e-6);
    CHECK(r.max_rel_error < 1e-6);
  }

  TEST_CASE("sampled ids are distinct and uniform") {
    std::vector<std::size_t> pool(25);
    std::iota(pool.begin(), pool.end(), 0);
    const std::vector<double> eng(25, 0.05);
    Rng rng(77);
    const std::size_t m = 5, n = 2000;
    const auto lists = sample_lists(pool, eng, m, n, rng);
    CHECK(lists.size() == n);
    std::vector<int> counts(25, 0);
    for (const auto& l : lists) {
      CHECK(std::set<std::size_t>(l.ids.begin(), l.ids.end()).size() == m);
      for (auto id : l.ids) ++counts[id];
    }
    const double expected = static_cast<double>(n * m) / 25.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 36.415);  // 24 df, 5%
    CHECK_THROWS_AS(sample_lists(std::span(pool).first(3), eng, 4, 1, rng), ContractError);
  }

  TEST_CASE("split is deterministic, disjoint and complete") {
    const auto [fit, val] = split_influencers(50, 0.2, 3);
    CHECK(val.size() == 10);
    CHECK(fit.size() == 40);
    std::set<std::size_t> all(fit.begin(), fit.end());
    all.insert(val.begin(), val.end());
    CHECK(all.size() == 50);
    CHECK(split_influencers(50, 0.2, 3) == std::make_pair(fit, val));
  }

  TEST_CASE("training is deterministic and lowers the loss") {
    const auto net = tiny_net(30, 24, 3, 5, 4);
    std::vector<double> eng(24);
    for (std::size_t i = 0; i < eng.size(); ++i) eng[i] = net.features[2](i, 0) * 0.05 + 0.05;
    const auto cfg = tiny_train(40);
    const auto a = train(net, eng, cfg, init_params(small_config(5, 1)));
    const auto b = train(net, eng, cfg, init_params(small_config(5, 1)));
    CHECK(a.params == b.params);
    REQUIRE(a.history.size() == 40);
    for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].mean_loss == b.history[i].mean_loss);
    double early = 0.0, late = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      early += a.history[i].mean_loss;
      late += a.history[a.history.size() - 1 - i].mean_loss;
    }
    CHECK(late < early);
    for (const auto& r : a.history) CHECK(std::isnan(r.wall_seconds));
  }

  TEST_CASE("validation cadence") {
    const auto net = tiny_net(20, 16, 2, 5, 5);
    const std::vector<double> eng(16, 0.03);
    auto cfg = tiny_train(5);
    cfg.validate_every = 2;
    std::size_t calls = 0;
    const auto r = train(net, eng, cfg, init_params(small_config(5)), {},
                         [&](const EpochRecord&, const ModelParams&) { ++calls; });
    CHECK(calls == 5);
    CHECK(std::isnan(r.history[0].val_ndcg10));
    CHECK_FALSE(std::isnan(r.history[1].val_ndcg10));
    CHECK_FALSE(std::isnan(r.history[4].val_ndcg50));
    const auto csv = history_csv(r.history, "note");
    CHECK(csv.rfind("# note\nepoch,mean_loss,val_ndcg@10,val_ndcg@50,wall_time_s\n", 0) == 0);
    CHECK(csv.find("\n1,") != std::string::npos);
  }

  TEST_CASE("non-finite input stops training with a numerical error") {
    auto net = tiny_net(20, 16, 2, 5, 6);
    net.features[1](3, 2) = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> eng(16, 0.03);
    CHECK_THROWS_AS(train(net, eng, tiny_train(2), init_params(small_config(5))), NumericalError);
  }

  TEST_CASE("bad train configs") {
    auto c = tiny_train();
    c.list_size = 0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = tiny_train();
    c.learning_rate = -1.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    const auto net = tiny_net(6, 4, 1, 5, 1);
    auto big_lists = tiny_train();
    big_lists.list_size = 5;
    CHECK_THROWS_AS(train(net, std::vector<double>(4, 0.1), big_lists, init_params(small_config(5))), ContractError);
    CHECK_THROWS_AS(train(net, std::vector<double>(3, 0.1), tiny_train(), init_params(small_config(5))), ContractError);
  }
}
