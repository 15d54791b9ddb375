#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "influencerrank/checkpoint.hpp"
#include "influencerrank/config.hpp"
#include "influencerrank/errors.hpp"
#include "test_util.hpp"

using namespace infrank;
using json = nlohmann::json;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const RunConfig c = resolve_run_config({});
    CHECK(c.seed == 0);
    CHECK(c.eval_k == std::vector<std::size_t>{1, 10, 50, 100, 200});
    CHECK(c.rbp_p == 0.95);
    CHECK(c.min_freq == 0.01);
    CHECK(c.seeds == 5);
    CHECK(c.model.input_dim == 67);
    CHECK(c.model.d_embed == 128);
    CHECK(c.model.gcn_layers == 2);
    CHECK(c.model.gcn_hidden == 128);
    CHECK(c.model.gru_hidden == 128);
    CHECK(c.model.mlp_hidden == 128);
    CHECK(c.model.dropout == 0.5);
    CHECK(c.train.list_size == 10);
    CHECK(c.train.lists_per_batch == 32);
    CHECK(c.train.learning_rate == 0.001);
    CHECK(c.train.epochs == 100);
    CHECK(c.train.history == 6);
    CHECK(c.train.validation_fraction == 0.2);
    CHECK(c.world.n_influencers == 200);
    CHECK(c.world.n_windows == 8);
    CHECK(c.world.rho == 0.9);
    CHECK(c.world.trending_boost == 0.0);
  }

  TEST_CASE("patches merge in order and the seed propagates") {
    const RunConfig c = resolve_run_config({json{{"seed", 3}, {"train", {{"epochs", 7}}}},
                                            json{{"train", {{"learning_rate", 0.01}}}},
                                            json{{"train", {{"epochs", 9}}}}});
    CHECK(c.train.epochs == 9);
    CHECK(c.train.learning_rate == 0.01);
    CHECK(c.train.list_size == 10);
    CHECK(c.model.seed == 3);
    CHECK(c.world.seed == 3);
    CHECK(c.train.seed == 3);
  }

  TEST_CASE("json round trip") {
    const RunConfig c = resolve_run_config({json{{"model", {{"dropout", 0.25}}}, {"eval_k", {5, 20}}}});
    CHECK(run_config_from_json(to_json(c)) == c);
    CHECK(world_config_from_json(to_json(c.world)) == c.world);
  }

  TEST_CASE("unknown keys, wrong types and bad values are rejected") {
    CHECK_THROWS_AS(resolve_run_config({json{{"bogus", 1}}}), ContractError);
    CHECK_THROWS_AS(resolve_run_config({json{{"train", {{"epoch", 1}}}}}), ContractError);
    CHECK_THROWS_AS(resolve_run_config({json{{"train", {{"epochs", "many"}}}}}), ContractError);
    CHECK_THROWS_AS(resolve_run_config({json{{"rbp_p", 1.0}}}), ContractError);
    CHECK_THROWS_AS(resolve_run_config({json{{"eval_k", json::array()}}}), ContractError);
    CHECK_THROWS_AS(resolve_run_config({json::array()}), ContractError);
  }

  TEST_CASE("paths resolve under out_dir") {
    const RunConfig c = resolve_run_config({json{{"out_dir", "o"}}});
    CHECK(c.data_path().parent_path() == std::filesystem::path("o"));
    const RunConfig d = resolve_run_config({json{{"out_dir", "o"}, {"data_dir", "elsewhere"}}});
    CHECK(d.data_path() == std::filesystem::path("elsewhere"));
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip is exact") {
    Checkpoint c;
    c.params = init_params(testing::small_config(67, 9));
    c.params.feature_scale.assign(67, 0.0);
    for (std::size_t i = 0; i < 67; ++i) c.params.feature_scale[i] = 1.0 + 1.0 / static_cast<double>(i + 3);
    c.params.tensors[0](0, 0) = -0.0;
    c.params.tensors[1](0, 0) = 1e-310;
    c.metadata = {{"epoch", 4}, {"note", "x"}};
    const auto bytes = encode_checkpoint(c);
    CHECK(bytes.compare(0, 8, std::string("INFRANK\0", 8)) == 0);
    const auto back = decode_checkpoint(bytes);
    CHECK(back.params == c.params);
    CHECK(std::signbit(back.params.tensors[0](0, 0)));
    CHECK(back.metadata == c.metadata);
    CHECK(encode_checkpoint(back) == bytes);

    const auto file = std::filesystem::temp_directory_path() / "infrank_test.ckpt";
    save_checkpoint(file, c);
    CHECK(load_checkpoint(file).params == c.params);
    std::filesystem::remove(file);
  }

  TEST_CASE("corrupt files are data errors") {
    Checkpoint c;
    c.params = init_params(testing::small_config(67));
    const auto bytes = encode_checkpoint(c);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad), DataError);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), DataError);
    CHECK_THROWS_AS(decode_checkpoint(bytes + "z"), DataError);
    CHECK_THROWS_AS(decode_checkpoint(""), DataError);
    auto version = bytes;
    version[8] = 9;
    CHECK_THROWS_AS(decode_checkpoint(version), DataError);
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/infrank.ckpt"), DataError);
  }
}
