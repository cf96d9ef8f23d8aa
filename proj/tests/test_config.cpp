#include <string>

#include <gtest/gtest.h>

#include "arqshare/config.hpp"
#include "arqshare/error.hpp"
#include "json.hpp"

using namespace arqshare;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Budget, Examples) {
  EXPECT_EQ(budget({10e-3, 0.6e-3, 0.4e-3}), 10);
  EXPECT_EQ(budget({10e-3, 0.7e-3, 0.4e-3}), 9);
  EXPECT_EQ(budget({1e-3, 0.6e-3, 0.4e-3}), 1);
  EXPECT_THROW(budget({0.9e-3, 0.6e-3, 0.4e-3}), DomainError);
  EXPECT_THROW(budget({1e-3, 0.0, 0.4e-3}), DomainError);
  EXPECT_THROW(budget({-1.0, 0.1, 0.1}), DomainError);
}

TEST(ParseConfig, FullDocument) {
  const auto cfg = parse_config(R"({
    "hops": 3, "los": [0.1, 0.5, 0.9], "snr_db": [5, 10], "rate": 2,
    "q_sum": [6, 7], "schemes": ["semi_cumulative", "non_cooperative"],
    "methods": ["onefold", "greedy"], "trials": 1000, "seed": 12,
    "channel_mode": "fading", "allocation": [2, 2, 2], "snr_offset_db": [0, -3, 1]
  })");
  EXPECT_EQ(cfg.hops, 3);
  EXPECT_EQ(cfg.los, (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_EQ(cfg.snr_db, (std::vector<double>{5, 10}));
  EXPECT_EQ(cfg.q_sum, (std::vector<int>{6, 7}));
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::onefold, Method::greedy}));
  EXPECT_EQ(cfg.schemes.size(), 2u);
  EXPECT_EQ(cfg.trials, 1000u);
  EXPECT_EQ(cfg.seed, 12u);
  EXPECT_EQ(cfg.channel_mode, ChannelMode::fading);
  EXPECT_EQ(cfg.allocation, (std::vector<int>{2, 2, 2}));
  const auto links = links_at(cfg, 10);
  EXPECT_DOUBLE_EQ(links[1].snr, db_to_linear(7));
  EXPECT_DOUBLE_EQ(links[2].rate, 2.0);
}

TEST(ParseConfig, DefaultsAndScalars) {
  const auto cfg = parse_config(R"({"hops": 4, "los": 0.3, "snr_db": 12, "q_sum": 8})");
  EXPECT_EQ(cfg.los, std::vector<double>(4, 0.3));
  EXPECT_EQ(cfg.snr_db, std::vector<double>{12});
  EXPECT_EQ(cfg.schemes, std::vector<Scheme>{Scheme::semi_cumulative});
  EXPECT_EQ(cfg.methods, std::vector<Method>{Method::exhaustive});
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.trials, 0u);
  EXPECT_DOUBLE_EQ(cfg.rate, 1.0);
  EXPECT_EQ(parse_config(R"({"los": [0.1, 0.2], "snr_db": 1, "q_sum": 3})").hops, 2);
}

TEST(ParseConfig, LatencyTriple) {
  const auto cfg =
      parse_config(R"({"hops": 2, "los": 0, "snr_db": 10, "tau_total": 0.01, "tau_p": 0.0006, "tau_d": 0.0004})");
  EXPECT_EQ(cfg.q_sum, std::vector<int>{10});
  ASSERT_TRUE(cfg.latency.has_value());
}

TEST(ParseConfig, RejectionsNameTheField) {
  EXPECT_NE(message_of(R"({"hops": 3, "los": [0.5, 1.0, 0.5], "snr_db": 10, "q_sum": 6})").find("los[1]"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 2, "los": 0.5, "snr_db": 10})").find("q_sum"), std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 2, "los": 0.5, "snr_db": 10, "q_sum": 4, "tau_total": 1, "tau_p": 0.1, "tau_d": 0.1})")
                .find("not both"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 2, "los": 0.5, "snr_db": 10, "q_sum": 4, "method": "sa"})").find("method"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 2, "los": 0.5, "snr_db": 10, "q_sum": 4, "colour": 1})").find("colour"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 0, "los": [], "snr_db": 10, "q_sum": 4})").find("hops"), std::string::npos);
  EXPECT_NE(message_of("[1, 2]").find("object"), std::string::npos);
  EXPECT_NE(message_of("{").find("JSON"), std::string::npos);
  EXPECT_NE(message_of(R"({"hops": 2, "los": 0.5, "snr_db": 10, "q_sum": 4, "allocation": [1, 0]})")
                .find("allocation"),
            std::string::npos);
}

TEST(ParseConfig, ErrorsAreAggregated) {
  const auto msg = message_of(R"({"hops": 2, "los": [0.5, 2], "snr_db": "ten", "q_sum": 0, "rate": -1})");
  EXPECT_NE(msg.find("snr_db"), std::string::npos) << msg;
  EXPECT_NE(msg.find("los[1]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("rate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("q_sum"), std::string::npos) << msg;
}

TEST(Describe, EchoesDerivedOutage) {
  const auto cfg = parse_config(R"({"hops": 2, "los": [0.5, 0.0], "snr_db": 10, "q_sum": 3})");
  const auto j = nlohmann::json::parse(describe(cfg));
  EXPECT_EQ(j["hops"], 2);
  const double p0 = j["outage"][0]["outage"][0];
  const double p1 = j["outage"][0]["outage"][1];
  EXPECT_NEAR(p0, 0.073346387359634964626, 1e-15);
  EXPECT_NEAR(p1, 0.095162581964040426836, 1e-15);
  // round trip through the normalised form
  auto again = j;
  again.erase("outage");
  EXPECT_EQ(parse_config(again.dump()).los, cfg.los);
}
