#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "arqshare/channel.hpp"
#include "arqshare/error.hpp"
#include "oracles.hpp"

using namespace arqshare;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(MarcumQ, FrozenHighPrecisionValues) {
  // 40-digit reference values computed once with mpmath
  EXPECT_NEAR(marcum_q1(1.0, 1.0), 0.73287980379682021825, 1e-14);
  EXPECT_DOUBLE_EQ(marcum_q1(0.0, 2.0), std::exp(-2.0));
  EXPECT_DOUBLE_EQ(marcum_q1(3.0, 0.0), 1.0);
}

TEST(MarcumQ, MatchesQuadratureOnGrid) {
  for (double a : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 15.0}) {
    for (double b : {0.01, 0.2, 0.7, 1.5, 3.0, 6.0, 10.0, 20.0}) {
      SCOPED_TRACE(testing::Message() << "a=" << a << " b=" << b);
      EXPECT_NEAR(marcum_q1(a, b), oracle::marcum_q1(a, b), 1e-12);
      EXPECT_NEAR(marcum_p1(a, b), 1.0 - oracle::marcum_q1(a, b), 1e-12);
    }
  }
}

TEST(MarcumQ, ComplementKeepsRelativeAccuracy) {
  // 1 - Q_1(0, b) = 1 - exp(-b^2/2)
  for (double b : {1e-6, 1e-4, 1e-2, 0.3}) {
    EXPECT_LT(rel(marcum_p1(0.0, b), -std::expm1(-b * b / 2)), 1e-13) << b;
  }
}

TEST(MarcumQ, RejectsBadArguments) {
  EXPECT_THROW(marcum_q1(-1.0, 1.0), DomainError);
  EXPECT_THROW(marcum_q1(1.0, -0.5), DomainError);
  EXPECT_THROW(marcum_q1(NAN, 1.0), DomainError);
  EXPECT_THROW(marcum_q1(1.0, INFINITY), DomainError);
}

TEST(MarcumQ, MonotoneInBothArguments) {
  double prev = 1.0;
  for (double b = 0.0; b < 8.0; b += 0.25) {
    const double q = marcum_q1(1.5, b);
    EXPECT_LE(q, prev + 1e-15);
    prev = q;
  }
  prev = 0.0;
  for (double a = 0.0; a < 8.0; a += 0.25) {
    const double q = marcum_q1(a, 2.0);
    EXPECT_GE(q, prev - 1e-15);
    prev = q;
  }
}

TEST(Outage, RayleighClosedForm) {
  const LinkParams l{0.0, 10.0, 1.0};
  EXPECT_LT(rel(outage_probability(l), 0.095162581964040426836), 1e-14);
  EXPECT_DOUBLE_EQ(outage_threshold(l), 0.1);
}

TEST(Outage, FrozenRicianValue) {
  EXPECT_LT(rel(outage_probability({0.5, 10.0, 1.0}), 0.073346387359634964626), 1e-13);
}

TEST(Outage, MatchesNoncentralChiSquaredCdf) {
  for (double c : {0.0, 0.2, 0.5, 0.8, 0.95}) {
    for (double snr_db : {0.0, 5.0, 10.0, 20.0, 30.0}) {
      for (double rate : {0.5, 1.0, 2.0}) {
        const LinkParams l{c, db_to_linear(snr_db), rate};
        const double ref = oracle::outage(c, l.snr, rate);
        SCOPED_TRACE(testing::Message() << c << " " << snr_db << " " << rate);
        EXPECT_LT(rel(outage_probability(l), ref), 1e-9);
      }
    }
  }
}

TEST(Outage, DecreasesWithSnrAndIncreasesWithRate) {
  for (double c : {0.0, 0.3, 0.7}) {
    double prev = 1.0;
    for (double db = -5; db <= 30; db += 2.5) {
      const double p = outage_probability({c, db_to_linear(db), 1.0});
      EXPECT_LT(p, prev);
      prev = p;
    }
    prev = 0.0;
    for (double r = 0.25; r <= 4.0; r += 0.25) {
      const double p = outage_probability({c, 10.0, r});
      EXPECT_GT(p, prev);
      prev = p;
    }
  }
}

TEST(Outage, StaysInsideOpenInterval) {
  EXPECT_GT(outage_probability({0.9, db_to_linear(80), 0.01}), 0.0);
  EXPECT_LT(outage_probability({0.0, db_to_linear(-60), 8.0}), 1.0);
}

TEST(Outage, ValidatesLinks) {
  EXPECT_THROW(outage_probability({1.0, 10.0, 1.0}), DomainError);
  EXPECT_THROW(outage_probability({-0.1, 10.0, 1.0}), DomainError);
  EXPECT_THROW(outage_probability({0.5, 0.0, 1.0}), DomainError);
  EXPECT_THROW(outage_probability({0.5, 10.0, -1.0}), DomainError);
  const std::vector<LinkParams> links{{0.5, 10, 1}, {1.5, 10, 1}};
  try {
    outage_vector(links);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("hop 2"), std::string::npos) << e.what();
  }
}

TEST(OutageVector, RejectsOutOfRange) {
  EXPECT_THROW(OutageVector(std::vector<double>{}), DomainError);
  EXPECT_THROW(OutageVector({0.1, 0.0}), DomainError);
  EXPECT_THROW(OutageVector({1.0}), DomainError);
  EXPECT_NO_THROW(OutageVector({0.5, 1e-9}));
}

TEST(Outage, EmpiricalFadingFrequencyMatches) {
  // |h|^2 sampled straight from the model definition
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  for (double c : {0.0, 0.5, 0.8}) {
    const LinkParams l{c, 10.0, 1.0};
    const double thr = outage_threshold(l);
    const int trials = 400000;
    int fails = 0;
    for (int i = 0; i < trials; ++i) {
      const double re = std::sqrt(c / 2) + std::sqrt((1 - c) / 2) * n01(gen);
      const double im = std::sqrt(c / 2) + std::sqrt((1 - c) / 2) * n01(gen);
      fails += re * re + im * im < thr;
    }
    const double p = outage_probability(l);
    const double se = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(static_cast<double>(fails) / trials, p, 4 * se) << c;
  }
}
