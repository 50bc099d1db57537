#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "llespec/errors.hpp"
#include "llespec/levy_driver.hpp"
#include "random_drivers.hpp"

using namespace llespec;

TEST_SUITE("levy_driver") {
  TEST_CASE("brownian driver gives kappa n^2 / 2") {
    const auto eta = eta_sequence({2.0, 0.0, {}}, 3);
    REQUIRE(eta.n_max() == 3);
    CHECK(eta[0] == 0.0);
    CHECK(eta[1] == 1.0);
    CHECK(eta[2] == 4.0);
    CHECK(eta[3] == 9.0);
    CHECK_FALSE(eta.formal());
    REQUIRE(eta.exact());
    CHECK((*eta.exact())[2] == 9);
  }

  TEST_CASE("uniform jumps contribute their total rate") {
    const auto eta = eta_sequence({0.0, 5.0, {}}, 7);
    for (int n = 1; n <= 7; ++n) CHECK(eta[n] == 5.0);
  }

  TEST_CASE("atom at pi alternates") {
    const double r = 0.75;
    const auto eta = eta_sequence({0.0, 0.0, {{std::numbers::pi, r}}}, 2);
    CHECK(eta[1] == doctest::Approx(2 * r).epsilon(1e-15));
    CHECK(std::fabs(eta[2]) < 1e-15);
  }

  TEST_CASE("perturbed sle driver lands on eta_6 = 8") {
    for (double dk : {1e-6, 1e-5, 1e-4}) {
      const auto eta = eta_sequence({4.0 / 9.0 - dk, 18 * dk, {}}, 6);
      CHECK(eta[6] == doctest::Approx(8.0).epsilon(1e-14));
    }
  }

  TEST_CASE("rational input keeps exact values") {
    const auto eta = eta_sequence({4.0 / 9.0, 0.0, {}}, 6);
    REQUIRE(eta.exact());
    CHECK((*eta.exact())[5] == 8);
    CHECK(eta[6] == 8.0);
  }

  TEST_CASE("invalid drivers name the field") {
    auto message = [](const LevyDriver& d) {
      try {
        (void)eta_sequence(d, 3);
      } catch (const ValidationError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message({-1.0, 0.0, {}}).find("kappa") != std::string::npos);
    CHECK(message({0.0, -1.0, {}}).find("uniform_rate") != std::string::npos);
    CHECK(message({0.0, 0.0, {{0.0, 1.0}}}).find("angle") != std::string::npos);
    CHECK(message({0.0, 0.0, {{4.0, 1.0}}}).find("angle") != std::string::npos);
    CHECK(message({0.0, 0.0, {{1.0, 0.0}}}).find("rate") != std::string::npos);
    CHECK(message({NAN, 0.0, {}}).find("kappa") != std::string::npos);
    CHECK_THROWS_AS((void)eta_sequence({1.0, 0.0, {}}, 0), ValidationError);
  }

  TEST_CASE("formal sequences") {
    const std::vector<double> ok{3.0, 4.0};
    const auto eta = validate_eta(ok);
    CHECK(eta.formal());
    CHECK(eta[2] == 4.0);
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK(validate_eta(zeros).n_max() == 3);
    const std::vector<double> neg{1.0, -1.0};
    try {
      (void)validate_eta(neg);
      FAIL("accepted a negative entry");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    const std::vector<double> inf{INFINITY};
    CHECK_THROWS_AS((void)validate_eta(inf), ValidationError);
    CHECK_THROWS_AS((void)eta[3], ValidationError);
    CHECK_THROWS_AS((void)eta[-1], ValidationError);
  }

  TEST_CASE("prefix") {
    const auto eta = eta_sequence({2.0, 0.0, {}}, 5).prefix(2);
    CHECK(eta.n_max() == 2);
    CHECK(eta[2] == 4.0);
  }

  TEST_CASE("random drivers: lower bound, eta_2 <= 4 eta_1, determinism") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const auto d = testing::random_driver(rng);
      const auto e1 = eta_sequence(d, 12);
      const auto e2 = eta_sequence(d, 12);
      for (int n = 1; n <= 12; ++n) {
        CHECK(e1[n] >= d.kappa * n * n / 2.0 - 1e-12);
        CHECK(std::memcmp(&e1.values()[0], &e2.values()[0], 12 * sizeof(double)) == 0);
      }
      CHECK(e1[2] <= 4.0 * e1[1] * (1 + 1e-14));
    }
  }
}
