#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "llespec/closed_forms.hpp"
#include "llespec/errors.hpp"
#include "llespec/spectral_solver.hpp"
#include "oracles.hpp"
#include "random_drivers.hpp"

using namespace llespec;

namespace {

EtaSequence formal(std::vector<double> v) { return validate_eta(v); }

std::vector<std::complex<double>> as_complex(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

bool conjugate_closed(const SpectrumResult& s) {
  std::vector<std::complex<double>> conj;
  for (auto z : s.eigenvalues) conj.push_back(std::conj(z));
  return oracle::multiset_distance(s.eigenvalues, conj) < 1e-10 * (1 + std::abs(s.eigenvalues.front()));
}

}  // namespace

TEST_SUITE("spectral_solver") {
  TEST_CASE("unbounded N=2, eta_1=1") {
    const auto s = eigen_spectrum(build_matrices(formal({1.0}), 2, Variant::Unbounded));
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(s.eigenvalues[0].real() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s.eigenvalues[1].real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.max_real == doctest::Approx(4.0));
    CHECK(s.all_real);
    CHECK(s.symmetric_path);
    CHECK(s.resonant);  // 4 - 1 = 3
  }

  TEST_CASE("truncated sle N=6 degeneracies") {
    const auto eta = eta_sequence({4.0 / 9.0, 0.0, {}}, 6);
    const auto s = eigen_spectrum(build_matrices(eta, 6, Variant::Unbounded));
    const std::vector<double> expected{14.0 / 3, 2.0, 2.0 / 9, 2.0 / 9, -2.0 / 3, -2.0 / 3};
    CHECK(oracle::multiset_distance(s.eigenvalues, as_complex(expected)) < 1e-8);
    CHECK(s.clusters.size() == 4);
    int doubles = 0;
    for (const auto& c : s.clusters) doubles += c.multiplicity == 2;
    CHECK(doubles == 2);
    CHECK(s.multiplicity_of(0) == 1);
    CHECK(s.multiplicity_of(2) == 2);
    CHECK(s.max_real == doctest::Approx(14.0 / 3).epsilon(1e-12));
  }

  TEST_CASE("bounded N=3, kappa_3 sle") {
    const auto s = eigen_spectrum(build_matrices(formal({1.0 / 9, 4.0 / 9}), 3, Variant::Bounded));
    const std::vector<double> expected{1.0 / 9, -4.0 / 3, -7.0 / 3};
    CHECK(oracle::multiset_distance(s.eigenvalues, as_complex(expected)) < 1e-12);
    CHECK(s.n_nonneg_real == 1);
  }

  TEST_CASE("sorting order") {
    const auto eta = eta_sequence(truncated_sle_driver(6, Variant::Unbounded), 6);
    const auto pert = eta_sequence(perturbed_n6_driver(1e-5), 6);
    const auto s = eigen_spectrum(build_matrices(pert, 6, Variant::Unbounded));
    for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
      const auto p = s.eigenvalues[i - 1], q = s.eigenvalues[i];
      CHECK((p.real() > q.real() || (p.real() == q.real() && p.imag() <= q.imag())));
    }
    CHECK_FALSE(s.all_real);
    CHECK(conjugate_closed(s));
    (void)eta;
  }

  TEST_CASE("max_real_root") {
    const auto ple = recurrence_coefficients(formal({1.0, 1.0}), 3, Variant::Bounded);
    const auto r = max_real_root(ple);
    CHECK_FALSE(r.used_fallback);
    CHECK(r.value > 0.17);
    CHECK(r.value < 0.171);
    CHECK(charpoly_eval(ple, 0.17).sign() < 0);
    CHECK(charpoly_eval(ple, 0.171).sign() > 0);

    CHECK(max_real_root(recurrence_coefficients(formal({1.0}), 2, Variant::Unbounded)).value ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(max_real_root(recurrence_coefficients(formal({3.0}), 1, Variant::Unbounded)).value ==
          doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("max_real_root falls back at a double maximal root") {
    // P_4 = (beta - 1)^2 (beta^2 + 1): no sign change anywhere.
    CharPolyRecurrence rec;
    rec.b = {1.0, 1.0, 0.0, 0.0};
    rec.a = {0.0, 0.0, -1.0};
    const auto r = max_real_root(rec);
    CHECK(r.used_fallback);
    CHECK(r.value == doctest::Approx(1.0));
  }

  TEST_CASE("descartes") {
    const std::vector<double> u{4.0, -5.0, 1.0};
    CHECK(descartes_positive_count(u) == 2);
    const std::vector<double> one{1.0};
    CHECK(descartes_positive_count(one) == 0);
    const std::vector<double> gaps{-1.0, 0.0, 0.0, 1.0};
    CHECK(descartes_positive_count(gaps) == 1);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> d(0.01, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto rec = recurrence_coefficients(formal({d(rng), d(rng), d(rng)}), 4, Variant::Bounded);
      CHECK(descartes_positive_count(charpoly_coefficients(rec).values) == 1);
    }
  }

  TEST_CASE("classify_regime") {
    for (int n = 3; n <= 12; ++n) {
      const auto eta = eta_sequence({0.0, static_cast<double>(n - 2), {}}, n);
      CHECK(classify_regime(recurrence_coefficients(eta, n, Variant::Bounded)));
    }
    const auto sle6 = eta_sequence(truncated_sle_driver(6, Variant::Unbounded), 6);
    CHECK_FALSE(classify_regime(recurrence_coefficients(sle6, 6, Variant::Unbounded)));
    CHECK(classify_regime(recurrence_coefficients(formal({3.0}), 1, Variant::Unbounded)));
  }

  TEST_CASE("beta2 modes") {
    const auto sle2 = beta2(eta_sequence({2.0, 0.0, {}}, 10), Variant::Unbounded, 10);
    REQUIRE(sle2.truncated());
    CHECK(*sle2.truncation == 2);
    CHECK(sle2.beta2 == doctest::Approx(4.0).epsilon(1e-12));

    const auto b4 = beta2(eta_sequence({0.25, 0.0, {}}, 10), Variant::Bounded, 10);
    REQUIRE(b4.truncated());
    CHECK(*b4.truncation == 4);
    CHECK(b4.beta2 == doctest::Approx(0.125).epsilon(1e-10));

    Beta2Options with;
    with.with_sequence = true;
    const auto ple = beta2(eta_sequence({0.0, 1.0, {}}, 30), Variant::Bounded, 30, with);
    REQUIRE(ple.sequence.size() == 29);
    for (const auto& p : ple.sequence) {
      if (p.m >= 3) CHECK(std::fabs(p.beta_max - ple.beta2) < 1e-9);
    }

    const auto seq = beta2(eta_sequence({1.0, 0.0, {}}, 40), Variant::Unbounded, 40);
    CHECK_FALSE(seq.truncated());
    CHECK(seq.sequence.back().m == 40);
    CHECK(seq.beta2 == seq.sequence.back().beta_max);
    CHECK(seq.convergence_gap >= 0.0);
    CHECK(seq.converged == (seq.convergence_gap < 1e-9));

    CHECK_THROWS_AS((void)beta2(eta_sequence({1.0, 0.0, {}}, 5), Variant::Unbounded, 10),
                    ValidationError);
  }

  TEST_CASE("eigenvalues match polynomial roots") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (Variant var : {Variant::Unbounded, Variant::Bounded}) {
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(10);
        for (auto& x : v) x = u(rng);
        const int n = 1 + trial % 10;
        const auto rec = recurrence_coefficients(formal(v), n, var);
        const auto s = eigen_spectrum(build_matrices(formal(v), n, var));
        const auto roots = oracle::polynomial_roots(charpoly_coefficients(rec).values);
        double scale = 1.0;
        for (auto z : roots) scale = std::max(scale, std::abs(z));
        CAPTURE(n);
        CAPTURE(trial);
        CHECK(oracle::multiset_distance(s.eigenvalues, roots) < 1e-8 * scale);
      }
    }
  }

  TEST_CASE("random spectra: conjugate symmetry, realness, nonnegative eigenvalue, Gershgorin") {
    std::mt19937_64 rng(202);
    for (Variant var : {Variant::Unbounded, Variant::Bounded}) {
      for (int trial = 0; trial < 60; ++trial) {
        const int n = var == Variant::Unbounded ? 1 + trial % 10 : 3 + trial % 8;
        const auto d = testing::random_truncated_driver(rng, n, var);
        const auto eta = eta_sequence(d, n);
        const auto rec = recurrence_coefficients(eta, n, var);
        const auto s = eigen_spectrum(build_matrices(eta, n, var));
        CHECK(conjugate_closed(s));
        CHECK(s.n_nonneg_real >= 1);
        if (classify_regime(rec)) {
          CHECK(s.all_real);
          for (const auto& c : s.clusters) CHECK(c.multiplicity == 1);
        }
        for (auto z : s.eigenvalues) CHECK(z.real() <= gershgorin_upper(rec) + 1e-9);
        const auto root = max_real_root(rec);
        CHECK(root.value == doctest::Approx(s.max_real).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("perturbed bounded sle stays real with one nonnegative eigenvalue") {
    // The admissible perturbation shrinks quickly with N: the spectrum has
    // close, ill-conditioned pairs (N = 8: -3.78125 and -3.8125).
    const std::vector<std::pair<int, double>> amplitude{{3, 1e-3}, {4, 1e-3}, {5, 1e-4},
                                                        {6, 1e-4}, {7, 1e-5}, {8, 1e-7}};
    std::mt19937_64 rng(303);
    for (const auto& [n, amp] : amplitude) {
      std::uniform_real_distribution<double> du(-amp, amp);
      const double kn = 2.0 * (n - 2) / (n * n);
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v;
        for (int i = 1; i < n; ++i) v.push_back(kn * i * i / 2 + du(rng));
        v.push_back(n - 2.0);
        CAPTURE(n);
        const auto s = eigen_spectrum(build_matrices(formal(v), n, Variant::Bounded));
        CHECK(s.all_real);
        CHECK(s.n_nonneg_real == 1);
        for (const auto& c : s.clusters) CHECK(c.multiplicity == 1);
      }
    }
  }

  TEST_CASE("perturbations of size 1e-3 already produce complex pairs at N = 8") {
    const int n = 8;
    const double kn = 2.0 * (n - 2) / (n * n);
    std::vector<double> v;
    for (int i = 1; i < n; ++i) v.push_back(kn * i * i / 2 + (i % 2 ? 1e-3 : -1e-3));
    v.push_back(n - 2.0);
    const auto s = eigen_spectrum(build_matrices(formal(v), n, Variant::Bounded));
    CHECK_FALSE(s.all_real);
    CHECK(s.n_nonneg_real == 1);
  }
}
