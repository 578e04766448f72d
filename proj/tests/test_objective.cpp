#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mudsim/objective.hpp"
#include "mudsim/rng.hpp"

using namespace mudsim;

namespace {

Candidate make_candidate(std::initializer_list<double> d, std::initializer_list<double> a) {
  Candidate c;
  c.d.resize(static_cast<Eigen::Index>(d.size()));
  c.a.resize(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (double v : d) c.d[i++] = v;
  i = 0;
  for (double v : a) c.a[i++] = v;
  return c;
}

}  // namespace

TEST_CASE("log-likelihood single-user hand values") {
  // U = 1, R = [1], E = [1], a = 1, z = 1:
  //   L(+1) = 2*1*1 - 1 = 1,  L(-1) = -2 - 1 = -3.
  Eigen::MatrixXd r(1, 1);
  r << 1.0;
  Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd z(1);
  z << 1.0;

  CHECK(log_likelihood(make_candidate({1.0}, {1.0}), z, r, e) == Catch::Approx(1.0).margin(1e-15));
  CHECK(log_likelihood(make_candidate({-1.0}, {1.0}), z, r, e) ==
        Catch::Approx(-3.0).margin(1e-15));
}

TEST_CASE("log-likelihood two-user hand value and argmax") {
  // U = 2, off-diagonal correlation 0.25, z = (0.75, -0.75), unit energies and
  // fading. L(+1, -1) = 2*(0.75 + 0.75) - 1.5 = 1.5, and that sign pattern is
  // the unique maximizer among the four.
  Eigen::MatrixXd r(2, 2);
  r << 1.0, 0.25, 0.25, 1.0;
  Eigen::VectorXd e = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd z(2);
  z << 0.75, -0.75;

  const double l_best = log_likelihood(make_candidate({1.0, -1.0}, {1.0, 1.0}), z, r, e);
  CHECK(l_best == Catch::Approx(1.5).margin(1e-15));

  const double signs[2] = {-1.0, 1.0};
  int maxima = 0;
  for (double s0 : signs)
    for (double s1 : signs) {
      const double l = log_likelihood(make_candidate({s0, s1}, {1.0, 1.0}), z, r, e);
      if (s0 == 1.0 && s1 == -1.0) {
        ++maxima;
        continue;
      }
      CHECK(l < l_best);
    }
  CHECK(maxima == 1);
}

TEST_CASE("log-likelihood scales quadratically under joint (z, a) rescaling") {
  // Scaling the fading amplitudes and the observation by the same c > 0
  // multiplies L by c^2 for every candidate, so the argmax over sign vectors
  // is invariant.
  Eigen::MatrixXd r(2, 2);
  r << 1.0, 0.4, 0.4, 1.0;
  Eigen::VectorXd e(2);
  e << 1.0, 4.0;
  Eigen::VectorXd z(2);
  z << 0.9, -1.3;

  const double signs[2] = {-1.0, 1.0};
  for (double c : {0.5, 3.0}) {
    for (double s0 : signs)
      for (double s1 : signs) {
        const double base = log_likelihood(make_candidate({s0, s1}, {0.8, 1.1}), z, r, e);
        const double scaled =
            log_likelihood(make_candidate({s0, s1}, {0.8 * c, 1.1 * c}), c * z, r, e);
        CHECK(scaled == Catch::Approx(c * c * base).epsilon(1e-12));
      }
  }
}

TEST_CASE("log-likelihood rejects dimension mismatches") {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd e = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2);

  CHECK_THROWS_AS(log_likelihood(make_candidate({1.0}, {1.0, 1.0}), z, r, e),
                  std::invalid_argument);
  CHECK_THROWS_AS(log_likelihood(make_candidate({1.0, 1.0}, {1.0}), z, r, e),
                  std::invalid_argument);
  Eigen::VectorXd z3 = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(log_likelihood(make_candidate({1.0, 1.0}, {1.0, 1.0}), z3, r, e),
                  std::invalid_argument);
}

TEST_CASE("fitness normalization produces a probability vector") {
  SECTION("all-equal raw values map to the uniform vector") {
    Eigen::VectorXd raw = Eigen::VectorXd::Constant(25, 3.7);
    const Eigen::VectorXd p = normalize_fitness(raw);
    REQUIRE(p.size() == 25);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      CHECK(p[i] == Catch::Approx(1.0 / 25.0).epsilon(1e-12));
    CHECK(p.sum() == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("raw (1, -3) concentrates all mass on the larger value") {
    Eigen::VectorXd raw(2);
    raw << 1.0, -3.0;
    const Eigen::VectorXd p = normalize_fitness(raw);
    CHECK(p[0] == Catch::Approx(1.0).margin(1e-9));
    CHECK(p[1] == Catch::Approx(0.0).margin(1e-9));
    CHECK(p.sum() == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("entries are positive, ranking-preserving, and sum to one") {
    Rng rng(7);
    std::normal_distribution<double> gauss(0.0, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd raw(12);
      for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = gauss(rng);
      const Eigen::VectorXd p = normalize_fitness(raw);
      CHECK(p.sum() == Catch::Approx(1.0).margin(1e-12));
      CHECK(p.minCoeff() > 0.0);
      for (Eigen::Index i = 0; i < raw.size(); ++i)
        for (Eigen::Index j = 0; j < raw.size(); ++j)
          if (raw[i] < raw[j]) CHECK(p[i] < p[j]);
    }
  }

  SECTION("a single value is rejected") {
    CHECK_THROWS_AS(normalize_fitness(Eigen::VectorXd::Ones(1)), std::invalid_argument);
  }
}

TEST_CASE("population entropy hand values and bounds") {
  SECTION("uniform over 25 gives ln 25") {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(25, 1.0 / 25.0);
    CHECK(population_entropy(p) == Catch::Approx(std::log(25.0)).epsilon(1e-12));
  }

  SECTION("a one-hot vector gives 0") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(25);
    p[3] = 1.0;
    CHECK(population_entropy(p) == 0.0);
  }

  SECTION("two equal halves give ln 2") {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
    p[0] = 0.5;
    p[1] = 0.5;
    CHECK(population_entropy(p) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  }

  SECTION("entropy of any normalized vector lies in [0, ln n]") {
    Rng rng(11);
    std::normal_distribution<double> gauss(0.0, 5.0);
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd raw(25);
      for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = gauss(rng);
      const double h = population_entropy(normalize_fitness(raw));
      CHECK(h >= 0.0);
      CHECK(h <= std::log(25.0) + 1e-12);
    }
  }
}

TEST_CASE("candidate canonicalization flips fading sign without touching fitness") {
  Eigen::MatrixXd r(3, 3);
  r << 1.0, 0.2, -0.1, 0.2, 1.0, 0.3, -0.1, 0.3, 1.0;
  Eigen::VectorXd e(3);
  e << 1.0, 2.0, 0.5;
  Eigen::VectorXd z(3);
  z << 0.4, -1.1, 0.7;

  Candidate c = make_candidate({0.8, -1.2, 0.3}, {-0.9, 0.5, -1.4});
  const double before = log_likelihood(c, z, r, e);
  canonicalize(c);
  // Sign flips are exact in floating point, so the fitness is bit-identical.
  CHECK(log_likelihood(c, z, r, e) == before);
  CHECK(c.a.minCoeff() >= 0.0);
  CHECK(c.a[0] == 0.9);
  CHECK(c.d[0] == -0.8);
  CHECK(c.a[1] == 0.5);   // nonnegative entries untouched
  CHECK(c.d[1] == -1.2);

  Candidate again = c;
  canonicalize(again);  // idempotent
  CHECK(again.a == c.a);
  CHECK(again.d == c.d);
}

TEST_CASE("likelihood evaluator matches the free function and handles both metrics") {
  Eigen::MatrixXd r(2, 2);
  r << 1.0, 0.25, 0.25, 1.0;
  Eigen::VectorXd e(2);
  e << 1.0, 4.0;
  Eigen::VectorXd z(2);
  z << 0.75, -0.75;

  LikelihoodEvaluator eval(r, e, SymbolMetric::kContinuous);
  eval.set_observation(z);

  SECTION("continuous metric equals log_likelihood on random candidates") {
    Rng rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      Candidate c = make_candidate({gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)});
      CHECK(eval(c) == Catch::Approx(log_likelihood(c, z, r, e)).margin(1e-14));
    }
  }

  SECTION("sign metric quantizes d before evaluating, with sign(0) = +1") {
    LikelihoodEvaluator sign_eval(r, e, SymbolMetric::kSign);
    sign_eval.set_observation(z);
    Candidate soft = make_candidate({0.2, -0.7}, {0.9, 1.1});
    Candidate hard = make_candidate({1.0, -1.0}, {0.9, 1.1});
    CHECK(sign_eval(soft) == Catch::Approx(log_likelihood(hard, z, r, e)).margin(1e-14));

    Candidate zero = make_candidate({0.0, 0.0}, {1.0, 1.0});
    Candidate plus = make_candidate({1.0, 1.0}, {1.0, 1.0});
    CHECK(sign_eval(zero) == Catch::Approx(log_likelihood(plus, z, r, e)).margin(1e-14));
  }

  SECTION("accessors expose the stored pieces") {
    CHECK(eval.correlation() == r);
    CHECK(eval.sqrt_energies()[1] == Catch::Approx(2.0));
    CHECK(eval.observation() == z);
    CHECK(eval.metric() == SymbolMetric::kContinuous);
  }

  SECTION("shape errors are rejected") {
    CHECK_THROWS_AS(eval.set_observation(Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(eval(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(LikelihoodEvaluator(Eigen::MatrixXd::Identity(2, 3), e),
                    std::invalid_argument);
    CHECK_THROWS_AS(LikelihoodEvaluator(Eigen::MatrixXd::Identity(3, 3), e),
                    std::invalid_argument);
  }
}
