#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mtsc/discrete.hpp"
#include "support.hpp"

using namespace mtsc;
using testsup::kH25;

TEST_CASE("validate_pmf accepts the uniform table and rejects bad mass") {
  const JointPmf u = validate_pmf({{0.25, 0.25}, {0.25, 0.25}});
  CHECK(u.m() == 2);
  CHECK(u.l() == 2);
  CHECK(u(1, 0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(validate_pmf({{0.5, 0.6}}), NotNormalized);
  CHECK_THROWS_AS(validate_pmf({{0.7, -0.3}, {0.3, 0.3}}), NegativeMass);
  CHECK_THROWS_AS(validate_pmf({}), EmptyAlphabet);
  CHECK_THROWS_AS(validate_pmf({{0.5, 0.5}, {0.0}}), ValidationError);
}

TEST_CASE("validate_pmf accepts the DSBS construction") {
  // Rows assembled as (1/2) * BSC(0.25) transition rows.
  const double cross = 0.25;
  const JointPmf p = validate_pmf({{0.5 * (1 - cross), 0.5 * cross},
                                   {0.5 * cross, 0.5 * (1 - cross)}});
  CHECK(p(0, 0) == doctest::Approx(0.375));
  CHECK(p(0, 1) == doctest::Approx(0.125));
}

TEST_CASE("validate_pmf renormalizes only within tolerance") {
  CHECK_NOTHROW(validate_pmf({{0.5, 0.5 + 5e-10}}));
  CHECK_THROWS_AS(validate_pmf({{0.5, 0.5 + 5e-9}}), NotNormalized);
}

TEST_CASE("entropy basics") {
  CHECK(entropy(Dist({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(Dist({1.0, 0.0})) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy(Dist({0.25, 0.75})) ==
        doctest::Approx(kH25).epsilon(1e-12));
}

TEST_CASE("entropy is invariant under permutation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q = testsup::dirichlet(rng, 2 + int(rng() % 6));
    const double h = entropy(Dist(q));
    std::shuffle(q.begin(), q.end(), rng);
    CHECK(entropy(Dist(q)) == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("conditional entropy trivial and derived cases") {
  const JointPmf indep = validate_pmf({{0.25, 0.25}, {0.25, 0.25}});
  CHECK(conditional_entropy(indep, Axis::Y) == doctest::Approx(1.0));

  const JointPmf equal = validate_pmf({{0.5, 0.0}, {0.0, 0.5}});
  CHECK(conditional_entropy(equal, Axis::Y) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const JointPmf p = testsup::dsbs(0.25);
  CHECK(conditional_entropy(p, Axis::Y) == doctest::Approx(kH25).epsilon(1e-12));
  // Cross-check against the direct sum over conditioning symbols.
  double direct = 0.0;
  const Dist py = p.marginal_y();
  for (int y = 0; y < p.l(); ++y)
    direct += py[std::size_t(y)] * entropy(posterior(p, Axis::Y, y));
  CHECK(conditional_entropy(p, Axis::Y) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("chain rule holds to 1e-12, zero rows included") {
  std::mt19937_64 rng(11);
  std::vector<JointPmf> pmfs;
  for (int t = 0; t < 40; ++t)
    pmfs.push_back(testsup::random_pmf(rng, 1 + int(rng() % 4), 1 + int(rng() % 4)));
  pmfs.push_back(validate_pmf({{0.5, 0.5}, {0.0, 0.0}}));  // zero row
  for (const JointPmf& p : pmfs) {
    const double hj = joint_entropy(p);
    CHECK(hj == doctest::Approx(entropy(p.marginal_y()) +
                                conditional_entropy(p, Axis::Y))
                    .epsilon(1e-12));
    CHECK(hj == doctest::Approx(entropy(p.marginal_x()) +
                                conditional_entropy(p, Axis::X))
                    .epsilon(1e-12));
    CHECK(conditional_entropy(p, Axis::Y) <= entropy(p.marginal_x()) + 1e-12);
    CHECK(entropy(p.marginal_x()) <= std::log2(double(p.m())) + 1e-12);
  }
}

TEST_CASE("posterior") {
  const JointPmf indep = validate_pmf({{0.25, 0.25}, {0.25, 0.25}});
  const Dist u = posterior(indep, Axis::Y, 1);
  CHECK(u[0] == doctest::Approx(0.5));

  const JointPmf equal = validate_pmf({{0.5, 0.0}, {0.0, 0.5}});
  CHECK(posterior(equal, Axis::Y, 1)[1] == doctest::Approx(1.0));

  const JointPmf p = testsup::dsbs(0.25);
  const Dist post = posterior(p, Axis::Y, 0);
  CHECK(post[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.25).epsilon(1e-12));

  const JointPmf zerocol = validate_pmf({{0.5, 0.0}, {0.5, 0.0}});
  CHECK_THROWS_AS(posterior(zerocol, Axis::Y, 1), ZeroProbabilityCondition);
}

TEST_CASE("aux joint: copy and constant channels") {
  const JointPmf p = testsup::dsbs(0.25);
  const AuxJoint copy(p, validate_channel(2, 2, {1, 0, 0, 1}));
  CHECK(mutual_information(copy, MiPair::YU) ==
        doctest::Approx(entropy(p.marginal_y())).epsilon(1e-12));

  const AuxJoint constant(p, validate_channel(2, 2, {1, 0, 1, 0}));
  CHECK(mutual_information(constant, MiPair::YU) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("aux joint: BSC(0.1) observation of Y") {
  const JointPmf p = testsup::dsbs(0.25);
  const AuxJoint a(p, validate_channel(2, 2, {0.9, 0.1, 0.1, 0.9}));
  CHECK(mutual_information(a, MiPair::YU) ==
        doctest::Approx(0.5310044064107188).epsilon(1e-12));
  // Cross-check by the direct double sum over the derived joint.
  double direct = 0.0;
  const Dist py = p.marginal_y();
  const Dist pu = a.u_marginal();
  for (int y = 0; y < 2; ++y)
    for (int u = 0; u < 2; ++u) {
      const double pyu = py[std::size_t(y)] * a.channel()(y, u);
      if (pyu > 0.0)
        direct += pyu * std::log2(pyu / (py[std::size_t(y)] * pu[std::size_t(u)]));
    }
  CHECK(mutual_information(a, MiPair::YU) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("aux joint enforces |U| <= |Y|+2 and row stochasticity") {
  const JointPmf p = testsup::dsbs(0.25);
  std::vector<double> wide(std::size_t(2) * 5, 0.0);
  wide[0] = 1.0;
  wide[5] = 1.0;
  CHECK_THROWS_AS(AuxJoint(p, AuxChannel{2, 5, wide}), ValidationError);
  CHECK_THROWS_AS(validate_channel(2, 2, {0.5, 0.6, 1.0, 0.0}), NotNormalized);
}

TEST_CASE("data processing and H(X|U) identity on random aux joints") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 60; ++t) {
    const int m = 1 + int(rng() % 4);
    const int l = 1 + int(rng() % 4);
    const int k = 1 + int(rng() % std::min<int>(6, l + 2));
    const AuxJoint a(testsup::random_pmf(rng, m, l),
                     testsup::random_channel(rng, l, k));
    const double iyu = mutual_information(a, MiPair::YU);
    const double ixu = mutual_information(a, MiPair::XU);
    CHECK(ixu <= iyu + 1e-12);
    // H(X|U) = H(X) - I(X;U), with H(X|U) computed from posteriors.
    const Dist pu = a.u_marginal();
    double hxu = 0.0;
    for (int u = 0; u < k; ++u)
      if (pu[std::size_t(u)] > 0.0)
        hxu += pu[std::size_t(u)] * entropy(a.posterior_x_given_u(u));
    CHECK(hxu == doctest::Approx(entropy(a.base().marginal_x()) - ixu)
                     .epsilon(1e-12));
  }
}
