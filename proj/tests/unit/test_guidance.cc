/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "enff/core/errors.hpp"
#include "enff/guidance/guidance.hpp"
#include "test_util.hpp"

using namespace enff;
using enff::test::vec;

namespace {

CoupledPairSet random_pairs(FlowKind kind, std::uint64_t k, int N, Index d) {
  RngStream r = test::case_rng(50, k);
  std::vector<StateVec> z0, z1;
  for (int n = 0; n < N; ++n) {
    z0.push_back(r.normal_vector(d));
    z1.push_back(2.0 * r.normal_vector(d) + StateVec::Ones(d));
  }
  return CoupledPairSet(kind, z0, z1);
}

/// Zero observation matrix: every target has the same energy.
ObservationModel flat_likelihood(Index d) { return ObservationModel::linear(Matrix::Zero(1, d), 1.0); }

}  // namespace

TEST_SUITE("guidance kinds") {
  TEST_CASE("lambda must be finite and non-negative") {
    CHECK_THROWS_AS(GuidanceKind::localized(-0.1), ConfigError);
    CHECK_THROWS_AS(GuidanceKind::localized(INFINITY), ConfigError);
    CHECK_NOTHROW(GuidanceKind::localized(0.0));
  }
}

TEST_SUITE("mc_guided_vf") {
  TEST_CASE("equal likelihoods reproduce the marginal field") {
    const auto ps = random_pairs(FlowKind::f2p(0.3), 1, 10, 2);
    const auto obs = flat_likelihood(2);
    const StateVec z = vec({0.4, -0.2});
    const StateVec a = mc_guided_vf(ps, obs, vec({0.7}), z, PathTime(0.3));
    CHECK((a - marginal_vf(ps, z, PathTime(0.3))).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("a likelihood gap of 50 selects the better target") {
    // Equal path densities at z = 0 (both path means at +-0.5) with J = 0 and J = 50.
    const auto k = FlowKind::f2p(0.5);
    const CoupledPairSet ps(k, test::Members{vec({0.0}), vec({0.0})}, test::Members{vec({1.0}), vec({-1.0})});
    const double y = 1.0;
    // J(-1) = 2 / sigma^2 = 50.
    const auto obs50 = ObservationModel::identity(0.2);
    const StateVec u = mc_guided_vf(ps, obs50, vec({y}), vec({0.0}), PathTime(0.5));
    const double exact = cond_vf(k, vec({0.0}), ps.ref(0), ps.target(0), PathTime(0.5))[0];
    CHECK(std::abs(u[0] - exact) <= 1e-8 * std::abs(exact));
  }

  TEST_CASE("single pair") {
    const auto k = FlowKind::ot(0.1);
    const CoupledPairSet ps(k, test::Members{vec({0.0})}, test::Members{vec({3.0})});
    const StateVec u = mc_guided_vf(ps, ObservationModel::identity(0.1), vec({-5.0}), vec({1.0}), PathTime(0.2));
    CHECK(u[0] == doctest::Approx(cond_vf(k, vec({1.0}), vec({0.0}), vec({3.0}), PathTime(0.2))[0]));
  }

  TEST_CASE("property: constant likelihood leaves the field unchanged") {
    for (const auto& kind : {FlowKind::ot(0.05), FlowKind::f2p(0.05)}) {
      for (std::uint64_t k = 0; k < 50; ++k) {
        const auto ps = random_pairs(kind, k, 8, 3);
        RngStream r = test::case_rng(51, k);
        const StateVec z = 2.0 * r.normal_vector(3);
        const PathTime t(r.uniform());
        const StateVec a = mc_guided_vf(ps, flat_likelihood(3), vec({r.normal()}), z, t);
        CHECK((a - marginal_vf(ps, z, t)).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_SUITE("localized_guidance") {
  TEST_CASE("lambda zero gives no guidance") {
    const auto ps = random_pairs(FlowKind::f2p(0.2), 2, 5, 2);
    CHECK(localized_guidance(ps, ObservationModel::identity(1.0), vec({3.0, 3.0}), vec({0.0, 0.0}),
                             PathTime(0.5), 0.0)
              .isZero());
  }

  TEST_CASE("vanishes when zhat1 equals y") {
    const CoupledPairSet ps(FlowKind::f2p(0.2), test::Members{vec({0.0})}, test::Members{vec({1.7})});
    CHECK(localized_guidance(ps, ObservationModel::identity(1.0), vec({1.7}), vec({0.3}), PathTime(0.5), 0.8)
              .isZero());
  }

  TEST_CASE("hand evaluation") {
    const CoupledPairSet ps(FlowKind::f2p(0.2), test::Members{vec({0.0})}, test::Members{vec({0.0})});
    const StateVec g =
        localized_guidance(ps, ObservationModel::identity(1.0), vec({2.0}), vec({0.0}), PathTime(0.5), 0.5);
    CHECK(g[0] == doctest::Approx(1.0));
  }

  TEST_CASE("property: guidance points from zhat1 towards y") {
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto ps = random_pairs(FlowKind::f2p(0.3), k, 6, 3);
      RngStream r = test::case_rng(52, k);
      const StateVec z = r.normal_vector(3);
      const PathTime t(r.uniform());
      const ObsVec y = 3.0 * r.normal_vector(3);
      const StateVec zhat = ps.targets().transpose() * pair_weights(ps, z, t).matrix();
      const StateVec g = localized_guidance(ps, ObservationModel::identity(0.5), y, z, t, 0.1 + r.uniform());
      CHECK(g.dot(y - zhat) > 0.0);
    }
  }

  TEST_CASE("property: invariant to permutations of the pair set") {
    for (std::uint64_t k = 0; k < 30; ++k) {
      RngStream r = test::case_rng(53, k);
      std::vector<StateVec> z0, z1;
      for (int n = 0; n < 9; ++n) {
        z0.push_back(r.normal_vector(2));
        z1.push_back(r.normal_vector(2));
      }
      std::vector<int> perm(9);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), r.engine());
      std::vector<StateVec> p0, p1;
      for (int p : perm) {
        p0.push_back(z0[p]);
        p1.push_back(z1[p]);
      }
      const auto obs = ObservationModel::arctan(0.3);
      const ObsVec y = r.normal_vector(2);
      const StateVec z = r.normal_vector(2);
      const PathTime t(r.uniform());
      const StateVec a = localized_guidance(CoupledPairSet(FlowKind::f2p(0.2), z0, z1), obs, y, z, t, 0.7);
      const StateVec b = localized_guidance(CoupledPairSet(FlowKind::f2p(0.2), p0, p1), obs, y, z, t, 0.7);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_SUITE("guided_vf") {
  TEST_CASE("localized with lambda zero is the marginal field") {
    const auto ps = random_pairs(FlowKind::ot(0.1), 3, 7, 2);
    const StateVec z = vec({0.1, 0.2});
    const StateVec a =
        guided_vf(ps, ObservationModel::arctan(0.1), vec({1.0, 1.0}), GuidanceKind::localized(0.0), z, PathTime(0.4));
    CHECK(a == marginal_vf(ps, z, PathTime(0.4)));
  }

  TEST_CASE("MC with a flat likelihood is the marginal field") {
    const auto ps = random_pairs(FlowKind::f2p(0.1), 4, 7, 2);
    const StateVec z = vec({0.1, 0.2});
    const StateVec a = guided_vf(ps, flat_likelihood(2), vec({1.0}), GuidanceKind::mc(), z, PathTime(0.4));
    CHECK((a - marginal_vf(ps, z, PathTime(0.4))).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("single pair plus gradient term") {
    const CoupledPairSet ps(FlowKind::f2p(0.1), test::Members{vec({0.0})}, test::Members{vec({0.0})});
    const StateVec u = guided_vf(ps, ObservationModel::identity(1.0), vec({1.0}), GuidanceKind::localized(1.0),
                                 vec({0.0}), PathTime(0.5));
    CHECK(u[0] == doctest::Approx(1.0));
  }

  TEST_CASE("GuidedField agrees with the free functions") {
    const auto ps = random_pairs(FlowKind::f2p(0.2), 5, 11, 3);
    const auto obs = ObservationModel::arctan(0.4);
    const ObsVec y = vec({0.3, -0.2, 1.0});
    for (const auto& kind : {GuidanceKind::mc(), GuidanceKind::localized(0.6)}) {
      GuidedField field(ps, obs, y, kind);
      for (double t : {0.0, 0.5, 0.9}) {
        const StateVec z = vec({0.5, 0.1, -0.4});
        CHECK((field(z, t) - guided_vf(ps, obs, y, kind, z, PathTime(t))).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}
