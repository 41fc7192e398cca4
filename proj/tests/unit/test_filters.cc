/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"

#include "enff/core/errors.hpp"
#include "enff/dynamics/truth.hpp"
#include "enff/filters/filters.hpp"
#include "enff/oracle/oracle.hpp"
#include "test_util.hpp"

using namespace enff;
using enff::test::vec;

namespace {

FilterConfig enff_cfg(FlowKind flow, GuidanceKind g, int T, std::size_t N) {
  FilterConfig c;
  c.algorithm = EnFFParams{flow, g};
  c.T = T;
  c.N = N;
  return c;
}

FilterConfig ensf_cfg(double ea, double eb, int T, std::size_t N, bool no_guidance = false) {
  FilterConfig c;
  c.algorithm = EnSFParams{ea, eb, no_guidance};
  c.T = T;
  c.N = N;
  return c;
}

FilterConfig simple_cfg(FilterAlgorithm a, std::size_t N) {
  FilterConfig c;
  c.algorithm = a;
  c.N = N;
  return c;
}

const TransitionModel kIdentity{[](const StateVec& x) { return x; }, 0.0};

Ensemble gaussian_ensemble(std::uint64_t seed, std::size_t N, double mean, double sd, std::size_t step = 0) {
  std::vector<StateVec> m(N);
  for (std::size_t n = 0; n < N; ++n) {
    RngStream s(seed, 0, n, Purpose::Test);
    m[n] = vec({mean + sd * s.normal()});
  }
  return Ensemble(std::move(m), step);
}

std::vector<double> coordinate(const Ensemble& e, Index i = 0) {
  std::vector<double> v;
  for (const auto& x : e.members) v.push_back(x[i]);
  return v;
}

// Scalar conjugate update for prior N(0, 1), identity dynamics, sigma_y = 1.
constexpr double kY = 1.5;
constexpr double kKalmanMean = 0.75;

}  // namespace

TEST_SUITE("enff_step") {
  TEST_CASE("unguided zero-width F2P returns each member's own target") {
    const TransitionModel shift{[](const StateVec& x) { return StateVec(x.array() + 1.0); }, 0.0};
    for (const auto* trans : {&kIdentity, &shift}) {
      const Ensemble prev({vec({0.3}), vec({-1.2})}, 0);
      const auto cfg = enff_cfg(FlowKind::f2p(0.0), GuidanceKind::localized(0.0), 500, 2);
      const Ensemble out = enff_step(cfg, prev, *trans, ObservationModel::identity(1.0), vec({5.0}), RngSource(1));
      const Ensemble fc = propagate(*trans, prev, RngSource(1));
      for (std::size_t n = 0; n < 2; ++n) CHECK(std::abs(out.members[n][0] - fc.members[n][0]) <= 1e-6);
    }
  }

  TEST_CASE("single member follows its target") {
    const TransitionModel dbl{[](const StateVec& x) { return StateVec(2.0 * x + StateVec::Ones(x.size())); }, 0.0};
    const Ensemble prev({vec({0.4, -2.0})}, 0);
    const auto cfg = enff_cfg(FlowKind::f2p(0.0), GuidanceKind::localized(0.0), 17, 1);
    const Ensemble out = enff_step(cfg, prev, dbl, ObservationModel::arctan(0.1), vec({0.0, 0.0}), RngSource(2));
    CHECK((out.members[0] - vec({1.8, -3.0})).norm() <= 1e-12);
  }

  TEST_CASE("mismatched previous ensemble is rejected") {
    const auto cfg = enff_cfg(FlowKind::f2p(0.1), GuidanceKind::localized(0.1), 5, 2);
    const Ensemble prev({vec({0.0}), vec({1.0})}, 0);
    const Ensemble fc({vec({0.0}), vec({1.0}), vec({2.0})}, 1);
    CHECK_THROWS_AS(enff_analysis(cfg, prev, fc, ObservationModel::identity(1.0), vec({0.0}), RngSource(3)),
                    ConfigError);
  }

  TEST_CASE("blowup is reported as filter divergence") {
    const auto cfg = enff_cfg(FlowKind::f2p(0.1), GuidanceKind::localized(1e308), 5, 2);
    const Ensemble prev({vec({0.0}), vec({1.0})}, 0);
    try {
      enff_step(cfg, prev, kIdentity, ObservationModel::identity(1e-150), vec({1e10}), RngSource(4));
      FAIL("expected divergence");
    } catch (const FilterDivergence& e) {
      CHECK(e.da_step() == 1);
      CHECK(e.inner_step() >= 1);
    }
  }

  TEST_CASE("F2P localized with tuned lambda matches the Kalman mean") {
    const auto obs = ObservationModel::identity(1.0);
    auto run = [&](double lambda, std::size_t N, std::uint64_t seed, double y) {
      const auto cfg = enff_cfg(FlowKind::f2p(0.01), GuidanceKind::localized(lambda), 10, N);
      return enff_step(cfg, gaussian_ensemble(seed, N, 0.0, 1.0), kIdentity, obs, vec({y}), RngSource(seed)).mean()[0];
    };
    // Tune on a separate draw and observation, then evaluate.
    double best = 0.0, best_err = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 10; ++i) {
      const double err = std::abs(run(0.1 * i, 500, 77, 1.0) - 0.5);
      if (err < best_err) best_err = err, best = 0.1 * i;
    }
    CHECK(std::abs(run(best, 10000, 5, kY) - kKalmanMean) <= 0.1);
  }

  TEST_CASE("property: unguided analysis keeps the forecast moments") {
    const std::size_t N = 2000;
    const TransitionModel affine{[](const StateVec& x) { return StateVec(1.5 * x + StateVec::Constant(1, 2.0)); }, 0.0};
    for (const auto& flow : {FlowKind::ot(1e-3), FlowKind::f2p(1e-3)}) {
      const Ensemble prev = gaussian_ensemble(6, N, 0.0, 1.0);
      const Ensemble fc = propagate(affine, prev, RngSource(6));
      const auto cfg = enff_cfg(flow, GuidanceKind::localized(0.0), 100, N);
      const Ensemble out = enff_analysis(cfg, prev, fc, ObservationModel::identity(1.0), vec({0.0}), RngSource(6));
      const auto a = coordinate(fc), b = coordinate(out);
      const double var = test::sample_var(a);
      CHECK(std::abs(test::sample_mean(b) - test::sample_mean(a)) <= 3.0 * std::sqrt(var / N));
      CHECK(std::abs(test::sample_var(b) - var) <= 3.0 * var * std::sqrt(2.0 / N));
    }
  }
}

TEST_SUITE("ensf_step") {
  TEST_CASE("unconditional generation reproduces the target moments") {
    // Small eps_alpha so the noise end N(eps_alpha x, 1) matches the N(0, 1) start, small
    // eps_beta so the data end adds little variance. N = 4000 instead of 1e4 for runtime.
    const std::size_t N = 4000;
    const Ensemble targets = gaussian_ensemble(8, N, 3.0, 1.0, 1);
    const auto cfg = ensf_cfg(0.01, 0.001, 200, N, true);
    const Ensemble out = ensf_analysis(cfg, targets, ObservationModel::identity(1.0), vec({0.0}), RngSource(8));
    const auto a = coordinate(targets), b = coordinate(out);
    CHECK(std::abs(test::sample_mean(b) - test::sample_mean(a)) <= 0.05 * std::abs(test::sample_mean(a)));
    CHECK(std::abs(test::sample_var(b) - test::sample_var(a)) <= 0.05 * test::sample_var(a));
  }

  TEST_CASE("frozen schedule returns the initial noise") {
    const Ensemble fc({vec({5.0, 1.0}), vec({-3.0, 2.0}), vec({0.0, 0.0})}, 4);
    const auto cfg = ensf_cfg(1.0, 1.0, 25, 3, true);
    const Ensemble out = ensf_analysis(cfg, fc, ObservationModel::identity(1.0), vec({0.0, 0.0}), RngSource(9));
    for (std::size_t n = 0; n < 3; ++n) {
      RngStream s = RngSource(9).stream(4, n, Purpose::SdeNoise);
      CHECK(out.members[n] == s.normal_vector(2));
    }
  }

  TEST_CASE("epsilon range") {
    CHECK_THROWS_AS(ensf_cfg(0.0, 0.5, 5, 3).validate(), ConfigError);
    CHECK_THROWS_AS(ensf_cfg(0.5, 1.5, 5, 3).validate(), ConfigError);
  }

  TEST_CASE("tuned schedule matches the Kalman mean") {
    const auto obs = ObservationModel::identity(1.0);
    auto run = [&](double ea, double eb, std::size_t N, std::uint64_t seed, double y) {
      const auto cfg = ensf_cfg(ea, eb, 20, N);
      return ensf_step(cfg, gaussian_ensemble(seed, N, 0.0, 1.0), kIdentity, obs, vec({y}), RngSource(seed)).mean()[0];
    };
    double ba = 0.5, bb = 0.025, best_err = std::numeric_limits<double>::infinity();
    for (double ea : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double eb : {0.005, 0.025, 0.125, 0.275}) {
        const double err = std::abs(run(ea, eb, 1000, 78, 1.0) - 0.5);
        if (err < best_err) best_err = err, ba = ea, bb = eb;
      }
    CHECK(std::abs(run(ba, bb, 10000, 10, kY) - kKalmanMean) <= 0.15);
  }
}

TEST_SUITE("bpf_step") {
  TEST_CASE("identical particles stay identical") {
    const Ensemble prev(std::vector<StateVec>(5, vec({0.7, -0.1})), 0);
    const Ensemble out = bpf_step(prev, kIdentity, ObservationModel::arctan(0.1), vec({3.0, 3.0}), RngSource(11));
    for (const auto& x : out.members) CHECK(x == vec({0.7, -0.1}));
  }

  TEST_CASE("a likelihood gap of 50 resamples the better particle twice") {
    // J(1) = 0 and J(-1) = 2 / 0.2^2 = 50.
    const Ensemble prev({vec({1.0}), vec({-1.0})}, 0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Ensemble out = bpf_step(prev, kIdentity, ObservationModel::identity(0.2), vec({1.0}), RngSource(seed));
      CHECK(out.members[0][0] == 1.0);
      CHECK(out.members[1][0] == 1.0);
    }
  }

  TEST_CASE("property: equal weights give a permutation of the input") {
    const auto flat = ObservationModel::linear(Matrix::Zero(1, 1), 1.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Ensemble prev({vec({1.0}), vec({2.0}), vec({3.0}), vec({4.0})}, 0);
      StepDiagnostics diag;
      const Ensemble out = bpf_step(prev, kIdentity, flat, vec({0.0}), RngSource(seed), Parallel(), &diag);
      auto v = coordinate(out);
      std::sort(v.begin(), v.end());
      CHECK(v == std::vector<double>{1.0, 2.0, 3.0, 4.0});
      CHECK(diag.ess == doctest::Approx(4.0));
    }
  }
}

TEST_SUITE("enkf_po_step") {
  TEST_CASE("scalar gain is one half") {
    const std::size_t N = 100000;
    const Ensemble fc = gaussian_ensemble(12, N, 0.0, 1.0, 1);
    StepDiagnostics diag;
    enkf_po_analysis(fc, ObservationModel::identity(1.0), vec({0.3}), RngSource(12), &diag);
    REQUIRE(diag.enkf.gain.size() == 1);
    CHECK(std::abs(diag.enkf.gain(0, 0) - 0.5) <= 0.02 * 0.5);
    CHECK(diag.enkf.obs_cov(0, 0) == doctest::Approx(2.0).epsilon(0.02));
  }

  TEST_CASE("collapsed ensemble is left alone") {
    const Ensemble prev(std::vector<StateVec>(6, vec({1.0, 2.0})), 0);
    StepDiagnostics diag;
    const Ensemble out =
        enkf_po_step(prev, kIdentity, ObservationModel::identity(0.5), vec({4.0, 4.0}), RngSource(13), Parallel(), &diag);
    for (const auto& x : out.members) CHECK((x - vec({1.0, 2.0})).norm() <= 1e-12);
    CHECK(diag.enkf.gain.isZero());
  }

  TEST_CASE("gain solves K Cyy = Cxy") {
    RngStream r = test::case_rng(60, 0);
    std::vector<StateVec> m;
    for (int n = 0; n < 50; ++n) m.push_back(r.normal_vector(4));
    StepDiagnostics diag;
    enkf_po_analysis(Ensemble(m, 1), ObservationModel::arctan(0.3), r.normal_vector(4), RngSource(14), &diag);
    const auto& s = diag.enkf;
    CHECK((s.gain * s.obs_cov - s.cross_cov).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((s.obs_cov - s.obs_cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("ensemble-space update equals the regularized dense update") {
    RngStream r = test::case_rng(61, 0);
    const std::size_t N = 4;
    const Index d = 6;
    std::vector<StateVec> m;
    for (std::size_t n = 0; n < N; ++n) m.push_back(r.normal_vector(d));
    const Ensemble fc(m, 2);
    const auto obs = ObservationModel::identity(0.7);
    const ObsVec y = r.normal_vector(d);
    StepDiagnostics diag;
    const Ensemble out = enkf_po_analysis(fc, obs, y, RngSource(15), &diag);
    CHECK(diag.regularized);

    Matrix X = fc.as_matrix(), Y(d, static_cast<Index>(N));
    for (std::size_t n = 0; n < N; ++n) {
      RngStream s = RngSource(15).stream(2, n, Purpose::PerturbedObs);
      Y.col(static_cast<Index>(n)) = observe(obs, m[n], s);
    }
    const Matrix Xc = X.colwise() - X.rowwise().mean(), Yc = Y.colwise() - Y.rowwise().mean();
    Matrix Cyy = Yc * Yc.transpose() / static_cast<double>(N);
    Cyy.diagonal().array() += 0.49;
    const Matrix K = (Xc * Yc.transpose() / static_cast<double>(N)) * Cyy.inverse();
    for (std::size_t n = 0; n < N; ++n) {
      const StateVec expect = X.col(static_cast<Index>(n)) + K * (y - Y.col(static_cast<Index>(n)));
      CHECK((out.members[n] - expect).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("ten-step linear-Gaussian run tracks the Kalman mean") {
    const std::size_t N = 10000;
    const double sy = 1.0;
    const TransitionModel lin{[](const StateVec& x) { return x; }, 0.5};
    const auto obs = ObservationModel::identity(sy);
    Observations ys;
    for (std::size_t j = 1; j <= 10; ++j) ys.emplace_back(j, vec({3.0 + 0.2 * static_cast<double>(j)}));
    const auto ens = run_filter(simple_cfg(EnKFParams{}, N), gaussian_ensemble(16, N, 3.0, 1.0), lin, obs, ys, 10,
                                RngSource(16));
    oracle::GaussianBelief b{vec({3.0}), Matrix::Identity(1, 1)};
    for (std::size_t j = 0; j < 10; ++j) {
      b = oracle::kalman_step(b, Matrix::Identity(1, 1), 0.25 * Matrix::Identity(1, 1), Matrix::Identity(1, 1),
                              Matrix::Identity(1, 1), ys[j].second);
      CHECK(std::abs(ens[j].mean()[0] - b.mean[0]) <= 0.05 * std::abs(b.mean[0]));
    }
  }
}

TEST_SUITE("run_filter") {
  TEST_CASE("no observations is a pure forecast") {
    const TransitionModel dbl{[](const StateVec& x) { return StateVec(2.0 * x); }, 0.0};
    const Ensemble init({vec({1.0}), vec({-1.0})}, 0);
    const auto out = run_filter(simple_cfg(BPFParams{}, 2), init, dbl, ObservationModel::identity(1.0), {}, 3, RngSource(1));
    REQUIRE(out.size() == 3);
    CHECK(out[2].members[0][0] == 8.0);
    CHECK(out[2].step_index == 3);
  }

  TEST_CASE("one observation then constant") {
    const Ensemble init = gaussian_ensemble(17, 50, 0.0, 1.0);
    const auto out = run_filter(simple_cfg(EnKFParams{}, 50), init, kIdentity, ObservationModel::identity(1.0),
                                {{1, vec({2.0})}}, 4, RngSource(17));
    CHECK(out[0].mean()[0] > init.mean()[0] + 0.5);
    for (std::size_t j = 1; j < 4; ++j)
      for (std::size_t n = 0; n < 50; ++n) CHECK(out[j].members[n] == out[0].members[n]);
  }

  TEST_CASE("observation steps must increase and fit the window") {
    const Ensemble init = gaussian_ensemble(18, 3, 0.0, 1.0);
    const auto obs = ObservationModel::identity(1.0);
    const auto cfg = simple_cfg(BPFParams{}, 3);
    CHECK_THROWS_AS(run_filter(cfg, init, kIdentity, obs, {{2, vec({0.0})}, {2, vec({0.0})}}, 3, RngSource(1)),
                    ConfigError);
    CHECK_THROWS_AS(run_filter(cfg, init, kIdentity, obs, {{5, vec({0.0})}}, 3, RngSource(1)), ConfigError);
  }

  TEST_CASE("Lorenz '96 twin experiment beats the free run") {
    Lorenz96Config l96;
    const auto obs = ObservationModel::arctan(0.05);
    const Protocol protocol = default_protocol(l96);
    const TruthRun truth = make_truth_and_obs(l96, obs, protocol, RngSource(19));
    const TransitionModel trans = system_transition(make_system(l96), protocol.observe_every, 0.0);
    std::vector<StateVec> m;
    for (std::size_t n = 0; n < 20; ++n) m.push_back(RngSource(19).stream(0, n, Purpose::EnsembleInit).normal_vector(40));
    const Ensemble init(m, 0);
    const auto cfg = enff_cfg(FlowKind::ot(1e-4), GuidanceKind::localized(0.05), 10, 20);
    const auto analysis = run_filter(cfg, init, trans, obs, truth.observations, truth.observations.size(), RngSource(19));
    const auto free = run_filter(cfg, init, trans, obs, {}, truth.observations.size(), RngSource(19));
    auto err = [&](const Ensemble& e) { return (e.mean() - truth.truth[e.step_index]).norm() / std::sqrt(40.0); };
    double a = 0.0, f = 0.0;
    for (std::size_t j = 10; j < analysis.size(); ++j) {
      a += err(analysis[j]);
      f += err(free[j]);
    }
    CHECK(a < 0.5 * f);
    CHECK(err(analysis.back()) < err(analysis.front()));
  }
}

TEST_SUITE("filter invariants") {
  std::vector<FilterConfig> all_filters(std::size_t N) {
    return {enff_cfg(FlowKind::ot(0.01), GuidanceKind::localized(0.3), 6, N),
            enff_cfg(FlowKind::f2p(0.01), GuidanceKind::mc(), 6, N), ensf_cfg(0.5, 0.1, 6, N),
            simple_cfg(BPFParams{}, N), simple_cfg(EnKFParams{}, N)};
  }

  TEST_CASE("property: size and dimension are preserved") {
    for (std::uint64_t k = 0; k < 10; ++k) {
      RngStream r = test::case_rng(70, k);
      const std::size_t N = 2 + k;
      const Index d = 1 + static_cast<Index>(k % 4);
      std::vector<StateVec> m;
      for (std::size_t n = 0; n < N; ++n) m.push_back(r.normal_vector(d));
      const TransitionModel noisy{[](const StateVec& x) { return StateVec(0.8 * x); }, 0.3};
      for (const auto& cfg : all_filters(N)) {
        const Ensemble out = filter_step(cfg, Ensemble(m, k), noisy, ObservationModel::arctan(0.5), r.normal_vector(d),
                                         RngSource(k));
        CHECK(out.size() == N);
        CHECK(out.dim() == d);
        CHECK(out.step_index == k + 1);
      }
    }
  }

  TEST_CASE("property: output does not depend on the worker count") {
    for (std::uint64_t k = 0; k < 5; ++k) {
      RngStream r = test::case_rng(71, k);
      std::vector<StateVec> m;
      for (int n = 0; n < 13; ++n) m.push_back(r.normal_vector(3));
      const TransitionModel noisy{[](const StateVec& x) { return StateVec(x.array().sin() + x.array()); }, 0.2};
      const ObsVec y = r.normal_vector(3);
      for (const auto& cfg : all_filters(13)) {
        const Ensemble a = filter_step(cfg, Ensemble(m, 0), noisy, ObservationModel::arctan(0.4), y, RngSource(k), Parallel(1));
        const Ensemble b = filter_step(cfg, Ensemble(m, 0), noisy, ObservationModel::arctan(0.4), y, RngSource(k), Parallel(3));
        for (std::size_t n = 0; n < 13; ++n) CHECK(a.members[n] == b.members[n]);
      }
    }
  }
}
