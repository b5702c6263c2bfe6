#include <doctest.h>

#include "rateq/rng.hpp"

using namespace rateq;

TEST_CASE("identical stream coordinates give identical draws") {
  CounterRng a(42, kStreamTrials, 7), b(42, kStreamTrials, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.nextU64() == b.nextU64());
}

TEST_CASE("different substreams decorrelate") {
  CounterRng a(42, kStreamTrials, 7), b(42, kStreamTrials, 8);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.nextU64() == b.nextU64();
  CHECK(same == 0);
}

TEST_CASE("doubles live in [0,1) and look uniform") {
  CounterRng r(1, kStreamCodebook);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    double u = r.nextDouble();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("discrete sampling tracks the weights") {
  CounterRng r(3, kStreamTrials);
  Eigen::VectorXd w(3);
  w << 0.2, 0.5, 0.3;
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  for (int i = 0; i < 20000; ++i) counts[r.sampleDiscrete(w)] += 1;
  counts /= 20000;
  for (int k = 0; k < 3; ++k) CHECK(counts[k] == doctest::Approx(w[k]).epsilon(0.08));
}

TEST_CASE("random pmf is a pmf and seed-deterministic") {
  CounterRng a(9, kStreamMultiLetter), b(9, kStreamMultiLetter);
  Eigen::VectorXd p = a.randomPmf(6), q = b.randomPmf(6);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.minCoeff() > 0);
  for (int i = 0; i < 6; ++i) CHECK(p[i] == q[i]);
}
