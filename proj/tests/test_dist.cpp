#include <doctest.h>

#include "rateq/dist.hpp"
#include "test_util.hpp"

using namespace rateq;
using testutil::dsbsSource;

TEST_CASE("validate accepts the uniform tensor") {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.25);
  CHECK(validatePmf(p).ok);
}

TEST_CASE("validate reports negativity with index and magnitude") {
  Eigen::VectorXd p(4);
  p << 0.5, -0.1, 0.3, 0.3;
  ValidationReport r = validatePmf(p);
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("negativity") != std::string::npos);
  CHECK(r.message.find("1") != std::string::npos);
}

TEST_CASE("validate reports sum violations") {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.24975);  // sums to 0.999
  ValidationReport r = validatePmf(p);
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("sum") != std::string::npos);
}

TEST_CASE("marginal of symmetric DSBS is uniform") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);
  JointDist mx = marginal(src, {"x"});
  CHECK(mx.p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mx.p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("marginal of a product keeps the factor") {
  // P(x)P(y) with P(y) = (0.3, 0.7).
  AxisVec axes{{"x", 2}, {"y", 2}};
  Eigen::VectorXd p(4);
  p << 0.2 * 0.3, 0.2 * 0.7, 0.8 * 0.3, 0.8 * 0.7;
  JointDist src = makeJoint(axes, p);
  JointDist my = marginal(src, {"y"});
  CHECK(my.p[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(my.p[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("marginal against an independent summation oracle") {
  JointDist src = testutil::randomFullSource(42);
  JointDist m = marginal(src, {"x", "z"});
  // Oracle: sum by hand over (y,e) with the loop nesting inverted.
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      double expect = 0;
      for (int e = 0; e < 2; ++e)
        for (int y = 0; y < 2; ++y) expect += src.p[((x * 2 + y) * 2 + z) * 2 + e];
      CHECK(m.p[x * 2 + z] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("marginal rejects unknown axes") {
  CHECK_THROWS_AS(marginal(dsbsSource(), {"q"}), Error);
}

TEST_CASE("marginalization commutes with marginalizing over the union") {
  JointDist src = testutil::randomFullSource(7);
  JointDist once = marginal(src, {"x", "y"});
  JointDist twice = marginal(marginal(src, {"x", "y", "z"}), {"x", "y"});
  for (Eigen::Index i = 0; i < once.p.size(); ++i)
    CHECK(once.p[i] == doctest::Approx(twice.p[i]).epsilon(1e-14));
}

TEST_CASE("condition on identical variable gives identity rows") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);
  Channel ch = conditionOn(src, "x", {"y"});
  CHECK(ch.rows(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ch.rows(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("condition of independent variables gives constant rows") {
  AxisVec axes{{"x", 2}, {"y", 2}};
  Eigen::VectorXd p(4);
  p << 0.2 * 0.3, 0.2 * 0.7, 0.8 * 0.3, 0.8 * 0.7;
  JointDist src = makeJoint(axes, p);
  Channel ch = conditionOn(src, "x", {"y"});
  for (int y = 0; y < 2; ++y) CHECK(ch.rows(y, 0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("condition against the direct ratio oracle") {
  JointDist src = testutil::randomFullSource(11);
  Channel ch = conditionOn(src, "z", {"x", "y"});
  JointDist pxy = marginal(src, {"x", "y"});
  JointDist pxyz = marginal(src, {"x", "y", "z"});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        CHECK(ch.rows(x * 2 + y, z) ==
              doctest::Approx(pxyz.p[(x * 2 + y) * 2 + z] / pxy.p[x * 2 + y]).epsilon(1e-12));
}

TEST_CASE("condition marks zero-mass rows undefined instead of crashing") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);  // x == y, off-diagonal mass 0
  Channel ch = conditionOn(src, "z", {"x", "y"});
  CHECK_FALSE(ch.row_defined[0 * 2 + 1]);
  CHECK_FALSE(ch.row_defined[1 * 2 + 0]);
  CHECK(ch.row_defined[0]);
}

TEST_CASE("condition composed with marginal reconstructs the joint") {
  JointDist src = testutil::randomFullSource(13);
  Channel ch = conditionOn(src, "x", {"y", "z", "e"});
  JointDist rest = marginal(src, {"y", "z", "e"});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int e = 0; e < 2; ++e) {
          double lhs = ch.rows((y * 2 + z) * 2 + e, x) * rest.p[(y * 2 + z) * 2 + e];
          CHECK(lhs == doctest::Approx(src.p[((x * 2 + y) * 2 + z) * 2 + e]).epsilon(1e-12));
        }
}

TEST_CASE("composeMarkov with identity channel copies y") {
  AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}};
  CounterRng rng(3, kStreamFixtures);
  JointDist pxyz = makeJoint(axes, rng.randomPmf(8));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  JointDist j = composeMarkov(pxyz, makeChannel({{"y", 2}}, {"e", 2}, id));
  // E copies Y: joint entries vanish off e == y.
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        CHECK(j.p[((x * 2 + y) * 2 + z) * 2 + (1 - y)] == 0.0);
        CHECK(j.p[((x * 2 + y) * 2 + z) * 2 + y] ==
              doctest::Approx(pxyz.p[(x * 2 + y) * 2 + z]).epsilon(1e-12));
      }
}

TEST_CASE("composeMarkov with uniform rows detaches e") {
  AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}};
  CounterRng rng(4, kStreamFixtures);
  JointDist pxyz = makeJoint(axes, rng.randomPmf(8));
  Eigen::MatrixXd rows = Eigen::MatrixXd::Constant(2, 2, 0.5);
  JointDist j = composeMarkov(pxyz, makeChannel({{"y", 2}}, {"e", 2}, rows));
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(j.p[2 * i] == doctest::Approx(pxyz.p[i] * 0.5).epsilon(1e-12));
    CHECK(j.p[2 * i + 1] == doctest::Approx(pxyz.p[i] * 0.5).epsilon(1e-12));
  }
}

TEST_CASE("composeMarkov spot entries match the hand product") {
  JointDist viaCompose = [] {
    AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}};
    Eigen::VectorXd pxyz(8);
    pxyz << 0.3375, 0.1125, 0.0125, 0.0375, 0.0375, 0.0125, 0.1125, 0.3375;
    Eigen::MatrixXd ey(2, 2);
    ey << 0.7, 0.3, 0.3, 0.7;
    return composeMarkov(makeJoint(axes, pxyz), makeChannel({{"y", 2}}, {"e", 2}, ey));
  }();
  JointDist byHand = dsbsSource();
  for (Eigen::Index i = 0; i < 16; ++i)
    CHECK(viaCompose.p[i] == doctest::Approx(byHand.p[i]).epsilon(1e-14));
}

TEST_CASE("composeMarkov output satisfies the e|y Markov invariant") {
  JointDist src = testutil::randomComposedSource(21, 2, 3, 2, 2);
  CHECK(markovResidual(src, "e", {"y"}) < 1e-12);
}

TEST_CASE("attachAux with a constant channel leaves information untouched") {
  JointDist src = dsbsSource();
  Channel c = makeChannel({{"y", 2}}, {"u", 1}, Eigen::MatrixXd::Ones(2, 1));
  JointDist ext = attachAux(src, c, "u");
  CHECK(ext.p.size() == 16);
  for (Eigen::Index i = 0; i < 16; ++i)
    CHECK(ext.p[i] == doctest::Approx(src.p[i]).epsilon(1e-14));
}

TEST_CASE("attachAux v = copy of z has I(Z;V) = H(Z) structure") {
  JointDist src = dsbsSource();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  JointDist ext = attachAux(src, makeChannel({{"z", 2}}, {"v", 2}, id), "v");
  // v == z on every atom of positive mass.
  std::vector<Eigen::Index> coords;
  for (Eigen::Index i = 0; i < ext.p.size(); ++i) {
    unravel(i, ext.axes, coords);
    if (coords[2] != coords[4]) CHECK(ext.p[i] == 0.0);
  }
}

TEST_CASE("attachAux rejects disallowed conditioning") {
  JointDist src = dsbsSource();
  Eigen::MatrixXd rows = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(attachAux(src, makeChannel({{"z", 2}}, {"u", 2}, rows), "u"), Error);
  CHECK_THROWS_AS(attachAux(src, makeChannel({{"y", 2}}, {"v", 2}, rows), "v"), Error);
}

TEST_CASE("attachAux satisfies the Markov residual bound on seeded channels") {
  JointDist src = testutil::randomFullSource(31);
  CounterRng rng(99, kStreamFixtures);
  Eigen::MatrixXd rows(4, 3);
  for (Eigen::Index r = 0; r < 4; ++r) rows.row(r) = rng.randomPmf(3).transpose();
  JointDist ext = attachAux(src, makeChannel({{"x", 2}, {"y", 2}}, {"u", 3}, rows), "u");
  CHECK(markovResidual(ext, "u", {"x", "y"}) < 1e-12);
}

TEST_CASE("attachAux preserves the original marginal exactly") {
  JointDist src = testutil::randomFullSource(37);
  CounterRng rng(100, kStreamFixtures);
  Eigen::MatrixXd rows(2, 4);
  for (Eigen::Index r = 0; r < 2; ++r) rows.row(r) = rng.randomPmf(4).transpose();
  JointDist ext = attachAux(src, makeChannel({{"y", 2}}, {"u", 4}, rows), "u");
  JointDist back = marginal(ext, {"x", "y", "z", "e"});
  for (Eigen::Index i = 0; i < src.p.size(); ++i)
    CHECK(back.p[i] == doctest::Approx(src.p[i]).epsilon(1e-12));
}
