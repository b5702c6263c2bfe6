#include <doctest.h>

#include "rateq/hillclimb.hpp"
#include "rateq/region.hpp"
#include "test_util.hpp"

using namespace rateq;
using testutil::dsbsSource;
using testutil::hb;

namespace {

Channel constantU(Eigen::Index ny) {
  return makeChannel({{"y", ny}}, {"u", 1}, Eigen::MatrixXd::Ones(ny, 1));
}

}  // namespace

TEST_CASE("u_gain with constant U reduces to H(X) - H(Y)") {
  JointDist src = testutil::randomComposedSource(51);
  JointDist ext = attachAux(src, constantU(2), "u");
  double expect = entropyBits(src, {"x"}) - entropyBits(src, {"y"});
  CHECK(uGain(ext, Mode::kThm1) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("u_gain vanishes for x == y under any U") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);
  CounterRng rng(5, kStreamFixtures);
  Eigen::MatrixXd rows(4, 3);
  for (int r = 0; r < 4; ++r) rows.row(r) = rng.randomPmf(3).transpose();
  JointDist ext = attachAux(src, makeChannel({{"x", 2}, {"y", 2}}, {"u", 3}, rows), "u");
  CHECK(uGain(ext, Mode::kThm1) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("u_gain THM3 with constant U equals the SW baseline expression") {
  JointDist src = dsbsSource();
  JointDist ext = attachAux(src, constantU(2), "u");
  double viaGain = uGain(ext, Mode::kThm3);
  // I(Y;Z) - I(Y;E) + H(X|E) - H(Y|E), and its rearrangement H(X|E) - H(Y|Z).
  double direct = mutualInfoBits(src, {"y"}, {"z"}) - mutualInfoBits(src, {"y"}, {"e"}) +
                  condEntropyBits(src, {"x"}, {"e"}) - condEntropyBits(src, {"y"}, {"e"});
  double sw = swEquivocation(src).raw;
  CHECK(viaGain == doctest::Approx(direct).epsilon(1e-10));
  CHECK(viaGain == doctest::Approx(sw).epsilon(1e-10));
}

TEST_CASE("u_gain rejects a structure that breaks the Markov chain") {
  JointDist src = dsbsSource();
  // Attach u on (x,y), then ask for the COR1 gain which demands u - y.
  Eigen::MatrixXd rows(4, 2);
  rows << 1, 0, 0, 1, 0, 1, 1, 0;  // u = x xor y, depends on x given y
  JointDist ext = attachAux(src, makeChannel({{"x", 2}, {"y", 2}}, {"u", 2}, rows), "u");
  CHECK_THROWS_AS(uGain(ext, Mode::kCor1), Error);
}

TEST_CASE("v_tradeoff with constant V gives (H(Y), 0, 0)") {
  JointDist src = dsbsSource();
  Channel cv = makeChannel({{"z", 2}}, {"v", 1}, Eigen::MatrixXd::Ones(2, 1));
  VTradeoff t = vTradeoff(attachAux(src, cv, "v"));
  CHECK(t.h_y_given_v == doctest::Approx(entropyBits(src, {"y"})).epsilon(1e-10));
  CHECK(t.i_z_v == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(t.i_xy_v == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("v_tradeoff with V = Z gives (H(Y|Z), H(Z), I(X,Y;Z))") {
  JointDist src = dsbsSource();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  VTradeoff t = vTradeoff(attachAux(src, makeChannel({{"z", 2}}, {"v", 2}, id), "v"));
  CHECK(t.h_y_given_v == doctest::Approx(condEntropyBits(src, {"y"}, {"z"})).epsilon(1e-10));
  CHECK(t.i_z_v == doctest::Approx(entropyBits(src, {"z"})).epsilon(1e-10));
  CHECK(t.i_xy_v == doctest::Approx(mutualInfoBits(src, {"x", "y"}, {"z"})).epsilon(1e-10));
}

TEST_CASE("v_tradeoff matches an independent recomputation on a seeded channel") {
  JointDist src = testutil::randomFullSource(61);
  CounterRng rng(62, kStreamFixtures);
  Eigen::MatrixXd rows(2, 3);
  for (int r = 0; r < 2; ++r) rows.row(r) = rng.randomPmf(3).transpose();
  JointDist ext = attachAux(src, makeChannel({{"z", 2}}, {"v", 3}, rows), "v");
  VTradeoff t = vTradeoff(ext);
  CHECK(t.h_y_given_v == doctest::Approx(condEntropyBits(ext, {"y"}, {"v"})).epsilon(1e-12));
  CHECK(t.i_z_v == doctest::Approx(mutualInfoBits(ext, {"z"}, {"v"})).epsilon(1e-12));
  CHECK(t.i_xy_v == doctest::Approx(mutualInfoBits(ext, {"x", "y"}, {"v"})).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// optimize_u
// ---------------------------------------------------------------------------

TEST_CASE("optimize_u is zero for x == y in THM1 mode") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);
  OptimizeUResult r = optimizeU(src, Mode::kThm1, 24);
  CHECK(std::abs(r.value) < 1e-9);
}

TEST_CASE("optimize_u COR1 with independent x reaches H(X)") {
  // X independent of Y: vertex atoms drive H_q(Y) to zero.
  AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}, {"e", 1}};
  Eigen::VectorXd p(8);
  // P(x) = (0.3, 0.7), Y uniform, Z = Y.
  p << 0.3 * 0.5, 0, 0, 0.3 * 0.5, 0.7 * 0.5, 0, 0, 0.7 * 0.5;
  JointDist src = makeJoint(axes, p);
  OptimizeUResult r = optimizeU(src, Mode::kCor1, 24);
  CHECK(r.value == doctest::Approx(testutil::entropyOracle(Eigen::Vector2d(0.3, 0.7)))
                       .epsilon(1e-9));
}

TEST_CASE("optimize_u witness reproduces the value through u_gain") {
  for (Mode mode : {Mode::kThm1, Mode::kCor1, Mode::kThm2, Mode::kThm3}) {
    JointDist src = dsbsSource();
    OptimizeUResult r = optimizeU(src, mode, 16);
    JointDist ext = attachAux(src, r.witness, "u");
    CHECK(uGain(ext, mode) == doctest::Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("optimize_u witness support respects the cardinality bounds") {
  JointDist src = testutil::randomComposedSource(71);
  OptimizeUResult pair = optimizeU(src, Mode::kThm1, 12);
  CHECK(pair.witness.to.size <= 2 * 2 + 1);
  OptimizeUResult yonly = optimizeU(src, Mode::kThm3, 12);
  CHECK(yonly.witness.to.size <= 2 + 1);
}

TEST_CASE("optimize_u never loses to doubling the grid") {
  for (Mode mode : {Mode::kThm1, Mode::kThm3}) {
    JointDist src = testutil::randomComposedSource(73);
    double v12 = optimizeU(src, mode, 12).value;
    double v24 = optimizeU(src, mode, 24).value;
    CHECK(v24 >= v12 - 1e-10);
  }
}

TEST_CASE("optimize_u agrees with the hill-climb oracle on DSBS THM3") {
  JointDist src = dsbsSource();
  OptimizeUResult lp = optimizeU(src, Mode::kThm3, 48);
  double hc = hillClimbUGain(src, Mode::kThm3, 1234, 24, 200);
  CHECK(std::abs(lp.value - hc) < 1e-3);
}

// ---------------------------------------------------------------------------
// optimize_v
// ---------------------------------------------------------------------------

TEST_CASE("optimize_v with a full budget reaches I(X,Y;Z)") {
  JointDist src = dsbsSource();
  double hz = entropyBits(src, {"z"});
  OptimizeVResult r = optimizeV(src, hz, 24);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(mutualInfoBits(src, {"x", "y"}, {"z"})).epsilon(1e-9));
}

TEST_CASE("optimize_v with zero budget returns zero and a constant witness") {
  JointDist src = dsbsSource();
  OptimizeVResult r = optimizeV(src, 0.0, 24);
  REQUIRE(r.feasible);
  CHECK(std::abs(r.value) < 1e-9);
  CHECK(r.i_z_v <= 1e-9);
}

TEST_CASE("optimize_v matches a finer grid and is monotone in the budget") {
  JointDist src = dsbsSource();
  double hz = entropyBits(src, {"z"});
  double v24 = optimizeV(src, 0.5 * hz, 24).value;
  double v48 = optimizeV(src, 0.5 * hz, 48).value;
  CHECK(std::abs(v48 - v24) < 2e-3);
  double lo = optimizeV(src, 0.25 * hz, 24).value;
  double hi = optimizeV(src, 0.75 * hz, 24).value;
  CHECK(lo <= v24 + 1e-12);
  CHECK(v24 <= hi + 1e-12);
}

TEST_CASE("optimize_v witness reproduces its reported quantities") {
  JointDist src = testutil::randomComposedSource(81);
  double hz = entropyBits(src, {"z"});
  OptimizeVResult r = optimizeV(src, 0.6 * hz, 24);
  REQUIRE(r.feasible);
  JointDist ext = attachAux(src, r.witness, "v");
  VTradeoff t = vTradeoff(ext);
  CHECK(t.i_xy_v == doctest::Approx(r.value).epsilon(1e-9));
  CHECK(t.h_y_given_v == doctest::Approx(r.h_y_given_v).epsilon(1e-9));
  CHECK(t.i_z_v == doctest::Approx(r.i_z_v).epsilon(1e-9));
  CHECK(t.i_z_v <= 0.6 * hz + 1e-9);
}

// ---------------------------------------------------------------------------
// frontier and baseline
// ---------------------------------------------------------------------------

TEST_CASE("sw_equivocation trivial cases") {
  // X = Y, Z = Y, |E| = 1: H(Y) - 0.
  JointDist a = dsbsSource(0.0, 0.0, 0.0, true, 1);
  CHECK(swEquivocation(a).raw == doctest::Approx(1.0).epsilon(1e-10));
  // X = Y, E = Y, Z independent: 0 - H(Y) raw, clamps to 0.
  AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}, {"e", 2}};
  Eigen::VectorXd p = Eigen::VectorXd::Zero(16);
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) p[((y * 2 + y) * 2 + z) * 2 + y] = 0.25;
  JointDist b = makeJoint(axes, p);
  CHECK(swEquivocation(b).raw == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(swEquivocation(b).clamped == 0.0);
}

TEST_CASE("sw_equivocation on the DSBS fixture matches the closed forms") {
  JointDist src = dsbsSource();
  double flipXE = 0.1 * 0.7 + 0.9 * 0.3;  // X and E differ through two BSCs
  CHECK(swEquivocation(src).raw == doctest::Approx(hb(flipXE) - hb(0.25)).epsilon(1e-10));
}

TEST_CASE("frontier is monotone in both budgets over feasible points") {
  JointDist src = dsbsSource();
  double hyz = condEntropyBits(src, {"y"}, {"z"});
  double hy = entropyBits(src, {"y"});
  double hz = entropyBits(src, {"z"});
  std::vector<std::pair<double, double>> budgets;
  std::vector<double> ras, rcs;
  for (int i = 0; i < 4; ++i) ras.push_back(hyz + (hy - hyz) * i / 3.0);
  for (int i = 0; i < 4; ++i) rcs.push_back(hz * i / 3.0);
  for (double ra : ras)
    for (double rc : rcs) budgets.emplace_back(ra, rc);
  FrontierOptions opts;
  opts.resolution = 12;
  std::vector<RegionPoint> pts = regionFrontier(src, Mode::kThm1, budgets, opts);
  auto at = [&](int i, int j) -> const RegionPoint& { return pts[i * 4 + j]; };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (!at(i, j).feasible) continue;
      if (i + 1 < 4 && at(i + 1, j).feasible)
        CHECK(at(i + 1, j).delta_clamped >= at(i, j).delta_clamped - 1e-12);
      if (j + 1 < 4 && at(i, j + 1).feasible)
        CHECK(at(i, j + 1).delta_clamped >= at(i, j).delta_clamped - 1e-12);
    }
  // Low r_a with zero r_c is infeasible: no V reaches H(Y|V) <= H(Y|Z) without rate.
  CHECK_FALSE(at(0, 0).feasible);
}

TEST_CASE("frontier THM1 delta decomposes as V part plus U part") {
  JointDist src = dsbsSource();
  double hz = entropyBits(src, {"z"});
  double hy = entropyBits(src, {"y"});
  FrontierOptions opts;
  opts.resolution = 16;
  std::vector<RegionPoint> pts = regionFrontier(src, Mode::kThm1, {{hy, hz}}, opts);
  REQUIRE(pts.size() == 1);
  REQUIRE(pts[0].feasible);
  double v = optimizeV(src, hz, 16, hy).value;
  double u = optimizeU(src, Mode::kThm1, 16).value;
  CHECK(pts[0].delta_raw == doctest::Approx(v + u).epsilon(1e-12));
}

TEST_CASE("COR1 frontier never exceeds THM1") {
  JointDist src = testutil::randomComposedSource(91);
  double hz = entropyBits(src, {"z"});
  double hy = entropyBits(src, {"y"});
  FrontierOptions opts;
  opts.resolution = 12;
  std::vector<std::pair<double, double>> budgets{{hy, hz}, {hy, 0.4 * hz}};
  std::vector<RegionPoint> thm1 = regionFrontier(src, Mode::kThm1, budgets, opts);
  std::vector<RegionPoint> cor1 = regionFrontier(src, Mode::kCor1, budgets, opts);
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (!thm1[i].feasible || !cor1[i].feasible) continue;
    CHECK(cor1[i].delta_clamped <= thm1[i].delta_clamped + 1e-9);
  }
}

TEST_CASE("THM2 with |E| = 1 equals THM1 pointwise") {
  JointDist src = dsbsSource(0.1, 0.25, 0.3, false, 1);
  double hz = entropyBits(src, {"z"});
  double hy = entropyBits(src, {"y"});
  double hyz = condEntropyBits(src, {"y"}, {"z"});
  std::vector<std::pair<double, double>> budgets;
  for (int i = 0; i < 3; ++i) budgets.emplace_back(hyz + (hy - hyz) * i / 2.0, hz * (i + 1) / 3.0);
  FrontierOptions opts;
  opts.resolution = 12;
  std::vector<RegionPoint> a = regionFrontier(src, Mode::kThm1, budgets, opts);
  std::vector<RegionPoint> b = regionFrontier(src, Mode::kThm2, budgets, opts);
  for (size_t i = 0; i < budgets.size(); ++i) {
    CHECK(a[i].feasible == b[i].feasible);
    if (a[i].feasible)
      CHECK(b[i].delta_clamped == doctest::Approx(a[i].delta_clamped).epsilon(1e-9));
  }
}

TEST_CASE("Remark 1 reduction: x == y at full budgets yields I(Y;Z)") {
  JointDist src = dsbsSource(0.0, 0.25, 0.3, true);
  double hyz = condEntropyBits(src, {"y"}, {"z"});
  double hz = entropyBits(src, {"z"});
  FrontierOptions opts;
  opts.resolution = 24;
  std::vector<RegionPoint> pts = regionFrontier(src, Mode::kThm1, {{hyz, hz}}, opts);
  REQUIRE(pts[0].feasible);
  CHECK(pts[0].delta_clamped ==
        doctest::Approx(mutualInfoBits(src, {"y"}, {"z"})).epsilon(1e-6));
}

TEST_CASE("THM3 frontier: constant-U never beats the optimum, budgets gate feasibility") {
  JointDist src = dsbsSource();
  double hyz = condEntropyBits(src, {"y"}, {"z"});
  double hz = entropyBits(src, {"z"});
  FrontierOptions opts;
  opts.resolution = 24;
  std::vector<RegionPoint> pts =
      regionFrontier(src, Mode::kThm3, {{hyz, hz}, {hyz - 0.05, hz}, {hyz, hz - 0.05}}, opts);
  REQUIRE(pts[0].feasible);
  CHECK_FALSE(pts[1].feasible);
  CHECK_FALSE(pts[2].feasible);
  CHECK(pts[0].delta_clamped >= swEquivocation(src).clamped - 1e-9);
}

TEST_CASE("data processing: THM1 delta within I(X,Y;Z) plus the U part") {
  JointDist src = testutil::randomComposedSource(95);
  double hz = entropyBits(src, {"z"});
  double hy = entropyBits(src, {"y"});
  FrontierOptions opts;
  opts.resolution = 12;
  std::vector<RegionPoint> pts = regionFrontier(src, Mode::kThm1, {{hy, hz}}, opts);
  REQUIRE(pts[0].feasible);
  double cap = mutualInfoBits(src, {"x", "y"}, {"z"}) + optimizeU(src, Mode::kThm1, 12).value;
  CHECK(pts[0].delta_raw <= cap + 1e-9);
}
