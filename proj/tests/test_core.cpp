#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sumtrans/sumtrans.hpp"

namespace st = sumtrans;

namespace {

st::Field field_plus_const(const st::Field& f, double c) {
  st::Field g = f;
  for (auto& p : g.pieces) {
    auto inner = p.value;
    p.value = [inner, c](double t) { return inner(t) + c; };
  }
  for (auto& pv : g.point_values) pv.second += c;
  for (auto& v : g.support_values) v += c;
  g.upper_bound += c;
  return g;
}

}  // namespace

// ---------------------------------------------------------------- kernels

TEST(Kernels, LogKernelClosedForm) {
  const auto k = st::make_log_kernel(2.0);
  EXPECT_NEAR(k.value(0.5), 2.0 * std::log(0.5), 1e-15);
  EXPECT_NEAR(k.value(-0.25), 2.0 * std::log(0.25), 1e-15);
  EXPECT_NEAR(k.d_minus(0.5), 4.0, 1e-12);
  EXPECT_NEAR(k.d_minus(-0.5), -4.0, 1e-12);
  EXPECT_NEAR(k.d_plus(0.5), 4.0, 1e-12);
  EXPECT_TRUE(k.singular);
  EXPECT_TRUE(k.strictly_concave);
  EXPECT_TRUE(k.monotone);
  ASSERT_TRUE(k.pm_constant.has_value());
  EXPECT_NEAR(*k.pm_constant, 8.0, 1e-12);
  EXPECT_EQ(k.at_plus_one, 0.0);
  EXPECT_EQ(k.at_minus_one, 0.0);
  EXPECT_TRUE(st::is_neg_inf(k.at_zero));
}

TEST(Kernels, DerivativeGuardAtOriginAndRange) {
  const auto k = st::make_log_kernel(1.0);
  EXPECT_THROW((void)k.d_minus(0.0), std::domain_error);
  EXPECT_THROW((void)k.d_minus(5e-13), std::domain_error);
  EXPECT_THROW((void)k.d_plus(-5e-13), std::domain_error);
  EXPECT_THROW((void)k.d_minus(1.0), std::domain_error);
  EXPECT_THROW((void)k.d_plus(-1.0), std::domain_error);
  EXPECT_THROW((void)k.d_minus(1.5), std::domain_error);
  // finite endpoint value: derivatives stay available right next to +-1
  EXPECT_NO_THROW((void)k.d_minus(1.0 - 1e-13));
}

TEST(Kernels, GuardNearSingularEndpoints) {
  const auto k = st::make_sine_kernel(1.0, 1.0);  // -inf at both endpoints
  EXPECT_THROW((void)k.d_minus(1.0 - 1e-13), std::domain_error);
  EXPECT_THROW((void)k.d_plus(-1.0 + 1e-13), std::domain_error);
  EXPECT_NO_THROW((void)k.d_minus(1.0 - 1e-9));
}

TEST(Kernels, SineKernelEndpointsAndPm) {
  const auto half = st::make_sine_kernel(1.0, 0.5);
  EXPECT_NEAR(half.value(0.5), std::log(std::sin(0.25 * M_PI)), 1e-15);
  EXPECT_EQ(half.at_plus_one, 0.0);  // log sin(pi/2)
  const auto check = st::check_pm(half, M_PI - 1e-6, 2000);
  EXPECT_TRUE(check.passes);
  EXPECT_NEAR(check.min_value, M_PI, 1e-3);

  const auto full = st::make_sine_kernel(1.0, 1.0);
  EXPECT_TRUE(st::is_neg_inf(full.at_plus_one));
  EXPECT_TRUE(st::is_neg_inf(full.at_minus_one));
}

TEST(Kernels, SqrtKernelShape) {
  const auto k = st::make_sqrt_kernel();
  EXPECT_NEAR(k.value(0.25), 0.5, 1e-15);
  EXPECT_NEAR(k.value(-0.25), 0.5, 1e-15);
  EXPECT_NEAR(k.d_minus(0.25), 1.0, 1e-12);
  EXPECT_NEAR(k.d_minus(-0.25), -1.0, 1e-12);
  EXPECT_FALSE(k.singular);
  EXPECT_EQ(k.at_zero, 0.0);
}

TEST(Kernels, ScaleKernel) {
  const auto base = st::make_log_kernel(1.0);
  const auto k = st::scale_kernel(base, 2.5);
  EXPECT_NEAR(k.value(0.3), 2.5 * std::log(0.3), 1e-15);
  EXPECT_NEAR(k.d_minus(0.3), 2.5 / 0.3, 1e-10);
  ASSERT_TRUE(k.pm_constant.has_value());
  EXPECT_NEAR(*k.pm_constant, 10.0, 1e-12);
  EXPECT_THROW((void)st::scale_kernel(base, 0.0), st::invalid_kernel_error);
  EXPECT_THROW((void)st::scale_kernel(base, -1.0), st::invalid_kernel_error);
}

TEST(Kernels, PiecewiseJunctionMismatchThrows) {
  std::vector<st::KernelPiece> pieces{
      {-1.0, 0.0, [](double t) { return 1.0 + t; }, [](double) { return 1.0; }},
      {0.0, 0.5, [](double t) { return t; }, [](double) { return 1.0; }},
      {0.5, 1.0, [](double t) { return t + 0.1; }, [](double) { return 1.0; }}};
  EXPECT_THROW((void)st::make_piecewise_kernel(pieces, false, false, 0.0, 0.0,
                                               0.0, 1.1),
               st::invalid_kernel_error);
}

TEST(Kernels, PiecewiseConvexPieceThrows) {
  std::vector<st::KernelPiece> pieces{
      {-1.0, 0.0, [](double t) { return t; }, [](double) { return 1.0; }},
      {0.0, 1.0, [](double t) { return t * t; }, [](double t) { return 2.0 * t; }}};
  EXPECT_THROW((void)st::make_piecewise_kernel(pieces, false, false, {}, -1.0,
                                               0.0, 1.0),
               st::invalid_kernel_error);
}

TEST(Kernels, PiecewiseGapThrows) {
  std::vector<st::KernelPiece> pieces{
      {-1.0, 0.0, [](double t) { return t; }, [](double) { return 1.0; }},
      {0.1, 1.0, [](double t) { return t; }, [](double) { return 1.0; }}};
  EXPECT_THROW((void)st::make_piecewise_kernel(pieces, false, false, {}, -1.0,
                                               0.0, 1.0),
               st::invalid_kernel_error);
}

// ----------------------------------------------------------------- fields

TEST(Fields, DiscreteEvalAndErrors) {
  const auto f = st::make_discrete_field({0.1, 0.5, 0.9}, {0.3, -0.2, 0.1});
  EXPECT_EQ(f.eval(0.5), -0.2);
  EXPECT_TRUE(st::is_neg_inf(f.eval(0.3)));
  EXPECT_TRUE(f.is_discrete());
  EXPECT_THROW((void)st::make_discrete_field({0.5, 0.1}, {0.0, 0.0}),
               st::invalid_field_error);
  EXPECT_THROW((void)st::make_discrete_field({0.1, 0.1}, {0.0, 0.0}),
               st::invalid_field_error);
  EXPECT_THROW((void)st::make_discrete_field({-0.1}, {0.0}),
               st::invalid_field_error);
  EXPECT_THROW((void)st::make_discrete_field({0.1}, {st::neg_inf}),
               st::invalid_field_error);
}

TEST(Fields, LogWeightHintsAndNegativity) {
  const auto f = st::make_log_weight_field(
      [](double t) { return t * (1.0 - t); }, {});
  EXPECT_NEAR(f.eval(0.5), std::log(0.25), 1e-15);
  EXPECT_TRUE(st::is_neg_inf(f.eval(0.0)));
  EXPECT_TRUE(st::is_neg_inf(f.eval(1.0)));
  EXPECT_TRUE(f.hints.inf_plus);
  EXPECT_TRUE(f.hints.inf_minus);
  EXPECT_THROW((void)st::make_log_weight_field(
                   [](double t) { return t - 0.5; }, {}),
               st::invalid_field_error);
}

TEST(Fields, PiecewiseOverlapThrows) {
  std::vector<st::FieldPiece> pieces{
      {0.0, 0.6, false, false, [](double) { return 0.0; }, true},
      {0.5, 1.0, false, false, [](double) { return 0.0; }, true}};
  EXPECT_THROW((void)st::make_piecewise_field(pieces, {}, {}),
               st::invalid_field_error);
}

TEST(Fields, SampledEnvelope) {
  const auto f = st::make_sampled_field({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  EXPECT_EQ(f.eval(0.5), 1.0);
  EXPECT_TRUE(f.grid_limited);
}

TEST(Fields, CensusWeightsEndpointsHalf) {
  const auto f = st::make_discrete_field({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
  const auto c1 = st::validate_field(f, 1);
  EXPECT_DOUBLE_EQ(c1.weighted_count, 2.0);
  EXPECT_TRUE(c1.pass);
  const auto c2 = st::validate_field(f, 2);
  EXPECT_FALSE(c2.pass);  // 2.0 is not > 2
  const auto z = st::validate_field(st::make_zero_field(), 100);
  EXPECT_TRUE(z.pass);
}

// -------------------------------------------------------------- landscape

TEST(Landscape, NodeSystemBasics) {
  st::NodeSystem y({0.25, 0.75});
  EXPECT_TRUE(y.in_closed_simplex());
  EXPECT_TRUE(y.strict());
  EXPECT_EQ(y.lower(0), 0.0);
  EXPECT_EQ(y.upper(0), 0.25);
  EXPECT_EQ(y.lower(2), 0.75);
  EXPECT_EQ(y.upper(2), 1.0);
  EXPECT_FALSE(st::NodeSystem({0.5, 0.5}).strict());
  EXPECT_TRUE(st::NodeSystem({0.5, 0.5}).in_closed_simplex());
  EXPECT_FALSE(st::NodeSystem({0.7, 0.3}).in_closed_simplex());
}

TEST(Landscape, EvalAbsorbsInfinities) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_discrete_field({0.25}, {0.5});
  st::NodeSystem y({0.5});
  EXPECT_TRUE(st::is_neg_inf(st::eval_F(ks, f, y, 0.3)));   // J = -inf
  EXPECT_TRUE(st::is_neg_inf(st::eval_F(ks, f, y, 0.5)));   // K(0) = -inf
  EXPECT_NEAR(st::eval_F(ks, f, y, 0.25), 0.5 + std::log(0.25), 1e-15);
}

TEST(Landscape, LogKernelZeroFieldClosedForm) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  const auto rep = st::interval_maxima(ks, f, st::NodeSystem({0.6}));
  ASSERT_TRUE(rep.regular);
  EXPECT_NEAR(rep.m(0), std::log(0.6), 1e-12);
  EXPECT_NEAR(rep.m(1), std::log(0.4), 1e-12);
  EXPECT_NEAR(rep.intervals[0].argmax, 0.0, 1e-9);
  EXPECT_NEAR(rep.intervals[1].argmax, 1.0, 1e-9);
  EXPECT_TRUE(rep.intervals[0].attained);
  EXPECT_NEAR(rep.m_bar, std::log(0.6), 1e-12);
}

TEST(Landscape, TwoNodeClosedFormAndOracle) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0),
                                   st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  st::NodeSystem y({0.25, 0.75});
  const auto rep = st::interval_maxima(ks, f, y);
  ASSERT_TRUE(rep.regular);
  EXPECT_NEAR(rep.m(0), std::log(3.0 / 16.0), 1e-11);
  EXPECT_NEAR(rep.m(1), std::log(1.0 / 16.0), 1e-11);
  EXPECT_NEAR(rep.m(2), std::log(3.0 / 16.0), 1e-11);
  const auto d = st::phi(ks, f, y);
  EXPECT_NEAR(d[0], -std::log(3.0), 1e-10);
  EXPECT_NEAR(d[1], std::log(3.0), 1e-10);

  // cross-check against the independent grid oracle
  auto F = [&](double t) { return st::eval_F(ks, f, y, t); };
  EXPECT_NEAR(rep.m(1), oracle::grid_max(F, 0.25, 0.75), 1e-9);
}

TEST(Landscape, DiscreteFieldExactMaxima) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_discrete_field({0.1, 0.35, 0.8}, {0.3, -0.2, 0.1});
  const auto rep = st::interval_maxima(ks, f, st::NodeSystem({0.5}));
  ASSERT_TRUE(rep.regular);
  // same arithmetic path as exact candidate enumeration: value + K(x - y)
  const double m0 = std::max(0.3 + std::log(std::abs(0.1 - 0.5)),
                             -0.2 + std::log(std::abs(0.35 - 0.5)));
  const double m1 = 0.1 + std::log(std::abs(0.8 - 0.5));
  EXPECT_EQ(rep.m(0), m0);  // discrete evaluation is exact
  EXPECT_EQ(rep.m(1), m1);
  EXPECT_EQ(rep.intervals[0].argmax, 0.1);
  EXPECT_EQ(rep.intervals[1].argmax, 0.8);
  EXPECT_EQ(rep.intervals[0].plateau_lo, rep.intervals[0].plateau_hi);
}

TEST(Landscape, BracketContainsPlateauAndLevel) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0),
                                   st::make_log_kernel(2.0)};
  const auto f = st::make_log_weight_field(
      [](double t) { return t * (1.0 - t); }, {});
  const auto rep = st::interval_maxima(ks, f, st::NodeSystem({0.3, 0.7}));
  ASSERT_TRUE(rep.regular);
  for (const auto& im : rep.intervals) {
    EXPECT_LE(im.bracket_lo, im.plateau_lo + 1e-12);
    EXPECT_GE(im.bracket_hi, im.plateau_hi - 1e-12);
    EXPECT_LE(im.plateau_lo, im.argmax + 1e-12);
    EXPECT_GE(im.plateau_hi, im.argmax - 1e-12);
  }
}

TEST(Landscape, SingularIntervalDetected) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_discrete_field({0.2}, {0.0});
  const auto rep = st::interval_maxima(ks, f, st::NodeSystem({0.5}));
  EXPECT_FALSE(rep.regular);
  EXPECT_EQ(rep.first_singular, 1u);
  EXPECT_TRUE(st::is_neg_inf(rep.m(1)));
  EXPECT_NEAR(rep.m(0), std::log(0.3), 1e-12);

  const auto cls = st::classify(ks, f, st::NodeSystem({0.5}));
  EXPECT_EQ(cls.kind, st::NodeClass::singular);
  EXPECT_EQ(cls.index, 1u);
  EXPECT_THROW((void)st::phi_from_report(rep), st::not_regular_error);
}

TEST(Landscape, ClassifyDegenerateOnEqualNodes) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0),
                                   st::make_log_kernel(1.0)};
  const auto cls = st::classify(ks, st::make_zero_field(),
                                st::NodeSystem({0.5, 0.5}));
  EXPECT_EQ(cls.kind, st::NodeClass::degenerate);
}

TEST(Landscape, BoundaryNodeEndpointInfinities) {
  // node at 0 with a kernel that vanishes at both endpoints: the degenerate
  // interval [0,0] is singular, the long interval peaks in the middle.
  const std::vector<st::Kernel> ks{st::make_sine_kernel(1.0, 1.0)};
  const auto rep =
      st::interval_maxima(ks, st::make_zero_field(), st::NodeSystem({0.0}));
  EXPECT_FALSE(rep.regular);
  EXPECT_EQ(rep.first_singular, 0u);
  EXPECT_NEAR(rep.m(1), 0.0, 1e-10);
  EXPECT_NEAR(rep.intervals[1].argmax, 0.5, 1e-7);
}

TEST(Landscape, ClassifyAgreesWithMaximaOnRandomInstances) {
  auto rng = oracle::make_rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<st::Kernel> ks(n, st::make_log_kernel(1.0));
    st::Field f;
    if (trial % 2 == 0) {
      f = st::make_zero_field();
    } else {
      std::vector<double> pts;
      for (int i = 0; i < 4; ++i) pts.push_back(u(rng));
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      f = st::make_discrete_field(pts, std::vector<double>(pts.size(), 0.0));
    }
    const auto y = st::NodeSystem(oracle::random_nodes(rng, n, 0.02));
    const auto rep = st::interval_maxima(ks, f, y);
    const auto cls = st::classify(ks, f, y);
    EXPECT_EQ(rep.regular, cls.kind == st::NodeClass::regular)
        << "trial " << trial;
  }
}

TEST(Landscape, LipschitzBoundHolds) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0),
                                   st::make_log_kernel(2.0)};
  const auto f = st::make_zero_field();
  const st::NodeSystem y({0.3, 0.7});
  const auto rep = st::interval_maxima(ks, f, y);
  ASSERT_TRUE(rep.regular);
  // margin between every argmax and every node
  double eta = 1.0;
  for (const auto& im : rep.intervals)
    for (double n : y.nodes) eta = std::min(eta, std::abs(im.argmax - n));
  ASSERT_GT(eta, 0.05);
  const double L = st::lipschitz_bound(ks, eta / 2.0);

  auto rng = oracle::make_rng(12);
  std::uniform_real_distribution<double> d(-0.01, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    st::NodeSystem y2({y.nodes[0] + d(rng), y.nodes[1] + d(rng)});
    const auto rep2 = st::interval_maxima(ks, f, y2);
    ASSERT_TRUE(rep2.regular);
    const double dist = std::max(std::abs(y2.nodes[0] - y.nodes[0]),
                                 std::abs(y2.nodes[1] - y.nodes[1]));
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_LE(std::abs(rep2.m(j) - rep.m(j)), L * dist + 1e-12);
  }
}

TEST(Landscape, FieldShiftEquivariance) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.5),
                                   st::make_log_kernel(1.0)};
  const auto f = st::make_log_weight_field(
      [](double t) { return 0.2 + t * (1.0 - t); }, {});
  const st::NodeSystem y({0.4, 0.8});
  const double c = 2.75;
  const auto rep = st::interval_maxima(ks, f, y);
  const auto rep2 = st::interval_maxima(ks, field_plus_const(f, c), y);
  ASSERT_TRUE(rep.regular && rep2.regular);
  for (std::size_t j = 0; j < 3; ++j)
    EXPECT_NEAR(rep2.m(j), rep.m(j) + c, 1e-10);
  const auto d1 = st::phi_from_report(rep);
  const auto d2 = st::phi_from_report(rep2);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(d2[j], d1[j], 1e-10);
}

TEST(Landscape, GridScanPathFlagsGridLimited) {
  std::vector<st::FieldPiece> pieces{{0.0, 1.0, false, false,
                                      [](double t) {
                                        return std::sin(20.0 * t);
                                      },
                                      /*concave=*/false}};
  const auto f = st::make_piecewise_field(pieces, {}, {});
  const std::vector<st::Kernel> ks{st::make_log_kernel(0.1)};
  const auto rep = st::interval_maxima(ks, f, st::NodeSystem({0.5}));
  EXPECT_TRUE(rep.grid_limited);
  ASSERT_TRUE(rep.regular);
  // weak kernel: maximum is close to the sine crest in each interval
  auto F = [&](double t) { return st::eval_F(ks, f, st::NodeSystem({0.5}), t); };
  EXPECT_NEAR(rep.m(0), oracle::grid_max(F, 0.0, 0.5), 1e-6);
}

// ------------------------------------------------- built-in reference cases

TEST(ReferenceCase81, SweepMatchesClosedForms) {
  const auto rc = st::reference_case("8.1");
  for (int i = 1; i < 100; ++i) {
    const double y = i / 100.0;
    const auto rep =
        st::interval_maxima(rc.kernels, rc.field, st::NodeSystem({y}));
    ASSERT_TRUE(rep.regular) << "y=" << y;
    EXPECT_NEAR(rep.m(0), st::example81_m0(y), 1e-8) << "y=" << y;
    EXPECT_NEAR(rep.m(1), st::example81_m1(y), 1e-8) << "y=" << y;
  }
  const auto d = st::phi(rc.kernels, rc.field, st::NodeSystem({0.5}));
  EXPECT_NEAR(d[0], std::log(0.6), 1e-10);
}

TEST(ReferenceCase82, JumpValues) {
  const auto rc = st::reference_case("8.2");
  const auto at = st::phi(rc.kernels, rc.field, st::NodeSystem({0.5}));
  EXPECT_NEAR(at[0], std::sqrt(0.5), 1e-9);
  const auto left =
      st::phi(rc.kernels, rc.field, st::NodeSystem({0.5 - 1e-9}));
  EXPECT_NEAR(left[0], 1.0, 1e-4);
  EXPECT_NEAR(st::example82_m0(0.3), std::sqrt(0.3), 1e-15);
  EXPECT_NEAR(st::example82_m1(0.3), 1.0 + std::sqrt(0.7), 1e-15);
}

TEST(ReferenceCase83, PlateauAndBranches) {
  const auto rc = st::reference_case("8.3");
  for (double y : {0.5, 0.55, 0.6, 0.65, 0.7, st::example83_plateau_hi}) {
    const auto d = st::phi(rc.kernels, rc.field, st::NodeSystem({y}));
    EXPECT_NEAR(d[0], -1.0, 1e-8) << "y=" << y;
  }
  for (double y : {0.1, 0.3, 0.45, 0.8, 0.9}) {
    const auto d = st::phi(rc.kernels, rc.field, st::NodeSystem({y}));
    EXPECT_NEAR(d[0], st::example83_phi(y), 1e-8) << "y=" << y;
  }
}

