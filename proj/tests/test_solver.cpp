#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sumtrans/sumtrans.hpp"

namespace st = sumtrans;

// ---------------------------------------------------------------- calculus

TEST(Jacobian, SymmetricSingleNodeAnalytic) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  const auto est = st::analytic_jacobian(ks, f, st::NodeSystem({0.5}));
  EXPECT_EQ(est.method, "analytic");
  ASSERT_EQ(est.matrix.size(), 1u);
  EXPECT_NEAR(est.matrix[0][0], -4.0, 1e-9);
  EXPECT_NEAR(est.dominance_margin, 4.0, 1e-9);
  EXPECT_EQ(est.max_offdiag, 0.0);
  EXPECT_FALSE(est.kink_flag);
}

TEST(Jacobian, AnalyticAgreesWithFd) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.3),
                                   st::make_log_kernel(2.1)};
  const auto f = st::make_log_weight_field(
      [](double t) { return 0.3 + t * (1.0 - t); }, {});
  const st::NodeSystem y({0.35, 0.72});
  const auto an = st::analytic_jacobian(ks, f, y);
  const auto fd = st::fd_jacobian(ks, f, y);
  EXPECT_EQ(fd.method, "fd");
  EXPECT_GT(fd.h_used, 0.0);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_NEAR(an.matrix[j][i], fd.matrix[j][i],
                  1e-4 * (1.0 + std::abs(an.matrix[j][i])))
          << j << "," << i;
}

TEST(Jacobian, AnalyticRefusesAtKernelKinkFdSucceeds) {
  // reference case 81 at y = 0.5: the first interval's maximizer sits
  // exactly on a kernel kink, so the closed-form derivative is one-sided
  const auto rc = st::reference_case("8.1");
  const st::NodeSystem y({0.5});
  EXPECT_THROW((void)st::analytic_jacobian(rc.kernels, rc.field, y),
               st::not_applicable_error);
  const auto fd = st::fd_jacobian(rc.kernels, rc.field, y);
  // closed form on this branch: m0 constant, m1 = log(0.9 - y)
  EXPECT_NEAR(fd.matrix[0][0], -2.5, 1e-4);
  EXPECT_FALSE(fd.kink_flag);
}

TEST(Jacobian, FdKinkFlagNearBranchPoint) {
  const auto rc = st::reference_case("8.1");
  const st::NodeSystem y({13.0 / 30.0 + 3e-7});
  const auto fd = st::fd_jacobian(rc.kernels, rc.field, y);
  EXPECT_TRUE(fd.kink_flag);
}

TEST(Jacobian, MuBoundsSandwichReferenceCase83) {
  const auto rc = st::reference_case("8.3");
  const st::NodeSystem y({0.4});
  const auto fd = st::fd_jacobian(rc.kernels, rc.field, y);
  EXPECT_NEAR(fd.matrix[0][0], -125.0 / 36.0, 1e-5);
  // interval maxima derivatives: dm0/dy = 125/36, dm1/dy = 0 at y = 0.4
  EXPECT_LE(-fd.mu_hi[0][0], 125.0 / 36.0 + 1e-6);
  EXPECT_GE(-fd.mu_lo[0][0], 125.0 / 36.0 - 1e-6);
  EXPECT_LE(-fd.mu_hi[1][0], 1e-6);
  EXPECT_GE(-fd.mu_lo[1][0], -1e-6);
}

TEST(Jacobian, DominanceMarginOnRandomInstances) {
  auto rng = oracle::make_rng(21);
  std::uniform_real_distribution<double> unu(0.5, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<st::Kernel> ks;
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double nu = unu(rng);
      ks.push_back(st::make_log_kernel(nu));
      c = std::min(c, 4.0 * nu);
    }
    const st::NodeSystem y(oracle::random_nodes(rng, n, 0.06));
    const auto fd = st::fd_jacobian(ks, st::make_zero_field(), y);
    EXPECT_LE(fd.max_offdiag, 1e-6) << "trial " << trial;
    EXPECT_GE(fd.dominance_margin, c - 1e-4) << "trial " << trial;
    EXPECT_TRUE(st::dominance_check(fd, c, 1e-4));
  }
}

TEST(Jacobian, FdStepErrorWhenPerturbationsLeaveRegularSet) {
  // the second interval holds exactly one finite point just past the node:
  // every forward perturbation of the node crosses it and goes singular
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_discrete_field({0.2, 0.35}, {0.0, 0.0});
  const st::NodeSystem y({0.35 - 5e-10});
  EXPECT_NO_THROW((void)st::analytic_jacobian(ks, f, y));
  EXPECT_THROW((void)st::fd_jacobian(ks, f, y), st::fd_step_error);
}

TEST(Jacobian, NotRegularPropagates) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_discrete_field({0.2}, {0.0});
  EXPECT_THROW((void)st::fd_jacobian(ks, f, st::NodeSystem({0.5})),
               st::not_regular_error);
  EXPECT_THROW((void)st::analytic_jacobian(ks, f, st::NodeSystem({0.5})),
               st::not_regular_error);
}

// ------------------------------------------------------------------ solver

TEST(Solver, RoundTripSmall) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0),
                                   st::make_log_kernel(2.0),
                                   st::make_log_kernel(1.5)};
  const auto f = st::make_zero_field();
  const st::NodeSystem y({0.2, 0.5, 0.8});
  const auto d = st::phi(ks, f, y);
  const auto rep = st::solve_phi(ks, f, d);
  ASSERT_EQ(rep.status, st::SolveStatus::converged) << rep.message;
  ASSERT_EQ(rep.y.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(rep.y.nodes[i], y.nodes[i], 1e-8);
  double dmag = 0.0;
  for (double v : d) dmag = std::max(dmag, std::abs(v));
  EXPECT_LE(rep.residual, 1e-10 * (1.0 + dmag));
  for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
    EXPECT_LE(rep.residual_history[i], rep.residual_history[i - 1] + 1e-15);
}

TEST(Solver, ChebyshevEquioscillation) {
  const std::size_t n = 2;
  std::vector<st::Kernel> ks(n, st::make_log_kernel(1.0));
  const auto eq = st::solve_equioscillation(ks, st::make_zero_field(), n);
  ASSERT_EQ(eq.solve.status, st::SolveStatus::converged);
  EXPECT_NEAR(eq.solve.y.nodes[0], oracle::chebyshev_node(2, 1), 1e-9);
  EXPECT_NEAR(eq.solve.y.nodes[1], oracle::chebyshev_node(2, 2), 1e-9);
  EXPECT_NEAR(eq.m_bar, oracle::chebyshev_level(2), 1e-10);
  ASSERT_EQ(eq.m.size(), n + 1);
  for (double mj : eq.m) EXPECT_NEAR(mj, eq.m_bar, 1e-9);
  ASSERT_EQ(eq.points.size(), n + 1);
  EXPECT_NEAR(eq.points.front(), 0.0, 1e-7);
  EXPECT_NEAR(eq.points.back(), 1.0, 1e-7);
}

TEST(Solver, RefusesFiniteKernelAtOrigin) {
  const auto rc = st::reference_case("8.2");
  const auto rep = st::solve_phi(rc.kernels, rc.field, {0.5});
  EXPECT_EQ(rep.status, st::SolveStatus::invalid_problem);
  EXPECT_FALSE(rep.message.empty());
}

TEST(Solver, RefusesNoMarginNoHints) {
  const auto rc = st::reference_case("8.3");
  const auto rep = st::solve_phi(rc.kernels, rc.field, {-1.0});
  EXPECT_EQ(rep.status, st::SolveStatus::invalid_problem);
}

TEST(Solver, RefusesCensusFailure) {
  // two support points but endpoint weights 1/2 each: weighted count 1 = n
  std::vector<st::Kernel> ks{st::make_sine_kernel(1.0, 1.0)};
  const auto f = st::make_discrete_field({0.0, 1.0}, {0.0, 0.0});
  const auto rep = st::solve_phi(ks, f, {0.0});
  EXPECT_EQ(rep.status, st::SolveStatus::invalid_problem);
}

TEST(Solver, RefusesBadTarget) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  EXPECT_EQ(st::solve_phi(ks, f, {}).status, st::SolveStatus::invalid_problem);
  EXPECT_EQ(st::solve_phi(ks, f, {std::nan("")}).status,
            st::SolveStatus::invalid_problem);
  std::vector<st::Kernel> two(2, st::make_log_kernel(1.0));
  EXPECT_EQ(st::solve_phi(two, f, {0.0}).status,
            st::SolveStatus::invalid_problem);
}

TEST(Solver, HintClassAdmitted) {
  // no positive margin constant, but a strictly concave kernel plus an
  // endpoint blow-down field is admissible
  std::vector<st::Kernel> ks{st::make_sine_kernel(1.0, 1.0)};
  const auto f = st::make_log_weight_field(
      [](double t) { return t * (1.0 - t); }, {});
  const auto rep = st::solve_phi(ks, f, {0.0});
  EXPECT_EQ(rep.status, st::SolveStatus::converged) << rep.message;
  EXPECT_NEAR(rep.y.nodes[0], 0.5, 1e-7);  // symmetry
}

TEST(Solver, InitialPointNudgesOffSingularStart) {
  // the uniform initial guess (1/3, 2/3) puts a node exactly on an isolated
  // finite point, which annihilates its interval; the solver must recover
  std::vector<st::FieldPiece> no_pieces;
  const auto f = st::make_piecewise_field(
      no_pieces, {{1.0 / 3.0, 0.0}, {0.5, 0.0}, {0.9, 0.0}}, {});
  std::vector<st::Kernel> ks(2, st::make_log_kernel(1.0));
  const auto d = st::phi(ks, f, st::NodeSystem({0.4, 0.7}));
  const auto rep = st::solve_phi(ks, f, d);
  ASSERT_EQ(rep.status, st::SolveStatus::converged) << rep.message;
  EXPECT_NEAR(rep.y.nodes[0], 0.4, 1e-7);
  EXPECT_NEAR(rep.y.nodes[1], 0.7, 1e-7);
}

TEST(Solver, ForcedJacobianModes) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  st::SolveConfig cfg;
  cfg.jacobian_mode = "fd";
  auto rep = st::solve_phi(ks, f, {0.3}, cfg);
  EXPECT_EQ(rep.status, st::SolveStatus::converged);
  EXPECT_EQ(rep.jacobian_mode_used, "fd");
  cfg.jacobian_mode = "analytic";
  rep = st::solve_phi(ks, f, {0.3}, cfg);
  EXPECT_EQ(rep.status, st::SolveStatus::converged);
  EXPECT_EQ(rep.jacobian_mode_used, "analytic");
}

TEST(Solver, FarTargetsReachable) {
  {
    const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
    const auto f = st::make_zero_field();
    const auto rep = st::solve_phi(ks, f, {-18.0});
    ASSERT_EQ(rep.status, st::SolveStatus::converged) << rep.message;
    const auto check = st::phi(ks, f, rep.y);
    EXPECT_NEAR(check[0], -18.0, 1e-8);
  }
  {
    std::vector<st::Kernel> ks(2, st::make_log_kernel(1.0));
    const auto f = st::make_zero_field();
    const std::vector<double> d{10.0, -10.0};
    const auto rep = st::solve_phi(ks, f, d);
    ASSERT_EQ(rep.status, st::SolveStatus::converged) << rep.message;
    const auto check = st::phi(ks, f, rep.y);
    EXPECT_NEAR(check[0], d[0], 1e-8);
    EXPECT_NEAR(check[1], d[1], 1e-8);
  }
}

TEST(Solver, MaxItersReported) {
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_zero_field();
  st::SolveConfig cfg;
  cfg.max_iters = 1;
  const auto rep = st::solve_phi(ks, f, {-18.0}, cfg);
  EXPECT_EQ(rep.status, st::SolveStatus::max_iters);
  EXPECT_GT(rep.residual, 0.0);
}

TEST(Solver, EquioscillationWithWeightField) {
  // symmetric weight: the single node must sit at 1/2
  const std::vector<st::Kernel> ks{st::make_log_kernel(1.0)};
  const auto f = st::make_log_weight_field(
      [](double t) { return t * (1.0 - t); }, {});
  const auto eq = st::solve_equioscillation(ks, f, 1);
  ASSERT_EQ(eq.solve.status, st::SolveStatus::converged);
  EXPECT_NEAR(eq.solve.y.nodes[0], 0.5, 1e-9);
  EXPECT_NEAR(eq.m[0], eq.m[1], 1e-9);
}
