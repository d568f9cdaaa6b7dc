#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <type_traits>

#include "rmq/collapse.hpp"
#include "rmq/error.hpp"
#include "rmq/estimates.hpp"

namespace {

using namespace rmq::estimates;

template <class A, class B>
concept Addable = requires(A a, B b) { a + b; };

// Golden values: the paper's order-of-magnitude claims hold within a factor 3.
void expect_order(double value, double paper) {
  EXPECT_GT(value, paper / 3.0) << value << " vs " << paper;
  EXPECT_LT(value, paper * 3.0) << value << " vs " << paper;
}

}  // namespace

static_assert(Addable<Length, Length>);
static_assert(!Addable<Length, Time>);
static_assert(!Addable<MomentumDiffusion, PositionDiffusion>);
static_assert(std::is_same_v<decltype(Length{1.0} / Time{1.0}), Velocity>);
static_assert(std::is_same_v<decltype(Mass{1.0} * Length{1.0} * Length{1.0} / Time{1.0}), Action>);
static_assert(std::is_same_v<decltype(sqrt(PositionDiffusion{1.0} * Time{1.0})), Length>);

TEST(CollisionWindow, PaperWindows) {
  EXPECT_DOUBLE_EQ(collision_window(Length{1e-9}, Velocity{5e2}).si(), 2e-12);
  expect_order(collision_window(Length{1e-6}, Velocity{kSpeedOfLight}).si(), 3e-15);
  EXPECT_NEAR(collision_window(Length{1e-6}, Velocity{3e8}).si(), 3.3333333333e-15, 1e-24);
  EXPECT_EQ(collision_window(Length{7.0}, Velocity{7.0}).si(), 1.0);
}

TEST(CollisionRate, FluxAndArea) {
  EXPECT_DOUBLE_EQ(molecular_flux(NumberDensity{2.4e25}, Velocity{5e2}).si(), 3e27);
  const double gamma = collision_rate(NumberDensity{2.4e25}, Velocity{5e2}, Length{1e-3}).si();
  EXPECT_NEAR(gamma / 9.42477796076938e21, 1.0, 1e-12);
  expect_order(gamma, 1e22);
  EXPECT_NEAR(collision_rate(NumberDensity{2.4e25}, Velocity{5e2}, Length{1e-4}).si(), gamma / 100.0, gamma * 1e-14);
}

TEST(Diffusion, Coefficients) {
  const EnvironmentParams env;
  const auto d = diffusion_coefficients(env, Time{1e-12});
  EXPECT_NEAR(d.n_kicks / 9.424777960769379e9, 1.0, 1e-12);
  expect_order(d.n_kicks, 1e10);
  EXPECT_DOUBLE_EQ(d.p_kick.si(), 2.4e-23);
  expect_order(d.p_kick.si(), 2.5e-23);
  EXPECT_NEAR(d.d_p.si() / 5.428672105403162e-24, 1.0, 1e-12);
  EXPECT_NEAR(d.d_a.si() / 5.428672105403162e-12, 1.0, 1e-12);
}

TEST(Diffusion, KickToMomentumRatio) {
  EnvironmentParams env;
  const double r = kick_to_momentum_ratio(env, Time{1e-12});
  EXPECT_NEAR(r / 2.329951095066839e-12, 1.0, 1e-12);
  expect_order(r, 1e-12);
  EXPECT_NEAR(kick_to_momentum_ratio(env, Time{4e-12}) / r, 2.0, 1e-12);
  EXPECT_EQ(kick_to_momentum_ratio(env, Time{0.0}), 0.0);
}

TEST(SpreadingTime, PaperValueAndScaling) {
  const Time t = spreading_time(Mass{1e-6}, Length{1e-6}, Action{1e-34});
  EXPECT_NEAR(t.si() / 1e16, 1.0, 1e-12);
  EXPECT_NEAR(spreading_time(Mass{1e-6}, Length{2e-6}, Action{1e-34}).si() / t.si(), 4.0, 1e-12);
  EXPECT_GT(spreading_time(Mass{2e-6}, Length{1e-6}, Action{1e-34}).si(), t.si());
  EXPECT_NEAR(1e-12 / t.si(), 1e-28, 1e-40);
  EXPECT_NEAR(1e-15 / t.si(), 1e-31, 1e-43);
}

TEST(EpsilonBound, PaperInputs) {
  const EnvironmentParams env;
  const double air = epsilon_bound(env, Time{2e-12});
  EXPECT_NEAR(air / 2e-6, 1.0, 1e-12);
  const double rad = epsilon_bound(env, collision_window(Length{1e-6}, Velocity{kSpeedOfLight}));
  EXPECT_NEAR(rad / 3.3356409519815205e-9, 1.0, 1e-12);
  expect_order(rad, 3e-9);
  EXPECT_EQ(epsilon_bound(env, Time{0.0}), 0.0);
}

TEST(EpsilonBound, Monotone) {
  const Time spr{1e16};
  EXPECT_LT(epsilon_bound(Velocity{1.0}, Time{1e-12}, Length{1e-6}, spr),
            epsilon_bound(Velocity{1.0}, Time{2e-12}, Length{1e-6}, spr));
  EXPECT_LT(epsilon_bound(Velocity{1.0}, Time{1e-12}, Length{1e-6}, spr),
            epsilon_bound(Velocity{2.0}, Time{1e-12}, Length{1e-6}, spr));
}

TEST(ReturnTime, PaperQuantile) {
  const auto r = return_time(0.999968, Time{1e-12});
  EXPECT_EQ(r.n_steps, 310849499U);
  EXPECT_NEAR(r.duration.si(), 3.10849499e-4, 1e-16);
  expect_order(static_cast<double>(r.n_steps), 3.1e8);
  expect_order(r.duration.si(), 3e-4);
  EXPECT_NEAR(return_time(0.999968, Time{0.5e-12}).duration.si(), 0.5 * r.duration.si(), 1e-18);
}

TEST(ReturnTime, SmallQuantileIsOnlyAsymptotic) {
  const auto r = return_time(0.5, Time{1.0});
  EXPECT_EQ(r.n_steps, 2U);
  // The asymptotic inverse lands on n = 2, where the exact survival is
  // already 0.375 < 0.5: one step suffices.
  EXPECT_LE(rmq::sparre_andersen_exact(r.n_steps), 0.5);
  EXPECT_EQ(rmq::sparre_andersen_inverse(0.5), 2U);
}

TEST(ReturnTime, MonotoneInConfidence) {
  std::uint64_t prev = 0;
  for (double q : {0.5, 0.9, 0.99, 0.999, 0.999968}) {
    const auto n = return_time(q, Time{1e-12}).n_steps;
    EXPECT_GT(n, prev);
    prev = n;
  }
  EXPECT_THROW(return_time(1.0, Time{1e-12}), rmq::Error);
}

TEST(Displacement, PerCycle) {
  const Length d = displacement_per_cycle(PositionDiffusion{1e-12}, Time{3e-4});
  EXPECT_NEAR(d.si(), std::sqrt(3e-16), 1e-22);
  expect_order(d.si(), 1e-8);
  EXPECT_EQ(displacement_per_cycle(PositionDiffusion{1e-12}, Time{0.0}).si(), 0.0);
}

TEST(Displacement, SpreadingIncrement) {
  const Length ds = spreading_increment(Mass{1e-6}, Length{1e-6}, Action{1e-34}, Time{3.10849499e-4});
  EXPECT_NEAR(ds.si() / 7.771237475e-27, 1.0, 1e-12);
}

TEST(Report, ChainsTheFunctions) {
  const auto r = compute_estimates(EnvironmentParams{});
  EXPECT_DOUBLE_EQ(r.tau_collision.si(), 2e-12);
  EXPECT_NEAR(r.tau_photon.si() / 3.3356409519815205e-15, 1.0, 1e-12);
  EXPECT_NEAR(r.n_kicks, r.gamma.si() * 1e-12, 1e-3);
  EXPECT_NEAR(r.da_cycle.si() / 4.107919186400638e-08, 1.0, 1e-12);
  EXPECT_NEAR(r.tau_over_t_spr_air, 1e-28, 1e-40);
  EXPECT_NEAR(r.tau_over_t_spr_radiation, 1e-31, 1e-43);
  EXPECT_EQ(r.n_return, 310849499U);
  const auto rows = report_rows(r);
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) EXPECT_GE(row.value, 0.0) << row.name;
  EXPECT_NE(format_table(r).find("T_spr"), std::string::npos);
}

TEST(Report, RejectsNonPositiveInputs) {
  EnvironmentParams env;
  env.body_mass = Mass{0.0};
  EXPECT_THROW(compute_estimates(env), rmq::Error);
  env = EnvironmentParams{};
  env.return_confidence = 1.5;
  EXPECT_THROW(env.validate(), rmq::Error);
}

TEST(Report, CodataHbarChangesOnlyQuantumRows) {
  EnvironmentParams env;
  env.hbar = Action{kHbarCodata};
  const auto a = compute_estimates(EnvironmentParams{});
  const auto b = compute_estimates(env);
  EXPECT_EQ(a.gamma.si(), b.gamma.si());
  EXPECT_NEAR(b.t_spr.si() / a.t_spr.si(), kHbarRounded / kHbarCodata, 1e-12);
}
