#include "oracles.hpp"
#include "visc/adjoint.hpp"

#include <doctest.h>

#include <random>

using namespace visc;
using visc::test::random_field;
using visc::test::random_mu;

namespace {

SchemeConfig toy_cfg(Index n = 16) { return SchemeConfig(Grid1D(n, 1.0), 1.0, 0.1 / static_cast<double>(n)); }

ExactProvider random_targets(std::mt19937_64& rng, Index n, Index steps) {
  std::vector<CellField> e;
  for (Index s = 0; s <= steps; ++s) e.push_back(random_field(rng, n));
  return [e](Index s) { return e.at(static_cast<std::size_t>(s)); };
}

double grad_rel_err(const SpaceTimeViscosity& got, const SpaceTimeViscosity& ref) {
  return (got - ref).cwiseAbs().maxCoeff() / std::max(1e-300, ref.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("loss coefficients") {
  const Eigen::VectorXd a = loss_coefficients(LossSpec{}, 4, 10);
  CHECK(a[0] == 0.0);
  for (Index n = 1; n <= 4; ++n) CHECK(a[n] == doctest::Approx(1.0 / 40.0));
  LossSpec inst;
  inst.mode = LossSpec::Mode::instantaneous;
  const Eigen::VectorXd b = loss_coefficients(inst, 4, 10);
  CHECK(b.head(4).isZero());
  CHECK(b[4] == doctest::Approx(0.1));
  LossSpec bad;
  bad.weights = {1.0, 2.0};
  CHECK_THROWS_AS(loss_coefficients(bad, 3, 10), std::invalid_argument);
}

TEST_CASE("loss of a perfect match is zero") {
  const SchemeConfig cfg = toy_cfg();
  std::mt19937_64 rng(11);
  const CellField u0 = random_field(rng, 16);
  const SpaceTimeViscosity mu = random_mu(rng, 5, 16, 0.0, 0.01);
  const Trajectory traj = simulate(u0, Stepper{Scheme::ftcs_mu, space_time_mu(mu)}, 5, cfg);
  const ExactProvider self = [&](Index s) { return traj.state(s); };
  CHECK(loss_value(traj, self, LossSpec{}) == 0.0);
  const SpaceTimeViscosity g = grad_mu_global(u0, mu, cfg, self, LossSpec{});
  CHECK(g.isZero());
}

TEST_CASE("uniform offset gives eps squared") {
  const CellField e = CellField::LinSpaced(9, -1.0, 1.0);
  CHECK(instantaneous_loss(e.array() + 0.03, e) == doctest::Approx(0.03 * 0.03).epsilon(1e-12));
}

TEST_CASE("upwind reference loss on the hat benchmark") {
  const SchemeConfig cfg(Grid1D(100, 1.0), 1.0, 1e-3);
  const ExactProvider exact = exact_provider(HatProfile{}, cfg);
  const CellField u0 = exact(0);
  const Trajectory traj = simulate(u0, Stepper{Scheme::upwind, {}}, 150, cfg);
  const double global = loss_value(traj, exact, LossSpec{});
  CHECK(global > 0.0);
  CHECK(global == doctest::Approx(0.01154248562521117).epsilon(1e-12));
  CHECK(instantaneous_loss(traj.final_state(), exact(150)) ==
        doctest::Approx(0.017004448958157736).epsilon(1e-12));
}

TEST_CASE("instantaneous gradient vanishes for constants and at zero residual") {
  const SchemeConfig cfg = toy_cfg();
  std::mt19937_64 rng(12);
  const CellField mu = random_field(rng, 16, 0.0, 0.01);
  const CellField K = CellField::Constant(16, 0.4);
  CHECK(grad_mu_instantaneous(K, random_field(rng, 16), mu, cfg).isZero());
  const CellField u = random_field(rng, 16);
  CHECK(grad_mu_instantaneous(u, ftcs_step(u, mu, cfg), mu, cfg).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("instantaneous gradient matches central differences") {
  const SchemeConfig cfg = toy_cfg();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const CellField u = random_field(rng, 16);
    const CellField target = random_field(rng, 16);
    const CellField mu = random_field(rng, 16, -0.005, 0.095);
    const CellField g = grad_mu_instantaneous(u, target, mu, cfg);
    CellField fd(16);
    for (Index f = 0; f < 16; ++f) {
      const double h = 1e-6 * std::max(1.0, std::abs(mu[f]));
      CellField p = mu, m = mu;
      p[f] += h;
      m[f] -= h;
      fd[f] = (instantaneous_loss(ftcs_step(u, p, cfg), target) - instantaneous_loss(ftcs_step(u, m, cfg), target)) /
              (2.0 * h);
    }
    CHECK((g - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("adjoint gradient matches finite differences") {
  std::mt19937_64 rng(14);
  for (Index n : {8, 16})
    for (Index steps : {1, 3, 5}) {
      const SchemeConfig cfg = toy_cfg(n);
      const CellField u0 = random_field(rng, n);
      const SpaceTimeViscosity mu = random_mu(rng, steps, n, -0.005, 0.095);
      const ExactProvider exact = random_targets(rng, n, steps);
      const SpaceTimeViscosity g = grad_mu_global(u0, mu, cfg, exact, LossSpec{});
      const SpaceTimeViscosity fd = fd_gradient(u0, mu, cfg, exact, LossSpec{});
      CHECK(grad_rel_err(g, fd) < 1e-6);
    }
}

TEST_CASE("adjoint gradient with weights and sum normalisation") {
  std::mt19937_64 rng(15);
  const SchemeConfig cfg = toy_cfg(8);
  LossSpec spec;
  spec.weights = {0.5, 0.0, 2.0, 1.0};
  spec.normalization = LossSpec::Normalization::sum;
  const CellField u0 = random_field(rng, 8);
  const SpaceTimeViscosity mu = random_mu(rng, 4, 8, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 8, 4);
  CHECK(grad_rel_err(grad_mu_global(u0, mu, cfg, exact, spec), fd_gradient(u0, mu, cfg, exact, spec)) < 1e-6);
  spec.mode = LossSpec::Mode::instantaneous;
  CHECK(grad_rel_err(grad_mu_global(u0, mu, cfg, exact, spec), fd_gradient(u0, mu, cfg, exact, spec)) < 1e-6);
}

TEST_CASE("global loss agrees with dense matrix products") {
  std::mt19937_64 rng(16);
  const SchemeConfig cfg = toy_cfg(12);
  const CellField u0 = random_field(rng, 12);
  const SpaceTimeViscosity mu = random_mu(rng, 6, 12, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 12, 6);
  const double dense = visc::test::dense_global_loss(u0, mu, cfg, exact);
  CHECK(global_loss(u0, mu, cfg, exact, LossSpec{}) == doctest::Approx(dense).epsilon(1e-13));
}

TEST_CASE("single-step global gradient equals the instantaneous one") {
  std::mt19937_64 rng(17);
  const SchemeConfig cfg = toy_cfg();
  const CellField u0 = random_field(rng, 16);
  const SpaceTimeViscosity mu = random_mu(rng, 1, 16, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 16, 1);
  const SpaceTimeViscosity g = grad_mu_global(u0, mu, cfg, exact, LossSpec{});
  const CellField gi = grad_mu_instantaneous(u0, exact(1), mu.row(0).transpose(), cfg);
  CHECK((g.row(0).transpose() - gi).cwiseAbs().maxCoeff() < 1e-15 * std::max(1.0, gi.cwiseAbs().maxCoeff()) + 1e-17);
  LossSpec inst;
  inst.mode = LossSpec::Mode::instantaneous;
  CHECK(global_loss(u0, mu, cfg, exact, inst) == global_loss(u0, mu, cfg, exact, LossSpec{}));
}

TEST_CASE("constant initial state gives zero gradient") {
  std::mt19937_64 rng(18);
  const SchemeConfig cfg = toy_cfg();
  const SpaceTimeViscosity mu = random_mu(rng, 5, 16, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 16, 5);
  CHECK(grad_mu_global(CellField::Constant(16, 1.5), mu, cfg, exact, LossSpec{}).isZero());
  CHECK(fd_gradient(CellField::Zero(16), mu, cfg, [](Index) { return CellField::Zero(16); }, LossSpec{}).isZero());
}

TEST_CASE("adjoint gradient is linear in the residual weights") {
  std::mt19937_64 rng(19);
  const SchemeConfig cfg = toy_cfg(8);
  const CellField u0 = random_field(rng, 8);
  const SpaceTimeViscosity mu = random_mu(rng, 3, 8, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 8, 3);
  LossSpec one;
  one.weights = {1.0, 0.0, 0.0};
  LossSpec three;
  three.weights = {0.0, 0.0, 1.0};
  LossSpec both;
  both.weights = {1.0, 0.0, 1.0};
  const SpaceTimeViscosity sum =
      grad_mu_global(u0, mu, cfg, exact, one) + grad_mu_global(u0, mu, cfg, exact, three);
  CHECK(grad_rel_err(sum, grad_mu_global(u0, mu, cfg, exact, both)) < 1e-13);
}

TEST_CASE("single-step central differences are exact for a quadratic") {
  std::mt19937_64 rng(20);
  const SchemeConfig cfg = toy_cfg();
  const CellField u0 = random_field(rng, 16);
  const SpaceTimeViscosity mu = random_mu(rng, 1, 16, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 16, 1);
  const SpaceTimeViscosity h1 = fd_gradient(u0, mu, cfg, exact, LossSpec{}, 1e-3);
  const SpaceTimeViscosity h2 = fd_gradient(u0, mu, cfg, exact, LossSpec{}, 5e-4);
  CHECK(grad_rel_err(h1, h2) < 1e-10);
}

TEST_CASE("evaluate_global reports trajectory and adjoint") {
  std::mt19937_64 rng(21);
  const SchemeConfig cfg = toy_cfg(8);
  const CellField u0 = random_field(rng, 8);
  const SpaceTimeViscosity mu = random_mu(rng, 4, 8, -0.005, 0.095);
  const ExactProvider exact = random_targets(rng, 8, 4);
  const GlobalEvaluation ev = evaluate_global(u0, mu, cfg, exact, LossSpec{});
  CHECK(ev.trajectory.n_steps() == 4);
  CHECK(ev.adjoint.rows() == 5);
  CHECK(ev.gradient.rows() == 4);
  CHECK(ev.loss == doctest::Approx(loss_value(ev.trajectory, exact, LossSpec{})).epsilon(1e-15));
  const Eigen::VectorXd alpha = loss_coefficients(LossSpec{}, 4, 8);
  const CellField lambda_M = 2.0 * alpha[4] * (ev.trajectory.state(4) - exact(4));
  CHECK((ev.adjoint.row(4).transpose() - lambda_M).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gradient of a divergent forward sweep is an error") {
  const SchemeConfig cfg(Grid1D(16, 1.0), 1.0, 0.01);
  const CellField u0 = exact_solution(SineProfile{5, 1.0}, cfg.grid, cfg.c, 0.0);
  const SpaceTimeViscosity mu = SpaceTimeViscosity::Constant(400, 16, -0.02);
  CHECK_THROWS_AS(grad_mu_global(u0, mu, cfg, exact_provider(SineProfile{5, 1.0}, cfg), LossSpec{}), DivergenceError);
}
