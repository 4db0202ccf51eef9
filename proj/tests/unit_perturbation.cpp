#include "evo/perturbation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evo;

namespace {

EvoProblem algebraic(const TimeGrid& g, double rho, const std::function<double(double)>& f) {
    return EvoProblem{OperatorFamily::zero(1), OperatorFamily::identity(1),
                      SkewOperator::zero(1), Trajectory::sample_scalar(g, f), Weight{rho}, {}};
}

EvoProblem ode(const TimeGrid& g, double rho, const std::function<double(double)>& f) {
    return EvoProblem{OperatorFamily::identity(1), OperatorFamily::zero(1),
                      SkewOperator::zero(1), Trajectory::sample_scalar(g, f), Weight{rho}, {}};
}

double bump(double t, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double s = (t - mid) / (0.18 * (hi - lo));
    return std::exp(-s * s);
}

PerturbationOp scaled_identity(double eps) {
    PerturbationOp op;
    op.apply = [eps](const Trajectory& u) { return eps * u; };
    op.norm_estimate = [eps](const Weight&) { return std::abs(eps); };
    return op;
}

}  // namespace

TEST_CASE("zero perturbation converges immediately to the plain solve") {
    const TimeGrid g{0.0, 2.0, 64};
    const EvoProblem p = ode(g, 1.0, [](double t) { return bump(t, 0.0, 2.0); });
    const FixedPointReport r = fixed_point_solve(p, PerturbationOp::zero());
    CHECK(r.iters <= 2);
    const Trajectory plain = solve(p).u;
    CHECK((r.u.values() - plain.values()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("contraction ratio tracks the perturbation norm over c0") {
    const TimeGrid g{0.0, 2.0, 64};
    const EvoProblem p = algebraic(g, 1.0, [](double t) { return bump(t, 0.0, 2.0); });
    // c0 = 1 for the algebraic problem, so the observed ratio is eps itself.
    for (double eps : {0.1, 0.3, 0.6}) {
        const FixedPointReport r = fixed_point_solve(p, scaled_identity(eps), 1e-12);
        CHECK(r.ratio == doctest::Approx(eps).epsilon(0.2));
        // Fixed point of u = F - eps*u is F/(1+eps).
        for (int k = 0; k <= g.n; ++k)
            CHECK(r.u.col(k)(0) ==
                  doctest::Approx(p.F.col(k)(0) / (1.0 + eps)).epsilon(1e-8));
    }
}

TEST_CASE("perturbation norm at or above c0 is rejected") {
    const TimeGrid g{0.0, 1.0, 32};
    const EvoProblem p = algebraic(g, 1.0, [](double) { return 1.0; });
    CHECK_THROWS_AS(fixed_point_solve(p, scaled_identity(1.0)), PreconditionError);
    CHECK_THROWS_AS(fixed_point_solve(p, scaled_identity(1.5)), PreconditionError);
    CHECK_NOTHROW(fixed_point_solve(p, scaled_identity(0.99), 1e-8, 5000));
}

TEST_CASE("divergence guard catches a lying norm estimate") {
    const TimeGrid g{0.0, 1.0, 32};
    const EvoProblem p = algebraic(g, 1.0, [](double) { return 1.0; });
    PerturbationOp liar;
    liar.apply = [](const Trajectory& u) { return 2.0 * u; };
    liar.norm_estimate = [](const Weight&) { return 0.5; };
    CHECK_THROWS_AS(fixed_point_solve(p, liar), SolveError);
}

TEST_CASE("delay operator: norm, rounding and causality") {
    const TimeGrid g{0.0, 4.0, 400};
    const Weight w{1.0};
    const double tau = 20 * g.h();  // exact grid multiple

    const PerturbationOp delay = delay_operator(tau);
    CHECK(delay.norm_estimate(w) == doctest::Approx(std::exp(-w.rho * tau)));

    // Interior bump: the weighted norm ratio attains the estimate.
    const Trajectory u = Trajectory::sample_scalar(g, [](double t) { return bump(t, 0.5, 3.0); });
    const double ratio = weighted_norm(delay.apply(u), w) / weighted_norm(u, w);
    CHECK(ratio == doctest::Approx(std::exp(-w.rho * tau)).epsilon(0.02));

    // Shifting right preserves causal supports exactly.
    const Trajectory shifted = delay.apply(u);
    for (int k = 0; k < 20; ++k) CHECK(shifted.col(k)(0) == 0.0);
    for (int k = 20; k <= g.n; ++k) CHECK(shifted.col(k)(0) == u.col(k - 20)(0));

    // tau below half a step rounds to the identity shift.
    const PerturbationOp tiny = delay_operator(0.4 * g.h());
    CHECK((tiny.apply(u).values() - u.values()).norm() == 0.0);

    CHECK_THROWS_AS(delay_operator(0.0), PreconditionError);
}

TEST_CASE("delayed fixed point ratio matches exp(-rho tau)") {
    const TimeGrid g{0.0, 4.0, 400};
    const EvoProblem p = algebraic(g, 1.0, [](double t) { return bump(t, 0.5, 3.0); });
    const double tau = 0.5;  // 50 steps exactly
    const FixedPointReport r = fixed_point_solve(p, delay_operator(tau), 1e-12);
    // Early iterations see no truncation at the right boundary, so the first
    // recorded ratio is the sharp contraction factor.
    REQUIRE(r.log.size() >= 2);
    CHECK(r.log[1].ratio == doctest::Approx(std::exp(-p.w.rho * tau)).epsilon(0.02));
}

TEST_CASE("convolution operator: delta kernel, decay kernel and norm bound") {
    const TimeGrid g{0.0, 4.0, 200};
    const Weight w{1.0};

    // Discrete delta h^{-1} at t = 0 reproduces the input exactly.
    Trajectory delta = Trajectory::zero(g, 1);
    delta.col(0)(0) = 1.0 / g.h();
    const PerturbationOp id_conv = convolution_operator(delta);
    const Trajectory u = Trajectory::sample_scalar(g, [](double t) { return bump(t, 0.0, 4.0); });
    CHECK((id_conv.apply(u).values() - u.values()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(id_conv.norm_estimate(w) == doctest::Approx(1.0));

    // Exponential kernel: the weighted L1 norm tends to 1/(1+rho).
    const Trajectory expk = Trajectory::sample_scalar(g, [](double t) { return std::exp(-t); });
    const PerturbationOp conv = convolution_operator(expk);
    CHECK(conv.norm_estimate(w) == doctest::Approx(1.0 / (1.0 + w.rho)).epsilon(0.02));

    // Random signals respect the Young bound (slack for endpoint halving).
    std::mt19937_64 rng(0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double bound = conv.norm_estimate(w);
    for (int trial = 0; trial < 100; ++trial) {
        Trajectory x(g, 1);
        for (int k = 0; k <= g.n; ++k) x.col(k)(0) = gauss(rng);
        CHECK(weighted_norm(conv.apply(x), w) <= 1.05 * bound * weighted_norm(x, w));
    }

    const TimeGrid neg{-1.0, 1.0, 16};
    CHECK_THROWS_AS(convolution_operator(Trajectory::zero(neg, 1)), PreconditionError);
}

TEST_CASE("perturbed solution satisfies the composite equation and causality") {
    const TimeGrid g{0.0, 4.0, 256};
    const double a = 1.5;
    EvoProblem p = ode(g, 1.0, [a](double t) { return t > a ? 1.0 : 0.0; });
    const PerturbationOp delay = delay_operator(0.5);
    const FixedPointReport r = fixed_point_solve(p, delay, 1e-12);

    // Residual of (B + Minf) u = F in the weighted norm.
    const Trajectory resid = apply_operator(p, r.u) + delay.apply(r.u) - p.F;
    CHECK(weighted_norm(resid, p.w) <= 1e-10);

    // Forcing supported in t > a and a causal perturbation keep u causal.
    for (int k = 0; k <= g.n; ++k)
        if (g.t(k) <= a) CHECK(r.u.col(k).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("subspace solve on the full-space branch matches the fixed point") {
    const TimeGrid g{0.0, 2.0, 64};
    const EvoProblem p = algebraic(g, 1.0, [](double t) { return bump(t, 0.0, 2.0); });
    const SubspaceProjector v = SubspaceProjector::coordinates(1, {0});
    const SubspacePerturbedReport r =
        subspace_perturbed_solve(p, scaled_identity(0.1), v, 0.5);
    for (int k = 0; k <= g.n; ++k)
        CHECK(r.u.col(k)(0) == doctest::Approx(p.F.col(k)(0) / 1.1).epsilon(1e-8));
    CHECK(r.rho_used >= p.w.rho);
}

TEST_CASE("subspace solve rejects a perturbation violating the inequality") {
    const TimeGrid g{0.0, 2.0, 64};
    const EvoProblem p = algebraic(g, 1.0, [](double t) { return bump(t, 0.0, 2.0); });
    const SubspaceProjector v = SubspaceProjector::coordinates(1, {0});
    // Re<Minf u | u> = -|u|^2 < (eps_margin - c0)|u|^2 = -0.5 |u|^2.
    CHECK_THROWS_AS(subspace_perturbed_solve(p, scaled_identity(-1.0), v, 0.5),
                    PreconditionError);
    CHECK_THROWS_AS(subspace_perturbed_solve(p, scaled_identity(0.1), v, 2.0),
                    PreconditionError);  // eps_margin above c0
    CHECK_THROWS_AS(subspace_perturbed_solve(p, scaled_identity(0.1), v, -1.0),
                    PreconditionError);
}

TEST_CASE("degenerate M0 with a genuine V-perp component") {
    const TimeGrid g{0.0, 2.0, 64};
    Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(2, 2);
    m0(1, 1) = 3.0;
    const EvoProblem p{OperatorFamily::constant(m0), OperatorFamily::identity(2),
                       SkewOperator::zero(2),
                       Trajectory::sample(g, 2,
                                          [](double t) {
                                              Eigen::VectorXd f(2);
                                              f << bump(t, 0.0, 2.0), std::sin(t);
                                              return f;
                                          }),
                       Weight{1.0}, {}};
    const SubspaceProjector v = SubspaceProjector::coordinates(2, {0});
    const SubspacePerturbedReport r =
        subspace_perturbed_solve(p, scaled_identity(0.2), v, 0.5);
    const Trajectory resid = apply_operator(p, r.u) + 0.2 * r.u - p.F;
    CHECK(weighted_norm(resid, Weight{r.rho_used}) <= 1e-8);
}
