#include "evo/mixed_type.hpp"
#include "evo/operator_family.hpp"
#include "evo/posdef.hpp"
#include "evo/weighted_calculus.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evo;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(lo + (hi - lo) * i / (count - 1));
    return ts;
}

OperatorFamily phi_identity(int dim) {
    return OperatorFamily::scalar_pencil(phi, phi_derivative,
                                         Eigen::MatrixXd::Identity(dim, dim),
                                         Eigen::MatrixXd::Zero(dim, dim), {0.0, 1.0});
}

}  // namespace

TEST_CASE("check_selfadjoint separates symmetric from asymmetric families") {
    const std::vector<double> ts = linspace(-1.0, 2.0, 31);
    const SelfAdjointReport id_report =
        check_selfadjoint(OperatorFamily::identity(3), ts, 1e-12);
    CHECK(id_report.ok);
    CHECK(id_report.max_asymmetry == 0.0);

    Eigen::MatrixXd nilpotent(2, 2);
    nilpotent << 0, 1, 0, 0;
    const SelfAdjointReport bad =
        check_selfadjoint(OperatorFamily::constant(nilpotent), ts, 1e-12);
    CHECK(!bad.ok);
    CHECK(bad.max_asymmetry == doctest::Approx(1.0));
}

TEST_CASE("check_nonnegative on zero, ramp and negative families") {
    const std::vector<double> ts = linspace(-1.0, 2.0, 61);
    CHECK(check_nonnegative(OperatorFamily::zero(2), ts, 1e-12).ok);

    OperatorFamily ramped;
    ramped.dim = 2;
    ramped.sampler = [](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 0) = 1.0;
        m(1, 1) = phi(t);
        return m;
    };
    CHECK(check_nonnegative(ramped, ts, 1e-12).ok);

    const NonNegativeReport neg =
        check_nonnegative(OperatorFamily::constant(-Eigen::MatrixXd::Identity(2, 2)), ts, 1e-12);
    CHECK(!neg.ok);
    CHECK(neg.min_eigenvalue == doctest::Approx(-1.0));
}

TEST_CASE("estimate_lipschitz on constant, ramp and sine families") {
    const std::vector<double> ts = linspace(-1.0, 2.0, 601);
    CHECK(estimate_lipschitz(OperatorFamily::identity(2), ts) == 0.0);
    CHECK(estimate_lipschitz(phi_identity(2), ts) == doctest::Approx(1.0).epsilon(1e-6));

    OperatorFamily sine;
    sine.dim = 1;
    sine.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = std::sin(t);
        return m;
    };
    CHECK(estimate_lipschitz(sine, linspace(-4.0, 4.0, 2001)) ==
          doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derivative_at: analytic, breakpoint and finite-difference paths") {
    CHECK(OperatorFamily::identity(2).derivative_at(0.3).norm() == 0.0);

    const OperatorFamily ramp = phi_identity(2);
    CHECK((ramp.derivative_at(0.5) - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
    CHECK(ramp.derivative_at(0.0).norm() == 0.0);  // declared breakpoint
    CHECK(ramp.derivative_at(1.0).norm() == 0.0);

    OperatorFamily sine;
    sine.dim = 1;
    sine.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = std::sin(t);
        return m;
    };
    CHECK(sine.derivative_at(0.7)(0, 0) == doctest::Approx(std::cos(0.7)).epsilon(1e-6));

    // ||M'(t)|| stays below the Lipschitz estimate (up to sampling slack).
    const std::vector<double> ts = linspace(-4.0, 4.0, 2001);
    const double lip = estimate_lipschitz(sine, ts);
    for (double t : linspace(-3.0, 3.0, 11))
        CHECK(sine.derivative_at(t).norm() <= lip + 1e-3);
}

TEST_CASE("derivative of a selfadjoint family stays selfadjoint") {
    OperatorFamily fam;
    fam.dim = 2;
    fam.sampler = [](double t) {
        Eigen::MatrixXd m(2, 2);
        m << 2.0 + std::sin(t), std::cos(t), std::cos(t), 3.0 + t * t;
        return m;
    };
    for (double t : linspace(-1.0, 1.0, 9)) {
        const Eigen::MatrixXd d = fam.derivative_at(t);
        CHECK((d - d.transpose()).norm() <= 1e-8);
    }
}

TEST_CASE("posdef_certificate: ODE, algebraic and failure cases") {
    const std::vector<double> ts = linspace(-1.0, 2.0, 101);
    for (double rho : {1.0, 2.0, 4.0}) {
        const CertificateResult ode = posdef_certificate(
            OperatorFamily::identity(2), OperatorFamily::zero(2), {rho}, ts);
        REQUIRE(ode.ok());
        CHECK(ode.cert->c0 == doctest::Approx(rho));
    }
    const CertificateResult algebraic = posdef_certificate(
        OperatorFamily::zero(2), OperatorFamily::identity(2), default_rho_grid(), ts);
    REQUIRE(algebraic.ok());
    CHECK(algebraic.cert->c0 == doctest::Approx(1.0));

    const CertificateResult hopeless = posdef_certificate(
        OperatorFamily::zero(2), OperatorFamily::constant(-Eigen::MatrixXd::Identity(2, 2)),
        default_rho_grid(), ts);
    CHECK(!hopeless.ok());
    CHECK(hopeless.worst.min_eigenvalue == doctest::Approx(-1.0));
}

TEST_CASE("posdef_certificate is monotone in rho for nonnegative M0") {
    const std::vector<double> ts = linspace(-1.0, 3.0, 201);
    const MixedTypeConfig cfg{0.25, 1.0, 16, true};
    const TimeGrid grid{-1.0, 3.0, 64};
    const EvoProblem p =
        build_mixed_type(cfg, Weight{1.0}, grid, Trajectory::zero(grid, 32));
    double prev = 0.0;
    for (double rho : {1.0, 2.0, 4.0, 8.0}) {
        const double c0 = posdef_min_eigenvalue(p.M0, p.M1, rho, ts, nullptr);
        CHECK(c0 >= prev - 1e-12);
        prev = c0;
    }
}

TEST_CASE("multiply acts pointwise and respects the sup-norm bound") {
    const TimeGrid g{-1.0, 1.0, 32};
    const Weight w{1.0};
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Trajectory u(g, 2);
    for (int k = 0; k <= g.n; ++k)
        for (int i = 0; i < 2; ++i) u.col(k)(i) = gauss(rng);

    const Trajectory same = multiply(OperatorFamily::identity(2), u);
    for (int k = 0; k <= g.n; ++k) CHECK(same.col(k) == u.col(k));

    OperatorFamily step;
    step.dim = 1;
    step.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = t >= 0.0 ? 1.0 : 0.0;
        return m;
    };
    const Trajectory one = Trajectory::sample_scalar(g, [](double) { return 1.0; });
    const Trajectory stepped = multiply(step, one);
    for (int k = 0; k <= g.n; ++k)
        CHECK(stepped.col(k)(0) == (g.t(k) >= 0.0 ? 1.0 : 0.0));

    OperatorFamily scaled;
    scaled.dim = 2;
    scaled.sampler = [](double t) {
        return Eigen::MatrixXd((2.0 + std::sin(t)) * Eigen::MatrixXd::Identity(2, 2));
    };
    CHECK(weighted_norm(multiply(scaled, u), w) <= 3.0 * weighted_norm(u, w) + 1e-12);

    CHECK_THROWS_AS(multiply(OperatorFamily::identity(3), u), std::invalid_argument);
}

TEST_CASE("discrete product rule residual is O(h)") {
    OperatorFamily fam;
    fam.dim = 1;
    fam.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = 2.0 + std::sin(t);
        return m;
    };
    fam.derivative_sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = std::cos(t);
        return m;
    };
    OperatorFamily dot;
    dot.dim = 1;
    dot.sampler = fam.derivative_sampler;

    const Weight w{1.0};
    std::vector<double> errs;
    for (int n : {200, 400, 800}) {
        const TimeGrid g{0.0, 4.0, n};
        const Trajectory u = Trajectory::sample_scalar(g, [](double t) {
            const double s = (t - 2.0) / 0.7;
            return std::exp(-s * s);
        });
        const Trajectory resid =
            d0_apply(multiply(fam, u)) - multiply(dot, u) - multiply(fam, d0_apply(u));
        errs.push_back(weighted_norm(resid, w));
    }
    for (size_t i = 1; i < errs.size(); ++i) {
        const double ratio = errs[i - 1] / errs[i];
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("discrete commutator identity residual is O(h)") {
    OperatorFamily fam;
    fam.dim = 1;
    fam.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = 2.0 + std::sin(t);
        return m;
    };
    OperatorFamily dot;
    dot.dim = 1;
    dot.sampler = [](double t) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = std::cos(t);
        return m;
    };

    const Weight w{1.0};
    const double eps = 0.1;
    std::vector<double> errs;
    for (int n : {200, 400, 800}) {
        const TimeGrid g{0.0, 4.0, n};
        const Trajectory u = Trajectory::sample_scalar(g, [](double t) {
            const double s = (t - 2.0) / 0.7;
            return std::exp(-s * s);
        });
        const Trajectory lhs = resolvent_eps(d0_apply(multiply(fam, u)), eps);
        const Trajectory mid = d0_apply(multiply(fam, resolvent_eps(u, eps)));
        const Trajectory tail =
            d0_apply(resolvent_eps(multiply(dot, resolvent_eps(u, eps)), eps));
        errs.push_back(weighted_norm(lhs - mid + eps * tail, w));
    }
    for (size_t i = 1; i < errs.size(); ++i) {
        const double ratio = errs[i - 1] / errs[i];
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("lipschitz_hint overrides the sampled estimate") {
    OperatorFamily fam = OperatorFamily::identity(2);
    fam.lipschitz_hint = 7.5;
    CHECK(estimate_lipschitz(fam, linspace(0.0, 1.0, 11)) == 7.5);
}
