#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mrfv/models.hpp"

using namespace mrfv;

namespace
{
    // Composite 5-point Gauss-Legendre rule, independent of the library's Simpson tables.
    template <class F>
    double gauss_composite(const F& f, double a, double b, int panels)
    {
        static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
        static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891, 0.2369268850561891};
        const double h = (b - a) / panels;
        double s       = 0.0;
        for (int p = 0; p < panels; ++p)
        {
            const double c = a + (p + 0.5) * h;
            for (int k = 0; k < 5; ++k)
            {
                s += w[k] * f(c + 0.5 * h * x[k]);
            }
        }
        return 0.5 * h * s;
    }

    GammaVector gamma_at(const GammaField& g, double x)
    {
        return g.left_limit(x);
    }
}

TEST(TrafficFlux, ValuesAtZeroCriticalAndMax)
{
    TrafficModel m;
    const GammaVector g = gamma_at(m.gamma_field(), 3.0);
    EXPECT_EQ(g[1], 70.0);
    EXPECT_EQ(m.flux(g, 0.0), 0.0);
    EXPECT_NEAR(m.u_c(), 16.7512, 5e-5);
    EXPECT_NEAR(m.flux(g, m.u_c()), 70.0 * m.u_c(), 1e-9);
    EXPECT_NEAR(m.flux(g, m.u_c()), 1172.58, 0.01);
    EXPECT_EQ(m.flux(g, 220.0), 0.0);
    EXPECT_EQ(m.flux(g, -3.0), 0.0);
    EXPECT_EQ(m.flux(g, 300.0), 0.0);
}

TEST(TrafficFlux, ReducedSegmentUsesReducedVelocity)
{
    TrafficModel m;
    EXPECT_EQ(gamma_at(m.gamma_field(), 0.5)[1], 25.0);
    EXPECT_EQ(gamma_at(m.gamma_field(), 1.25)[1], 25.0);
    EXPECT_EQ(gamma_at(m.gamma_field(), 0.0)[1], 70.0);
    EXPECT_EQ(gamma_at(m.gamma_field(), 1.3)[1], 70.0);
}

TEST(TrafficFlux, CollapsesWhenVelocitiesEqual)
{
    TrafficParams p;
    p.v_max_reduced = p.v_max_normal;
    TrafficModel m(p);
    for (double x : {-4.0, 0.3, 1.0, 4.9})
    {
        for (double u : {5.0, 50.0, 150.0})
        {
            EXPECT_EQ(m.flux(gamma_at(m.gamma_field(), x), u), m.flux(gamma_at(m.gamma_field(), -4.0), u));
        }
    }
}

TEST(ClarifierFlux, BatchFluxExamples)
{
    ClarifierModel m;
    EXPECT_EQ(m.batch_flux(0.0), 0.0);
    EXPECT_NEAR(m.batch_flux(1.0 / 3.0), 1.0, 1e-15);
    EXPECT_EQ(m.batch_flux(1.0), 0.0);
}

TEST(ClarifierFlux, ComposedFluxExamples)
{
    ClarifierModel m;
    EXPECT_NEAR(m.flux(gamma_at(m.gamma_field(), -2.0), 0.5), 0.3, 1e-15);
    EXPECT_NEAR(m.flux(gamma_at(m.gamma_field(), 0.5), 1.0 / 3.0), 0.72, 1e-14);
    EXPECT_NEAR(m.batch_flux(0.8), 0.216, 1e-15);
    EXPECT_NEAR(m.flux(gamma_at(m.gamma_field(), 0.5), 0.8), 0.216, 1e-15);
}

TEST(ClarifierFlux, GammaFieldLayout)
{
    ClarifierModel m;
    const GammaField& g = m.gamma_field();
    EXPECT_EQ(gamma_at(g, -1.5), (GammaVector{0.0, -1.0}));
    EXPECT_EQ(gamma_at(g, -1.0), (GammaVector{0.0, -1.0}));
    EXPECT_EQ(gamma_at(g, -0.5), (GammaVector{1.0, -1.0}));
    EXPECT_EQ(gamma_at(g, 0.0), (GammaVector{1.0, -1.0}));
    EXPECT_EQ(gamma_at(g, 0.5), (GammaVector{1.0, 0.6}));
    EXPECT_EQ(gamma_at(g, 1.0), (GammaVector{1.0, 0.6}));
    EXPECT_EQ(gamma_at(g, 1.5), (GammaVector{0.0, 0.6}));
}

TEST(ClarifierFlux, ContinuousInU)
{
    ClarifierModel m;
    for (std::size_t b = 0; b < m.gamma_field().branch_count(); ++b)
    {
        const GammaVector g = m.gamma_field().branch(b);
        for (int k = 0; k < 10000; ++k)
        {
            const double u = k / 10000.0;
            EXPECT_LT(std::abs(m.flux(g, u + 1e-7) - m.flux(g, u)), 1e-5) << u;
        }
    }
}

TEST(ClarifierDiffusion, ZeroBelowGelPoint)
{
    ClarifierParams p = clarifier_ex2_params();
    p.sigma_0         = 1.0;
    ClarifierModel m(p);
    EXPECT_EQ(m.diffusion_A(p.u_c), 0.0);
    EXPECT_EQ(m.diffusion_A(0.05), 0.0);
    EXPECT_EQ(m.diffusion_a(0.05), 0.0);
}

TEST(ClarifierDiffusion, ClosedFormMatchesQuadrature)
{
    ClarifierParams p = clarifier_ex2_params();
    p.sigma_0         = 1.0;
    ClarifierModel m(p);
    const double K   = p.v_inf * p.sigma_0 * p.beta / (p.delta_rho * p.g * std::pow(p.u_c, p.beta));
    const auto a     = [&](double s) { return K * std::pow(s, p.beta - 1.0) * std::pow(1.0 - s, p.c_exp); };
    const double ref = gauss_composite(a, p.u_c, 0.5, 2000);
    EXPECT_NEAR(m.diffusion_A(0.5), ref, 1e-12 * std::max(1.0, ref));
    EXPECT_GT(ref, 0.0);

    const ClarifierModel ex3(clarifier_ex3_params(), "clarifier-ex3");
    const ClarifierParams& q = ex3.params();
    const double K3  = q.v_inf * q.sigma_0 * q.beta / (q.delta_rho * q.g * std::pow(q.u_c, q.beta));
    const auto a3    = [&](double s) { return K3 * std::pow(s, q.beta - 1.0) * std::pow(1.0 - s, q.c_exp); };
    for (double u : {0.12, 0.2, 0.35, 0.7, 1.0})
    {
        const double r = gauss_composite(a3, q.u_c, u, 2000);
        EXPECT_NEAR(ex3.diffusion_A(u), r, 1e-12 * std::max(1e-6, r)) << u;
    }
}

TEST(ClarifierDiffusion, NonIntegerExponentFallsBackToTable)
{
    ClarifierParams p = clarifier_ex3_params();
    p.beta            = 5.5;
    ClarifierModel m(p);
    const double K = p.v_inf * p.sigma_0 * p.beta / (p.delta_rho * p.g * std::pow(p.u_c, p.beta));
    const auto a   = [&](double s) { return K * std::pow(s, p.beta - 1.0) * std::pow(1.0 - s, p.c_exp); };
    const double r = gauss_composite(a, p.u_c, 0.4, 2000);
    EXPECT_NEAR(m.diffusion_A(0.4), r, 1e-5 * r);
}

TEST(ClarifierDiffusion, RejectsOutOfRange)
{
    const ClarifierModel m(clarifier_ex3_params());
    EXPECT_THROW((void)m.diffusion_A(-0.1), std::out_of_range);
    EXPECT_THROW((void)m.diffusion_A(1.1), std::out_of_range);
}

TEST(TrafficDiffusion, VanishesOnDegenerateInterval)
{
    TrafficModel m;
    EXPECT_EQ(m.diffusion_A(0.0), 0.0);
    EXPECT_EQ(m.diffusion_A(m.u_c()), 0.0);
    EXPECT_EQ(m.diffusion_a(m.u_c() * 0.5), 0.0);
}

TEST(TrafficDiffusion, MatchesIndependentQuadrature)
{
    TrafficModel m;
    const TrafficParams& p = m.params();
    // a(u) = -u v V'(u) (L(u) + tau v u V'(u)) with V(u) = C ln(u_max/u) above u_c
    const auto a = [&](double u) {
        if (u <= m.u_c())
        {
            return 0.0;
        }
        const double dV    = -p.c_log / u;
        const double speed = p.v_max_normal * p.c_log * std::log(p.u_max / u);
        const double reach = std::max(speed * speed / (2.0 * p.a_decel), p.l_min);
        return -u * p.v_max_normal * dV * (reach + p.tau * p.v_max_normal * u * dV);
    };
    const double kink = p.u_max * std::exp(-std::sqrt(2.0 * p.a_decel * p.l_min) / (p.v_max_normal * p.c_log));
    for (double u : {20.0, 50.0, 100.0, 150.0, 219.0})
    {
        double ref = gauss_composite(a, m.u_c(), std::min(u, kink), 4000);
        if (u > kink)
        {
            ref += gauss_composite(a, kink, u, 4000);
        }
        EXPECT_NEAR(m.diffusion_A(u), ref, 1e-6 * ref) << u;
    }
}

TEST(TrafficDiffusion, RejectsNegativeDiffusion)
{
    TrafficParams p;
    p.tau   = 0.01;
    p.l_min = 0.01;
    EXPECT_THROW(TrafficModel{p}, ConfigError);
}

TEST(Diffusion, NondecreasingOnFineGrid)
{
    const TrafficModel t;
    const ClarifierModel c3(clarifier_ex3_params());
    double prev_t = 0.0;
    double prev_c = 0.0;
    for (int k = 0; k <= 10000; ++k)
    {
        const double at = t.diffusion_A(t.u_max() * k / 10000.0);
        const double ac = c3.diffusion_A(c3.u_max() * k / 10000.0);
        EXPECT_GE(at, prev_t);
        EXPECT_GE(ac, prev_c);
        prev_t = at;
        prev_c = ac;
    }
    EXPECT_LT(t.diffusion_A(100.0), t.diffusion_A(150.0));
}

template <class M>
void check_derivative(const M& m, const std::vector<double>& kinks)
{
    for (std::size_t b = 0; b < m.gamma_field().branch_count(); ++b)
    {
        const GammaVector g = m.gamma_field().branch(b);
        for (int k = 1; k < 200; ++k)
        {
            const double u = m.u_max() * k / 200.0;
            const double h = 1e-6 * m.u_max();
            bool near_kink = false;
            for (double c : kinks)
            {
                near_kink = near_kink || std::abs(u - c) < 2 * h;
            }
            if (near_kink)
            {
                continue;
            }
            const double fd    = (m.flux(g, u + h) - m.flux(g, u - h)) / (2 * h);
            const double exact = m.flux_du(g, u);
            EXPECT_NEAR(fd, exact, 1e-6 * std::max(1.0, std::abs(exact))) << u;
        }
    }
}

TEST(FluxDerivative, MatchesCenteredDifference)
{
    TrafficModel t;
    check_derivative(t, {t.u_c()});
    check_derivative(ClarifierModel{}, {});
    check_derivative(ClarifierModel{clarifier_ex3_params()}, {});
}

template <class M>
void check_critical_points(const M& m)
{
    for (std::size_t b = 0; b < m.gamma_field().branch_count(); ++b)
    {
        const GammaVector g = m.gamma_field().branch(b);
        std::vector<double> crit = m.flux_critical_points(g);
        double prev_u = 0.0;
        double prev   = m.flux_du(g, 0.0);
        for (int k = 1; k <= 10000; ++k)
        {
            const double u = m.u_max() * k / 10000.0;
            const double v = m.flux_du(g, u);
            if (prev != 0.0 && v != 0.0 && (prev > 0.0) != (v > 0.0))
            {
                const bool bracketed = std::any_of(crit.begin(), crit.end(), [&](double c) { return c >= prev_u && c <= u; });
                EXPECT_TRUE(bracketed) << "branch " << b << " sign change in [" << prev_u << ", " << u << "]";
            }
            if (v != 0.0)
            {
                prev_u = u;
                prev   = v;
            }
        }
    }
}

TEST(FluxCriticalPoints, BracketEverySignChange)
{
    check_critical_points(TrafficModel{});
    check_critical_points(ClarifierModel{});
    check_critical_points(ClarifierModel{clarifier_ex3_params()});
}

TEST(FluxCriticalPoints, BatchFluxMaximum)
{
    ClarifierModel m;
    const auto c = m.flux_critical_points(GammaVector{1.0, 0.0});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0], 1.0 / 3.0, 1e-12);
}

TEST(MaxFluxDerivative, ClarifierExample2)
{
    // f'(u) = (27/4)(1-u)(1-3u) spans [-2.25, 6.75]; the vessel branch with q_R = 0.6 gives 7.35.
    EXPECT_NEAR(max_flux_derivative(ClarifierModel{}), 7.35 * 1.01, 1e-9);
}

TEST(MaxFluxDerivative, LinearAndZeroFlux)
{
    ModelSpec lin;
    lin.gammas     = GammaField(GammaVector{0.0, -1.0});
    lin.flux_fn    = [](const GammaVector& g, double u) { return g[1] * (u - 0.5); };
    lin.flux_du_fn = [](const GammaVector& g, double) { return g[1]; };
    EXPECT_NEAR(max_flux_derivative(lin), 1.01, 1e-15);

    ModelSpec zero;
    zero.flux_fn    = [](const GammaVector&, double) { return 0.0; };
    zero.flux_du_fn = [](const GammaVector&, double) { return 0.0; };
    EXPECT_EQ(max_flux_derivative(zero), 0.0);
}

TEST(Presets, ValidationRejectsBadParameters)
{
    ClarifierParams p;
    p.q_l = 0.5;
    EXPECT_THROW(ClarifierModel{p}, ConfigError);
    TrafficParams t;
    t.segment_a = 2.0;
    t.segment_b = 1.0;
    EXPECT_THROW(TrafficModel{t}, ConfigError);
}
