#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "gamma_field.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace mrfv
{
    /// Requirements on a problem definition u_t + f(gamma(x), u)_x = (gamma_1(x) A(u)_x)_x.
    template <class M>
    concept FluxModel = requires(const M& m, const GammaVector& g, double u) {
        { m.name() } -> std::convertible_to<std::string>;
        { m.flux(g, u) } -> std::convertible_to<double>;
        { m.flux_du(g, u) } -> std::convertible_to<double>;
        { m.flux_critical_points(g) } -> std::convertible_to<std::vector<double>>;
        { m.has_diffusion() } -> std::convertible_to<bool>;
        { m.diffusion_A(u) } -> std::convertible_to<double>;
        { m.diffusion_a(u) } -> std::convertible_to<double>;
        { m.diffusion_coefficient(g) } -> std::convertible_to<double>;
        { m.diffusion_kinks() } -> std::convertible_to<std::vector<double>>;
        { m.gamma_field() } -> std::convertible_to<const GammaField&>;
        { m.u_max() } -> std::convertible_to<double>;
        { m.domain() } -> std::convertible_to<Interval>;
        { m.boundary() } -> std::convertible_to<Boundary>;
        { m.initial() } -> std::convertible_to<const PiecewiseProfile&>;
    };

    /// Antiderivative of a nonnegative integrand on [0, upper].
    ///
    /// Breakpoints (where the integrand has kinks) become table nodes; each
    /// segment between them is split uniformly, integrated by adaptive
    /// Simpson and interpolated by cubic Hermite using the integrand itself
    /// as the nodal slope.
    class TabulatedIntegral
    {
      public:
        TabulatedIntegral() = default;

        template <class F>
        TabulatedIntegral(const F& integrand, double upper, std::size_t intervals, std::vector<double> splits)
        {
            std::vector<double> cuts{0.0};
            std::sort(splits.begin(), splits.end());
            for (double c : splits)
            {
                if (c > cuts.back() && c < upper)
                {
                    cuts.push_back(c);
                }
            }
            cuts.push_back(upper);
            m_segments.clear();
            double acc = 0.0;
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
            {
                Segment seg;
                seg.lo    = cuts[s];
                seg.hi    = cuts[s + 1];
                seg.count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(intervals * (seg.hi - seg.lo) / upper)));
                seg.step  = (seg.hi - seg.lo) / static_cast<double>(seg.count);
                seg.values = {acc};
                seg.slopes = {integrand(seg.lo)};
                for (std::size_t k = 0; k < seg.count; ++k)
                {
                    const double a = seg.lo + static_cast<double>(k) * seg.step;
                    const double b = k + 1 == seg.count ? seg.hi : seg.lo + static_cast<double>(k + 1) * seg.step;
                    acc += adaptive_simpson(integrand, a, b, 1e-15);
                    seg.values.push_back(acc);
                    seg.slopes.push_back(integrand(b));
                }
                m_segments.push_back(std::move(seg));
            }
        }

        [[nodiscard]] double operator()(double u) const
        {
            std::size_t s = 0;
            while (s + 1 < m_segments.size() && u > m_segments[s].hi)
            {
                ++s;
            }
            const Segment& seg = m_segments[s];
            const double x     = (u - seg.lo) / seg.step;
            const auto k       = std::min(static_cast<std::size_t>(std::max(x, 0.0)), seg.count - 1);
            const double t     = x - static_cast<double>(k);
            const double h     = seg.step;
            const double t2    = t * t;
            const double t3    = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * seg.values[k] + (t3 - 2 * t2 + t) * h * seg.slopes[k]
                 + (-2 * t3 + 3 * t2) * seg.values[k + 1] + (t3 - t2) * h * seg.slopes[k + 1];
        }

      private:
        struct Segment
        {
            double lo          = 0.0;
            double hi          = 1.0;
            double step        = 1.0;
            std::size_t count  = 1;
            std::vector<double> values{0.0, 0.0};
            std::vector<double> slopes{0.0, 0.0};
        };

        std::vector<Segment> m_segments{Segment{}};
    };

    namespace detail
    {
        inline double ipow(double x, int n)
        {
            double r = 1.0;
            while (n > 0)
            {
                if (n & 1)
                {
                    r *= x;
                }
                x *= x;
                n >>= 1;
            }
            return r;
        }

        inline bool is_integral(double x)
        {
            return x >= 0.0 && std::abs(x - std::round(x)) < 1e-12 && x < 64.0;
        }

        template <class F>
        double bisect_root(const F& g, double a, double b)
        {
            double ga = g(a);
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it)
            {
                const double m  = 0.5 * (a + b);
                const double gm = g(m);
                if ((gm > 0.0) == (ga > 0.0))
                {
                    a  = m;
                    ga = gm;
                }
                else
                {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
    }

    /// Sign changes of `du` on (0, u_max), located by scanning `samples`
    /// points and refining each bracket by bisection.
    template <class Du>
    std::vector<double> scan_sign_changes(const Du& du, double u_max, int samples = 10000)
    {
        std::vector<double> roots;
        double prev_u = 0.0;
        double prev   = du(0.0);
        for (int k = 1; k <= samples; ++k)
        {
            const double u = u_max * static_cast<double>(k) / samples;
            const double v = du(u);
            if (prev != 0.0 && v != 0.0 && (prev > 0.0) != (v > 0.0))
            {
                roots.push_back(detail::bisect_root(du, prev_u, u));
            }
            if (v != 0.0)
            {
                prev_u = u;
                prev   = v;
            }
        }
        return roots;
    }

    // ------------------------------------------------------------------
    // Traffic flow with driver reaction (Dick-Greenberg velocity).
    // ------------------------------------------------------------------

    struct TrafficParams
    {
        double u_max          = 220.0;              // cars/mi
        double c_log          = std::numbers::e / 7.0;
        double v_max_normal   = 70.0;               // mph
        double v_max_reduced  = 25.0;               // mph
        double segment_a      = 0.0;                // mi
        double segment_b      = 1.25;               // mi
        double road_lo        = -5.0;               // mi
        double road_hi        = 5.0;                // mi
        double tau            = 2.0 / 3600.0;       // h
        double a_decel        = 0.1 * 9.81 * 3600.0 * 3600.0 / 1609.344; // mi/h^2
        double l_min          = 0.05;               // mi
        double convoy_lo      = -2.0;               // mi
        double convoy_hi      = -1.0;               // mi
        double convoy_density = 100.0;              // cars/mi

        [[nodiscard]] double u_c() const
        {
            return u_max * std::exp(-1.0 / c_log);
        }

        void validate() const
        {
            if (!(u_max > 0.0 && c_log > 0.0 && v_max_normal > 0.0 && v_max_reduced > 0.0))
            {
                throw ConfigError("traffic: u_max, c_log and velocities must be positive");
            }
            if (!(road_lo < segment_a && segment_a < segment_b && segment_b < road_hi))
            {
                throw ConfigError("traffic: reduced segment [a,b] must satisfy road_lo < a < b < road_hi");
            }
            if (!(u_c() > 0.0 && u_c() < u_max))
            {
                throw ConfigError("traffic: critical density must lie in (0, u_max)");
            }
            if (!(tau >= 0.0 && a_decel > 0.0 && l_min > 0.0))
            {
                throw ConfigError("traffic: tau >= 0, a_decel > 0, l_min > 0 required");
            }
            if (!(convoy_density >= 0.0 && convoy_density <= u_max && convoy_lo < convoy_hi))
            {
                throw ConfigError("traffic: convoy must be an interval with density in [0, u_max]");
            }
        }

        template <class Visitor>
        static void for_each_field(Visitor&& visit)
        {
            visit("u_max", &TrafficParams::u_max);
            visit("c_log", &TrafficParams::c_log);
            visit("v_max_normal", &TrafficParams::v_max_normal);
            visit("v_max_reduced", &TrafficParams::v_max_reduced);
            visit("segment_a", &TrafficParams::segment_a);
            visit("segment_b", &TrafficParams::segment_b);
            visit("road_lo", &TrafficParams::road_lo);
            visit("road_hi", &TrafficParams::road_hi);
            visit("tau", &TrafficParams::tau);
            visit("a_decel", &TrafficParams::a_decel);
            visit("l_min", &TrafficParams::l_min);
            visit("convoy_lo", &TrafficParams::convoy_lo);
            visit("convoy_hi", &TrafficParams::convoy_hi);
            visit("convoy_density", &TrafficParams::convoy_density);
        }
    };

    /// Periodic circular road; v_max drops on [a, b]. The diffusion term
    /// uses the constant v_max_normal and does not see the road condition.
    class TrafficModel
    {
      public:
        static constexpr std::size_t table_intervals = 4096;

        explicit TrafficModel(TrafficParams p = {}, std::string name = "traffic-ex1")
            : m_p(p)
            , m_name(std::move(name))
        {
            m_p.validate();
            m_uc    = m_p.u_c();
            m_gamma = GammaField({m_p.segment_a, m_p.segment_b},
                                 {GammaVector{1.0, m_p.v_max_normal}, GammaVector{1.0, m_p.v_max_reduced}, GammaVector{1.0, m_p.v_max_normal}});
            m_initial = PiecewiseProfile::steps({m_p.convoy_lo, m_p.convoy_hi}, {0.0, m_p.convoy_density, 0.0});

            // a(u) = v C (L(u) - tau v C) on (u_c, u_max]; the anticipation
            // distance L switches to l_min at u_kink.
            const double vc = m_p.v_max_normal * m_p.c_log;
            m_u_kink = m_p.u_max * std::exp(-std::sqrt(2.0 * m_p.a_decel * m_p.l_min) / vc);
            for (int k = 1; k < 10000; ++k)
            {
                const double u = m_uc + (m_p.u_max - m_uc) * k / 10000.0;
                if (!(diffusion_a(u) > 0.0))
                {
                    throw ConfigError("traffic: parameters give a(u) <= 0 above the critical density (need l_min > tau v_max C)");
                }
            }
            m_A = TabulatedIntegral([this](double u) { return diffusion_a(u); }, m_p.u_max, table_intervals, {m_uc, m_u_kink});
        }

        [[nodiscard]] const TrafficParams& params() const
        {
            return m_p;
        }

        [[nodiscard]] std::string name() const
        {
            return m_name;
        }

        /// Dick-Greenberg hindrance V(u) = min(1, C ln(u_max/u)).
        [[nodiscard]] double hindrance(double u) const
        {
            return u <= m_uc ? 1.0 : m_p.c_log * std::log(m_p.u_max / u);
        }

        [[nodiscard]] double flux(const GammaVector& g, double u) const
        {
            if (u <= 0.0 || u >= m_p.u_max)
            {
                return 0.0;
            }
            return u <= m_uc ? g[1] * u : g[1] * m_p.c_log * u * std::log(m_p.u_max / u);
        }

        [[nodiscard]] double flux_du(const GammaVector& g, double u) const
        {
            if (u < 0.0 || u > m_p.u_max)
            {
                return 0.0;
            }
            return u <= m_uc ? g[1] : g[1] * m_p.c_log * (std::log(m_p.u_max / u) - 1.0);
        }

        /// The kink u_c and the flux maximum u_max / e.
        [[nodiscard]] std::vector<double> flux_critical_points(const GammaVector&) const
        {
            std::vector<double> pts{m_uc};
            const double top = m_p.u_max / std::numbers::e;
            if (top > m_uc && top < m_p.u_max)
            {
                pts.push_back(top);
            }
            return pts;
        }

        [[nodiscard]] bool has_diffusion() const
        {
            return true;
        }

        [[nodiscard]] double diffusion_a(double u) const
        {
            if (u <= m_uc || u > m_p.u_max)
            {
                return 0.0;
            }
            const double vc    = m_p.v_max_normal * m_p.c_log;
            const double speed = m_p.v_max_normal * hindrance(u);
            const double reach = std::max(speed * speed / (2.0 * m_p.a_decel), m_p.l_min);
            return vc * (reach - m_p.tau * vc);
        }

        [[nodiscard]] double diffusion_A(double u) const
        {
            if (u < 0.0 || u > m_p.u_max)
            {
                throw std::out_of_range("traffic diffusion_A: u outside [0, u_max]");
            }
            return m_A(u);
        }

        [[nodiscard]] double diffusion_coefficient(const GammaVector& g) const
        {
            return g[0];
        }

        [[nodiscard]] std::vector<double> diffusion_kinks() const
        {
            return {m_uc, m_u_kink};
        }

        [[nodiscard]] const GammaField& gamma_field() const
        {
            return m_gamma;
        }

        [[nodiscard]] double u_max() const
        {
            return m_p.u_max;
        }

        [[nodiscard]] double u_c() const
        {
            return m_uc;
        }

        [[nodiscard]] Interval domain() const
        {
            return {m_p.road_lo, m_p.road_hi};
        }

        [[nodiscard]] Boundary boundary() const
        {
            return Boundary::periodic;
        }

        [[nodiscard]] const PiecewiseProfile& initial() const
        {
            return m_initial;
        }

      private:
        TrafficParams m_p;
        std::string m_name;
        double m_uc     = 0.0;
        double m_u_kink = 0.0;
        GammaField m_gamma;
        PiecewiseProfile m_initial;
        TabulatedIntegral m_A;
    };

    // ------------------------------------------------------------------
    // Clarifier-thickener.
    // ------------------------------------------------------------------

    struct ClarifierParams
    {
        double v_inf      = 27.0 / 4.0;
        double c_exp      = 2.0;
        double u_max      = 1.0;
        double sigma_0    = 0.0;   // Pa; 0 means an ideal suspension (A = 0)
        double u_c        = 0.1;
        double beta       = 6.0;
        double delta_rho  = 1660.0; // kg/m^3
        double g          = 9.81;   // m/s^2
        double x_l        = -1.0;
        double x_r        = 1.0;
        double q_l        = -1.0;
        double q_r        = 0.6;
        double u_f        = 0.8;
        double domain_lo  = -2.0;
        double domain_hi  = 2.0;
        double u0_vessel  = 0.0;
        double u0_outside = 0.0;

        void validate() const
        {
            if (!(v_inf > 0.0 && c_exp > 0.0 && u_max > 0.0 && u_max <= 1.0))
            {
                throw ConfigError("clarifier: v_inf, c_exp must be positive and u_max in (0, 1]");
            }
            if (!(q_l <= 0.0 && q_r >= 0.0))
            {
                throw ConfigError("clarifier: need q_l <= 0 <= q_r");
            }
            if (!(x_l < 0.0 && 0.0 < x_r && domain_lo <= x_l && x_r <= domain_hi))
            {
                throw ConfigError("clarifier: need domain_lo <= x_l < 0 < x_r <= domain_hi");
            }
            if (!(u_f >= 0.0 && u_f <= u_max && u0_vessel >= 0.0 && u0_vessel <= u_max && u0_outside >= 0.0 && u0_outside <= u_max))
            {
                throw ConfigError("clarifier: feed and initial concentrations must lie in [0, u_max]");
            }
            if (sigma_0 < 0.0)
            {
                throw ConfigError("clarifier: sigma_0 must be nonnegative");
            }
            if (sigma_0 > 0.0 && !(beta > 1.0 && u_c > 0.0 && u_c < u_max && delta_rho > 0.0 && g > 0.0))
            {
                throw ConfigError("clarifier: compressible sediment needs beta > 1, 0 < u_c < u_max, delta_rho, g > 0");
            }
        }

        template <class Visitor>
        static void for_each_field(Visitor&& visit)
        {
            visit("v_inf", &ClarifierParams::v_inf);
            visit("c_exp", &ClarifierParams::c_exp);
            visit("u_max", &ClarifierParams::u_max);
            visit("sigma_0", &ClarifierParams::sigma_0);
            visit("u_c", &ClarifierParams::u_c);
            visit("beta", &ClarifierParams::beta);
            visit("delta_rho", &ClarifierParams::delta_rho);
            visit("g", &ClarifierParams::g);
            visit("x_l", &ClarifierParams::x_l);
            visit("x_r", &ClarifierParams::x_r);
            visit("q_l", &ClarifierParams::q_l);
            visit("q_r", &ClarifierParams::q_r);
            visit("u_f", &ClarifierParams::u_f);
            visit("domain_lo", &ClarifierParams::domain_lo);
            visit("domain_hi", &ClarifierParams::domain_hi);
            visit("u0_vessel", &ClarifierParams::u0_vessel);
            visit("u0_outside", &ClarifierParams::u0_outside);
        }
    };

    /// f(gamma, u) = gamma_2 (u - u_F) + gamma_1 f_b(u) with gamma_1 the
    /// vessel indicator and gamma_2 the bulk velocity (q_L above the feed
    /// level, q_R below). Transparent ends outside the vessel.
    class ClarifierModel
    {
      public:
        explicit ClarifierModel(ClarifierParams p = {}, std::string name = "clarifier-ex2")
            : m_p(p)
            , m_name(std::move(name))
        {
            m_p.validate();
            m_int_exp = detail::is_integral(m_p.c_exp);
            m_gamma   = GammaField({m_p.x_l, 0.0, m_p.x_r},
                                   {GammaVector{0.0, m_p.q_l}, GammaVector{1.0, m_p.q_l}, GammaVector{1.0, m_p.q_r}, GammaVector{0.0, m_p.q_r}});
            std::vector<double> breaks;
            std::vector<double> values;
            if (m_p.domain_lo < m_p.x_l)
            {
                breaks.push_back(m_p.x_l);
                values.push_back(m_p.u0_outside);
            }
            values.push_back(m_p.u0_vessel);
            if (m_p.x_r < m_p.domain_hi)
            {
                breaks.push_back(m_p.x_r);
                values.push_back(m_p.u0_outside);
            }
            m_initial = PiecewiseProfile::steps(breaks, values);

            if (m_p.sigma_0 > 0.0)
            {
                m_K = m_p.v_inf * m_p.sigma_0 * m_p.beta / (m_p.delta_rho * m_p.g * std::pow(m_p.u_c, m_p.beta));
                if (detail::is_integral(m_p.beta) && m_int_exp)
                {
                    // s^(beta-1) (1-s)^C = sum_k binom(C,k) (-1)^k s^(beta-1+k)
                    const int c  = static_cast<int>(std::round(m_p.c_exp));
                    m_int_beta   = static_cast<int>(std::round(m_p.beta));
                    double binom = 1.0;
                    for (int k = 0; k <= c; ++k)
                    {
                        m_poly.push_back((k % 2 == 0 ? binom : -binom) / (m_int_beta + k));
                        binom = binom * (c - k) / (k + 1);
                    }
                    // complementary form in t = 1 - s for u near 1, where the
                    // expansion above loses digits to cancellation
                    binom = 1.0;
                    for (int k = 0; k <= m_int_beta - 1; ++k)
                    {
                        m_tail.push_back((k % 2 == 0 ? binom : -binom) / (c + 1 + k));
                        binom = binom * (m_int_beta - 1 - k) / (k + 1);
                    }
                    m_int_exp_c   = c;
                    m_closed_form = true;
                    m_P_uc        = antiderivative_poly(m_p.u_c);
                    m_T_uc        = antiderivative_poly(1.0) - m_P_uc;
                }
                else
                {
                    m_A = TabulatedIntegral([this](double u) { return diffusion_a(u); }, m_p.u_max, 4096, {m_p.u_c});
                }
            }
        }

        [[nodiscard]] const ClarifierParams& params() const
        {
            return m_p;
        }

        [[nodiscard]] std::string name() const
        {
            return m_name;
        }

        /// Hindered settling flux f_b(u) = v_inf u (1-u)^C on (0, u_max).
        [[nodiscard]] double batch_flux(double u) const
        {
            if (u <= 0.0 || u >= m_p.u_max)
            {
                return 0.0;
            }
            return m_p.v_inf * u * power(1.0 - u, m_p.c_exp);
        }

        [[nodiscard]] double batch_flux_du(double u) const
        {
            if (u < 0.0 || u > m_p.u_max)
            {
                return 0.0;
            }
            return m_p.v_inf * power(1.0 - u, m_p.c_exp - 1.0) * (1.0 - (m_p.c_exp + 1.0) * u);
        }

        [[nodiscard]] double flux(const GammaVector& g, double u) const
        {
            return g[1] * (u - m_p.u_f) + g[0] * batch_flux(u);
        }

        [[nodiscard]] double flux_du(const GammaVector& g, double u) const
        {
            return g[1] + g[0] * batch_flux_du(u);
        }

        /// Zeros of f_u on (0, u_max). f_b' decreases up to 2/(C+1) and
        /// increases afterwards, so each monotone piece holds at most one root.
        [[nodiscard]] std::vector<double> flux_critical_points(const GammaVector& g) const
        {
            std::vector<double> pts;
            if (g[0] == 0.0)
            {
                return pts;
            }
            const auto du = [&](double u) { return flux_du(g, u); };
            const double turn = m_p.c_exp > 1.0 ? std::min(2.0 / (m_p.c_exp + 1.0), m_p.u_max) : m_p.u_max;
            const double lo_end = std::nextafter(0.0, 1.0);
            const double hi_end = std::nextafter(m_p.u_max, 0.0);
            for (auto [a, b] : {std::pair{lo_end, turn}, std::pair{turn, hi_end}})
            {
                if (b <= a)
                {
                    continue;
                }
                const double ga = du(a);
                const double gb = du(b);
                if (ga != 0.0 && gb != 0.0 && (ga > 0.0) != (gb > 0.0))
                {
                    pts.push_back(detail::bisect_root(du, a, b));
                }
            }
            return pts;
        }

        [[nodiscard]] bool has_diffusion() const
        {
            return m_p.sigma_0 > 0.0;
        }

        /// a(u) = f_b(u) sigma_e'(u) / (delta_rho g u), zero up to the gel point.
        [[nodiscard]] double diffusion_a(double u) const
        {
            if (!has_diffusion() || u <= m_p.u_c || u >= m_p.u_max)
            {
                return 0.0;
            }
            return m_K * std::pow(u, m_p.beta - 1.0) * power(1.0 - u, m_p.c_exp);
        }

        [[nodiscard]] double diffusion_A(double u) const
        {
            if (u < 0.0 || u > m_p.u_max)
            {
                throw std::out_of_range("clarifier diffusion_A: u outside [0, u_max]");
            }
            if (!has_diffusion() || u <= m_p.u_c)
            {
                return 0.0;
            }
            if (m_closed_form)
            {
                return u <= 0.5 ? m_K * (antiderivative_poly(u) - m_P_uc) : m_K * (m_T_uc - tail_integral(u));
            }
            return m_A(u);
        }

        [[nodiscard]] double diffusion_coefficient(const GammaVector& g) const
        {
            return g[0];
        }

        [[nodiscard]] std::vector<double> diffusion_kinks() const
        {
            return has_diffusion() ? std::vector<double>{m_p.u_c} : std::vector<double>{};
        }

        [[nodiscard]] const GammaField& gamma_field() const
        {
            return m_gamma;
        }

        [[nodiscard]] double u_max() const
        {
            return m_p.u_max;
        }

        [[nodiscard]] Interval domain() const
        {
            return {m_p.domain_lo, m_p.domain_hi};
        }

        [[nodiscard]] Boundary boundary() const
        {
            return Boundary::transparent;
        }

        [[nodiscard]] const PiecewiseProfile& initial() const
        {
            return m_initial;
        }

      private:
        [[nodiscard]] double power(double x, double e) const
        {
            if (m_int_exp && e >= 0.0)
            {
                return detail::ipow(x, static_cast<int>(e + 0.5));
            }
            return std::pow(x, e);
        }

        [[nodiscard]] double antiderivative_poly(double u) const
        {
            double acc = 0.0;
            for (auto it = m_poly.rbegin(); it != m_poly.rend(); ++it)
            {
                acc = acc * u + *it;
            }
            return acc * detail::ipow(u, m_int_beta);
        }

        /// Integral of s^(beta-1) (1-s)^C over [u, 1].
        [[nodiscard]] double tail_integral(double u) const
        {
            const double t = 1.0 - u;
            double acc     = 0.0;
            for (auto it = m_tail.rbegin(); it != m_tail.rend(); ++it)
            {
                acc = acc * t + *it;
            }
            return acc * detail::ipow(t, m_int_exp_c + 1);
        }

        ClarifierParams m_p;
        std::string m_name;
        bool m_int_exp = false;
        GammaField m_gamma;
        PiecewiseProfile m_initial;
        double m_K          = 0.0;
        bool m_closed_form  = false;
        int m_int_beta      = 0;
        std::vector<double> m_poly;
        std::vector<double> m_tail;
        int m_int_exp_c = 0;
        double m_P_uc = 0.0;
        double m_T_uc = 0.0;
        TabulatedIntegral m_A;
    };

    // ------------------------------------------------------------------
    // Programmatic extension point.
    // ------------------------------------------------------------------

    /// Problem definition assembled from callables. Missing critical points
    /// are located numerically from flux_du.
    struct ModelSpec
    {
        std::string label = "custom";
        std::function<double(const GammaVector&, double)> flux_fn;
        std::function<double(const GammaVector&, double)> flux_du_fn;
        std::function<std::vector<double>(const GammaVector&)> critical_points_fn;
        std::function<double(double)> diffusion_A_fn;
        std::function<double(double)> diffusion_a_fn;
        GammaField gammas;
        double umax = 1.0;
        Interval interval{0.0, 1.0};
        Boundary bc = Boundary::periodic;
        PiecewiseProfile u0;

        [[nodiscard]] std::string name() const
        {
            return label;
        }

        [[nodiscard]] double flux(const GammaVector& g, double u) const
        {
            return flux_fn(g, u);
        }

        [[nodiscard]] double flux_du(const GammaVector& g, double u) const
        {
            return flux_du_fn(g, u);
        }

        [[nodiscard]] std::vector<double> flux_critical_points(const GammaVector& g) const
        {
            if (critical_points_fn)
            {
                return critical_points_fn(g);
            }
            return scan_sign_changes([&](double u) { return flux_du_fn(g, u); }, umax);
        }

        [[nodiscard]] bool has_diffusion() const
        {
            return static_cast<bool>(diffusion_A_fn);
        }

        [[nodiscard]] double diffusion_A(double u) const
        {
            return diffusion_A_fn ? diffusion_A_fn(u) : 0.0;
        }

        [[nodiscard]] double diffusion_a(double u) const
        {
            return diffusion_a_fn ? diffusion_a_fn(u) : 0.0;
        }

        [[nodiscard]] double diffusion_coefficient(const GammaVector& g) const
        {
            return g[0];
        }

        [[nodiscard]] std::vector<double> diffusion_kinks() const
        {
            return {};
        }

        [[nodiscard]] const GammaField& gamma_field() const
        {
            return gammas;
        }

        [[nodiscard]] double u_max() const
        {
            return umax;
        }

        [[nodiscard]] Interval domain() const
        {
            return interval;
        }

        [[nodiscard]] Boundary boundary() const
        {
            return bc;
        }

        [[nodiscard]] const PiecewiseProfile& initial() const
        {
            return u0;
        }
    };

    // ------------------------------------------------------------------
    // Bounds used by the CFL condition and the reference tolerance.
    // ------------------------------------------------------------------

    namespace detail
    {
        template <FluxModel M>
        std::vector<double> dense_samples(const M& m, const std::vector<double>& special, int samples)
        {
            const double umax = m.u_max();
            std::vector<double> us;
            us.reserve(static_cast<std::size_t>(samples) + 5 * special.size() + 2);
            for (int k = 0; k <= samples; ++k)
            {
                us.push_back(umax * static_cast<double>(k) / samples);
            }
            for (double c : special)
            {
                for (double d : {-1e-9, 0.0, 1e-9})
                {
                    const double u = c + d * umax;
                    if (u >= 0.0 && u <= umax)
                    {
                        us.push_back(u);
                    }
                }
            }
            return us;
        }
    }

    /// sup over x and u in [0, u_max] of |f_u(gamma(x), u)|, inflated by 1%.
    template <FluxModel M>
    double max_flux_derivative(const M& m, int samples = 10000)
    {
        double best = 0.0;
        const GammaField& field = m.gamma_field();
        for (std::size_t b = 0; b < field.branch_count(); ++b)
        {
            const GammaVector& g = field.branch(b);
            for (double u : detail::dense_samples(m, m.flux_critical_points(g), samples))
            {
                best = std::max(best, std::abs(m.flux_du(g, u)));
            }
        }
        return 1.01 * best;
    }

    /// sup over u in [0, u_max] of A'(u) = a(u) times the largest diffusion
    /// coefficient, inflated by 1%.
    template <FluxModel M>
    double max_diffusion_derivative(const M& m, int samples = 10000)
    {
        if (!m.has_diffusion())
        {
            return 0.0;
        }
        double coeff = 0.0;
        const GammaField& field = m.gamma_field();
        for (std::size_t b = 0; b < field.branch_count(); ++b)
        {
            coeff = std::max(coeff, std::abs(m.diffusion_coefficient(field.branch(b))));
        }
        std::vector<double> kinks = m.diffusion_kinks();
        double best = 0.0;
        for (double u : detail::dense_samples(m, kinks, samples))
        {
            best = std::max(best, std::abs(m.diffusion_a(u)));
        }
        return 1.01 * coeff * best;
    }

    // ------------------------------------------------------------------
    // Presets.
    // ------------------------------------------------------------------

    inline TrafficParams traffic_ex1_params()
    {
        return TrafficParams{};
    }

    /// Ideal suspension in a clarifier-thickener, empty at t = 0.
    inline ClarifierParams clarifier_ex2_params()
    {
        return ClarifierParams{};
    }

    /// Flocculated suspension with compression; vessel initially filled at the gel point.
    inline ClarifierParams clarifier_ex3_params()
    {
        ClarifierParams p;
        p.v_inf      = 1e-4;
        p.c_exp      = 5.0;
        p.sigma_0    = 1.0;
        p.u_c        = 0.1;
        p.beta       = 6.0;
        p.delta_rho  = 1660.0;
        p.g          = 9.81;
        p.q_l        = -1e-5;
        p.q_r        = 2.5e-6;
        p.u_f        = 0.086;
        p.u0_vessel  = 0.1;
        p.u0_outside = 0.0;
        return p;
    }
}
