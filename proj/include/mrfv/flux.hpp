#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "models.hpp"

namespace mrfv
{
    /// Engquist-Osher flux on one gamma branch, with the monotonicity
    /// intervals of f(gamma, .) precomputed.
    template <FluxModel M>
    class FluxBranch
    {
      public:
        FluxBranch(const M& m, GammaVector g)
            : m_model(&m)
            , m_gamma(g)
            , m_crit(m.flux_critical_points(g))
        {
            std::sort(m_crit.begin(), m_crit.end());
            for (double c : m_crit)
            {
                m_fcrit.push_back(m.flux(g, c));
            }
        }

        [[nodiscard]] const GammaVector& gamma() const
        {
            return m_gamma;
        }

        [[nodiscard]] double flux(double u) const
        {
            return m_model->flux(m_gamma, u);
        }

        /// Total variation of f(gamma, .) over [lo, hi].
        [[nodiscard]] double variation(double lo, double hi, double flo, double fhi) const
        {
            double q    = 0.0;
            double prev = flo;
            for (std::size_t k = 0; k < m_crit.size(); ++k)
            {
                const double c = m_crit[k];
                if (c <= lo)
                {
                    continue;
                }
                if (c >= hi)
                {
                    break;
                }
                q += std::abs(m_fcrit[k] - prev);
                prev = m_fcrit[k];
            }
            return q + std::abs(fhi - prev);
        }

        /// h(gamma, v = ur, u = ul) with f(ul), f(ur) supplied by the caller.
        [[nodiscard]] double eo(double ul, double ur, double fl, double fr) const
        {
            if (ul == ur)
            {
                return fl;
            }
            if (ul < ur)
            {
                return 0.5 * (fl + fr - variation(ul, ur, fl, fr));
            }
            return 0.5 * (fl + fr + variation(ur, ul, fr, fl));
        }

        [[nodiscard]] double eo(double ul, double ur) const
        {
            return eo(ul, ur, flux(ul), flux(ur));
        }

      private:
        const M* m_model;
        GammaVector m_gamma;
        std::vector<double> m_crit;
        std::vector<double> m_fcrit;
    };

    /// Single-interface EO flux for arbitrary states; inputs outside
    /// [0, u_max] are clamped.
    template <FluxModel M>
    double eo_flux(const M& m, const GammaVector& g, double ul, double ur)
    {
        const double top = m.u_max();
        return FluxBranch<M>(m, g).eo(std::clamp(ul, 0.0, top), std::clamp(ur, 0.0, top));
    }

    /// Interface flux used by both the uniform and the adaptive solver:
    /// convective EO part minus the diffusive difference quotient.
    template <FluxModel M>
    class FluxKernel
    {
      public:
        explicit FluxKernel(const M& m)
            : m_model(&m)
            , m_u_max(m.u_max())
            , m_diffusive(m.has_diffusion())
        {
            const GammaField& field = m.gamma_field();
            for (std::size_t b = 0; b < field.branch_count(); ++b)
            {
                m_branches.emplace_back(m, field.branch(b));
                m_coeff.push_back(m.diffusion_coefficient(field.branch(b)));
            }
        }

        [[nodiscard]] const M& model() const
        {
            return *m_model;
        }

        [[nodiscard]] bool diffusive() const
        {
            return m_diffusive;
        }

        [[nodiscard]] const FluxBranch<M>& branch(std::size_t b) const
        {
            return m_branches[b];
        }

        /// Clamp to [0, u_max]; `clamps` counts the values that moved.
        [[nodiscard]] double clamp(double u, long& clamps) const
        {
            if (u < 0.0)
            {
                ++clamps;
                return 0.0;
            }
            if (u > m_u_max)
            {
                ++clamps;
                return m_u_max;
            }
            return u;
        }

        [[nodiscard]] double flux(std::size_t b, double u) const
        {
            return m_branches[b].flux(u);
        }

        [[nodiscard]] double A(double u) const
        {
            return m_diffusive ? m_model->diffusion_A(u) : 0.0;
        }

        /// F = h(gamma_b, ur, ul) - gamma_1,b (A(ur) - A(ul)) / dx, all inputs clamped.
        [[nodiscard]] double edge(std::size_t b, double ul, double ur, double fl, double fr, double al, double ar, double dx) const
        {
            double h = m_branches[b].eo(ul, ur, fl, fr);
            if (m_diffusive)
            {
                h -= m_coeff[b] * (ar - al) / dx;
            }
            return h;
        }

      private:
        const M* m_model;
        double m_u_max;
        bool m_diffusive;
        std::vector<FluxBranch<M>> m_branches;
        std::vector<double> m_coeff;
    };

    /// Largest dt with (dt/dx) mf + (dt/dx^2) ma <= 1/2.
    inline double cfl_max_dt(double mf, double ma, double dx)
    {
        const double rate = mf / dx + ma / (dx * dx);
        return rate > 0.0 ? 0.5 / rate : std::numeric_limits<double>::infinity();
    }

    template <FluxModel M>
    double cfl_max_dt(const M& m, double dx)
    {
        return cfl_max_dt(max_flux_derivative(m), max_diffusion_derivative(m), dx);
    }
}
