#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flux.hpp"

namespace mrfv
{
    /// How the fixed time step is derived from the finest grid width.
    struct StepRule
    {
        enum class Kind
        {
            lambda,        // dt = value * dx
            mu,            // dt = value * dx^2
            capped_lambda  // dt = min(value * dx, CFL limit)
        };

        Kind kind    = Kind::lambda;
        double value = 0.0;

        friend bool operator==(const StepRule&, const StepRule&) = default;

        [[nodiscard]] double dt(double dx, double cfl_limit) const
        {
            switch (kind)
            {
            case Kind::lambda:
                return value * dx;
            case Kind::mu:
                return value * dx * dx;
            case Kind::capped_lambda:
                break;
            }
            return std::min(value * dx, cfl_limit);
        }
    };

    inline std::string to_string(StepRule::Kind k)
    {
        switch (k)
        {
        case StepRule::Kind::lambda:
            return "lambda";
        case StepRule::Kind::mu:
            return "mu";
        case StepRule::Kind::capped_lambda:
            break;
        }
        return "capped_lambda";
    }

    inline StepRule::Kind parse_step_kind(const std::string& s)
    {
        if (s == "lambda")
        {
            return StepRule::Kind::lambda;
        }
        if (s == "mu")
        {
            return StepRule::Kind::mu;
        }
        if (s == "capped_lambda")
        {
            return StepRule::Kind::capped_lambda;
        }
        throw ConfigError("unknown step rule '" + s + "'");
    }

    /// Cell averages on the uniform grid with n0 * 2^level cells.
    struct UniformState
    {
        int level  = 0;
        long n0    = 1;
        Interval domain;
        double dx  = 1.0;
        double time = 0.0;
        double lambda = 0.0;
        double mu     = 0.0;
        std::vector<double> averages;

        [[nodiscard]] long cells() const
        {
            return n0 << level;
        }

        [[nodiscard]] double center(long j) const
        {
            return domain.lo + (static_cast<double>(j) + 0.5) * dx;
        }
    };

    /// Time levels visited by a fixed-step march. Steps are of size dt except
    /// the one landing on a requested output time, which is shortened.
    class TimeGrid
    {
      public:
        TimeGrid(double dt, double t_final, std::vector<double> outputs)
            : m_dt(dt)
            , m_t_final(t_final)
            , m_outputs(std::move(outputs))
        {
            if (!(dt > 0.0) || !std::isfinite(dt))
            {
                throw ConfigError("time step must be positive and finite");
            }
            if (t_final < 0.0)
            {
                throw ConfigError("t_final must be nonnegative");
            }
            for (std::size_t k = 0; k < m_outputs.size(); ++k)
            {
                if (m_outputs[k] < 0.0 || m_outputs[k] > t_final || (k > 0 && m_outputs[k] < m_outputs[k - 1]))
                {
                    throw ConfigError("snapshot times must be sorted and within [0, t_final]");
                }
            }
        }

        [[nodiscard]] bool done() const
        {
            return m_t >= m_t_final;
        }

        [[nodiscard]] double time() const
        {
            return m_t;
        }

        /// Size of the next step; call advance() after taking it.
        [[nodiscard]] double next_dt() const
        {
            const double target = next_target();
            return target - m_t <= m_dt * (1.0 + 1e-9) ? target - m_t : m_dt;
        }

        void advance()
        {
            const double target = next_target();
            const double step   = next_dt();
            m_t = step == target - m_t ? target : m_t + step;
        }

        /// Outputs due at the current time; each output is reported once.
        [[nodiscard]] std::vector<double> due()
        {
            std::vector<double> out;
            while (m_next < m_outputs.size() && m_outputs[m_next] <= m_t)
            {
                out.push_back(m_outputs[m_next++]);
            }
            return out;
        }

      private:
        [[nodiscard]] double next_target() const
        {
            return m_next < m_outputs.size() ? std::min(m_outputs[m_next], m_t_final) : m_t_final;
        }

        double m_dt;
        double m_t_final;
        std::vector<double> m_outputs;
        std::size_t m_next = 0;
        double m_t         = 0.0;
    };

    /// Reference first order scheme on a uniform grid.
    template <FluxModel M>
    class UniformSolver
    {
      public:
        UniformSolver(const M& m, long n0, int level)
            : m_kernel(m)
            , m_n0(n0)
            , m_level(level)
            , m_cells(n0 << level)
            , m_domain(m.domain())
            , m_dx(m.domain().length() / static_cast<double>(n0 << level))
            , m_periodic(m.boundary() == Boundary::periodic)
            , m_flux(static_cast<std::size_t>(m_cells + 1))
            , m_c(static_cast<std::size_t>(m_cells))
            , m_a(static_cast<std::size_t>(m_cells))
        {
            if (n0 < 1 || level < 0 || level > 30)
            {
                throw ConfigError("uniform grid needs n0 >= 1 and 0 <= level <= 30");
            }
            const GridJumps jumps(m.gamma_field(), m_domain, m_cells);
            m_branch.resize(static_cast<std::size_t>(m_cells + 1));
            for (long e = 0; e <= m_cells; ++e)
            {
                m_branch[static_cast<std::size_t>(e)] = jumps.branch_at_interface(e);
            }
            if (m_periodic)
            {
                m_branch[0] = m_branch[static_cast<std::size_t>(m_cells)];
            }
            m_mf = max_flux_derivative(m);
            m_ma = max_diffusion_derivative(m);
        }

        [[nodiscard]] double dx() const
        {
            return m_dx;
        }

        [[nodiscard]] double cfl_limit() const
        {
            return cfl_max_dt(m_mf, m_ma, m_dx);
        }

        [[nodiscard]] long clamp_count() const
        {
            return m_clamps;
        }

        [[nodiscard]] const FluxKernel<M>& kernel() const
        {
            return m_kernel;
        }

        [[nodiscard]] UniformState initial_state() const
        {
            UniformState s;
            s.level    = m_level;
            s.n0       = m_n0;
            s.domain   = m_domain;
            s.dx       = m_dx;
            s.averages = m_kernel.model().initial().cell_averages(m_domain, m_cells);
            return s;
        }

        /// One explicit Euler step in place.
        void step(UniformState& s, double dt)
        {
            if (dt > cfl_limit() * (1.0 + 1e-12))
            {
                throw NumericalError("CFL violation: dt=" + std::to_string(dt) + " exceeds " + std::to_string(cfl_limit()));
            }
            const auto n = static_cast<std::size_t>(m_cells);
            std::vector<double>& u = s.averages;
            for (std::size_t j = 0; j < n; ++j)
            {
                m_c[j] = m_kernel.clamp(u[j], m_clamps);
                m_a[j] = m_kernel.A(m_c[j]);
            }

            // interior interfaces e = 1..n-1 between cells e-1 and e
            std::size_t fb = static_cast<std::size_t>(-1);
            double fu      = 0.0;
            for (std::size_t e = 1; e < n; ++e)
            {
                const std::size_t b = m_branch[e];
                const double fl     = b == fb ? fu : m_kernel.flux(b, m_c[e - 1]);
                const double fr     = m_kernel.flux(b, m_c[e]);
                m_flux[e] = m_kernel.edge(b, m_c[e - 1], m_c[e], fl, fr, m_a[e - 1], m_a[e], m_dx);
                fb = b;
                fu = fr;
            }
            if (m_periodic)
            {
                const std::size_t b = m_branch[n];
                m_flux[n] = m_kernel.edge(b, m_c[n - 1], m_c[0], m_kernel.flux(b, m_c[n - 1]), m_kernel.flux(b, m_c[0]),
                                          m_a[n - 1], m_a[0], m_dx);
                m_flux[0] = m_flux[n];
            }
            else
            {
                const double f0 = m_kernel.flux(m_branch[0], m_c[0]);
                const double fn = m_kernel.flux(m_branch[n], m_c[n - 1]);
                m_flux[0] = m_kernel.edge(m_branch[0], m_c[0], m_c[0], f0, f0, m_a[0], m_a[0], m_dx);
                m_flux[n] = m_kernel.edge(m_branch[n], m_c[n - 1], m_c[n - 1], fn, fn, m_a[n - 1], m_a[n - 1], m_dx);
            }

            const double lam = dt / m_dx;
            bool finite      = true;
            for (std::size_t j = 0; j < n; ++j)
            {
                u[j] -= lam * (m_flux[j + 1] - m_flux[j]);
                finite = finite && std::isfinite(u[j]);
            }
            if (!finite)
            {
                throw NumericalError("nonfinite cell average in uniform step");
            }
            s.time += dt;
            s.lambda = lam;
            s.mu     = dt / (m_dx * m_dx);
        }

      private:
        FluxKernel<M> m_kernel;
        long m_n0;
        int m_level;
        long m_cells;
        Interval m_domain;
        double m_dx;
        bool m_periodic;
        double m_mf = 0.0;
        double m_ma = 0.0;
        long m_clamps = 0;
        std::vector<std::size_t> m_branch;
        std::vector<double> m_flux;
        std::vector<double> m_c;
        std::vector<double> m_a;
    };

    struct UniformRun
    {
        std::vector<UniformState> snapshots;
        double dt           = 0.0;
        long steps          = 0;
        long clamps         = 0;
        double wall_loop    = 0.0; // seconds
        double wall_total   = 0.0;
        std::vector<double> snapshot_wall_loop;  // elapsed loop time at each snapshot
        std::vector<double> snapshot_wall_total;
    };

    /// Marches the uniform scheme to t_final, recording the state at each
    /// requested snapshot time (t = 0 included if requested).
    template <FluxModel M>
    UniformRun run_uniform(const M& m, long n0, int level, StepRule rule, double t_final, const std::vector<double>& snapshot_times)
    {
        using clock       = std::chrono::steady_clock;
        const auto start  = clock::now();
        UniformSolver<M> solver(m, n0, level);
        UniformRun run;
        run.dt = rule.dt(solver.dx(), solver.cfl_limit());
        if (run.dt > solver.cfl_limit() * (1.0 + 1e-12))
        {
            throw NumericalError("configured time step " + std::to_string(run.dt) + " violates the CFL limit "
                                 + std::to_string(solver.cfl_limit()));
        }
        UniformState state = solver.initial_state();
        TimeGrid grid(run.dt, t_final, snapshot_times);
        const auto loop_start = clock::now();
        const auto record = [&] {
            for (double t : grid.due())
            {
                (void)t;
                const auto now = clock::now();
                run.snapshots.push_back(state);
                run.snapshot_wall_loop.push_back(std::chrono::duration<double>(now - loop_start).count());
                run.snapshot_wall_total.push_back(std::chrono::duration<double>(now - start).count());
            }
        };
        record();
        while (!grid.done())
        {
            const double dt = grid.next_dt();
            solver.step(state, dt);
            grid.advance();
            state.time = grid.time();
            ++run.steps;
            record();
        }
        const auto end = clock::now();
        run.clamps     = solver.clamp_count();
        run.wall_loop  = std::chrono::duration<double>(end - loop_start).count();
        run.wall_total = std::chrono::duration<double>(end - start).count();
        return run;
    }
}
