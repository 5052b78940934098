#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fv.hpp"
#include "graded_tree.hpp"

namespace mrfv
{
    /// Leaf data of one adaptive snapshot.
    struct MRSnapshot
    {
        double time = 0.0;
        std::vector<NodeKey> leaves;
        std::vector<double> leaf_averages;
        std::vector<double> fine; // zero-detail reconstruction on level L
        std::size_t leaf_count = 0;
        std::size_t virtual_count = 0;
        std::shared_ptr<const GradedTree> tree; // set when run_mr keeps trees
    };

    /// Adaptive multiresolution solver: leaves of a graded tree evolve with
    /// the reference scheme, one flux per interface. Between leaves of
    /// different levels the flux takes the two leaf values.
    template <FluxModel M>
    class MRSolver
    {
      public:
        MRSolver(const M& m, MRConfig cfg)
            : m_kernel(m)
            , m_cfg(cfg)
            , m_tol((cfg.validate(), level_tolerances(cfg)))
            , m_tree(cfg.n0, cfg.max_level, m.boundary(), m.u_max(), cfg.grading)
            , m_domain(m.domain())
            , m_periodic(m.boundary() == Boundary::periodic)
        {
            const long nl = cfg.finest_cells();
            const GridJumps jumps(m.gamma_field(), m_domain, nl);
            m_jump_positions.assign(jumps.positions().begin(), jumps.positions().end());
            m_branch.resize(static_cast<std::size_t>(nl + 1));
            for (long e = 0; e <= nl; ++e)
            {
                m_branch[static_cast<std::size_t>(e)] = jumps.branch_at_interface(e);
            }
            if (m_periodic)
            {
                m_branch[0] = m_branch[static_cast<std::size_t>(nl)];
            }
            for (int l = 0; l <= cfg.max_level; ++l)
            {
                m_dx.push_back(m_domain.length() / static_cast<double>(cfg.n0 << l));
            }
            m_mf = max_flux_derivative(m);
            m_ma = max_diffusion_derivative(m);
        }

        [[nodiscard]] const MRConfig& config() const
        {
            return m_cfg;
        }

        [[nodiscard]] const GradedTree& tree() const
        {
            return m_tree;
        }

        [[nodiscard]] GradedTree& tree()
        {
            return m_tree;
        }

        [[nodiscard]] const std::vector<double>& tolerances() const
        {
            return m_tol;
        }

        /// Changes the threshold without touching the tree (fuzzing hook).
        void set_epsilon(double eps)
        {
            m_cfg.epsilon = eps;
            m_tol         = level_tolerances(m_cfg);
        }

        [[nodiscard]] double dx_finest() const
        {
            return m_dx.back();
        }

        [[nodiscard]] double cfl_limit() const
        {
            return cfl_max_dt(m_mf, m_ma, dx_finest());
        }

        [[nodiscard]] long clamp_count() const
        {
            return m_clamps;
        }

        [[nodiscard]] double time() const
        {
            return m_time;
        }

        [[nodiscard]] long steps() const
        {
            return m_steps;
        }

        /// Cells on both sides of each gamma jump: on level L, or on the
        /// coarsest level whose grid has the jump as an interface.
        [[nodiscard]] std::vector<NodeKey> pinned_nodes() const
        {
            std::vector<NodeKey> cells;
            const int L = m_cfg.max_level;
            for (long p : m_jump_positions)
            {
                int level = L;
                long q    = p;
                if (!m_cfg.pin_finest)
                {
                    while (level > 0 && (q & 1) == 0)
                    {
                        q >>= 1;
                        --level;
                    }
                }
                const long n = m_cfg.n0 << level;
                for (long c : {q - 1, q})
                {
                    if (m_periodic)
                    {
                        cells.push_back({level, ((c % n) + n) % n});
                    }
                    else if (c >= 0 && c < n)
                    {
                        cells.push_back({level, c});
                    }
                }
            }
            return cells;
        }

        void initialize()
        {
            const std::vector<double> fine = m_kernel.model().initial().cell_averages(m_domain, m_cfg.finest_cells());
            m_tree.initialize(fine, pinned_nodes(), m_tol);
            m_time  = 0.0;
            m_steps = 0;
        }

        /// Advances all leaves by dt and adapts the tree.
        void step(double dt)
        {
            if (dt > cfl_limit() * (1.0 + 1e-12))
            {
                throw NumericalError("CFL violation: dt=" + std::to_string(dt) + " exceeds " + std::to_string(cfl_limit()));
            }
            evolve_leaves(dt);
            m_tree.update(m_tol, false);
            m_time += dt;
            ++m_steps;
        }

        /// Edge fluxes and leaf update, leaving the structure untouched.
        void evolve_leaves(double dt)
        {
            const std::vector<NodeKey>& leaves = m_tree.leaves();
            const std::size_t n = leaves.size();
            const int L         = m_cfg.max_level;
            m_c.resize(n);
            m_a.resize(n);
            m_flux.resize(n + 1);
            for (std::size_t k = 0; k < n; ++k)
            {
                m_c[k] = m_kernel.clamp(m_tree.average(leaves[k].level, leaves[k].index), m_clamps);
                m_a[k] = m_kernel.A(m_c[k]);
            }

            std::size_t fb = static_cast<std::size_t>(-1);
            double fu      = 0.0;
            for (std::size_t k = 1; k < n; ++k)
            {
                const NodeKey& A = leaves[k - 1];
                const NodeKey& B = leaves[k];
                const std::size_t b = m_branch[static_cast<std::size_t>(B.index << (L - B.level))];
                // mixed levels: diffusion over the centre distance
                const double dx = A.level == B.level ? m_dx[static_cast<std::size_t>(A.level)] : centre_distance(A.level, B.level);
                const double fl = b == fb ? fu : m_kernel.flux(b, m_c[k - 1]);
                const double fr = m_kernel.flux(b, m_c[k]);
                m_flux[k]       = m_kernel.edge(b, m_c[k - 1], m_c[k], fl, fr, m_a[k - 1], m_a[k], dx);
                fb              = b;
                fu              = fr;
            }

            const auto nl = static_cast<std::size_t>(m_cfg.finest_cells());
            if (m_periodic)
            {
                m_flux[n] = wrap_flux(leaves, nl);
                m_flux[0] = m_flux[n];
            }
            else
            {
                const double f0 = m_kernel.flux(m_branch[0], m_c[0]);
                const double fn = m_kernel.flux(m_branch[nl], m_c[n - 1]);
                m_flux[0] = m_kernel.edge(m_branch[0], m_c[0], m_c[0], f0, f0, m_a[0], m_a[0], m_dx[static_cast<std::size_t>(leaves[0].level)]);
                m_flux[n] = m_kernel.edge(m_branch[nl], m_c[n - 1], m_c[n - 1], fn, fn, m_a[n - 1], m_a[n - 1],
                                          m_dx[static_cast<std::size_t>(leaves[n - 1].level)]);
            }

            bool finite = true;
            for (std::size_t k = 0; k < n; ++k)
            {
                double& u = m_tree.average(leaves[k].level, leaves[k].index);
                u -= dt / m_dx[static_cast<std::size_t>(leaves[k].level)] * (m_flux[k + 1] - m_flux[k]);
                finite = finite && std::isfinite(u);
            }
            if (!finite)
            {
                throw NumericalError("nonfinite leaf average in adaptive step");
            }
        }

        /// Tree with its virtual leaves materialized.
        [[nodiscard]] const GradedTree& complete_tree()
        {
            m_tree.build_virtual_leaves();
            return m_tree;
        }

        [[nodiscard]] MRSnapshot snapshot()
        {
            m_tree.build_virtual_leaves();
            MRSnapshot s;
            s.time          = m_time;
            s.leaves        = m_tree.leaves();
            s.leaf_count    = s.leaves.size();
            s.virtual_count = m_tree.virtual_leaves().size();
            s.leaf_averages.reserve(s.leaves.size());
            for (const NodeKey& k : s.leaves)
            {
                s.leaf_averages.push_back(m_tree.average(k.level, k.index));
            }
            s.fine = m_tree.reconstruct();
            return s;
        }

      private:
        /// Flux through the periodic seam between the last and the first leaf.
        [[nodiscard]] double wrap_flux(const std::vector<NodeKey>& leaves, std::size_t nl)
        {
            const std::size_t n = leaves.size();
            const NodeKey& A    = leaves[n - 1];
            const NodeKey& B    = leaves[0];
            const std::size_t b = m_branch[nl];
            const double dx = A.level == B.level ? m_dx[static_cast<std::size_t>(A.level)] : centre_distance(A.level, B.level);
            return m_kernel.edge(b, m_c[n - 1], m_c[0], m_kernel.flux(b, m_c[n - 1]), m_kernel.flux(b, m_c[0]), m_a[n - 1], m_a[0], dx);
        }

        [[nodiscard]] double centre_distance(int la, int lb) const
        {
            return 0.5 * (m_dx[static_cast<std::size_t>(la)] + m_dx[static_cast<std::size_t>(lb)]);
        }

        FluxKernel<M> m_kernel;
        MRConfig m_cfg;
        std::vector<double> m_tol;
        GradedTree m_tree;
        Interval m_domain;
        bool m_periodic;
        std::vector<long> m_jump_positions;
        std::vector<std::size_t> m_branch;
        std::vector<double> m_dx;
        double m_mf   = 0.0;
        double m_ma   = 0.0;
        long m_clamps = 0;
        double m_time = 0.0;
        long m_steps  = 0;
        std::vector<double> m_c;
        std::vector<double> m_a;
        std::vector<double> m_flux;
    };

    struct MRRun
    {
        std::vector<MRSnapshot> snapshots;
        double dt         = 0.0;
        long steps        = 0;
        long clamps       = 0;
        double wall_loop  = 0.0; // seconds, evolution only
        double wall_total = 0.0; // including tree initialization
        std::vector<std::size_t> leaf_counts; // per step
        std::vector<double> snapshot_wall_loop;  // elapsed evolution time at each snapshot
        std::vector<double> snapshot_wall_total;
    };

    /// Fixed-step adaptive run with snapshots at the requested times.
    template <FluxModel M>
    MRRun run_mr(const M& m, const MRConfig& cfg, StepRule rule, double t_final, const std::vector<double>& snapshot_times,
                 bool record_leaf_counts = false, bool keep_trees = false)
    {
        using clock      = std::chrono::steady_clock;
        const auto start = clock::now();
        MRSolver<M> solver(m, cfg);
        MRRun run;
        run.dt = rule.dt(solver.dx_finest(), solver.cfl_limit());
        if (run.dt > solver.cfl_limit() * (1.0 + 1e-12))
        {
            throw NumericalError("configured time step " + std::to_string(run.dt) + " violates the CFL limit "
                                 + std::to_string(solver.cfl_limit()));
        }
        TimeGrid grid(run.dt, t_final, snapshot_times);
        solver.initialize();
        const auto loop_start = clock::now();
        double paused         = 0.0;
        const auto record     = [&] {
            const auto t0 = clock::now();
            for (double t : grid.due())
            {
                (void)t;
                run.snapshot_wall_loop.push_back(std::chrono::duration<double>(t0 - loop_start).count() - paused);
                run.snapshot_wall_total.push_back(std::chrono::duration<double>(t0 - start).count() - paused);
                run.snapshots.push_back(solver.snapshot());
                run.snapshots.back().time = grid.time();
                if (keep_trees)
                {
                    run.snapshots.back().tree = std::make_shared<const GradedTree>(solver.tree());
                }
            }
            paused += std::chrono::duration<double>(clock::now() - t0).count();
        };
        record();
        while (!grid.done())
        {
            solver.step(grid.next_dt());
            grid.advance();
            ++run.steps;
            if (record_leaf_counts)
            {
                run.leaf_counts.push_back(solver.tree().leaf_count());
            }
            record();
        }
        const auto end = clock::now();
        run.clamps     = solver.clamp_count();
        run.wall_loop  = std::chrono::duration<double>(end - loop_start).count() - paused;
        run.wall_total = std::chrono::duration<double>(end - start).count() - paused;
        return run;
    }
}
