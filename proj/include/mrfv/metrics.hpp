#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fv.hpp"
#include "graded_tree.hpp"
#include "mr_solver.hpp"

namespace mrfv
{
    /// eta = N_L / (N_L / 2^L + leaves), N_L = n0 2^L.
    inline double compression_rate(long n0, int max_level, std::size_t leaves)
    {
        const double nl = static_cast<double>(n0 << max_level);
        return nl / (static_cast<double>(n0) + static_cast<double>(leaves));
    }

    inline double compression_rate(const GradedTree& t)
    {
        return compression_rate(t.roots(), t.max_level(), t.leaf_count());
    }

    inline double speedup(double fv_seconds, double mr_seconds)
    {
        if (!(mr_seconds > 0.0))
        {
            throw NumericalError("speed-up undefined for a nonpositive MR time");
        }
        return fv_seconds / mr_seconds;
    }

    struct ErrorNorms
    {
        double l1   = 0.0;
        double l2   = 0.0;
        double linf = 0.0;
    };

    /// Averages of `fine` (n0 2^level cells) on every coarser level, by
    /// pairwise projection; result[l] has n0 2^l entries.
    inline std::vector<std::vector<double>> projection_pyramid(const std::vector<double>& fine, long n0, int level)
    {
        if (static_cast<long>(fine.size()) != (n0 << level))
        {
            throw ConfigError("reference data does not match n0 * 2^level cells");
        }
        std::vector<std::vector<double>> out(static_cast<std::size_t>(level + 1));
        out[static_cast<std::size_t>(level)] = fine;
        for (int l = level - 1; l >= 0; --l)
        {
            const auto& c = out[static_cast<std::size_t>(l + 1)];
            auto& p       = out[static_cast<std::size_t>(l)];
            p.resize(c.size() / 2);
            for (std::size_t k = 0; k < p.size(); ++k)
            {
                p[k] = project(c[2 * k], c[2 * k + 1]);
            }
        }
        return out;
    }

    /// Width-weighted errors of leaf values against a finer reference
    /// projected onto the leaves, divided by u_max. L1 and L2 are means over
    /// the domain, Linf is the largest cell error.
    inline ErrorNorms error_norms(const std::vector<NodeKey>& leaves, const std::vector<double>& values, const UniformState& reference,
                                  int max_level, double u_max, double time = std::numeric_limits<double>::quiet_NaN())
    {
        if (leaves.size() != values.size())
        {
            throw ConfigError("error_norms: leaf and value counts differ");
        }
        if (reference.level < max_level)
        {
            throw ConfigError("error_norms: reference level below the solution level");
        }
        if (!std::isnan(time) && std::abs(time - reference.time) > 1e-9 * std::max(1.0, std::abs(time)))
        {
            throw ConfigError("error_norms: reference time differs from the solution time");
        }
        const auto pyramid = projection_pyramid(reference.averages, reference.n0, reference.level);
        ErrorNorms e;
        double width_sum = 0.0;
        for (std::size_t k = 0; k < leaves.size(); ++k)
        {
            const NodeKey& key = leaves[k];
            if (key.level < 0 || key.level > max_level)
            {
                throw ConfigError("error_norms: leaf level outside 0..L");
            }
            const auto& row = pyramid[static_cast<std::size_t>(key.level)];
            if (key.index < 0 || key.index >= static_cast<long>(row.size()))
            {
                throw ConfigError("error_norms: leaf index outside the grid");
            }
            const double w = std::ldexp(1.0, -key.level) / static_cast<double>(reference.n0);
            const double d = std::abs(values[k] - row[static_cast<std::size_t>(key.index)]);
            e.l1 += w * d;
            e.l2 += w * d * d;
            e.linf = std::max(e.linf, d);
            width_sum += w;
        }
        if (std::abs(width_sum - 1.0) > 1e-9)
        {
            throw ConfigError("error_norms: leaves do not tile the domain");
        }
        e.l1   = e.l1 / u_max;
        e.l2   = std::sqrt(e.l2) / u_max;
        e.linf = e.linf / u_max;
        return e;
    }

    /// Uniform solution against a reference, all cells on one level.
    inline ErrorNorms error_norms(const UniformState& solution, const UniformState& reference, double u_max)
    {
        if (solution.n0 != reference.n0)
        {
            throw ConfigError("error_norms: root counts differ");
        }
        std::vector<NodeKey> keys(static_cast<std::size_t>(solution.cells()));
        for (long j = 0; j < solution.cells(); ++j)
        {
            keys[static_cast<std::size_t>(j)] = {solution.level, j};
        }
        return error_norms(keys, solution.averages, reference, solution.level, u_max, solution.time);
    }

    struct SlopeFit
    {
        double slope  = 0.0; // error ~ 2^(-slope L)
        bool degenerate = false;
    };

    /// Least-squares slope of -log2(error) against the level.
    inline SlopeFit fit_slope(const std::vector<int>& levels, const std::vector<double>& errors)
    {
        SlopeFit f;
        if (levels.size() != errors.size() || levels.size() < 2)
        {
            f.degenerate = true;
            return f;
        }
        double sx  = 0.0;
        double sy  = 0.0;
        double sxx = 0.0;
        double sxy = 0.0;
        const auto n = static_cast<double>(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k)
        {
            if (!(errors[k] > 1e-14))
            {
                f.degenerate = true;
                return f;
            }
            const double x = levels[k];
            const double y = std::log2(errors[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        f.slope = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
        return f;
    }

    struct MetricsReport
    {
        double t_final = 0.0;
        double eta     = 0.0;
        double V       = 0.0; // from total times
        double V_loop  = 0.0; // evolution loops only
        ErrorNorms err;       // MR against the reference
        ErrorNorms err_fv;    // uniform solution against the reference
        std::size_t leaf_count = 0;
        long n_l = 0;
        double mr_total = 0.0;
        double mr_loop  = 0.0;
        double fv_total = 0.0;
        double fv_loop  = 0.0;
    };

    struct ConvergenceResult
    {
        std::vector<int> levels;
        std::vector<double> epsilons;
        std::vector<double> fv_l1;
        std::vector<double> mr_l1;
        SlopeFit fv;
        SlopeFit mr;
    };

    /// Uniform and adaptive L1 errors at t_final for each level against a
    /// finer reference, with fitted slopes. `epsilon_of` gives the MR
    /// tolerance per level.
    template <FluxModel M>
    ConvergenceResult convergence_study(const M& m, long n0, const std::vector<int>& levels, StepRule rule, double t_final,
                                        const UniformState& reference, const std::function<double(int)>& epsilon_of)
    {
        ConvergenceResult r;
        for (int L : levels)
        {
            if (L >= reference.level)
            {
                throw ConfigError("convergence: reference level must exceed every studied level");
            }
            const UniformRun fv = run_uniform(m, n0, L, rule, t_final, {t_final});
            MRConfig cfg;
            cfg.max_level = L;
            cfg.n0        = n0;
            cfg.epsilon   = epsilon_of(L);
            const MRRun mr = run_mr(m, cfg, rule, t_final, {t_final});
            const MRSnapshot& s = mr.snapshots.back();
            r.levels.push_back(L);
            r.epsilons.push_back(cfg.epsilon);
            r.fv_l1.push_back(error_norms(fv.snapshots.back(), reference, m.u_max()).l1);
            r.mr_l1.push_back(error_norms(s.leaves, s.leaf_averages, reference, L, m.u_max(), s.time).l1);
        }
        r.fv = fit_slope(r.levels, r.fv_l1);
        r.mr = fit_slope(r.levels, r.mr_l1);
        return r;
    }
}
