#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"
#include "mr_solver.hpp"
#include "reference_cache.hpp"

namespace mrfv
{
    inline std::string params_text(const TrafficModel& m)
    {
        std::string out;
        TrafficParams::for_each_field([&](const char* k, double TrafficParams::*f) { out += std::string(k) + "=" + fmt(m.params().*f) + ";"; });
        return out;
    }

    inline std::string params_text(const ClarifierModel& m)
    {
        std::string out;
        ClarifierParams::for_each_field([&](const char* k, double ClarifierParams::*f) { out += std::string(k) + "=" + fmt(m.params().*f) + ";"; });
        return out;
    }

    /// Tolerance of a run: the given epsilon, or the reference tolerance
    /// from (c_factor, alpha) at level L.
    template <FluxModel M>
    double resolve_epsilon(const M& m, const RunConfig& c, int level)
    {
        if (c.epsilon)
        {
            return *c.epsilon;
        }
        return reference_tolerance(max_flux_derivative(m), max_diffusion_derivative(m), c.c_factor.value(), c.alpha.value(), level,
                                   m.domain().length());
    }

    template <FluxModel M>
    MRConfig mr_config(const M& m, const RunConfig& c)
    {
        MRConfig cfg;
        cfg.max_level = c.max_level;
        cfg.n0        = c.n0;
        cfg.epsilon   = resolve_epsilon(m, c, c.max_level);
        cfg.validate();
        return cfg;
    }

    /// Step rule of the fine reference: the run's factor, capped at the
    /// reference grid's CFL limit when it is a lambda rule.
    inline StepRule reference_rule(StepRule r)
    {
        if (r.kind == StepRule::Kind::lambda)
        {
            r.kind = StepRule::Kind::capped_lambda;
        }
        return r;
    }

    struct Comparison
    {
        UniformRun fv;
        MRRun mr;
        std::vector<UniformState> reference; // empty without a reference
        std::vector<MetricsReport> rows;
        double epsilon = 0.0;
    };

    /// Uniform and adaptive runs at the same level and time step with one
    /// metrics row per snapshot. Errors are measured against the cached
    /// reference at c.reference_level when `with_reference`, otherwise
    /// against the uniform run. `keep_trees` stores the tree with each snapshot.
    template <FluxModel M>
    Comparison compare(const M& m, const RunConfig& c, bool with_reference, bool keep_trees = false)
    {
        Comparison out;
        const MRConfig cfg = mr_config(m, c);
        out.epsilon        = cfg.epsilon;
        out.fv             = run_uniform(m, c.n0, c.max_level, c.rule, c.t_final, c.snapshots);
        out.mr             = run_mr(m, cfg, c.rule, c.t_final, c.snapshots, false, keep_trees);
        if (with_reference)
        {
            out.reference = cached_reference(m, params_text(m), c.n0, c.reference_level, reference_rule(c.rule), c.snapshots);
        }
        for (std::size_t k = 0; k < out.mr.snapshots.size(); ++k)
        {
            const MRSnapshot& s   = out.mr.snapshots[k];
            const UniformState& f = out.fv.snapshots[k];
            const UniformState& r = with_reference ? out.reference[k] : f;
            MetricsReport row;
            row.t_final    = s.time;
            row.leaf_count = s.leaf_count;
            row.n_l        = cfg.finest_cells();
            row.eta        = compression_rate(c.n0, c.max_level, s.leaf_count);
            row.err        = error_norms(s.leaves, s.leaf_averages, r, c.max_level, m.u_max(), s.time);
            row.err_fv     = error_norms(f, r, m.u_max());
            row.mr_total   = out.mr.snapshot_wall_total[k];
            row.mr_loop    = out.mr.snapshot_wall_loop[k];
            row.fv_total   = out.fv.snapshot_wall_total[k];
            row.fv_loop    = out.fv.snapshot_wall_loop[k];
            row.V          = row.mr_total > 0.0 ? speedup(row.fv_total, row.mr_total) : 0.0;
            row.V_loop     = row.mr_loop > 0.0 ? speedup(row.fv_loop, row.mr_loop) : 0.0;
            out.rows.push_back(row);
        }
        return out;
    }

    /// Levels list and slopes against a reference at c.reference_level.
    /// The tolerance scales with the reference-tolerance formula from its
    /// value at c.max_level, so each level keeps the same ratio to eps_R.
    template <FluxModel M>
    ConvergenceResult convergence(const M& m, const RunConfig& c)
    {
        const std::vector<UniformState> ref =
            cached_reference(m, params_text(m), c.n0, c.reference_level, reference_rule(c.rule), {c.t_final});
        const double mf     = max_flux_derivative(m);
        const double ma     = max_diffusion_derivative(m);
        const double length = m.domain().length();
        const double cf     = c.c_factor.value_or(1.0);
        const double al     = c.alpha.value_or(0.5);
        const double anchor = resolve_epsilon(m, c, c.max_level);
        const double at_max = reference_tolerance(mf, ma, cf, al, c.max_level, length);
        const auto eps_of   = [&](int L) { return anchor * reference_tolerance(mf, ma, cf, al, L, length) / at_max; };
        return convergence_study(m, c.n0, c.levels, c.rule, c.t_final, ref.back(), eps_of);
    }
}
