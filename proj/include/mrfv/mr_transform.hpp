#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace mrfv
{
    /// Multiresolution controls.
    struct MRConfig
    {
        int max_level  = 9;
        long n0        = 1;
        double epsilon = 1e-3;
        double alpha   = 0.5;
        double c_factor = 1.0;
        int s          = 1;
        int s_prime    = 2;
        double gamma1  = -1.0 / 8.0;
        bool pin_finest = true; // pin jump cells on level L, else on their coarsest aligned level
        int grading     = 2;    // reach of the coarse neighbourhood each real node requires

        void validate() const
        {
            if (max_level < 1 || max_level > 20)
            {
                throw ConfigError("max level L must lie in [1, 20]");
            }
            if (n0 < 1)
            {
                throw ConfigError("root count N0 must be positive");
            }
            if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            {
                throw ConfigError("epsilon must be finite and nonnegative");
            }
            if (grading < 1 || grading > 2)
            {
                throw ConfigError("grading reach must be 1 or 2");
            }
            if (s != 1 || s_prime != 2 || gamma1 != -1.0 / 8.0)
            {
                throw ConfigError("only the three-point prediction (s = 1, s' = 2, gamma1 = -1/8) is implemented");
            }
        }

        [[nodiscard]] long finest_cells() const
        {
            return n0 << max_level;
        }
    };

    /// Parent average from its two children.
    inline double project(double left_child, double right_child)
    {
        return 0.5 * (left_child + right_child);
    }

    /// Third order prediction of the two children of a cell from the cell
    /// and its two neighbours; the spatially left child comes first.
    inline std::pair<double, double> predict(double parent, double left_cousin, double right_cousin)
    {
        const double slope = 0.125 * (right_cousin - left_cousin);
        return {parent - slope, parent + slope};
    }

    /// Prediction with the slope limited so that both children stay in
    /// [0, u_max] whenever the parent does. Means are preserved.
    inline std::pair<double, double> predict_bounded(double parent, double left_cousin, double right_cousin, double u_max)
    {
        double slope      = 0.125 * (right_cousin - left_cousin);
        const double room = std::max(0.0, std::min(parent, u_max - parent));
        slope             = std::clamp(slope, -room, room);
        return {parent - slope, parent + slope};
    }

    /// eps_l = 2^(l-L) eps.
    inline double level_tolerance(double epsilon, int max_level, int level)
    {
        return std::ldexp(epsilon, level - max_level);
    }

    inline double level_tolerance(const MRConfig& cfg, int level)
    {
        return level_tolerance(cfg.epsilon, cfg.max_level, level);
    }

    inline std::vector<double> level_tolerances(const MRConfig& cfg)
    {
        std::vector<double> tol(static_cast<std::size_t>(cfg.max_level + 1));
        for (int l = 0; l <= cfg.max_level; ++l)
        {
            tol[static_cast<std::size_t>(l)] = level_tolerance(cfg, l);
        }
        return tol;
    }

    /// Tolerance balancing thresholding against discretization error:
    /// C 2^(-(alpha+1)L) / (|I| max|f_u| + 2^(-L) max|A'|), or
    /// C 2^(-alpha L) / max|f_u| when there is no diffusion.
    inline double reference_tolerance(double max_fu, double max_dA, double c_factor, double alpha, int max_level, double domain_length)
    {
        if (!(c_factor > 0.0 && alpha > 0.0))
        {
            throw ConfigError("reference tolerance needs C > 0 and alpha > 0");
        }
        if (max_dA > 0.0)
        {
            return c_factor * std::exp2(-(alpha + 1.0) * max_level) / (domain_length * max_fu + std::exp2(-max_level) * max_dA);
        }
        if (max_fu > 0.0)
        {
            return c_factor * std::exp2(-alpha * max_level) / max_fu;
        }
        throw ConfigError("reference tolerance undefined: flux and diffusion derivatives both vanish");
    }

    /// Index of the cousin at offset d on a level with `size` cells; wraps on
    /// periodic domains and repeats the edge cell otherwise.
    inline long cousin_index(long i, long d, long size, Boundary bc)
    {
        long k = i + d;
        if (bc == Boundary::periodic)
        {
            k %= size;
            return k < 0 ? k + size : k;
        }
        return std::clamp(k, 0L, size - 1);
    }

    /// Result of the multiresolution transform: coarse averages plus one
    /// detail per sibling pair on each level 1..L (details[l-1] has
    /// n0 2^(l-1) entries, the detail of the left child of each pair).
    struct Multiscale
    {
        long n0   = 1;
        int levels = 0;
        Boundary boundary = Boundary::periodic;
        std::vector<double> coarse;
        std::vector<std::vector<double>> details;
    };

    inline Multiscale encode(const std::vector<double>& fine, long n0, int levels, Boundary bc)
    {
        if (static_cast<long>(fine.size()) != (n0 << levels))
        {
            throw std::invalid_argument("encode: input length must equal n0 * 2^L");
        }
        Multiscale out;
        out.n0       = n0;
        out.levels   = levels;
        out.boundary = bc;
        out.details.resize(static_cast<std::size_t>(levels));
        std::vector<double> cur = fine;
        for (int l = levels; l >= 1; --l)
        {
            const long np = n0 << (l - 1);
            std::vector<double> parent(static_cast<std::size_t>(np));
            for (long k = 0; k < np; ++k)
            {
                parent[static_cast<std::size_t>(k)] = project(cur[static_cast<std::size_t>(2 * k)], cur[static_cast<std::size_t>(2 * k + 1)]);
            }
            std::vector<double>& d = out.details[static_cast<std::size_t>(l - 1)];
            d.resize(static_cast<std::size_t>(np));
            for (long k = 0; k < np; ++k)
            {
                const auto [pl, pr] = predict(parent[static_cast<std::size_t>(k)], parent[static_cast<std::size_t>(cousin_index(k, -1, np, bc))],
                                              parent[static_cast<std::size_t>(cousin_index(k, 1, np, bc))]);
                (void)pr;
                d[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(2 * k)] - pl;
            }
            cur = std::move(parent);
        }
        out.coarse = std::move(cur);
        return out;
    }

    inline std::vector<double> decode(const Multiscale& ms)
    {
        if (static_cast<long>(ms.coarse.size()) != ms.n0 || static_cast<int>(ms.details.size()) != ms.levels)
        {
            throw std::invalid_argument("decode: shape mismatch");
        }
        std::vector<double> cur = ms.coarse;
        for (int l = 1; l <= ms.levels; ++l)
        {
            const long np                = ms.n0 << (l - 1);
            const std::vector<double>& d = ms.details[static_cast<std::size_t>(l - 1)];
            if (static_cast<long>(d.size()) != np)
            {
                throw std::invalid_argument("decode: detail level has wrong length");
            }
            std::vector<double> child(static_cast<std::size_t>(2 * np));
            for (long k = 0; k < np; ++k)
            {
                const auto [pl, pr] = predict(cur[static_cast<std::size_t>(k)], cur[static_cast<std::size_t>(cousin_index(k, -1, np, ms.boundary))],
                                              cur[static_cast<std::size_t>(cousin_index(k, 1, np, ms.boundary))]);
                child[static_cast<std::size_t>(2 * k)]     = pl + d[static_cast<std::size_t>(k)];
                child[static_cast<std::size_t>(2 * k + 1)] = pr - d[static_cast<std::size_t>(k)];
            }
            cur = std::move(child);
        }
        return cur;
    }

    /// Zeroes every detail with |d| < eps_l.
    inline void threshold(Multiscale& ms, double epsilon)
    {
        for (int l = 1; l <= ms.levels; ++l)
        {
            const double tol = level_tolerance(epsilon, ms.levels, l);
            for (double& d : ms.details[static_cast<std::size_t>(l - 1)])
            {
                if (std::abs(d) < tol)
                {
                    d = 0.0;
                }
            }
        }
    }
}
