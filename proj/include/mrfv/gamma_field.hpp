#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

namespace mrfv
{
    /// Piecewise constant parameter field with finitely many jumps.
    ///
    /// values()[k] holds on the open interval between jumps()[k-1] and
    /// jumps()[k]. Interfaces are sampled from the left: at a jump the
    /// field takes the value of the piece to its left.
    class GammaField
    {
      public:
        GammaField()
            : m_values{GammaVector{1.0, 0.0}}
        {
        }

        explicit GammaField(GammaVector constant)
            : m_values{constant}
        {
        }

        GammaField(std::vector<double> jumps, std::vector<GammaVector> values)
            : m_jumps(std::move(jumps))
            , m_values(std::move(values))
        {
            if (m_values.size() != m_jumps.size() + 1)
            {
                throw ConfigError("gamma field needs exactly one more value than jumps");
            }
            if (!std::is_sorted(m_jumps.begin(), m_jumps.end())
                || std::adjacent_find(m_jumps.begin(), m_jumps.end()) != m_jumps.end())
            {
                throw ConfigError("gamma field jumps must be strictly increasing");
            }
        }

        [[nodiscard]] std::span<const double> jumps() const
        {
            return m_jumps;
        }

        [[nodiscard]] std::size_t branch_count() const
        {
            return m_values.size();
        }

        [[nodiscard]] const GammaVector& branch(std::size_t k) const
        {
            return m_values[k];
        }

        /// Index of the piece seen when approaching x from the left.
        [[nodiscard]] std::size_t branch_left_of(double x) const
        {
            return static_cast<std::size_t>(std::lower_bound(m_jumps.begin(), m_jumps.end(), x) - m_jumps.begin());
        }

        [[nodiscard]] GammaVector left_limit(double x) const
        {
            return m_values[branch_left_of(x)];
        }

        [[nodiscard]] GammaVector right_limit(double x) const
        {
            return m_values[static_cast<std::size_t>(std::upper_bound(m_jumps.begin(), m_jumps.end(), x) - m_jumps.begin())];
        }

      private:
        std::vector<double> m_jumps;
        std::vector<GammaVector> m_values;
    };

    /// Jump positions of a gamma field expressed as interface indices of a
    /// uniform grid with `cells` cells over `domain`.
    ///
    /// Throws ConfigError when a jump inside the domain does not sit on an
    /// interface of that grid.
    class GridJumps
    {
      public:
        GridJumps() = default;

        GridJumps(const GammaField& field, Interval domain, long cells)
            : m_cells(cells)
        {
            const double dx = domain.length() / static_cast<double>(cells);
            for (double x : field.jumps())
            {
                const double s = (x - domain.lo) / dx;
                const double r = std::round(s);
                if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
                {
                    throw ConfigError("gamma jump at x=" + std::to_string(x) + " is not aligned with the finest grid ("
                                      + std::to_string(cells) + " cells)");
                }
                m_positions.push_back(static_cast<long>(r));
            }
        }

        [[nodiscard]] long cells() const
        {
            return m_cells;
        }

        /// Interface positions of the jumps, in units of the finest cell.
        [[nodiscard]] std::span<const long> positions() const
        {
            return m_positions;
        }

        /// Branch seen from the left at interface `pos` (0..cells).
        [[nodiscard]] std::size_t branch_at_interface(long pos) const
        {
            std::size_t k = 0;
            while (k < m_positions.size() && m_positions[k] < pos)
            {
                ++k;
            }
            return k;
        }

      private:
        long m_cells = 1;
        std::vector<long> m_positions;
    };
}
