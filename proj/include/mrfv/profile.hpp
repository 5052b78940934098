#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace mrfv
{
    /// Initial datum u0: piecewise smooth with jumps at known positions.
    ///
    /// Constant pieces are averaged exactly; smooth pieces with a three-point
    /// Gauss rule on each sub-interval of a cell.
    class PiecewiseProfile
    {
      public:
        struct Piece
        {
            double value = 0.0;
            std::function<double(double)> smooth;

            [[nodiscard]] double operator()(double x) const
            {
                return smooth ? smooth(x) : value;
            }
        };

        PiecewiseProfile()
            : m_pieces{Piece{}}
        {
        }

        PiecewiseProfile(std::vector<double> breaks, std::vector<Piece> pieces)
            : m_breaks(std::move(breaks))
            , m_pieces(std::move(pieces))
        {
            if (m_pieces.size() != m_breaks.size() + 1)
            {
                throw ConfigError("profile needs exactly one more piece than breakpoints");
            }
            if (!std::is_sorted(m_breaks.begin(), m_breaks.end()))
            {
                throw ConfigError("profile breakpoints must be sorted");
            }
        }

        static PiecewiseProfile constant(double c)
        {
            return PiecewiseProfile({}, {Piece{c, {}}});
        }

        static PiecewiseProfile steps(std::vector<double> breaks, const std::vector<double>& values)
        {
            std::vector<Piece> pieces;
            pieces.reserve(values.size());
            for (double v : values)
            {
                pieces.push_back(Piece{v, {}});
            }
            return PiecewiseProfile(std::move(breaks), std::move(pieces));
        }

        static PiecewiseProfile smooth(std::function<double(double)> fn)
        {
            return PiecewiseProfile({}, {Piece{0.0, std::move(fn)}});
        }

        [[nodiscard]] std::span<const double> breaks() const
        {
            return m_breaks;
        }

        [[nodiscard]] double operator()(double x) const
        {
            const auto k = static_cast<std::size_t>(std::upper_bound(m_breaks.begin(), m_breaks.end(), x) - m_breaks.begin());
            return m_pieces[k](x);
        }

        [[nodiscard]] double cell_average(double a, double b) const
        {
            double integral = 0.0;
            double left     = a;
            auto k = static_cast<std::size_t>(std::upper_bound(m_breaks.begin(), m_breaks.end(), a) - m_breaks.begin());
            while (left < b)
            {
                const double right = k < m_breaks.size() ? std::min(m_breaks[k], b) : b;
                if (right > left)
                {
                    const Piece& p = m_pieces[k];
                    integral += p.smooth ? gauss3(p.smooth, left, right) : p.value * (right - left);
                }
                left = right;
                ++k;
            }
            return integral / (b - a);
        }

        [[nodiscard]] std::vector<double> cell_averages(Interval domain, long cells) const
        {
            std::vector<double> out(static_cast<std::size_t>(cells));
            const double dx = domain.length() / static_cast<double>(cells);
            for (long j = 0; j < cells; ++j)
            {
                const double a = domain.lo + static_cast<double>(j) * dx;
                out[static_cast<std::size_t>(j)] = cell_average(a, a + dx);
            }
            return out;
        }

      private:
        std::vector<double> m_breaks;
        std::vector<Piece> m_pieces;
    };
}
