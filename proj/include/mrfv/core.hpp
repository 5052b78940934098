#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrfv
{
    /// Discontinuous spatial parameters entering the flux.
    ///
    /// Component 0 multiplies the diffusion term (gamma_1 in the clarifier
    /// model, identically 1 for traffic); the meaning of component 1 is
    /// model specific (bulk velocity for the clarifier, v_max for traffic).
    using GammaVector = std::array<double, 2>;

    enum class Boundary
    {
        periodic,
        transparent
    };

    struct Interval
    {
        double lo = 0.0;
        double hi = 1.0;

        [[nodiscard]] double length() const
        {
            return hi - lo;
        }
    };

    /// Invalid user input: unknown keys, inconsistent parameters, misaligned grids.
    class ConfigError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// CFL violations and nonfinite states.
    class NumericalError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    inline std::string_view to_string(Boundary b)
    {
        return b == Boundary::periodic ? "periodic" : "transparent";
    }

    inline Boundary parse_boundary(std::string_view s)
    {
        if (s == "periodic")
        {
            return Boundary::periodic;
        }
        if (s == "transparent")
        {
            return Boundary::transparent;
        }
        throw ConfigError("unknown boundary type '" + std::string(s) + "'");
    }
}
