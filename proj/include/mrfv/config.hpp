#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "presets.hpp"

namespace mrfv
{
    enum class SolverKind
    {
        uniform,
        mr,
        compare
    };

    inline std::string to_string(SolverKind k)
    {
        switch (k)
        {
        case SolverKind::uniform:
            return "uniform";
        case SolverKind::mr:
            return "mr";
        case SolverKind::compare:
            break;
        }
        return "compare";
    }

    inline SolverKind parse_solver(const std::string& s)
    {
        if (s == "uniform")
        {
            return SolverKind::uniform;
        }
        if (s == "mr")
        {
            return SolverKind::mr;
        }
        if (s == "compare")
        {
            return SolverKind::compare;
        }
        throw ConfigError("unknown solver '" + s + "' (uniform, mr, compare)");
    }

    /// Everything one CLI invocation needs. Either `epsilon` or the pair
    /// (c_factor, alpha) sets the tolerance, never both.
    struct RunConfig
    {
        std::string preset = "clarifier-ex2";
        SolverKind solver  = SolverKind::mr;
        int max_level      = 9;
        long n0            = 1;
        std::optional<double> epsilon;
        std::optional<double> c_factor;
        std::optional<double> alpha;
        StepRule rule;
        double t_final = 0.0;
        std::vector<double> snapshots;
        std::string out_dir = "out";
        int reference_level = 13;
        std::vector<int> levels; // convergence study
        std::map<std::string, double> params;

        friend bool operator==(const RunConfig&, const RunConfig&) = default;

        void validate() const
        {
            (void)preset_parameter_names(preset);
            if (epsilon.has_value() == (c_factor.has_value() || alpha.has_value()))
            {
                throw ConfigError("give exactly one of epsilon or (c_factor, alpha)");
            }
            if (c_factor.has_value() != alpha.has_value())
            {
                throw ConfigError("c_factor and alpha must be given together");
            }
            if (epsilon && !(*epsilon >= 0.0))
            {
                throw ConfigError("epsilon must be nonnegative");
            }
            if (max_level < 1 || max_level > 20 || n0 < 1)
            {
                throw ConfigError("need 1 <= levels <= 20 and n0 >= 1");
            }
            if (!(rule.value > 0.0))
            {
                throw ConfigError("step factor must be positive");
            }
            if (!(t_final >= 0.0))
            {
                throw ConfigError("t_final must be nonnegative");
            }
            for (std::size_t k = 0; k < snapshots.size(); ++k)
            {
                if (snapshots[k] < 0.0 || snapshots[k] > t_final)
                {
                    throw ConfigError("snapshot time " + fmt(snapshots[k]) + " outside [0, t_final]");
                }
                if (k > 0 && snapshots[k] < snapshots[k - 1])
                {
                    throw ConfigError("snapshot times must be sorted");
                }
            }
            if (reference_level < 1 || reference_level > 20)
            {
                throw ConfigError("reference_level must lie in [1, 20]");
            }
            for (int l : levels)
            {
                if (l < 1 || l >= reference_level)
                {
                    throw ConfigError("convergence levels must lie in [1, reference_level)");
                }
            }
            const std::vector<std::string> names = preset_parameter_names(preset);
            for (const auto& [key, value] : params)
            {
                (void)value;
                if (std::find(names.begin(), names.end(), key) == names.end())
                {
                    throw ConfigError("unknown model parameter 'param." + key + "' for preset " + preset);
                }
            }
        }
    };

    /// Preset run defaults as a configuration.
    inline RunConfig config_from_preset(const std::string& name)
    {
        const Preset p = preset(name);
        RunConfig c;
        c.preset    = name;
        c.max_level = p.max_level;
        c.n0        = p.n0;
        if (p.use_reference_tolerance)
        {
            c.c_factor = p.c_factor;
            c.alpha    = p.alpha;
        }
        else
        {
            c.epsilon = p.epsilon;
        }
        c.rule            = p.rule;
        c.t_final         = p.t_final;
        c.snapshots       = p.snapshots;
        c.reference_level = p.reference_level;
        return c;
    }

    namespace detail
    {
        inline std::string trim(const std::string& s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
            {
                return "";
            }
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline std::vector<std::string> split_list(const std::string& s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                {
                    out.push_back(item);
                }
            }
            return out;
        }

        inline int parse_int(const std::string& s)
        {
            int x          = 0;
            const char* e  = s.data() + s.size();
            const auto res = std::from_chars(s.data(), e, x);
            if (res.ec != std::errc() || res.ptr != e)
            {
                throw ConfigError("not an integer: '" + s + "'");
            }
            return x;
        }
    }

    inline std::vector<double> parse_double_list(const std::string& s)
    {
        std::vector<double> out;
        for (const std::string& item : detail::split_list(s))
        {
            out.push_back(parse_double(item));
        }
        return out;
    }

    inline std::vector<int> parse_int_list(const std::string& s)
    {
        std::vector<int> out;
        for (const std::string& item : detail::split_list(s))
        {
            out.push_back(detail::parse_int(item));
        }
        return out;
    }

    /// Applies one key = value setting. Setting epsilon clears (c_factor,
    /// alpha) and the reverse.
    inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value)
    {
        if (key == "preset")
        {
            c.preset = value;
        }
        else if (key == "solver")
        {
            c.solver = parse_solver(value);
        }
        else if (key == "levels")
        {
            c.max_level = detail::parse_int(value);
        }
        else if (key == "n0")
        {
            c.n0 = detail::parse_int(value);
        }
        else if (key == "epsilon")
        {
            c.epsilon = parse_double(value);
            c.c_factor.reset();
            c.alpha.reset();
        }
        else if (key == "c_factor" || key == "alpha")
        {
            (key == "c_factor" ? c.c_factor : c.alpha) = parse_double(value);
            c.epsilon.reset();
        }
        else if (key == "step_rule")
        {
            c.rule.kind = parse_step_kind(value);
        }
        else if (key == "step_factor")
        {
            c.rule.value = parse_double(value);
        }
        else if (key == "t_final")
        {
            c.t_final = parse_double(value);
        }
        else if (key == "snapshots")
        {
            c.snapshots = parse_double_list(value);
        }
        else if (key == "out")
        {
            c.out_dir = value;
        }
        else if (key == "reference_level")
        {
            c.reference_level = detail::parse_int(value);
        }
        else if (key == "convergence_levels")
        {
            c.levels = parse_int_list(value);
        }
        else if (key.rfind("param.", 0) == 0 && key.size() > 6)
        {
            c.params[key.substr(6)] = parse_double(value);
        }
        else
        {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    /// key = value lines, '#' starts a comment. A `preset` line, wherever it
    /// stands, selects the defaults the other lines override; without one
    /// `default_preset` is used.
    inline RunConfig parse_config(const std::string& text, const std::string& default_preset = "clarifier-ex2")
    {
        std::vector<std::pair<std::string, std::string>> settings;
        std::string name = default_preset;
        std::istringstream in(text);
        std::string line;
        int number = 0;
        while (std::getline(in, line))
        {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
            {
                line.erase(hash);
            }
            line = detail::trim(line);
            if (line.empty())
            {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw ConfigError("line " + std::to_string(number) + ": expected key = value");
            }
            const std::string key   = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key == "preset")
            {
                name = value;
            }
            settings.emplace_back(key, value);
        }
        RunConfig c = config_from_preset(name);
        for (const auto& [key, value] : settings)
        {
            try
            {
                apply_setting(c, key, value);
            }
            catch (const ConfigError& e)
            {
                throw ConfigError(std::string(e.what()) + " (key '" + key + "')");
            }
        }
        c.validate();
        return c;
    }

    inline std::string emit_config(const RunConfig& c)
    {
        const auto join = [](const auto& v, auto f) {
            std::string s;
            for (std::size_t k = 0; k < v.size(); ++k)
            {
                s += (k ? "," : "") + f(v[k]);
            }
            return s;
        };
        std::string out;
        out += "preset = " + c.preset + "\n";
        out += "solver = " + to_string(c.solver) + "\n";
        out += "levels = " + std::to_string(c.max_level) + "\n";
        out += "n0 = " + std::to_string(c.n0) + "\n";
        if (c.epsilon)
        {
            out += "epsilon = " + fmt(*c.epsilon) + "\n";
        }
        else
        {
            out += "c_factor = " + fmt(c.c_factor.value_or(0.0)) + "\n";
            out += "alpha = " + fmt(c.alpha.value_or(0.0)) + "\n";
        }
        out += "step_rule = " + to_string(c.rule.kind) + "\n";
        out += "step_factor = " + fmt(c.rule.value) + "\n";
        out += "t_final = " + fmt(c.t_final) + "\n";
        out += "snapshots = " + join(c.snapshots, [](double x) { return fmt(x); }) + "\n";
        out += "out = " + c.out_dir + "\n";
        out += "reference_level = " + std::to_string(c.reference_level) + "\n";
        out += "convergence_levels = " + join(c.levels, [](int x) { return std::to_string(x); }) + "\n";
        for (const auto& [key, value] : c.params)
        {
            out += "param." + key + " = " + fmt(value) + "\n";
        }
        return out;
    }
}
