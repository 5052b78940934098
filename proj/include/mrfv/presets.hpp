#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fv.hpp"
#include "models.hpp"

namespace mrfv
{
    using PresetModel = std::variant<TrafficModel, ClarifierModel>;

    /// Run defaults attached to a named preset.
    struct Preset
    {
        std::string name;
        std::string description;
        int max_level  = 9;
        long n0        = 1;
        bool use_reference_tolerance = false; // epsilon from (c_factor, alpha)
        double epsilon  = 1e-3;
        double c_factor = 1.0;
        double alpha    = 0.5;
        StepRule rule;
        double t_final = 0.0;
        std::vector<double> snapshots;
        int reference_level = 13;
    };

    inline std::vector<std::string> preset_names()
    {
        return {"traffic-ex1", "clarifier-ex2", "clarifier-ex3"};
    }

    inline Preset preset(const std::string& name)
    {
        Preset p;
        p.name = name;
        if (name == "traffic-ex1")
        {
            p.description = "circular road, 10 mi, convoy entering a 25 mph segment [0, 1.25] mi; units mi, h, cars/mi";
            p.max_level   = 10;
            p.epsilon     = 0.301;
            p.c_factor    = 1e5;
            p.rule        = {StepRule::Kind::lambda, 0.0003};
            p.t_final     = 0.2;
            p.snapshots   = {0.05, 0.1, 0.15, 0.2};
            return p;
        }
        if (name == "clarifier-ex2")
        {
            p.description = "ideal suspension, empty clarifier-thickener on [-2, 2] m, feed at x = 0; units m, s";
            p.max_level   = 9;
            p.epsilon     = 4.15e-3;
            p.rule        = {StepRule::Kind::lambda, 1.0 / 16.0};
            p.t_final     = 4.0;
            p.snapshots   = {1.0, 2.0, 3.0, 4.0};
            return p;
        }
        if (name == "clarifier-ex3")
        {
            p.description = "flocculated suspension with compression, vessel filled at u_c; units m, s";
            p.max_level   = 9;
            p.use_reference_tolerance = true;
            p.c_factor    = 1e-3;
            p.alpha       = 0.5;
            p.rule        = {StepRule::Kind::lambda, 40.0};
            p.t_final     = 50000.0;
            p.snapshots   = {10000.0, 25000.0, 50000.0};
            return p;
        }
        throw ConfigError("unknown preset '" + name + "' (known: traffic-ex1, clarifier-ex2, clarifier-ex3)");
    }

    /// Field names of the preset's model parameters.
    inline std::vector<std::string> preset_parameter_names(const std::string& name)
    {
        std::vector<std::string> out;
        const auto collect = [&out](const char* key, auto) { out.emplace_back(key); };
        if (name == "traffic-ex1")
        {
            TrafficParams::for_each_field(collect);
        }
        else
        {
            (void)preset(name);
            ClarifierParams::for_each_field(collect);
        }
        return out;
    }

    namespace detail
    {
        template <class P>
        P apply_overrides(P p, const std::map<std::string, double>& overrides)
        {
            for (const auto& [key, value] : overrides)
            {
                bool found = false;
                P::for_each_field([&](const char* k, double P::*field) {
                    if (key == k)
                    {
                        p.*field = value;
                        found    = true;
                    }
                });
                if (!found)
                {
                    throw ConfigError("unknown model parameter '" + key + "'");
                }
            }
            return p;
        }
    }

    /// Model of the preset with parameter overrides applied.
    inline PresetModel make_model(const std::string& name, const std::map<std::string, double>& overrides = {})
    {
        if (name == "traffic-ex1")
        {
            return TrafficModel(detail::apply_overrides(traffic_ex1_params(), overrides), name);
        }
        if (name == "clarifier-ex2")
        {
            return ClarifierModel(detail::apply_overrides(clarifier_ex2_params(), overrides), name);
        }
        if (name == "clarifier-ex3")
        {
            return ClarifierModel(detail::apply_overrides(clarifier_ex3_params(), overrides), name);
        }
        (void)preset(name);
        return TrafficModel{};
    }
}
