#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "fv.hpp"
#include "graded_tree.hpp"
#include "metrics.hpp"
#include "mr_solver.hpp"

namespace mrfv
{
    /// Shortest decimal text that parses back to the same double.
    inline std::string fmt(double x)
    {
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, r.ptr);
    }

    inline double parse_double(const std::string& s)
    {
        double x       = 0.0;
        const char* b  = s.data();
        const char* e  = s.data() + s.size();
        const auto res = std::from_chars(b, e, x);
        if (res.ec != std::errc() || res.ptr != e)
        {
            throw ConfigError("not a number: '" + s + "'");
        }
        return x;
    }

    inline void write_text(const std::filesystem::path& path, const std::string& text)
    {
        if (path.has_parent_path())
        {
            std::filesystem::create_directories(path.parent_path());
        }
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw ConfigError("cannot write " + path.string());
        }
        out << text;
    }

    inline std::string read_text(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw ConfigError("cannot read " + path.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    /// x,u per cell of a uniform state.
    inline std::string uniform_csv(const UniformState& s)
    {
        std::string out = "x,u\n";
        for (long j = 0; j < s.cells(); ++j)
        {
            out += fmt(s.center(j)) + "," + fmt(s.averages[static_cast<std::size_t>(j)]) + "\n";
        }
        return out;
    }

    /// Reconstructed finest-level data of an adaptive snapshot.
    inline std::string fine_csv(const MRSnapshot& s, Interval domain)
    {
        std::string out  = "x,u\n";
        const double dx  = domain.length() / static_cast<double>(s.fine.size());
        for (std::size_t j = 0; j < s.fine.size(); ++j)
        {
            out += fmt(domain.lo + (static_cast<double>(j) + 0.5) * dx) + "," + fmt(s.fine[j]) + "\n";
        }
        return out;
    }

    /// level,index,x_lo,x_hi,u per real leaf.
    inline std::string leaf_csv(const MRSnapshot& s, Interval domain, long n0)
    {
        std::string out = "level,index,x_lo,x_hi,u\n";
        for (std::size_t k = 0; k < s.leaves.size(); ++k)
        {
            const NodeKey& key = s.leaves[k];
            const double w     = domain.length() / static_cast<double>(n0 << key.level);
            out += std::to_string(key.level) + "," + std::to_string(key.index) + "," + fmt(domain.lo + static_cast<double>(key.index) * w) + ","
                   + fmt(domain.lo + static_cast<double>(key.index + 1) * w) + "," + fmt(s.leaf_averages[k]) + "\n";
        }
        return out;
    }

    /// One JSON object per present node (real or virtual), coarse to fine.
    inline std::string tree_ndjson(const GradedTree& t)
    {
        std::string out;
        nlohmann::json head = {{"roots", t.roots()}, {"max_level", t.max_level()}, {"boundary", std::string(to_string(t.boundary()))}};
        out += head.dump() + "\n";
        for (int l = 0; l <= t.max_level(); ++l)
        {
            for (long i = 0; i < t.size(l); ++i)
            {
                const NodeKind k = t.kind(l, i);
                if (k == NodeKind::absent)
                {
                    continue;
                }
                nlohmann::json j = {{"level", l}, {"index", i}, {"kind", to_string(k)}, {"average", t.average(l, i)}};
                if (l > 0)
                {
                    j["detail"]    = t.detail(l, i);
                    j["deletable"] = t.deletable(l, i);
                }
                out += j.dump() + "\n";
            }
        }
        return out;
    }

    struct TreeSummary
    {
        long roots    = 1;
        int max_level = 0;
        std::size_t leaves   = 0;
        std::size_t internal = 0;
        std::size_t virtual_leaves = 0;
    };

    inline TreeSummary read_tree_ndjson(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        TreeSummary s;
        if (!std::getline(in, line))
        {
            throw ConfigError("empty tree dump");
        }
        const auto head = nlohmann::json::parse(line);
        s.roots         = head.at("roots").get<long>();
        s.max_level     = head.at("max_level").get<int>();
        while (std::getline(in, line))
        {
            if (line.empty())
            {
                continue;
            }
            const std::string kind = nlohmann::json::parse(line).at("kind").get<std::string>();
            if (kind == "leaf")
            {
                ++s.leaves;
            }
            else if (kind == "internal")
            {
                ++s.internal;
            }
            else
            {
                ++s.virtual_leaves;
            }
        }
        return s;
    }

    // metrics files hold no wall times, so identical runs give identical files
    inline std::string metrics_csv_header()
    {
        return "t_final,eta,L1,L2,Linf,leaves,N_L,fv_L1,fv_L2,fv_Linf\n";
    }

    inline std::string metrics_csv_row(const MetricsReport& r)
    {
        return fmt(r.t_final) + "," + fmt(r.eta) + "," + fmt(r.err.l1) + "," + fmt(r.err.l2) + "," + fmt(r.err.linf) + "," + std::to_string(r.leaf_count) + ","
               + std::to_string(r.n_l) + "," + fmt(r.err_fv.l1) + "," + fmt(r.err_fv.l2) + "," + fmt(r.err_fv.linf) + "\n";
    }

    inline nlohmann::json metrics_json(const std::vector<MetricsReport>& rows, const std::string& config_text)
    {
        nlohmann::json j;
        j["config"]      = config_text;
        j["fingerprint"] = std::to_string(std::hash<std::string>{}(config_text));
        j["rows"]        = nlohmann::json::array();
        for (const MetricsReport& r : rows)
        {
            j["rows"].push_back({{"t_final", r.t_final},
                                 {"eta", r.eta},
                                 {"leaves", r.leaf_count},
                                 {"N_L", r.n_l},
                                 {"mr", {{"L1", r.err.l1}, {"L2", r.err.l2}, {"Linf", r.err.linf}}},
                                 {"fv", {{"L1", r.err_fv.l1}, {"L2", r.err_fv.l2}, {"Linf", r.err_fv.linf}}}});
        }
        return j;
    }

    /// Speed-up and wall times per snapshot (cumulative).
    inline nlohmann::json comparison_timings_json(const std::vector<MetricsReport>& rows)
    {
        nlohmann::json j = nlohmann::json::array();
        for (const MetricsReport& r : rows)
        {
            j.push_back({{"t_final", r.t_final},
                         {"V", r.V},
                         {"V_loop", r.V_loop},
                         {"mr_total", r.mr_total},
                         {"mr_loop", r.mr_loop},
                         {"fv_total", r.fv_total},
                         {"fv_loop", r.fv_loop}});
        }
        return j;
    }
}
