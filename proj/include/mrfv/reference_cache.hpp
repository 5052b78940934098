#pragma once

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fv.hpp"
#include "io.hpp"

namespace mrfv
{
    /// Text identifying a reference run; stored in the cache file and
    /// compared on load.
    template <FluxModel M>
    std::string reference_key(const M& m, const std::string& params_text, long n0, int level, StepRule rule, const std::vector<double>& times)
    {
        std::string key = "model=" + m.name() + ";" + params_text + ";n0=" + std::to_string(n0) + ";level=" + std::to_string(level)
                          + ";rule=" + to_string(rule.kind) + ":" + fmt(rule.value) + ";times=";
        for (double t : times)
        {
            key += fmt(t) + ",";
        }
        return key;
    }

    /// Directory from MRFV_CACHE_DIR, else ./mrfv_cache.
    inline std::filesystem::path default_cache_dir()
    {
        const char* env = std::getenv("MRFV_CACHE_DIR");
        return env && *env ? std::filesystem::path(env) : std::filesystem::path("mrfv_cache");
    }

    namespace detail
    {
        inline std::string encode_snapshots(const std::string& key, const std::vector<UniformState>& snaps)
        {
            std::string out = key + "\n" + std::to_string(snaps.size()) + "\n";
            for (const UniformState& s : snaps)
            {
                out += std::to_string(s.level) + " " + std::to_string(s.n0) + " " + fmt(s.domain.lo) + " " + fmt(s.domain.hi) + " " + fmt(s.dx)
                       + " " + fmt(s.time) + " " + fmt(s.lambda) + " " + fmt(s.mu) + "\n";
                for (double u : s.averages)
                {
                    out += fmt(u) + "\n";
                }
            }
            return out;
        }

        inline bool decode_snapshots(const std::string& text, const std::string& key, std::vector<UniformState>& snaps)
        {
            std::istringstream in(text);
            std::string line;
            if (!std::getline(in, line) || line != key)
            {
                return false;
            }
            std::size_t count = 0;
            if (!(in >> count))
            {
                return false;
            }
            snaps.clear();
            for (std::size_t k = 0; k < count; ++k)
            {
                UniformState s;
                std::string lo, hi, dx, t, lam, mu;
                if (!(in >> s.level >> s.n0 >> lo >> hi >> dx >> t >> lam >> mu))
                {
                    return false;
                }
                s.domain = {parse_double(lo), parse_double(hi)};
                s.dx     = parse_double(dx);
                s.time   = parse_double(t);
                s.lambda = parse_double(lam);
                s.mu     = parse_double(mu);
                s.averages.resize(static_cast<std::size_t>(s.cells()));
                std::string v;
                for (double& u : s.averages)
                {
                    if (!(in >> v))
                    {
                        return false;
                    }
                    u = parse_double(v);
                }
                snaps.push_back(std::move(s));
            }
            return true;
        }
    }

    /// Uniform run at `level`, loaded from the cache directory when a file
    /// with the same key exists, computed and stored otherwise.
    template <FluxModel M>
    std::vector<UniformState> cached_reference(const M& m, const std::string& params_text, long n0, int level, StepRule rule,
                                               const std::vector<double>& times, const std::filesystem::path& dir = default_cache_dir())
    {
        const std::string key = reference_key(m, params_text, n0, level, rule, times);
        const std::filesystem::path file = dir / ("ref_" + std::to_string(std::hash<std::string>{}(key)) + ".txt");
        std::vector<UniformState> snaps;
        if (std::filesystem::exists(file) && detail::decode_snapshots(read_text(file), key, snaps))
        {
            return snaps;
        }
        const double t_final = times.empty() ? 0.0 : times.back();
        snaps                = run_uniform(m, n0, level, rule, t_final, times).snapshots;
        write_text(file, detail::encode_snapshots(key, snaps));
        return snaps;
    }
}
