// mrfv: uniform and adaptive multiresolution finite volume runs for the
// traffic and clarifier-thickener presets.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mrfv/mrfv.hpp"

namespace fs = std::filesystem;
using namespace mrfv;

namespace
{
    struct Overrides
    {
        std::string preset;
        std::string config_file;
        std::string out;
        std::string solver;
        std::optional<int> levels;
        std::optional<double> epsilon;
        std::optional<double> t_final;
        std::string snapshots;
    };

    void add_common(CLI::App* app, Overrides& o)
    {
        app->add_option("--preset", o.preset, "traffic-ex1, clarifier-ex2 or clarifier-ex3");
        app->add_option("--config", o.config_file, "key = value file applied over the preset");
        app->add_option("--out", o.out, "output directory");
        app->add_option("--epsilon", o.epsilon, "threshold tolerance");
        app->add_option("--t-final", o.t_final, "final time");
        app->add_option("--snapshots", o.snapshots, "comma separated output times");
    }

    RunConfig build_config(const Overrides& o)
    {
        std::string text = o.config_file.empty() ? std::string() : read_text(o.config_file);
        RunConfig c      = parse_config(text, o.preset.empty() ? "clarifier-ex2" : o.preset);
        if (!o.preset.empty() && o.preset != c.preset)
        {
            // command line preset wins; config lines still apply on top
            c = parse_config(text + "\npreset = " + o.preset + "\n");
        }
        if (!o.solver.empty())
        {
            c.solver = parse_solver(o.solver);
        }
        if (o.levels)
        {
            c.max_level = *o.levels;
        }
        if (o.epsilon)
        {
            apply_setting(c, "epsilon", fmt(*o.epsilon));
        }
        if (o.t_final)
        {
            c.t_final = *o.t_final;
            if (o.snapshots.empty())
            {
                c.snapshots = {c.t_final};
            }
        }
        if (!o.snapshots.empty())
        {
            c.snapshots = parse_double_list(o.snapshots);
        }
        if (!o.out.empty())
        {
            c.out_dir = o.out;
        }
        c.validate();
        return c;
    }

    std::string tag(std::size_t k)
    {
        return "s" + std::to_string(k);
    }

    template <class M>
    void write_mr(const M& m, const RunConfig& c, const MRRun& r, const fs::path& dir)
    {
        for (std::size_t k = 0; k < r.snapshots.size(); ++k)
        {
            const MRSnapshot& s = r.snapshots[k];
            write_text(dir / ("mr_fine_" + tag(k) + ".csv"), fine_csv(s, m.domain()));
            write_text(dir / ("mr_leaves_" + tag(k) + ".csv"), leaf_csv(s, m.domain(), c.n0));
            if (s.tree)
            {
                write_text(dir / ("mr_tree_" + tag(k) + ".ndjson"), tree_ndjson(*s.tree));
            }
        }
    }

    void write_uniform(const UniformRun& r, const fs::path& dir)
    {
        for (std::size_t k = 0; k < r.snapshots.size(); ++k)
        {
            write_text(dir / ("uniform_" + tag(k) + ".csv"), uniform_csv(r.snapshots[k]));
        }
    }

    std::string snapshot_index(const std::vector<double>& times)
    {
        std::string out = "snapshot,time\n";
        for (std::size_t k = 0; k < times.size(); ++k)
        {
            out += tag(k) + "," + fmt(times[k]) + "\n";
        }
        return out;
    }

    template <class M>
    void run(const M& m, const RunConfig& c)
    {
        const fs::path dir = c.out_dir;
        fs::create_directories(dir);
        write_text(dir / "config.txt", emit_config(c));
        write_text(dir / "snapshots.csv", snapshot_index(c.snapshots));
        nlohmann::json timing;
        if (c.solver == SolverKind::uniform)
        {
            const UniformRun r = run_uniform(m, c.n0, c.max_level, c.rule, c.t_final, c.snapshots);
            write_uniform(r, dir);
            timing = {{"fv_loop", r.wall_loop}, {"fv_total", r.wall_total}, {"steps", r.steps}, {"dt", r.dt}};
        }
        else if (c.solver == SolverKind::mr)
        {
            const MRConfig cfg = mr_config(m, c);
            const MRRun r      = run_mr(m, cfg, c.rule, c.t_final, c.snapshots, false, true);
            write_mr(m, c, r, dir);
            std::string eta = "t,leaves,eta\n";
            for (const MRSnapshot& s : r.snapshots)
            {
                eta += fmt(s.time) + "," + std::to_string(s.leaf_count) + "," + fmt(compression_rate(c.n0, c.max_level, s.leaf_count)) + "\n";
            }
            write_text(dir / "compression.csv", eta);
            timing = {{"mr_loop", r.wall_loop}, {"mr_total", r.wall_total}, {"steps", r.steps}, {"dt", r.dt}, {"epsilon", cfg.epsilon}};
        }
        else
        {
            const Comparison r = compare(m, c, true, true);
            write_uniform(r.fv, dir);
            write_mr(m, c, r.mr, dir);
            std::string csv = metrics_csv_header();
            for (const MetricsReport& row : r.rows)
            {
                csv += metrics_csv_row(row);
            }
            write_text(dir / "metrics.csv", csv);
            write_text(dir / "metrics.json", metrics_json(r.rows, emit_config(c)).dump(2) + "\n");
            timing = {{"rows", comparison_timings_json(r.rows)}, {"steps", r.mr.steps}, {"dt", r.mr.dt}, {"epsilon", r.epsilon}};
            for (const MetricsReport& row : r.rows)
            {
                std::cout << "t=" << fmt(row.t_final) << " eta=" << row.eta << " V=" << row.V << " L1=" << row.err.l1 << "\n";
            }
        }
        if (!timing.is_null())
        {
            write_text(dir / "timings.json", timing.dump(2) + "\n");
        }
        std::cout << "wrote " << dir.string() << "\n";
    }

    template <class M>
    void convergence_cmd(const M& m, const RunConfig& c)
    {
        if (c.levels.size() < 2)
        {
            throw ConfigError("convergence needs at least two levels (--levels 6,7,8,9)");
        }
        const ConvergenceResult r = convergence(m, c);
        const fs::path dir        = c.out_dir;
        fs::create_directories(dir);
        std::string csv = "level,epsilon,fv_L1,mr_L1\n";
        for (std::size_t k = 0; k < r.levels.size(); ++k)
        {
            csv += std::to_string(r.levels[k]) + "," + fmt(r.epsilons[k]) + "," + fmt(r.fv_l1[k]) + "," + fmt(r.mr_l1[k]) + "\n";
        }
        write_text(dir / "convergence.csv", csv);
        const nlohmann::json j = {{"fv_slope", r.fv.slope},         {"mr_slope", r.mr.slope},           {"slope_difference", r.mr.slope - r.fv.slope},
                                  {"fv_degenerate", r.fv.degenerate}, {"mr_degenerate", r.mr.degenerate}, {"config", emit_config(c)}};
        write_text(dir / "slopes.json", j.dump(2) + "\n");
        std::cout << "FV slope " << r.fv.slope << ", MR slope " << r.mr.slope << "\n";
    }

    template <class F>
    void with_model(const RunConfig& c, F&& f)
    {
        std::visit([&](const auto& m) { f(m); }, make_model(c.preset, c.params));
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive multiresolution finite volume solver"};
    app.require_subcommand(1);

    Overrides run_o;
    auto* run_cmd = app.add_subcommand("run", "run one solver and write snapshot files");
    add_common(run_cmd, run_o);
    run_cmd->add_option("--solver", run_o.solver, "uniform, mr or compare");
    run_cmd->add_option("--levels", run_o.levels, "finest level L");

    Overrides cmp_o;
    auto* cmp_cmd = app.add_subcommand("compare", "uniform and adaptive runs with metrics against the fine reference");
    add_common(cmp_cmd, cmp_o);
    cmp_cmd->add_option("--levels", cmp_o.levels, "finest level L");

    Overrides conv_o;
    std::string conv_levels;
    std::optional<int> conv_ref;
    auto* conv_cmd = app.add_subcommand("convergence", "L1 errors and slopes over several levels");
    add_common(conv_cmd, conv_o);
    conv_cmd->add_option("--levels", conv_levels, "comma separated levels");
    conv_cmd->add_option("--reference-level", conv_ref, "level of the reference solution");

    auto* presets_cmd = app.add_subcommand("presets", "list or describe presets");
    presets_cmd->require_subcommand(1);
    presets_cmd->add_subcommand("list", "preset names");
    std::string describe_name;
    auto* describe = presets_cmd->add_subcommand("describe", "defaults and parameters of a preset");
    describe->add_option("name", describe_name)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (run_cmd->parsed())
        {
            const RunConfig c = build_config(run_o);
            with_model(c, [&](const auto& m) { run(m, c); });
        }
        else if (cmp_cmd->parsed())
        {
            cmp_o.solver      = "compare";
            const RunConfig c = build_config(cmp_o);
            with_model(c, [&](const auto& m) { run(m, c); });
        }
        else if (conv_cmd->parsed())
        {
            RunConfig c = build_config(conv_o);
            if (!conv_levels.empty())
            {
                c.levels = parse_int_list(conv_levels);
            }
            if (conv_ref)
            {
                c.reference_level = *conv_ref;
            }
            if (!conv_o.t_final && !c.snapshots.empty())
            {
                c.snapshots = {c.t_final};
            }
            c.validate();
            with_model(c, [&](const auto& m) { convergence_cmd(m, c); });
        }
        else if (presets_cmd->parsed())
        {
            if (describe->parsed())
            {
                const Preset p = preset(describe_name);
                std::cout << p.name << ": " << p.description << "\n";
                std::cout << emit_config(config_from_preset(describe_name));
                with_model(config_from_preset(describe_name), [](const auto& m) {
                    std::cout << "# model parameters\n";
                    using P = std::decay_t<decltype(m.params())>;
                    P::for_each_field([&](const char* k, double P::*f) { std::cout << "param." << k << " = " << fmt(m.params().*f) << "\n"; });
                });
            }
            else
            {
                for (const std::string& n : preset_names())
                {
                    std::cout << n << "  " << preset(n).description << "\n";
                }
            }
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const NumericalError& e)
    {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
