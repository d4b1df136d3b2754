#include "rdesplit/commands.hpp"

#include "rdesplit/config.hpp"
#include "rdesplit/errors.hpp"
#include "rdesplit/format.hpp"
#include "rdesplit/reports.hpp"

#include <fstream>
#include <ostream>
#include <vector>

namespace rdesplit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& value) { open_output(path) << value.dump(2) << "\n"; }

std::vector<double> state_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

struct Context {
    ProblemConfig config;
    fs::path base_dir;
    const RunOptions& options;
    std::ostream& log;

    /// Seeds a multi-seed experiment runs over.
    std::vector<std::uint64_t> seeds() const {
        if (options.seed) return {*options.seed};
        if (!driver_is_seeded(config)) return {config.driver.seed};
        return config.experiment.seeds;
    }

    Problem problem(std::optional<std::uint64_t> seed = std::nullopt) const {
        return build_problem(config, base_dir, seed ? seed : options.seed);
    }
};

int cmd_solve(const Context& ctx) {
    const Problem problem = ctx.problem();
    const Grid grid(problem.T, ctx.config.N);
    const auto traj = solve_split(problem.driver, problem.field, problem.z, problem.y0, grid);
    {
        auto out = open_output(ctx.options.out / "trajectory.csv");
        write_trajectory_csv(out, traj);
    }
    double max_abs = 0.0;
    for (const auto& u : traj.u()) max_abs = std::max(max_abs, max_norm(u));
    json summary = {{"command", "solve"},
                    {"N", grid.steps()},
                    {"h", grid.step_size()},
                    {"T", grid.final_time()},
                    {"field", problem.field.name()},
                    {"z", problem.z.name()},
                    {"driver", ctx.config.driver.kind},
                    {"final_state", state_list(traj.u().back())},
                    {"max_abs_state", max_abs}};
    if (ctx.options.oracle) {
        const auto& linear = dynamic_cast<const PiecewiseLinearDriver&>(*problem.driver);
        const auto reference = ode_reference(linear, problem.field, problem.y0, grid, 64);
        summary["oracle_max_deviation"] = max_grid_difference(traj.u(), reference);
        summary["oracle_substeps"] = 64;
    }
    write_json(ctx.options.out / "summary.json", summary);
    ctx.log << "solve: N=" << grid.steps() << " final=" << traj.u().back().transpose() << "\n";
    return kExitOk;
}

int cmd_rates(const Context& ctx) {
    const auto& kind = ctx.options.rate_kind;
    require(kind == "sup" || kind == "holder" || kind == "rational", "rates: kind must be sup, holder or rational");
    const auto& e = ctx.config.experiment;
    const auto seeds = ctx.seeds();
    std::vector<RateReport> reports;
    for (auto seed : seeds) {
        const Problem problem = ctx.problem(seed);
        RateReport report = kind == "sup"      ? dyadic_sup_rate(problem, e.base_N, e.levels)
                            : kind == "holder" ? holder_rate(problem, e.beta, e.base_N, e.levels)
                                               : rational_rate(problem, e.q_num, e.q_den, e.base_N, e.levels);
        auto out = open_output(ctx.options.out / ("rates_" + kind + "_seed" + std::to_string(seed) + ".csv"));
        write_rate_csv(out, report);
        ctx.log << "rates(" << kind << ") seed " << seed << ": slope " << slope_json(report.slope).dump()
                << " target " << report.target << "\n";
        reports.push_back(std::move(report));
    }
    json summary = rate_summary_json(reports, seeds);
    summary["command"] = "rates";
    summary["kind"] = kind;
    if (kind == "holder") {
        json sups = json::array();
        for (const auto& r : reports) sups.push_back(r.sup_diffs);
        summary["sup_diffs"] = sups;
    }
    if (kind == "rational") {
        summary["q"] = std::to_string(e.q_num) + "/" + std::to_string(e.q_den);
        json common = json::array();
        for (const auto& r : reports) common.push_back(r.common_diffs);
        summary["common_time_diffs"] = common;
    }
    write_json(ctx.options.out / "summary.json", summary);
    return kExitOk;
}

int cmd_check_z(const Context& ctx) {
    const Problem problem = ctx.problem();
    const auto& e = ctx.config.experiment;
    const Grid grid(problem.T, e.check_N);
    const int n = problem.field.state_dim();
    const auto xs = sample_box(n, e.box, static_cast<std::size_t>(e.samples), ctx.config.field.seed);
    const auto ys = sample_box(n, e.box, static_cast<std::size_t>(e.samples), ctx.config.field.seed + 1);
    std::vector<std::pair<Vector, Vector>> pairs;
    for (std::size_t i = 0; i < xs.size(); ++i) pairs.emplace_back(xs[i], ys[i]);

    CheckReport bound = check_z_bound(problem.z, xs, grid, problem.alpha());
    CheckReport lipschitz = check_z_lipschitz(problem.z, pairs, grid, problem.alpha(), problem.gamma());
    CheckReport cocycle =
        check_z_cocycle(problem.z, problem.field, *problem.driver, xs, grid_triples(grid), problem.alpha());
    for (auto* r : {&bound, &lipschitz, &cocycle}) {
        r->box_radius = e.box;
        ctx.log << "check-z " << r->condition << ": max ratio " << r->max_ratio << " over " << r->samples
                << " samples\n";
    }
    write_json(ctx.options.out / "check_z_st.json", to_json(bound));
    write_json(ctx.options.out / "check_z_xy.json", to_json(lipschitz));
    write_json(ctx.options.out / "check_z_sut.json", to_json(cocycle));
    return kExitOk;
}

int cmd_davie(const Context& ctx) {
    const Problem problem = ctx.problem();
    const Grid grid(problem.T, ctx.config.N);
    const auto traj = solve_split(problem.driver, problem.field, problem.z, problem.y0, grid);
    const DavieReport report =
        davie_defect(traj, problem.field, problem.z, *problem.driver, problem.gamma(), problem.alpha());
    json out = to_json(report);
    out["gamma"] = problem.gamma();
    out["alpha"] = problem.alpha();
    out["N"] = grid.steps();
    write_json(ctx.options.out / "davie.json", out);
    ctx.log << "davie: N=" << grid.steps() << " max ratio " << report.max_ratio << " at (" << report.k << ", "
            << report.m << ")\n";
    return kExitOk;
}

int cmd_compare_schemes(const Context& ctx) {
    const Problem problem = ctx.problem();
    const auto& e = ctx.config.experiment;
    const SchemeGapReport report = compare_schemes(problem, e.base_N, e.levels);
    {
        auto out = open_output(ctx.options.out / "scheme_gap.csv");
        out << "level,N,gap\n";
        for (std::size_t k = 0; k < report.gaps.size(); ++k)
            out << k << "," << report.levels[k] << "," << format_double(report.gaps[k]) << "\n";
    }
    write_json(ctx.options.out / "summary.json",
               {{"command", "compare-schemes"}, {"levels", report.levels}, {"gaps", report.gaps},
                {"slope", slope_json(report.slope)}});
    ctx.log << "compare-schemes: slope " << slope_json(report.slope).dump() << "\n";
    return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const RunOptions& options, std::ostream& log, std::ostream& err) {
    try {
        const ProblemConfig config = load_config(options.config);
        validate_config(config);
        require(!options.out.empty(), "an output directory is required");
        fs::create_directories(options.out);
        {
            auto copy = open_output(options.out / "config.ini");
            copy << emit_config(config);
        }
        const Context ctx{config, options.config.parent_path(), options, log};
        if (command == "solve") return cmd_solve(ctx);
        if (command == "rates") return cmd_rates(ctx);
        if (command == "check-z") return cmd_check_z(ctx);
        if (command == "davie") return cmd_davie(ctx);
        if (command == "compare-schemes") return cmd_compare_schemes(ctx);
        throw InvalidArgument("unknown command '" + command + "'");
    } catch (const NumericFailure& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace rdesplit
