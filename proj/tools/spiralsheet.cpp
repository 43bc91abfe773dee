#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_family_options(CLI::App* sub, spiralsheet::cli::RunConfig& cfg) {
    sub->add_option("--a", cfg.a, "spiral tightness a > 0")->required()->check(CLI::PositiveNumber);
    sub->add_option("--mu", cfg.mu, "self-similarity exponent (solved when omitted)");
    sub->add_option("--g", cfg.g, "circulation strength for every spiral");
    sub->add_option("--thetas", cfg.thetas, "base angles, comma separated, starting at 0")->delimiter(',');
    sub->add_option("--gs", cfg.gs, "per-spiral strengths, comma separated")->delimiter(',');
    sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "seed for random probe placement");
    sub->add_option("--tol", cfg.tol, "residual tolerance for solve");
}

void add_frame_option(CLI::App* sub, spiralsheet::cli::RunConfig& cfg) {
    sub->add_option("--frame", cfg.frame, "spiral or strip")->check(CLI::IsMember({"spiral", "strip"}));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace spiralsheet::cli;
    RunConfig cfg;
    std::vector<double> bounds;
    std::vector<int> res;
    std::vector<double> at;
    std::string points;

    CLI::App app{"Logarithmic spiral vortex sheets: solve, evaluate, export and verify"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "solve the matching conditions for (mu, g)");
    add_family_options(solve, cfg);

    auto* eval = app.add_subcommand("eval", "evaluate the velocity at one point");
    add_family_options(eval, cfg);
    add_frame_option(eval, cfg);
    eval->add_option("--at", at, "point x,y")->delimiter(',')->expected(2)->required();

    auto* grid = app.add_subcommand("grid", "sample the velocity on a rectangular grid");
    add_family_options(grid, cfg);
    add_frame_option(grid, cfg);
    grid->add_option("--bounds", bounds, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
    grid->add_option("--res", res, "NX,NY")->delimiter(',')->expected(2);

    auto* verify = app.add_subcommand("verify", "run the residual suite and write a JSON report");
    add_family_options(verify, cfg);

    auto* advect = app.add_subcommand("advect", "RK4 tracer advection in the self-similar flow");
    add_family_options(advect, cfg);
    advect->add_option("--points", points, "initial points x,y;x,y")->required();
    advect->add_option("--t0", cfg.t0, "start time > 0");
    advect->add_option("--t1", cfg.t1, "end time");
    advect->add_option("--dt", cfg.dt, "time step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (bounds.size() == 4) {
        cfg.bounds = {bounds[0], bounds[1], bounds[2], bounds[3]};
    }
    if (res.size() == 2) {
        cfg.res = {res[0], res[1]};
    }
    if (at.size() == 2) {
        cfg.at = std::array<double, 2>{at[0], at[1]};
    }
    if (!points.empty()) {
        try {
            cfg.points = parse_points(points);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return usage;
        }
    }

    const CommandResult result = run(cfg);
    if (!result.message.empty()) {
        std::cerr << result.message << (result.message.back() == '\n' ? "" : "\n");
    }
    if (!result.output.empty()) {
        if (cfg.out.empty()) {
            std::cout << result.output;
        } else {
            try {
                write_output(cfg.out, result.output);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return runtime;
            }
        }
    }
    return result.exit_code;
}
