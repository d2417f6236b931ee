#include "gridflex/dc_flex.hpp"
#include "gridflex/error.hpp"
#include "gridflex/grid_model.hpp"
#include "gridflex/results.hpp"
#include "gridflex/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

// One line per error so callers can parse stderr.
int fail(int code, std::string_view kind, std::string message)
{
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << "error: " << kind << ": " << message << '\n';
    return code;
}

std::optional<std::string> read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_run(const fs::path& config_path, const fs::path& out, std::optional<std::uint64_t> seed, std::size_t jobs)
{
    const auto text = read_text(config_path);
    if (!text) {
        return fail(kUsage, "config", "cannot read '" + config_path.string() + "'");
    }
    try {
        gridflex::parse_run_config(*text, config_path.parent_path());
    } catch (const gridflex::Error& e) {
        return fail(kUsage, "config", e.what());
    }
    try {
        const auto art = gridflex::execute_run(out, *text, config_path.parent_path(), seed, jobs);
        std::cout << "run_id=" << art.run_id << " dir=" << art.dir.string()
                  << " cells_ok=" << art.output.cells.size() << " cells_failed=" << art.output.failures.size()
                  << '\n';
        return art.output.cells.empty() && !art.output.failures.empty() ? kRuntime : kOk;
    } catch (const std::exception& e) {
        return fail(kRuntime, "run", e.what());
    }
}

int cmd_report(const fs::path& in, const std::string& figure)
{
    const auto kind = gridflex::parse_figure(figure);
    if (!kind) {
        return fail(kUsage, "report", "unknown figure kind '" + figure + "'");
    }
    try {
        std::cout << gridflex::write_figure(in, *kind).string() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        return fail(kRuntime, "report", e.what());
    }
}

int cmd_gen_grid(std::size_t buses, std::uint64_t seed, const fs::path& out)
{
    gridflex::GridTopology grid;
    try {
        grid = gridflex::generate_synthetic_grid(gridflex::scaled_synthetic_spec(buses), seed);
    } catch (const gridflex::Error& e) {
        return fail(kUsage, "gen-grid", e.what());
    }
    std::ofstream f(out);
    if (!f) {
        return fail(kRuntime, "gen-grid", "cannot write '" + out.string() + "'");
    }
    gridflex::write_grid(f, grid);
    return f ? kOk : fail(kRuntime, "gen-grid", "write to '" + out.string() + "' failed");
}

bool looks_like_plans(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') {
            continue;
        }
        return line.compare(pos, 5, "dc_id") == 0;
    }
    return false;
}

int cmd_validate(const fs::path& path, const std::optional<fs::path>& config_path, const std::string& step_text)
{
    const auto text = read_text(path);
    if (!text) {
        return fail(kRuntime, "validate", "cannot read '" + path.string() + "'");
    }
    std::istringstream in(*text);
    if (!looks_like_plans(*text)) {
        try {
            const auto grid = gridflex::parse_grid(in, path.string());
            if (!grid.connected()) {
                return fail(kUsage, "grid", path.string() + ": network is not connected");
            }
            std::cout << "ok: grid with " << grid.buses.size() << " buses, " << grid.lines.size() << " lines, "
                      << grid.generators.size() << " generators\n";
            return kOk;
        } catch (const gridflex::Error& e) {
            return fail(kUsage, "grid", e.what());
        }
    }

    gridflex::PlacementSpec placement;
    std::optional<double> step = gridflex::kDefaultDpStep;
    if (config_path) {
        try {
            const auto cfg = gridflex::load_run_config(*config_path);
            placement = cfg.datacenters;
            if (placement.step_size) {
                step = placement.step_size;
            }
        } catch (const gridflex::Error& e) {
            return fail(kUsage, "config", e.what());
        }
    }
    if (!step_text.empty()) {
        if (step_text == "inf") {
            step.reset();
        } else {
            try {
                std::size_t used = 0;
                step = std::stod(step_text, &used);
                if (used != step_text.size() || !(*step > 0.0)) {
                    throw std::invalid_argument(step_text);
                }
            } catch (const std::exception&) {
                return fail(kUsage, "validate", "--step must be a positive number or 'inf', got '" + step_text + "'");
            }
        }
    }
    gridflex::DatacenterConfig dc;
    dc.cap_max = placement.cap_max;
    dc.cap_min = placement.range_lo * placement.cap_max;
    dc.avg_cap = placement.utilization * placement.cap_max;
    dc.step_size = step;

    try {
        const auto plans = gridflex::parse_plans(in, path.string());
        std::size_t bad = 0;
        for (const auto& plan : plans) {
            dc.id = plan.dc_id;
            for (const auto& v : gridflex::validate_plan(plan, dc).violations) {
                ++bad;
                fail(kUsage, "plan", v.message);
            }
        }
        if (bad > 0) {
            return kUsage;
        }
        std::cout << "ok: " << plans.size() << " plans\n";
        return kOk;
    } catch (const gridflex::Error& e) {
        return fail(kUsage, "plan", e.what());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Datacenter flexibility and grid dispatch co-simulation"};
    app.require_subcommand(1);

    fs::path config_path;
    fs::path out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    auto* run = app.add_subcommand("run", "Run a configured sweep and write a results directory");
    run->add_option("--config", config_path, "JSON run configuration")->required();
    run->add_option("--out", out_dir, "Directory that receives the run directory")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    fs::path results_dir;
    std::string figure;
    auto* report = app.add_subcommand("report", "Write plot data for a figure family");
    report->add_option("--in", results_dir, "Results directory of a run")->required();
    report->add_option("--figure", figure, "carbon, quota, planlen, price or variation")->required();

    std::size_t buses = 14;
    std::uint64_t grid_seed = 1;
    fs::path grid_out;
    auto* gen = app.add_subcommand("gen-grid", "Generate a synthetic grid file");
    gen->add_option("--buses", buses, "Number of buses")->required();
    gen->add_option("--seed", grid_seed, "Generator seed")->required();
    gen->add_option("--out", grid_out, "Output grid file")->required();

    fs::path check_path;
    std::optional<fs::path> check_config;
    std::string step_text;
    auto* validate = app.add_subcommand("validate", "Validate a grid file or a capacity plan CSV");
    validate->add_option("path", check_path, "Grid file or plan CSV")->required();
    validate->add_option("--config", check_config, "Run configuration supplying datacenter parameters");
    validate->add_option("--step", step_text, "Step size limit for plans in MW/h, or 'inf'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, "usage", e.what());
    }

    if (*run) {
        return cmd_run(config_path, out_dir, seed, jobs);
    }
    if (*report) {
        return cmd_report(results_dir, figure);
    }
    if (*gen) {
        return cmd_gen_grid(buses, grid_seed, grid_out);
    }
    return cmd_validate(check_path, check_config, step_text);
}
