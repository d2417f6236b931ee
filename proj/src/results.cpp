#include "gridflex/results.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace gridflex {

std::string content_hash(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << text;
}

}  // namespace

RunArtifacts execute_run(const std::filesystem::path& out_root, const std::string& config_text,
                         const std::filesystem::path& config_dir, std::optional<std::uint64_t> seed_override,
                         std::size_t jobs)
{
    auto config = parse_run_config(config_text, config_dir);
    if (seed_override) {
        config.seed = *seed_override;
    }
    RunArtifacts art;
    const auto config_hash = content_hash(config_text);
    art.run_id = "run-" + content_hash(config_text + "\nseed=" + std::to_string(config.seed)).substr(0, 12);
    art.dir = out_root / art.run_id;
    std::filesystem::remove_all(art.dir);
    std::filesystem::create_directories(art.dir / "cells");

    SweepOptions options;
    options.jobs = jobs;
    options.cell_dir = art.dir / "cells";
    art.output = run_sweep(config, options);

    {
        std::ostringstream agg;
        write_aggregate_csv(agg, config, art.output.aggregate);
        write_text(art.dir / "aggregate.csv", agg.str());
    }
    {
        std::ostringstream fail;
        fail << "cell,message\n";
        for (const auto& f : art.output.failures) {
            std::string msg = f.message;
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            std::replace(msg.begin(), msg.end(), '"', '\'');
            fail << f.key.str() << ",\"" << msg << "\"\n";
        }
        write_text(art.dir / "failures.csv", fail.str());
    }

    nlohmann::json manifest;
    manifest["run_id"] = art.run_id;
    manifest["artifact_version"] = std::string(kArtifactVersion);
    manifest["config_hash"] = config_hash;
    manifest["seed"] = config.seed;
    manifest["stddev"] = "population, across wind scenarios";
    manifest["cells_ok"] = art.output.cells.size();
    manifest["cells_failed"] = art.output.failures.size();
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(art.dir)) {
        if (entry.is_regular_file()) {
            files.push_back(std::filesystem::relative(entry.path(), art.dir).generic_string());
        }
    }
    std::sort(files.begin(), files.end());
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& f : files) {
        hashes[f] = content_hash(read_file(art.dir / f));
    }
    manifest["files"] = hashes;
    write_text(art.dir / "manifest.json", manifest.dump(2) + "\n");
    return art;
}

std::string_view to_string(FigureKind kind) noexcept
{
    switch (kind) {
    case FigureKind::Carbon: return "carbon";
    case FigureKind::Quota: return "quota";
    case FigureKind::PlanLength: return "planlen";
    case FigureKind::Price: return "price";
    case FigureKind::Variation: return "variation";
    }
    return "unknown";
}

std::optional<FigureKind> parse_figure(std::string_view text) noexcept
{
    for (auto k : {FigureKind::Carbon, FigureKind::Quota, FigureKind::PlanLength, FigureKind::Price,
                   FigureKind::Variation}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

namespace {

using Record = std::map<std::string, std::string>;

std::vector<Record> read_aggregate(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> header;
    std::vector<Record> rows;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) {
            continue;
        }
        auto fields = text::split_fields(line);
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size()) {
            throw Error(path.string() + ": malformed row");
        }
        Record r;
        for (std::size_t k = 0; k < header.size(); ++k) {
            r[header[k]] = fields[k];
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

double num(const Record& r, const std::string& key)
{
    auto it = r.find(key);
    if (it == r.end()) {
        throw Error("aggregate.csv lacks column '" + key + "'");
    }
    if (it->second == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    auto v = text::parse_double(it->second);
    if (!v) {
        throw Error("aggregate.csv column '" + key + "' holds '" + it->second + "'");
    }
    return *v;
}

}  // namespace

std::vector<FigureRow> figure_data(const std::filesystem::path& results_dir, FigureKind kind)
{
    if (!std::filesystem::exists(results_dir / "manifest.json")) {
        throw Error("'" + results_dir.string() + "' holds no manifest.json; not a results directory");
    }
    const auto rows = read_aggregate(results_dir / "aggregate.csv");
    std::vector<FigureRow> out;
    for (const auto& r : rows) {
        const std::string& policy = r.at("policy");
        const std::string& k = r.at("kind");
        const double pen = num(r, "penetration");
        const std::string pen_tag = "p" + r.at("penetration");
        switch (kind) {
        case FigureKind::Carbon:
            if (k != "baseline") {
                out.push_back({pen, policy, num(r, "dc_carbon_reduction_pct_mean"),
                               num(r, "dc_carbon_reduction_pct_std")});
            }
            break;
        case FigureKind::Quota:
            if (k == "coordinated") {
                out.push_back({num(r, "quota"),
                               r.at("metric") + "(" + r.at("variant") + ")-n" + r.at("coordinators") + "-" + pen_tag,
                               num(r, "dc_carbon_reduction_pct_mean"), num(r, "dc_carbon_reduction_pct_std")});
            }
            break;
        case FigureKind::PlanLength:
            if (k == "planshare") {
                out.push_back({num(r, "plan_length"), "PlanShare-" + pen_tag, num(r, "dc_carbon_reduction_pct_mean"),
                               num(r, "dc_carbon_reduction_pct_std")});
            }
            break;
        case FigureKind::Price:
            if (k != "baseline") {
                out.push_back({pen, policy + "/dc", num(r, "dc_price_change_pct_mean"),
                               num(r, "dc_price_change_pct_std")});
                out.push_back({pen, policy + "/nondc", num(r, "nondc_price_change_pct_mean"),
                               num(r, "nondc_price_change_pct_std")});
            }
            break;
        case FigureKind::Variation:
            if (k != "baseline") {
                out.push_back({num(r, "capacity_variation_mw_mean"), policy + "-" + pen_tag,
                               num(r, "dc_carbon_reduction_pct_mean"), num(r, "dc_carbon_reduction_pct_std")});
            }
            break;
        }
    }
    if (out.empty()) {
        throw Error("no results in '" + results_dir.string() + "' for figure '" + std::string(to_string(kind)) + "'");
    }
    return out;
}

std::filesystem::path write_figure(const std::filesystem::path& results_dir, FigureKind kind)
{
    const auto rows = figure_data(results_dir, kind);
    std::ostringstream out;
    out << "x,series,mean,stddev\n";
    for (const auto& r : rows) {
        out << (std::isfinite(r.x) ? text::fmt(r.x) : "inf") << ',' << r.series << ',' << text::fmt(r.mean) << ','
            << text::fmt(r.stddev) << '\n';
    }
    const auto path = results_dir / ("figure_" + std::string(to_string(kind)) + ".csv");
    write_text(path, out.str());
    return path;
}

}  // namespace gridflex
