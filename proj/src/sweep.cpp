#include "gridflex/simulation.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace gridflex {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) noexcept
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master);
    for (auto p : parts) {
        h = mix(h ^ mix(p));
    }
    return h;
}

// ---------------------------------------------------------------------------
// configuration

namespace {

class Fields {
public:
    Fields(const json& object, std::string path)
    : object_(object)
    , path_(std::move(path))
    {
        if (!object_.is_object()) {
            fail(path_, "must be an object");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what)
    {
        throw ValidationError(path + ": " + what);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (auto* v = get(key)) {
            if (!v->is_number()) {
                fail(at(key), "must be a number");
            }
            out = v->get<double>();
        }
    }

    void count(const std::string& key, std::size_t& out)
    {
        if (auto* v = get(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                fail(at(key), "must be a nonnegative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void seed(const std::string& key, std::optional<std::uint64_t>& out)
    {
        if (auto* v = get(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                fail(at(key), "must be a nonnegative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out)
    {
        if (auto* v = get(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                fail(at(key), "must be a number or null");
            }
        }
    }

    std::string string(const std::string& key)
    {
        auto* v = get(key);
        if (!v) {
            return {};
        }
        if (!v->is_string()) {
            fail(at(key), "must be a string");
        }
        return v->get<std::string>();
    }

    /// Unknown keys are errors.
    void finish() const
    {
        for (auto it = object_.begin(); it != object_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                fail(at(it.key()), "unknown key");
            }
        }
    }

private:
    const json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

void parse_synthetic(const json& j, SyntheticGridSpec& s, const std::string& path)
{
    Fields f(j, path);
    f.count("buses", s.buses);
    f.count("generators", s.generators);
    f.count("wind_farms", s.wind_farms);
    f.count("loads", s.loads);
    f.count("imports", s.imports);
    f.count("renewables", s.renewables);
    f.count("extra_lines", s.extra_lines);
    f.number("thermal_capacity", s.thermal_capacity);
    f.number("nuclear_share", s.nuclear_share);
    f.number("coal_share", s.coal_share);
    f.number("oil_share", s.oil_share);
    f.number("dual_fuel_share", s.dual_fuel_share);
    f.number("nuclear_cost", s.nuclear_cost);
    f.number("coal_cost", s.coal_cost);
    f.number("gas_cost", s.gas_cost);
    f.number("oil_cost", s.oil_cost);
    f.number("dual_fuel_cost", s.dual_fuel_cost);
    f.number("cost_spread", s.cost_spread);
    f.number("nuclear_ramp", s.nuclear_ramp);
    f.number("coal_ramp", s.coal_ramp);
    f.number("gas_ramp", s.gas_ramp);
    f.number("oil_ramp", s.oil_ramp);
    f.number("dual_fuel_ramp", s.dual_fuel_ramp);
    f.number("import_penalty", s.import_penalty);
    f.number("wind_penalty", s.wind_penalty);
    f.number("renewable_penalty", s.renewable_penalty);
    f.number("shed_penalty", s.shed_penalty);
    f.number("line_limit_min", s.line_limit_min);
    f.number("line_limit_max", s.line_limit_max);
    f.finish();
}

PolicySpec parse_policy(const json& j, const std::string& path)
{
    Fields f(j, path);
    PolicySpec p;
    const auto kind = f.string("kind");
    auto parsed = parse_policy_kind(kind);
    if (!parsed) {
        Fields::fail(f.at("kind"), "expected baseline, online, coordinated or planshare, got '" + kind + "'");
    }
    p.kind = *parsed;
    if (auto* v = f.get("metric")) {
        auto m = v->is_string() ? parse_metric(v->get<std::string>()) : std::nullopt;
        if (!m) {
            Fields::fail(f.at("metric"), "expected ACI, Price or LMPrice");
        }
        p.metric = *m;
    }
    if (auto* v = f.get("variant")) {
        auto var = v->is_string() ? parse_variant(v->get<std::string>()) : std::nullopt;
        if (!var) {
            Fields::fail(f.at("variant"), "expected Avg, Hourly or 6hr+Avg");
        }
        p.variant = *var;
    }
    f.count("horizon_hours", p.horizon_hours);
    f.optional_number("step_size", p.step_size);
    if (auto* v = f.get("quota")) {
        if (v->is_null()) {
            p.quota = kUnlimitedQuota;
        } else if (v->is_number()) {
            p.quota = v->get<double>();
        } else {
            Fields::fail(f.at("quota"), "must be a number or null (unlimited)");
        }
    }
    f.count("coordinators", p.coordinators);
    f.count("plan_length", p.plan_length);
    p.name = f.string("name");
    f.finish();
    return p;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    Fields top(root, "");

    if (auto* g = top.get("grid")) {
        Fields f(*g, "grid");
        if (auto* file = f.get("file")) {
            if (!file->is_string()) {
                Fields::fail("grid.file", "must be a string");
            }
            std::filesystem::path p = file->get<std::string>();
            cfg.grid.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        if (auto* s = f.get("synthetic")) {
            parse_synthetic(*s, cfg.grid.synthetic, "grid.synthetic");
        }
        f.seed("seed", cfg.grid.seed);
        f.finish();
    }
    if (auto* p = top.get("profile")) {
        Fields f(*p, "profile");
        f.number("mean_load", cfg.profile.mean_load);
        f.number("import_fraction", cfg.profile.import_fraction);
        f.number("renewable_fraction", cfg.profile.renewable_fraction);
        f.number("raw_wind_fraction", cfg.profile.raw_wind_fraction);
        f.number("wind_noise", cfg.profile.wind_noise);
        f.finish();
    }
    if (auto* d = top.get("day_types")) {
        if (d->is_string() && d->get<std::string>() == "all") {
            const auto all = all_day_types();
            cfg.day_types.assign(all.begin(), all.end());
        } else if (d->is_array()) {
            for (std::size_t k = 0; k < d->size(); ++k) {
                const auto& item = (*d)[k];
                auto dt = item.is_string() ? parse_day_type(item.get<std::string>()) : std::nullopt;
                if (!dt) {
                    Fields::fail("day_types[" + std::to_string(k) + "]", "unknown day type");
                }
                cfg.day_types.push_back(*dt);
            }
        } else {
            Fields::fail("day_types", "must be \"all\" or an array of names such as \"SpringWD\"");
        }
    } else {
        cfg.day_types = {DayType{}};
    }
    if (auto* w = top.get("wind")) {
        Fields f(*w, "wind");
        f.count("scenarios", cfg.wind_scenarios);
        if (auto* pen = f.get("penetrations")) {
            if (!pen->is_array()) {
                Fields::fail("wind.penetrations", "must be an array of numbers");
            }
            cfg.penetrations.clear();
            for (std::size_t k = 0; k < pen->size(); ++k) {
                if (!(*pen)[k].is_number()) {
                    Fields::fail("wind.penetrations[" + std::to_string(k) + "]", "must be a number");
                }
                cfg.penetrations.push_back((*pen)[k].get<double>());
            }
        }
        f.finish();
    }
    if (auto* d = top.get("datacenters")) {
        Fields f(*d, "datacenters");
        f.count("count", cfg.datacenters.count);
        f.number("cap_max", cfg.datacenters.cap_max);
        f.number("utilization", cfg.datacenters.utilization);
        if (auto* range = f.get("range")) {
            if (!range->is_array() || range->size() != 2 || !(*range)[0].is_number() || !(*range)[1].is_number()) {
                Fields::fail("datacenters.range", "must be [lo, hi]");
            }
            cfg.datacenters.range_lo = (*range)[0].get<double>();
            cfg.datacenters.range_hi = (*range)[1].get<double>();
        }
        f.optional_number("step_size", cfg.datacenters.step_size);
        f.seed("placement_seed", cfg.placement_seed);
        f.finish();
    }
    if (auto* p = top.get("policies")) {
        if (!p->is_array()) {
            Fields::fail("policies", "must be an array");
        }
        for (std::size_t k = 0; k < p->size(); ++k) {
            cfg.policies.push_back(parse_policy((*p)[k], "policies[" + std::to_string(k) + "]"));
        }
    }
    if (auto* e = top.get("emissions")) {
        if (!e->is_object()) {
            Fields::fail("emissions", "must be an object keyed by fuel kind");
        }
        for (auto it = e->begin(); it != e->end(); ++it) {
            auto fuel = parse_fuel(it.key());
            if (!fuel) {
                Fields::fail("emissions." + it.key(), "unknown fuel kind");
            }
            if (!it->is_number()) {
                Fields::fail("emissions." + it.key(), "must be a number");
            }
            try {
                cfg.emissions.set_rate(*fuel, it->get<double>());
            } catch (const ValidationError& err) {
                Fields::fail("emissions." + it.key(), err.what());
            }
        }
    }
    top.number("quantum", cfg.quantum);
    std::optional<std::uint64_t> seed;
    top.seed("seed", seed);
    if (seed) {
        cfg.seed = *seed;
    }
    top.finish();
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

void RunConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& what) { throw ValidationError(field + ": " + what); };
    if (day_types.empty()) {
        fail("day_types", "at least one day type is required");
    }
    if (wind_scenarios < 1) {
        fail("wind.scenarios", "must be at least 1");
    }
    if (penetrations.empty()) {
        fail("wind.penetrations", "at least one level is required");
    }
    for (std::size_t k = 0; k < penetrations.size(); ++k) {
        if (!(penetrations[k] > 0.0 && penetrations[k] < 1.0)) {
            fail("wind.penetrations[" + std::to_string(k) + "]",
                 "must lie in (0, 1), got " + text::fmt(penetrations[k]));
        }
    }
    if (!(quantum > 0.0)) {
        fail("quantum", "must be positive");
    }
    if (datacenters.step_size && !(*datacenters.step_size > 0.0)) {
        fail("datacenters.step_size", "must be positive");
    }
    if (!(datacenters.cap_max > 0.0)) {
        fail("datacenters.cap_max", "must be positive");
    }
    if (!(datacenters.utilization > 0.0 && datacenters.utilization <= 1.0)) {
        fail("datacenters.utilization", "must lie in (0, 1]");
    }
    if (!(0.0 <= datacenters.range_lo && datacenters.range_lo <= datacenters.utilization &&
          datacenters.utilization <= datacenters.range_hi && datacenters.range_hi <= 1.0)) {
        fail("datacenters.range", "must satisfy 0 <= lo <= utilization <= hi <= 1");
    }
    std::set<std::string> labels;
    for (std::size_t k = 0; k < policies.size(); ++k) {
        try {
            policies[k].validate();
        } catch (const ValidationError& e) {
            fail("policies[" + std::to_string(k) + "]", e.what());
        }
        if (!labels.insert(policies[k].label()).second) {
            fail("policies[" + std::to_string(k) + "]", "duplicate policy label '" + policies[k].label() + "'");
        }
    }
}

// ---------------------------------------------------------------------------
// sweep

std::string CellKey::str() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", scenario + 1);
    return day_type.name() + "_s" + buf + "_p" + text::fmt(penetration);
}

GridTopology sweep_grid(const RunConfig& config)
{
    if (config.grid.file) {
        return load_grid(*config.grid.file);
    }
    return generate_synthetic_grid(config.grid.synthetic, config.grid.seed.value_or(derive_seed(config.seed, {1})));
}

std::vector<DatacenterConfig> sweep_datacenters(const RunConfig& config, const GridTopology& grid)
{
    return place_datacenters(grid, config.datacenters, config.placement_seed.value_or(derive_seed(config.seed, {2})));
}

DayScenario sweep_scenario(const RunConfig& config, const GridTopology& grid, const CellKey& key)
{
    const auto wind_seed = derive_seed(config.seed, {4, static_cast<std::uint64_t>(key.day_type.season),
                                                     static_cast<std::uint64_t>(key.day_type.kind), key.scenario});
    const auto raw = make_day_scenario(grid, key.day_type, config.profile, derive_seed(config.seed, {3}), wind_seed);
    return scale_wind(raw, key.penetration).scenario;
}

namespace {

constexpr std::array<std::string_view, 14> kAggregateFields{
    "dc_carbon_reduction_pct", "grid_carbon_baseline_kg", "grid_carbon_adapted_kg", "dispatch_cost_baseline",
    "dispatch_cost_adapted",   "dc_avg_price_baseline",   "dc_avg_price",           "dc_price_change_pct",
    "nondc_avg_price_baseline", "nondc_avg_price",        "nondc_price_change_pct", "capacity_variation_mw",
    "capacity_variation_pct",  "opf_solves",
};

double change_pct(double baseline, double adapted)
{
    return baseline == 0.0 ? 0.0 : (adapted - baseline) / std::abs(baseline) * 100.0;
}

std::array<double, kAggregateFields.size()> field_values(const CellResult& c)
{
    const auto& r = c.report;
    return {r.dc_carbon_reduction_pct,
            r.grid_carbon_baseline_kg,
            r.grid_carbon_adapted_kg,
            r.dispatch_cost_baseline,
            r.dispatch_cost_adapted,
            r.dc_avg_price_baseline,
            r.dc_avg_price,
            change_pct(r.dc_avg_price_baseline, r.dc_avg_price),
            r.nondc_avg_price_baseline,
            r.nondc_avg_price,
            change_pct(r.nondc_avg_price_baseline, r.nondc_avg_price),
            r.capacity_variation_mw,
            r.capacity_variation_pct,
            static_cast<double>(c.opf_solves)};
}

std::string dir_name(const std::string& label)
{
    std::string out;
    for (char ch : label) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_') {
            out += ch;
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') {
        out.pop_back();
    }
    return out;
}

void write_report_csv(std::ostream& out, const CellResult& c)
{
    out << "field,value\n";
    const auto values = field_values(c);
    for (std::size_t k = 0; k < kAggregateFields.size(); ++k) {
        out << kAggregateFields[k] << ',' << text::fmt(values[k]) << '\n';
    }
}

void write_file(const std::filesystem::path& path, const auto& writer)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    writer(out);
}

struct CellOutcome {
    std::vector<CellResult> results;
    std::vector<CellFailure> failures;
};

CellOutcome run_cell(const RunConfig& config, const GridTopology& grid, std::span<const DatacenterConfig> dcs,
                     const CellKey& key, const SweepOptions& options)
{
    CellOutcome outcome;
    std::optional<DayScenario> scenario;
    std::optional<SimulationRun> baseline;
    try {
        scenario = sweep_scenario(config, grid, key);
        DayContext ctx{grid, *scenario, dcs, config.emissions, {}, config.quantum};
        baseline = run_fixed_baseline(ctx);
    } catch (const std::exception& e) {
        outcome.failures.push_back(CellFailure{key, std::string("baseline: ") + e.what()});
        return outcome;
    }
    DayContext ctx{grid, *scenario, dcs, config.emissions, {}, config.quantum};
    const auto base_caps = baseline->caps();

    auto persist = [&](const SimulationRun& run, const CellResult& result) {
        if (!options.cell_dir) {
            return;
        }
        const auto dir = *options.cell_dir / key.str() / dir_name(run.policy);
        std::filesystem::create_directories(dir);
        write_file(dir / "plans.csv", [&](std::ostream& o) { write_plans(o, run.plans); });
        write_file(dir / "dispatch.csv", [&](std::ostream& o) { write_dispatch_csv(o, run.dispatch, grid); });
        write_file(dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, run.metrics, grid); });
        write_file(dir / "report.csv", [&](std::ostream& o) { write_report_csv(o, result); });
    };

    for (std::size_t k = 0; k < config.policies.size(); ++k) {
        const auto& spec = config.policies[k];
        try {
            const auto seed = derive_seed(config.seed, {5, static_cast<std::uint64_t>(key.day_type.season),
                                                        static_cast<std::uint64_t>(key.day_type.kind), key.scenario,
                                                        k});
            const auto run = run_policy(ctx, *baseline, spec, seed);
            const auto caps = run.caps();
            for (std::size_t i = 0; i < dcs.size(); ++i) {
                const auto check = validate_plan(run.plans[i], dcs[i], spec.effective_step());
                if (!check.ok()) {
                    throw std::logic_error("policy emitted an invalid plan: " + check.violations.front().message);
                }
            }
            CellResult result;
            result.key = key;
            result.policy = run.policy;
            result.policy_index = k;
            result.report = evaluate(grid, *scenario, dcs, EvaluatedRun{&baseline->dispatch, base_caps},
                                     EvaluatedRun{&run.dispatch, caps}, config.emissions);
            result.opf_solves = run.opf_solves;
            persist(run, result);
            outcome.results.push_back(std::move(result));
        } catch (const std::exception& e) {
            outcome.failures.push_back(CellFailure{key, spec.label() + ": " + e.what()});
        }
    }
    return outcome;
}

double weighted_mean(const std::vector<std::pair<double, double>>& items)
{
    double num = 0.0;
    double den = 0.0;
    for (const auto& [w, v] : items) {
        num += w * v;
        den += w;
    }
    return num / den;
}

}  // namespace

std::span<const std::string_view> aggregate_fields() noexcept
{
    return kAggregateFields;
}

std::vector<AggregateRow> aggregate(const RunConfig& config, const std::vector<CellResult>& cells)
{
    // (policy, penetration index) -> scenario -> per field weighted samples
    using Samples = std::array<std::vector<std::pair<double, double>>, kAggregateFields.size()>;
    std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, Samples>> groups;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    for (const auto& c : cells) {
        const auto pen = static_cast<std::size_t>(
            std::find(config.penetrations.begin(), config.penetrations.end(), c.key.penetration) -
            config.penetrations.begin());
        const auto values = field_values(c);
        auto& samples = groups[{c.policy_index, pen}][c.key.scenario];
        for (std::size_t f = 0; f < values.size(); ++f) {
            samples[f].emplace_back(c.key.day_type.weekly_weight(), values[f]);
        }
        ++counts[{c.policy_index, pen}];
    }
    std::vector<AggregateRow> rows;
    for (const auto& [key, by_scenario] : groups) {
        AggregateRow row;
        row.policy_index = key.first;
        row.policy = config.policies.at(key.first).label();
        row.penetration = config.penetrations.at(key.second);
        row.cells = counts[key];
        row.scenarios = by_scenario.size();
        for (std::size_t f = 0; f < kAggregateFields.size(); ++f) {
            std::vector<double> per_scenario;
            for (const auto& [scenario, samples] : by_scenario) {
                per_scenario.push_back(weighted_mean(samples[f]));
            }
            double mean = 0.0;
            for (double v : per_scenario) {
                mean += v;
            }
            mean /= static_cast<double>(per_scenario.size());
            double var = 0.0;
            for (double v : per_scenario) {
                var += (v - mean) * (v - mean);
            }
            var /= static_cast<double>(per_scenario.size());
            row.values.emplace_back(mean, std::sqrt(var));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_aggregate_csv(std::ostream& out, const RunConfig& config, const std::vector<AggregateRow>& rows)
{
    out << "policy,kind,metric,variant,step_size,quota,coordinators,plan_length,penetration,cells,scenarios";
    for (auto field : kAggregateFields) {
        out << ',' << field << "_mean," << field << "_std";
    }
    out << '\n';
    for (const auto& row : rows) {
        const auto& spec = config.policies.at(row.policy_index);
        const auto step = spec.effective_step();
        out << row.policy << ',' << to_string(spec.kind) << ',' << to_string(spec.metric) << ','
            << to_string(spec.variant) << ',' << (step ? text::fmt(*step) : "inf") << ','
            << (std::isfinite(spec.quota) ? text::fmt(spec.quota) : "inf") << ',' << spec.coordinators << ','
            << spec.plan_length << ',' << text::fmt(row.penetration) << ',' << row.cells << ',' << row.scenarios;
        for (const auto& [mean, sd] : row.values) {
            out << ',' << text::fmt(mean) << ',' << text::fmt(sd);
        }
        out << '\n';
    }
}

SweepOutput run_sweep(const RunConfig& config, const SweepOptions& options)
{
    config.validate();
    const auto grid = sweep_grid(config);
    const auto dcs = sweep_datacenters(config, grid);

    std::vector<CellKey> keys;
    for (const auto& dt : config.day_types) {
        for (std::size_t s = 0; s < config.wind_scenarios; ++s) {
            for (double pen : config.penetrations) {
                keys.push_back(CellKey{dt, s, pen});
            }
        }
    }

    std::vector<CellOutcome> outcomes(keys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < keys.size(); k = next++) {
            outcomes[k] = run_cell(config, grid, dcs, keys[k], options);
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, keys.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < jobs; ++t) {
            threads.emplace_back(worker);
        }
        for (auto& th : threads) {
            th.join();
        }
    }

    SweepOutput out;
    for (auto& o : outcomes) {
        for (auto& r : o.results) {
            out.cells.push_back(std::move(r));
        }
        for (auto& f : o.failures) {
            out.failures.push_back(std::move(f));
        }
    }
    out.aggregate = aggregate(config, out.cells);
    return out;
}

}  // namespace gridflex
