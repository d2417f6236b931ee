// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Failing checks print the measured values they were judged on.

#include "gridflex/dc_flex.hpp"
#include "gridflex/error.hpp"
#include "gridflex/lp.hpp"
#include "gridflex/metrics.hpp"
#include "gridflex/opf.hpp"
#include "gridflex/policies.hpp"
#include "gridflex/results.hpp"
#include "gridflex/simulation.hpp"
#include "support/dp_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/lp_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gridflex;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body)
{
    Verdict v;
    const auto start = Clock::now();
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.notes.push_back(std::string("exception: ") + e.what());
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), seconds_since(start));
    for (const auto& n : v.notes) {
        std::printf("    %s\n", n.c_str());
    }
    std::fflush(stdout);
}

// Criterion 1

Verdict lp_correctness()
{
    Verdict v;
    std::mt19937_64 rng(20240601);
    std::size_t mismatches = 0;
    std::size_t cert_fail = 0;
    double worst_rel = 0.0;
    double worst_gap = 0.0;
    double worst_comp = 0.0;
    double solver_seconds = 0.0;
    const auto start = Clock::now();
    for (int i = 0; i < 500; ++i) {
        const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 12)(rng));
        // keeps the vertex oracle affordable at the larger sizes
        const int m_max = n <= 6 ? 6 : (n <= 9 ? 4 : 3);
        const auto m = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, m_max)(rng));
        const auto program = test::random_feasible_lp(rng, n, m);
        const auto t0 = Clock::now();
        const auto sol = lp::solve(program);
        solver_seconds += seconds_since(t0);
        const auto oracle = test::vertex_enumeration_min(program);
        if (!sol.optimal() || !oracle) {
            ++mismatches;
            continue;
        }
        const double rel = std::abs(sol.objective - *oracle) / std::max(1.0, std::abs(*oracle));
        worst_rel = std::max(worst_rel, rel);
        mismatches += rel > 1e-6 ? 1 : 0;
        const auto cert = lp::check_certificate(program, sol, 1e-6);
        worst_gap = std::max(worst_gap, cert.duality_gap);
        worst_comp = std::max(worst_comp, cert.max_complementarity);
        cert_fail += cert.passed ? 0 : 1;
    }
    const double total = seconds_since(start);
    v.note(fmt("500 LPs: worst relative objective error %.2e, worst gap %.2e, worst complementarity %.2e", worst_rel,
               worst_gap, worst_comp));
    v.note(fmt("solver time %.2f s, total with oracle %.2f s", solver_seconds, total));
    v.require(mismatches == 0, std::to_string(mismatches) + " objective mismatches against the oracle");
    v.require(cert_fail == 0, std::to_string(cert_fail) + " certificates above 1e-6");
    v.require(total <= 60.0, "runtime above 60 s");
    return v;
}

// Criterion 2

Verdict opf_golden()
{
    Verdict v;
    constexpr double tol = 1e-6;
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };
    bool free_ok = true;
    bool bound_ok = true;
    const auto free_line = solve_opf(test::two_bus_grid(60.0), test::two_bus_scenario(), {}, {});
    const auto bound_line = solve_opf(test::two_bus_grid(30.0), test::two_bus_scenario(), {}, {});
    for (std::size_t t = 0; t < kHours; ++t) {
        free_ok = free_ok && near(free_line.generation[0][t], 50.0) && near(free_line.flow[0][t], 50.0) &&
                  near(free_line.wind_curtail[0][t], 0.0) && near(free_line.lmp[0][t], 4.0) &&
                  near(free_line.lmp[1][t], 4.0);
        bound_ok = bound_ok && near(bound_line.generation[0][t], 70.0) && near(bound_line.flow[0][t], 30.0) &&
                   near(bound_line.wind_curtail[0][t], 20.0) && near(bound_line.lmp[0][t], -100.0) &&
                   near(bound_line.lmp[1][t], 4.0);
    }
    v.note(fmt("line 60 MW: gas %.6f, flow %.6f, lmp %.6f / %.6f", free_line.generation[0][0], free_line.flow[0][0],
               free_line.lmp[0][0], free_line.lmp[1][0]));
    v.note(fmt("line 30 MW: gas %.6f, curtailed %.6f, lmp %.6f / %.6f", bound_line.generation[0][0],
               bound_line.wind_curtail[0][0], bound_line.lmp[0][0], bound_line.lmp[1][0]));
    v.require(free_ok, "non-binding case");
    v.require(bound_ok, "binding case");
    return v;
}

// Criterion 3

Verdict dp_optimality()
{
    Verdict v;
    std::mt19937_64 rng(7);
    std::size_t instances = 0;
    std::size_t cost_mismatch = 0;
    std::size_t plan_mismatch = 0;
    std::size_t feasibility_mismatch = 0;
    const std::vector<std::optional<double>> steps{1.0, 2.0, std::nullopt};
    for (std::size_t hours = 1; hours <= 6; ++hours) {
        for (int n_levels = 1; n_levels <= 5; ++n_levels) {
            for (int avg = 0; avg < n_levels; ++avg) {
                for (const auto& step : steps) {
                    const auto dc = test::dc_config("dp", 0, n_levels - 1, 0, avg);
                    std::vector<double> levels(static_cast<std::size_t>(n_levels));
                    for (int l = 0; l < n_levels; ++l) {
                        levels[static_cast<std::size_t>(l)] = l;
                    }
                    for (int rep = 0; rep < 12; ++rep) {
                        std::vector<double> prices(hours);
                        for (auto& p : prices) {
                            p = rep < 6 ? std::uniform_int_distribution<int>(-3, 4)(rng)
                                        : std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
                        }
                        double backlog = 0.0;
                        std::optional<double> start_cap;
                        if (rep % 3 == 2) {
                            backlog = std::uniform_int_distribution<int>(-2, 2)(rng);
                            start_cap = std::uniform_int_distribution<int>(0, n_levels - 1)(rng);
                        }
                        ++instances;
                        const auto oracle = test::brute_force_plan(prices, levels, avg, step, backlog, start_cap);
                        const PriceVector pv{MetricKind::LMPrice, kHours + 1 - hours, prices};
                        try {
                            const auto dp = hourly_dp(pv, dc, backlog, start_cap, DecisionLimits{step, 1.0});
                            if (!oracle) {
                                ++feasibility_mismatch;
                                continue;
                            }
                            cost_mismatch += std::abs(dp.cost - oracle->cost) > 1e-9 ? 1 : 0;
                            plan_mismatch += dp.plan != oracle->plan ? 1 : 0;
                        } catch (const InfeasibleError&) {
                            feasibility_mismatch += oracle ? 1 : 0;
                        }
                    }
                }
            }
        }
    }
    const auto dc = test::dc_config("toy", 0, 3, 1, 2);
    const auto toy = hourly_dp(PriceVector{MetricKind::LMPrice, 22, {10, 1, 5}}, dc, 0.0, std::nullopt,
                               DecisionLimits{std::nullopt, 1.0});
    v.note(std::to_string(instances) + " instances: " + std::to_string(cost_mismatch) + " cost mismatches, " +
           std::to_string(plan_mismatch) + " tie-break mismatches, " + std::to_string(feasibility_mismatch) +
           " feasibility mismatches");
    v.note(fmt("toy case plan [%g, %g, %g] cost %g", toy.plan.at(0), toy.plan.at(1), toy.plan.at(2), toy.cost));
    v.require(cost_mismatch == 0 && feasibility_mismatch == 0, "exhaustive equivalence");
    v.require(toy.plan == std::vector<double>{1, 3, 2} && toy.cost == 23.0, "toy case");
    return v;
}

// Criterion 4

DatacenterConfig random_config(std::mt19937_64& rng)
{
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int hi = pick(4, 30);
    const int lo = pick(0, hi - 2);
    const int avg = pick(lo + 1, hi - 1);
    std::optional<double> step;
    if (pick(0, 2) > 0) {
        step = 10.0 * pick(1, 8);
    }
    return test::dc_config("dc", 0, 10.0 * hi, 10.0 * lo, 10.0 * avg, step);
}

HourlySeries random_day(std::mt19937_64& rng)
{
    HourlySeries s{};
    std::uniform_real_distribution<double> u(-20.0, 80.0);
    for (auto& x : s) {
        x = u(rng);
    }
    return s;
}

Verdict flexibility_invariants()
{
    Verdict v;
    std::mt19937_64 rng(4);
    std::size_t invalid = 0;
    std::size_t residual = 0;
    const auto start = Clock::now();
    for (int i = 0; i < 10000; ++i) {
        const auto dc = random_config(rng);
        const auto day = random_day(rng);
        CapacityPlan plan{dc.id, {}};
        switch (i % 3) {
        case 0:
            plan = planshare_plan(day, dc);
            break;
        case 1: {
            double avg = 0.0;
            for (double x : day) {
                avg += x / kHours;
            }
            BacklogState state{dc.id, 0.0, 0, std::nullopt};
            for (std::size_t t = 0; t < kHours; ++t) {
                plan.cap[t] = avg_rule_decide(day[t], avg, state, dc);
                state = apply_decision(state, plan.cap[t], dc);
            }
            break;
        }
        default: {
            // receding horizon: replan every hour from the realized state
            BacklogState state{dc.id, 0.0, 0, std::nullopt};
            for (std::size_t t = 0; t < kHours; ++t) {
                const auto pv = blend_prices(day, day[t] + 5.0, t + 1);
                plan.cap[t] = hourly_dp(pv, dc, state.backlog, state.last_cap).plan.front();
                state = apply_decision(state, plan.cap[t], dc);
            }
            break;
        }
        }
        invalid += validate_plan(plan, dc).ok() ? 0 : 1;
        residual += backlog_trajectory(plan, dc).back() == 0.0 ? 0 : 1;
    }
    const double elapsed = seconds_since(start);
    v.note(std::to_string(invalid) + " invalid plans, " + std::to_string(residual) +
           " with nonzero final backlog, out of 10000");
    v.note(fmt("elapsed %.2f s", elapsed));
    v.require(invalid == 0 && residual == 0, "plan invariants");
    v.require(elapsed <= 30.0, "runtime above 30 s");
    return v;
}

// Criterion 5

Verdict overshifting()
{
    Verdict v;
    constexpr double penetration = 0.4;
    std::size_t negative = 0;
    std::size_t lockstep = 0;
    std::size_t congested = 0;
    double min_share = 1.0;
    std::size_t min_fleet = 1000;
    double worst = 0.0;
    std::vector<std::string> infeasible;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RunConfig cfg;
        cfg.seed = seed;
        cfg.day_types = {DayType{}};
        cfg.penetrations = {penetration};
        const auto grid = sweep_grid(cfg);
        const auto dcs = sweep_datacenters(cfg, grid);
        const auto scenario = sweep_scenario(cfg, grid, CellKey{DayType{}, 0, penetration});

        double load = 0.0;
        for (const auto& series : scenario.base_load) {
            for (double x : series) {
                load += x / kHours;
            }
        }
        double fleet = 0.0;
        bool identical = true;
        for (const auto& dc : dcs) {
            fleet += dc.avg_cap;
            identical = identical && dc.cap_max == dcs[0].cap_max && dc.cap_min == dcs[0].cap_min &&
                        dc.avg_cap == dcs[0].avg_cap && dc.step_size == dcs[0].step_size;
        }
        min_share = std::min(min_share, identical ? fleet / load : 0.0);
        min_fleet = std::min(min_fleet, dcs.size());

        const DayContext ctx{grid, scenario, dcs};
        const auto base = run_fixed_baseline(ctx);
        PolicySpec spec;
        spec.kind = PolicyKind::Online;
        spec.metric = MetricKind::ACI;
        spec.variant = OnlineVariant::Avg;
        SimulationRun run;
        try {
            run = run_local_online(ctx, base, MetricKind::ACI, OnlineVariant::Avg, spec);
        } catch (const SolverError&) {
            // an oversubscribed hour the grid cannot serve is itself overshifting, but has no reduction value
            infeasible.push_back(std::to_string(seed));
            continue;
        }

        bool same = true;
        for (const auto& p : run.plans) {
            same = same && p.cap == run.plans[0].cap;
        }
        lockstep += same ? 1 : 0;

        bool binding = false;
        for (std::size_t l = 0; l < grid.lines.size(); ++l) {
            for (double f : base.dispatch.flow[l]) {
                binding = binding || std::abs(f) >= grid.lines[l].flow_limit - 1e-6;
            }
        }
        congested += binding ? 1 : 0;

        const auto base_caps = base.caps();
        const auto caps = run.caps();
        const auto r = evaluate(grid, scenario, dcs, EvaluatedRun{&base.dispatch, base_caps},
                                EvaluatedRun{&run.dispatch, caps}, cfg.emissions);
        negative += r.dc_carbon_reduction_pct < 0.0 ? 1 : 0;
        worst = std::min(worst, r.dc_carbon_reduction_pct);
    }
    v.note(std::to_string(min_fleet) + " identical datacenters, fleet at least " +
           fmt("%.1f%% of mean load", 100.0 * min_share));
    const std::size_t completed = 20 - infeasible.size();
    std::string skipped;
    for (const auto& id : infeasible) {
        skipped += (skipped.empty() ? "" : ", ") + id;
    }
    if (!infeasible.empty()) {
        v.note("seeds whose ACI(Avg) fleet load the grid could not serve: " + skipped);
    }
    v.note(std::to_string(congested) + "/" + std::to_string(completed) + " baseline days with a binding line, " +
           std::to_string(lockstep) + "/" + std::to_string(completed) + " lockstep fleets");
    v.note(std::to_string(negative) + "/" + std::to_string(completed) + " seeds with negative reduction" +
           fmt(", lowest %.3f%%", worst));
    v.require(min_fleet >= 10 && min_share >= 0.10, "fleet size and share");
    v.require(completed > 0 && congested == completed, "congested grid");
    v.require(completed > 0 && lockstep == completed, "lockstep plans");
    v.require(negative >= 1, "negative reduction in some seed");
    return v;
}

// Criteria 6, 7 and 10 share one seeded suite.

const char* kSuiteConfig = R"({
  "day_types": ["SpringWD"],
  "wind": {"scenarios": 1, "penetrations": [0.2, 0.4]},
  "policies": [
    {"kind": "online", "metric": "ACI", "variant": "Avg"},
    {"kind": "online", "metric": "LMPrice", "variant": "Avg"},
    {"kind": "online", "metric": "LMPrice", "variant": "Hourly"},
    {"kind": "coordinated", "metric": "LMPrice", "variant": "Avg", "quota": 400},
    {"kind": "planshare", "plan_length": 1},
    {"kind": "planshare", "plan_length": 3},
    {"kind": "planshare", "plan_length": 6},
    {"kind": "planshare", "plan_length": 12},
    {"kind": "planshare", "plan_length": 24}
  ]
})";

constexpr std::uint64_t kSuiteSeeds = 40;
constexpr double kTolerancePp = 0.2;

struct Suite {
    std::vector<std::string> labels;
    std::vector<double> penetrations;
    // [penetration][policy] -> per-seed values over the seeds where every policy succeeded
    std::vector<std::vector<std::vector<double>>> reduction;
    std::vector<std::vector<std::vector<double>>> cost;
    std::vector<std::vector<double>> baseline_cost;
    std::vector<std::size_t> dropped;
};

Suite run_suite()
{
    const auto base_cfg = parse_run_config(kSuiteConfig);
    Suite s;
    for (const auto& p : base_cfg.policies) {
        s.labels.push_back(p.label());
    }
    s.penetrations = base_cfg.penetrations;
    const std::size_t np = s.penetrations.size();
    const std::size_t nk = s.labels.size();
    s.reduction.assign(np, std::vector<std::vector<double>>(nk));
    s.cost.assign(np, std::vector<std::vector<double>>(nk));
    s.baseline_cost.assign(np, {});
    s.dropped.assign(np, 0);
    for (std::uint64_t seed = 1; seed <= kSuiteSeeds; ++seed) {
        auto cfg = base_cfg;
        cfg.seed = seed;
        const auto out = run_sweep(cfg);
        for (std::size_t pi = 0; pi < np; ++pi) {
            std::vector<const CellResult*> row(nk, nullptr);
            for (const auto& c : out.cells) {
                if (c.key.penetration == s.penetrations[pi] && c.policy_index < nk) {
                    row[c.policy_index] = &c;
                }
            }
            bool complete = true;
            for (const auto* c : row) {
                complete = complete && c != nullptr;
            }
            if (!complete) {
                ++s.dropped[pi];
                continue;
            }
            for (std::size_t k = 0; k < nk; ++k) {
                s.reduction[pi][k].push_back(row[k]->report.dc_carbon_reduction_pct);
                s.cost[pi][k].push_back(row[k]->report.dispatch_cost_adapted);
            }
            s.baseline_cost[pi].push_back(row[0]->report.dispatch_cost_baseline);
        }
    }
    return s;
}

double mean_of(const std::vector<double>& xs)
{
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return xs.empty() ? std::nan("") : sum / static_cast<double>(xs.size());
}

std::size_t index_of(const Suite& s, const std::string& label)
{
    for (std::size_t k = 0; k < s.labels.size(); ++k) {
        if (s.labels[k] == label) {
            return k;
        }
    }
    throw Error("suite has no policy '" + label + "'");
}

std::string coordinated_label(const Suite& s)
{
    for (const auto& l : s.labels) {
        if (l.rfind("Coord-", 0) == 0) {
            return l;
        }
    }
    throw Error("suite has no coordinated policy");
}

void require_at_least(Verdict& v, const Suite& s, std::size_t pi, const std::string& hi, const std::string& lo)
{
    const double a = mean_of(s.reduction[pi][index_of(s, hi)]);
    const double b = mean_of(s.reduction[pi][index_of(s, lo)]);
    const std::string what = fmt("p=%.1f: ", s.penetrations[pi]) + hi + fmt(" %.3f >= ", a) + lo +
                             fmt(" %.3f (tolerance %.1f pp)", b, kTolerancePp);
    if (a >= b - kTolerancePp) {
        v.note("ok " + what);
    } else {
        v.require(false, what);
    }
}

Verdict coordination_ordering(const Suite& s)
{
    Verdict v;
    for (std::size_t pi = 0; pi < s.penetrations.size(); ++pi) {
        v.note(fmt("p=%.1f: %.0f seeds", s.penetrations[pi], static_cast<double>(s.reduction[pi][0].size())) +
               (s.dropped[pi] ? ", " + std::to_string(s.dropped[pi]) + " dropped for failed cells" : ""));
        v.require(s.reduction[pi][0].size() >= 20, "fewer than 20 complete seeds");
        require_at_least(v, s, pi, "PlanShare(24h)", "LMPrice(Hourly)");
        require_at_least(v, s, pi, "LMPrice(Hourly)", "LMPrice(Avg)");
        require_at_least(v, s, pi, "LMPrice(Avg)", "ACI(Avg)");
        require_at_least(v, s, pi, coordinated_label(s), "LMPrice(Avg)");
    }
    if (!v.pass) {
        v.note("analysis: the Avg rule compares each hour against the day-ahead daily mean and moves the full");
        v.note("half range on any deviation. LMPs on the synthetic grid are spiky (near-flat most hours, with");
        v.note("congestion and ramp spikes), so LMPrice(Avg) reacts to small noise and ACI(Avg) can beat it.");
        v.note("A quota only delays and trims those moves; it does not redirect them to better hours, so the");
        v.note("coordinated run stays below the uncoordinated one on these grids.");
    }
    return v;
}

Verdict plan_length(const Suite& s)
{
    Verdict v;
    const std::vector<std::string> order{"PlanShare(1h)", "PlanShare(3h)", "PlanShare(6h)", "PlanShare(12h)",
                                         "PlanShare(24h)"};
    for (std::size_t pi = 0; pi < s.penetrations.size(); ++pi) {
        std::string line = fmt("p=%.1f:", s.penetrations[pi]);
        for (const auto& l : order) {
            line += " " + l + fmt(" %.3f", mean_of(s.reduction[pi][index_of(s, l)]));
        }
        v.note(line);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            require_at_least(v, s, pi, order[i + 1], order[i]);
        }
    }
    if (!v.pass) {
        v.note("analysis: once the shared plans cover the congested hours the grid already schedules around");
        v.note("them; extending from 12h to 24h adds only the overnight hours, where the fleet's full-day");
        v.note("shift lands in a few low-price hours and adds marginal fossil output there.");
    }
    return v;
}

Verdict grid_benefit(const Suite& s)
{
    Verdict v;
    const auto k = index_of(s, "PlanShare(24h)");
    for (std::size_t pi = 0; pi < s.penetrations.size(); ++pi) {
        const auto& adapted = s.cost[pi][k];
        const auto& base = s.baseline_cost[pi];
        std::size_t strictly = 0;
        for (std::size_t i = 0; i < adapted.size(); ++i) {
            strictly += adapted[i] < base[i] ? 1 : 0;
        }
        const double ma = mean_of(adapted);
        const double mb = mean_of(base);
        v.note(fmt("p=%.1f: mean cost %.0f vs baseline %.0f, lower in ", s.penetrations[pi], ma, mb) +
               std::to_string(strictly) + "/" + std::to_string(adapted.size()) + " seeds");
        v.require(ma <= mb, fmt("p=%.1f mean cost above baseline", s.penetrations[pi]));
        v.require(2 * strictly >= adapted.size(), fmt("p=%.1f strictly lower in under half the seeds", s.penetrations[pi]));
    }
    return v;
}

// Criterion 8

Verdict metric_golden()
{
    Verdict v;
    const EmissionRateTable r;
    const std::vector<std::pair<FuelKind, double>> table{
        {FuelKind::Coal, 895.2},     {FuelKind::Gas, 388.9},      {FuelKind::Oil, 877.6},
        {FuelKind::DualFuel, 633.3}, {FuelKind::Nuclear, 0.0},    {FuelKind::Geothermal, 107.6},
        {FuelKind::Biomass, 0.0},    {FuelKind::Hydro, 0.0},      {FuelKind::Wind, 0.0},
        {FuelKind::Import, 428.0}};
    bool table_ok = true;
    for (const auto& [fuel, rate] : table) {
        table_ok = table_ok && r.rate(fuel) == rate;
    }
    v.require(table_ok, "emission table");

    HourlySeries plan{};
    for (std::size_t t = 0; t < kHours; ++t) {
        plan[t] = t < 12 ? 80.0 : 200.0;
    }
    const double variation = capacity_variation(plan);
    v.note(fmt("capacity variation %.17g (expected %.17g)", variation, 120.0 / 23.0));
    v.require(variation == 120.0 / 23.0, "capacity variation");

    GridTopology g;
    g.buses = {Bus{"1"}};
    g.generators = {Generator{0, FuelKind::Coal, 2.0, 100.0, 100.0, 100.0}};
    g.loads = {Load{0, 1000.0}};
    DispatchSolution s;
    s.generation = {HourlySeries{}};
    s.generation[0][0] = 10.0;
    s.shed = {HourlySeries{}};
    s.lmp = {HourlySeries{}};
    s.angle = {HourlySeries{}};
    DayScenario sc;
    sc.base_load = {HourlySeries{}};
    const double kg = grid_carbon(s, g, sc);
    v.note(fmt("10 MWh coal: %.17g kg", kg));
    v.require(kg == 8952.0, "coal carbon");
    return v;
}

// Criterion 9

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism()
{
    Verdict v;
    const std::string config = R"({
      "day_types": ["SpringWD", "SummerWE"],
      "wind": {"scenarios": 2, "penetrations": [0.2, 0.4]},
      "policies": [{"kind": "online", "metric": "LMPrice", "variant": "Avg"}, {"kind": "planshare", "plan_length": 24}],
      "seed": 11
    })";
    const auto root = fs::temp_directory_path() / "gridflex_acceptance_determinism";
    fs::remove_all(root);
    const auto a = execute_run(root / "a", config, {}, std::nullopt, 1);
    const auto b = execute_run(root / "b", config, {}, std::nullopt, 2);
    const std::size_t cells = a.output.cells.size() + a.output.failures.size();
    const auto agg_a = slurp(a.dir / "aggregate.csv");
    const auto agg_b = slurp(b.dir / "aggregate.csv");
    const auto man_a = slurp(a.dir / "manifest.json");
    const auto man_b = slurp(b.dir / "manifest.json");
    v.note(std::to_string(cells / 2) + " cells x 2 policies, aggregate " + std::to_string(agg_a.size()) +
           " bytes, hash " + content_hash(agg_a));
    v.require(cells == 16, "expected 8 cells");
    v.require(!agg_a.empty() && agg_a == agg_b, "aggregate CSVs differ");
    v.require(man_a == man_b, "manifests differ");
    fs::remove_all(root);
    return v;
}

}  // namespace

int main()
{
    report(1, "LP solver against vertex enumeration", lp_correctness);
    report(2, "two-bus dispatch golden cases", opf_golden);
    report(3, "hourly DP against exhaustive search", dp_optimality);
    report(4, "flexibility invariants on 10000 policy outputs", flexibility_invariants);
    report(5, "overshifting under ACI(Avg)", overshifting);

    std::printf("running the %llu-seed policy suite\n", static_cast<unsigned long long>(kSuiteSeeds));
    std::fflush(stdout);
    const auto start = Clock::now();
    const auto suite = run_suite();
    std::printf("suite finished in %.1f s\n", seconds_since(start));
    report(6, "coordination ordering", [&] { return coordination_ordering(suite); });
    report(7, "plan-length monotonicity", [&] { return plan_length(suite); });
    report(8, "metric golden values", metric_golden);
    report(9, "sweep determinism", determinism);
    report(10, "PlanShare(24h) dispatch cost", [&] { return grid_benefit(suite); });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
