#include "gridflex/simulation.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridflex {

std::string_view to_string(PolicyKind kind) noexcept
{
    switch (kind) {
    case PolicyKind::Baseline: return "baseline";
    case PolicyKind::Online: return "online";
    case PolicyKind::Coordinated: return "coordinated";
    case PolicyKind::PlanShare: return "planshare";
    }
    return "unknown";
}

std::string_view to_string(OnlineVariant variant) noexcept
{
    switch (variant) {
    case OnlineVariant::Avg: return "Avg";
    case OnlineVariant::Hourly: return "Hourly";
    case OnlineVariant::SixHourAvg: return "6hr+Avg";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) noexcept
{
    for (auto k : {PolicyKind::Baseline, PolicyKind::Online, PolicyKind::Coordinated, PolicyKind::PlanShare}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<OnlineVariant> parse_variant(std::string_view text) noexcept
{
    for (auto v : {OnlineVariant::Avg, OnlineVariant::Hourly, OnlineVariant::SixHourAvg}) {
        if (to_string(v) == text) {
            return v;
        }
    }
    return std::nullopt;
}

std::string PolicySpec::label() const
{
    if (!name.empty()) {
        return name;
    }
    switch (kind) {
    case PolicyKind::Baseline:
        return "Baseline";
    case PolicyKind::Online:
        return std::string(to_string(metric)) + "(" + std::string(to_string(variant)) + ")";
    case PolicyKind::Coordinated: {
        std::string out = "Coord-" + std::string(to_string(metric)) + "(" + std::string(to_string(variant)) + ")";
        out += std::isfinite(quota) ? "-q" + text::fmt(quota) : "-qinf";
        out += "-n" + std::to_string(coordinators);
        return out;
    }
    case PolicyKind::PlanShare:
        return "PlanShare(" + std::to_string(plan_length) + "h)";
    }
    return "unknown";
}

std::optional<double> PolicySpec::effective_step() const
{
    if (step_size) {
        return step_size;
    }
    const bool dp = kind == PolicyKind::PlanShare ||
                    ((kind == PolicyKind::Online || kind == PolicyKind::Coordinated) && variant != OnlineVariant::Avg);
    return dp ? std::optional<double>(kDefaultDpStep) : std::nullopt;
}

void PolicySpec::validate() const
{
    if (name.find_first_of(",\n\r\"") != std::string::npos) {
        throw ValidationError("policy name '" + name + "' must not contain commas, quotes or line breaks");
    }
    if (step_size && !(*step_size > 0.0)) {
        throw ValidationError("policy '" + label() + "': step_size must be positive");
    }
    if (horizon_hours < 1) {
        throw ValidationError("policy '" + label() + "': horizon_hours must be at least 1");
    }
    if (kind == PolicyKind::Coordinated) {
        if (!(quota > 0.0)) {
            throw ValidationError("policy '" + label() + "': quota must be positive");
        }
        if (coordinators < 1) {
            throw ValidationError("policy '" + label() + "': coordinators must be at least 1");
        }
    }
    if (plan_length < 1 || plan_length > kHours) {
        throw ValidationError("policy '" + label() + "': plan_length must lie in 1..24");
    }
}

std::vector<HourlySeries> SimulationRun::caps() const
{
    std::vector<HourlySeries> out;
    out.reserve(plans.size());
    for (const auto& p : plans) {
        out.push_back(p.cap);
    }
    return out;
}

namespace {

HourlySeries metric_series(const GridMetricsSeries& m, MetricKind kind, std::size_t bus)
{
    switch (kind) {
    case MetricKind::ACI: return m.aci;
    case MetricKind::Price: return m.price;
    case MetricKind::LMPrice: return m.lmp.at(bus);
    }
    return m.price;
}

std::vector<CapacityPlan> to_plans(std::span<const DatacenterConfig> dcs, const std::vector<HourlySeries>& caps)
{
    std::vector<CapacityPlan> plans;
    for (std::size_t i = 0; i < dcs.size(); ++i) {
        plans.push_back(CapacityPlan{dcs[i].id, caps[i]});
    }
    return plans;
}

OpfOptions anchored_options(const DayContext& ctx, const SimulationRun& baseline)
{
    OpfOptions opts;
    opts.solver = ctx.solver;
    std::vector<double> p0;
    for (const auto& g : baseline.dispatch.generation) {
        p0.push_back(g[0]);
    }
    opts.initial_output = std::move(p0);
    return opts;
}

void record_hour(GridMetricsSeries& out, const GridMetricsSeries& m, std::size_t t)
{
    out.aci[t] = m.aci[t];
    out.price[t] = m.price[t];
    for (std::size_t n = 0; n < m.lmp.size(); ++n) {
        out.lmp[n][t] = m.lmp[n][t];
    }
}

struct Coordination {
    double quota = kUnlimitedQuota;
    std::size_t coordinators = 1;
    std::uint64_t seed = 0;
};

bool same_decision_inputs(const DatacenterConfig& a, const DatacenterConfig& b)
{
    return a.cap_min == b.cap_min && a.cap_max == b.cap_max && a.avg_cap == b.avg_cap && a.step_size == b.step_size;
}

SimulationRun online_loop(const DayContext& ctx, const SimulationRun& baseline, MetricKind metric,
                          OnlineVariant variant, const PolicySpec& spec, const std::optional<Coordination>& coord)
{
    const auto& dcs = ctx.dcs;
    const std::size_t n = dcs.size();
    const DecisionLimits limits{spec.effective_step(), ctx.quantum};

    std::vector<HourlySeries> caps(n);
    std::vector<HourlySeries> day_ahead(n);
    std::vector<BacklogState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
        caps[i].fill(dcs[i].avg_cap);
        day_ahead[i] = metric_series(baseline.metrics, metric, dcs[i].bus);
        states[i].dc_id = dcs[i].id;
    }
    auto latest = day_ahead;

    SimulationRun run;
    run.policy = spec.label();
    run.metrics.lmp.assign(ctx.grid.buses.size(), HourlySeries{});
    run.opf_solves = baseline.opf_solves;
    auto opts = anchored_options(ctx, baseline);

    std::optional<QuotaSplit> split;
    if (coord) {
        split = split_quota(coord->quota, coord->coordinators, n);
    }

    DispatchSolution current;
    for (std::size_t j = 1; j <= kHours; ++j) {
        const std::size_t t = j - 1;
        std::vector<double> decision(n);
        for (std::size_t i = 0; i < n; ++i) {
            // datacenters with identical inputs reach identical decisions
            bool reused = false;
            for (std::size_t k = 0; k < i && !reused; ++k) {
                if (same_decision_inputs(dcs[i], dcs[k]) && states[i].backlog == states[k].backlog &&
                    states[i].last_cap == states[k].last_cap &&
                    (metric != MetricKind::LMPrice || dcs[i].bus == dcs[k].bus)) {
                    decision[i] = decision[k];
                    reused = true;
                }
            }
            if (reused) {
                continue;
            }
            switch (variant) {
            case OnlineVariant::Avg:
                decision[i] = avg_rule_decide(latest[i][t], mean(latest[i]), states[i], dcs[i], limits);
                break;
            case OnlineVariant::Hourly:
            case OnlineVariant::SixHourAvg: {
                auto prices = variant == OnlineVariant::Hourly
                                  ? blend_prices(day_ahead[i], latest[i][t], j, metric)
                                  : partial_horizon_prices(day_ahead[i], spec.horizon_hours, j, metric);
                if (variant == OnlineVariant::SixHourAvg && j != 1) {
                    prices.values.front() = latest[i][t];
                }
                const auto dp = hourly_dp(prices, dcs[i], states[i].backlog,
                                          states[i].last_cap.value_or(dcs[i].avg_cap), limits);
                decision[i] = dp.plan.front();
                break;
            }
            }
        }

        if (split) {
            for (std::size_t g = 0; g < split->groups.size(); ++g) {
                const auto& group = split->groups[g];
                std::vector<AdaptationRequest> requests;
                std::vector<bool> hold_ok;
                for (std::size_t i : group) {
                    const double previous = states[i].last_cap.value_or(dcs[i].avg_cap);
                    const bool ok = decision_feasible(dcs[i], states[i], previous, limits.step_size);
                    const double b = states[i].backlog + dcs[i].avg_cap;
                    AdaptationRequest req{dcs[i].id, j, decision[i], previous, false};
                    req.catch_up = !ok && std::abs(b - decision[i]) < std::abs(b - previous);
                    requests.push_back(req);
                    hold_ok.push_back(ok);
                }
                const auto verdicts = coordinator_filter(requests, split->quota_per_coordinator,
                                                         derive_seed(coord->seed, {j, g}));
                CoordinatorLogEntry log{j, g, split->quota_per_coordinator, 0.0, 0.0, 0};
                for (std::size_t k = 0; k < group.size(); ++k) {
                    if (verdicts[k].override_used) {
                        log.override_change += requests[k].change();
                    } else if (verdicts[k].accepted) {
                        log.accepted_change += requests[k].change();
                    } else {
                        if (!hold_ok[k]) {
                            throw std::logic_error("coordinator rejected the only feasible move of dc '" +
                                                   requests[k].dc_id + "'");
                        }
                        decision[group[k]] = requests[k].previous;
                        ++log.rejected;
                    }
                }
                run.coordinator_log.push_back(log);
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            states[i] = apply_decision(states[i], decision[i], dcs[i]);
            caps[i][t] = decision[i];
        }

        opts.pinned = j > 1 ? &current : nullptr;
        opts.pinned_hours = j - 1;
        opts.solver.warm_start = j > 1 ? &current.basis : &baseline.dispatch.basis;
        auto sol = solve_opf(ctx.grid, ctx.scenario, dcs, caps, opts);
        ++run.opf_solves;
        const auto m = derive_metrics(sol, ctx.grid, ctx.scenario, dcs, caps, ctx.rates);
        for (std::size_t i = 0; i < n; ++i) {
            const auto fresh = metric_series(m, metric, dcs[i].bus);
            std::copy(fresh.begin() + static_cast<long>(t), fresh.end(), latest[i].begin() + static_cast<long>(t));
        }
        record_hour(run.metrics, m, t);
        current = std::move(sol);
    }
    run.dispatch = std::move(current);
    // hour t settles at the price of the solve that fixed it
    run.dispatch.lmp = run.metrics.lmp;
    run.plans = to_plans(dcs, caps);
    return run;
}

}  // namespace

SimulationRun run_fixed_baseline(const DayContext& ctx)
{
    std::vector<HourlySeries> caps(ctx.dcs.size());
    for (std::size_t i = 0; i < ctx.dcs.size(); ++i) {
        caps[i].fill(ctx.dcs[i].avg_cap);
    }
    OpfOptions opts;
    opts.solver = ctx.solver;
    SimulationRun run;
    run.policy = "Baseline";
    run.dispatch = solve_opf(ctx.grid, ctx.scenario, ctx.dcs, caps, opts);
    run.metrics = derive_metrics(run.dispatch, ctx.grid, ctx.scenario, ctx.dcs, caps, ctx.rates);
    run.plans = to_plans(ctx.dcs, caps);
    run.opf_solves = 1;
    return run;
}

SimulationRun run_local_online(const DayContext& ctx, const SimulationRun& baseline, MetricKind metric,
                               OnlineVariant variant, const PolicySpec& spec)
{
    return online_loop(ctx, baseline, metric, variant, spec, std::nullopt);
}

SimulationRun run_coordinated(const DayContext& ctx, const SimulationRun& baseline, MetricKind metric,
                              OnlineVariant variant, double quota, std::size_t n_coordinators, std::uint64_t seed,
                              const PolicySpec& spec)
{
    if (!(quota > 0.0)) {
        throw ValidationError("coordinator quota must be positive");
    }
    return online_loop(ctx, baseline, metric, variant, spec, Coordination{quota, n_coordinators, seed});
}

SimulationRun run_planshare(const DayContext& ctx, const SimulationRun& baseline, std::size_t plan_length,
                            const PolicySpec& spec)
{
    if (plan_length < 1 || plan_length > kHours) {
        throw ValidationError("plan length must lie in 1..24");
    }
    const auto& dcs = ctx.dcs;
    const DecisionLimits limits{spec.effective_step(), ctx.quantum};
    SimulationRun run;
    run.policy = spec.label();
    for (std::size_t i = 0; i < dcs.size(); ++i) {
        std::optional<CapacityPlan> shared;
        for (std::size_t k = 0; k < i && !shared; ++k) {
            if (dcs[k].bus == dcs[i].bus && same_decision_inputs(dcs[k], dcs[i])) {
                shared = CapacityPlan{dcs[i].id, run.plans[k].cap};
            }
        }
        run.plans.push_back(shared ? *shared : planshare_plan(baseline.dispatch.lmp.at(dcs[i].bus), dcs[i], limits));
    }
    const auto caps = run.caps();
    auto opts = anchored_options(ctx, baseline);
    run.opf_solves = baseline.opf_solves;

    if (plan_length == kHours) {
        opts.solver.warm_start = &baseline.dispatch.basis;
        run.dispatch = solve_opf(ctx.grid, ctx.scenario, dcs, caps, opts);
        ++run.opf_solves;
        run.metrics = derive_metrics(run.dispatch, ctx.grid, ctx.scenario, dcs, caps, ctx.rates);
        return run;
    }

    run.metrics.lmp.assign(ctx.grid.buses.size(), HourlySeries{});
    DispatchSolution current;
    for (std::size_t j = 1; j <= kHours; ++j) {
        const std::size_t t = j - 1;
        // the grid sees executed hours and the next plan_length hours
        std::vector<HourlySeries> visible = caps;
        for (std::size_t i = 0; i < dcs.size(); ++i) {
            for (std::size_t h = t + plan_length; h < kHours; ++h) {
                visible[i][h] = dcs[i].avg_cap;
            }
        }
        opts.pinned = j > 1 ? &current : nullptr;
        opts.pinned_hours = j - 1;
        opts.solver.warm_start = j > 1 ? &current.basis : &baseline.dispatch.basis;
        auto sol = solve_opf(ctx.grid, ctx.scenario, dcs, visible, opts);
        ++run.opf_solves;
        const auto m = derive_metrics(sol, ctx.grid, ctx.scenario, dcs, visible, ctx.rates);
        record_hour(run.metrics, m, t);
        current = std::move(sol);
    }
    run.dispatch = std::move(current);
    // hour t settles at the price of the solve that fixed it
    run.dispatch.lmp = run.metrics.lmp;
    return run;
}

SimulationRun run_policy(const DayContext& ctx, const SimulationRun& baseline, const PolicySpec& spec,
                         std::uint64_t seed)
{
    spec.validate();
    switch (spec.kind) {
    case PolicyKind::Baseline: {
        auto copy = baseline;
        copy.policy = spec.label();
        return copy;
    }
    case PolicyKind::Online:
        return run_local_online(ctx, baseline, spec.metric, spec.variant, spec);
    case PolicyKind::Coordinated:
        return run_coordinated(ctx, baseline, spec.metric, spec.variant, spec.quota, spec.coordinators, seed, spec);
    case PolicyKind::PlanShare:
        return run_planshare(ctx, baseline, spec.plan_length, spec);
    }
    throw std::logic_error("unhandled policy kind");
}

}  // namespace gridflex
