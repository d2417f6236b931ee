#include "gridflex/policies.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace gridflex {

std::string_view to_string(MetricKind kind) noexcept
{
    switch (kind) {
    case MetricKind::ACI: return "ACI";
    case MetricKind::Price: return "Price";
    case MetricKind::LMPrice: return "LMPrice";
    }
    return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view text) noexcept
{
    for (auto kind : {MetricKind::ACI, MetricKind::Price, MetricKind::LMPrice}) {
        if (to_string(kind) == text) {
            return kind;
        }
    }
    return std::nullopt;
}

namespace {

std::optional<double> effective_step(const DatacenterConfig& config, const DecisionLimits& limits)
{
    return limits.step_size ? limits.step_size : config.step_size;
}

// integer offsets k with avg + k * quantum inside the range
std::vector<long> level_offsets(const DatacenterConfig& config, double quantum)
{
    if (!(quantum > 0.0)) {
        throw ValidationError("capacity quantum must be positive");
    }
    const long lo = static_cast<long>(std::ceil((config.cap_min - config.avg_cap) / quantum - 1e-9));
    const long hi = static_cast<long>(std::floor((config.cap_max - config.avg_cap) / quantum + 1e-9));
    std::vector<long> out;
    for (long k = lo; k <= hi; ++k) {
        out.push_back(k);
    }
    return out;
}

// toward avg first, then the lower capacity
bool preferred(double a, double b, double avg)
{
    const double da = std::abs(a - avg);
    const double db = std::abs(b - avg);
    if (da != db) {
        return da < db;
    }
    return a < b;
}

}  // namespace

std::vector<double> capacity_levels(const DatacenterConfig& config, double quantum)
{
    std::vector<double> out;
    for (long k : level_offsets(config, quantum)) {
        out.push_back(config.avg_cap + static_cast<double>(k) * quantum);
    }
    return out;
}

double avg_rule_decide(double metric_now, double metric_daily_avg, const BacklogState& state,
                       const DatacenterConfig& config, const DecisionLimits& limits)
{
    const auto step = effective_step(config, limits);
    const double avg = config.avg_cap;
    const double delta =
        std::min({(config.cap_max - config.cap_min) / 2.0, avg - config.cap_min, config.cap_max - avg});
    // cap * now + (backlog + avg - cap) * daily_avg, dropping the cap-free part
    const double slope = metric_now - metric_daily_avg;

    auto pick = [&](const std::vector<double>& candidates) -> std::optional<double> {
        std::optional<double> best;
        double best_value = 0.0;
        for (double c : candidates) {
            if (!decision_feasible(config, state, c, step)) {
                continue;
            }
            const double value = slope * (c - avg);
            if (!best || value < best_value || (value == best_value && preferred(c, *best, avg))) {
                best = c;
                best_value = value;
            }
        }
        return best;
    };

    std::vector<double> candidates{avg - delta, avg, avg + delta};
    if (step && state.last_cap) {
        for (auto& c : candidates) {
            c = std::clamp(c, *state.last_cap - *step, *state.last_cap + *step);
            c = std::clamp(c, config.cap_min, config.cap_max);
        }
    }
    if (auto c = pick(candidates)) {
        return *c;
    }
    if (auto c = pick(capacity_levels(config, limits.quantum))) {
        return *c;
    }
    throw InfeasibleError("dc '" + config.id + "' hour " + std::to_string(state.hour + 1) +
                          ": no capacity keeps the final backlog reachable (backlog " + text::fmt(state.backlog) +
                          " MWh)");
}

DpResult hourly_dp(const PriceVector& prices, const DatacenterConfig& config, double start_backlog,
                   std::optional<double> start_cap, const DecisionLimits& limits)
{
    const std::size_t horizon = prices.values.size();
    if (horizon == 0 || prices.start_hour < 1 || prices.start_hour + horizon != kHours + 1) {
        throw ValidationError("price vector must cover hours start_hour..24");
    }
    for (double p : prices.values) {
        if (!std::isfinite(p)) {
            throw ValidationError("price vector holds a non-finite value");
        }
    }
    const double q = limits.quantum;
    const auto offsets = level_offsets(config, q);
    if (offsets.empty()) {
        throw InfeasibleError("dc '" + config.id + "': no capacity level on the quantum grid");
    }
    const double b_units_real = start_backlog / q;
    const long b0 = std::lround(b_units_real);
    if (std::abs(b_units_real - static_cast<double>(b0)) > 1e-9 * std::max(1.0, std::abs(b_units_real))) {
        throw ValidationError("start backlog " + text::fmt(start_backlog) + " is not a multiple of the quantum");
    }
    const auto step = effective_step(config, limits);
    const std::size_t levels = offsets.size();
    auto value = [&](std::size_t i) { return config.avg_cap + static_cast<double>(offsets[i]) * q; };
    auto step_ok = [&](double from, double to) { return !step || std::abs(to - from) <= *step + kPlanTolerance; };

    long max_dev = 0;
    for (long k : offsets) {
        max_dev = std::max(max_dev, std::abs(k));
    }
    const long span = std::abs(b0) + static_cast<long>(horizon) * max_dev;
    const std::size_t width = static_cast<std::size_t>(2 * span + 1);
    const std::size_t prevs = step ? levels : 1;  // cost-to-go only depends on the previous level under a step limit
    constexpr double inf = std::numeric_limits<double>::infinity();

    // ctg[h][prev][b]: best cost of hours h..H-1 given the level of hour h-1 and backlog b before hour h
    std::vector<double> ctg((horizon + 1) * prevs * width, inf);
    auto at = [&](std::size_t h, std::size_t prev, long b) -> double& {
        return ctg[(h * prevs + prev) * width + static_cast<std::size_t>(b + span)];
    };
    for (std::size_t prev = 0; prev < prevs; ++prev) {
        at(horizon, prev, 0) = 0.0;
    }
    // levels reachable from each previous level; offsets are consecutive so the window is contiguous
    std::vector<std::size_t> first(prevs, 0);
    std::vector<std::size_t> last(prevs, levels);
    if (step) {
        for (std::size_t prev = 0; prev < prevs; ++prev) {
            while (!step_ok(value(prev), value(first[prev]))) {
                ++first[prev];
            }
            while (!step_ok(value(prev), value(last[prev] - 1))) {
                --last[prev];
            }
        }
    }
    for (std::size_t h = horizon; h-- > 1;) {
        const long reach = static_cast<long>(horizon - h) * max_dev;  // |b| beyond this cannot return to 0
        const long from_start = static_cast<long>(h) * max_dev;       // nor can b stray further from b0
        const long b_lo = std::max({-reach, -span, b0 - from_start});
        const long b_hi = std::min({reach, span, b0 + from_start});
        for (std::size_t prev = 0; prev < prevs; ++prev) {
            for (long b = b_lo; b <= b_hi; ++b) {
                double best = inf;
                for (std::size_t i = first[prev]; i < last[prev]; ++i) {
                    const long nb = b - offsets[i];
                    if (nb < -span || nb > span) {
                        continue;
                    }
                    const double rest = at(h + 1, step ? i : 0, nb);
                    if (rest == inf) {
                        continue;
                    }
                    best = std::min(best, value(i) * prices.values[h] + rest);
                }
                at(h, prev, b) = best;
            }
        }
    }

    // forward pass with tie-breaking
    DpResult result;
    long b = b0;
    std::optional<double> prev_cap = start_cap;
    std::size_t prev_index = 0;
    for (std::size_t h = 0; h < horizon; ++h) {
        std::optional<std::size_t> chosen;
        double chosen_total = inf;
        std::vector<double> totals(levels, inf);
        for (std::size_t i = 0; i < levels; ++i) {
            if (h == 0 ? (prev_cap && !step_ok(*prev_cap, value(i))) : (step && !step_ok(value(prev_index), value(i)))) {
                continue;
            }
            const long nb = b - offsets[i];
            if (nb < -span || nb > span) {
                continue;
            }
            const double rest = at(h + 1, step ? i : 0, nb);
            if (rest == inf) {
                continue;
            }
            totals[i] = value(i) * prices.values[h] + rest;
            chosen_total = std::min(chosen_total, totals[i]);
        }
        if (chosen_total == inf) {
            throw InfeasibleError("dc '" + config.id + "': no feasible completion from hour " +
                                  std::to_string(prices.start_hour) + " with backlog " + text::fmt(start_backlog) +
                                  " MWh");
        }
        const double tol = 1e-9 * std::max(1.0, std::abs(chosen_total));
        for (std::size_t i = 0; i < levels; ++i) {
            if (totals[i] <= chosen_total + tol && (!chosen || preferred(value(i), value(*chosen), config.avg_cap))) {
                chosen = i;
            }
        }
        const double cap = value(*chosen);
        result.plan.push_back(cap);
        result.cost += cap * prices.values[h];
        b -= offsets[*chosen];
        prev_index = *chosen;
        prev_cap = cap;
    }
    return result;
}

PriceVector blend_prices(const HourlySeries& day_ahead, double realized_now, std::size_t hour, MetricKind kind)
{
    if (hour < 1 || hour > kHours) {
        throw ValidationError("hour must lie in 1..24");
    }
    PriceVector out{kind, hour, std::vector<double>(day_ahead.begin() + static_cast<long>(hour - 1), day_ahead.end())};
    if (hour != 1) {
        out.values.front() = realized_now;
    }
    return out;
}

PriceVector partial_horizon_prices(const HourlySeries& day_ahead, std::size_t horizon_hours, std::size_t hour,
                                   MetricKind kind)
{
    if (hour < 1 || hour > kHours) {
        throw ValidationError("hour must lie in 1..24");
    }
    if (horizon_hours < 1) {
        throw ValidationError("horizon must be at least one hour");
    }
    const double daily = mean(day_ahead);
    PriceVector out{kind, hour, {}};
    for (std::size_t t = hour - 1; t < kHours; ++t) {
        out.values.push_back(t - (hour - 1) < horizon_hours ? day_ahead[t] : daily);
    }
    return out;
}

std::vector<FilterDecision> coordinator_filter(const std::vector<AdaptationRequest>& requests, double quota,
                                               std::uint64_t seed)
{
    if (!(quota >= 0.0)) {
        throw ValidationError("coordinator quota must be nonnegative");
    }
    std::vector<std::size_t> order(requests.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<FilterDecision> out(requests.size());
    double left = quota;
    for (std::size_t k : order) {
        const auto& req = requests[k];
        if (req.catch_up) {
            out[k] = {true, true};
            continue;
        }
        const double change = req.change();
        if (change <= left) {
            out[k].accepted = true;
            left -= change;
        }
    }
    return out;
}

QuotaSplit split_quota(double total_quota, std::size_t n_coordinators, std::size_t n_datacenters)
{
    if (n_coordinators < 1) {
        throw ValidationError("need at least one coordinator");
    }
    if (!(total_quota >= 0.0)) {
        throw ValidationError("total quota must be nonnegative");
    }
    QuotaSplit split;
    split.quota_per_coordinator = total_quota / static_cast<double>(n_coordinators);
    const std::size_t base = n_datacenters / n_coordinators;
    const std::size_t extra = n_datacenters % n_coordinators;
    std::size_t next = 0;
    for (std::size_t c = 0; c < n_coordinators; ++c) {
        std::vector<std::size_t> group;
        for (std::size_t k = 0; k < base + (c < extra ? 1 : 0); ++k) {
            group.push_back(next++);
        }
        split.groups.push_back(std::move(group));
    }
    return split;
}

CapacityPlan planshare_plan(const HourlySeries& day_ahead_lmp, const DatacenterConfig& config,
                            const DecisionLimits& limits)
{
    PriceVector prices{MetricKind::LMPrice, 1, std::vector<double>(day_ahead_lmp.begin(), day_ahead_lmp.end())};
    const auto dp = hourly_dp(prices, config, 0.0, config.avg_cap, limits);
    CapacityPlan plan{config.id, {}};
    std::copy(dp.plan.begin(), dp.plan.end(), plan.cap.begin());
    return plan;
}

}  // namespace gridflex
