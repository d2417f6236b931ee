#include "gridflex/dc_flex.hpp"
#include "gridflex/lp.hpp"
#include "gridflex/policies.hpp"
#include "support/fixtures.hpp"
#include "support/lp_oracle.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace gridflex;

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Capacities on the 10 MW grid, optionally step-limited.
DatacenterConfig random_config(std::mt19937_64& rng)
{
    const int hi = uniform_int(rng, 4, 30);
    const int lo = uniform_int(rng, 0, hi - 2);
    const int avg = uniform_int(rng, lo + 1, hi - 1);
    std::optional<double> step;
    if (uniform_int(rng, 0, 2) > 0) {
        step = 10.0 * uniform_int(rng, 1, 8);
    }
    return test::dc_config("dc" + std::to_string(uniform_int(rng, 1, 99)), 0, 10.0 * hi, 10.0 * lo, 10.0 * avg,
                           step);
}

HourlySeries random_day(std::mt19937_64& rng)
{
    HourlySeries s{};
    std::uniform_real_distribution<double> u(-20.0, 80.0);
    for (auto& v : s) {
        v = u(rng);
    }
    if (uniform_int(rng, 0, 3) == 0) {
        s[static_cast<std::size_t>(uniform_int(rng, 0, 23))] = -100.0;
    }
    return s;
}

double day_mean(const HourlySeries& s)
{
    double sum = 0.0;
    for (double v : s) {
        sum += v;
    }
    return sum / static_cast<double>(s.size());
}

std::string describe(const PlanCheck& check)
{
    return check.ok() ? std::string("ok") : check.violations.front().message;
}

}  // namespace

TEST_SUITE("properties")
{
    TEST_CASE("planshare plans are always valid")
    {
        std::mt19937_64 rng(101);
        for (int i = 0; i < 4000; ++i) {
            const auto dc = random_config(rng);
            const auto plan = planshare_plan(random_day(rng), dc);
            const auto check = validate_plan(plan, dc);
            INFO("instance " << i << ": " << describe(check));
            REQUIRE(check.ok());
        }
    }

    TEST_CASE("avg rule sequences are always valid")
    {
        std::mt19937_64 rng(202);
        for (int i = 0; i < 4000; ++i) {
            const auto dc = random_config(rng);
            const auto day = random_day(rng);
            const double avg = day_mean(day);
            BacklogState state{dc.id, 0.0, 0, std::nullopt};
            CapacityPlan plan{dc.id, {}};
            for (std::size_t t = 0; t < kHours; ++t) {
                plan.cap[t] = avg_rule_decide(day[t], avg, state, dc);
                state = apply_decision(state, plan.cap[t], dc);
            }
            const auto check = validate_plan(plan, dc);
            INFO("instance " << i << ": " << describe(check));
            REQUIRE(check.ok());
        }
    }

    TEST_CASE("dp completions from reachable states are valid")
    {
        std::mt19937_64 rng(303);
        for (int i = 0; i < 2000; ++i) {
            const auto dc = random_config(rng);
            const auto levels = capacity_levels(dc);
            const auto k = static_cast<std::size_t>(uniform_int(rng, 0, 23));
            BacklogState state{dc.id, 0.0, 0, std::nullopt};
            CapacityPlan plan{dc.id, {}};
            for (std::size_t t = 0; t < k; ++t) {
                std::vector<double> options;
                for (double c : levels) {
                    if (decision_feasible(dc, state, c)) {
                        options.push_back(c);
                    }
                }
                REQUIRE_FALSE(options.empty());
                plan.cap[t] = options[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(options.size()) - 1))];
                state = apply_decision(state, plan.cap[t], dc);
            }
            const auto day = random_day(rng);
            PriceVector prices{MetricKind::LMPrice, k + 1, std::vector<double>(day.begin() + static_cast<long>(k), day.end())};
            const auto dp = hourly_dp(prices, dc, state.backlog, state.last_cap);
            REQUIRE(dp.plan.size() == kHours - k);
            double cost = 0.0;
            for (std::size_t t = k; t < kHours; ++t) {
                plan.cap[t] = dp.plan[t - k];
                cost += plan.cap[t] * day[t];
            }
            CHECK(dp.cost == doctest::Approx(cost));
            const auto check = validate_plan(plan, dc);
            INFO("instance " << i << " from hour " << k << ": " << describe(check));
            REQUIRE(check.ok());
        }
    }

    TEST_CASE("coordinators never exceed their quota")
    {
        std::mt19937_64 rng(404);
        std::uniform_real_distribution<double> mw(0.0, 200.0);
        for (int i = 0; i < 10000; ++i) {
            const double quota = uniform_int(rng, 0, 3) == 0 ? 0.0 : mw(rng) * 2.0;
            std::vector<AdaptationRequest> reqs(static_cast<std::size_t>(uniform_int(rng, 0, 12)));
            for (std::size_t r = 0; r < reqs.size(); ++r) {
                reqs[r].dc_id = "dc" + std::to_string(r + 1);
                reqs[r].hour = static_cast<std::size_t>(uniform_int(rng, 1, 24));
                reqs[r].previous = mw(rng);
                reqs[r].requested = mw(rng);
                reqs[r].catch_up = uniform_int(rng, 0, 9) == 0;
            }
            const auto decisions = coordinator_filter(reqs, quota, static_cast<std::uint64_t>(i));
            REQUIRE(decisions.size() == reqs.size());
            double used = 0.0;
            for (std::size_t r = 0; r < reqs.size(); ++r) {
                if (reqs[r].catch_up) {
                    CHECK(decisions[r].accepted);
                }
                if (decisions[r].accepted && !decisions[r].override_used) {
                    used += reqs[r].change();
                }
                if (decisions[r].override_used) {
                    CHECK(decisions[r].accepted);
                    CHECK(reqs[r].catch_up);
                }
            }
            REQUIRE(used <= quota + 1e-9);
        }
    }

    TEST_CASE("avg rule ignores the metric's scale")
    {
        std::mt19937_64 rng(505);
        for (int i = 0; i < 3000; ++i) {
            const auto dc = random_config(rng);
            BacklogState state{dc.id, 0.0, 0, std::nullopt};
            const auto k = static_cast<std::size_t>(uniform_int(rng, 0, 23));
            for (std::size_t t = 0; t < k; ++t) {
                state = apply_decision(state, avg_rule_decide(uniform_int(rng, -50, 100), 30.0, state, dc), dc);
            }
            const double now = uniform_int(rng, -100, 200);
            const double avg = uniform_int(rng, -10, 100);
            const double base = avg_rule_decide(now, avg, state, dc);
            for (double a : {2.0, 3.0, 10.0, 0.5}) {
                REQUIRE(avg_rule_decide(a * now, a * avg, state, dc) == base);
            }
        }
    }

    TEST_CASE("blended and partial-horizon price vectors")
    {
        std::mt19937_64 rng(606);
        for (int i = 0; i < 500; ++i) {
            const auto day = random_day(rng);
            const auto first = blend_prices(day, 999.0, 1);
            CHECK(first.start_hour == 1);
            CHECK(first.values == std::vector<double>(day.begin(), day.end()));

            const auto j = static_cast<std::size_t>(uniform_int(rng, 2, 24));
            const auto blended = blend_prices(day, -7.5, j);
            REQUIRE(blended.values.size() == kHours + 1 - j);
            CHECK(blended.values[0] == -7.5);
            for (std::size_t t = 1; t < blended.values.size(); ++t) {
                CHECK(blended.values[t] == day[j - 1 + t]);
            }

            const auto h = static_cast<std::size_t>(uniform_int(rng, static_cast<int>(kHours + 1 - j), 30));
            const auto partial = partial_horizon_prices(day, h, j);
            CHECK(partial.start_hour == j);
            CHECK(partial.values == std::vector<double>(day.begin() + static_cast<long>(j - 1), day.end()));
        }
    }

    TEST_CASE("completion test agrees with exhaustive search")
    {
        std::mt19937_64 rng(707);
        for (int i = 0; i < 3000; ++i) {
            const int hi = uniform_int(rng, 1, 6);
            const int lo = uniform_int(rng, 0, hi - 1);
            const int avg = uniform_int(rng, lo, hi);
            std::optional<double> step;
            if (uniform_int(rng, 0, 1) == 1) {
                step = uniform_int(rng, 1, 3);
            }
            const auto dc = test::dc_config("x", 0, hi, lo, avg, step);
            const int hours = uniform_int(rng, 0, 4);
            const int backlog = uniform_int(rng, -10, 10);
            std::optional<double> last;
            if (uniform_int(rng, 0, 2) > 0) {
                last = uniform_int(rng, lo, hi);
            }

            // Odometer over integer capacity sequences.
            bool reachable = false;
            std::vector<int> seq(static_cast<std::size_t>(hours), lo);
            while (!reachable) {
                double b = backlog;
                bool ok = true;
                std::optional<double> prev = last;
                for (int c : seq) {
                    if (step && prev && std::abs(c - *prev) > *step) {
                        ok = false;
                    }
                    b += avg - c;
                    prev = c;
                }
                reachable = ok && b == 0.0;
                std::size_t p = 0;
                while (p < seq.size() && seq[p] == hi) {
                    seq[p++] = lo;
                }
                if (p == seq.size()) {
                    break;
                }
                ++seq[p];
            }
            INFO("instance " << i << ": [" << lo << ", " << hi << "] avg " << avg << " hours " << hours
                             << " backlog " << backlog);
            REQUIRE(can_complete(dc, backlog, static_cast<std::size_t>(hours), last) == reachable);
        }
    }

    TEST_CASE("lp solves are deterministic and scale with the costs")
    {
        std::mt19937_64 rng(808);
        for (int i = 0; i < 60; ++i) {
            const auto program = test::random_feasible_lp(rng, 8, 6);
            const auto a = lp::solve(program);
            const auto b = lp::solve(program);
            REQUIRE(a.optimal());
            CHECK(a.primal == b.primal);
            CHECK(a.dual == b.dual);
            CHECK(a.objective == b.objective);

            for (double k : {2.0, 0.25}) {
                auto scaled = program;
                for (std::size_t v = 0; v < scaled.num_variables(); ++v) {
                    scaled.set_cost(lp::VariableId{v}, k * program.variable(lp::VariableId{v}).cost);
                }
                const auto s = lp::solve(scaled);
                REQUIRE(s.optimal());
                CHECK(s.objective == doctest::Approx(k * a.objective).epsilon(1e-9));
                CHECK(lp::check_certificate(scaled, s).passed);
                for (std::size_t r = 0; r < a.dual.size(); ++r) {
                    CHECK(s.dual[r] == doctest::Approx(k * a.dual[r]).epsilon(1e-9).scale(1.0));
                }
            }
        }
    }

    TEST_CASE("plans survive a csv round trip")
    {
        std::mt19937_64 rng(909);
        std::uniform_real_distribution<double> u(0.0, 500.0);
        for (int i = 0; i < 200; ++i) {
            std::vector<CapacityPlan> plans(static_cast<std::size_t>(uniform_int(rng, 1, 5)));
            for (std::size_t p = 0; p < plans.size(); ++p) {
                plans[p].dc_id = "dc" + std::to_string(p + 1);
                for (auto& c : plans[p].cap) {
                    c = uniform_int(rng, 0, 1) ? u(rng) : std::round(u(rng));
                }
            }
            std::stringstream buf;
            write_plans(buf, plans);
            REQUIRE(parse_plans(buf) == plans);
        }
    }
}
