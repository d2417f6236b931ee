#include "gridflex/grid_model.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace gridflex {

double mean(const HourlySeries& series) noexcept
{
    return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(kHours);
}

namespace {

constexpr std::array<std::pair<FuelKind, std::string_view>, 10> kFuelNames{{
    {FuelKind::Coal, "coal"},
    {FuelKind::Gas, "gas"},
    {FuelKind::Oil, "oil"},
    {FuelKind::DualFuel, "dual-fuel"},
    {FuelKind::Nuclear, "nuclear"},
    {FuelKind::Geothermal, "geothermal"},
    {FuelKind::Biomass, "biomass"},
    {FuelKind::Hydro, "hydro"},
    {FuelKind::Wind, "wind"},
    {FuelKind::Import, "import"},
}};

}  // namespace

std::string_view to_string(FuelKind fuel) noexcept
{
    for (const auto& [kind, name] : kFuelNames) {
        if (kind == fuel) {
            return name;
        }
    }
    return "unknown";
}

std::optional<FuelKind> parse_fuel(std::string_view text) noexcept
{
    for (const auto& [kind, name] : kFuelNames) {
        if (name == text) {
            return kind;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> GridTopology::find_bus(std::string_view id) const noexcept
{
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

void GridTopology::validate() const
{
    auto fail = [](const std::string& what) { throw ValidationError(what); };
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto& b = buses[i];
        if (b.id.empty()) {
            fail("bus " + std::to_string(i) + " has an empty id");
        }
        if (!ids.insert(b.id).second) {
            fail("bus '" + b.id + "' is declared twice");
        }
        if (!(b.angle_min <= b.angle_max)) {
            fail("bus '" + b.id + "' has angle_min > angle_max");
        }
    }
    auto check_bus = [&](std::size_t bus, const std::string& what) {
        if (bus >= buses.size()) {
            fail(what + " references an undeclared bus");
        }
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const std::string name = "line " + std::to_string(i);
        check_bus(l.from, name);
        check_bus(l.to, name);
        if (!(l.susceptance > 0.0)) {
            fail(name + " has non-positive susceptance");
        }
        if (!(l.flow_limit > 0.0)) {
            fail(name + " has non-positive flow limit");
        }
    }
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const auto& g = generators[i];
        const std::string name = "generator " + std::to_string(i);
        check_bus(g.bus, name);
        if (!(g.capacity >= 0.0) || !(g.ramp_up >= 0.0) || !(g.ramp_down >= 0.0) || !(g.cost >= 0.0)) {
            fail(name + " has a negative capacity, ramp limit or cost");
        }
    }
    for (std::size_t i = 0; i < imports.size(); ++i) {
        check_bus(imports[i].bus, "import " + std::to_string(i));
        if (!(imports[i].curtail_penalty >= 0.0)) {
            fail("import " + std::to_string(i) + " has a negative penalty");
        }
    }
    for (std::size_t i = 0; i < renewables.size(); ++i) {
        check_bus(renewables[i].bus, "renewable " + std::to_string(i));
        if (!(renewables[i].curtail_penalty >= 0.0)) {
            fail("renewable " + std::to_string(i) + " has a negative penalty");
        }
    }
    for (std::size_t i = 0; i < wind_farms.size(); ++i) {
        check_bus(wind_farms[i].bus, "wind farm " + std::to_string(i));
        if (!(wind_farms[i].curtail_penalty >= 0.0)) {
            fail("wind farm " + std::to_string(i) + " has a negative penalty");
        }
    }
    for (std::size_t i = 0; i < loads.size(); ++i) {
        check_bus(loads[i].bus, "load " + std::to_string(i));
        if (!(loads[i].shed_penalty >= 0.0)) {
            fail("load " + std::to_string(i) + " has a negative penalty");
        }
    }
}

bool GridTopology::connected() const
{
    if (buses.empty()) {
        return true;
    }
    std::vector<std::vector<std::size_t>> adj(buses.size());
    for (const auto& l : lines) {
        adj[l.from].push_back(l.to);
        adj[l.to].push_back(l.from);
    }
    std::vector<bool> seen(buses.size(), false);
    std::queue<std::size_t> todo;
    todo.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!todo.empty()) {
        const auto b = todo.front();
        todo.pop();
        for (auto next : adj[b]) {
            if (!seen[next]) {
                seen[next] = true;
                ++count;
                todo.push(next);
            }
        }
    }
    return count == buses.size();
}

double GridTopology::thermal_capacity() const noexcept
{
    double total = 0.0;
    for (const auto& g : generators) {
        total += g.capacity;
    }
    return total;
}

// ---------------------------------------------------------------------------
// grid file

namespace {

enum class Section { None, Buses, Lines, Generators, Imports, Renewables, Wind, Loads };

std::optional<Section> parse_section(std::string_view name)
{
    static const std::map<std::string_view, Section> sections{
        {"buses", Section::Buses},     {"lines", Section::Lines},           {"generators", Section::Generators},
        {"imports", Section::Imports}, {"renewables", Section::Renewables}, {"wind", Section::Wind},
        {"loads", Section::Loads},
    };
    auto it = sections.find(name);
    if (it == sections.end()) {
        return std::nullopt;
    }
    return it->second;
}

}  // namespace

GridTopology parse_grid(std::istream& in, const std::string& source)
{
    GridTopology grid;
    Section section = Section::None;
    std::string raw;
    std::size_t line_no = 0;

    struct PendingRef {
        std::string bus;
        std::size_t line;
        std::string element;
    };
    // one list per element kind, resolved once every bus is known
    std::array<std::vector<PendingRef>, 6> refs;
    auto bus_ref = [&](std::size_t kind, const std::string& id, const std::string& element) -> std::size_t {
        refs[kind].push_back({id, line_no, element});
        return 0;
    };

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view text = text::trim(text::strip_comment(raw));
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ParseError(source, line_no, "unterminated section header");
            }
            auto parsed = parse_section(text::trim(text.substr(1, text.size() - 2)));
            if (!parsed) {
                throw ParseError(source, line_no, "unknown section '" + std::string(text) + "'");
            }
            section = *parsed;
            continue;
        }
        const auto fields = text::split_fields(text);
        auto expect = [&](std::size_t lo, std::size_t hi, const char* what) {
            if (fields.size() < lo || fields.size() > hi) {
                throw ParseError(source, line_no,
                                 std::string(what) + " record needs " + std::to_string(lo) +
                                     (lo == hi ? "" : "-" + std::to_string(hi)) + " fields, got " +
                                     std::to_string(fields.size()));
            }
        };
        auto num = [&](std::size_t i, const char* field) {
            auto v = text::parse_double(fields[i]);
            if (!v) {
                throw ParseError(source, line_no,
                                 std::string("field '") + field + "' is not a number: '" + fields[i] + "'");
            }
            return *v;
        };
        switch (section) {
        case Section::None:
            throw ParseError(source, line_no, "record outside of any section");
        case Section::Buses:
            expect(3, 3, "bus");
            grid.buses.push_back(Bus{fields[0], num(1, "angle_min"), num(2, "angle_max")});
            break;
        case Section::Lines: {
            expect(4, 4, "line");
            const std::string element = "line " + std::to_string(grid.lines.size());
            Line l;
            l.from = bus_ref(0, fields[0], element);
            l.to = bus_ref(0, fields[1], element);
            l.susceptance = num(2, "susceptance");
            l.flow_limit = num(3, "flow_limit");
            grid.lines.push_back(l);
            break;
        }
        case Section::Generators: {
            expect(6, 6, "generator");
            Generator g;
            g.bus = bus_ref(1, fields[0], "generator " + std::to_string(grid.generators.size()));
            auto fuel = parse_fuel(fields[1]);
            if (!fuel) {
                throw ParseError(source, line_no, "unknown fuel kind '" + fields[1] + "'");
            }
            g.fuel = *fuel;
            g.cost = num(2, "cost");
            g.capacity = num(3, "capacity");
            g.ramp_up = num(4, "ramp_up");
            g.ramp_down = num(5, "ramp_down");
            grid.generators.push_back(g);
            break;
        }
        case Section::Imports:
            expect(2, 2, "import");
            grid.imports.push_back(
                ImportPoint{bus_ref(2, fields[0], "import " + std::to_string(grid.imports.size())), num(1, "penalty")});
            break;
        case Section::Renewables: {
            expect(2, 3, "renewable");
            Renewable r;
            r.bus = bus_ref(3, fields[0], "renewable " + std::to_string(grid.renewables.size()));
            r.curtail_penalty = num(1, "penalty");
            if (fields.size() == 3) {
                auto kind = parse_fuel(fields[2]);
                if (!kind) {
                    throw ParseError(source, line_no, "unknown renewable kind '" + fields[2] + "'");
                }
                r.kind = *kind;
            }
            grid.renewables.push_back(r);
            break;
        }
        case Section::Wind:
            expect(2, 2, "wind");
            grid.wind_farms.push_back(
                WindFarm{bus_ref(4, fields[0], "wind farm " + std::to_string(grid.wind_farms.size())), num(1, "penalty")});
            break;
        case Section::Loads:
            expect(2, 2, "load");
            grid.loads.push_back(
                Load{bus_ref(5, fields[0], "load " + std::to_string(grid.loads.size())), num(1, "penalty")});
            break;
        }
    }

    std::array<std::size_t, 6> next{};
    auto resolve = [&](std::size_t kind, std::size_t& bus) {
        const auto& ref = refs[kind].at(next[kind]++);
        auto found = grid.find_bus(ref.bus);
        if (!found) {
            throw ValidationError(source + ":" + std::to_string(ref.line) + ": " + ref.element +
                                  " references undeclared bus '" + ref.bus + "'");
        }
        bus = *found;
    };
    for (auto& l : grid.lines) {
        resolve(0, l.from);
        resolve(0, l.to);
    }
    for (auto& g : grid.generators) {
        resolve(1, g.bus);
    }
    for (auto& i : grid.imports) {
        resolve(2, i.bus);
    }
    for (auto& r : grid.renewables) {
        resolve(3, r.bus);
    }
    for (auto& w : grid.wind_farms) {
        resolve(4, w.bus);
    }
    for (auto& l : grid.loads) {
        resolve(5, l.bus);
    }
    grid.validate();
    return grid;
}

GridTopology load_grid(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open grid file '" + path.string() + "'");
    }
    return parse_grid(in, path.string());
}

void write_grid(std::ostream& out, const GridTopology& grid)
{
    using text::fmt;
    const auto& buses = grid.buses;
    out << "# gridflex grid file\n[buses]\n# id, angle_min, angle_max\n";
    for (const auto& b : buses) {
        out << b.id << ", " << fmt(b.angle_min) << ", " << fmt(b.angle_max) << '\n';
    }
    out << "\n[lines]\n# from, to, susceptance, flow_limit\n";
    for (const auto& l : grid.lines) {
        out << buses[l.from].id << ", " << buses[l.to].id << ", " << fmt(l.susceptance) << ", "
            << fmt(l.flow_limit) << '\n';
    }
    out << "\n[generators]\n# bus, fuel, cost, capacity, ramp_up, ramp_down\n";
    for (const auto& g : grid.generators) {
        out << buses[g.bus].id << ", " << to_string(g.fuel) << ", " << fmt(g.cost) << ", " << fmt(g.capacity)
            << ", " << fmt(g.ramp_up) << ", " << fmt(g.ramp_down) << '\n';
    }
    out << "\n[imports]\n# bus, curtail_penalty\n";
    for (const auto& i : grid.imports) {
        out << buses[i.bus].id << ", " << fmt(i.curtail_penalty) << '\n';
    }
    out << "\n[renewables]\n# bus, curtail_penalty, kind\n";
    for (const auto& r : grid.renewables) {
        out << buses[r.bus].id << ", " << fmt(r.curtail_penalty) << ", " << to_string(r.kind) << '\n';
    }
    out << "\n[wind]\n# bus, curtail_penalty\n";
    for (const auto& w : grid.wind_farms) {
        out << buses[w.bus].id << ", " << fmt(w.curtail_penalty) << '\n';
    }
    out << "\n[loads]\n# bus, shed_penalty\n";
    for (const auto& l : grid.loads) {
        out << buses[l.bus].id << ", " << fmt(l.shed_penalty) << '\n';
    }
}

void save_grid(const std::filesystem::path& path, const GridTopology& grid)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write grid file '" + path.string() + "'");
    }
    write_grid(out, grid);
}

// ---------------------------------------------------------------------------
// day types and scenarios

std::string DayType::name() const
{
    static constexpr std::array<std::string_view, 4> seasons{"Spring", "Summer", "Fall", "Winter"};
    std::string out(seasons[static_cast<std::size_t>(season)]);
    out += kind == DayKind::Weekday ? "WD" : "WE";
    return out;
}

std::array<DayType, 8> all_day_types() noexcept
{
    std::array<DayType, 8> out{};
    std::size_t i = 0;
    for (auto season : {Season::Spring, Season::Summer, Season::Fall, Season::Winter}) {
        out[i++] = DayType{season, DayKind::Weekday};
        out[i++] = DayType{season, DayKind::Weekend};
    }
    return out;
}

std::optional<DayType> parse_day_type(std::string_view name) noexcept
{
    for (const auto& dt : all_day_types()) {
        if (dt.name() == name) {
            return dt;
        }
    }
    return std::nullopt;
}

double DayScenario::total_base_load(std::size_t hour) const noexcept
{
    double s = 0.0;
    for (const auto& series : base_load) {
        s += series[hour];
    }
    return s;
}

double DayScenario::total_wind(std::size_t hour) const noexcept
{
    double s = 0.0;
    for (const auto& series : wind) {
        s += series[hour];
    }
    return s;
}

double DayScenario::wind_penetration() const
{
    double load = 0.0;
    double w = 0.0;
    for (std::size_t t = 0; t < kHours; ++t) {
        load += total_base_load(t);
        w += total_wind(t);
    }
    if (load <= 0.0) {
        throw UndefinedMetric("wind penetration is undefined with zero base demand");
    }
    return w / load;
}

void DayScenario::validate(const GridTopology& grid) const
{
    auto check = [](const std::vector<HourlySeries>& series, std::size_t expected, const char* what) {
        if (series.size() != expected) {
            throw ValidationError(std::string("scenario has ") + std::to_string(series.size()) + " " + what +
                                  " series, grid has " + std::to_string(expected));
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            for (std::size_t t = 0; t < kHours; ++t) {
                if (!(series[i][t] >= 0.0) || !std::isfinite(series[i][t])) {
                    throw ValidationError(std::string(what) + " " + std::to_string(i) + " hour " +
                                          std::to_string(t + 1) + " is negative or not finite");
                }
            }
        }
    };
    check(base_load, grid.loads.size(), "load");
    check(imports, grid.imports.size(), "import");
    check(renewables, grid.renewables.size(), "renewable");
    check(wind, grid.wind_farms.size(), "wind");
}

DayScenario parse_scenario(std::istream& in, const GridTopology& grid, DayType day_type, const std::string& source)
{
    DayScenario sc;
    sc.day_type = day_type;
    sc.base_load.resize(grid.loads.size());
    sc.imports.resize(grid.imports.size());
    sc.renewables.resize(grid.renewables.size());
    sc.wind.resize(grid.wind_farms.size());
    std::vector<std::vector<bool>> seen{std::vector<bool>(sc.base_load.size()), std::vector<bool>(sc.imports.size()),
                                        std::vector<bool>(sc.renewables.size()), std::vector<bool>(sc.wind.size())};

    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view text = text::trim(raw);
        if (text.empty()) {
            continue;
        }
        const auto fields = text::split_fields(text);
        if (!header) {
            if (fields.size() != kHours + 2 || fields[0] != "series" || fields[1] != "element_id") {
                throw ParseError(source, line_no, "expected header 'series,element_id,h1..h24'");
            }
            header = true;
            continue;
        }
        if (fields.size() != kHours + 2) {
            throw ParseError(source, line_no, "expected 26 fields, got " + std::to_string(fields.size()));
        }
        std::size_t kind = 0;
        std::vector<HourlySeries>* target = nullptr;
        if (fields[0] == "load") {
            kind = 0;
            target = &sc.base_load;
        } else if (fields[0] == "import") {
            kind = 1;
            target = &sc.imports;
        } else if (fields[0] == "renewable") {
            kind = 2;
            target = &sc.renewables;
        } else if (fields[0] == "wind") {
            kind = 3;
            target = &sc.wind;
        } else {
            throw ParseError(source, line_no, "unknown series '" + fields[0] + "'");
        }
        auto id = text::parse_index(fields[1]);
        if (!id || *id >= target->size()) {
            throw ParseError(source, line_no, "element_id '" + fields[1] + "' out of range for " + fields[0]);
        }
        if (seen[kind][*id]) {
            throw ParseError(source, line_no, fields[0] + " " + fields[1] + " given twice");
        }
        seen[kind][*id] = true;
        for (std::size_t t = 0; t < kHours; ++t) {
            auto v = text::parse_double(fields[t + 2]);
            if (!v) {
                throw ParseError(source, line_no, "h" + std::to_string(t + 1) + " is not a number");
            }
            (*target)[*id][t] = *v;
        }
    }
    static constexpr std::array<const char*, 4> names{"load", "import", "renewable", "wind"};
    for (std::size_t k = 0; k < seen.size(); ++k) {
        for (std::size_t i = 0; i < seen[k].size(); ++i) {
            if (!seen[k][i]) {
                throw ParseError(source, line_no, std::string("missing ") + names[k] + " series " + std::to_string(i));
            }
        }
    }
    sc.validate(grid);
    return sc;
}

DayScenario load_scenario(const std::filesystem::path& path, const GridTopology& grid, DayType day_type)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open scenario file '" + path.string() + "'");
    }
    return parse_scenario(in, grid, day_type, path.string());
}

void write_scenario(std::ostream& out, const DayScenario& scenario)
{
    out << "series,element_id";
    for (std::size_t t = 1; t <= kHours; ++t) {
        out << ",h" << t;
    }
    out << '\n';
    auto rows = [&](const std::vector<HourlySeries>& series, const char* name) {
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << name << ',' << i;
            for (double v : series[i]) {
                out << ',' << text::fmt(v);
            }
            out << '\n';
        }
    };
    rows(scenario.base_load, "load");
    rows(scenario.imports, "import");
    rows(scenario.renewables, "renewable");
    rows(scenario.wind, "wind");
}

WindScaling scale_wind(const DayScenario& raw, double target_penetration)
{
    if (!(target_penetration > 0.0 && target_penetration < 1.0)) {
        throw ValidationError("wind penetration must lie in (0, 1)");
    }
    const double current = raw.wind_penetration();
    if (!(current > 0.0)) {
        throw UndefinedMetric("cannot scale wind: raw wind generation is zero");
    }
    WindScaling out{raw, target_penetration / current};
    for (auto& series : out.scenario.wind) {
        for (auto& v : series) {
            v *= out.factor;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// synthetic generation

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Distinct buses while possible, then with replacement.
std::vector<std::size_t> sample_buses(std::mt19937_64& rng, std::size_t n_buses, std::size_t count,
                                      const std::set<std::size_t>& avoid)
{
    std::vector<std::size_t> pool;
    for (std::size_t b = 0; b < n_buses; ++b) {
        if (!avoid.contains(b)) {
            pool.push_back(b);
        }
    }
    if (pool.empty()) {
        for (std::size_t b = 0; b < n_buses; ++b) {
            pool.push_back(b);
        }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(i < pool.size() ? pool[i] : pool[pick(rng, pool.size())]);
    }
    return out;
}

}  // namespace

SyntheticGridSpec scaled_synthetic_spec(std::size_t buses)
{
    SyntheticGridSpec spec;
    if (buses < 2) {
        throw ValidationError("synthetic grid needs at least 2 buses");
    }
    const double f = static_cast<double>(buses) / static_cast<double>(spec.buses);
    auto scale = [&](std::size_t n, std::size_t lo) {
        const auto v = static_cast<std::size_t>(std::lround(static_cast<double>(n) * f));
        return std::max(lo, v);
    };
    spec.generators = scale(spec.generators, 1);
    spec.wind_farms = scale(spec.wind_farms, 1);
    spec.loads = std::min(buses, scale(spec.loads, 1));
    spec.imports = scale(spec.imports, 0);
    spec.renewables = scale(spec.renewables, 0);
    spec.extra_lines = scale(spec.extra_lines, 0);
    spec.thermal_capacity *= f;
    spec.buses = buses;
    return spec;
}

GridTopology generate_synthetic_grid(const SyntheticGridSpec& spec, std::uint64_t seed)
{
    if (spec.buses < 2) {
        throw ValidationError("synthetic grid needs at least 2 buses");
    }
    if (spec.generators < 1 || spec.loads < 1 || spec.wind_farms < 1) {
        throw ValidationError("synthetic grid needs at least one generator, load and wind farm");
    }
    if (!(spec.cost_spread >= 0.0 && spec.cost_spread < 1.0)) {
        throw ValidationError("cost_spread must lie in [0, 1)");
    }
    if (!(spec.thermal_capacity > 0.0)) {
        throw ValidationError("synthetic grid needs a positive thermal capacity target");
    }
    const double fossil_share = spec.nuclear_share + spec.coal_share + spec.oil_share + spec.dual_fuel_share;
    if (spec.nuclear_share < 0 || spec.coal_share < 0 || spec.oil_share < 0 || spec.dual_fuel_share < 0 ||
        fossil_share > 1.0) {
        throw ValidationError("fuel shares must be nonnegative and sum to at most 1");
    }

    std::mt19937_64 rng(seed);
    GridTopology grid;
    for (std::size_t b = 0; b < spec.buses; ++b) {
        grid.buses.push_back(Bus{"b" + std::to_string(b + 1)});
    }

    auto add_line = [&](std::size_t a, std::size_t b) {
        const double limit = uniform(rng, spec.line_limit_min, spec.line_limit_max);
        Line l;
        l.from = a;
        l.to = b;
        l.flow_limit = std::round(limit);
        l.susceptance = std::round(l.flow_limit * uniform(rng, 2.0, 4.0));
        grid.lines.push_back(l);
    };
    std::vector<std::size_t> order(spec.buses);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin() + 1, order.end(), rng);
    std::set<std::pair<std::size_t, std::size_t>> linked;
    for (std::size_t k = 1; k < spec.buses; ++k) {
        const std::size_t parent = order[pick(rng, k)];
        add_line(parent, order[k]);
        linked.insert(std::minmax(parent, order[k]));
    }
    const std::size_t max_lines = spec.buses * (spec.buses - 1) / 2;
    for (std::size_t added = 0; added < spec.extra_lines && linked.size() < max_lines;) {
        const std::size_t a = pick(rng, spec.buses);
        const std::size_t b = pick(rng, spec.buses);
        if (a == b || linked.contains(std::minmax(a, b))) {
            continue;
        }
        linked.insert(std::minmax(a, b));
        add_line(a, b);
        ++added;
    }

    // thermal fleet: fuel by count share, capacity normalized per fuel group
    struct FuelPlan {
        FuelKind fuel;
        double share;
        double cost;
        double ramp;
    };
    const std::array<FuelPlan, 5> plans{{
        {FuelKind::Nuclear, spec.nuclear_share, spec.nuclear_cost, spec.nuclear_ramp},
        {FuelKind::Coal, spec.coal_share, spec.coal_cost, spec.coal_ramp},
        {FuelKind::Oil, spec.oil_share, spec.oil_cost, spec.oil_ramp},
        {FuelKind::DualFuel, spec.dual_fuel_share, spec.dual_fuel_cost, spec.dual_fuel_ramp},
        {FuelKind::Gas, 1.0 - fossil_share, spec.gas_cost, spec.gas_ramp},
    }};
    std::vector<std::size_t> counts(plans.size(), 0);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k + 1 < plans.size(); ++k) {
        if (plans[k].share > 0.0) {
            counts[k] = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::lround(plans[k].share * static_cast<double>(spec.generators))));
            counts[k] = std::min(counts[k], spec.generators - assigned - 1 + (plans.back().share > 0.0 ? 0 : 1));
            assigned += counts[k];
        }
    }
    counts.back() = spec.generators - assigned;

    const auto gen_buses = sample_buses(rng, spec.buses, spec.generators, {});
    std::size_t gi = 0;
    for (std::size_t k = 0; k < plans.size(); ++k) {
        if (counts[k] == 0) {
            continue;
        }
        double group_share = plans[k].share;
        if (k + 1 == plans.size()) {
            group_share = 1.0 - [&] {
                double s = 0.0;
                for (std::size_t q = 0; q + 1 < plans.size(); ++q) {
                    s += counts[q] > 0 ? plans[q].share : 0.0;
                }
                return s;
            }();
        }
        std::vector<double> sizes(counts[k]);
        double total = 0.0;
        for (auto& s : sizes) {
            s = uniform(rng, 0.6, 1.4);
            total += s;
        }
        for (double s : sizes) {
            Generator g;
            g.bus = gen_buses[gi++];
            g.fuel = plans[k].fuel;
            g.cost = plans[k].cost * (1.0 + spec.cost_spread * uniform(rng, -1.0, 1.0));
            g.capacity = std::round(spec.thermal_capacity * group_share * s / total);
            g.ramp_up = std::round(g.capacity * plans[k].ramp);
            g.ramp_down = g.ramp_up;
            grid.generators.push_back(g);
        }
    }

    const auto load_buses = sample_buses(rng, spec.buses, spec.loads, {});
    for (auto b : load_buses) {
        grid.loads.push_back(Load{b, spec.shed_penalty});
    }
    std::set<std::size_t> load_set(load_buses.begin(), load_buses.end());
    for (auto b : sample_buses(rng, spec.buses, spec.imports, load_set)) {
        grid.imports.push_back(ImportPoint{b, spec.import_penalty});
    }
    for (auto b : sample_buses(rng, spec.buses, spec.renewables, {})) {
        grid.renewables.push_back(Renewable{b, spec.renewable_penalty, FuelKind::Hydro});
    }
    for (auto b : sample_buses(rng, spec.buses, spec.wind_farms, load_set)) {
        grid.wind_farms.push_back(WindFarm{b, spec.wind_penalty});
    }
    grid.validate();
    return grid;
}

namespace {

// Weekday system load shape, evening peak and early-morning trough.
constexpr HourlySeries kLoadShape{0.80, 0.77, 0.75, 0.74, 0.75, 0.79, 0.86, 0.92, 0.96, 0.99, 1.01, 1.03,
                                  1.04, 1.05, 1.07, 1.09, 1.12, 1.16, 1.17, 1.15, 1.10, 1.02, 0.94, 0.86};

double season_load_level(Season s)
{
    switch (s) {
    case Season::Spring: return 0.95;
    case Season::Summer: return 1.12;
    case Season::Fall: return 1.0;
    case Season::Winter: return 0.95;
    }
    return 1.0;
}

double season_wind_level(Season s)
{
    switch (s) {
    case Season::Spring: return 1.2;
    case Season::Summer: return 1.1;
    case Season::Fall: return 0.85;
    case Season::Winter: return 0.85;
    }
    return 1.0;
}

// Peak hour of the seasonal wind curve (late night / early morning).
double season_wind_peak(Season s)
{
    switch (s) {
    case Season::Spring: return 3.0;
    case Season::Summer: return 1.0;
    case Season::Fall: return 4.0;
    case Season::Winter: return 5.0;
    }
    return 3.0;
}

}  // namespace

DayScenario make_day_scenario(const GridTopology& grid, DayType day_type, const ProfileSpec& spec,
                              std::uint64_t profile_seed, std::uint64_t wind_seed)
{
    constexpr double kPi = 3.141592653589793;
    std::mt19937_64 prng(profile_seed);
    auto weights = [&](std::size_t n) {
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& v : w) {
            v = uniform(prng, 0.5, 1.5);
            total += v;
        }
        for (auto& v : w) {
            v /= total;
        }
        return w;
    };
    const auto load_w = weights(grid.loads.size());
    const auto import_w = weights(grid.imports.size());
    const auto ren_w = weights(grid.renewables.size());
    const auto wind_w = weights(grid.wind_farms.size());

    const bool weekend = day_type.kind == DayKind::Weekend;
    const double level = spec.mean_load * season_load_level(day_type.season) * (weekend ? 0.92 : 1.0);
    HourlySeries shape = kLoadShape;
    const double shape_mean = mean(kLoadShape);
    for (auto& v : shape) {
        v /= shape_mean;
        if (weekend) {
            v = 0.7 * v + 0.3;
        }
    }

    DayScenario sc;
    sc.day_type = day_type;
    for (double w : load_w) {
        HourlySeries s{};
        for (std::size_t t = 0; t < kHours; ++t) {
            s[t] = level * w * shape[t];
        }
        sc.base_load.push_back(s);
    }
    for (double w : import_w) {
        HourlySeries s{};
        for (std::size_t t = 0; t < kHours; ++t) {
            s[t] = spec.mean_load * spec.import_fraction * w * (0.9 + 0.2 * shape[t] / 2.0);
        }
        sc.imports.push_back(s);
    }
    for (double w : ren_w) {
        HourlySeries s{};
        for (std::size_t t = 0; t < kHours; ++t) {
            const double daytime = std::max(0.0, std::sin(kPi * (static_cast<double>(t) - 6.0) / 12.0));
            s[t] = spec.mean_load * spec.renewable_fraction * w * (0.85 + 0.3 * daytime);
        }
        sc.renewables.push_back(s);
    }

    std::mt19937_64 wrng(wind_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = spec.wind_noise;
    const double wind_level = spec.mean_load * spec.raw_wind_fraction * season_wind_level(day_type.season);
    const double peak = season_wind_peak(day_type.season);
    constexpr double rho = 0.8;
    for (double w : wind_w) {
        HourlySeries s{};
        double z = normal(wrng);
        for (std::size_t t = 0; t < kHours; ++t) {
            if (t > 0) {
                z = rho * z + std::sqrt(1.0 - rho * rho) * normal(wrng);
            }
            const double hour = static_cast<double>(t + 1);
            const double base = 1.0 + 0.55 * std::cos(2.0 * kPi * (hour - peak) / 24.0);
            s[t] = wind_level * w * base * std::exp(sigma * z - 0.5 * sigma * sigma);
        }
        sc.wind.push_back(s);
    }
    return sc;
}

void DatacenterConfig::validate() const
{
    if (!(0.0 <= cap_min && cap_min <= avg_cap && avg_cap <= cap_max)) {
        throw ValidationError("datacenter '" + id + "' must satisfy 0 <= cap_min <= avg_cap <= cap_max");
    }
    if (step_size && !(*step_size > 0.0)) {
        throw ValidationError("datacenter '" + id + "' has a non-positive step size");
    }
}

std::vector<DatacenterConfig> place_datacenters(const GridTopology& grid, const PlacementSpec& spec, std::uint64_t seed)
{
    if (spec.count < 1) {
        throw ValidationError("datacenter count must be at least 1");
    }
    if (!(spec.utilization > 0.0 && spec.utilization <= 1.0)) {
        throw ValidationError("utilization must lie in (0, 1]");
    }
    if (!(0.0 <= spec.range_lo && spec.range_lo <= spec.utilization && spec.utilization <= spec.range_hi &&
          spec.range_hi <= 1.0)) {
        throw ValidationError("dynamic range must satisfy 0 <= lo <= utilization <= hi <= 1");
    }
    std::set<std::size_t> boundary;
    for (const auto& imp : grid.imports) {
        boundary.insert(imp.bus);
    }
    std::vector<std::size_t> eligible;
    for (std::size_t b = 0; b < grid.buses.size(); ++b) {
        if (!boundary.contains(b)) {
            eligible.push_back(b);
        }
    }
    if (eligible.empty()) {
        throw ValidationError("no eligible (non-boundary) bus for datacenter placement");
    }
    std::mt19937_64 rng(seed);
    std::vector<DatacenterConfig> out;
    for (std::size_t i = 0; i < spec.count; ++i) {
        DatacenterConfig dc;
        dc.id = "dc" + std::to_string(i + 1);
        dc.bus = eligible[pick(rng, eligible.size())];
        dc.cap_max = spec.range_hi * spec.cap_max;
        dc.cap_min = spec.range_lo * spec.cap_max;
        dc.avg_cap = spec.utilization * spec.cap_max;
        dc.step_size = spec.step_size;
        dc.validate();
        out.push_back(dc);
    }
    return out;
}

}  // namespace gridflex
