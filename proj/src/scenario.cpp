#include "frp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "frp/csv.hpp"

namespace frp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t scenario_seed(std::uint64_t base, ScenarioKind kind, int index) {
    std::uint64_t tag = static_cast<std::uint64_t>(kind) + 1;
    return splitmix64(splitmix64(base ^ (tag << 56)) + static_cast<std::uint64_t>(index));
}

class TruncatedNormal {
public:
    TruncatedNormal(std::uint64_t seed, double limit) : engine_(seed), limit_(limit) {}

    double operator()() {
        for (;;) {
            double z = normal_(engine_);
            if (limit_ <= 0.0 || std::abs(z) <= limit_) return z;
        }
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double limit_;
};

std::vector<double> read_profile_csv(const std::filesystem::path& path, int expected,
                                     std::vector<double>& solar_total) {
    CsvTable table = CsvTable::read(path);
    if (static_cast<int>(table.rows()) != expected) {
        throw DataError(fmt::format("{}: expected {} intervals, found {}", path.string(), expected, table.rows()));
    }
    std::vector<std::pair<long long, std::pair<double, double>>> rows;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        double load = table.number(r, "load_mw");
        double solar = table.number(r, "solar_total_mw");
        if (!std::isfinite(load) || load < 0.0) {
            throw DataError(fmt::format("{}:{}: negative load", path.string(), r + 2));
        }
        if (!std::isfinite(solar) || solar < 0.0) {
            throw DataError(fmt::format("{}:{}: negative solar output", path.string(), r + 2));
        }
        rows.push_back({table.integer(r, "interval_index"), {load, solar}});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].first != rows[r - 1].first + 1) {
            throw DataError(fmt::format("{}: interval_index values must be consecutive", path.string()));
        }
    }
    std::vector<double> load(expected);
    solar_total.assign(expected, 0.0);
    for (int t = 0; t < expected; ++t) {
        load[t] = rows[t].second.first;
        solar_total[t] = rows[t].second.second;
    }
    return load;
}

std::vector<std::vector<double>> split_solar(const std::vector<double>& total, const PowerSystem& system,
                                             const std::string& where) {
    std::vector<std::vector<double>> out(total.size(), std::vector<double>(system.num_solar(), 0.0));
    if (system.solar_units.empty()) {
        for (std::size_t t = 0; t < total.size(); ++t) {
            if (total[t] > 0.0) throw DataError(fmt::format("{}: solar output given but system has no solar", where));
        }
        return out;
    }
    for (std::size_t t = 0; t < total.size(); ++t) {
        for (const auto& unit : system.solar_units) {
            double value = total[t] * unit.share;
            if (value > unit.capacity + 1e-9) {
                throw DataError(fmt::format("{}: interval {} solar unit {} output {} exceeds capacity {}", where, t,
                                            unit.id, value, unit.capacity));
            }
            out[t][unit.id] = value;
        }
    }
    return out;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

double ForecastProfile::total_solar(int t) const { return sum(solar[t]); }
double ForecastProfile::hourly_total_solar(int h) const { return sum(hourly_solar[h]); }
double Scenario::total_solar(int t) const { return sum(solar[t]); }
double ProxyEnvelope::total_solar_min(int t) const { return sum(solar_min[t]); }
double ProxyEnvelope::total_solar_max(int t) const { return sum(solar_max[t]); }

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::training:
            return "training";
        case ScenarioKind::deployment:
            return "deployment";
        case ScenarioKind::out_of_sample:
            return "out_of_sample";
    }
    return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& text) {
    if (text == "training") return ScenarioKind::training;
    if (text == "deployment") return ScenarioKind::deployment;
    if (text == "out_of_sample") return ScenarioKind::out_of_sample;
    throw DataError(fmt::format("unknown scenario kind '{}'", text));
}

ForecastProfile load_profiles(const std::filesystem::path& hourly_csv, const std::filesystem::path& quarter_csv,
                              const PowerSystem& system) {
    ForecastProfile profile;
    profile.label = quarter_csv.stem().string();
    std::vector<double> hourly_solar, quarter_solar;
    profile.hourly_load = read_profile_csv(hourly_csv, kHoursPerDay, hourly_solar);
    profile.load = read_profile_csv(quarter_csv, kIntervalsPerDay, quarter_solar);
    profile.hourly_solar = split_solar(hourly_solar, system, hourly_csv.string());
    profile.solar = split_solar(quarter_solar, system, quarter_csv.string());
    return profile;
}

ForecastProfile make_profile(const std::string& label, const std::vector<double>& load,
                             const std::vector<double>& total_solar, const PowerSystem& system) {
    if (load.size() != total_solar.size() || load.size() % kIntervalsPerHour != 0) {
        throw DataError("profile: load and solar series must have equal length, a multiple of 4");
    }
    ForecastProfile profile;
    profile.label = label;
    profile.load = load;
    profile.solar = split_solar(total_solar, system, label);
    const std::size_t hours = load.size() / kIntervalsPerHour;
    std::vector<double> hourly_solar(hours, 0.0);
    profile.hourly_load.assign(hours, 0.0);
    for (std::size_t h = 0; h < hours; ++h) {
        for (int q = 0; q < kIntervalsPerHour; ++q) {
            profile.hourly_load[h] += load[h * kIntervalsPerHour + q] / kIntervalsPerHour;
            hourly_solar[h] += total_solar[h * kIntervalsPerHour + q] / kIntervalsPerHour;
        }
    }
    profile.hourly_solar = split_solar(hourly_solar, system, label);
    return profile;
}

void write_profiles(const ForecastProfile& profile, const std::filesystem::path& hourly_csv,
                    const std::filesystem::path& quarter_csv) {
    auto render = [](const std::vector<double>& load, const std::vector<std::vector<double>>& solar) {
        std::ostringstream out;
        out << "interval_index,load_mw,solar_total_mw\n";
        for (std::size_t t = 0; t < load.size(); ++t) out << t << ',' << exact(load[t]) << ',' << exact(sum(solar[t])) << '\n';
        return out.str();
    };
    write_text_file(hourly_csv, render(profile.hourly_load, profile.hourly_solar));
    write_text_file(quarter_csv, render(profile.load, profile.solar));
}

Scenario forecast_scenario(const ForecastProfile& profile, ScenarioKind kind) {
    Scenario s;
    s.kind = kind;
    s.load = profile.load;
    s.solar = profile.solar;
    return s;
}

ScenarioSet sample_scenarios(const ForecastProfile& profile, const PowerSystem& system, const UncertaintyConfig& cfg,
                             int count, ScenarioKind kind) {
    if (count < 1) throw std::invalid_argument("sample_scenarios: count must be >= 1");
    const double frac = cfg.sigma_15min_frac();
    const int intervals = profile.num_intervals();
    ScenarioSet set;
    set.kind = kind;
    set.config = cfg;
    set.scenarios.reserve(count);
    for (int w = 0; w < count; ++w) {
        Scenario s;
        s.kind = kind;
        s.id = w;
        s.seed = scenario_seed(cfg.seed, kind, w);
        TruncatedNormal draw(s.seed, cfg.truncation);
        s.load.resize(intervals);
        s.solar.assign(intervals, std::vector<double>(system.num_solar(), 0.0));
        for (int t = 0; t < intervals; ++t) {
            double z = draw();
            s.load[t] = std::max(0.0, profile.load[t] * (1.0 + frac * z));
            for (const auto& unit : system.solar_units) {
                double zi = draw();
                double value = profile.solar[t][unit.id] * (1.0 + frac * zi);
                s.solar[t][unit.id] = std::clamp(value, 0.0, unit.capacity);
            }
        }
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

std::vector<double> deployment_quantiles(int count, double outer_z) {
    if (count < 2) throw std::invalid_argument("deployment scenarios require S >= 2");
    if (!(outer_z > 0.0)) throw std::invalid_argument("deployment quantile must be positive");
    const boost::math::normal standard;
    const int pairs = count / 2;
    const double outer_tail = boost::math::cdf(boost::math::complement(standard, outer_z));
    constexpr double inner_tail = 0.2;
    std::vector<double> z;
    for (int j = pairs; j >= 1; --j) {
        // Upper-tail probabilities log-spaced from 20% (innermost) to the
        // outer tail; the outermost pair sits exactly at +-outer_z.
        if (j == pairs) {
            z.push_back(outer_z);
            continue;
        }
        const double tail = outer_tail * std::pow(inner_tail / outer_tail, static_cast<double>(pairs - j) / (pairs - 1));
        z.push_back(boost::math::quantile(boost::math::complement(standard, tail)));
    }
    std::sort(z.begin(), z.end(), std::greater<>());
    std::vector<double> out = z;
    if (count % 2 == 1) out.push_back(0.0);
    for (auto it = z.rbegin(); it != z.rend(); ++it) out.push_back(-*it);
    return out;
}

ScenarioSet select_deployment_scenarios(const ForecastProfile& profile, const PowerSystem& system,
                                        const UncertaintyConfig& cfg, int count) {
    const double frac = cfg.sigma_15min_frac();
    const int intervals = profile.num_intervals();
    ScenarioSet set;
    set.kind = ScenarioKind::deployment;
    set.config = cfg;
    int id = 0;
    for (double z : deployment_quantiles(count, cfg.confidence_z)) {
        Scenario s;
        s.kind = ScenarioKind::deployment;
        s.id = id++;
        s.quantile_z = z;
        s.load.resize(intervals);
        s.solar.assign(intervals, std::vector<double>(system.num_solar(), 0.0));
        for (int t = 0; t < intervals; ++t) {
            s.load[t] = std::max(0.0, profile.load[t] * (1.0 + frac * z));
            for (const auto& unit : system.solar_units) {
                s.solar[t][unit.id] = std::clamp(profile.solar[t][unit.id] * (1.0 - frac * z), 0.0, unit.capacity);
            }
        }
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

ProxyEnvelope proxy_envelopes(const ForecastProfile& profile, const PowerSystem& system, const UncertaintyConfig& cfg) {
    const double band = cfg.confidence_z * cfg.sigma_15min_frac();
    const int intervals = profile.num_intervals();
    ProxyEnvelope env;
    env.load_min.resize(intervals);
    env.load_max.resize(intervals);
    env.solar_min.assign(intervals, std::vector<double>(system.num_solar(), 0.0));
    env.solar_max = env.solar_min;
    for (int t = 0; t < intervals; ++t) {
        env.load_min[t] = std::max(0.0, profile.load[t] * (1.0 - band));
        env.load_max[t] = profile.load[t] * (1.0 + band);
        for (const auto& unit : system.solar_units) {
            double forecast = profile.solar[t][unit.id];
            env.solar_min[t][unit.id] = std::clamp(forecast * (1.0 - band), 0.0, unit.capacity);
            env.solar_max[t][unit.id] = std::clamp(forecast * (1.0 + band), 0.0, unit.capacity);
        }
    }
    return env;
}

void write_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path) {
    std::string out = "kind,scenario_id,seed,quantile_z,interval,entity,value\n";
    out.reserve(static_cast<std::size_t>(set.size()) * 96 * 64);
    for (const auto& s : set.scenarios) {
        const std::string prefix =
            fmt::format("{},{},{},{},", to_string(s.kind), s.id, s.seed, exact(s.quantile_z));
        for (int t = 0; t < s.num_intervals(); ++t) {
            out += fmt::format("{}{},load,{}\n", prefix, t, exact(s.load[t]));
            for (std::size_t i = 0; i < s.solar[t].size(); ++i) {
                out += fmt::format("{}{},solar{},{}\n", prefix, t, i, exact(s.solar[t][i]));
            }
        }
    }
    write_text_file(path, out);
}

ScenarioSet read_scenarios_csv(const std::filesystem::path& path, const UncertaintyConfig& cfg) {
    CsvTable table = CsvTable::read(path);
    ScenarioSet set;
    set.config = cfg;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const int id = static_cast<int>(table.integer(r, "scenario_id"));
        const int t = static_cast<int>(table.integer(r, "interval"));
        if (id < 0 || t < 0) throw DataError(fmt::format("{}:{}: negative index", path.string(), r + 2));
        if (id >= set.size()) {
            set.scenarios.resize(id + 1);
        }
        Scenario& s = set.scenarios[id];
        s.id = id;
        s.kind = scenario_kind_from_string(table.text(r, "kind"));
        s.seed = static_cast<std::uint64_t>(std::stoull(table.text(r, "seed")));
        s.quantile_z = table.number(r, "quantile_z");
        set.kind = s.kind;
        if (t >= s.num_intervals()) {
            s.load.resize(t + 1, 0.0);
            s.solar.resize(t + 1);
        }
        const std::string& entity = table.text(r, "entity");
        const double value = table.number(r, "value");
        if (entity == "load") {
            s.load[t] = value;
        } else if (entity.rfind("solar", 0) == 0) {
            const std::size_t unit = std::stoul(entity.substr(5));
            if (s.solar[t].size() <= unit) s.solar[t].resize(unit + 1, 0.0);
            s.solar[t][unit] = value;
        } else {
            throw DataError(fmt::format("{}:{}: unknown entity '{}'", path.string(), r + 2, entity));
        }
    }
    return set;
}

}  // namespace frp
