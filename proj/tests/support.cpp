#include "support.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#ifndef FRP_DATA_DIR
#error "FRP_DATA_DIR must point at the bundled data directory"
#endif
#ifndef FRP_SCRATCH_DIR
#error "FRP_SCRATCH_DIR must point at a writable directory"
#endif

namespace frp::test {

std::filesystem::path data_dir() { return FRP_DATA_DIR; }

std::filesystem::path scratch_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(FRP_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

GenerationResource make_generator(int bus, double p_min, const std::vector<CostBlock>& blocks, double ramp_15,
                                  bool fast_start) {
    GenerationResource g;
    g.bus = bus;
    g.p_min = p_min;
    g.cost_blocks = blocks;
    g.p_max = p_min;
    for (const auto& b : blocks) g.p_max += b.width;
    g.ramp_15 = ramp_15;
    g.ramp_startup = std::max(p_min, ramp_15);
    g.ramp_shutdown = std::max(p_min, ramp_15);
    g.fast_start = fast_start;
    g.frp_up_cost = 0.5;
    g.frp_down_cost = 0.5;
    return g;
}

PowerSystem make_system(int buses, const std::vector<TransmissionLine>& lines,
                        const std::vector<GenerationResource>& generators, int slack,
                        std::vector<double> participation) {
    PowerSystem sys;
    sys.name = "test";
    for (int b = 0; b < buses; ++b) sys.buses.push_back({b, fmt::format("B{}", b + 1)});
    sys.lines = lines;
    for (int k = 0; k < static_cast<int>(sys.lines.size()); ++k) sys.lines[k].id = k;
    sys.generators = generators;
    for (int g = 0; g < static_cast<int>(sys.generators.size()); ++g) {
        sys.generators[g].id = g;
        if (sys.generators[g].name.empty()) sys.generators[g].name = fmt::format("G{}", g + 1);
    }
    sys.slack_bus = slack;
    if (participation.empty()) participation.assign(buses, 1.0 / buses);
    sys.load_participation = std::move(participation);
    return sys;
}

PowerSystem random_network(std::mt19937_64& rng, int buses, int extra) {
    std::uniform_real_distribution<double> reactance(0.05, 0.5);
    std::vector<TransmissionLine> lines;
    for (int b = 1; b < buses; ++b) {
        std::uniform_int_distribution<int> parent(0, b - 1);
        lines.push_back({0, parent(rng), b, reactance(rng), 100.0});
    }
    std::uniform_int_distribution<int> pick(0, buses - 1);
    for (int e = 0; e < extra; ++e) {
        int f = pick(rng), t = pick(rng);
        if (f == t) t = (t + 1) % buses;
        lines.push_back({0, f, t, reactance(rng), 100.0});
    }
    std::uniform_int_distribution<int> slack(0, buses - 1);
    return make_system(buses, lines, {}, slack(rng));
}

std::vector<double> random_balanced_injection(std::mt19937_64& rng, int buses, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> p(buses);
    for (double& v : p) v = u(rng);
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / buses;
    for (double& v : p) v -= mean;
    return p;
}

std::unique_ptr<UcInstance> random_tiny_uc(std::mt19937_64& rng) {
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    auto coin = [&](double p) { return uni(0.0, 1.0) < p; };

    auto inst = std::make_unique<UcInstance>();
    const int G = pick(1, 3);
    const int T = pick(2, 4);
    const int buses = pick(1, 3);

    std::vector<TransmissionLine> lines;
    for (int b = 1; b < buses; ++b) lines.push_back({0, b - 1, b, uni(0.05, 0.3), uni(20.0, 120.0)});
    if (buses == 3 && coin(0.5)) lines.push_back({0, 0, 2, uni(0.05, 0.3), uni(20.0, 120.0)});

    std::vector<GenerationResource> gens;
    for (int g = 0; g < G; ++g) {
        std::vector<CostBlock> blocks;
        const int nb = pick(1, 2);
        for (int e = 0; e < nb; ++e) blocks.push_back({std::round(uni(10.0, 40.0)), std::round(uni(10.0, 60.0))});
        GenerationResource gen = make_generator(pick(0, buses - 1), std::round(uni(5.0, 30.0)), blocks,
                                                std::round(uni(5.0, 40.0)), coin(0.3));
        gen.no_load_cost = std::round(uni(0.0, 50.0));
        gen.startup_cost = std::round(uni(0.0, 200.0));
        gen.shutdown_cost = coin(0.5) ? std::round(uni(0.0, 50.0)) : 0.0;
        gen.ramp_startup = gen.p_min + std::round(uni(0.0, 20.0));
        gen.ramp_shutdown = gen.p_min + std::round(uni(0.0, 20.0));
        gen.min_up = pick(1, 3);
        gen.min_down = pick(1, 3);
        gens.push_back(gen);
    }
    std::vector<double> participation(buses);
    for (double& v : participation) v = uni(0.1, 1.0);
    const double total = std::accumulate(participation.begin(), participation.end(), 0.0);
    for (double& v : participation) v /= total;
    inst->system = make_system(buses, lines, gens, 0, participation);
    if (coin(0.5)) {
        inst->system.solar_units.push_back({0, pick(0, buses - 1), 30.0, 1.0});
    }
    inst->ptdf = compute_ptdf(inst->system);

    UcProblem& pb = inst->problem;
    pb.system = &inst->system;
    pb.ptdf = buses > 1 && coin(0.8) ? &inst->ptdf : nullptr;
    pb.intervals = T;
    pb.interval_hours = 0.25;
    pb.voll = 1000.0;
    double capacity = 0.0;
    for (const auto& g : inst->system.generators) capacity += g.p_max;
    for (int t = 0; t < T; ++t) {
        pb.system_load.push_back(std::round(uni(0.1, 0.9) * capacity));
        std::vector<double> solar(inst->system.num_solar());
        for (double& s : solar) s = std::round(uni(0.0, 30.0));
        pb.solar.push_back(solar);
    }
    if (coin(0.6)) {
        for (const auto& g : inst->system.generators) {
            UnitInitialState s;
            s.on = coin(0.6);
            s.power = s.on ? std::round(uni(g.p_min, std::min(g.p_max, g.ramp_shutdown))) : 0.0;
            s.intervals_in_state = pick(1, 3);
            pb.initial.push_back(s);
        }
    }
    if (coin(0.5)) {
        pb.rule.resize(G);
        pb.reference.assign(G, std::vector<int>(T));
        for (int g = 0; g < G; ++g) {
            const int r = pick(0, 2);
            pb.rule[g] = r == 0 ? CommitmentRule::free : (r == 1 ? CommitmentRule::fixed : CommitmentRule::at_least);
            for (int t = 0; t < T; ++t) pb.reference[g][t] = coin(0.6) ? 1 : 0;
        }
    }
    if (coin(0.3)) {
        pb.ramp_up_cap.assign(G, std::vector<double>(T));
        pb.ramp_down_cap.assign(G, std::vector<double>(T));
        for (int g = 0; g < G; ++g) {
            for (int t = 0; t < T; ++t) {
                pb.ramp_up_cap[g][t] = coin(0.3) ? -1.0 : std::round(uni(0.0, 20.0));
                pb.ramp_down_cap[g][t] = coin(0.3) ? -1.0 : std::round(uni(0.0, 20.0));
            }
        }
    }
    if (coin(0.3)) {
        for (int t = 0; t < T; ++t) pb.reserve_requirement.push_back(std::round(uni(0.0, 0.2) * capacity));
    }
    return inst;
}

ForecastProfile flat_profile(const PowerSystem& system, double load, double solar) {
    return make_profile("flat", std::vector<double>(kIntervalsPerDay, load), std::vector<double>(kIntervalsPerDay, solar),
                        system);
}

}  // namespace frp::test
