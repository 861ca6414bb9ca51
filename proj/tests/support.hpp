#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "frp/scenario.hpp"
#include "frp/system.hpp"
#include "frp/uc.hpp"

namespace frp::test {

std::filesystem::path data_dir();

/// Fresh scratch directory under the build tree, emptied on creation.
std::filesystem::path scratch_dir(const std::string& name);

GenerationResource make_generator(int bus, double p_min, const std::vector<CostBlock>& blocks, double ramp_15,
                                  bool fast_start = false);

/// Adds consecutive ids and uniform participation when none is given.
PowerSystem make_system(int buses, const std::vector<TransmissionLine>& lines,
                        const std::vector<GenerationResource>& generators, int slack = 0,
                        std::vector<double> participation = {});

/// Connected network with a spanning tree plus `extra` random lines.
PowerSystem random_network(std::mt19937_64& rng, int buses, int extra);

/// Balanced injection vector (sums to zero) with entries in [-scale, scale].
std::vector<double> random_balanced_injection(std::mt19937_64& rng, int buses, double scale);

/// Owns the system and PTDF a UcProblem points to.
struct UcInstance {
    PowerSystem system;
    PtdfMatrix ptdf;
    UcProblem problem;
};

/// Tiny commitment instance (<= 3 units, <= 4 intervals) with random
/// ramping, min up/down, initial state, commitment rules and line limits.
std::unique_ptr<UcInstance> random_tiny_uc(std::mt19937_64& rng);

ForecastProfile flat_profile(const PowerSystem& system, double load, double solar = 0.0);

}  // namespace frp::test
