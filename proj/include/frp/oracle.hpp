#pragma once

#include <vector>

#include "frp/milp.hpp"
#include "frp/uc.hpp"

namespace frp {

/// Small dense LP: minimize c'x subject to rows and 0 <= x <= upper.
struct DenseLp {
    std::vector<double> cost;
    std::vector<double> upper;  // kInfinity allowed
    std::vector<std::vector<double>> rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;

    int add_variable(double c, double ub);
    void add_row(std::vector<double> coefs, Sense sense, double b);
};

struct DenseLpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

/// Two-phase tableau simplex with Bland's rule. Meant for oracles on tiny
/// instances only; it shares no code with the MILP backend.
DenseLpResult solve_dense_lp(const DenseLp& lp);

struct BruteForceResult {
    bool feasible = false;
    double cost = 0.0;
    std::vector<std::vector<int>> commitment;  // [g][t]
    long patterns_tried = 0;
};

inline constexpr int kOracleMaxGenerators = 3;
inline constexpr int kOracleMaxIntervals = 4;

/// Enumerates every commitment pattern of a tiny UcProblem, solves the dispatch
/// LP of each admissible one and returns the cheapest. Throws
/// std::invalid_argument beyond 3 generators or 4 intervals.
BruteForceResult brute_force_uc(const UcProblem& problem);

}  // namespace frp
