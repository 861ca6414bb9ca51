#include "frp/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace frp {

int DenseLp::add_variable(double c, double ub) {
    cost.push_back(c);
    upper.push_back(ub);
    for (auto& r : rows) r.push_back(0.0);
    return static_cast<int>(cost.size()) - 1;
}

void DenseLp::add_row(std::vector<double> coefs, Sense sense, double b) {
    coefs.resize(cost.size(), 0.0);
    rows.push_back(std::move(coefs));
    senses.push_back(sense);
    rhs.push_back(b);
}

namespace {

constexpr double kPivotEps = 1e-9;

struct Tableau {
    std::vector<std::vector<double>> a;  // m x N
    std::vector<double> b;
    std::vector<int> basis;
    std::vector<bool> may_enter;

    int rows() const { return static_cast<int>(a.size()); }
    int cols() const { return a.empty() ? 0 : static_cast<int>(a[0].size()); }

    void pivot(int r, int c) {
        const double piv = a[r][c];
        for (double& v : a[r]) v /= piv;
        b[r] /= piv;
        for (int i = 0; i < rows(); ++i) {
            if (i == r || a[i][c] == 0.0) continue;
            const double f = a[i][c];
            for (int j = 0; j < cols(); ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        basis[r] = c;
    }

    // Minimizes cost'x from the current basic feasible solution.
    void minimize(const std::vector<double>& cost) {
        const int m = rows();
        const int n = cols();
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n && enter < 0; ++j) {
                if (!may_enter[j]) continue;
                double d = cost[j];
                for (int i = 0; i < m; ++i) d -= cost[basis[i]] * a[i][j];
                if (d < -kPivotEps) enter = j;
            }
            if (enter < 0) return;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (a[i][enter] <= kPivotEps) continue;
                const double ratio = b[i] / a[i][enter];
                if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) throw std::runtime_error("dense LP is unbounded");
            pivot(leave, enter);
        }
    }
};

}  // namespace

DenseLpResult solve_dense_lp(const DenseLp& lp) {
    const int n = static_cast<int>(lp.cost.size());
    std::vector<std::vector<double>> rows = lp.rows;
    std::vector<Sense> senses = lp.senses;
    std::vector<double> rhs = lp.rhs;
    for (int j = 0; j < n; ++j) {
        if (std::isinf(lp.upper[j])) continue;
        std::vector<double> r(n, 0.0);
        r[j] = 1.0;
        rows.push_back(std::move(r));
        senses.push_back(Sense::less_equal);
        rhs.push_back(lp.upper[j]);
    }
    const int m = static_cast<int>(rows.size());
    for (int i = 0; i < m; ++i) {
        if (rhs[i] < 0.0) {
            for (double& v : rows[i]) v = -v;
            rhs[i] = -rhs[i];
            if (senses[i] != Sense::equal) {
                senses[i] = senses[i] == Sense::less_equal ? Sense::greater_equal : Sense::less_equal;
            }
        }
    }

    int extra = 0;
    for (Sense s : senses) extra += s == Sense::greater_equal ? 2 : 1;
    const int total = n + extra;
    Tableau tab;
    tab.a.assign(m, std::vector<double>(total, 0.0));
    tab.b = rhs;
    tab.basis.assign(m, -1);
    tab.may_enter.assign(total, true);
    std::vector<double> phase1(total, 0.0);
    int col = n;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) tab.a[i][j] = rows[i][j];
        if (senses[i] == Sense::less_equal) {
            tab.a[i][col] = 1.0;
            tab.basis[i] = col++;
            continue;
        }
        if (senses[i] == Sense::greater_equal) tab.a[i][col++] = -1.0;
        tab.a[i][col] = 1.0;
        phase1[col] = 1.0;
        tab.basis[i] = col++;
    }

    tab.minimize(phase1);
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i) infeasibility += phase1[tab.basis[i]] * tab.b[i];
    DenseLpResult out;
    if (infeasibility > 1e-7) return out;

    for (int j = 0; j < total; ++j) {
        if (phase1[j] != 0.0) tab.may_enter[j] = false;
    }
    for (int i = 0; i < m; ++i) {
        if (phase1[tab.basis[i]] == 0.0) continue;
        for (int j = 0; j < total; ++j) {
            if (tab.may_enter[j] && std::abs(tab.a[i][j]) > kPivotEps) {
                tab.pivot(i, j);
                break;
            }
        }
    }
    std::vector<double> phase2(total, 0.0);
    for (int j = 0; j < n; ++j) phase2[j] = lp.cost[j];
    tab.minimize(phase2);

    out.feasible = true;
    out.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.b[i];
    }
    for (int j = 0; j < n; ++j) out.objective += lp.cost[j] * out.x[j];
    return out;
}

namespace {

// Affine expression over LP columns.
struct Affine {
    std::vector<double> coef;
    double constant = 0.0;
};

double ramp_cap(const std::vector<std::vector<double>>& caps, int g, int t, double fallback) {
    if (caps.empty() || caps[g].empty() || caps[g][t] < 0.0) return fallback;
    return std::min(caps[g][t], fallback);
}

bool admissible(const UcProblem& pb, const std::vector<std::vector<int>>& u, std::vector<std::vector<int>>& v,
                std::vector<std::vector<int>>& w) {
    const int G = pb.system->num_generators();
    const int T = pb.intervals;
    const bool chained = !pb.initial.empty();
    for (int g = 0; g < G; ++g) {
        const CommitmentRule rule = pb.rule.empty() ? CommitmentRule::free : pb.rule[g];
        for (int t = 0; t < T; ++t) {
            if (rule == CommitmentRule::fixed && u[g][t] != pb.reference[g][t]) return false;
            if (rule == CommitmentRule::at_least && u[g][t] < pb.reference[g][t]) return false;
            const int prev = t > 0 ? u[g][t - 1] : (chained ? (pb.initial[g].on ? 1 : 0) : u[g][t]);
            v[g][t] = u[g][t] > prev ? 1 : 0;
            w[g][t] = u[g][t] < prev ? 1 : 0;
        }
        if (rule == CommitmentRule::fixed) continue;
        const int up = pb.min_up_intervals(g);
        const int down = pb.min_down_intervals(g);
        for (int t = 0; t < T; ++t) {
            int starts = 0, stops = 0;
            for (int s = std::max(0, t - up + 1); s <= t; ++s) starts += v[g][s];
            for (int s = std::max(0, t - down + 1); s <= t; ++s) stops += w[g][s];
            if (starts > u[g][t] || stops > 1 - u[g][t]) return false;
        }
        if (chained) {
            const UnitInitialState& init = pb.initial[g];
            const int remaining = (init.on ? up : down) - init.intervals_in_state;
            for (int t = 0; t < std::min(remaining, T); ++t) {
                if (!init.on && rule == CommitmentRule::at_least && pb.reference[g][t] == 1) continue;
                if (u[g][t] != (init.on ? 1 : 0)) return false;
            }
        }
    }
    return true;
}

}  // namespace

BruteForceResult brute_force_uc(const UcProblem& pb) {
    if (pb.system == nullptr) throw std::invalid_argument("brute_force_uc: system missing");
    const PowerSystem& sys = *pb.system;
    const int G = sys.num_generators();
    const int T = pb.intervals;
    if (G > kOracleMaxGenerators || T > kOracleMaxIntervals || T < 1) {
        throw std::invalid_argument("brute_force_uc: instance too large (limit 3 generators, 4 intervals)");
    }
    const bool chained = !pb.initial.empty();
    BruteForceResult best;
    std::vector<std::vector<int>> u(G, std::vector<int>(T)), v = u, w = u;

    for (long mask = 0; mask < (1L << (G * T)); ++mask) {
        for (int g = 0; g < G; ++g) {
            for (int t = 0; t < T; ++t) u[g][t] = static_cast<int>((mask >> (g * T + t)) & 1L);
        }
        if (!admissible(pb, u, v, w)) continue;
        ++best.patterns_tried;

        DenseLp lp;
        std::vector<std::vector<Affine>> p(G, std::vector<Affine>(T));
        std::vector<int> shortfall(T), surplus(T);
        double fixed_cost = 0.0;
        for (int t = 0; t < T; ++t) {
            shortfall[t] = lp.add_variable(pb.voll * pb.interval_hours, kInfinity);
            surplus[t] = lp.add_variable(pb.voll * pb.interval_hours, kInfinity);
        }
        std::vector<std::vector<std::vector<int>>> blocks(G, std::vector<std::vector<int>>(T));
        for (int g = 0; g < G; ++g) {
            const GenerationResource& gen = sys.generators[g];
            for (int t = 0; t < T; ++t) {
                fixed_cost += gen.no_load_cost * u[g][t] + gen.startup_cost * v[g][t] + gen.shutdown_cost * w[g][t];
                for (const CostBlock& b : gen.cost_blocks) {
                    blocks[g][t].push_back(lp.add_variable(b.slope * pb.interval_hours, b.width * u[g][t]));
                }
            }
        }
        const int n = static_cast<int>(lp.cost.size());
        for (int g = 0; g < G; ++g) {
            for (int t = 0; t < T; ++t) {
                p[g][t].coef.assign(n, 0.0);
                p[g][t].constant = sys.generators[g].p_min * u[g][t];
                for (int b : blocks[g][t]) p[g][t].coef[b] = 1.0;
            }
        }
        auto add = [&](const Affine& e, Sense sense, double b) { lp.add_row(e.coef, sense, b - e.constant); };

        for (int g = 0; g < G; ++g) {
            const GenerationResource& gen = sys.generators[g];
            const double ramp = pb.ramp_per_interval(g);
            for (int t = 0; t < T; ++t) {
                if (t == 0 && !chained) continue;
                const double up_cap = ramp_cap(pb.ramp_up_cap, g, t, ramp);
                const double down_cap = ramp_cap(pb.ramp_down_cap, g, t, ramp);
                Affine prev;
                prev.coef.assign(n, 0.0);
                int u_prev = 0;
                if (t > 0) {
                    prev = p[g][t - 1];
                    u_prev = u[g][t - 1];
                } else if (pb.initial[g].on) {
                    prev.constant = pb.initial[g].power;
                    u_prev = 1;
                }
                Affine rise = p[g][t];
                for (int j = 0; j < n; ++j) rise.coef[j] -= prev.coef[j];
                rise.constant -= prev.constant;
                add(rise, Sense::less_equal, up_cap * u_prev + gen.ramp_startup * v[g][t]);
                add(rise, Sense::greater_equal, -(down_cap * u[g][t] + gen.ramp_shutdown * w[g][t]));
            }
        }
        for (int t = 0; t < T; ++t) {
            Affine balance;
            balance.coef.assign(n, 0.0);
            for (int g = 0; g < G; ++g) {
                for (int j = 0; j < n; ++j) balance.coef[j] += p[g][t].coef[j];
                balance.constant += p[g][t].constant;
            }
            balance.coef[shortfall[t]] += 1.0;
            balance.coef[surplus[t]] -= 1.0;
            double solar = 0.0;
            for (double s : pb.solar[t]) solar += s;
            add(balance, Sense::equal, pb.system_load[t] - solar);

            if (!pb.reserve_requirement.empty() && pb.reserve_requirement[t] > 0.0) {
                Affine headroom;
                headroom.coef.assign(n, 0.0);
                for (int g = 0; g < G; ++g) {
                    for (int j = 0; j < n; ++j) headroom.coef[j] -= p[g][t].coef[j];
                    headroom.constant += sys.generators[g].p_max * u[g][t] - p[g][t].constant;
                }
                add(headroom, Sense::greater_equal, pb.reserve_requirement[t]);
            }

            if (pb.ptdf == nullptr) continue;
            const PtdfMatrix& ptdf = *pb.ptdf;
            for (int k = 0; k < sys.num_lines(); ++k) {
                Affine flow;
                flow.coef.assign(n, 0.0);
                double slack_factor = 0.0;
                for (int bus = 0; bus < sys.num_buses(); ++bus) {
                    slack_factor += ptdf(k, bus) * sys.load_participation[bus];
                    flow.constant -= ptdf(k, bus) * pb.nodal_load(t, bus);
                }
                for (const SolarUnit& unit : sys.solar_units) flow.constant += ptdf(k, unit.bus) * pb.solar[t][unit.id];
                for (int g = 0; g < G; ++g) {
                    const double f = ptdf(k, sys.generators[g].bus);
                    for (int j = 0; j < n; ++j) flow.coef[j] += f * p[g][t].coef[j];
                    flow.constant += f * p[g][t].constant;
                }
                flow.coef[shortfall[t]] += slack_factor;
                flow.coef[surplus[t]] -= slack_factor;
                add(flow, Sense::less_equal, sys.lines[k].rating);
                add(flow, Sense::greater_equal, -sys.lines[k].rating);
            }
        }

        const DenseLpResult res = solve_dense_lp(lp);
        if (!res.feasible) continue;
        const double total = fixed_cost + res.objective;
        if (!best.feasible || total < best.cost) {
            best.feasible = true;
            best.cost = total;
            best.commitment = u;
        }
    }
    return best;
}

}  // namespace frp
