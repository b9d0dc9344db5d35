#include "negsim/twin.hpp"

#include <algorithm>
#include <cmath>

namespace negsim::twin {

using scenario::ScenarioConfig;
using scenario::SliceId;
using scenario::Topology;

const SliceLoad& TwinState::load(SliceId id) const {
    auto it = per_slice.find(id);
    if (it == per_slice.end())
        throw PreconditionError(std::string("twin state has no slice ") + scenario::to_string(id));
    return it->second;
}

double predict_latency(const TwinState& state, SliceId slice, double bandwidth_mhz,
                       std::optional<double> cpu_ghz, const scenario::CapacityConfig& caps) {
    if (bandwidth_mhz < 0.0)
        throw PreconditionError("predict_latency: bandwidth_mhz must be >= 0");
    const SliceLoad& l = state.load(slice);
    // MHz * bits/Hz/s = Mb/s, so backlog in Mb over a drain rate in Mb/s
    // yields seconds directly.
    const double mu_mbps = bandwidth_mhz * state.eta_current;
    const double lambda_mbps = l.traffic_rate_mbps;
    double latency_s = 0.0;
    if (l.queue_backlog_mb > 0.0 || lambda_mbps > 0.0 || bandwidth_mhz == 0.0) {
        if (mu_mbps <= lambda_mbps) return kInfeasibleLatency;
        latency_s = l.queue_backlog_mb / (mu_mbps - lambda_mbps);
    }
    if (cpu_ghz) {
        if (!(*cpu_ghz > 0.0)) throw PreconditionError("predict_latency: cpu_ghz must be > 0");
        const double lambda_bps = lambda_mbps * 1e6;
        latency_s += caps.cycles_per_bit * lambda_bps / (*cpu_ghz * 1e9);
    }
    return latency_s * 1e3;
}

double predict_energy_saving(std::optional<double> bandwidth_mhz, std::optional<double> cpu_ghz,
                             const scenario::CapacityConfig& caps) {
    if (!bandwidth_mhz && !cpu_ghz)
        throw PreconditionError("predict_energy_saving: no allocation component given");
    double sum = 0.0;
    int n = 0;
    if (bandwidth_mhz) {
        if (*bandwidth_mhz < 0.0 || *bandwidth_mhz > caps.b_max_mhz + 1e-9)
            throw PreconditionError("predict_energy_saving: bandwidth outside [0, b_max]");
        sum += (1.0 - *bandwidth_mhz / caps.b_max_mhz) * 100.0;
        ++n;
    }
    if (cpu_ghz) {
        if (!(*cpu_ghz > 0.0) || *cpu_ghz > caps.f_max_ghz + 1e-9)
            throw PreconditionError("predict_energy_saving: cpu outside (0, f_max]");
        const double r = *cpu_ghz / caps.f_max_ghz;
        sum += (1.0 - r * r * r) * 100.0;
        ++n;
    }
    return sum / n;
}

double min_bw_for_budget(const TwinState& state, SliceId slice, double budget_ms) {
    if (!(budget_ms > 0.0)) throw PreconditionError("min_bw_for_budget: budget must be > 0");
    const SliceLoad& l = state.load(slice);
    if (l.queue_backlog_mb == 0.0 && l.traffic_rate_mbps == 0.0) return 0.0;
    const double budget_s = budget_ms * 1e-3;
    double bw = (l.queue_backlog_mb / budget_s + l.traffic_rate_mbps) / state.eta_current;
    // With an empty backlog the latency jumps from infeasible to zero at
    // mu == lambda; nudge off the open boundary.
    if (l.queue_backlog_mb == 0.0) bw *= 1.0 + 1e-9;
    return bw;
}

double min_bw_for_sla(const TwinState& state, const scenario::SliceSpec& slice) {
    if (!(slice.sla_latency_ms > 0.0))
        throw PreconditionError("min_bw_for_sla: sla_latency_ms must be > 0");
    return min_bw_for_budget(state, slice.id, slice.sla_latency_ms);
}

double min_cpu_for_budget(const TwinState& state, SliceId slice, double budget_ms,
                          const scenario::CapacityConfig& caps) {
    if (!(budget_ms > 0.0)) throw PreconditionError("min_cpu_for_budget: budget must be > 0");
    const SliceLoad& l = state.load(slice);
    if (l.traffic_rate_mbps == 0.0) return 0.0;
    const double lambda_bps = l.traffic_rate_mbps * 1e6;
    return caps.cycles_per_bit * lambda_bps / (budget_ms * 1e-3) / 1e9;
}

double jain_index(std::span<const double> xs) {
    if (xs.empty()) return 1.0;
    double s = 0.0, s2 = 0.0;
    for (double x : xs) {
        s += x;
        s2 += x * x;
    }
    if (s2 == 0.0) return 1.0;  // all-equal (zero) margins count as fair
    return (s * s) / (static_cast<double>(xs.size()) * s2);
}

namespace {

struct DrawOutcome {
    double latency_ms = 0.0;
    bool feasible = false;
    bool violation = false;
    double fairness = 1.0;
    // keyed by position in the state's slice map iteration order
    std::vector<double> slice_latency_ms;
    std::vector<bool> slice_violation;
};

// Latency, SLA check and margins for one perturbed traffic draw.
DrawOutcome evaluate_draw(const TwinState& base, const AllocationMap& proposal,
                          const std::vector<double>& z_row, double sigma,
                          const ScenarioConfig& cfg) {
    TwinState state = base;
    size_t fi = 0;
    for (auto& [id, load] : state.per_slice) {
        const double factor =
            sigma > 0.0 ? std::exp(sigma * z_row[fi] - 0.5 * sigma * sigma) : 1.0;
        load.traffic_rate_mbps *= factor;
        load.queue_backlog_mb *= factor;
        ++fi;
    }

    DrawOutcome out;
    std::vector<double> margins;

    if (cfg.topology == Topology::RanEdgeChain) {
        const auto& ran = proposal.at(SliceId::Ran);
        const auto& edge = proposal.at(SliceId::Edge);
        if (!ran.bandwidth_mhz || !edge.cpu_ghz)
            throw PreconditionError("simulate: chain proposal needs RAN bandwidth and Edge cpu");
        if (!(*edge.cpu_ghz > 0.0))
            throw PreconditionError("simulate: Edge cpu_ghz must be > 0");
        const double sla = cfg.slice(SliceId::Ran).sla_latency_ms;
        const double lq =
            predict_latency(state, SliceId::Ran, *ran.bandwidth_mhz, std::nullopt, cfg.caps);
        const double lambda_edge_bps = state.load(SliceId::Edge).traffic_rate_mbps * 1e6;
        const double lc = cfg.caps.cycles_per_bit * lambda_edge_bps / (*edge.cpu_ghz * 1e9) * 1e3;
        const double total = is_infeasible(lq) ? kInfeasibleLatency : lq + lc;
        out.latency_ms = total;
        out.feasible = !is_infeasible(total);
        out.violation = !out.feasible || total > sla;
        // Both domains share the chain latency and the chain risk.
        out.slice_latency_ms = {total, total};
        out.slice_violation = {out.violation, out.violation};
        const double budget_ran = sla * cfg.ran_budget_share;
        const double budget_edge = sla - budget_ran;
        margins.push_back(is_infeasible(lq) ? 0.0
                                            : std::clamp((budget_ran - lq) / budget_ran, 0.0, 1.0));
        margins.push_back(std::clamp((budget_edge - lc) / budget_edge, 0.0, 1.0));
    } else {
        // Positions track the state's slice map iteration order; slices the
        // proposal does not cover stay NaN and are skipped in the reduction.
        out.slice_latency_ms.assign(state.per_slice.size(),
                                    std::numeric_limits<double>::quiet_NaN());
        out.slice_violation.assign(state.per_slice.size(), false);
        double worst = 0.0;
        bool any_infeasible = false;
        bool violation = false;
        size_t pos = 0;
        for (const auto& [id, load] : state.per_slice) {
            auto pit = proposal.find(id);
            if (pit == proposal.end()) {
                ++pos;
                continue;
            }
            const Allocation& alloc = pit->second;
            if (!alloc.bandwidth_mhz)
                throw PreconditionError("simulate: slice proposal needs a bandwidth component");
            const double sla = cfg.slice(id).sla_latency_ms;
            const double lat =
                predict_latency(state, id, *alloc.bandwidth_mhz, alloc.cpu_ghz, cfg.caps);
            out.slice_latency_ms[pos] = lat;
            if (is_infeasible(lat)) {
                any_infeasible = true;
                violation = true;
                out.slice_violation[pos] = true;
                margins.push_back(0.0);
            } else {
                worst = std::max(worst, lat);
                const bool v = lat > sla;
                if (v) violation = true;
                out.slice_violation[pos] = v;
                margins.push_back(std::clamp((sla - lat) / sla, 0.0, 1.0));
            }
            ++pos;
        }
        out.latency_ms = any_infeasible ? kInfeasibleLatency : worst;
        out.feasible = !any_infeasible;
        out.violation = violation;
    }

    out.fairness = jain_index(margins);
    return out;
}

void check_simulate_pre(const AllocationMap& proposal, int horizon) {
    if (proposal.empty()) throw PreconditionError("simulate: empty allocation map");
    if (horizon < 1) throw PreconditionError("simulate: horizon must be >= 1");
}

}  // namespace

NoiseDraws draw_noise(const TwinState& state, int horizon, Rng& rng, const ScenarioConfig& cfg) {
    if (horizon < 1) throw PreconditionError("draw_noise: horizon must be >= 1");
    const size_t n_slices = state.per_slice.size();
    const bool shared = cfg.topology == Topology::RanEdgeChain;  // one flow, one draw
    NoiseDraws draws;
    draws.z.assign(horizon, std::vector<double>(n_slices, 0.0));
    for (int d = 0; d < horizon; ++d) {
        if (shared) {
            const double z = rng.gauss();
            std::fill(draws.z[d].begin(), draws.z[d].end(), z);
        } else {
            for (size_t s = 0; s < n_slices; ++s) draws.z[d][s] = rng.gauss();
        }
    }
    return draws;
}

SimulationResult simulate_with_draws(const TwinState& state, const AllocationMap& proposal,
                                     const NoiseDraws& draws, double sigma,
                                     const ScenarioConfig& cfg, Exec exec) {
    check_simulate_pre(proposal, static_cast<int>(draws.z.size()));
    const int horizon = static_cast<int>(draws.z.size());
    std::vector<DrawOutcome> outcomes(horizon);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int d = 0; d < horizon; ++d)
            outcomes[d] = evaluate_draw(state, proposal, draws.z[d], sigma, cfg);
    } else {
        for (int d = 0; d < horizon; ++d)
            outcomes[d] = evaluate_draw(state, proposal, draws.z[d], sigma, cfg);
    }

    SimulationResult res;
    double latency_sum = 0.0, fairness_sum = 0.0;
    long feasible = 0, violations = 0;
    for (const auto& d : outcomes) {
        if (d.feasible) {
            latency_sum += d.latency_ms;
            ++feasible;
        }
        if (d.violation) ++violations;
        fairness_sum += d.fairness;
    }
    res.cost.latency_ms = feasible > 0 ? latency_sum / feasible : kInfeasibleLatency;
    res.cost.risk = static_cast<double>(violations) / horizon;
    res.cost.fairness = fairness_sum / horizon;

    double es_sum = 0.0;
    int es_n = 0;
    for (const auto& [id, alloc] : proposal) {
        if (!alloc.bandwidth_mhz && !alloc.cpu_ghz) continue;
        es_sum += predict_energy_saving(alloc.bandwidth_mhz, alloc.cpu_ghz, cfg.caps);
        ++es_n;
    }
    res.cost.energy_saving_pct = es_n > 0 ? es_sum / es_n : 0.0;

    // Per-slice positions follow the state's slice map iteration order;
    // only slices covered by the proposal get a breakdown entry.
    size_t pos = 0;
    for (const auto& [id, load] : state.per_slice) {
        const bool covered = cfg.topology == Topology::RanEdgeChain || proposal.count(id) > 0;
        if (!covered) {
            ++pos;
            continue;
        }
        SliceBreakdown b;
        b.latency_samples_ms.reserve(horizon);
        double sum = 0.0;
        long ok = 0, bad = 0;
        for (const auto& d : outcomes) {
            const double lat =
                pos < d.slice_latency_ms.size() ? d.slice_latency_ms[pos] : d.latency_ms;
            b.latency_samples_ms.push_back(lat);
            if (!is_infeasible(lat)) {
                sum += lat;
                ++ok;
            }
            const bool v = pos < d.slice_violation.size() ? d.slice_violation[pos] : d.violation;
            if (v) ++bad;
        }
        b.latency_ms = ok > 0 ? sum / ok : kInfeasibleLatency;
        b.risk = static_cast<double>(bad) / horizon;
        res.per_slice[id] = std::move(b);
        ++pos;
    }
    return res;
}

CostVector simulate(const TwinState& state, const AllocationMap& proposal, int horizon,
                    const PerturbationModel& noise, Rng& rng, const ScenarioConfig& cfg,
                    Exec exec) {
    check_simulate_pre(proposal, horizon);
    const NoiseDraws draws = draw_noise(state, horizon, rng, cfg);
    return simulate_with_draws(state, proposal, draws, noise.sigma, cfg, exec).cost;
}

CostVector simulate_reference(const TwinState& state, const AllocationMap& proposal, int horizon,
                              const PerturbationModel& noise, Rng& rng,
                              const ScenarioConfig& cfg) {
    check_simulate_pre(proposal, horizon);
    const NoiseDraws draws = draw_noise(state, horizon, rng, cfg);
    return simulate_with_draws(state, proposal, draws, noise.sigma, cfg, Exec::Serial).cost;
}

bool check_chance_constraint(std::span<const double> latency_samples_ms, double sla_ms,
                             double epsilon) {
    if (latency_samples_ms.empty())
        throw PreconditionError("check_chance_constraint: need at least one sample");
    long ok = 0;
    for (double l : latency_samples_ms)
        if (l <= sla_ms) ++ok;
    const double frac = static_cast<double>(ok) / latency_samples_ms.size();
    return frac >= 1.0 - epsilon;
}

TwinState sync(const TwinState& state, const TelemetrySnapshot& observed) {
    TwinState next = state;
    for (const auto& [id, obs] : observed.per_slice) {
        if (obs.traffic_rate_mbps < 0.0 || obs.queue_backlog_mb < 0.0)
            throw PreconditionError("sync: observed rates and backlogs must be >= 0");
        auto it = next.per_slice.find(id);
        if (it == next.per_slice.end()) {
            next.per_slice[id] = obs;
        } else {
            it->second.traffic_rate_mbps =
                0.5 * it->second.traffic_rate_mbps + 0.5 * obs.traffic_rate_mbps;
            it->second.queue_backlog_mb = obs.queue_backlog_mb;
        }
    }
    return next;
}

}  // namespace negsim::twin
