#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "negsim/rng.hpp"
#include "negsim/scenario.hpp"

namespace negsim::twin {

// Latency value reported when the service rate cannot drain the arrivals.
inline constexpr double kInfeasibleLatency = std::numeric_limits<double>::infinity();

inline bool is_infeasible(double latency_ms) { return latency_ms == kInfeasibleLatency; }

struct SliceLoad {
    double traffic_rate_mbps = 0.0;
    double queue_backlog_mb = 0.0;
};

// The twin's synchronized view of the network. Immutable value type: every
// operation takes it by const reference and sync() returns a new state.
struct TwinState {
    std::map<scenario::SliceId, SliceLoad> per_slice;
    double eta_current = 7.0;  // bits/Hz/s, drawn once per trial
    long trial_index = 0;

    const SliceLoad& load(scenario::SliceId id) const;
};

// Cost vector [L, E, F, R] the twin attaches to a candidate allocation.
struct CostVector {
    double latency_ms = 0.0;  // kInfeasibleLatency when the queue cannot drain
    double energy_saving_pct = 0.0;
    double fairness = 1.0;  // Jain's index over per-slice SLA-margin ratios
    double risk = 0.0;      // fraction of perturbed draws violating the SLA
};

struct Allocation {
    std::optional<double> bandwidth_mhz;
    std::optional<double> cpu_ghz;
};

using AllocationMap = std::map<scenario::SliceId, Allocation>;

// Fluid-flow queue latency: backlog / (service - arrival), service rate
// bandwidth * eta. Optional compute stage adds cycles_per_bit * arrival /
// (cpu_freq * 1e9).
double predict_latency(const TwinState& state, scenario::SliceId slice, double bandwidth_mhz,
                       std::optional<double> cpu_ghz, const scenario::CapacityConfig& caps);

// Energy saving relative to the per-domain caps. Bandwidth saves linearly,
// CPU saves with the cubic dynamic-power law; the combined figure is the
// mean of the present components.
double predict_energy_saving(std::optional<double> bandwidth_mhz, std::optional<double> cpu_ghz,
                             const scenario::CapacityConfig& caps);

// Smallest bandwidth meeting the slice SLA: (Q/L_sla + lambda) / eta.
double min_bw_for_sla(const TwinState& state, const scenario::SliceSpec& slice);
double min_bw_for_budget(const TwinState& state, scenario::SliceId slice, double budget_ms);

// Smallest CPU frequency fitting the compute stage into the latency budget.
double min_cpu_for_budget(const TwinState& state, scenario::SliceId slice, double budget_ms,
                          const scenario::CapacityConfig& caps);

struct PerturbationModel {
    double sigma = 0.0;  // multiplicative mean-one lognormal on traffic rates
};

enum class Exec { Serial, Parallel };

// Standard-normal draws underlying the traffic perturbation, extracted up
// front so several candidate allocations can be screened against the same
// randomness (common random numbers) and so the parallel kernel consumes the
// RNG exactly like the serial reference.
struct NoiseDraws {
    // z[draw][slice]; for chain topology all slices share one column value.
    std::vector<std::vector<double>> z;
};

NoiseDraws draw_noise(const TwinState& state, int horizon, Rng& rng,
                      const scenario::ScenarioConfig& cfg);

// Per-slice mean latency and violation frequency alongside the cost vector.
struct SliceBreakdown {
    double latency_ms = 0.0;
    double risk = 0.0;
    std::vector<double> latency_samples_ms;  // per-draw, infeasible as +inf
};

struct SimulationResult {
    CostVector cost;
    std::map<scenario::SliceId, SliceBreakdown> per_slice;
};

// Core kernel: evaluates a joint allocation over pre-drawn noise at the given
// sigma. The parallel path writes indexed slots and reduces in a fixed order,
// so serial and parallel results are bit-identical.
SimulationResult simulate_with_draws(const TwinState& state, const AllocationMap& proposal,
                                     const NoiseDraws& draws, double sigma,
                                     const scenario::ScenarioConfig& cfg,
                                     Exec exec = Exec::Parallel);

// Monte Carlo what-if evaluation of a joint allocation over `horizon`
// perturbed traffic draws.
CostVector simulate(const TwinState& state, const AllocationMap& proposal, int horizon,
                    const PerturbationModel& noise, Rng& rng, const scenario::ScenarioConfig& cfg,
                    Exec exec = Exec::Parallel);

// Serial reference implementation kept for testing the parallel kernel.
CostVector simulate_reference(const TwinState& state, const AllocationMap& proposal, int horizon,
                              const PerturbationModel& noise, Rng& rng,
                              const scenario::ScenarioConfig& cfg);

// Empirical chance constraint Pr{L <= sla} >= 1 - epsilon, boundary inclusive.
bool check_chance_constraint(std::span<const double> latency_samples_ms, double sla_ms,
                             double epsilon);

struct TelemetrySnapshot {
    std::map<scenario::SliceId, SliceLoad> per_slice;
};

// Shadow-sync to observed telemetry: traffic via EMA (smoothing 0.5), backlog
// replaced outright.
TwinState sync(const TwinState& state, const TelemetrySnapshot& observed);

// Jain's index (sum x)^2 / (n sum x^2); 1.0 for an all-zero vector.
double jain_index(std::span<const double> xs);

}  // namespace negsim::twin
