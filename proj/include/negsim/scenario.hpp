#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "negsim/errors.hpp"

namespace negsim::scenario {

enum class SliceId { Embb, Urllc, Ran, Edge };

const char* to_string(SliceId id);
SliceId slice_id_from_string(const std::string& s);

enum class Topology {
    IndependentSlices,  // parallel queues sharing one bandwidth pool (UC1)
    RanEdgeChain,       // one flow through a RAN queue and an edge CPU (UC2)
};

const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct SliceSpec {
    SliceId id = SliceId::Embb;
    double sla_latency_ms = 0.0;
    double traffic_rate_mbps = 0.0;
    double queue_backlog_mb = 0.0;
    double min_utility_threshold = 0.0;

    void validate() const;
};

struct CapacityConfig {
    double b_total_mhz = 0.0;  // shared RAN bandwidth
    double b_max_mhz = 0.0;    // per-domain bandwidth cap
    double f_max_ghz = 0.0;    // peak edge CPU
    double eta_min = 0.0;      // spectral efficiency range, bits/Hz/s
    double eta_max = 0.0;
    // Edge workload intensity. The model needs a number and the literature
    // gives none for this setup; 100 cycles/bit keeps f_max = 45 GHz serving
    // a few Mb/s within a 10 ms budget. Overridable in the config document.
    double cycles_per_bit = 100.0;

    void validate() const;
};

// Scalarization weights over [latency, energy, fairness, risk].
struct UtilityWeights {
    std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
    double epsilon = 0.05;  // SLA chance-constraint slack
    double r_max = 1.0;     // risk cap

    void normalize();
    void validate() const;
};

// Traffic perturbation model: multiplicative mean-one lognormal noise plus an
// optional two-level regime process (Markov flips between a low and a high
// traffic multiplier). Equal multipliers disable regimes.
struct NoiseConfig {
    double sigma_trial = 0.1;      // per-trial resampling of offered traffic
    double sigma_exec = 0.1;       // post-agreement realized traffic noise
    double sigma_model = 0.3;      // risk-screening width without precedent
    double sigma_empirical = 0.1;  // risk-screening width near a validated precedent
    double regime_low = 1.0;
    double regime_high = 1.0;
    double regime_flip_prob = 0.0;
    int mc_horizon = 64;

    bool regimes_enabled() const { return regime_low != regime_high; }
    void validate() const;
};

struct ProtocolConfig {
    int max_rounds = 8;
    double accept_threshold = 0.6;
    double concession_rate = 0.25;   // zeta: step toward the feasibility frontier
    double anchor_buffer = 1.05;     // fixed anchor = min resource * buffer
    double min_buffer = 1.02;        // hard floor over the predicted minimum
    double bold_factor = 0.95;       // precedent exploitation step
    double cliff_margin = 1.05;      // bold jump lands this far above a known failure
    double trust_rel_window = 0.15;  // precedent validation neighborhood (relative)
    double fallback_factor = 1.5;    // static allocation applied when talks fail
    double conservative_factor = 1.5;

    void validate() const;
};

enum class DecayForm {
    Factor,  // exp(-age / theta): theta is a decay factor in trials
    Rate,    // exp(-theta * age): literal rate form, kept for study
};

const char* to_string(DecayForm f);
DecayForm decay_form_from_string(const std::string& s);

struct MemoryConfig {
    std::string policy = "vanilla";  // none | vanilla | unbiased
    double alpha = 1.0;
    double beta = 0.5;
    double delta = 1.0;
    double theta = 5.0;
    double vanilla_theta = 1.0;  // recency-heavy decay used by the vanilla baseline
    double kappa = 0.5;          // anchor-penalty scale
    double sigma = 5.0;          // anchor-penalty width, resource units
    int top_n = 5;
    DecayForm decay_form = DecayForm::Factor;

    void validate() const;
};

struct ScenarioConfig {
    std::string name;
    Topology topology = Topology::IndependentSlices;
    std::vector<SliceSpec> slices;
    CapacityConfig caps;
    UtilityWeights weights;
    NoiseConfig noise;
    ProtocolConfig protocol;
    MemoryConfig memory;
    // Tokens stored with every distilled strategy record and used to build
    // retrieval queries.
    std::vector<std::string> keywords;
    // Chain topology: fraction of the SLA budget assigned to the RAN queue
    // when computing per-domain minimum resources.
    double ran_budget_share = 0.5;

    const SliceSpec& slice(SliceId id) const;
    bool has_slice(SliceId id) const;
    void validate() const;
};

ScenarioConfig load_config(const nlohmann::json& doc);
ScenarioConfig load_config_file(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

ScenarioConfig uc1_defaults();
ScenarioConfig uc2_defaults();

// ---------------------------------------------------------------------------
// Framing canonicalization

// A resource-pool state as some telemetry source frames it. Any subset of the
// four framings may be present; whatever is present must describe the same
// state or canonicalize() raises InconsistencyError.
struct FramedState {
    double total = 0.0;
    std::optional<double> used_fraction;
    std::optional<double> free_fraction;
    std::optional<double> used_abs;
    std::optional<double> free_abs;
    long trial_index = 0;
};

// Framing-free representation: free fraction plus absolutes in fixed units.
struct CanonicalState {
    double free_fraction = 0.0;
    double total = 0.0;
    double free_abs = 0.0;
    long trial_index = 0;
};

CanonicalState canonicalize(const FramedState& raw);
inline CanonicalState canonicalize(const CanonicalState& s) { return s; }

bool canonical_equal(const CanonicalState& a, const CanonicalState& b, double rel = 1e-12);

}  // namespace negsim::scenario
