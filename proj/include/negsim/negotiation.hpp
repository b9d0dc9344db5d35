#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "negsim/biases.hpp"
#include "negsim/memory.hpp"
#include "negsim/rng.hpp"
#include "negsim/scenario.hpp"
#include "negsim/twin.hpp"

namespace negsim::nego {

enum class Intent { Propose, CounterPropose, Confirm, Reject, Commit, Explain };

const char* to_string(Intent i);

// A2A message. Proposals always carry the full joint allocation map; a
// counter-proposal may change only the sender's own component.
struct Message {
    Intent intent = Intent::Propose;
    std::string sender;
    int round = 0;  // message index, 1-based, stamped by the engine
    std::map<std::string, double> proposal;  // resource-id -> value (MHz or GHz)
    std::string reason;
    bool verified = false;  // automation verification status
};

struct AgentConfig {
    std::string id;  // "urllc", "embb", "ran", "edge"
    scenario::SliceId slice = scenario::SliceId::Embb;
    std::string resource;      // key in proposal maps, e.g. "urllc_bw_mhz"
    bool controls_cpu = false;  // edge agent allocates GHz instead of MHz
};

// Bias-operator hooks a policy can be instrumented with. Defaults are the
// mitigated settings.
struct BiasHooks {
    double anchoring_gamma = 0.0;  // >0 reproduces anchoring via anchored_choice
    biases::TemporalWeighting precedent_weighting{};  // lambda>0 re-biases precedent picks
    double suggestion_beta = 0.0;  // scalar hook standing in for the prompt logit shift
    double suggestion_signal = 0.0;
    bool automation_verify = true;  // false bypasses the twin verification gate
};

// Everything a policy sees on its turn.
struct AgentView {
    const twin::TwinState* state = nullptr;
    std::map<std::string, double> standing;  // full joint proposal
    double own_anchor = 0.0;
    const memory::QueryResult* retrievals = nullptr;
    int round = 0;
    bool opener = false;  // asked for the opening anchor proposal
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual Message step(const AgentView& view, Rng& mc_rng) = 0;
};

// Fixed anchor: minimum SLA-securing resource plus the negotiation buffer.
double fixed_anchor(const twin::TwinState& state, const scenario::SliceSpec& slice,
                    const scenario::ScenarioConfig& cfg);

// Randomized anchor per the uniform draw in [1, min(0.8 b_total, 1.5 min_bw)];
// a bound <= 1 falls back to 1.
double randomized_anchor(const twin::TwinState& state, const scenario::SliceSpec& slice,
                         const scenario::ScenarioConfig& cfg, Rng& rng);

// Anchor for whichever resource the agent controls (bandwidth or cpu).
double anchor_for_agent(const AgentConfig& agent, const std::string& strategy,
                        const twin::TwinState& state, const scenario::ScenarioConfig& cfg,
                        Rng& rng);

// Scalarized utility in [0,1] from a per-agent cost vector.
double utility(const twin::CostVector& cost, const scenario::SliceSpec& slice,
               const scenario::UtilityWeights& weights);

// DT-grounded scripted policy: evaluates the standing proposal against the
// twin, concedes toward the feasibility frontier, exploits memory precedents,
// avoids retrieved failure neighborhoods, and screens every counter-proposal
// through the automation verification gate.
class ScriptedPolicy : public Policy {
public:
    ScriptedPolicy(AgentConfig agent, const scenario::ScenarioConfig* cfg, BiasHooks hooks = {});

    Message step(const AgentView& view, Rng& mc_rng) override;

    // Minimum own resource meeting the (budget share of the) SLA.
    double predicted_min(const twin::TwinState& state) const;
    // Hard per-resource cap independent of the peer's demand.
    double hard_cap() const;

    const AgentConfig& agent() const { return agent_; }
    const BiasHooks& hooks() const { return hooks_; }

private:
    struct Assessment {
        twin::CostVector own_cost;
        double own_utility = 0.0;
        bool joint_feasible = false;
        bool chance_ok = false;
    };

    Assessment assess(const AgentView& view, const std::map<std::string, double>& proposal,
                      const twin::NoiseDraws& draws) const;
    double screening_sigma(double candidate, const AgentView& view) const;
    twin::AllocationMap to_alloc(const std::map<std::string, double>& proposal) const;
    bool joint_caps_ok(const std::map<std::string, double>& proposal) const;
    double soft_cap(const std::map<std::string, double>& standing) const;

    AgentConfig agent_;
    const scenario::ScenarioConfig* cfg_;
    BiasHooks hooks_;
};

struct ExecutionReport {
    double latency_ms = 0.0;  // worst slice (independent) or chain total
    std::map<std::string, double> slice_latency_ms;  // slice name -> realized latency
    double energy_saving_pct = 0.0;                  // vs caps
    bool sla_violated = false;
};

struct Outcome {
    memory::NegotiationResult result = memory::NegotiationResult::UnresolvedNegotiation;
    std::map<std::string, double> final_allocations;  // resource-id -> value
    int rounds_used = 0;                              // proposal messages exchanged
    std::map<std::string, double> anchors;            // agent-id -> anchor value
    std::vector<Message> transcript;
    ExecutionReport execution;
};

struct SessionInputs {
    const twin::TwinState* state = nullptr;          // the agents' synchronized view
    const twin::TelemetrySnapshot* true_load = nullptr;  // ground truth for execution
    std::map<std::string, double> anchors;           // agent-id -> anchor value
    const memory::QueryResult* retrievals_a = nullptr;
    const memory::QueryResult* retrievals_b = nullptr;
};

// Turn-based protocol: the tighter-SLA agent opens with the joint anchor map;
// agents then alternate counter-proposals (own component only) until one side
// confirms the standing proposal, which seals the agreement and triggers the
// commit. Agreements are re-executed under perturbed traffic and classified
// as success or SLA violation; everything else is unresolved.
Outcome run_negotiation(Policy& policy_a, const AgentConfig& agent_a, Policy& policy_b,
                        const AgentConfig& agent_b, const SessionInputs& in,
                        const scenario::ScenarioConfig& cfg, Rng& mc_rng, Rng& exec_rng);

// Static conservative allocation applied when a session fails to agree.
std::map<std::string, double> fallback_allocations(const AgentConfig& agent_a,
                                                   const AgentConfig& agent_b,
                                                   const twin::TwinState& state,
                                                   const scenario::ScenarioConfig& cfg);

}  // namespace negsim::nego
