#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "negsim/errors.hpp"

// Pure operators for the fourteen formula-bearing cognitive biases, each with
// its mitigation counterpart. Every function is value-in/value-out; policies
// instrument themselves by composing these.
namespace negsim::biases {

// ---------------------------------------------------------------------------
// Parameter types

struct AnchorModel {
    double anchor = 0.0;  // a0
    double gamma = 0.0;   // deviation penalty weight, >= 0

    void validate() const {
        if (gamma < 0.0) throw ValidationError("AnchorModel.gamma: must be >= 0");
    }
};

enum class TemporalReference { Latest, Earliest };

struct TemporalWeighting {
    double lambda = 0.0;  // decay rate, >= 0; 0 gives uniform weights
    TemporalReference reference = TemporalReference::Latest;

    void validate() const {
        if (lambda < 0.0) throw ValidationError("TemporalWeighting.lambda: must be >= 0");
    }
};

struct TrustModel {
    std::vector<double> tau;               // per-task trust in [0,1]
    double eta_lr = 0.1;                   // learning rate
    std::vector<std::vector<double>> rho;  // task-similarity matrix

    void validate() const;
};

struct ConsensusParams {
    double lambda_consensus = 0.0;
    int max_iters = 10000;
    double tol = 1e-10;

    void validate() const {
        if (lambda_consensus < 0.0)
            throw ValidationError("ConsensusParams.lambda_consensus: must be >= 0");
        if (max_iters < 1) throw ValidationError("ConsensusParams.max_iters: must be >= 1");
    }
};

struct SunkCostParams {
    double alpha = 1.0;      // > 0
    double investment = 0.0;  // S >= 0; f(S) = log(1 + S)

    void validate() const {
        if (!(alpha > 0.0)) throw ValidationError("SunkCostParams.alpha: must be > 0");
        if (investment < 0.0) throw ValidationError("SunkCostParams.investment: must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// Confirmation bias: posterior under a selection operator S(D, H)

struct Evidence {
    double likelihood_h = 1.0;      // p(x | H)
    double likelihood_not_h = 1.0;  // p(x | not H)
    bool supports_h = false;
};

// selective=true keeps only supporting evidence (the bias); false is the
// mitigated symmetric-sampling update over everything.
double confirmation_posterior(double prior, const std::vector<Evidence>& evidence, bool selective);

// ---------------------------------------------------------------------------
// Recency/primacy: normalized weights w_t ~ exp(-lambda |ref - t|)

std::vector<double> temporal_weights(int n, const TemporalWeighting& model);

// Weighted temporal estimator sum(w_t x_t) / sum(w_t).
double temporal_estimate(const std::vector<double>& xs, const TemporalWeighting& model);

// ---------------------------------------------------------------------------
// Anchoring: argmax_a U(a) - gamma d(a, a0), d = |.|

struct ActionCandidate {
    double action = 0.0;
    double utility = 0.0;
};

// Ties break toward the candidate closer to the anchor, then toward the
// smaller action value.
ActionCandidate anchored_choice(const std::vector<ActionCandidate>& candidates,
                                const AnchorModel& model);

// ---------------------------------------------------------------------------
// Availability: salience-weighted probability estimate

struct SalientEvent {
    bool evidences = false;
    double salience = 1.0;  // r(x) >= 0
};

// base_rate=true is the mitigation (all saliences forced to 1).
double availability_estimate(const std::vector<SalientEvent>& events, bool base_rate = false);

// ---------------------------------------------------------------------------
// Authority: y_hat = tau_s y_s + (1 - tau_s) y_local

double authority_mix(double y_source, double y_local, double tau_s);

// Mitigation: flags disagreement beyond `tolerance` so trust gets recalibrated
// instead of silently averaged.
bool dual_source_validate(double y_source, double y_local, double tolerance);

// ---------------------------------------------------------------------------
// Halo effect: trust transfer tau_j += eta 1(success_i) rho_ij

// domain_separation=true is the mitigation: cross-task transfer (i != j) is
// gated off before the update.
TrustModel halo_update(const TrustModel& trust, int succeeded_task, bool observed_success,
                       bool domain_separation = false);

// ---------------------------------------------------------------------------
// Groupthink: min sum_i L_i(a_i) + lambda sum_i ||a_i - mean||^2

struct QuadraticLoss {
    double curvature = 1.0;  // > 0
    double minimizer = 0.0;
};

struct ConsensusResult {
    std::vector<double> actions;
    int iterations = 0;
};

class ConsensusError : public std::runtime_error {
public:
    ConsensusError(const std::string& msg, std::vector<double> iterate)
        : std::runtime_error(msg), iterate(std::move(iterate)) {}
    std::vector<double> iterate;
};

ConsensusResult groupthink_consensus(const std::vector<QuadraticLoss>& losses,
                                     const ConsensusParams& params);

double consensus_dispersion(const std::vector<double>& actions);

// Bayesian-like social update: p' = pq / (pq + (1-p)(1-q)).
double social_bayes_update(double own_belief, double peer_signal);

// ---------------------------------------------------------------------------
// Sunk cost: U = (E[B] - C) + alpha log(1 + S)

// mitigate=true resets historical influence: returns E[B] - C alone.
double sunk_cost_utility(double expected_benefit, double cost, const SunkCostParams& params,
                         bool mitigate = false);

// ---------------------------------------------------------------------------
// Neglect of uncertainty: argmax at the mean scenario vs expected utility

struct WeightedScenario {
    double x = 0.0;
    double weight = 1.0;
};

using UtilityFn = std::function<double(double action, double scenario)>;

// neglect=true picks argmax_a U(a, E[x]); false is the mitigated expected-
// utility choice. Ties break toward the earlier action in the list.
double uncertainty_choice(const UtilityFn& utility, const std::vector<double>& actions,
                          const std::vector<WeightedScenario>& scenarios, bool neglect);

// ---------------------------------------------------------------------------
// Status quo: switch only when the expected gain exceeds the switching cost

bool status_quo_gate(double u_new, double u_current, double c_switch);

// Mitigation: accumulate the per-period gain over `horizon` periods so the
// opportunity cost of staying is priced in.
bool status_quo_gate_mitigated(double u_new, double u_current, double c_switch, int horizon);

// ---------------------------------------------------------------------------
// Automation: a = f(tool) vs a = f(tool, verify(.))

struct VerifyOutcome {
    bool pass = false;
    double risk = 0.0;
    std::string reason;
};

using VerifyFn = std::function<VerifyOutcome(double action)>;

enum class AutomationStatus { Executed, Rejected, Deferred };

struct AutomationResult {
    AutomationStatus status = AutomationStatus::Executed;
    double action = 0.0;
    bool verified = false;
    double confidence = 0.5;  // propagated with outgoing messages
    std::string reason;
};

// Without `verify` the tool output passes straight through (the bias). With
// it, the action executes only if verification passes; a throwing verifier
// defers the action and surfaces the error in `reason`.
AutomationResult automated_action(double tool_output, std::optional<double> tool_confidence,
                                  const VerifyFn& verify = nullptr);

// ---------------------------------------------------------------------------
// Survivorship: mean over survivors vs over everything

struct SurvivalSample {
    double value = 0.0;
    bool survived = false;
};

double survivorship_estimate(const std::vector<SurvivalSample>& samples, bool survivors_only);

// ---------------------------------------------------------------------------
// Suggestion/prompting: neutral template library with lint and re-prompting

// Substitutes {key} placeholders; throws ValidationError on an unbound one.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& context);

// Phrases rejected at template-library load time.
const std::vector<std::string>& priming_phrases();

class PromptLibrary {
public:
    // Registers semantically equivalent neutral forms for one template id.
    // Each form is linted against priming_phrases().
    void add(const std::string& id, std::vector<std::string> forms);

    std::string render(const std::string& id, const std::map<std::string, std::string>& context,
                       std::size_t variant = 0) const;

    // Renders k distinct equivalent forms with identical bound values.
    std::vector<std::string> controlled_reprompt(const std::string& id,
                                                 const std::map<std::string, std::string>& context,
                                                 int k) const;

    std::size_t variants(const std::string& id) const;

private:
    std::map<std::string, std::vector<std::string>> forms_;
};

// Opaque scalar hook standing in for the logit shift beta*s(prompt); applied
// to scripted-policy candidate utilities.
inline double suggestion_shift(double utility, double beta, double s) { return utility + beta * s; }

}  // namespace negsim::biases
