#include "negsim/biases.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace negsim::biases {

void TrustModel::validate() const {
    const std::size_t n = tau.size();
    if (!(eta_lr > 0.0)) throw ValidationError("TrustModel.eta_lr: must be > 0");
    for (double t : tau)
        if (t < 0.0 || t > 1.0) throw ValidationError("TrustModel.tau: values must lie in [0,1]");
    if (rho.size() != n) throw ValidationError("TrustModel.rho: must be square over tasks");
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i].size() != n) throw ValidationError("TrustModel.rho: must be square over tasks");
        if (std::fabs(rho[i][i] - 1.0) > 1e-12)
            throw ValidationError("TrustModel.rho: diagonal must be 1");
        for (std::size_t j = 0; j < n; ++j) {
            if (rho[i][j] < 0.0 || rho[i][j] > 1.0)
                throw ValidationError("TrustModel.rho: entries must lie in [0,1]");
            if (std::fabs(rho[i][j] - rho[j][i]) > 1e-12)
                throw ValidationError("TrustModel.rho: must be symmetric");
        }
    }
}

double confirmation_posterior(double prior, const std::vector<Evidence>& evidence,
                              bool selective) {
    if (!(prior > 0.0) || !(prior < 1.0))
        throw PreconditionError("confirmation_posterior: prior must lie in (0,1)");
    double lik_h = 1.0, lik_not_h = 1.0;
    bool any = false;
    for (const auto& e : evidence) {
        if (!(e.likelihood_h > 0.0) || !(e.likelihood_not_h > 0.0))
            throw PreconditionError("confirmation_posterior: likelihoods must be > 0");
        if (selective && !e.supports_h) continue;  // the selection operator S(D, H)
        lik_h *= e.likelihood_h;
        lik_not_h *= e.likelihood_not_h;
        any = true;
    }
    if (!any) return prior;
    const double num = prior * lik_h;
    return num / (num + (1.0 - prior) * lik_not_h);
}

std::vector<double> temporal_weights(int n, const TemporalWeighting& model) {
    if (n < 1) throw PreconditionError("temporal_weights: n must be >= 1");
    model.validate();
    const double ref = model.reference == TemporalReference::Latest ? n - 1 : 0;
    std::vector<double> w(n);
    double sum = 0.0;
    for (int t = 0; t < n; ++t) {
        w[t] = std::exp(-model.lambda * std::fabs(ref - t));
        sum += w[t];
    }
    for (auto& v : w) v /= sum;
    return w;
}

double temporal_estimate(const std::vector<double>& xs, const TemporalWeighting& model) {
    const auto w = temporal_weights(static_cast<int>(xs.size()), model);
    double est = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) est += w[t] * xs[t];
    return est;
}

ActionCandidate anchored_choice(const std::vector<ActionCandidate>& candidates,
                                const AnchorModel& model) {
    if (candidates.empty()) throw PreconditionError("anchored_choice: need at least one candidate");
    model.validate();
    const ActionCandidate* best = nullptr;
    double best_score = 0.0, best_dist = 0.0;
    for (const auto& c : candidates) {
        const double dist = std::fabs(c.action - model.anchor);
        const double score = c.utility - model.gamma * dist;
        const bool better =
            !best || score > best_score ||
            (score == best_score &&
             (dist < best_dist || (dist == best_dist && c.action < best->action)));
        if (better) {
            best = &c;
            best_score = score;
            best_dist = dist;
        }
    }
    return *best;
}

double availability_estimate(const std::vector<SalientEvent>& events, bool base_rate) {
    if (events.empty()) throw PreconditionError("availability_estimate: need at least one event");
    double num = 0.0, den = 0.0;
    for (const auto& e : events) {
        if (e.salience < 0.0)
            throw PreconditionError("availability_estimate: salience must be >= 0");
        const double r = base_rate ? 1.0 : e.salience;
        den += r;
        if (e.evidences) num += r;
    }
    if (den == 0.0) throw PreconditionError("availability_estimate: all saliences are zero");
    return num / den;
}

double authority_mix(double y_source, double y_local, double tau_s) {
    if (tau_s < 0.0 || tau_s > 1.0)
        throw PreconditionError("authority_mix: tau_s must lie in [0,1]");
    return tau_s * y_source + (1.0 - tau_s) * y_local;
}

bool dual_source_validate(double y_source, double y_local, double tolerance) {
    return std::fabs(y_source - y_local) > tolerance;
}

TrustModel halo_update(const TrustModel& trust, int succeeded_task, bool observed_success,
                       bool domain_separation) {
    trust.validate();
    if (succeeded_task < 0 || static_cast<std::size_t>(succeeded_task) >= trust.tau.size())
        throw PreconditionError("halo_update: task index out of range");
    TrustModel next = trust;
    if (!observed_success) return next;
    for (std::size_t j = 0; j < next.tau.size(); ++j) {
        double rho = trust.rho[succeeded_task][j];
        if (domain_separation && static_cast<std::size_t>(succeeded_task) != j) rho = 0.0;
        next.tau[j] = std::clamp(next.tau[j] + trust.eta_lr * rho, 0.0, 1.0);
    }
    return next;
}

ConsensusResult groupthink_consensus(const std::vector<QuadraticLoss>& losses,
                                     const ConsensusParams& params) {
    if (losses.empty()) throw PreconditionError("groupthink_consensus: need at least one loss");
    params.validate();
    for (const auto& l : losses)
        if (!(l.curvature > 0.0))
            throw PreconditionError("groupthink_consensus: curvatures must be > 0");

    const std::size_t n = losses.size();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = losses[i].minimizer;
    if (params.lambda_consensus == 0.0) return {a, 0};

    const double lam = params.lambda_consensus;
    double sum = std::accumulate(a.begin(), a.end(), 0.0);
    for (int it = 1; it <= params.max_iters; ++it) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // Exact coordinate minimum of c_i (a_i - m_i)^2 + lam sum_j (a_j - mean)^2.
            const double rest = sum - a[i];
            const double denom = losses[i].curvature + lam * (n - 1.0) / n;
            const double ai = (losses[i].curvature * losses[i].minimizer + lam * rest / n) / denom;
            max_delta = std::max(max_delta, std::fabs(ai - a[i]));
            sum += ai - a[i];
            a[i] = ai;
        }
        if (max_delta < params.tol) return {a, it};
    }
    throw ConsensusError("groupthink_consensus: no convergence within max_iters", a);
}

double consensus_dispersion(const std::vector<double>& actions) {
    if (actions.empty()) return 0.0;
    const double mean =
        std::accumulate(actions.begin(), actions.end(), 0.0) / actions.size();
    double d = 0.0;
    for (double a : actions) d += (a - mean) * (a - mean);
    return d;
}

double social_bayes_update(double own_belief, double peer_signal) {
    if (!(own_belief > 0.0) || !(own_belief < 1.0) || !(peer_signal > 0.0) || !(peer_signal < 1.0))
        throw PreconditionError("social_bayes_update: inputs must lie in (0,1)");
    const double num = own_belief * peer_signal;
    return num / (num + (1.0 - own_belief) * (1.0 - peer_signal));
}

double sunk_cost_utility(double expected_benefit, double cost, const SunkCostParams& params,
                         bool mitigate) {
    params.validate();
    const double rational = expected_benefit - cost;
    if (mitigate) return rational;
    return rational + params.alpha * std::log1p(params.investment);
}

double uncertainty_choice(const UtilityFn& utility, const std::vector<double>& actions,
                          const std::vector<WeightedScenario>& scenarios, bool neglect) {
    if (actions.empty()) throw PreconditionError("uncertainty_choice: need at least one action");
    if (scenarios.empty()) throw PreconditionError("uncertainty_choice: need at least one scenario");
    double wsum = 0.0;
    for (const auto& s : scenarios) {
        if (s.weight < 0.0) throw PreconditionError("uncertainty_choice: weights must be >= 0");
        wsum += s.weight;
    }
    if (wsum == 0.0) throw PreconditionError("uncertainty_choice: weights sum to zero");

    auto value_of = [&](double a) {
        if (neglect) {
            double mean_x = 0.0;
            for (const auto& s : scenarios) mean_x += s.weight * s.x;
            return utility(a, mean_x / wsum);
        }
        double v = 0.0;
        for (const auto& s : scenarios) v += s.weight * utility(a, s.x);
        return v / wsum;
    };

    double best_a = actions.front();
    double best_v = value_of(best_a);
    for (std::size_t i = 1; i < actions.size(); ++i) {
        const double v = value_of(actions[i]);
        if (v > best_v) {
            best_v = v;
            best_a = actions[i];
        }
    }
    return best_a;
}

bool status_quo_gate(double u_new, double u_current, double c_switch) {
    if (c_switch < 0.0) throw PreconditionError("status_quo_gate: c_switch must be >= 0");
    return u_new - u_current > c_switch;
}

bool status_quo_gate_mitigated(double u_new, double u_current, double c_switch, int horizon) {
    if (horizon < 1) throw PreconditionError("status_quo_gate_mitigated: horizon must be >= 1");
    if (c_switch < 0.0) throw PreconditionError("status_quo_gate_mitigated: c_switch must be >= 0");
    return (u_new - u_current) * horizon > c_switch;
}

AutomationResult automated_action(double tool_output, std::optional<double> tool_confidence,
                                  const VerifyFn& verify) {
    AutomationResult r;
    r.action = tool_output;
    r.confidence = tool_confidence.value_or(0.5);
    if (!verify) {
        r.status = AutomationStatus::Executed;
        r.verified = false;
        r.reason = "unverified tool output";
        return r;
    }
    VerifyOutcome v;
    try {
        v = verify(tool_output);
    } catch (const std::exception& e) {
        r.status = AutomationStatus::Deferred;
        r.verified = false;
        r.reason = std::string("verification failed to run: ") + e.what();
        return r;
    }
    if (v.pass) {
        r.status = AutomationStatus::Executed;
        r.verified = true;
        r.confidence = 1.0 - v.risk;
        r.reason = v.reason.empty() ? "twin check passed" : v.reason;
    } else {
        r.status = AutomationStatus::Rejected;
        r.verified = false;
        r.confidence = 1.0 - v.risk;
        r.reason = v.reason.empty() ? "twin check rejected the action" : v.reason;
    }
    return r;
}

double survivorship_estimate(const std::vector<SurvivalSample>& samples, bool survivors_only) {
    if (samples.empty()) throw PreconditionError("survivorship_estimate: need at least one sample");
    double sum = 0.0;
    long n = 0;
    for (const auto& s : samples) {
        if (survivors_only && !s.survived) continue;
        sum += s.value;
        ++n;
    }
    if (n == 0) throw PreconditionError("survivorship_estimate: no survivors in selection");
    return sum / n;
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& context) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close == std::string::npos)
                throw ValidationError("template: unterminated placeholder");
            const std::string key = tmpl.substr(i + 1, close - i - 1);
            auto it = context.find(key);
            if (it == context.end())
                throw ValidationError("template: unbound placeholder {" + key + "}");
            out += it->second;
            i = close + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

const std::vector<std::string>& priming_phrases() {
    static const std::vector<std::string> phrases = {
        "at all costs", "primary goal", "above all", "no matter what", "must maximize",
        "must minimize",
    };
    return phrases;
}

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

void PromptLibrary::add(const std::string& id, std::vector<std::string> forms) {
    if (forms.empty()) throw ValidationError("prompt library: template '" + id + "' has no forms");
    for (const auto& f : forms) {
        const std::string lf = lowercase(f);
        for (const auto& phrase : priming_phrases())
            if (lf.find(phrase) != std::string::npos)
                throw ValidationError("prompt library: template '" + id +
                                      "' contains priming phrase '" + phrase + "'");
    }
    forms_[id] = std::move(forms);
}

std::string PromptLibrary::render(const std::string& id,
                                  const std::map<std::string, std::string>& context,
                                  std::size_t variant) const {
    auto it = forms_.find(id);
    if (it == forms_.end()) throw ValidationError("prompt library: unknown template '" + id + "'");
    if (variant >= it->second.size())
        throw PreconditionError("prompt library: template '" + id + "' has no variant " +
                                std::to_string(variant));
    return render_template(it->second[variant], context);
}

std::vector<std::string> PromptLibrary::controlled_reprompt(
    const std::string& id, const std::map<std::string, std::string>& context, int k) const {
    auto it = forms_.find(id);
    if (it == forms_.end()) throw ValidationError("prompt library: unknown template '" + id + "'");
    if (k < 1 || static_cast<std::size_t>(k) > it->second.size())
        throw PreconditionError("prompt library: template '" + id + "' has " +
                                std::to_string(it->second.size()) + " forms, cannot reprompt " +
                                std::to_string(k));
    std::vector<std::string> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(render_template(it->second[i], context));
    return out;
}

std::size_t PromptLibrary::variants(const std::string& id) const {
    auto it = forms_.find(id);
    return it == forms_.end() ? 0 : it->second.size();
}

}  // namespace negsim::biases
