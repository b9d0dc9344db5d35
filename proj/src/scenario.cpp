#include "negsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace negsim::scenario {

using nlohmann::json;

const char* to_string(SliceId id) {
    switch (id) {
        case SliceId::Embb: return "eMBB";
        case SliceId::Urllc: return "URLLC";
        case SliceId::Ran: return "RAN";
        case SliceId::Edge: return "Edge";
    }
    return "?";
}

SliceId slice_id_from_string(const std::string& s) {
    if (s == "eMBB") return SliceId::Embb;
    if (s == "URLLC") return SliceId::Urllc;
    if (s == "RAN") return SliceId::Ran;
    if (s == "Edge") return SliceId::Edge;
    throw ValidationError("slice id: unknown value '" + s + "' (expected eMBB|URLLC|RAN|Edge)");
}

const char* to_string(Topology t) {
    return t == Topology::IndependentSlices ? "independent_slices" : "ran_edge_chain";
}

Topology topology_from_string(const std::string& s) {
    if (s == "independent_slices") return Topology::IndependentSlices;
    if (s == "ran_edge_chain") return Topology::RanEdgeChain;
    throw ValidationError("topology: unknown value '" + s + "'");
}

const char* to_string(DecayForm f) { return f == DecayForm::Factor ? "factor" : "rate"; }

DecayForm decay_form_from_string(const std::string& s) {
    if (s == "factor") return DecayForm::Factor;
    if (s == "rate") return DecayForm::Rate;
    throw ValidationError("memory.decay_form: unknown value '" + s + "'");
}

void SliceSpec::validate() const {
    const std::string tag = std::string("slices[") + to_string(id) + "].";
    if (!(sla_latency_ms > 0.0))
        throw ValidationError(tag + "sla_latency_ms: must be > 0, got " + std::to_string(sla_latency_ms));
    if (traffic_rate_mbps < 0.0)
        throw ValidationError(tag + "traffic_rate_mbps: must be >= 0");
    if (queue_backlog_mb < 0.0)
        throw ValidationError(tag + "queue_backlog_mb: must be >= 0");
    if (min_utility_threshold < 0.0 || min_utility_threshold > 1.0)
        throw ValidationError(tag + "min_utility_threshold: must lie in [0,1]");
}

void CapacityConfig::validate() const {
    if (!(b_total_mhz > 0.0)) throw ValidationError("caps.b_total_mhz: must be > 0");
    if (!(b_max_mhz > 0.0)) throw ValidationError("caps.b_max_mhz: must be > 0");
    if (!(f_max_ghz > 0.0)) throw ValidationError("caps.f_max_ghz: must be > 0");
    if (!(eta_min > 0.0)) throw ValidationError("caps.eta_min: must be > 0");
    if (eta_min > eta_max)
        throw ValidationError("caps.eta_min: must not exceed caps.eta_max");
    if (!(cycles_per_bit > 0.0)) throw ValidationError("caps.cycles_per_bit: must be > 0");
}

void UtilityWeights::normalize() {
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (s > 0.0)
        for (auto& v : w) v /= s;
}

void UtilityWeights::validate() const {
    for (double v : w)
        if (v < 0.0) throw ValidationError("weights.w: components must be >= 0");
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(s > 0.0)) throw ValidationError("weights.w: at least one component must be > 0");
    if (epsilon < 0.0 || epsilon > 0.5)
        throw ValidationError("weights.epsilon: must lie in [0, 0.5]");
    if (r_max < 0.0 || r_max > 1.0) throw ValidationError("weights.r_max: must lie in [0,1]");
}

void NoiseConfig::validate() const {
    if (sigma_trial < 0 || sigma_exec < 0 || sigma_model < 0 || sigma_empirical < 0)
        throw ValidationError("noise.sigma_*: must be >= 0");
    if (regime_low <= 0 || regime_high <= 0)
        throw ValidationError("noise.regime_low/high: must be > 0");
    if (regime_flip_prob < 0 || regime_flip_prob > 1)
        throw ValidationError("noise.regime_flip_prob: must lie in [0,1]");
    if (mc_horizon < 1) throw ValidationError("noise.mc_horizon: must be >= 1");
}

void ProtocolConfig::validate() const {
    if (max_rounds < 1) throw ValidationError("protocol.max_rounds: must be >= 1");
    if (accept_threshold < 0 || accept_threshold > 1)
        throw ValidationError("protocol.accept_threshold: must lie in [0,1]");
    if (concession_rate < 0 || concession_rate > 1)
        throw ValidationError("protocol.concession_rate: must lie in [0,1]");
    if (anchor_buffer < 1.0) throw ValidationError("protocol.anchor_buffer: must be >= 1");
    if (min_buffer < 1.0) throw ValidationError("protocol.min_buffer: must be >= 1");
    if (bold_factor <= 0 || bold_factor > 1)
        throw ValidationError("protocol.bold_factor: must lie in (0,1]");
    if (cliff_margin < 1.0) throw ValidationError("protocol.cliff_margin: must be >= 1");
    if (trust_rel_window < 0) throw ValidationError("protocol.trust_rel_window: must be >= 0");
    if (fallback_factor < 1.0) throw ValidationError("protocol.fallback_factor: must be >= 1");
    if (conservative_factor < 1.0)
        throw ValidationError("protocol.conservative_factor: must be >= 1");
}

void MemoryConfig::validate() const {
    if (policy != "none" && policy != "vanilla" && policy != "unbiased")
        throw ValidationError("memory.policy: unknown value '" + policy + "'");
    if (alpha < 0 || beta < 0 || delta < 0 || kappa < 0)
        throw ValidationError("memory weights: alpha/beta/delta/kappa must be >= 0");
    if (!(theta > 0)) throw ValidationError("memory.theta: must be > 0");
    if (!(vanilla_theta > 0)) throw ValidationError("memory.vanilla_theta: must be > 0");
    if (!(sigma > 0)) throw ValidationError("memory.sigma: must be > 0");
    if (top_n < 1) throw ValidationError("memory.top_n: must be >= 1");
}

const SliceSpec& ScenarioConfig::slice(SliceId id) const {
    for (const auto& s : slices)
        if (s.id == id) return s;
    throw PreconditionError(std::string("scenario has no slice ") + to_string(id));
}

bool ScenarioConfig::has_slice(SliceId id) const {
    return std::any_of(slices.begin(), slices.end(), [&](const SliceSpec& s) { return s.id == id; });
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ValidationError("name: must be non-empty");
    if (slices.size() != 2)
        throw ValidationError("slices: exactly two negotiating domains are supported, got " +
                              std::to_string(slices.size()));
    for (const auto& s : slices) s.validate();
    if (slices[0].id == slices[1].id) throw ValidationError("slices: duplicate slice id");
    caps.validate();
    weights.validate();
    noise.validate();
    protocol.validate();
    memory.validate();
    if (ran_budget_share <= 0.0 || ran_budget_share >= 1.0)
        throw ValidationError("ran_budget_share: must lie in (0,1)");
    if (topology == Topology::RanEdgeChain) {
        if (!has_slice(SliceId::Ran) || !has_slice(SliceId::Edge))
            throw ValidationError("slices: ran_edge_chain topology requires RAN and Edge domains");
    }
}

namespace {

const json& need(const json& doc, const char* key, const std::string& ctx) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ValidationError(ctx + key + ": missing field");
    return *it;
}

double need_num(const json& doc, const char* key, const std::string& ctx) {
    const json& v = need(doc, key, ctx);
    if (!v.is_number()) throw ValidationError(ctx + key + ": expected a number");
    return v.get<double>();
}

double opt_num(const json& doc, const char* key, double fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number()) throw ValidationError(std::string(key) + ": expected a number");
    return it->get<double>();
}

std::string need_str(const json& doc, const char* key, const std::string& ctx) {
    const json& v = need(doc, key, ctx);
    if (!v.is_string()) throw ValidationError(ctx + key + ": expected a string");
    return v.get<std::string>();
}

}  // namespace

ScenarioConfig load_config(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config: document root must be an object");
    ScenarioConfig cfg;
    cfg.name = need_str(doc, "name", "");
    cfg.topology = topology_from_string(need_str(doc, "topology", ""));

    for (const auto& sj : need(doc, "slices", "")) {
        SliceSpec s;
        s.id = slice_id_from_string(need_str(sj, "id", "slices[]."));
        const std::string ctx = std::string("slices[") + to_string(s.id) + "].";
        s.sla_latency_ms = need_num(sj, "sla_latency_ms", ctx);
        s.traffic_rate_mbps = need_num(sj, "traffic_rate_mbps", ctx);
        s.queue_backlog_mb = need_num(sj, "queue_backlog_mb", ctx);
        s.min_utility_threshold = opt_num(sj, "min_utility_threshold", 0.0);
        cfg.slices.push_back(s);
    }

    const json& cj = need(doc, "caps", "");
    cfg.caps.b_total_mhz = need_num(cj, "b_total_mhz", "caps.");
    cfg.caps.b_max_mhz = need_num(cj, "b_max_mhz", "caps.");
    cfg.caps.f_max_ghz = need_num(cj, "f_max_ghz", "caps.");
    cfg.caps.eta_min = need_num(cj, "eta_min_bits_hz_s", "caps.");
    cfg.caps.eta_max = need_num(cj, "eta_max_bits_hz_s", "caps.");
    cfg.caps.cycles_per_bit = opt_num(cj, "cycles_per_bit", 100.0);

    const json& wj = need(doc, "weights", "");
    const json& warr = need(wj, "w", "weights.");
    if (!warr.is_array() || warr.size() != 4)
        throw ValidationError("weights.w: expected 4 components [latency, energy, fairness, risk]");
    for (size_t i = 0; i < 4; ++i) cfg.weights.w[i] = warr[i].get<double>();
    cfg.weights.epsilon = opt_num(wj, "epsilon", 0.05);
    cfg.weights.r_max = opt_num(wj, "r_max", 1.0);
    cfg.weights.validate();
    cfg.weights.normalize();

    if (auto it = doc.find("noise"); it != doc.end()) {
        const json& nj = *it;
        cfg.noise.sigma_trial = opt_num(nj, "sigma_trial", cfg.noise.sigma_trial);
        cfg.noise.sigma_exec = opt_num(nj, "sigma_exec", cfg.noise.sigma_exec);
        cfg.noise.sigma_model = opt_num(nj, "sigma_model", cfg.noise.sigma_model);
        cfg.noise.sigma_empirical = opt_num(nj, "sigma_empirical", cfg.noise.sigma_empirical);
        cfg.noise.regime_low = opt_num(nj, "regime_low", cfg.noise.regime_low);
        cfg.noise.regime_high = opt_num(nj, "regime_high", cfg.noise.regime_high);
        cfg.noise.regime_flip_prob = opt_num(nj, "regime_flip_prob", cfg.noise.regime_flip_prob);
        cfg.noise.mc_horizon = static_cast<int>(opt_num(nj, "mc_horizon", cfg.noise.mc_horizon));
    }

    if (auto it = doc.find("protocol"); it != doc.end()) {
        const json& pj = *it;
        cfg.protocol.max_rounds = static_cast<int>(opt_num(pj, "max_rounds", cfg.protocol.max_rounds));
        cfg.protocol.accept_threshold = opt_num(pj, "accept_threshold", cfg.protocol.accept_threshold);
        cfg.protocol.concession_rate = opt_num(pj, "concession_rate", cfg.protocol.concession_rate);
        cfg.protocol.anchor_buffer = opt_num(pj, "anchor_buffer", cfg.protocol.anchor_buffer);
        cfg.protocol.min_buffer = opt_num(pj, "min_buffer", cfg.protocol.min_buffer);
        cfg.protocol.bold_factor = opt_num(pj, "bold_factor", cfg.protocol.bold_factor);
        cfg.protocol.cliff_margin = opt_num(pj, "cliff_margin", cfg.protocol.cliff_margin);
        cfg.protocol.trust_rel_window = opt_num(pj, "trust_rel_window", cfg.protocol.trust_rel_window);
        cfg.protocol.fallback_factor = opt_num(pj, "fallback_factor", cfg.protocol.fallback_factor);
        cfg.protocol.conservative_factor =
            opt_num(pj, "conservative_factor", cfg.protocol.conservative_factor);
    }

    if (auto it = doc.find("memory"); it != doc.end()) {
        const json& mj = *it;
        if (auto p = mj.find("policy"); p != mj.end()) cfg.memory.policy = p->get<std::string>();
        cfg.memory.alpha = opt_num(mj, "alpha", cfg.memory.alpha);
        cfg.memory.beta = opt_num(mj, "beta", cfg.memory.beta);
        cfg.memory.delta = opt_num(mj, "delta", cfg.memory.delta);
        cfg.memory.theta = opt_num(mj, "theta", cfg.memory.theta);
        cfg.memory.vanilla_theta = opt_num(mj, "vanilla_theta", cfg.memory.vanilla_theta);
        cfg.memory.kappa = opt_num(mj, "kappa", cfg.memory.kappa);
        cfg.memory.sigma = opt_num(mj, "sigma", cfg.memory.sigma);
        cfg.memory.top_n = static_cast<int>(opt_num(mj, "top_n", cfg.memory.top_n));
        if (auto f = mj.find("decay_form"); f != mj.end())
            cfg.memory.decay_form = decay_form_from_string(f->get<std::string>());
    }

    if (auto it = doc.find("keywords"); it != doc.end())
        for (const auto& k : *it) cfg.keywords.push_back(k.get<std::string>());

    cfg.ran_budget_share = opt_num(doc, "ran_budget_share", cfg.ran_budget_share);

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config file not found: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("config file " + path + ": " + e.what());
    }
    return load_config(doc);
}

json to_json(const ScenarioConfig& cfg) {
    json slices = json::array();
    for (const auto& s : cfg.slices) {
        slices.push_back({{"id", to_string(s.id)},
                          {"sla_latency_ms", s.sla_latency_ms},
                          {"traffic_rate_mbps", s.traffic_rate_mbps},
                          {"queue_backlog_mb", s.queue_backlog_mb},
                          {"min_utility_threshold", s.min_utility_threshold}});
    }
    return json{
        {"name", cfg.name},
        {"topology", to_string(cfg.topology)},
        {"slices", slices},
        {"caps",
         {{"b_total_mhz", cfg.caps.b_total_mhz},
          {"b_max_mhz", cfg.caps.b_max_mhz},
          {"f_max_ghz", cfg.caps.f_max_ghz},
          {"eta_min_bits_hz_s", cfg.caps.eta_min},
          {"eta_max_bits_hz_s", cfg.caps.eta_max},
          {"cycles_per_bit", cfg.caps.cycles_per_bit}}},
        {"weights",
         {{"w", cfg.weights.w}, {"epsilon", cfg.weights.epsilon}, {"r_max", cfg.weights.r_max}}},
        {"noise",
         {{"sigma_trial", cfg.noise.sigma_trial},
          {"sigma_exec", cfg.noise.sigma_exec},
          {"sigma_model", cfg.noise.sigma_model},
          {"sigma_empirical", cfg.noise.sigma_empirical},
          {"regime_low", cfg.noise.regime_low},
          {"regime_high", cfg.noise.regime_high},
          {"regime_flip_prob", cfg.noise.regime_flip_prob},
          {"mc_horizon", cfg.noise.mc_horizon}}},
        {"protocol",
         {{"max_rounds", cfg.protocol.max_rounds},
          {"accept_threshold", cfg.protocol.accept_threshold},
          {"concession_rate", cfg.protocol.concession_rate},
          {"anchor_buffer", cfg.protocol.anchor_buffer},
          {"min_buffer", cfg.protocol.min_buffer},
          {"bold_factor", cfg.protocol.bold_factor},
          {"cliff_margin", cfg.protocol.cliff_margin},
          {"trust_rel_window", cfg.protocol.trust_rel_window},
          {"fallback_factor", cfg.protocol.fallback_factor},
          {"conservative_factor", cfg.protocol.conservative_factor}}},
        {"memory",
         {{"policy", cfg.memory.policy},
          {"alpha", cfg.memory.alpha},
          {"beta", cfg.memory.beta},
          {"delta", cfg.memory.delta},
          {"theta", cfg.memory.theta},
          {"vanilla_theta", cfg.memory.vanilla_theta},
          {"kappa", cfg.memory.kappa},
          {"sigma", cfg.memory.sigma},
          {"top_n", cfg.memory.top_n},
          {"decay_form", to_string(cfg.memory.decay_form)}}},
        {"keywords", cfg.keywords},
        {"ran_budget_share", cfg.ran_budget_share},
    };
}

ScenarioConfig uc1_defaults() {
    ScenarioConfig cfg;
    cfg.name = "uc1-inter-slice";
    cfg.topology = Topology::IndependentSlices;
    cfg.slices = {
        // Traffic magnitudes are synthetic: the setup fixes only the 50 MHz
        // pool and the 50/10 ms SLAs.
        SliceSpec{SliceId::Embb, 50.0, 100.0, 0.5, 0.6},
        SliceSpec{SliceId::Urllc, 10.0, 50.0, 0.1, 0.6},
    };
    cfg.caps = CapacityConfig{50.0, 50.0, 45.0, 6.0, 8.0, 100.0};
    cfg.weights.w = {0.35, 0.35, 0.15, 0.15};
    cfg.weights.epsilon = 0.05;
    cfg.noise.sigma_trial = 0.10;
    cfg.noise.sigma_exec = 0.10;
    cfg.noise.sigma_model = 0.30;
    cfg.noise.sigma_empirical = 0.10;
    cfg.memory.policy = "vanilla";
    cfg.memory.sigma = 5.0;  // 10% of the 50 MHz pool
    cfg.keywords = {"inter", "slice", "bandwidth", "negotiation", "embb", "urllc"};
    cfg.validate();
    return cfg;
}

ScenarioConfig uc2_defaults() {
    ScenarioConfig cfg;
    cfg.name = "uc2-cross-domain";
    cfg.topology = Topology::RanEdgeChain;
    cfg.slices = {
        SliceSpec{SliceId::Ran, 10.0, 0.8, 0.04, 0.6},
        SliceSpec{SliceId::Edge, 10.0, 0.8, 0.0, 0.6},
    };
    cfg.caps = CapacityConfig{40.0, 40.0, 45.0, 6.0, 8.0, 100.0};
    cfg.weights.w = {0.30, 0.40, 0.10, 0.20};
    cfg.weights.epsilon = 0.05;
    cfg.noise.sigma_trial = 0.08;
    cfg.noise.sigma_exec = 0.10;
    cfg.noise.sigma_model = 0.30;
    cfg.noise.sigma_empirical = 0.10;
    cfg.noise.regime_low = 0.6;
    cfg.noise.regime_high = 1.5;
    cfg.noise.regime_flip_prob = 0.4;
    cfg.memory.policy = "unbiased";
    cfg.memory.theta = 5.0;
    cfg.memory.vanilla_theta = 1.0;
    cfg.memory.sigma = 4.0;  // 10% of the 40 MHz cap
    cfg.keywords = {"cross", "domain", "ran", "edge", "energy", "latency"};
    cfg.validate();
    return cfg;
}

namespace {

bool close_rel(double a, double b, double rel) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) <= rel * scale;
}

}  // namespace

CanonicalState canonicalize(const FramedState& raw) {
    if (!(raw.total > 0.0))
        throw PreconditionError("canonicalize: total must be > 0");

    std::vector<double> candidates;
    if (raw.free_fraction) candidates.push_back(*raw.free_fraction);
    if (raw.used_fraction) candidates.push_back(1.0 - *raw.used_fraction);
    if (raw.free_abs) candidates.push_back(*raw.free_abs / raw.total);
    if (raw.used_abs) candidates.push_back((raw.total - *raw.used_abs) / raw.total);
    if (candidates.empty())
        throw PreconditionError("canonicalize: no framing present (need one of used/free fraction/abs)");

    for (size_t i = 1; i < candidates.size(); ++i)
        if (!close_rel(candidates[i], candidates[0], 1e-9))
            throw InconsistencyError("canonicalize: framings disagree (used + free != total within 1e-9)");

    double f = candidates[0];
    if (f < -1e-9 || f > 1.0 + 1e-9)
        throw ValidationError("canonicalize: free fraction out of [0,1]");
    f = std::clamp(f, 0.0, 1.0);

    CanonicalState out;
    out.free_fraction = f;
    out.total = raw.total;
    out.free_abs = f * raw.total;
    out.trial_index = raw.trial_index;
    return out;
}

bool canonical_equal(const CanonicalState& a, const CanonicalState& b, double rel) {
    return close_rel(a.free_fraction, b.free_fraction, rel) && close_rel(a.total, b.total, rel) &&
           close_rel(a.free_abs, b.free_abs, rel) && a.trial_index == b.trial_index;
}

}  // namespace negsim::scenario
