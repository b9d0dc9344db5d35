#include "negsim/memory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

namespace negsim::memory {

using nlohmann::json;

const char* to_string(NegotiationResult r) {
    switch (r) {
        case NegotiationResult::AgreementSuccess: return "agreement_success";
        case NegotiationResult::UnresolvedNegotiation: return "unresolved_negotiation";
        case NegotiationResult::AgreementWithSlaViolation: return "agreement_with_sla_violation";
    }
    return "?";
}

NegotiationResult negotiation_result_from_string(const std::string& s) {
    if (s == "agreement_success") return NegotiationResult::AgreementSuccess;
    if (s == "unresolved_negotiation") return NegotiationResult::UnresolvedNegotiation;
    if (s == "agreement_with_sla_violation") return NegotiationResult::AgreementWithSlaViolation;
    throw ValidationError("negotiation_result: unknown value '" + s + "'");
}

void StrategyRecord::validate() const {
    if (id.empty()) throw ValidationError("record.id: must be non-empty");
    if (context.trial_number < 0)
        throw ValidationError("record.context.trial_number: must be >= 0");
}

bool is_failure(const StrategyRecord& r) {
    return r.outcome_summary.negotiation_result != NegotiationResult::AgreementSuccess;
}

void RetrievalWeights::validate() const {
    if (alpha < 0 || beta < 0 || delta < 0 || kappa < 0)
        throw ValidationError("retrieval weights: alpha/beta/delta/kappa must be >= 0");
    if (!(theta > 0)) throw ValidationError("retrieval weights: theta must be > 0");
    if (!(sigma > 0)) throw ValidationError("retrieval weights: sigma must be > 0");
    if (top_n < 1) throw ValidationError("retrieval weights: top_n must be >= 1");
}

const char* to_string(Policy p) {
    switch (p) {
        case Policy::None: return "none";
        case Policy::Vanilla: return "vanilla";
        case Policy::Unbiased: return "unbiased";
    }
    return "?";
}

Policy policy_from_string(const std::string& s) {
    if (s == "none") return Policy::None;
    if (s == "vanilla") return Policy::Vanilla;
    if (s == "unbiased") return Policy::Unbiased;
    throw ValidationError("memory policy: unknown value '" + s + "'");
}

std::set<std::string> tokenize(const std::string& text) {
    std::set<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.insert(cur);
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double time_decay(double age, double theta, DecayForm form) {
    if (!(theta > 0.0)) throw PreconditionError("time_decay: theta must be > 0");
    const double a = std::max(0.0, age);
    return form == DecayForm::Factor ? std::exp(-a / theta) : std::exp(-theta * a);
}

double anchor_penalty(const StrategyRecord& record, const AnchorRef& anchor, double kappa,
                      double sigma) {
    if (!(sigma > 0.0)) throw PreconditionError("anchor_penalty: sigma must be > 0");
    auto it = record.outcome_summary.final_allocations.find(anchor.resource);
    if (it == record.outcome_summary.final_allocations.end()) return 0.0;
    return kappa * std::exp(-std::fabs(it->second - anchor.value) / sigma);
}

ScoredMemory score(const StrategyRecord& record, const Query& query,
                   const RetrievalWeights& weights) {
    weights.validate();
    ScoredMemory s;
    s.record = record;
    s.semantic = jaccard(tokenize(record.description),
                         tokenize([&] {
                             std::string joined;
                             for (const auto& k : query.keywords) {
                                 if (!joined.empty()) joined += ' ';
                                 joined += k;
                             }
                             return joined;
                         }()));
    const double age = static_cast<double>(query.trial_number - record.context.trial_number);
    s.decay = time_decay(age, weights.theta, weights.decay_form);
    s.bonus = is_failure(record) ? weights.delta : 0.0;
    s.anchor_penalty =
        query.initial_anchor && weights.kappa > 0.0
            ? anchor_penalty(record, *query.initial_anchor, weights.kappa, weights.sigma)
            : 0.0;
    s.final_score = weights.alpha * s.semantic + weights.beta * s.decay + s.bonus - s.anchor_penalty;
    return s;
}

void MemoryStore::record_episode(StrategyRecord record, Policy policy) {
    record.validate();
    if (policy == Policy::None) return;
    if (policy == Policy::Vanilla && is_failure(record)) return;
    if (ids_.count(record.id))
        throw ValidationError("record.id: duplicate id '" + record.id + "'");
    ids_.insert(record.id);
    records_.push_back(std::move(record));
}

QueryResult MemoryStore::query(const Query& q, const RetrievalWeights& weights, Exec exec) const {
    QueryResult result;
    if (records_.empty()) return result;

    std::vector<ScoredMemory> scored(records_.size());
    const long n = static_cast<long>(records_.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) scored[i] = score(records_[i], q, weights);
    } else {
        for (long i = 0; i < n; ++i) scored[i] = score(records_[i], q, weights);
    }

    std::stable_sort(scored.begin(), scored.end(), [](const ScoredMemory& a, const ScoredMemory& b) {
        if (a.final_score != b.final_score) return a.final_score > b.final_score;
        if (a.record.context.trial_number != b.record.context.trial_number)
            return a.record.context.trial_number > b.record.context.trial_number;
        return a.record.id < b.record.id;
    });

    const std::size_t keep = std::min<std::size_t>(weights.top_n, scored.size());
    result.retrieved.assign(scored.begin(), scored.begin() + keep);
    double sum = 0.0;
    for (const auto& s : result.retrieved) sum += s.final_score;
    result.average_score = keep > 0 ? sum / keep : 0.0;
    return result;
}

namespace {

constexpr const char* kLogSchema = "negsim.memory.v1";

json record_to_json(const StrategyRecord& r) {
    return json{
        {"schema", kLogSchema},
        {"id", r.id},
        {"description", r.description},
        {"context", {{"trial_number", r.context.trial_number}, {"keywords", r.context.keywords}}},
        {"outcome_summary",
         {{"negotiation_result", to_string(r.outcome_summary.negotiation_result)},
          {"final_allocations", r.outcome_summary.final_allocations},
          {"latency_ms", r.outcome_summary.latency_ms},
          {"energy_saving_pct", r.outcome_summary.energy_saving_pct}}},
    };
}

StrategyRecord record_from_json(const json& j) {
    if (j.value("schema", "") != kLogSchema)
        throw ValidationError("memory log: unknown schema '" + j.value("schema", "") + "'");
    StrategyRecord r;
    r.id = j.at("id").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.context.trial_number = j.at("context").at("trial_number").get<long>();
    r.context.keywords = j.at("context").at("keywords").get<std::vector<std::string>>();
    const json& o = j.at("outcome_summary");
    r.outcome_summary.negotiation_result =
        negotiation_result_from_string(o.at("negotiation_result").get<std::string>());
    r.outcome_summary.final_allocations =
        o.at("final_allocations").get<std::map<std::string, double>>();
    r.outcome_summary.latency_ms = o.at("latency_ms").get<double>();
    r.outcome_summary.energy_saving_pct = o.at("energy_saving_pct").get<double>();
    r.validate();
    return r;
}

}  // namespace

void MemoryStore::append_log(std::ostream& out, const StrategyRecord& record) const {
    out << record_to_json(record).dump() << '\n';
}

void MemoryStore::dump_log(std::ostream& out) const {
    for (const auto& r : records_) append_log(out, r);
}

MemoryStore MemoryStore::replay_log(std::istream& in, Policy policy) {
    MemoryStore store;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        store.record_episode(record_from_json(json::parse(line)), policy);
    }
    return store;
}

}  // namespace negsim::memory
