#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "negsim/errors.hpp"
#include "negsim/scenario.hpp"

// Collective memory of distilled negotiation strategies with three retrieval
// policies: none, vanilla (stores only successes), and unbiased (stores every
// outcome and scores with decay calibration, failure bonus and anchor
// penalty).
namespace negsim::memory {

enum class NegotiationResult {
    AgreementSuccess,
    UnresolvedNegotiation,
    AgreementWithSlaViolation,
};

// Wire strings follow the stored-record schema exactly.
const char* to_string(NegotiationResult r);
NegotiationResult negotiation_result_from_string(const std::string& s);

struct OutcomeSummary {
    NegotiationResult negotiation_result = NegotiationResult::AgreementSuccess;
    std::map<std::string, double> final_allocations;  // resource-id -> value
    double latency_ms = 0.0;
    double energy_saving_pct = 0.0;
};

struct RecordContext {
    long trial_number = 0;
    std::vector<std::string> keywords;
};

struct StrategyRecord {
    std::string id;
    std::string description;
    RecordContext context;
    OutcomeSummary outcome_summary;

    void validate() const;
};

bool is_failure(const StrategyRecord& r);

using scenario::DecayForm;

struct RetrievalWeights {
    double alpha = 1.0;  // semantic weight
    double beta = 0.5;   // temporal weight
    double delta = 1.0;  // inflection bonus for failures
    double theta = 5.0;  // decay factor in trials (Factor form)
    double kappa = 0.0;  // anchor-penalty scale; 0 disables the penalty
    double sigma = 1.0;  // anchor-penalty width in resource units
    int top_n = 5;
    DecayForm decay_form = DecayForm::Factor;

    void validate() const;
};

struct AnchorRef {
    std::string resource;  // key into final_allocations
    double value = 0.0;
};

struct Query {
    long trial_number = 0;
    std::vector<std::string> keywords;
    std::optional<AnchorRef> initial_anchor;
};

struct ScoredMemory {
    StrategyRecord record;
    double semantic = 0.0;
    double decay = 0.0;
    double bonus = 0.0;
    double anchor_penalty = 0.0;
    double final_score = 0.0;  // alpha*semantic + beta*decay + bonus - anchor_penalty
};

// Lowercase, split on non-alphanumeric, drop empties, deduplicate.
std::set<std::string> tokenize(const std::string& text);

// |a & b| / |a | b|; both empty -> 0 by convention.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// exp(-max(0, age)/theta) (Factor) or exp(-theta * max(0, age)) (Rate).
// Negative ages clamp to zero: future-dated records score as fresh.
double time_decay(double age, double theta, DecayForm form = DecayForm::Factor);

// kappa * exp(-|b_m - a0| / sigma) where b_m is the record's allocation for
// the anchored resource; records without one get penalty 0.
double anchor_penalty(const StrategyRecord& record, const AnchorRef& anchor, double kappa,
                      double sigma);

ScoredMemory score(const StrategyRecord& record, const Query& query,
                   const RetrievalWeights& weights);

enum class Policy { None, Vanilla, Unbiased };

const char* to_string(Policy p);
Policy policy_from_string(const std::string& s);

struct QueryResult {
    std::vector<ScoredMemory> retrieved;  // descending score; ties newer-first, then id
    double average_score = 0.0;           // mean over the returned set, 0 when empty
};

enum class Exec { Serial, Parallel };

class MemoryStore {
public:
    // Policy none drops everything; vanilla keeps only successes; unbiased
    // keeps every outcome. Duplicate ids are rejected.
    void record_episode(StrategyRecord record, Policy policy);

    QueryResult query(const Query& q, const RetrievalWeights& weights,
                      Exec exec = Exec::Parallel) const;

    std::size_t size() const { return records_.size(); }
    const std::vector<StrategyRecord>& records() const { return records_; }

    // Append-only line-delimited log; the store is reconstructable by replay.
    void append_log(std::ostream& out, const StrategyRecord& record) const;
    void dump_log(std::ostream& out) const;
    static MemoryStore replay_log(std::istream& in, Policy policy);

private:
    std::vector<StrategyRecord> records_;
    std::set<std::string> ids_;
};

}  // namespace negsim::memory
