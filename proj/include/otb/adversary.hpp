#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "otb/evaluation.hpp"
#include "otb/protocol.hpp"

namespace otb {

enum class AttackPoint { AP4, AP6, AP7 };

enum class AttackSpace { embedding, image };

struct AttackPolicy {
    AttackSpace space = AttackSpace::embedding;
    double step_scale = 0.1;        // expected perturbation norm per proposal
    int proposals_per_iteration = 8;
    int iterations = 40;
    std::uint64_t seed = 0;
    bool init_from_victim = false;  // start from a victim capture instead of
                                    // another subject's face
    int rotate_every = 1;  // genuine sessions interleave every k attacker
                           // iterations under the morph scheme; 0 disables
};

// A candidate the attacker submits: either an injected feature vector
// (AP4) or a face image processed by the normal pipeline.
struct AttackCandidate {
    AttackSpace space = AttackSpace::embedding;
    Embedding embedding;
    FaceImage image;
    LandmarkSet landmarks;
};

// Score access the adversary obtained at AP7: every query returns the
// matcher's exact score for a candidate under the current system state,
// and decrements a finite budget.
class LeakageOracle {
public:
    using Matcher = std::function<double(const AttackCandidate&)>;

    LeakageOracle(std::set<AttackPoint> tap_points, std::uint64_t query_budget, Matcher matcher);

    double leak_score(const AttackCandidate& candidate);

    std::uint64_t queries_used() const { return queries_used_; }
    std::uint64_t query_budget() const { return query_budget_; }

private:
    std::set<AttackPoint> tap_points_;
    std::uint64_t query_budget_;
    std::uint64_t queries_used_ = 0;
    Matcher matcher_;
};

struct TraceEntry {
    int iteration = 0;
    std::string candidate_digest;
    double best_score = 0.0;
};

struct AttackTrace {
    std::vector<TraceEntry> iterations;        // indices 0..N, entry 0 = initial
    std::map<std::string, double> thresholds;  // operating point -> threshold
    std::map<std::string, int> success_at;     // first crossing iteration
    bool truncated = false;
    std::uint64_t oracle_queries = 0;          // iterations*proposals + 1 initial
    std::uint64_t seed = 0;
    std::string scenario;

    TraceView view() const {
        TraceView v;
        v.best_scores.reserve(iterations.size());
        for (const auto& e : iterations) v.best_scores.push_back(e.best_score);
        return v;
    }
};

// Greedy score-descent: each iteration perturbs the best candidate so far
// `proposals_per_iteration` times, queries the oracle, and keeps the best
// proposal if it improves. `between_iterations` runs before each
// iteration's proposals (system activity the attacker does not control).
AttackTrace hill_climb(const AttackCandidate& initial, LeakageOracle& oracle,
                       const AttackPolicy& policy,
                       const std::function<void(int)>& between_iterations = nullptr);

// Fills trace.thresholds / trace.success_at from calibrated points.
void annotate_trace(AttackTrace& trace, const std::vector<OperatingPoint>& points);

// Full attack against an enrolled victim. Under the morph scheme, genuine
// sessions interleave per policy.rotate_every so the reference keeps
// moving; other scenarios face a static reference.
AttackTrace attack_scenario(const ProtocolEnv& env, const AttackPolicy& policy, int victim_subject,
                            const std::vector<OperatingPoint>& points, Rng& rng);

// AP4: inject a template directly into the matcher, bypassing the
// extractor. Returns the accept decision under the record's threshold.
bool inject_template(const ProtectedTemplate& candidate, const Server& server,
                     const std::string& client_id);

// CSV `seed,scenario,iteration,best_score` plus a JSON sidecar carrying
// thresholds, success_at and budget accounting per trace.
void write_traces_csv(const std::string& csv_path, const std::string& sidecar_path,
                      const std::vector<AttackTrace>& traces);
std::vector<AttackTrace> read_traces_csv(const std::string& csv_path,
                                         const std::string& sidecar_path);

}  // namespace otb
