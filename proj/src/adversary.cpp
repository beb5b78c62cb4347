#include "otb/adversary.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"
#include "otb/util.hpp"

namespace otb {

LeakageOracle::LeakageOracle(std::set<AttackPoint> tap_points, std::uint64_t query_budget,
                             Matcher matcher)
    : tap_points_(std::move(tap_points)), query_budget_(query_budget),
      matcher_(std::move(matcher)) {}

double LeakageOracle::leak_score(const AttackCandidate& candidate) {
    if (!tap_points_.count(AttackPoint::AP7))
        throw ConfigError("score leakage requires a tap at AP7");
    if (queries_used_ >= query_budget_)
        throw OracleExhaustedError("leakage oracle budget exhausted");
    ++queries_used_;
    return matcher_(candidate);
}

namespace {

std::string candidate_digest(const AttackCandidate& c) {
    if (c.space == AttackSpace::embedding) return digest_embedding(c.embedding);
    return digest_bytes(c.image.data().data(), c.image.data().size() * sizeof(double));
}

AttackCandidate perturb(const AttackCandidate& base, double step_scale, Rng& rng) {
    AttackCandidate out = base;
    if (base.space == AttackSpace::embedding) {
        const double scale = step_scale / std::sqrt(static_cast<double>(base.embedding.dimension()));
        for (double& v : out.embedding.values) v += scale * rng.gaussian();
        out.embedding = normalize(std::move(out.embedding));
    } else {
        // Pixel-space steps; step_scale is interpreted in intensity units.
        auto& data = out.image.mutable_data();
        const double scale = step_scale;
        for (double& v : data) {
            v += scale * rng.gaussian();
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
    return out;
}

}  // namespace

AttackTrace hill_climb(const AttackCandidate& initial, LeakageOracle& oracle,
                       const AttackPolicy& policy,
                       const std::function<void(int)>& between_iterations) {
    if (policy.iterations < 0 || policy.proposals_per_iteration < 1 || policy.step_scale <= 0.0)
        throw ConfigError("invalid attack policy");

    Rng rng(derive_seed(policy.seed, "hill-climb"));
    AttackTrace trace;
    trace.seed = policy.seed;

    AttackCandidate best = initial;
    double best_score;
    try {
        best_score = oracle.leak_score(best);
    } catch (const OracleExhaustedError&) {
        trace.truncated = true;
        trace.oracle_queries = oracle.queries_used();
        return trace;
    }
    trace.iterations.push_back({0, candidate_digest(best), best_score});

    for (int t = 1; t <= policy.iterations; ++t) {
        if (between_iterations) between_iterations(t);

        AttackCandidate round_best;
        double round_score = best_score;
        bool improved = false;
        try {
            for (int p = 0; p < policy.proposals_per_iteration; ++p) {
                AttackCandidate cand = perturb(best, policy.step_scale, rng);
                const double s = oracle.leak_score(cand);
                if (s < round_score) {
                    round_score = s;
                    round_best = std::move(cand);
                    improved = true;
                }
            }
        } catch (const OracleExhaustedError&) {
            trace.truncated = true;
            break;
        }
        if (improved) {
            best = std::move(round_best);
            best_score = round_score;
        }
        trace.iterations.push_back({t, candidate_digest(best), best_score});
    }

    trace.oracle_queries = oracle.queries_used();
    return trace;
}

void annotate_trace(AttackTrace& trace, const std::vector<OperatingPoint>& points) {
    for (const auto& pt : points) {
        trace.thresholds[pt.name] = pt.threshold;
        for (const auto& e : trace.iterations) {
            if (e.best_score < pt.threshold) {
                trace.success_at[pt.name] = e.iteration;
                break;
            }
        }
    }
}

AttackTrace attack_scenario(const ProtocolEnv& env, const AttackPolicy& policy, int victim_subject,
                            const std::vector<OperatingPoint>& points, Rng& rng) {
    const SyntheticWorld& world = *env.world;
    const int n = world.n_subjects();

    // Self-contained deployment for this run: enroll the victim, leaving
    // enough pseudonyms for every interleaved rotation.
    Server server;
    ClientDevice victim;
    victim.client_id = "victim";
    victim.subject_id = victim_subject;
    if (env.scenario == Scenario::otb_morph) {
        auto pseudonyms = env.ttp->issue(victim.client_id, policy.iterations + 2, rng);
        for (auto& ps : pseudonyms) victim.se.pseudonym_pool.push_back(std::move(ps));
    }
    enroll(env, victim, world.present(victim_subject, rng), server, rng);

    const int attacker_subject = n > 1 ? (victim_subject + 1) % n : victim_subject;
    AttackCandidate initial;
    initial.space = policy.space;
    {
        const int source = policy.init_from_victim ? victim_subject : attacker_subject;
        Presentation pres = world.present(source, rng);
        if (policy.space == AttackSpace::embedding) {
            initial.embedding = extract_features(pres.image, world.extractor());
        } else {
            initial.image = std::move(pres.image);
            initial.landmarks = std::move(pres.landmarks);
        }
    }

    // The matcher the oracle exposes: candidates are transformed exactly
    // as the system would transform a probe under this scenario. Feature
    // vectors are injected past the extractor (AP4); images run through
    // the scenario's probe pipeline with whatever AD is current.
    Rng probe_rng(derive_seed(policy.seed, "attack-probe"));
    LeakageOracle::Matcher matcher = [&, victim_subject](const AttackCandidate& cand) -> double {
        const ServerRecord& rec = server.record("victim");
        if (cand.space == AttackSpace::embedding)
            return dissimilarity(cand.embedding, rec.client_ref.embedding);
        Presentation pres{cand.image, cand.landmarks};
        ProtectedTemplate probe = protect_probe(env, victim, pres, probe_rng);
        return dissimilarity(probe.embedding, rec.client_ref.embedding);
    };

    const std::uint64_t budget =
        static_cast<std::uint64_t>(policy.iterations) * policy.proposals_per_iteration + 1;
    LeakageOracle oracle({AttackPoint::AP4, AttackPoint::AP6, AttackPoint::AP7}, budget,
                         std::move(matcher));

    std::function<void(int)> interleave;
    if (env.scenario == Scenario::otb_morph && policy.rotate_every > 0) {
        interleave = [&](int iteration) {
            if ((iteration - 1) % policy.rotate_every != 0) return;
            run_session(env, victim, server, SessionBehavior::genuine, attacker_subject, rng);
        };
    }

    AttackTrace trace = hill_climb(initial, oracle, policy, interleave);
    trace.scenario = scenario_name(env.scenario);
    annotate_trace(trace, points);
    return trace;
}

bool inject_template(const ProtectedTemplate& candidate, const Server& server,
                     const std::string& client_id) {
    const ServerRecord& rec = server.record(client_id);
    return dissimilarity(candidate.embedding, rec.client_ref.embedding) < rec.threshold;
}

void write_traces_csv(const std::string& csv_path, const std::string& sidecar_path,
                      const std::vector<AttackTrace>& traces) {
    atomic_write_file(csv_path, [&](std::ostream& out) {
        out << "seed,scenario,iteration,best_score\n";
        char buf[64];
        for (const auto& t : traces) {
            for (const auto& e : t.iterations) {
                std::snprintf(buf, sizeof(buf), "%.17g", e.best_score);
                out << t.seed << "," << t.scenario << "," << e.iteration << "," << buf << "\n";
            }
        }
    });
    atomic_write_file(sidecar_path, [&](std::ostream& out) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : traces) {
            arr.push_back({{"seed", t.seed},
                           {"scenario", t.scenario},
                           {"thresholds", t.thresholds},
                           {"success_at", t.success_at},
                           {"truncated", t.truncated},
                           {"oracle_queries", t.oracle_queries}});
        }
        out << arr.dump(2) << "\n";
    });
}

std::vector<AttackTrace> read_traces_csv(const std::string& csv_path,
                                         const std::string& sidecar_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError(csv_path + ": cannot open for reading");
    std::ifstream side(sidecar_path);
    if (!side) throw IoError(sidecar_path + ": cannot open for reading");

    nlohmann::json meta;
    side >> meta;
    std::vector<AttackTrace> traces;
    for (const auto& m : meta) {
        AttackTrace t;
        t.seed = m.at("seed").get<std::uint64_t>();
        t.scenario = m.at("scenario").get<std::string>();
        t.thresholds = m.at("thresholds").get<std::map<std::string, double>>();
        t.success_at = m.at("success_at").get<std::map<std::string, int>>();
        t.truncated = m.at("truncated").get<bool>();
        t.oracle_queries = m.at("oracle_queries").get<std::uint64_t>();
        traces.push_back(std::move(t));
    }

    std::map<std::pair<std::uint64_t, std::string>, AttackTrace*> index;
    for (auto& t : traces) index[{t.seed, t.scenario}] = &t;

    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string seed_s, scenario, iter_s, score_s;
        std::getline(row, seed_s, ',');
        std::getline(row, scenario, ',');
        std::getline(row, iter_s, ',');
        std::getline(row, score_s, ',');
        const auto key = std::make_pair(
            static_cast<std::uint64_t>(std::strtoull(seed_s.c_str(), nullptr, 10)), scenario);
        auto it = index.find(key);
        if (it == index.end())
            throw IoError(csv_path + ": trace row without sidecar entry");
        it->second->iterations.push_back({std::atoi(iter_s.c_str()), "",
                                          std::strtod(score_s.c_str(), nullptr)});
    }
    return traces;
}

}  // namespace otb
