#include "otb/protocol.hpp"

#include <fstream>
#include <sstream>

#include "otb/errors.hpp"
#include "otb/util.hpp"

namespace otb {

std::vector<PseudonymSet> TrustedThirdParty::issue(const std::string& client_id, int n, Rng& rng) {
    if (n < 1)
        throw ConfigError("pseudonym issuance needs n >= 1");
    std::vector<PseudonymSet> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        PseudonymSet ps;
        ps.pseudonym_id = "psn-" + std::to_string(counter_);
        ps.issued_to = client_id;
        Presentation key = sample_key_face(world_config_, rng);
        ps.ad.ad_id = "ad-" + std::to_string(counter_);
        ps.ad.kind = AdKind::random_face;
        ps.ad.face = std::move(key.image);
        ps.ad.face_landmarks = std::move(key.landmarks);
        if (!ledger_.register_issued(ps.ad.ad_id))
            throw Error("internal: AD id collision in the issuance ledger");
        ++counter_;
        out.push_back(std::move(ps));
    }
    return out;
}

AuxiliaryData TrustedThirdParty::issue_noise_ad(Rng& rng) {
    AuxiliaryData ad;
    ad.ad_id = "ad-" + std::to_string(counter_);
    ad.kind = AdKind::noise_key;
    ad.seed = rng.next_u64();
    if (!ledger_.register_issued(ad.ad_id))
        throw Error("internal: AD id collision in the issuance ledger");
    ++counter_;
    return ad;
}

ServerRecord& Server::record(const std::string& client_id) {
    auto it = records_.find(client_id);
    if (it == records_.end())
        throw ProtocolError("no record for client '" + client_id + "'");
    return it->second;
}

const ServerRecord& Server::record(const std::string& client_id) const {
    auto it = records_.find(client_id);
    if (it == records_.end())
        throw ProtocolError("no record for client '" + client_id + "'");
    return it->second;
}

void Server::put_record(const std::string& client_id, ServerRecord rec) {
    records_[client_id] = std::move(rec);
}

void SessionLog::add(const std::string& from, const std::string& to, const std::string& type,
                     const std::string& payload_digest, std::optional<double> score,
                     std::optional<std::string> decision) {
    Message m;
    m.session_id = session_id;
    m.seq = static_cast<int>(messages.size());
    m.from = from;
    m.to = to;
    m.type = type;
    m.payload_digest = payload_digest;
    m.score = score;
    m.decision = decision;
    messages.push_back(std::move(m));
}

ProtectedTemplate protect_probe(const ProtocolEnv& env, const ClientDevice& client,
                                const Presentation& pres, Rng& rng) {
    const ExtractorHandle& ex = env.world->extractor();
    switch (env.scenario) {
        case Scenario::unprotected:
            return protect_none(extract_features(pres.image, ex));
        case Scenario::gaussian_noise: {
            AuxiliaryData ad = env.ttp->issue_noise_ad(rng);
            return protect_gaussian(extract_features(pres.image, ex), ad, env.gaussian_sigma);
        }
        case Scenario::imploding:
            return protect_implode(pres.image, pres.landmarks, env.implode_strength, ex);
        case Scenario::otb_morph: {
            if (client.se.current_ad.kind != AdKind::random_face)
                throw ProtocolError("client has no current AD; enroll first");
            return protect_otb(pres.image, pres.landmarks, client.se.current_ad, env.morph, ex);
        }
    }
    throw ConfigError("unknown scenario");
}

void enroll(const ProtocolEnv& env, ClientDevice& client, const Presentation& pres, Server& server,
            Rng& rng) {
    const ExtractorHandle& ex = env.world->extractor();
    ServerRecord rec;
    rec.threshold = env.threshold;
    std::string new_ad_id;

    switch (env.scenario) {
        case Scenario::unprotected:
            rec.client_ref = protect_none(extract_features(pres.image, ex));
            break;
        case Scenario::gaussian_noise: {
            AuxiliaryData ad = env.ttp->issue_noise_ad(rng);
            rec.client_ref = protect_gaussian(extract_features(pres.image, ex), ad,
                                              env.gaussian_sigma);
            new_ad_id = ad.ad_id;
            break;
        }
        case Scenario::imploding:
            rec.client_ref =
                protect_implode(pres.image, pres.landmarks, env.implode_strength, ex);
            break;
        case Scenario::otb_morph: {
            if (client.se.pseudonym_pool.empty())
                throw PoolExhaustedError("enrollment unavailable: pseudonym pool is empty");
            PseudonymSet ps = std::move(client.se.pseudonym_pool.front());
            client.se.pseudonym_pool.pop_front();
            ps.consumed = true;
            rec.client_ref = protect_otb_enroll(pres.image, pres.landmarks, ps.ad, env.morph, ex,
                                                env.ttp->ledger());
            client.se.current_ad = std::move(ps.ad);
            new_ad_id = client.se.current_ad.ad_id;
            break;
        }
    }

    rec.history.push_back({0, "accept", "enroll", "", new_ad_id});
    server.put_record(client.client_id, std::move(rec));
}

std::pair<bool, double> verify_step1(const ProtocolEnv& env, ClientDevice& client,
                                     const Presentation& pres, Server& server, SessionLog& log,
                                     Rng& rng, EavesdropTap* tap) {
    const ServerRecord& rec = server.record(client.client_id);
    log.add(client.client_id, "server", "request", digest_string(client.client_id));
    log.add("server", client.client_id, "challenge",
            digest_string("sid:" + std::to_string(log.session_id)));

    ProtectedTemplate probe = protect_probe(env, client, pres, rng);
    log.add(client.client_id, "server", "template", digest_embedding(probe.embedding));
    if (tap) tap->captured.push_back(probe);

    const double score = dissimilarity(probe.embedding, rec.client_ref.embedding);
    const bool accept = score < rec.threshold;
    log.add("server", client.client_id, "decision", digest_embedding(rec.client_ref.embedding),
            score, accept ? "accept" : "reject");
    log.step1_done = true;
    log.step1_accepted = accept;
    return {accept, score};
}

void verify_step2(const ProtocolEnv& env, ClientDevice& client, const Presentation& fresh_pres,
                  Server& server, SessionLog& log) {
    if (!log.step1_done || !log.step1_accepted)
        throw ProtocolError("step 2 requires an accepted step 1 in the same session");
    if (env.scenario != Scenario::otb_morph)
        throw ProtocolError("re-enrollment is part of the morph scheme only");
    if (client.se.pseudonym_pool.empty())
        throw PoolExhaustedError("rotation unavailable: pseudonym pool is empty");

    ServerRecord& rec = server.record(client.client_id);
    const ExtractorHandle& ex = env.world->extractor();

    PseudonymSet ps = std::move(client.se.pseudonym_pool.front());
    client.se.pseudonym_pool.pop_front();
    ps.consumed = true;

    ProtectedTemplate fresh_ref = protect_otb_enroll(fresh_pres.image, fresh_pres.landmarks, ps.ad,
                                                     env.morph, ex, env.ttp->ledger());
    log.add(client.client_id, "server", "reenroll_template", digest_embedding(fresh_ref.embedding));

    const std::string old_ad_id = rec.client_ref.ad_id;
    rec.client_ref = std::move(fresh_ref);
    rec.history.push_back({log.session_id, "accept", "rotation", old_ad_id, ps.ad.ad_id});
    client.se.current_ad = std::move(ps.ad);

    log.add("server", client.client_id, "rotation_ack", digest_string(rec.client_ref.ad_id));
}

SessionTranscript run_session(const ProtocolEnv& env, ClientDevice& client, Server& server,
                              SessionBehavior behavior, int attacker_subject, Rng& rng,
                              EavesdropTap* tap) {
    SessionLog log;
    log.session_id = server.begin_session();

    const int actor =
        behavior == SessionBehavior::genuine ? client.subject_id : attacker_subject;
    const Presentation pres = env.world->present(actor, rng);

    SessionTranscript out;
    out.session_id = log.session_id;
    const auto [accept, score] = verify_step1(env, client, pres, server, log, rng, tap);
    (void)score;
    out.decision = accept ? "accept" : "reject";

    if (accept && env.scenario == Scenario::otb_morph) {
        // The system captures another face of whoever is present.
        const Presentation fresh = env.world->present(actor, rng);
        try {
            verify_step2(env, client, fresh, server, log);
            out.rotated = true;
        } catch (const PoolExhaustedError&) {
            // Step 1's accept stands; the session simply could not rotate.
            log.add("server", client.client_id, "rotation_failed", digest_string("pool-exhausted"));
        }
    }
    out.messages = std::move(log.messages);
    return out;
}

namespace {

nlohmann::json message_to_json(const Message& m) {
    nlohmann::json j;
    j["session_id"] = m.session_id;
    j["seq"] = m.seq;
    j["from"] = m.from;
    j["to"] = m.to;
    j["type"] = m.type;
    j["payload_digest"] = m.payload_digest;
    if (m.score) j["score"] = *m.score;
    if (m.decision) j["decision"] = *m.decision;
    return j;
}

Message message_from_json(const nlohmann::json& j) {
    Message m;
    m.session_id = j.at("session_id").get<std::uint64_t>();
    m.seq = j.at("seq").get<int>();
    m.from = j.at("from").get<std::string>();
    m.to = j.at("to").get<std::string>();
    m.type = j.at("type").get<std::string>();
    m.payload_digest = j.at("payload_digest").get<std::string>();
    if (j.contains("score")) m.score = j.at("score").get<double>();
    if (j.contains("decision")) m.decision = j.at("decision").get<std::string>();
    return m;
}

nlohmann::json embedding_to_json(const Embedding& e) {
    return {{"values", e.values}, {"normalized", e.normalized}};
}

Embedding embedding_from_json(const nlohmann::json& j) {
    Embedding e;
    e.values = j.at("values").get<std::vector<double>>();
    e.normalized = j.at("normalized").get<bool>();
    return e;
}

}  // namespace

void write_transcripts_jsonl(const std::string& path,
                             const std::vector<SessionTranscript>& transcripts) {
    atomic_write_file(path, [&](std::ostream& out) {
        for (const auto& t : transcripts) {
            for (const auto& m : t.messages) out << message_to_json(m).dump() << "\n";
        }
    });
}

std::vector<SessionTranscript> read_transcripts_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::vector<SessionTranscript> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            std::ostringstream os;
            os << path << ":" << lineno << ": " << e.what();
            throw IoError(os.str());
        }
        Message m = message_from_json(j);
        if (out.empty() || out.back().session_id != m.session_id) {
            SessionTranscript t;
            t.session_id = m.session_id;
            out.push_back(std::move(t));
        }
        SessionTranscript& t = out.back();
        if (m.type == "decision" && m.decision) t.decision = *m.decision;
        if (m.type == "rotation_ack") t.rotated = true;
        t.messages.push_back(std::move(m));
    }
    return out;
}

void save_server_store(const std::string& path, const Server& server) {
    nlohmann::json db;
    db["schema_version"] = 1;
    nlohmann::json clients = nlohmann::json::object();
    for (const auto& [id, rec] : server.records()) {
        nlohmann::json r;
        r["threshold"] = rec.threshold;
        r["reference"] = {{"embedding", embedding_to_json(rec.client_ref.embedding)},
                          {"scenario", scenario_name(rec.client_ref.scenario)},
                          {"ad_id", rec.client_ref.ad_id}};
        nlohmann::json hist = nlohmann::json::array();
        for (const auto& h : rec.history) {
            hist.push_back({{"session_id", h.session_id},
                            {"decision", h.decision},
                            {"kind", h.kind},
                            {"old_ad_id", h.old_ad_id},
                            {"new_ad_id", h.new_ad_id}});
        }
        r["history"] = hist;
        clients[id] = r;
    }
    db["clients"] = clients;
    atomic_write_file(path, [&](std::ostream& out) { out << db.dump(2) << "\n"; });
}

Server load_server_store(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    nlohmann::json db;
    try {
        in >> db;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    Server server;
    for (const auto& [id, r] : db.at("clients").items()) {
        ServerRecord rec;
        rec.threshold = r.at("threshold").get<double>();
        rec.client_ref.embedding = embedding_from_json(r.at("reference").at("embedding"));
        rec.client_ref.scenario =
            scenario_from_name(r.at("reference").at("scenario").get<std::string>());
        rec.client_ref.ad_id = r.at("reference").at("ad_id").get<std::string>();
        for (const auto& h : r.at("history")) {
            rec.history.push_back({h.at("session_id").get<std::uint64_t>(),
                                   h.at("decision").get<std::string>(),
                                   h.at("kind").get<std::string>(),
                                   h.at("old_ad_id").get<std::string>(),
                                   h.at("new_ad_id").get<std::string>()});
        }
        server.put_record(id, std::move(rec));
    }
    return server;
}

}  // namespace otb
