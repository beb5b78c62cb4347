#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otb/synthetic.hpp"
#include "otb/transforms.hpp"

namespace otb {

// One-time identity token bundled with a fresh random-face AD. `consumed`
// transitions false -> true exactly once (enrollment or re-enrollment).
struct PseudonymSet {
    std::string pseudonym_id;
    AuxiliaryData ad;  // random_face
    std::string issued_to;
    bool consumed = false;

    bool operator==(const PseudonymSet&) const = default;
};

// Client-side protected storage: the AD in active use plus unconsumed
// pseudonyms.
struct SecureElementState {
    AuxiliaryData current_ad;  // kind == random_face once enrolled
    std::deque<PseudonymSet> pseudonym_pool;

    bool operator==(const SecureElementState&) const = default;
};

// Reference-rotation audit entry. Only accepted events land here (an
// enrollment or a completed rotation); rejected sessions live solely in
// transcripts, so a rejected attempt leaves the record bit-identical.
struct HistoryEvent {
    std::uint64_t session_id = 0;  // 0 for the initial enrollment
    std::string decision;          // "accept"
    std::string kind;              // "enroll" | "rotation"
    std::string old_ad_id;
    std::string new_ad_id;

    bool operator==(const HistoryEvent&) const = default;
};

struct ServerRecord {
    ProtectedTemplate client_ref;
    double threshold = 0.0;
    std::vector<HistoryEvent> history;

    bool operator==(const ServerRecord&) const = default;
};

struct Message {
    std::uint64_t session_id = 0;
    int seq = 0;
    std::string from, to, type;
    std::string payload_digest;
    std::optional<double> score;
    std::optional<std::string> decision;

    bool operator==(const Message&) const = default;
};

struct SessionTranscript {
    std::uint64_t session_id = 0;
    std::vector<Message> messages;
    std::string decision;  // "accept" | "reject"
    bool rotated = false;

    bool operator==(const SessionTranscript&) const = default;
};

// Adversary's view of the client->server channel: captured probe
// templates (the stronger reading of what the wire exposes).
struct EavesdropTap {
    std::vector<ProtectedTemplate> captured;
};

// Issues pseudonym sets and noise keys; owns the AD uniqueness ledger.
class TrustedThirdParty {
public:
    explicit TrustedThirdParty(const SyntheticWorldConfig& world_config)
        : world_config_(world_config) {}

    // n fresh pseudonym sets, each with a never-before-issued random face.
    std::vector<PseudonymSet> issue(const std::string& client_id, int n, Rng& rng);

    AuxiliaryData issue_noise_ad(Rng& rng);

    AdLedger& ledger() { return ledger_; }
    std::uint64_t issued_total() const { return counter_; }

private:
    SyntheticWorldConfig world_config_;
    AdLedger ledger_;
    std::uint64_t counter_ = 0;
};

class Server {
public:
    std::uint64_t begin_session() { return next_session_id_++; }

    bool has_record(const std::string& client_id) const {
        return records_.count(client_id) != 0;
    }
    ServerRecord& record(const std::string& client_id);
    const ServerRecord& record(const std::string& client_id) const;
    const std::map<std::string, ServerRecord>& records() const { return records_; }

    void put_record(const std::string& client_id, ServerRecord rec);

private:
    std::map<std::string, ServerRecord> records_;
    std::uint64_t next_session_id_ = 1;
};

struct ClientDevice {
    std::string client_id;
    int subject_id = 0;  // the genuine owner in the synthetic world
    SecureElementState se;
};

// Everything a verification session needs to know about the deployment.
struct ProtocolEnv {
    const SyntheticWorld* world = nullptr;
    TrustedThirdParty* ttp = nullptr;
    Scenario scenario = Scenario::otb_morph;
    MorphParams morph;
    double gaussian_sigma = 0.3;
    double implode_strength = 0.5;
    double threshold = 0.5;  // per-scenario, calibrated once
};

// In-progress session bookkeeping; enforces the step-1-before-step-2 rule.
struct SessionLog {
    std::uint64_t session_id = 0;
    std::vector<Message> messages;
    bool step1_done = false;
    bool step1_accepted = false;

    void add(const std::string& from, const std::string& to, const std::string& type,
             const std::string& payload_digest, std::optional<double> score = std::nullopt,
             std::optional<std::string> decision = std::nullopt);
};

// Applies the scenario's probe-side transform to a presentation. For the
// morph scheme this uses the client's current AD; for the noise scheme a
// fresh key is drawn per presentation (the transform itself stays
// deterministic given its AD).
ProtectedTemplate protect_probe(const ProtocolEnv& env, const ClientDevice& client,
                                const Presentation& pres, Rng& rng);

// Initial enrollment. For the morph scheme, consumes one pseudonym and
// stores its AD as current; errors with PoolExhaustedError when none left.
void enroll(const ProtocolEnv& env, ClientDevice& client, const Presentation& pres, Server& server,
            Rng& rng);

// Step 1: match the probe (transformed with the current AD) against the
// stored reference; accept iff score < threshold, strictly.
std::pair<bool, double> verify_step1(const ProtocolEnv& env, ClientDevice& client,
                                     const Presentation& pres, Server& server, SessionLog& log,
                                     Rng& rng, EavesdropTap* tap = nullptr);

// Step 2 (runs only after an accepted step 1): consume a fresh pseudonym,
// re-enroll with a fresh capture, overwrite the current AD and reference.
void verify_step2(const ProtocolEnv& env, ClientDevice& client, const Presentation& fresh_pres,
                  Server& server, SessionLog& log);

enum class SessionBehavior { genuine, attacker };

// Runs a full session: step 1 and, on accept under the morph scheme,
// step 2. The attacker behaviour presents `attacker_subject`'s face
// through the client's device with no optimization.
SessionTranscript run_session(const ProtocolEnv& env, ClientDevice& client, Server& server,
                              SessionBehavior behavior, int attacker_subject, Rng& rng,
                              EavesdropTap* tap = nullptr);

// JSON-lines transcripts: one message object per line.
void write_transcripts_jsonl(const std::string& path,
                             const std::vector<SessionTranscript>& transcripts);
std::vector<SessionTranscript> read_transcripts_jsonl(const std::string& path);

// Single-file JSON store of all server records; load(save(x)) == x and
// save(load(f)) reproduces f byte-for-byte.
void save_server_store(const std::string& path, const Server& server);
Server load_server_store(const std::string& path);

}  // namespace otb
