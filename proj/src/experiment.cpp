#include "otb/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "otb/errors.hpp"
#include "otb/util.hpp"

namespace fs = std::filesystem;

namespace otb {

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    if (schema_version != 1) bad.push_back("schema_version (want 1)");
    if (out_dir.empty()) bad.push_back("out_dir (empty)");
    if (jobs < 1) bad.push_back("jobs (< 1)");
    try {
        SyntheticWorldConfig w = world;
        w.rng_seed = 1;
        w.validate();
    } catch (const ConfigError& e) {
        bad.push_back(std::string("world (") + e.what() + ")");
    }
    if (scenarios.empty()) bad.push_back("scenarios (empty)");
    if (!(morph_alpha >= 0.0 && morph_alpha <= 1.0)) bad.push_back("morph_alpha (not in [0,1])");
    if (gaussian_sigma < 0.0) bad.push_back("gaussian_sigma (< 0)");
    if (!(implode_strength >= 0.0 && implode_strength < 1.0))
        bad.push_back("implode_strength (not in [0,1))");
    if (calibration_genuine < 2) bad.push_back("calibration_genuine (< 2)");
    if (calibration_impostor < 2) bad.push_back("calibration_impostor (< 2)");
    if (attack.iterations < 0) bad.push_back("attack.iterations (< 0)");
    if (attack.proposals_per_iteration < 1) bad.push_back("attack.proposals_per_iteration (< 1)");
    if (attack.step_scale <= 0.0) bad.push_back("attack.step_scale (<= 0)");
    if (attack.rotate_every < 0) bad.push_back("attack.rotate_every (< 0)");
    if (attacks_per_scenario < 1) bad.push_back("attacks_per_scenario (< 1)");
    if (n_clients < 1) bad.push_back("n_clients (< 1)");
    if (sessions_per_client < 0) bad.push_back("sessions_per_client (< 0)");
    if (attacker_sessions_per_client < 0) bad.push_back("attacker_sessions_per_client (< 0)");
    if (pseudonym_pool < 1) bad.push_back("pseudonym_pool (< 1)");
    for (double f : far_points)
        if (!(f > 0.0 && f <= 1.0)) bad.push_back("far_points (entries must be in (0,1])");
    if (!bad.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& b : bad) os << "\n  - " << b;
        throw ConfigError(os.str());
    }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["schema_version"] = c.schema_version;
    j["master_seed"] = c.master_seed;
    j["out_dir"] = c.out_dir;
    j["jobs"] = c.jobs;
    j["world"] = {{"dimension", c.world.dimension},
                  {"n_subjects", c.world.n_subjects},
                  {"class_spread", c.world.class_spread},
                  {"population_spread", c.world.population_spread},
                  {"image_width", c.world.image_width},
                  {"image_height", c.world.image_height},
                  {"channels", c.world.channels},
                  {"landmark_jitter", c.world.landmark_jitter},
                  {"ad_diversity", c.world.ad_diversity}};
    nlohmann::json sc = nlohmann::json::array();
    for (Scenario s : c.scenarios) sc.push_back(scenario_name(s));
    j["scenarios"] = sc;
    j["morph_alpha"] = c.morph_alpha;
    j["gaussian_sigma"] = c.gaussian_sigma;
    j["implode_strength"] = c.implode_strength;
    j["calibration"] = {{"genuine", c.calibration_genuine}, {"impostor", c.calibration_impostor}};
    j["attack"] = {{"space", c.attack.space == AttackSpace::embedding ? "embedding" : "image"},
                   {"step_scale", c.attack.step_scale},
                   {"proposals_per_iteration", c.attack.proposals_per_iteration},
                   {"iterations", c.attack.iterations},
                   {"rotate_every", c.attack.rotate_every},
                   {"init_from_victim", c.attack.init_from_victim},
                   {"attacks_per_scenario", c.attacks_per_scenario}};
    j["sessions"] = {{"n_clients", c.n_clients},
                     {"per_client", c.sessions_per_client},
                     {"attacker_per_client", c.attacker_sessions_per_client},
                     {"pseudonym_pool", c.pseudonym_pool}};
    j["far_points"] = c.far_points;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.schema_version = j.at("schema_version").get<int>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("world")) {
        const auto& w = j.at("world");
        if (w.contains("dimension")) c.world.dimension = w.at("dimension").get<std::size_t>();
        if (w.contains("n_subjects")) c.world.n_subjects = w.at("n_subjects").get<int>();
        if (w.contains("class_spread")) c.world.class_spread = w.at("class_spread").get<double>();
        if (w.contains("population_spread"))
            c.world.population_spread = w.at("population_spread").get<double>();
        if (w.contains("image_width")) c.world.image_width = w.at("image_width").get<int>();
        if (w.contains("image_height")) c.world.image_height = w.at("image_height").get<int>();
        if (w.contains("channels")) c.world.channels = w.at("channels").get<int>();
        if (w.contains("landmark_jitter"))
            c.world.landmark_jitter = w.at("landmark_jitter").get<double>();
        if (w.contains("ad_diversity")) c.world.ad_diversity = w.at("ad_diversity").get<double>();
    }
    if (j.contains("scenarios")) {
        c.scenarios.clear();
        for (const auto& s : j.at("scenarios"))
            c.scenarios.push_back(scenario_from_name(s.get<std::string>()));
    }
    if (j.contains("morph_alpha")) c.morph_alpha = j.at("morph_alpha").get<double>();
    if (j.contains("gaussian_sigma")) c.gaussian_sigma = j.at("gaussian_sigma").get<double>();
    if (j.contains("implode_strength"))
        c.implode_strength = j.at("implode_strength").get<double>();
    if (j.contains("calibration")) {
        c.calibration_genuine = j.at("calibration").at("genuine").get<int>();
        c.calibration_impostor = j.at("calibration").at("impostor").get<int>();
    }
    if (j.contains("attack")) {
        const auto& a = j.at("attack");
        if (a.contains("space"))
            c.attack.space = a.at("space").get<std::string>() == "image" ? AttackSpace::image
                                                                         : AttackSpace::embedding;
        if (a.contains("step_scale")) c.attack.step_scale = a.at("step_scale").get<double>();
        if (a.contains("proposals_per_iteration"))
            c.attack.proposals_per_iteration = a.at("proposals_per_iteration").get<int>();
        if (a.contains("iterations")) c.attack.iterations = a.at("iterations").get<int>();
        if (a.contains("rotate_every")) c.attack.rotate_every = a.at("rotate_every").get<int>();
        if (a.contains("init_from_victim"))
            c.attack.init_from_victim = a.at("init_from_victim").get<bool>();
        if (a.contains("attacks_per_scenario"))
            c.attacks_per_scenario = a.at("attacks_per_scenario").get<int>();
    }
    if (j.contains("sessions")) {
        const auto& s = j.at("sessions");
        if (s.contains("n_clients")) c.n_clients = s.at("n_clients").get<int>();
        if (s.contains("per_client")) c.sessions_per_client = s.at("per_client").get<int>();
        if (s.contains("attacker_per_client"))
            c.attacker_sessions_per_client = s.at("attacker_per_client").get<int>();
        if (s.contains("pseudonym_pool")) c.pseudonym_pool = s.at("pseudonym_pool").get<int>();
    }
    if (j.contains("far_points")) c.far_points = j.at("far_points").get<std::vector<double>>();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::string& path, const ExperimentConfig& config) {
    atomic_write_file(path, [&](std::ostream& out) { out << config_to_json(config).dump(2) << "\n"; });
}

Experiment::Experiment(ExperimentConfig cfg)
    : config(std::move(cfg)),
      world([&] {
          config.validate();
          SyntheticWorldConfig w = config.world;
          w.rng_seed = derive_seed(config.master_seed, "world");
          return SyntheticWorld(w);
      }()),
      ttp(world.config()),
      calib_ttp(world.config()) {}

ScoreSet Experiment::calibration_scores(Scenario scenario) const {
    const std::string sname = scenario_name(scenario);
    Rng rng(derive_seed(config.master_seed, "calibration-" + sname));
    TrustedThirdParty local_ttp(world.config());
    const ExtractorHandle& ex = world.extractor();
    const int n = world.n_subjects();

    ScoreSet out;
    out.scenario = sname;
    out.dataset_tag = "synthetic";
    MorphParams morph{config.morph_alpha, BorderPolicy::passthrough};

    const auto protect_pair = [&](const Presentation& ref_pres, const Presentation& probe_pres,
                                  const std::string& pair_client) -> double {
        switch (scenario) {
            case Scenario::unprotected: {
                const auto r = protect_none(extract_features(ref_pres.image, ex));
                const auto p = protect_none(extract_features(probe_pres.image, ex));
                return dissimilarity(p.embedding, r.embedding);
            }
            case Scenario::gaussian_noise: {
                // Probe-side keys are drawn fresh per presentation; each key
                // remains deterministic in its own seed.
                const auto ad_ref = local_ttp.issue_noise_ad(rng);
                const auto ad_probe = local_ttp.issue_noise_ad(rng);
                const auto r = protect_gaussian(extract_features(ref_pres.image, ex), ad_ref,
                                                config.gaussian_sigma);
                const auto p = protect_gaussian(extract_features(probe_pres.image, ex), ad_probe,
                                                config.gaussian_sigma);
                return dissimilarity(p.embedding, r.embedding);
            }
            case Scenario::imploding: {
                const auto r = protect_implode(ref_pres.image, ref_pres.landmarks,
                                               config.implode_strength, ex);
                const auto p = protect_implode(probe_pres.image, probe_pres.landmarks,
                                               config.implode_strength, ex);
                return dissimilarity(p.embedding, r.embedding);
            }
            case Scenario::otb_morph: {
                // Both sides share one AD, as a verification session would.
                const auto ps = local_ttp.issue(pair_client, 1, rng);
                const auto r = protect_otb(ref_pres.image, ref_pres.landmarks, ps[0].ad, morph, ex);
                const auto p =
                    protect_otb(probe_pres.image, probe_pres.landmarks, ps[0].ad, morph, ex);
                return dissimilarity(p.embedding, r.embedding);
            }
        }
        throw ConfigError("unknown scenario");
    };

    for (int i = 0; i < config.calibration_genuine; ++i) {
        const int s = i % n;
        const Presentation ref_pres = world.present(s, rng);
        const Presentation probe_pres = world.present(s, rng);
        out.genuine.push_back(protect_pair(ref_pres, probe_pres, "calib-gen"));
    }
    for (int i = 0; i < config.calibration_impostor; ++i) {
        const int s = i % n;
        const int t = n > 1 ? (s + 1 + static_cast<int>(rng.uniform_index(n - 1))) % n : s;
        const Presentation ref_pres = world.present(s, rng);
        const Presentation probe_pres = world.present(t, rng);
        out.impostor.push_back(protect_pair(ref_pres, probe_pres, "calib-imp"));
    }
    return out;
}

std::vector<OperatingPoint> Experiment::operating_points(const ScoreSet& scores) const {
    std::vector<OperatingPoint> points;
    const auto [eer, thr] = compute_eer(scores);
    OperatingPoint eer_pt;
    eer_pt.name = "EER";
    eer_pt.threshold = thr;
    const auto [far, frr] = compute_far_frr(scores, thr);
    eer_pt.far = far;
    eer_pt.frr = frr;
    points.push_back(std::move(eer_pt));
    for (double target : config.far_points) points.push_back(threshold_at_far(scores, target));
    return points;
}

ProtocolEnv Experiment::make_env(Scenario scenario, double threshold) const {
    ProtocolEnv env;
    env.world = &world;
    env.ttp = &calib_ttp;
    env.scenario = scenario;
    env.morph = MorphParams{config.morph_alpha, BorderPolicy::passthrough};
    env.gaussian_sigma = config.gaussian_sigma;
    env.implode_strength = config.implode_strength;
    env.threshold = threshold;
    return env;
}

std::string scores_csv_path(const std::string& out_dir, Scenario s) {
    return out_dir + "/scores_" + scenario_name(s) + ".csv";
}
std::string traces_csv_path(const std::string& out_dir, Scenario s) {
    return out_dir + "/traces_" + scenario_name(s) + ".csv";
}
std::string traces_sidecar_path(const std::string& out_dir, Scenario s) {
    return out_dir + "/traces_" + scenario_name(s) + ".json";
}

void write_scores_csv(const std::string& path, const ScoreSet& scores) {
    atomic_write_file(path, [&](std::ostream& out) {
        out << "scenario,kind,value\n";
        char buf[64];
        for (double v : scores.genuine) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << scores.scenario << ",genuine," << buf << "\n";
        }
        for (double v : scores.impostor) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << scores.scenario << ",impostor," << buf << "\n";
        }
    });
}

ScoreSet read_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    ScoreSet out;
    out.dataset_tag = "synthetic";
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string scenario, kind, value;
        std::getline(row, scenario, ',');
        std::getline(row, kind, ',');
        std::getline(row, value, ',');
        out.scenario = scenario;
        (kind == "genuine" ? out.genuine : out.impostor)
            .push_back(std::strtod(value.c_str(), nullptr));
    }
    return out;
}

namespace {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const int k = std::min(jobs, n);
    workers.reserve(k);
    for (int j = 0; j < k; ++j) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace

void run_simulate(const ExperimentConfig& config) {
    Experiment ex(config);
    fs::create_directories(config.out_dir);

    // Score distributions per scenario (these also pin the thresholds).
    double otb_threshold = 0.5;
    for (Scenario s : config.scenarios) {
        const ScoreSet scores = ex.calibration_scores(s);
        write_scores_csv(scores_csv_path(config.out_dir, s), scores);
        if (s == Scenario::otb_morph) otb_threshold = compute_eer(scores).second;
    }

    // Protocol sessions run under the morph scheme.
    ProtocolEnv env = ex.make_env(Scenario::otb_morph, otb_threshold);
    env.ttp = &ex.ttp;
    Rng rng(derive_seed(config.master_seed, "simulate"));
    Server server;
    std::vector<SessionTranscript> transcripts;

    for (int c = 0; c < config.n_clients; ++c) {
        ClientDevice client;
        client.client_id = "client-" + std::to_string(c);
        client.subject_id = c % ex.world.n_subjects();
        auto pseudonyms = ex.ttp.issue(client.client_id, config.pseudonym_pool, rng);
        for (auto& ps : pseudonyms) client.se.pseudonym_pool.push_back(std::move(ps));
        enroll(env, client, ex.world.present(client.subject_id, rng), server, rng);

        const int attacker_subject = (client.subject_id + 1) % ex.world.n_subjects();
        for (int i = 0; i < config.sessions_per_client; ++i)
            transcripts.push_back(
                run_session(env, client, server, SessionBehavior::genuine, attacker_subject, rng));
        for (int i = 0; i < config.attacker_sessions_per_client; ++i)
            transcripts.push_back(
                run_session(env, client, server, SessionBehavior::attacker, attacker_subject, rng));
    }

    write_transcripts_jsonl(config.out_dir + "/transcripts.jsonl", transcripts);
    save_server_store(config.out_dir + "/server_store.json", server);
    save_config(config.out_dir + "/config.json", config);
}

void run_attack(const ExperimentConfig& config) {
    Experiment ex(config);
    fs::create_directories(config.out_dir);

    for (Scenario s : config.scenarios) {
        const ScoreSet scores = ex.calibration_scores(s);
        const auto points = ex.operating_points(scores);
        const double threshold = points.front().threshold;  // EER point

        std::vector<AttackTrace> traces(config.attacks_per_scenario);
        const std::string sname = scenario_name(s);
        parallel_for(config.attacks_per_scenario, config.jobs, [&](int k) {
            // Each run owns its TTP/ledger so runs are order-independent.
            TrustedThirdParty run_ttp(ex.world.config());
            ProtocolEnv env = ex.make_env(s, threshold);
            env.ttp = &run_ttp;
            AttackPolicy policy = config.attack;
            policy.seed = derive_seed(config.master_seed, "attack-" + sname, k);
            Rng rng(derive_seed(config.master_seed, "attack-run-" + sname, k));
            const int victim = k % ex.world.n_subjects();
            traces[k] = attack_scenario(env, policy, victim, points, rng);
        });

        write_traces_csv(traces_csv_path(config.out_dir, s), traces_sidecar_path(config.out_dir, s),
                         traces);
    }
}

void run_evaluate(const ExperimentConfig& config) {
    fs::create_directories(config.out_dir);

    std::vector<std::string> missing;
    std::vector<ScoreSet> score_sets;
    EvalReport report;
    report.metadata = {{"master_seed", config.master_seed},
                       {"schema_version", config.schema_version},
                       {"world", config_to_json(config)["world"]}};

    Experiment ex(config);
    for (Scenario s : config.scenarios) {
        const std::string spath = scores_csv_path(config.out_dir, s);
        if (!fs::exists(spath)) {
            missing.push_back(spath);
            continue;
        }
        ScoreSet scores = read_scores_csv(spath);
        ScenarioReport rep;
        const auto points = ex.operating_points(scores);
        rep.eer = compute_eer(scores).first;
        rep.points = points;

        const std::string tpath = traces_csv_path(config.out_dir, s);
        const std::string tside = traces_sidecar_path(config.out_dir, s);
        if (fs::exists(tpath) && fs::exists(tside)) {
            const auto traces = read_traces_csv(tpath, tside);
            std::vector<TraceView> views;
            views.reserve(traces.size());
            for (const auto& t : traces) views.push_back(t.view());
            for (const auto& pt : points) {
                rep.asr[pt.name] = compute_asr(views, pt);
                // There is no outside comparison anchor for the morph
                // scheme at FAR=0.1; mark the cell so consumers know.
                if (s == Scenario::otb_morph && pt.name == "FAR=0.1")
                    rep.asr_flags[pt.name] = "no_anchor";
            }
        } else {
            for (const auto& pt : points) {
                rep.asr[pt.name] = 0.0;
                rep.asr_flags[pt.name] = "not_measured";
            }
        }
        report.scenarios[scenario_name(s)] = std::move(rep);
        score_sets.push_back(std::move(scores));
    }

    if (!missing.empty()) {
        std::ostringstream os;
        os << "missing inputs:";
        for (const auto& m : missing) os << "\n  - " << m;
        throw ConfigError(os.str());
    }
    export_report(report, score_sets, config.out_dir);
}

void run_demo(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    cfg.scenarios = {Scenario::otb_morph};
    cfg.calibration_genuine = std::min(cfg.calibration_genuine, 120);
    cfg.calibration_impostor = std::min(cfg.calibration_impostor, 120);
    Experiment ex(cfg);
    fs::create_directories(cfg.out_dir);

    std::cout << "[demo] calibrating the morph scheme on the synthetic world...\n";
    const ScoreSet scores = ex.calibration_scores(Scenario::otb_morph);
    const auto [eer, threshold] = compute_eer(scores);
    std::printf("[demo] EER %.2f%% at threshold %.4f\n", 100.0 * eer, threshold);

    ProtocolEnv env = ex.make_env(Scenario::otb_morph, threshold);
    env.ttp = &ex.ttp;
    Rng rng(derive_seed(cfg.master_seed, "demo"));

    Server server;
    ClientDevice client;
    client.client_id = "alice";
    client.subject_id = 0;
    auto pseudonyms = ex.ttp.issue(client.client_id, 16, rng);
    for (auto& ps : pseudonyms) client.se.pseudonym_pool.push_back(std::move(ps));

    enroll(env, client, ex.world.present(0, rng), server, rng);
    std::printf("[demo] enrolled '%s' with AD %s\n", client.client_id.c_str(),
                client.se.current_ad.ad_id.c_str());

    EavesdropTap tap;
    std::vector<SessionTranscript> transcripts;
    for (int i = 0; i < 3; ++i) {
        auto t = run_session(env, client, server, SessionBehavior::genuine, 1, rng, &tap);
        std::printf("[demo] genuine session %llu: %s, rotated=%s, current AD now %s\n",
                    static_cast<unsigned long long>(t.session_id), t.decision.c_str(),
                    t.rotated ? "yes" : "no", client.se.current_ad.ad_id.c_str());
        transcripts.push_back(std::move(t));
    }

    auto atk = run_session(env, client, server, SessionBehavior::attacker, 1, rng);
    std::printf("[demo] naive attacker session %llu: %s\n",
                static_cast<unsigned long long>(atk.session_id), atk.decision.c_str());
    transcripts.push_back(std::move(atk));

    if (!tap.captured.empty()) {
        const bool replay_ok = inject_template(tap.captured.front(), server, client.client_id);
        std::printf("[demo] replay of the first eavesdropped template: %s\n",
                    replay_ok ? "accept (!)" : "reject (stale after rotation)");
    }

    // Bundled sample pair for the morph command.
    const Presentation sample_a = ex.world.present(0, rng);
    const Presentation key = sample_key_face(ex.world.config(), rng);
    write_pnm(cfg.out_dir + "/sample_a.pgm", sample_a.image);
    write_landmarks(cfg.out_dir + "/sample_a.lm", sample_a.landmarks);
    write_pnm(cfg.out_dir + "/sample_b.pgm", key.image);
    write_landmarks(cfg.out_dir + "/sample_b.lm", key.landmarks);
    const FaceImage morphed = morph(sample_a.image, sample_a.landmarks, key.image, key.landmarks,
                                    MorphParams{cfg.morph_alpha, BorderPolicy::passthrough});
    write_pnm(cfg.out_dir + "/sample_morph.pgm", morphed);

    std::vector<EmbeddingRecord> emb;
    emb.push_back({"subject0", "raw", extract_features(sample_a.image, ex.world.extractor())});
    emb.push_back({"subject0", "morphed", extract_features(morphed, ex.world.extractor())});
    write_embeddings_csv(cfg.out_dir + "/embeddings.csv", emb);

    write_transcripts_jsonl(cfg.out_dir + "/transcripts.jsonl", transcripts);
    save_server_store(cfg.out_dir + "/server_store.json", server);
    std::printf("[demo] artifacts in %s: sample pair, morph, transcripts, server store\n",
                cfg.out_dir.c_str());
}

}  // namespace otb
