#pragma once

#include <string>
#include <vector>

#include "otb/adversary.hpp"
#include "otb/evaluation.hpp"
#include "otb/protocol.hpp"

namespace otb {

// Everything a reproducible run needs. The master seed determines every
// derived stream; the same config file always regenerates the same output
// tree bit for bit.
struct ExperimentConfig {
    int schema_version = 1;
    std::uint64_t master_seed = 1234;
    std::string out_dir = "out";
    int jobs = 1;

    SyntheticWorldConfig world;  // world.rng_seed is derived from master_seed
    std::vector<Scenario> scenarios = {Scenario::unprotected, Scenario::gaussian_noise,
                                       Scenario::imploding, Scenario::otb_morph};
    double morph_alpha = 0.5;
    double gaussian_sigma = 0.3;
    double implode_strength = 0.5;

    int calibration_genuine = 400;   // pairs per scenario
    int calibration_impostor = 400;

    AttackPolicy attack;             // per-run seeds derived per attack index
    int attacks_per_scenario = 50;

    int n_clients = 2;
    int sessions_per_client = 3;
    int attacker_sessions_per_client = 1;
    int pseudonym_pool = 64;

    std::vector<double> far_points = {0.1, 0.01, 0.001};

    void validate() const;  // lists every offending field
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& config);

// A built world plus per-scenario calibration (score sets, thresholds).
struct Experiment {
    ExperimentConfig config;
    SyntheticWorld world;
    TrustedThirdParty ttp;

    explicit Experiment(ExperimentConfig cfg);

    // Genuine/impostor scores for a scenario, drawn from a dedicated
    // seed stream; identical across calls and processes.
    ScoreSet calibration_scores(Scenario scenario) const;

    // EER point first, then one point per configured FAR target.
    std::vector<OperatingPoint> operating_points(const ScoreSet& scores) const;

    ProtocolEnv make_env(Scenario scenario, double threshold) const;

    // Mutable because calibration issues noise ADs through the TTP.
    mutable TrustedThirdParty calib_ttp;
};

// Subcommand drivers. Each writes its artifacts under config.out_dir and
// is deterministic in (config, master_seed).
void run_simulate(const ExperimentConfig& config);
void run_attack(const ExperimentConfig& config);
void run_evaluate(const ExperimentConfig& config);
void run_demo(const ExperimentConfig& config);

// Paths used by the drivers (relative to out_dir).
std::string scores_csv_path(const std::string& out_dir, Scenario s);
std::string traces_csv_path(const std::string& out_dir, Scenario s);
std::string traces_sidecar_path(const std::string& out_dir, Scenario s);

void write_scores_csv(const std::string& path, const ScoreSet& scores);
ScoreSet read_scores_csv(const std::string& path);

}  // namespace otb
