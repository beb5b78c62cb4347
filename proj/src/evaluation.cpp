#include "otb/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

namespace {

void require_scores(const ScoreSet& s, bool need_genuine = true, bool need_impostor = true) {
    if (need_genuine && s.genuine.empty())
        throw InsufficientDataError("score set has no genuine scores");
    if (need_impostor && s.impostor.empty())
        throw InsufficientDataError("score set has no impostor scores");
}

// far/frr via sorted copies; counting convention matches compute_far_frr.
struct SortedScores {
    std::vector<double> genuine;
    std::vector<double> impostor;

    explicit SortedScores(const ScoreSet& s) : genuine(s.genuine), impostor(s.impostor) {
        std::sort(genuine.begin(), genuine.end());
        std::sort(impostor.begin(), impostor.end());
    }

    double far(double thr) const {
        const auto it = std::lower_bound(impostor.begin(), impostor.end(), thr);
        return static_cast<double>(it - impostor.begin()) / impostor.size();
    }
    double frr(double thr) const {
        const auto it = std::lower_bound(genuine.begin(), genuine.end(), thr);
        return static_cast<double>(genuine.end() - it) / genuine.size();
    }
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::pair<double, double> compute_far_frr(const ScoreSet& scores, double threshold) {
    require_scores(scores);
    std::size_t fa = 0, fr = 0;
    for (double s : scores.impostor)
        if (s < threshold) ++fa;
    for (double s : scores.genuine)
        if (s >= threshold) ++fr;
    return {static_cast<double>(fa) / scores.impostor.size(),
            static_cast<double>(fr) / scores.genuine.size()};
}

std::pair<double, double> compute_eer(const ScoreSet& scores) {
    require_scores(scores);
    SortedScores sorted(scores);

    std::vector<double> values;
    values.reserve(sorted.genuine.size() + sorted.impostor.size());
    values.insert(values.end(), sorted.genuine.begin(), sorted.genuine.end());
    values.insert(values.end(), sorted.impostor.begin(), sorted.impostor.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<double> candidates;
    candidates.reserve(2 * values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        candidates.push_back(values[i]);
        if (i + 1 < values.size()) candidates.push_back((values[i] + values[i + 1]) / 2.0);
    }

    double best_gap = 2.0, best_thr = candidates.front(), best_eer = 0.5;
    for (double thr : candidates) {
        const double far = sorted.far(thr);
        const double frr = sorted.frr(thr);
        const double gap = std::abs(far - frr);
        if (gap < best_gap) {  // strict: ties keep the lowest threshold
            best_gap = gap;
            best_thr = thr;
            best_eer = (far + frr) / 2.0;
        }
    }
    return {best_eer, best_thr};
}

OperatingPoint threshold_at_far(const ScoreSet& scores, double target_far) {
    require_scores(scores);
    if (target_far < 0.0)
        throw ConfigError("target FAR must be >= 0");
    SortedScores sorted(scores);

    OperatingPoint pt;
    {
        std::ostringstream os;
        os << "FAR=" << target_far;
        pt.name = os.str();
    }
    if (target_far > 0.0 &&
        static_cast<double>(scores.impostor.size()) < 1.0 / target_far)
        pt.flag = "low_samples";

    // FAR(t) is a step function increasing at impostor scores, so the
    // largest admissible threshold is an impostor score (or sits above
    // them all when everything is admissible).
    double best = sorted.impostor.front();  // FAR here is 0 (strictly below)
    const double above_all = sorted.impostor.back() + 1.0;
    for (double cand : sorted.impostor) {
        if (sorted.far(cand) <= target_far) best = std::max(best, cand);
    }
    if (sorted.far(above_all) <= target_far) best = above_all;

    pt.threshold = best;
    const auto [far, frr] = compute_far_frr(scores, best);
    pt.far = far;
    pt.frr = frr;
    return pt;
}

double compute_asr(const std::vector<TraceView>& traces, const OperatingPoint& point) {
    if (traces.empty())
        throw InsufficientDataError("no attack traces");
    std::size_t hits = 0;
    for (const auto& t : traces) {
        for (double s : t.best_scores) {
            if (s < point.threshold) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / traces.size();
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["metadata"] = report.metadata;
    nlohmann::json sc = nlohmann::json::object();
    for (const auto& [name, rep] : report.scenarios) {
        nlohmann::json r;
        r["eer"] = rep.eer;
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : rep.points) {
            pts.push_back({{"name", p.name},
                           {"threshold", p.threshold},
                           {"far", p.far},
                           {"frr", p.frr},
                           {"flag", p.flag}});
        }
        r["points"] = pts;
        r["asr"] = rep.asr;
        r["asr_flags"] = rep.asr_flags;
        sc[name] = r;
    }
    j["scenarios"] = sc;
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.metadata = j.at("metadata");
    for (const auto& [name, r] : j.at("scenarios").items()) {
        ScenarioReport rep;
        rep.eer = r.at("eer").get<double>();
        for (const auto& p : r.at("points")) {
            OperatingPoint pt;
            pt.name = p.at("name").get<std::string>();
            pt.threshold = p.at("threshold").get<double>();
            pt.far = p.at("far").get<double>();
            pt.frr = p.at("frr").get<double>();
            pt.flag = p.at("flag").get<std::string>();
            rep.points.push_back(std::move(pt));
        }
        rep.asr = r.at("asr").get<std::map<std::string, double>>();
        rep.asr_flags = r.at("asr_flags").get<std::map<std::string, std::string>>();
        report.scenarios[name] = std::move(rep);
    }
    return report;
}

void export_report(const EvalReport& report, const std::vector<ScoreSet>& score_sets,
                   const std::string& out_dir, const HistogramSpec& hist) {
    if (report.scenarios.empty())
        throw InsufficientDataError("report has no scenarios");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    {
        std::ofstream out(out_dir + "/report.json");
        if (!out) throw IoError(out_dir + "/report.json: cannot open for writing");
        out << report_to_json(report).dump(2) << "\n";
    }

    {
        std::ofstream out(out_dir + "/report.csv");
        if (!out) throw IoError(out_dir + "/report.csv: cannot open for writing");
        out << "scenario,metric,operating_point,value,flag\n";
        for (const auto& [name, rep] : report.scenarios) {
            out << name << ",eer,EER," << fmt_double(rep.eer) << ",\n";
            for (const auto& p : rep.points) {
                out << name << ",threshold," << p.name << "," << fmt_double(p.threshold) << ","
                    << p.flag << "\n";
                out << name << ",far," << p.name << "," << fmt_double(p.far) << "," << p.flag
                    << "\n";
                out << name << ",frr," << p.name << "," << fmt_double(p.frr) << "," << p.flag
                    << "\n";
            }
            for (const auto& [pname, value] : rep.asr) {
                const auto fit = rep.asr_flags.find(pname);
                const std::string flag = fit == rep.asr_flags.end() ? "" : fit->second;
                out << name << ",asr," << pname << "," << fmt_double(value) << "," << flag << "\n";
            }
        }
    }

    {
        // Wide table: one row per scenario, EER/ASR then FRR/ASR per FAR.
        std::ofstream out(out_dir + "/table.csv");
        if (!out) throw IoError(out_dir + "/table.csv: cannot open for writing");
        out << "scenario,eer,asr_at_eer,frr_far0.1,asr_far0.1,frr_far0.01,asr_far0.01,"
               "frr_far0.001,asr_far0.001\n";
        for (const auto& [name, rep] : report.scenarios) {
            out << name << "," << fmt_double(rep.eer);
            const auto asr_cell = [&](const std::string& pname) -> std::string {
                const auto it = rep.asr.find(pname);
                if (it == rep.asr.end()) return "not_measured";
                const auto fit = rep.asr_flags.find(pname);
                if (fit != rep.asr_flags.end() && fit->second == "not_measured")
                    return "not_measured";
                return fmt_double(it->second);
            };
            const auto frr_cell = [&](const std::string& pname) -> std::string {
                for (const auto& p : rep.points)
                    if (p.name == pname) return fmt_double(p.frr);
                return "not_measured";
            };
            out << "," << asr_cell("EER");
            for (const char* far : {"FAR=0.1", "FAR=0.01", "FAR=0.001"})
                out << "," << frr_cell(far) << "," << asr_cell(far);
            out << "\n";
        }
    }

    {
        std::ofstream out(out_dir + "/histograms.csv");
        if (!out) throw IoError(out_dir + "/histograms.csv: cannot open for writing");
        out << "scenario,kind,bin_left,bin_right,count\n";
        for (const auto& s : score_sets) {
            double lo = 1e300, hi = -1e300;
            for (const auto* list : {&s.genuine, &s.impostor}) {
                for (double v : *list) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (lo > hi) continue;
            if (hi == lo) hi = lo + 1e-9;
            const double step = (hi - lo) / hist.bins;
            for (const char* kind : {"genuine", "impostor"}) {
                const auto& list = std::string(kind) == "genuine" ? s.genuine : s.impostor;
                std::vector<std::size_t> counts(hist.bins, 0);
                for (double v : list) {
                    int b = static_cast<int>((v - lo) / step);
                    b = std::clamp(b, 0, hist.bins - 1);
                    counts[b]++;
                }
                for (int b = 0; b < hist.bins; ++b) {
                    out << s.scenario << "," << kind << "," << fmt_double(lo + b * step) << ","
                        << fmt_double(lo + (b + 1) * step) << "," << counts[b] << "\n";
                }
            }
        }
    }
}

std::map<std::string, std::pair<double, std::string>> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::pair<double, std::string>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string scenario, metric, point, value, flag;
        std::getline(row, scenario, ',');
        std::getline(row, metric, ',');
        std::getline(row, point, ',');
        std::getline(row, value, ',');
        std::getline(row, flag, ',');
        out[scenario + "/" + metric + "/" + point] = {std::strtod(value.c_str(), nullptr), flag};
    }
    return out;
}

}  // namespace otb
