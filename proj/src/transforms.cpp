#include "otb/transforms.hpp"

#include <cmath>

#include "otb/errors.hpp"
#include "otb/rng.hpp"

namespace otb {

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::unprotected: return "i";
        case Scenario::gaussian_noise: return "ii";
        case Scenario::imploding: return "iii";
        case Scenario::otb_morph: return "iv";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "i") return Scenario::unprotected;
    if (name == "ii") return Scenario::gaussian_noise;
    if (name == "iii") return Scenario::imploding;
    if (name == "iv") return Scenario::otb_morph;
    throw ConfigError("unknown scenario '" + name + "' (want i|ii|iii|iv)");
}

namespace {

const char* ad_kind_name(AdKind k) {
    switch (k) {
        case AdKind::none: return "none";
        case AdKind::noise_key: return "noise_key";
        case AdKind::implode_key: return "implode_key";
        case AdKind::random_face: return "random_face";
    }
    return "?";
}

AdKind ad_kind_from_name(const std::string& name) {
    if (name == "none") return AdKind::none;
    if (name == "noise_key") return AdKind::noise_key;
    if (name == "implode_key") return AdKind::implode_key;
    if (name == "random_face") return AdKind::random_face;
    throw ConfigError("unknown AD kind '" + name + "'");
}

}  // namespace

nlohmann::json ad_to_json(const AuxiliaryData& ad, const std::string& asset_dir) {
    nlohmann::json j;
    j["ad_id"] = ad.ad_id;
    j["kind"] = ad_kind_name(ad.kind);
    switch (ad.kind) {
        case AdKind::none:
            break;
        case AdKind::noise_key:
            j["seed"] = ad.seed;
            break;
        case AdKind::implode_key:
            j["strength"] = ad.strength;
            break;
        case AdKind::random_face: {
            if (asset_dir.empty())
                throw ConfigError("random_face AD serialization needs an asset directory");
            const std::string face_path = asset_dir + "/" + ad.ad_id + ".pnm";
            const std::string lm_path = asset_dir + "/" + ad.ad_id + ".lm";
            write_pnm(face_path, ad.face);
            write_landmarks(lm_path, ad.face_landmarks);
            j["face_path"] = face_path;
            j["landmark_path"] = lm_path;
            break;
        }
    }
    return j;
}

AuxiliaryData ad_from_json(const nlohmann::json& j, const std::string&) {
    AuxiliaryData ad;
    ad.ad_id = j.at("ad_id").get<std::string>();
    ad.kind = ad_kind_from_name(j.at("kind").get<std::string>());
    switch (ad.kind) {
        case AdKind::none:
            break;
        case AdKind::noise_key:
            ad.seed = j.at("seed").get<std::uint64_t>();
            break;
        case AdKind::implode_key:
            ad.strength = j.at("strength").get<double>();
            break;
        case AdKind::random_face:
            ad.face = read_pnm(j.at("face_path").get<std::string>());
            ad.face_landmarks = read_landmarks(j.at("landmark_path").get<std::string>());
            break;
    }
    return ad;
}

bool AdLedger::register_issued(const std::string& ad_id) {
    std::lock_guard<std::mutex> lock(mu_);
    return issued_.insert(ad_id).second;
}

void AdLedger::consume_for_reference(const std::string& ad_id) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!consumed_.insert(ad_id).second)
        throw ReuseViolationError("auxiliary data '" + ad_id + "' already backs a reference");
}

std::size_t AdLedger::issued_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return issued_.size();
}

ProtectedTemplate protect_none(const Embedding& probe) {
    return {probe, Scenario::unprotected, ""};
}

ProtectedTemplate protect_gaussian(const Embedding& probe, const AuxiliaryData& ad, double sigma) {
    if (ad.kind != AdKind::noise_key)
        throw ConfigError("protect_gaussian needs a noise_key AD");
    if (sigma < 0.0)
        throw ConfigError("sigma must be >= 0");
    if (sigma == 0.0)
        return {probe, Scenario::gaussian_noise, ad.ad_id};
    Rng rng(ad.seed);
    Embedding e = probe;
    const double scale = sigma / std::sqrt(static_cast<double>(probe.dimension()));
    for (double& v : e.values) v += scale * rng.gaussian();
    return {normalize(std::move(e)), Scenario::gaussian_noise, ad.ad_id};
}

FaceImage implode(const FaceImage& img, double strength) {
    if (!(strength >= 0.0 && strength < 1.0))
        throw ConfigError("implode strength must be in [0,1)");
    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const double radius = std::sqrt(cx * cx + cy * cy);  // corner distance: r in [0,1]
    const double expo = 1.0 / (1.0 - strength);

    FaceImage out = FaceImage::filled(w, h, ch, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double r = std::sqrt(dx * dx + dy * dy) / radius;
            double sx = static_cast<double>(x), sy = static_cast<double>(y);
            if (r > 0.0) {
                const double ratio = std::pow(r, expo) / r;
                sx = cx + dx * ratio;
                sy = cy + dy * ratio;
            }
            for (int c = 0; c < ch; ++c) out.set(x, y, c, img.sample_bilinear(sx, sy, c));
        }
    }
    return out;
}

ProtectedTemplate protect_implode(const FaceImage& img, const LandmarkSet& /*landmarks*/,
                                  double strength, const ExtractorHandle& extractor) {
    ProtectedTemplate t;
    t.embedding = extract_features(implode(img, strength), extractor);
    t.scenario = Scenario::imploding;
    return t;
}

ProtectedTemplate protect_otb(const FaceImage& probe_img, const LandmarkSet& probe_lm,
                              const AuxiliaryData& ad, const MorphParams& params,
                              const ExtractorHandle& extractor) {
    if (ad.kind != AdKind::random_face)
        throw ConfigError("protect_otb needs a random_face AD");
    ProtectedTemplate t;
    t.embedding =
        extract_features(morph(probe_img, probe_lm, ad.face, ad.face_landmarks, params), extractor);
    t.scenario = Scenario::otb_morph;
    t.ad_id = ad.ad_id;
    return t;
}

ProtectedTemplate protect_otb_enroll(const FaceImage& probe_img, const LandmarkSet& probe_lm,
                                     const AuxiliaryData& ad, const MorphParams& params,
                                     const ExtractorHandle& extractor, AdLedger& ledger) {
    ledger.consume_for_reference(ad.ad_id);
    return protect_otb(probe_img, probe_lm, ad, params, extractor);
}

}  // namespace otb
