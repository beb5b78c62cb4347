#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <string>

#include "otb/embedding.hpp"
#include "otb/extractor.hpp"
#include "otb/image.hpp"
#include "otb/landmarks.hpp"
#include "otb/morph.hpp"

#include "json.hpp"

namespace otb {

// Protection scenarios under comparison.
enum class Scenario { unprotected, gaussian_noise, imploding, otb_morph };

const char* scenario_name(Scenario s);        // "i".."iv"
Scenario scenario_from_name(const std::string& name);

enum class AdKind { none, noise_key, implode_key, random_face };

// Key material of a cancelable transform. For random_face the payload is a
// never-reused face image plus its landmarks.
struct AuxiliaryData {
    std::string ad_id;
    AdKind kind = AdKind::none;
    std::uint64_t seed = 0;       // noise_key
    double strength = 0.0;        // implode_key
    FaceImage face;               // random_face
    LandmarkSet face_landmarks;   // random_face

    bool operator==(const AuxiliaryData&) const = default;
};

// JSON record {ad_id, kind, seed|strength|face_path+landmark_path}. For
// random_face the raster goes to `face_path` (PNM) and landmarks to
// `landmark_path` next to it; other kinds are self-contained.
nlohmann::json ad_to_json(const AuxiliaryData& ad, const std::string& asset_dir = "");
AuxiliaryData ad_from_json(const nlohmann::json& j, const std::string& asset_dir = "");

// Tracks issued ad_ids (global uniqueness) and ids consumed as reference
// keys (one enrollment per AD). Atomic check-and-insert.
class AdLedger {
public:
    // False if the id was already issued.
    bool register_issued(const std::string& ad_id);
    // Throws ReuseViolationError if this AD already backs a reference.
    void consume_for_reference(const std::string& ad_id);

    std::size_t issued_count() const;

private:
    mutable std::mutex mu_;
    std::set<std::string> issued_;
    std::set<std::string> consumed_;
};

struct ProtectedTemplate {
    Embedding embedding;
    Scenario scenario = Scenario::unprotected;
    std::string ad_id;

    bool operator==(const ProtectedTemplate&) const = default;
};

// Scenario (i): identity mapping.
ProtectedTemplate protect_none(const Embedding& probe);

// Scenario (ii): additive Gaussian noise in embedding space, renormalized.
// The noise is deterministic in the AD's seed; scale `sigma` is the
// expected L2 norm of the perturbation on a unit-norm embedding.
ProtectedTemplate protect_gaussian(const Embedding& probe, const AuxiliaryData& ad, double sigma);

// Radial resampler pulling pixels toward the image center: an output pixel
// at normalized radius r samples the input at r^(1/(1-strength)) along the
// same ray. strength = 0 is the identity.
FaceImage implode(const FaceImage& img, double strength);

// Scenario (iii).
ProtectedTemplate protect_implode(const FaceImage& img, const LandmarkSet& landmarks,
                                  double strength, const ExtractorHandle& extractor);

// Scenario (iv): morph the probe with the AD's random face, then extract.
ProtectedTemplate protect_otb(const FaceImage& probe_img, const LandmarkSet& probe_lm,
                              const AuxiliaryData& ad, const MorphParams& params,
                              const ExtractorHandle& extractor);

// Reference-building variant: additionally consumes the AD in the ledger,
// so a second enrollment with the same AD raises ReuseViolationError.
ProtectedTemplate protect_otb_enroll(const FaceImage& probe_img, const LandmarkSet& probe_lm,
                                     const AuxiliaryData& ad, const MorphParams& params,
                                     const ExtractorHandle& extractor, AdLedger& ledger);

}  // namespace otb
