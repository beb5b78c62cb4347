#pragma once

#include <cstdint>
#include <vector>

#include "otb/extractor.hpp"
#include "otb/image.hpp"
#include "otb/landmarks.hpp"
#include "otb/rng.hpp"

namespace otb {

// Desk-scale stand-in for a face dataset: parametric identities rendered as
// landmark-anchored blob patterns, so image-domain morphing and imploding
// move embeddings in meaningful ways.
struct SyntheticWorldConfig {
    std::size_t dimension = 48;      // embedding dimension
    int n_subjects = 12;
    double class_spread = 0.25;      // within-class photometric scale
    double population_spread = 1.0;  // between-class scale
    std::uint64_t rng_seed = 1;
    int image_width = 64;
    int image_height = 64;
    int channels = 1;
    double landmark_jitter = 3.0;    // px; within-class geometric noise
    double ad_diversity = 2.5;       // key-face dispersion, in population units

    // class_spread must be positive and strictly below population_spread.
    void validate() const;
};

// One rendered presentation: the raster plus its ground-truth landmarks.
struct Presentation {
    FaceImage image;
    LandmarkSet landmarks;
};

// Per-subject generative parameters. Deterministic for (config seed, id).
struct SubjectModel {
    int id = 0;
    LandmarkSet canonical_landmarks;
    std::vector<double> blob_gain;      // signed intensity per landmark blob
    std::vector<double> texture_amp;    // low-frequency identity field
    std::vector<double> texture_phase;
    double bg_level = 0.5;
    double bg_slope_x = 0.0;
    double bg_slope_y = 0.0;
    double radius_scale = 1.0;          // blob size multiplier
    std::vector<double> channel_gain;   // per-channel tint (size = channels)
};

SubjectModel synth_subject(const SyntheticWorldConfig& config, int subject_id);

// Renders one presentation with within-class noise drawn from `rng`.
Presentation sample_presentation(const SyntheticWorldConfig& config, const SubjectModel& subject,
                                 Rng& rng);

// Noise-free canonical render of the subject (used for class-mean probes).
Presentation render_canonical(const SyntheticWorldConfig& config, const SubjectModel& subject);

// A fresh random key face (an "arbitrary face image, real or artificial"):
// an identity drawn from a wider dispersion pool, rendered without noise.
Presentation sample_key_face(const SyntheticWorldConfig& config, Rng& rng);

// Landmark schema used by the synthetic renderer.
extern const char* const kSyntheticSchemaId;
std::size_t synthetic_schema_size();

// Convenience bundle: config + subjects + extractor.
class SyntheticWorld {
public:
    explicit SyntheticWorld(SyntheticWorldConfig config);

    const SyntheticWorldConfig& config() const { return config_; }
    const SubjectModel& subject(int id) const;
    int n_subjects() const { return static_cast<int>(subjects_.size()); }
    const ExtractorHandle& extractor() const { return extractor_; }

    Presentation present(int subject_id, Rng& rng) const {
        return sample_presentation(config_, subject(subject_id), rng);
    }

private:
    SyntheticWorldConfig config_;
    std::vector<SubjectModel> subjects_;
    ExtractorHandle extractor_;
};

}  // namespace otb
