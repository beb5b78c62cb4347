#include "otb/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

const char* const kSyntheticSchemaId = "synth16";

namespace {

// Canonical layout (fractions of the frame) of the 16 schema points:
// eyes, brows, nose, mouth triple, and an 8-point outer ring.
constexpr int kSchemaN = 16;
constexpr double kSchemaBase[kSchemaN][2] = {
    {0.32, 0.35}, {0.68, 0.35},  // eyes
    {0.30, 0.23}, {0.70, 0.23},  // brows
    {0.50, 0.52},                // nose
    {0.36, 0.70}, {0.50, 0.74}, {0.64, 0.70},  // mouth
    {0.16, 0.20}, {0.84, 0.20}, {0.13, 0.52}, {0.87, 0.52},
    {0.22, 0.84}, {0.78, 0.84}, {0.38, 0.12}, {0.62, 0.12},
};
// Blob radii in pixels at a 64px frame.
constexpr double kSchemaRadius[kSchemaN] = {
    2.2, 2.2, 2.0, 2.0, 2.6, 2.3, 2.3, 2.3,
    3.6, 3.6, 3.6, 3.6, 3.6, 3.6, 3.2, 3.2,
};
// Dark features (eyes, brows, mouth) against lighter structure.
constexpr double kSchemaSign[kSchemaN] = {
    -1, -1, -1, -1, +1, -1, -1, -1,
    +1, -1, +1, -1, +1, -1, +1, -1,
};

// Low-frequency identity/wobble basis (cycles across the frame).
constexpr int kBasisN = 6;
constexpr double kBasisFreq[kBasisN][2] = {
    {1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {2, 2},
};

// Scale constants mapping config spreads onto renderer parameters. The
// within-class constants are calibrated so that, with landmark_jitter = 0,
// the embedding-space sample sigma of one subject's presentations tracks
// class_spread; the between-class constants track population_spread on the
// same scale.
constexpr double kGeoBetween = 2.5;       // px per population unit
constexpr double kBlobBase = 0.30;
constexpr double kBlobVar = 0.10;         // per population unit
constexpr double kBlobLo = 0.08, kBlobHi = 0.42;
constexpr double kTexBetween = 0.035;     // per basis, population unit
constexpr double kBgLevelVar = 0.03;
constexpr double kBgSlopeVar = 0.08;
constexpr double kChannelGainVar = 0.12;
constexpr double kWobbleFlat = 0.05;      // per class unit
constexpr double kWobbleField = 0.056;    // per class unit, per basis
constexpr double kPixNoise = 0.048;       // per class unit
constexpr double kCanonicalMargin = 6.0;  // px at 64
constexpr double kJitterMargin = 3.0;
// Key faces render with larger, smoother blobs: flatter gradients keep the
// shared morph half stable when the averaged geometry wiggles between
// presentations.
constexpr double kKeyFaceRadiusScale = 1.6;

double px_scale(const SyntheticWorldConfig& c) {
    return std::min(c.image_width, c.image_height) / 64.0;
}

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Draws one identity; `dispersion` is population_spread for enrolled
// subjects and population_spread * ad_diversity for key faces.
SubjectModel make_identity(const SyntheticWorldConfig& config, Rng& rng, double dispersion) {
    const double s = px_scale(config);
    const double w1 = config.image_width - 1.0;
    const double h1 = config.image_height - 1.0;
    const double margin = kCanonicalMargin * s;

    SubjectModel m;
    m.canonical_landmarks.schema_id = kSyntheticSchemaId;
    for (int i = 0; i < kSchemaN; ++i) {
        Point2 p{kSchemaBase[i][0] * w1, kSchemaBase[i][1] * h1};
        p.x = clamp(p.x + dispersion * kGeoBetween * s * rng.gaussian(), margin, w1 - margin);
        p.y = clamp(p.y + dispersion * kGeoBetween * s * rng.gaussian(), margin, h1 - margin);
        m.canonical_landmarks.points.push_back(p);
    }
    m.blob_gain.resize(kSchemaN);
    for (int i = 0; i < kSchemaN; ++i) {
        const double mag = clamp(kBlobBase + dispersion * kBlobVar * rng.gaussian(), kBlobLo, kBlobHi);
        m.blob_gain[i] = kSchemaSign[i] * mag;
    }
    m.texture_amp.resize(kBasisN);
    m.texture_phase.resize(kBasisN);
    for (int k = 0; k < kBasisN; ++k) {
        m.texture_amp[k] = dispersion * kTexBetween * rng.gaussian();
        m.texture_phase[k] = rng.uniform(0.0, 6.283185307179586);
    }
    m.bg_level = 0.5 + dispersion * kBgLevelVar * rng.gaussian();
    m.bg_slope_x = dispersion * kBgSlopeVar * rng.gaussian();
    m.bg_slope_y = dispersion * kBgSlopeVar * rng.gaussian();
    m.channel_gain.assign(config.channels, 1.0);
    if (config.channels == 3) {
        for (auto& g : m.channel_gain)
            g = clamp(1.0 + dispersion * kChannelGainVar * rng.gaussian(), 0.7, 1.3);
    }
    return m;
}

// Adds amp*cos(2pi(fx x/W + fy y/H) + phase) for each basis element,
// evaluated separably (no per-pixel cos calls).
void add_cosine_field(std::vector<double>& field, int w, int h, const double* amps,
                      const double* phases) {
    std::vector<double> cax(w), sax(w);
    for (int k = 0; k < kBasisN; ++k) {
        if (amps[k] == 0.0) continue;
        const double fx = kBasisFreq[k][0] * 6.283185307179586 / w;
        const double fy = kBasisFreq[k][1] * 6.283185307179586 / h;
        for (int x = 0; x < w; ++x) {
            cax[x] = std::cos(fx * x);
            sax[x] = std::sin(fx * x);
        }
        for (int y = 0; y < h; ++y) {
            const double cb = std::cos(fy * y + phases[k]);
            const double sb = std::sin(fy * y + phases[k]);
            double* row = field.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) row[x] += amps[k] * (cax[x] * cb - sax[x] * sb);
        }
    }
}

FaceImage render(const SyntheticWorldConfig& config, const SubjectModel& m,
                 const LandmarkSet& lm, double flat_offset, const double* wobble_amps,
                 const double* wobble_phases, Rng* noise_rng) {
    const int w = config.image_width;
    const int h = config.image_height;
    const double s = px_scale(config);

    std::vector<double> field(static_cast<std::size_t>(w) * h, 0.0);
    add_cosine_field(field, w, h, m.texture_amp.data(), m.texture_phase.data());
    if (wobble_amps) add_cosine_field(field, w, h, wobble_amps, wobble_phases);

    for (int y = 0; y < h; ++y) {
        const double by = m.bg_level + m.bg_slope_y * (static_cast<double>(y) / h - 0.5) + flat_offset;
        double* row = field.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x)
            row[x] += by + m.bg_slope_x * (static_cast<double>(x) / w - 0.5);
    }

    for (int i = 0; i < kSchemaN; ++i) {
        const Point2 c = lm.points[i];
        const double r = kSchemaRadius[i] * s * m.radius_scale;
        const double inv = 1.0 / (2.0 * r * r);
        const int reach = static_cast<int>(std::ceil(4.0 * r));
        const int x_lo = std::max(0, static_cast<int>(c.x) - reach);
        const int x_hi = std::min(w - 1, static_cast<int>(c.x) + reach);
        const int y_lo = std::max(0, static_cast<int>(c.y) - reach);
        const int y_hi = std::min(h - 1, static_cast<int>(c.y) + reach);
        for (int y = y_lo; y <= y_hi; ++y) {
            double* row = field.data() + static_cast<std::size_t>(y) * w;
            for (int x = x_lo; x <= x_hi; ++x) {
                const double dx = x - c.x;
                const double dy = y - c.y;
                row[x] += m.blob_gain[i] * std::exp(-(dx * dx + dy * dy) * inv);
            }
        }
    }

    const int ch = config.channels;
    std::vector<double> data(static_cast<std::size_t>(w) * h * ch);
    const double noise_scale = config.class_spread * kPixNoise;
    for (std::size_t p = 0; p < field.size(); ++p) {
        for (int c = 0; c < ch; ++c) {
            double v = field[p] * m.channel_gain[c];
            if (noise_rng) v += noise_scale * noise_rng->gaussian();
            data[p * ch + c] = clamp(v, 0.0, 1.0);
        }
    }
    return FaceImage(w, h, ch, std::move(data));
}

LandmarkSet jitter_landmarks(const SyntheticWorldConfig& config, const LandmarkSet& canonical,
                             Rng& rng) {
    const double s = px_scale(config);
    const double margin = kJitterMargin * s;
    const double w1 = config.image_width - 1.0;
    const double h1 = config.image_height - 1.0;
    LandmarkSet lm;
    lm.schema_id = canonical.schema_id;
    lm.points.reserve(canonical.points.size());
    for (const auto& p : canonical.points) {
        Point2 q{p.x + config.landmark_jitter * rng.gaussian(),
                 p.y + config.landmark_jitter * rng.gaussian()};
        q.x = clamp(q.x, margin, w1 - margin);
        q.y = clamp(q.y, margin, h1 - margin);
        lm.points.push_back(q);
    }
    return lm;
}

}  // namespace

void SyntheticWorldConfig::validate() const {
    std::ostringstream bad;
    if (dimension == 0) bad << " dimension";
    if (n_subjects <= 0) bad << " n_subjects";
    if (!(class_spread > 0.0)) bad << " class_spread";
    if (!(population_spread > class_spread)) bad << " population_spread";
    if (image_width < 16 || image_height < 16) bad << " image_size";
    if (channels != 1 && channels != 3) bad << " channels";
    if (landmark_jitter < 0.0) bad << " landmark_jitter";
    if (ad_diversity <= 0.0) bad << " ad_diversity";
    if (!bad.str().empty())
        throw ConfigError("invalid synthetic world config:" + bad.str());
}

std::size_t synthetic_schema_size() { return kSchemaN; }

SubjectModel synth_subject(const SyntheticWorldConfig& config, int subject_id) {
    if (subject_id < 0 || subject_id >= config.n_subjects) {
        std::ostringstream os;
        os << "subject id " << subject_id << " out of range [0," << config.n_subjects << ")";
        throw ConfigError(os.str());
    }
    Rng rng(derive_seed(config.rng_seed, "subject", static_cast<std::uint64_t>(subject_id)));
    SubjectModel m = make_identity(config, rng, config.population_spread);
    m.id = subject_id;
    return m;
}

Presentation sample_presentation(const SyntheticWorldConfig& config, const SubjectModel& subject,
                                 Rng& rng) {
    LandmarkSet lm = jitter_landmarks(config, subject.canonical_landmarks, rng);
    const double flat = config.class_spread * kWobbleFlat * rng.gaussian();
    double amps[kBasisN], phases[kBasisN];
    for (int k = 0; k < kBasisN; ++k) {
        amps[k] = config.class_spread * kWobbleField * rng.gaussian();
        phases[k] = rng.uniform(0.0, 6.283185307179586);
    }
    FaceImage img = render(config, subject, lm, flat, amps, phases, &rng);
    return {std::move(img), std::move(lm)};
}

Presentation render_canonical(const SyntheticWorldConfig& config, const SubjectModel& subject) {
    FaceImage img = render(config, subject, subject.canonical_landmarks, 0.0, nullptr, nullptr, nullptr);
    return {std::move(img), subject.canonical_landmarks};
}

Presentation sample_key_face(const SyntheticWorldConfig& config, Rng& rng) {
    const double dispersion = config.population_spread * config.ad_diversity;
    SubjectModel m = make_identity(config, rng, dispersion);
    m.id = -1;
    m.radius_scale = kKeyFaceRadiusScale;
    return render_canonical(config, m);
}

SyntheticWorld::SyntheticWorld(SyntheticWorldConfig config) : config_(config) {
    config_.validate();
    subjects_.reserve(config_.n_subjects);
    for (int i = 0; i < config_.n_subjects; ++i) subjects_.push_back(synth_subject(config_, i));
    extractor_ = ExtractorRegistry::instance().make(
        "synthetic-linear", derive_seed(config_.rng_seed, "extractor"), config_.image_width,
        config_.image_height, config_.channels, config_.dimension);
}

const SubjectModel& SyntheticWorld::subject(int id) const {
    if (id < 0 || id >= static_cast<int>(subjects_.size()))
        throw ConfigError("subject id out of range");
    return subjects_[id];
}

}  // namespace otb
