#include "ssvep/synth.hpp"

#include "ssvep/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace ssvep {

namespace {

const std::vector<std::string> kChannelPool{"O1", "O2", "P7", "P8", "T7", "T8", "FC5", "FC6",
                                            "F7", "F8", "F3", "F4", "AF3", "AF4"};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t tag, std::uint32_t a = 0, std::uint32_t b = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag, a, b};
    return std::mt19937_64(seq);
}

Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = normal(rng);
    return m;
}

// Paul Kellet's refined pink filter, run over each row of white noise.
Matrix pink(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    constexpr Eigen::Index burn_in = 512;
    const Matrix white = gaussian(rng, rows, cols + burn_in);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
        for (Eigen::Index t = 0; t < cols + burn_in; ++t) {
            const double w = white(r, t);
            b0 = 0.99886 * b0 + w * 0.0555179;
            b1 = 0.99332 * b1 + w * 0.0750759;
            b2 = 0.96900 * b2 + w * 0.1538520;
            b3 = 0.86650 * b3 + w * 0.3104856;
            b4 = 0.55000 * b4 + w * 0.5329522;
            b5 = -0.7616 * b5 - w * 0.0168980;
            const double p = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
            b6 = w * 0.115926;
            if (t >= burn_in)
                out(r, t - burn_in) = p;
        }
    }
    return out;
}

Matrix mixing_matrix(std::mt19937_64& rng, int n)
{
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix m = gaussian(rng, n, n);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m.col(c).normalize();
        const Eigen::JacobiSVD<Matrix> svd(m);
        const Vector sv = svd.singularValues();
        if (sv(sv.size() - 1) > 1e-2 * sv(0))
            return m;
    }
    fail(ErrorKind::numerical_failure, "synth: could not draw a well-conditioned mixing matrix");
}

// Mean over channels and samples of x^2 in columns [from, end).
double window_power(const Matrix& x, Eigen::Index from)
{
    const auto block = x.rightCols(x.cols() - from);
    return block.squaredNorm() / static_cast<double>(block.size());
}

} // namespace

void validate(const SynthConfig& c)
{
    auto bad = [](const std::string& msg) { fail(ErrorKind::configuration, "synth: " + msg); };
    if (c.frequencies_hz.size() < 2)
        bad("need at least 2 stimulus frequencies");
    if (!(c.fs > 0.0) || !std::isfinite(c.fs))
        bad("sampling rate must be positive");
    if (c.n_channels < 1)
        bad("need at least 1 channel");
    if (c.n_blocks < 1)
        bad("need at least 1 block");
    if (!(c.duration_s > 0.0) || !std::isfinite(c.duration_s))
        bad("duration must be positive");
    if (!(c.latency_s >= 0.0) || !std::isfinite(c.latency_s))
        bad("latency must be non-negative");
    if (c.n_harmonics < 1)
        bad("need at least 1 harmonic");
    if (!std::isfinite(c.snr_db))
        bad("snr_db must be finite");
    if (!(c.shared_fraction >= 0.0 && c.shared_fraction <= 1.0))
        bad("shared_fraction must lie in [0, 1]");
    if (!(c.phase_jitter_rad >= 0.0) || !std::isfinite(c.phase_jitter_rad))
        bad("phase jitter must be non-negative");
    for (double f : c.frequencies_hz) {
        if (!(f > 0.0))
            bad("stimulus frequencies must be positive");
        if (f * c.n_harmonics >= c.fs / 2.0) {
            std::ostringstream msg;
            msg << "harmonic " << c.n_harmonics << " of " << f << " Hz is not below Nyquist (" << c.fs / 2.0 << " Hz)";
            bad(msg.str());
        }
    }
    if (!c.channel_names.empty() && static_cast<int>(c.channel_names.size()) != c.n_channels)
        bad("channel_names must list n_channels names");
    if (c.channel_names.empty() && c.n_channels > static_cast<int>(kChannelPool.size()))
        bad("more than " + std::to_string(kChannelPool.size()) + " channels requires explicit channel_names");
    if (seconds_to_samples(c.duration_s, c.fs) < 2)
        bad("duration shorter than 2 samples");
}

Dataset generate(const SynthConfig& c)
{
    validate(c);

    const auto n_stim = static_cast<int>(c.frequencies_hz.size());
    const Eigen::Index lead = seconds_to_samples(c.latency_s, c.fs);
    const Eigen::Index n_samples = lead + seconds_to_samples(c.duration_s, c.fs);
    const int nh = c.n_harmonics;

    auto mix_rng = make_rng(c.mixing_seed, 0x6d6978);
    const Matrix mixing = mixing_matrix(mix_rng, c.n_channels);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Matrix class_phase(n_stim, nh);
    for (int s = 0; s < n_stim; ++s)
        for (int k = 0; k < nh; ++k)
            class_phase(s, k) = angle(mix_rng);

    Matrix block_jitter(c.n_blocks, nh);
    for (int b = 0; b < c.n_blocks; ++b) {
        auto rng = make_rng(c.noise_seed, 0x626c6b, static_cast<std::uint32_t>(b));
        std::uniform_real_distribution<double> jitter(-c.phase_jitter_rad, c.phase_jitter_rad);
        for (int k = 0; k < nh; ++k)
            block_jitter(b, k) = c.phase_jitter_rad > 0.0 ? jitter(rng) : 0.0;
    }

    // One pink waveform reused by every trial; each trial gets its own
    // random spatial pattern for it.
    Matrix profile;
    if (c.noise == StructuredNoise::shared_profile) {
        auto rng = make_rng(c.noise_seed, 0x707266);
        profile = pink(rng, 1, n_samples);
    }

    const auto n_trials = static_cast<std::size_t>(c.n_blocks) * static_cast<std::size_t>(n_stim);
    std::vector<Matrix> signal(n_trials);
    std::vector<Matrix> fresh(n_trials);
    std::vector<Matrix> structured(n_trials);
    double signal_power = 0.0;
    double fresh_power = 0.0;
    double structured_power = 0.0;
    for (int b = 0; b < c.n_blocks; ++b) {
        for (int s = 0; s < n_stim; ++s) {
            const auto idx = static_cast<std::size_t>(b) * static_cast<std::size_t>(n_stim) + static_cast<std::size_t>(s);
            Vector source = Vector::Zero(n_samples);
            const double f = c.frequencies_hz[static_cast<std::size_t>(s)];
            for (Eigen::Index t = lead; t < n_samples; ++t) {
                const double time = static_cast<double>(t - lead) / c.fs;
                double v = 0.0;
                for (int k = 1; k <= nh; ++k)
                    v += std::sin(2.0 * std::numbers::pi * k * f * time + class_phase(s, k - 1) + block_jitter(b, k - 1)) / k;
                source(t) = v;
            }
            signal[idx] = mixing.col(0) * source.transpose();

            auto rng = make_rng(c.noise_seed, 0x747269, static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(s));
            fresh[idx] = c.noise == StructuredNoise::pink ? pink(rng, c.n_channels, n_samples)
                                                          : gaussian(rng, c.n_channels, n_samples);
            if (c.noise == StructuredNoise::shared_profile) {
                structured[idx] = gaussian(rng, c.n_channels, 1) * profile;
                structured_power += window_power(structured[idx], lead);
            }
            signal_power += window_power(signal[idx], lead);
            fresh_power += window_power(fresh[idx], lead);
        }
    }
    signal_power /= static_cast<double>(n_trials);
    fresh_power /= static_cast<double>(n_trials);
    structured_power /= static_cast<double>(n_trials);

    const double noise_power = signal_power / std::pow(10.0, c.snr_db / 10.0);
    double fresh_gain = std::sqrt(noise_power / fresh_power);
    double profile_gain = 0.0;
    if (c.noise == StructuredNoise::shared_profile) {
        fresh_gain *= std::sqrt(1.0 - c.shared_fraction);
        profile_gain = std::sqrt(noise_power * c.shared_fraction / structured_power);
        // The two parts are not exactly orthogonal in a finite sample.
        double combined = 0.0;
        for (std::size_t i = 0; i < n_trials; ++i)
            combined += window_power(fresh_gain * fresh[i] + profile_gain * structured[i], lead);
        const double correction = std::sqrt(noise_power * static_cast<double>(n_trials) / combined);
        fresh_gain *= correction;
        profile_gain *= correction;
    }

    std::vector<Trial> trials;
    trials.reserve(n_trials);
    for (int b = 0; b < c.n_blocks; ++b) {
        for (int s = 0; s < n_stim; ++s) {
            const auto idx = static_cast<std::size_t>(b) * static_cast<std::size_t>(n_stim) + static_cast<std::size_t>(s);
            Matrix x = signal[idx] + fresh_gain * fresh[idx];
            if (profile_gain > 0.0)
                x += profile_gain * structured[idx];
            x = x.cast<float>().cast<double>();
            trials.push_back({std::move(x), s, b});
        }
    }

    std::vector<std::string> names = c.channel_names;
    if (names.empty())
        names.assign(kChannelPool.begin(), kChannelPool.begin() + c.n_channels);
    return Dataset(std::move(trials), c.fs, c.frequencies_hz, c.n_blocks, std::move(names), c.latency_s);
}

Dataset shuffle_labels(const Dataset& dataset, std::uint64_t seed)
{
    std::map<int, std::vector<std::size_t>> by_block;
    const auto& trials = dataset.trials();
    for (std::size_t i = 0; i < trials.size(); ++i)
        by_block[trials[i].block].push_back(i);

    std::vector<Trial> out = trials;
    for (const auto& [block, indices] : by_block) {
        std::vector<int> labels;
        for (std::size_t i : indices)
            labels.push_back(trials[i].stimulus);
        auto rng = make_rng(seed, 0x73686c, static_cast<std::uint32_t>(block));
        std::shuffle(labels.begin(), labels.end(), rng);
        for (std::size_t j = 0; j < indices.size(); ++j)
            out[indices[j]].stimulus = labels[j];
    }
    return Dataset(std::move(out), dataset.sampling_rate_hz(), dataset.stimulus_frequencies_hz(), dataset.n_blocks(),
                   dataset.channel_names(), dataset.latency_s());
}

StructuredNoise parse_structured_noise(const std::string& name)
{
    if (name == "none" || name == "white")
        return StructuredNoise::none;
    if (name == "pink")
        return StructuredNoise::pink;
    if (name == "shared-profile")
        return StructuredNoise::shared_profile;
    fail(ErrorKind::configuration, "unknown noise kind '" + name + "' (expected none, pink, shared-profile)");
}

std::string to_string(StructuredNoise noise)
{
    switch (noise) {
    case StructuredNoise::none: return "none";
    case StructuredNoise::pink: return "pink";
    case StructuredNoise::shared_profile: return "shared-profile";
    }
    return "none";
}

} // namespace ssvep
