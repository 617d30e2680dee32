#include "ssvep/reference.hpp"

#include "ssvep/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ssvep {

ReferenceTemplate build_template(double frequency_hz, int n_harmonics, double fs, Eigen::Index n_samples)
{
    if (!(fs > 0.0) || !std::isfinite(fs))
        fail(ErrorKind::invalid_input, "build_template: sampling rate must be positive");
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
        fail(ErrorKind::invalid_input, "build_template: frequency must be positive");
    if (n_harmonics < 1)
        fail(ErrorKind::invalid_input, "build_template: need at least one harmonic");
    if (n_samples < 2)
        fail(ErrorKind::invalid_input, "build_template: need at least 2 samples");
    if (!(frequency_hz * n_harmonics < fs / 2.0)) {
        std::ostringstream msg;
        msg << "build_template: harmonic " << n_harmonics << " of " << frequency_hz << " Hz is at or above Nyquist ("
            << fs / 2.0 << " Hz)";
        fail(ErrorKind::aliasing, msg.str());
    }

    ReferenceTemplate out;
    out.frequency_hz = frequency_hz;
    out.n_harmonics = n_harmonics;
    out.fs = fs;
    out.matrix.resize(n_samples, 2 * n_harmonics);
    for (int k = 1; k <= n_harmonics; ++k) {
        const double omega = 2.0 * std::numbers::pi * k * frequency_hz;
        for (Eigen::Index i = 0; i < n_samples; ++i) {
            const double t = static_cast<double>(i) / fs;
            out.matrix(i, 2 * (k - 1)) = std::sin(omega * t);
            out.matrix(i, 2 * (k - 1) + 1) = std::cos(omega * t);
        }
    }
    return out;
}

ReferenceDictionary build_dictionary(std::span<const double> frequencies_hz,
                                     int n_harmonics,
                                     double fs,
                                     Eigen::Index n_samples)
{
    if (frequencies_hz.empty())
        fail(ErrorKind::invalid_input, "build_dictionary: no frequencies");
    for (std::size_t i = 0; i < frequencies_hz.size(); ++i)
        for (std::size_t j = i + 1; j < frequencies_hz.size(); ++j)
            if (frequencies_hz[i] == frequencies_hz[j]) {
                std::ostringstream msg;
                msg << "build_dictionary: duplicate frequency " << frequencies_hz[i] << " Hz";
                fail(ErrorKind::invalid_input, msg.str());
            }

    ReferenceDictionary out;
    out.frequencies_hz.assign(frequencies_hz.begin(), frequencies_hz.end());
    out.n_harmonics = n_harmonics;
    out.fs = fs;
    const Eigen::Index width = 2 * n_harmonics;
    out.matrix.resize(n_samples, width * static_cast<Eigen::Index>(frequencies_hz.size()));
    for (std::size_t s = 0; s < frequencies_hz.size(); ++s)
        out.matrix.middleCols(static_cast<Eigen::Index>(s) * width, width) =
            build_template(frequencies_hz[s], n_harmonics, fs, n_samples).matrix;
    return out;
}

ReferenceTemplate ReferenceDictionary::template_of(int stimulus) const
{
    if (stimulus < 0 || stimulus >= n_stimuli())
        fail(ErrorKind::out_of_range, "ReferenceDictionary::template_of: stimulus index out of range");
    ReferenceTemplate out;
    out.frequency_hz = frequencies_hz[static_cast<std::size_t>(stimulus)];
    out.n_harmonics = n_harmonics;
    out.fs = fs;
    out.matrix = matrix.middleCols(static_cast<Eigen::Index>(stimulus) * 2 * n_harmonics, 2 * n_harmonics);
    return out;
}

} // namespace ssvep
