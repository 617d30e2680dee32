#include "ssvep/dataset.hpp"

#include "ssvep/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace ssvep {

Trial centralize(const Trial& trial)
{
    if (trial.samples.size() == 0)
        fail(ErrorKind::invalid_input, "centralize: empty trial");
    if (trial.n_samples() < 2)
        fail(ErrorKind::invalid_input, "centralize: trial needs at least 2 samples");

    Trial out = trial;
    const Vector mean = trial.samples.rowwise().mean();
    out.samples.colwise() -= mean;
    return out;
}

Eigen::Index seconds_to_samples(double seconds, double fs)
{
    if (!std::isfinite(seconds) || !std::isfinite(fs) || fs <= 0.0)
        fail(ErrorKind::invalid_input, "seconds_to_samples: non-finite time or sampling rate");
    // std::lround rounds half away from zero.
    return static_cast<Eigen::Index>(std::lround(seconds * fs));
}

Trial window(const Trial& trial, double latency_s, double duration_s, double fs)
{
    const Eigen::Index start = seconds_to_samples(latency_s, fs);
    const Eigen::Index length = seconds_to_samples(duration_s, fs);
    if (start < 0 || length < 0)
        fail(ErrorKind::out_of_range, "window: negative latency or duration");
    if (start + length > trial.n_samples()) {
        std::ostringstream msg;
        msg << "window: samples [" << start << ", " << start + length << ") exceed trial length "
            << trial.n_samples();
        fail(ErrorKind::out_of_range, msg.str());
    }
    Trial out;
    out.samples = trial.samples.middleCols(start, length);
    out.stimulus = trial.stimulus;
    out.block = trial.block;
    return out;
}

Dataset::Dataset(std::vector<Trial> trials,
                 double sampling_rate_hz,
                 std::vector<double> stimulus_frequencies_hz,
                 int n_blocks,
                 std::vector<std::string> channel_names,
                 double latency_s)
    : trials_(std::move(trials))
    , fs_(sampling_rate_hz)
    , freqs_(std::move(stimulus_frequencies_hz))
    , n_blocks_(n_blocks)
    , channels_(std::move(channel_names))
    , latency_s_(latency_s)
{
    if (!(fs_ > 0.0) || !std::isfinite(fs_))
        fail(ErrorKind::invalid_dataset, "dataset: sampling rate must be positive");
    if (freqs_.empty())
        fail(ErrorKind::invalid_dataset, "dataset: no stimulus frequencies");
    for (double f : freqs_) {
        if (!(f > 0.0) || !(f < fs_ / 2.0)) {
            std::ostringstream msg;
            msg << "dataset: stimulus frequency " << f << " Hz not in (0, " << fs_ / 2.0 << ")";
            fail(ErrorKind::invalid_dataset, msg.str());
        }
    }
    if (n_blocks_ < 0)
        fail(ErrorKind::invalid_dataset, "dataset: negative block count");
    if (channels_.empty())
        fail(ErrorKind::invalid_dataset, "dataset: no channels");
    if (latency_s_ < 0.0 || !std::isfinite(latency_s_))
        fail(ErrorKind::invalid_dataset, "dataset: latency must be non-negative");

    std::sort(trials_.begin(), trials_.end(), [](const Trial& a, const Trial& b) {
        return std::pair(a.block, a.stimulus) < std::pair(b.block, b.stimulus);
    });

    const Eigen::Index n_samples = trials_.empty() ? 0 : trials_.front().n_samples();
    for (std::size_t i = 0; i < trials_.size(); ++i) {
        const Trial& t = trials_[i];
        std::ostringstream where;
        where << "dataset: trial (block " << t.block << ", stimulus " << t.stimulus << ")";
        if (t.stimulus < 0 || t.stimulus >= n_stimuli())
            fail(ErrorKind::invalid_dataset, where.str() + " has stimulus index out of range");
        if (t.block < 0 || t.block >= n_blocks_)
            fail(ErrorKind::invalid_dataset, where.str() + " has block index out of range");
        if (t.n_channels() != n_channels())
            fail(ErrorKind::invalid_dataset, where.str() + " channel count differs from channel names");
        if (t.n_samples() != n_samples)
            fail(ErrorKind::invalid_dataset, where.str() + " sample count differs from other trials");
        if (t.n_samples() < 2)
            fail(ErrorKind::invalid_dataset, where.str() + " has fewer than 2 samples");
        if (i > 0 && trials_[i - 1].block == t.block && trials_[i - 1].stimulus == t.stimulus)
            fail(ErrorKind::invalid_dataset, where.str() + " appears more than once");
    }
}

Eigen::Index Dataset::n_samples() const noexcept
{
    return trials_.empty() ? 0 : trials_.front().n_samples();
}

const Trial* Dataset::find(int block, int stimulus) const
{
    const auto it = std::lower_bound(
        trials_.begin(), trials_.end(), std::pair(block, stimulus),
        [](const Trial& t, const std::pair<int, int>& key) { return std::pair(t.block, t.stimulus) < key; });
    if (it == trials_.end() || it->block != block || it->stimulus != stimulus)
        return nullptr;
    return &*it;
}

std::vector<const Trial*> Dataset::trials_of(int stimulus) const
{
    std::vector<const Trial*> out;
    for (const Trial& t : trials_)
        if (t.stimulus == stimulus)
            out.push_back(&t);
    return out;
}

std::vector<int> Dataset::blocks_present() const
{
    std::set<int> blocks;
    for (const Trial& t : trials_)
        blocks.insert(t.block);
    return {blocks.begin(), blocks.end()};
}

Dataset select_channels(const Dataset& dataset, std::span<const std::string> names)
{
    if (names.empty())
        fail(ErrorKind::invalid_input, "select_channels: no channels requested");

    const auto& available = dataset.channel_names();
    std::vector<Eigen::Index> rows;
    rows.reserve(names.size());
    for (const std::string& name : names) {
        const auto it = std::find(available.begin(), available.end(), name);
        if (it == available.end()) {
            std::ostringstream msg;
            msg << "select_channels: unknown channel '" << name << "'; available:";
            for (const auto& a : available)
                msg << ' ' << a;
            fail(ErrorKind::lookup, msg.str());
        }
        rows.push_back(static_cast<Eigen::Index>(it - available.begin()));
    }

    std::vector<Trial> trials;
    trials.reserve(dataset.trials().size());
    for (const Trial& t : dataset.trials()) {
        Trial s;
        s.samples = t.samples(rows, Eigen::all);
        s.stimulus = t.stimulus;
        s.block = t.block;
        trials.push_back(std::move(s));
    }
    return Dataset(std::move(trials), dataset.sampling_rate_hz(), dataset.stimulus_frequencies_hz(),
                   dataset.n_blocks(), {names.begin(), names.end()}, dataset.latency_s());
}

Dataset select_blocks(const Dataset& dataset, std::span<const int> blocks)
{
    std::vector<Trial> trials;
    for (const Trial& t : dataset.trials())
        if (std::find(blocks.begin(), blocks.end(), t.block) != blocks.end())
            trials.push_back(t);
    return Dataset(std::move(trials), dataset.sampling_rate_hz(), dataset.stimulus_frequencies_hz(),
                   dataset.n_blocks(), dataset.channel_names(), dataset.latency_s());
}

Dataset extract_windows(const Dataset& dataset, double duration_s)
{
    std::vector<Trial> trials;
    trials.reserve(dataset.trials().size());
    for (const Trial& t : dataset.trials())
        trials.push_back(centralize(window(t, dataset.latency_s(), duration_s, dataset.sampling_rate_hz())));
    return Dataset(std::move(trials), dataset.sampling_rate_hz(), dataset.stimulus_frequencies_hz(),
                   dataset.n_blocks(), dataset.channel_names(), 0.0);
}

} // namespace ssvep
