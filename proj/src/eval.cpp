#include "ssvep/eval.hpp"

#include "ssvep/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

namespace ssvep {

namespace {

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string short_num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join_ints(const std::vector<int>& v, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

double mean_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool needs(std::span<const Method> methods, Method a, Method b)
{
    return std::find(methods.begin(), methods.end(), a) != methods.end() ||
           std::find(methods.begin(), methods.end(), b) != methods.end();
}

} // namespace

std::vector<CvSplit> leave_one_block_out(const Dataset& dataset)
{
    const int n_blocks = dataset.n_blocks();
    if (n_blocks < 2)
        fail(ErrorKind::invalid_dataset, "leave_one_block_out: need at least 2 blocks, dataset has " + std::to_string(n_blocks));
    for (int b = 0; b < n_blocks; ++b)
        for (int s = 0; s < dataset.n_stimuli(); ++s)
            if (dataset.find(b, s) == nullptr) {
                std::ostringstream msg;
                msg << "leave_one_block_out: block " << b << " is missing stimulus " << s;
                fail(ErrorKind::invalid_dataset, msg.str());
            }

    std::vector<CvSplit> splits;
    for (int test = 0; test < n_blocks; ++test) {
        CvSplit split;
        split.test_block = test;
        for (int b = 0; b < n_blocks; ++b)
            if (b != test)
                split.train_blocks.push_back(b);
        splits.push_back(std::move(split));
    }
    return splits;
}

double accuracy(std::span<const int> predictions, std::span<const int> truths)
{
    if (predictions.size() != truths.size())
        fail(ErrorKind::invalid_input, "accuracy: predictions and truths differ in length");
    if (predictions.empty())
        fail(ErrorKind::invalid_input, "accuracy: no predictions");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        correct += predictions[i] == truths[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double itr(int k, double p, double t_seconds)
{
    if (k < 2)
        fail(ErrorKind::invalid_input, "itr: need at least 2 classes");
    if (!(p >= 0.0 && p <= 1.0))
        fail(ErrorKind::invalid_input, "itr: accuracy must lie in [0, 1]");
    if (!(t_seconds > 0.0) || !std::isfinite(t_seconds))
        fail(ErrorKind::invalid_input, "itr: selection time must be positive");

    const double kd = static_cast<double>(k);
    if (p <= 1.0 / kd)
        return 0.0;
    double bits = std::log2(kd) + p * std::log2(p);
    if (p < 1.0)
        bits += (1.0 - p) * std::log2((1.0 - p) / (kd - 1.0));
    return std::max(bits, 0.0) * 60.0 / t_seconds;
}

std::vector<int> sample_training_blocks(const CvSplit& split, int n_train, std::uint64_t seed, int fold)
{
    const auto available = static_cast<int>(split.train_blocks.size());
    if (n_train < 1 || n_train > available) {
        std::ostringstream msg;
        msg << "n_train " << n_train << " outside [1, " << available << "]";
        fail(ErrorKind::configuration, msg.str());
    }
    if (n_train == available)
        return split.train_blocks;

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n_train), static_cast<std::uint32_t>(fold)};
    std::mt19937_64 rng(seq);
    std::vector<int> pool = split.train_blocks;
    // Partial Fisher-Yates on raw engine output; std distributions are not
    // specified bit-for-bit across standard libraries.
    for (int i = 0; i < n_train; ++i) {
        const auto remaining = static_cast<std::uint64_t>(available - i);
        const auto j = i + static_cast<int>(rng() % remaining);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(n_train));
    std::sort(pool.begin(), pool.end());
    return pool;
}

BenchReport run_benchmark(const Dataset& dataset,
                          std::span<const Method> methods,
                          std::span<const double> tw_grid,
                          std::span<const ChannelSet> channel_sets,
                          std::span<const int> n_train_grid,
                          const BenchConfig& config,
                          const std::string& subject)
{
    if (methods.empty() || tw_grid.empty() || channel_sets.empty() || n_train_grid.empty())
        fail(ErrorKind::configuration, "run_benchmark: every grid must be non-empty");
    if (!(config.gaze_shift_s >= 0.0))
        fail(ErrorKind::configuration, "run_benchmark: gaze shift must be non-negative");

    const std::vector<CvSplit> splits = leave_one_block_out(dataset);
    const double fs = dataset.sampling_rate_hz();
    const Eigen::Index latency = seconds_to_samples(dataset.latency_s(), fs);
    for (double tw : tw_grid) {
        if (!(tw > 0.0))
            fail(ErrorKind::configuration, "run_benchmark: time windows must be positive");
        const Eigen::Index length = seconds_to_samples(tw, fs);
        if (length < 2 || latency + length > dataset.n_samples()) {
            std::ostringstream msg;
            msg << "run_benchmark: window " << tw << " s after " << dataset.latency_s() << " s latency needs "
                << latency + length << " samples, trials have " << dataset.n_samples();
            fail(ErrorKind::configuration, msg.str());
        }
    }
    for (int n : n_train_grid)
        if (n < 2 || n > dataset.n_blocks() - 1) {
            std::ostringstream msg;
            msg << "run_benchmark: n_train " << n << " outside [2, " << dataset.n_blocks() - 1 << "]";
            fail(ErrorKind::configuration, msg.str());
        }

    // Window every (channel set, tw) once; jobs only read these.
    std::vector<std::vector<Dataset>> windowed(channel_sets.size());
    for (std::size_t c = 0; c < channel_sets.size(); ++c) {
        const Dataset selected = channel_sets[c].names.empty()
                                     ? dataset
                                     : select_channels(dataset, channel_sets[c].names);
        for (double tw : tw_grid)
            windowed[c].push_back(extract_windows(selected, tw));
    }

    struct Job {
        std::size_t channel;
        std::size_t tw;
        std::size_t n_train;
        std::size_t fold;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < channel_sets.size(); ++c)
        for (std::size_t t = 0; t < tw_grid.size(); ++t)
            for (std::size_t n = 0; n < n_train_grid.size(); ++n)
                for (std::size_t f = 0; f < splits.size(); ++f)
                    jobs.push_back({c, t, n, f});

    const bool want_trca = needs(methods, Method::trca, Method::trca_ensemble);
    const bool want_adtrca = needs(methods, Method::adtrca, Method::adtrca_ensemble);
    const int k = dataset.n_stimuli();

    std::vector<std::vector<FoldResult>> results(jobs.size());
    for_each_index(config.exec, jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        const Dataset& data = windowed[job.channel][job.tw];
        const CvSplit& split = splits[job.fold];
        const int n_train = n_train_grid[job.n_train];
        const std::vector<int> train_blocks =
            sample_training_blocks(split, n_train, config.seed, static_cast<int>(job.fold));

        const std::array<int, 1> test_block{split.test_block};
        const Dataset train = select_blocks(data, train_blocks);
        const Dataset test = select_blocks(data, test_block);

        ModelInfo info;
        info.fs = fs;
        info.frequencies_hz = data.stimulus_frequencies_hz();
        info.channel_names = data.channel_names();
        info.window_s = tw_grid[job.tw];
        info.n_harmonics = config.recognizer.n_harmonics;

        FittedModel trca_model;
        FittedModel adtrca_model;
        if (want_trca)
            trca_model = fit_model(train, Method::trca, config.recognizer);
        if (want_adtrca)
            adtrca_model = fit_model(train, Method::adtrca, config.recognizer);

        std::vector<int> truths;
        for (const Trial& t : test.trials())
            truths.push_back(t.stimulus);

        for (Method method : methods) {
            info.method = method;
            const FittedModel* model = nullptr;
            const CcaModel cca;
            FittedModel cca_holder = cca;
            switch (method) {
            case Method::cca: model = &cca_holder; break;
            case Method::trca:
            case Method::trca_ensemble: model = &trca_model; break;
            case Method::adtrca:
            case Method::adtrca_ensemble: model = &adtrca_model; break;
            }

            FoldResult r;
            r.subject = subject;
            r.method = method;
            r.tw = tw_grid[job.tw];
            r.channel_set = channel_sets[job.channel].label;
            r.n_train = n_train;
            r.test_block = split.test_block;
            r.train_blocks = train_blocks;
            r.truths = truths;
            for (const Trial& t : test.trials())
                r.predictions.push_back(classify(*model, info, t).predicted);
            r.accuracy = accuracy(r.predictions, r.truths);
            r.itr = itr(k, r.accuracy, r.tw + config.gaze_shift_s);
            results[j].push_back(std::move(r));
        }
    });

    BenchReport report;
    report.n_stimuli = k;
    report.gaze_shift_s = config.gaze_shift_s;
    report.seed = config.seed;

    // Order by (method, tw, channel set, n_train, fold).
    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>;
    std::vector<std::pair<Key, FoldResult>> keyed;
    for (std::size_t j = 0; j < jobs.size(); ++j)
        for (std::size_t m = 0; m < methods.size(); ++m)
            keyed.emplace_back(Key{m, jobs[j].tw, jobs[j].channel, jobs[j].n_train, jobs[j].fold},
                               std::move(results[j][m]));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, r] : keyed)
        report.folds.push_back(std::move(r));
    return report;
}

BenchReport merge_reports(std::span<const BenchReport> reports)
{
    BenchReport out;
    if (reports.empty())
        return out;
    out.n_stimuli = reports.front().n_stimuli;
    out.gaze_shift_s = reports.front().gaze_shift_s;
    out.seed = reports.front().seed;
    for (const BenchReport& r : reports) {
        if (r.n_stimuli != out.n_stimuli || r.gaze_shift_s != out.gaze_shift_s || r.seed != out.seed)
            fail(ErrorKind::configuration, "merge_reports: reports were produced with different configurations");
        out.folds.insert(out.folds.end(), r.folds.begin(), r.folds.end());
    }
    return out;
}

std::vector<CellSummary> BenchReport::summarize() const
{
    using CellKey = std::tuple<int, double, std::string, int>;
    // Preserve first-appearance order of cells.
    std::vector<CellKey> order;
    std::map<CellKey, std::map<std::string, std::vector<const FoldResult*>>> cells;
    for (const FoldResult& f : folds) {
        const CellKey key{static_cast<int>(f.method), f.tw, f.channel_set, f.n_train};
        if (!cells.contains(key))
            order.push_back(key);
        cells[key][f.subject].push_back(&f);
    }

    std::vector<CellSummary> out;
    for (const CellKey& key : order) {
        const auto& by_subject = cells.at(key);
        CellSummary s;
        s.method = static_cast<Method>(std::get<0>(key));
        s.tw = std::get<1>(key);
        s.channel_set = std::get<2>(key);
        s.n_train = std::get<3>(key);

        std::vector<double> acc;
        std::vector<double> rate;
        if (by_subject.size() > 1) {
            s.unit = "subject";
            for (const auto& [subject, list] : by_subject) {
                std::vector<double> a;
                std::vector<double> r;
                for (const FoldResult* f : list) {
                    a.push_back(f->accuracy);
                    r.push_back(f->itr);
                }
                acc.push_back(mean_of(a));
                rate.push_back(mean_of(r));
            }
        } else {
            s.unit = "fold";
            for (const FoldResult* f : by_subject.begin()->second) {
                acc.push_back(f->accuracy);
                rate.push_back(f->itr);
            }
        }
        s.n = static_cast<int>(acc.size());
        s.mean_accuracy = mean_of(acc);
        s.sd_accuracy = sd_of(acc);
        s.mean_itr = mean_of(rate);
        s.sd_itr = sd_of(rate);
        out.push_back(std::move(s));
    }
    return out;
}

void write_folds_csv(const BenchReport& report, std::ostream& out)
{
    out << "subject,method,tw_s,channel_set,n_train,test_block,train_blocks,n_trials,accuracy,itr_bits_per_min,itr_time_s\n";
    for (const FoldResult& f : report.folds) {
        out << csv_field(f.subject) << ',' << method_name(f.method) << ',' << short_num(f.tw) << ','
            << csv_field(f.channel_set) << ',' << f.n_train << ',' << f.test_block << ',' << join_ints(f.train_blocks, ';')
            << ',' << f.predictions.size() << ',' << fixed(f.accuracy, 6) << ',' << fixed(f.itr, 6) << ','
            << short_num(f.tw + report.gaze_shift_s) << '\n';
    }
}

void write_curve_csv(const BenchReport& report, std::ostream& out)
{
    out << "method,channel_set,n_train,tw_s,mean_accuracy,sd_accuracy,mean_itr,sd_itr,n,unit\n";
    for (const CellSummary& s : report.summarize()) {
        out << method_name(s.method) << ',' << csv_field(s.channel_set) << ',' << s.n_train << ',' << short_num(s.tw)
            << ',' << fixed(s.mean_accuracy, 6) << ',' << fixed(s.sd_accuracy, 6) << ',' << fixed(s.mean_itr, 6) << ','
            << fixed(s.sd_itr, 6) << ',' << s.n << ',' << s.unit << '\n';
    }
}

void write_predictions_csv(const BenchReport& report, std::ostream& out)
{
    out << "subject,method,tw_s,channel_set,n_train,test_block,truth,prediction\n";
    for (const FoldResult& f : report.folds)
        for (std::size_t i = 0; i < f.predictions.size(); ++i)
            out << csv_field(f.subject) << ',' << method_name(f.method) << ',' << short_num(f.tw) << ','
                << csv_field(f.channel_set) << ',' << f.n_train << ',' << f.test_block << ',' << f.truths[i] << ','
                << f.predictions[i] << '\n';
}

void write_summary_json(const BenchReport& report, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["itr_time"] = "window length + gaze shift";
    j["gaze_shift_s"] = report.gaze_shift_s;
    j["seed"] = report.seed;
    j["n_stimuli"] = report.n_stimuli;
    j["n_fold_results"] = report.folds.size();
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellSummary& s : report.summarize()) {
        nlohmann::ordered_json c;
        c["method"] = method_name(s.method);
        c["tw_s"] = s.tw;
        c["channel_set"] = s.channel_set;
        c["n_train"] = s.n_train;
        c["n"] = s.n;
        c["unit"] = s.unit;
        c["mean_accuracy"] = s.mean_accuracy;
        c["sd_accuracy"] = s.sd_accuracy;
        c["mean_itr"] = s.mean_itr;
        c["sd_itr"] = s.sd_itr;
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    out << j.dump(2) << '\n';
}

std::vector<double> parse_grid(std::string_view text)
{
    auto parse_number = [&](std::string_view token) {
        double v = 0.0;
        const auto* first = token.data();
        const auto* last = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            fail(ErrorKind::configuration, "grid: cannot parse '" + std::string(token) + "' as a number");
        return v;
    };
    auto split = [](std::string_view s, char sep) {
        std::vector<std::string_view> parts;
        std::size_t pos = 0;
        while (true) {
            const auto next = s.find(sep, pos);
            parts.push_back(s.substr(pos, next - pos));
            if (next == std::string_view::npos)
                break;
            pos = next + 1;
        }
        return parts;
    };

    if (text.empty())
        fail(ErrorKind::configuration, "grid: empty specification");
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3)
            fail(ErrorKind::configuration, "grid: expected start:stop:step, got '" + std::string(text) + "'");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (!(step > 0.0) || stop < start)
            fail(ErrorKind::configuration, "grid: need step > 0 and stop >= start");
        for (int i = 0;; ++i) {
            const double v = start + i * step;
            if (v > stop + 1e-9)
                break;
            out.push_back(std::abs(v - stop) <= 1e-9 ? stop : v);
        }
    } else {
        for (std::string_view token : split(text, ','))
            out.push_back(parse_number(token));
    }
    return out;
}

} // namespace ssvep
