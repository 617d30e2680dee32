#include "commands.hpp"

#include "ssvep/dataio.hpp"
#include "ssvep/error.hpp"
#include "ssvep/eval.hpp"
#include "ssvep/linalg.hpp"
#include "ssvep/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace ssvep::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct Common {
    int threads = 0;
    int n_harmonics = kDefaultHarmonics;
    double ard_tol = ArdConfig{}.tol;
    int ard_max_iters = ArdConfig{}.max_iters;
    std::string test_filtering = "class-specific";
    bool identity_filter = false;
};

struct SynthArgs {
    std::string out;
    std::vector<double> freqs = SynthConfig{}.frequencies_hz;
    double fs = SynthConfig{}.fs;
    int channels = SynthConfig{}.n_channels;
    int blocks = SynthConfig{}.n_blocks;
    double duration = SynthConfig{}.duration_s;
    double latency = SynthConfig{}.latency_s;
    int nh_signal = SynthConfig{}.n_harmonics;
    double snr_db = SynthConfig{}.snr_db;
    std::string noise = "none";
    double shared_fraction = SynthConfig{}.shared_fraction;
    double phase_jitter = SynthConfig{}.phase_jitter_rad;
    std::uint64_t mixing_seed = SynthConfig{}.mixing_seed;
    std::uint64_t noise_seed = SynthConfig{}.noise_seed;
    std::int64_t shuffle_seed = -1;
};

struct ConvertArgs {
    std::string csv_dir;
    std::string manifest;
    std::string out;
};

struct TrainArgs {
    std::string data;
    std::string method = "adtrca";
    double tw = 1.0;
    std::string channels;
    std::string out;
};

struct ClassifyArgs {
    std::string model;
    std::string data;
    std::string out;
};

struct BenchArgs {
    std::vector<std::string> data;
    std::string methods = "cca,trca,trca-ensemble,adtrca,adtrca-ensemble";
    std::string tw = "0.5:4:0.5";
    std::vector<std::string> channels;
    std::string n_train;
    std::uint64_t seed = 0;
    double gaze_shift = 0.0;
    std::string out;
    bool strict_residuals = false;
};

struct ItrArgs {
    int k = 0;
    double p = 0.0;
    double t = 0.0;
};

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

TestFiltering parse_test_filtering(const std::string& name)
{
    if (name == "class-specific")
        return TestFiltering::class_specific;
    if (name == "shared-mean")
        return TestFiltering::shared_mean;
    fail(ErrorKind::configuration, "unknown test filtering '" + name + "' (expected class-specific, shared-mean)");
}

RecognizerConfig recognizer_config(const Common& c)
{
    if (c.n_harmonics < 1)
        fail(ErrorKind::configuration, "--nh must be at least 1");
    if (!(c.ard_tol > 0.0))
        fail(ErrorKind::configuration, "--ard-tol must be positive");
    if (c.ard_max_iters < 1)
        fail(ErrorKind::configuration, "--ard-max-iters must be at least 1");
    RecognizerConfig r;
    r.n_harmonics = c.n_harmonics;
    r.ard.tol = c.ard_tol;
    r.ard.max_iters = c.ard_max_iters;
    r.test_filtering = parse_test_filtering(c.test_filtering);
    r.identity_filter = c.identity_filter;
    return r;
}

json recognizer_json(const RecognizerConfig& r)
{
    json j;
    j["n_harmonics"] = r.n_harmonics;
    j["ard_tol"] = r.ard.tol;
    j["ard_max_iters"] = r.ard.max_iters;
    j["ard_a_init"] = r.ard.a_init;
    j["ard_prune_threshold"] = r.ard.prune_threshold;
    j["test_filtering"] = r.test_filtering == TestFiltering::shared_mean ? "shared-mean" : "class-specific";
    j["identity_filter"] = r.identity_filter;
    return j;
}

json run_metadata(const std::string& command, std::span<const std::string> args, json config)
{
    json j;
    j["command"] = command;
    j["argv"] = std::vector<std::string>(args.begin(), args.end());
    j["config"] = std::move(config);
    json versions;
    versions["ssvep"] = kToolVersion;
    versions["dataset_format"] = kDatasetFormatVersion;
    versions["model_format"] = kModelFormatVersion;
    versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    j["versions"] = versions;
    const auto audit = linalg::residual_audit();
    j["gen_eig_audit"] = {{"solves", audit.solves},
                          {"violations", audit.violations},
                          {"worst_relative_residual", audit.worst_relative_residual}};
    return j;
}

void write_run_json(const fs::path& dir, const json& meta)
{
    write_file_atomic(dir / "run.json", meta.dump(2) + "\n");
}

std::string fmt(double v, const char* spec = "%.6f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

Dataset select_for_model(const Dataset& ds, const std::vector<std::string>& channels)
{
    return channels.empty() ? ds : select_channels(ds, channels);
}

int cmd_synth(const SynthArgs& a, std::span<const std::string> args, std::ostream& out)
{
    SynthConfig c;
    c.frequencies_hz = a.freqs;
    c.fs = a.fs;
    c.n_channels = a.channels;
    c.n_blocks = a.blocks;
    c.duration_s = a.duration;
    c.latency_s = a.latency;
    c.n_harmonics = a.nh_signal;
    c.snr_db = a.snr_db;
    c.noise = parse_structured_noise(a.noise);
    c.shared_fraction = a.shared_fraction;
    c.phase_jitter_rad = a.phase_jitter;
    c.mixing_seed = a.mixing_seed;
    c.noise_seed = a.noise_seed;

    Dataset ds = generate(c);
    if (a.shuffle_seed >= 0)
        ds = shuffle_labels(ds, static_cast<std::uint64_t>(a.shuffle_seed));
    save_dataset(ds, a.out);

    json cfg;
    cfg["frequencies_hz"] = c.frequencies_hz;
    cfg["fs"] = c.fs;
    cfg["n_channels"] = c.n_channels;
    cfg["n_blocks"] = c.n_blocks;
    cfg["duration_s"] = c.duration_s;
    cfg["latency_s"] = c.latency_s;
    cfg["n_harmonics"] = c.n_harmonics;
    cfg["snr_db"] = c.snr_db;
    cfg["noise"] = to_string(c.noise);
    cfg["shared_fraction"] = c.shared_fraction;
    cfg["phase_jitter_rad"] = c.phase_jitter_rad;
    cfg["mixing_seed"] = c.mixing_seed;
    cfg["noise_seed"] = c.noise_seed;
    cfg["shuffle_seed"] = a.shuffle_seed >= 0 ? json(a.shuffle_seed) : json(nullptr);
    write_run_json(a.out, run_metadata("synth", args, cfg));

    out << "wrote " << ds.trials().size() << " trials (" << ds.n_blocks() << " blocks x " << ds.n_stimuli()
        << " targets x " << ds.n_channels() << " channels x " << ds.n_samples() << " samples) to " << a.out << "\n";
    return 0;
}

int cmd_convert(const ConvertArgs& a, std::span<const std::string> args, std::ostream& out)
{
    const DatasetManifest manifest = read_manifest(a.manifest);
    const Dataset ds = import_csv(a.csv_dir, manifest);
    save_dataset(ds, a.out);
    json cfg;
    cfg["csv_dir"] = a.csv_dir;
    cfg["manifest"] = a.manifest;
    write_run_json(a.out, run_metadata("convert", args, cfg));
    out << "converted " << ds.trials().size() << " trials to " << a.out << "\n";
    return 0;
}

int cmd_train(const TrainArgs& a, const Common& common, std::span<const std::string> args, std::ostream& out)
{
    const RecognizerConfig rc = recognizer_config(common);
    const Method method = parse_method(a.method);
    if (!(a.tw > 0.0))
        fail(ErrorKind::configuration, "--tw must be positive");
    const Dataset ds = load_dataset(a.data);
    const std::vector<std::string> channels = split(a.channels, ',');
    const Dataset train = extract_windows(select_for_model(ds, channels), a.tw);

    ModelFile file;
    file.info.method = method;
    file.info.fs = train.sampling_rate_hz();
    file.info.frequencies_hz = train.stimulus_frequencies_hz();
    file.info.channel_names = train.channel_names();
    file.info.window_s = a.tw;
    file.info.n_harmonics = rc.n_harmonics;
    file.config = rc;
    file.model = fit_model(train, method, rc, Execution::parallel);

    const fs::path dir = a.out;
    save_model(file, dir / "model.ssvf");
    json cfg;
    cfg["data"] = a.data;
    cfg["method"] = std::string(method_name(method));
    cfg["tw_s"] = a.tw;
    cfg["channels"] = train.channel_names();
    cfg["recognizer"] = recognizer_json(rc);
    cfg["threads"] = worker_count();
    write_run_json(dir, run_metadata("train", args, cfg));
    out << "trained " << method_name(method) << " on " << train.trials().size() << " trials, " << train.n_channels()
        << " channels, " << a.tw << " s windows -> " << (dir / "model.ssvf").string() << "\n";
    return 0;
}

int cmd_classify(const ClassifyArgs& a, std::span<const std::string> args, std::ostream& out)
{
    const ModelFile file = load_model(a.model);
    const Dataset ds = load_dataset(a.data);
    if (ds.stimulus_frequencies_hz() != file.info.frequencies_hz)
        fail(ErrorKind::configuration, "classify: dataset stimulus frequencies differ from the model's");
    if (ds.sampling_rate_hz() != file.info.fs)
        fail(ErrorKind::configuration, "classify: dataset sampling rate differs from the model's");
    const Dataset test = extract_windows(select_channels(ds, file.info.channel_names), file.info.window_s);

    const auto results = classify_all(file.model, file.info, test.trials(), Execution::parallel);
    std::string csv = "block,truth,prediction";
    for (int s = 0; s < test.n_stimuli(); ++s)
        csv += ",feature_" + std::to_string(s);
    csv += '\n';
    std::size_t correct = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Trial& t = test.trials()[i];
        csv += std::to_string(t.block) + "," + std::to_string(t.stimulus) + "," + std::to_string(results[i].predicted);
        for (Eigen::Index s = 0; s < results[i].features.size(); ++s)
            csv += "," + fmt(results[i].features(s), "%.10f");
        csv += '\n';
        correct += results[i].predicted == t.stimulus ? 1 : 0;
    }
    const fs::path dir = a.out;
    write_file_atomic(dir / "predictions.csv", csv);
    json cfg;
    cfg["model"] = a.model;
    cfg["data"] = a.data;
    cfg["method"] = std::string(method_name(file.info.method));
    write_run_json(dir, run_metadata("classify", args, cfg));

    const double acc = results.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(results.size());
    out << method_name(file.info.method) << ": " << correct << "/" << results.size() << " correct (accuracy "
        << fmt(acc, "%.4f") << ")\n";
    return 0;
}

int cmd_bench(const BenchArgs& a, const Common& common, std::span<const std::string> args, std::ostream& out)
{
    BenchConfig cfg;
    cfg.recognizer = recognizer_config(common);
    cfg.seed = a.seed;
    cfg.gaze_shift_s = a.gaze_shift;
    cfg.exec = Execution::parallel;

    std::vector<Method> methods;
    for (const std::string& m : split(a.methods, ','))
        methods.push_back(parse_method(m));
    if (methods.empty())
        fail(ErrorKind::configuration, "--methods is empty");
    const std::vector<double> tw_grid = parse_grid(a.tw);

    std::vector<ChannelSet> channel_sets;
    for (const std::string& spec : a.channels) {
        ChannelSet set;
        if (spec == "all") {
            set.label = "all";
        } else {
            set.names = split(spec, ',');
            if (set.names.empty())
                fail(ErrorKind::configuration, "--channels entry is empty");
            for (std::size_t i = 0; i < set.names.size(); ++i)
                set.label += (i ? "+" : "") + set.names[i];
        }
        channel_sets.push_back(std::move(set));
    }
    if (channel_sets.empty())
        channel_sets.push_back({"all", {}});

    linalg::reset_residual_audit();
    const bool strict_before = linalg::strict_residual_checks();
    linalg::set_strict_residual_checks(a.strict_residuals || strict_before);

    std::vector<BenchReport> reports;
    std::vector<std::string> subjects;
    try {
        for (const std::string& path : a.data) {
            const Dataset ds = load_dataset(path);
            std::vector<int> n_train;
            if (a.n_train.empty()) {
                n_train.push_back(ds.n_blocks() - 1);
            } else {
                for (double v : parse_grid(a.n_train)) {
                    if (v != static_cast<double>(static_cast<int>(v)))
                        fail(ErrorKind::configuration, "--n-train values must be integers");
                    n_train.push_back(static_cast<int>(v));
                }
            }
            std::string subject = fs::path(path).lexically_normal().filename().string();
            if (subject.empty())
                subject = fs::path(path).lexically_normal().parent_path().filename().string();
            subjects.push_back(subject);
            reports.push_back(run_benchmark(ds, methods, tw_grid, channel_sets, n_train, cfg, subject));
        }
    } catch (...) {
        linalg::set_strict_residual_checks(strict_before);
        throw;
    }
    linalg::set_strict_residual_checks(strict_before);
    const BenchReport report = merge_reports(reports);

    std::ostringstream folds, curve, predictions, summary;
    write_folds_csv(report, folds);
    write_curve_csv(report, curve);
    write_predictions_csv(report, predictions);
    write_summary_json(report, summary);

    const fs::path dir = a.out;
    write_file_atomic(dir / "folds.csv", folds.str());
    write_file_atomic(dir / "curve.csv", curve.str());
    write_file_atomic(dir / "predictions.csv", predictions.str());
    write_file_atomic(dir / "summary.json", summary.str());

    json meta;
    meta["data"] = a.data;
    meta["subjects"] = subjects;
    json ms = json::array();
    for (Method m : methods)
        ms.push_back(std::string(method_name(m)));
    meta["methods"] = ms;
    meta["tw_grid_s"] = tw_grid;
    json cs = json::array();
    for (const ChannelSet& set : channel_sets)
        cs.push_back({{"label", set.label}, {"names", set.names}});
    meta["channel_sets"] = cs;
    meta["n_train"] = a.n_train.empty() ? json("n_blocks - 1") : json(a.n_train);
    meta["seed"] = a.seed;
    meta["gaze_shift_s"] = a.gaze_shift;
    meta["itr_time"] = "window length + gaze shift";
    meta["recognizer"] = recognizer_json(cfg.recognizer);
    write_run_json(dir, run_metadata("bench", args, meta));

    out << "method            channels   n_train   tw_s   accuracy        itr (bits/min)\n";
    for (const CellSummary& s : report.summarize()) {
        char line[160];
        std::snprintf(line, sizeof line, "%-17s %-10s %7d %6.2f   %.4f+-%.4f   %8.3f+-%.3f\n",
                      std::string(method_name(s.method)).c_str(), s.channel_set.c_str(), s.n_train, s.tw,
                      s.mean_accuracy, s.sd_accuracy, s.mean_itr, s.sd_itr);
        out << line;
    }
    out << "results in " << dir.string() << "\n";
    return 0;
}

int cmd_itr(const ItrArgs& a, std::ostream& out)
{
    out << fmt(itr(a.k, a.p, a.t), "%.3f") << "\n";
    return 0;
}

void add_common(CLI::App* sub, Common& c, bool with_recognizer)
{
    sub->add_option("--threads", c.threads, "Worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);
    if (!with_recognizer)
        return;
    sub->add_option("--nh", c.n_harmonics, "Harmonics in the sinusoid reference dictionary")->capture_default_str();
    sub->add_option("--ard-tol", c.ard_tol, "ARD convergence tolerance")->capture_default_str();
    sub->add_option("--ard-max-iters", c.ard_max_iters, "ARD iteration cap")->capture_default_str();
    sub->add_option("--test-filtering", c.test_filtering, "class-specific or shared-mean")->capture_default_str();
    sub->add_flag("--debug-identity-filter", c.identity_filter, "Force identity temporal filters in adTRCA");
}

} // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"SSVEP frequency recognition: CCA, TRCA and adaptive TRCA"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Common common;
    SynthArgs synth;
    ConvertArgs convert;
    TrainArgs train;
    ClassifyArgs classify_args;
    BenchArgs bench;
    ItrArgs itr_args;

    auto* s = app.add_subcommand("synth", "Generate a synthetic SSVEP dataset");
    s->add_option("--out", synth.out, "Output dataset directory")->required();
    s->add_option("--freqs", synth.freqs, "Stimulus frequencies (Hz)")->delimiter(',')->capture_default_str();
    s->add_option("--fs", synth.fs, "Sampling rate (Hz)")->capture_default_str();
    s->add_option("--n-channels", synth.channels, "Channel count")->capture_default_str();
    s->add_option("--blocks", synth.blocks, "Block count")->capture_default_str();
    s->add_option("--duration", synth.duration, "Response duration per trial (s)")->capture_default_str();
    s->add_option("--latency", synth.latency, "Lead-in before the response (s)")->capture_default_str();
    s->add_option("--nh-signal", synth.nh_signal, "Harmonics in the simulated response")->capture_default_str();
    s->add_option("--snr-db", synth.snr_db, "Signal-to-noise ratio (dB)")->capture_default_str();
    s->add_option("--noise", synth.noise, "none, pink or shared-profile")->capture_default_str();
    s->add_option("--shared-fraction", synth.shared_fraction, "Noise power share of the shared profile")
        ->capture_default_str();
    s->add_option("--phase-jitter", synth.phase_jitter, "Per-block phase jitter bound (rad)")->capture_default_str();
    s->add_option("--mixing-seed", synth.mixing_seed, "Seed for mixing matrix and class phases")->capture_default_str();
    s->add_option("--noise-seed", synth.noise_seed, "Seed for noise and block jitter")->capture_default_str();
    s->add_option("--shuffle-labels", synth.shuffle_seed, "Permute labels within blocks using this seed");
    add_common(s, common, false);

    auto* c = app.add_subcommand("convert", "Import block{b}_target{t}.csv files into a dataset directory");
    c->add_option("--csv-dir", convert.csv_dir, "Directory of CSV files")->required()->check(CLI::ExistingDirectory);
    c->add_option("--manifest", convert.manifest, "Manifest JSON describing the CSVs")->required()->check(CLI::ExistingFile);
    c->add_option("--out", convert.out, "Output dataset directory")->required();
    add_common(c, common, false);

    auto* t = app.add_subcommand("train", "Fit a recognizer on every block of a dataset");
    t->add_option("--data", train.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    t->add_option("--method", train.method, "cca, trca, trca-ensemble, adtrca, adtrca-ensemble")->capture_default_str();
    t->add_option("--tw", train.tw, "Window length (s)")->capture_default_str();
    t->add_option("--channels", train.channels, "Comma-separated channel names (default all)");
    t->add_option("--out", train.out, "Output directory")->required();
    add_common(t, common, true);

    auto* k = app.add_subcommand("classify", "Classify a dataset with a saved model");
    k->add_option("--model", classify_args.model, "Model file")->required()->check(CLI::ExistingFile);
    k->add_option("--data", classify_args.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    k->add_option("--out", classify_args.out, "Output directory")->required();
    add_common(k, common, false);

    auto* b = app.add_subcommand("bench", "Leave-one-block-out benchmark over methods and grids");
    b->add_option("--data", bench.data, "Dataset directories, one per subject")->required()->check(CLI::ExistingDirectory);
    b->add_option("--methods", bench.methods, "Comma-separated methods")->capture_default_str();
    b->add_option("--tw", bench.tw, "Window grid, start:stop:step or a comma list")->capture_default_str();
    b->add_option("--channels", bench.channels, "Channel set, comma-separated or 'all' (repeatable)");
    b->add_option("--n-train", bench.n_train, "Training block counts (default n_blocks - 1)");
    b->add_option("--seed", bench.seed, "Seed for training-block subsampling")->capture_default_str();
    b->add_option("--gaze-shift", bench.gaze_shift, "Seconds added to the window for ITR")->capture_default_str();
    b->add_option("--out", bench.out, "Output directory")->required();
    b->add_flag("--strict-residuals", bench.strict_residuals, "Fail on any generalized eigen residual above 1e-8");
    add_common(b, common, true);

    auto* i = app.add_subcommand("itr", "Information transfer rate in bits/min");
    i->add_option("--k", itr_args.k, "Number of classes")->required();
    i->add_option("--p", itr_args.p, "Accuracy in [0, 1]")->required();
    i->add_option("--t", itr_args.t, "Selection time (s)")->required();

    std::vector<const char*> argv;
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        set_worker_count(common.threads);
        if (s->parsed())
            return cmd_synth(synth, args, out);
        if (c->parsed())
            return cmd_convert(convert, args, out);
        if (t->parsed())
            return cmd_train(train, common, args, out);
        if (k->parsed())
            return cmd_classify(classify_args, args, out);
        if (b->parsed())
            return cmd_bench(bench, common, args, out);
        if (i->parsed())
            return cmd_itr(itr_args, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        if (e.kind() == ErrorKind::configuration)
            err << "run with --help for usage\n";
        return e.kind() == ErrorKind::configuration ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace ssvep::app
