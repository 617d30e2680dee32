#include "ssvep/dataio.hpp"
#include "ssvep/error.hpp"
#include "ssvep/recognizer.hpp"
#include "ssvep/synth.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace ssvep;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

void expect_same(const Dataset& a, const Dataset& b)
{
    ASSERT_EQ(a.trials().size(), b.trials().size());
    EXPECT_EQ(a.channel_names(), b.channel_names());
    EXPECT_EQ(a.stimulus_frequencies_hz(), b.stimulus_frequencies_hz());
    EXPECT_EQ(a.sampling_rate_hz(), b.sampling_rate_hz());
    EXPECT_EQ(a.latency_s(), b.latency_s());
    for (std::size_t i = 0; i < a.trials().size(); ++i) {
        EXPECT_EQ(a.trials()[i].block, b.trials()[i].block);
        EXPECT_EQ(a.trials()[i].stimulus, b.trials()[i].stimulus);
        EXPECT_EQ(a.trials()[i].samples, b.trials()[i].samples);
    }
}

DatasetManifest import_manifest(const Dataset& ds)
{
    DatasetManifest m;
    m.sampling_rate_hz = ds.sampling_rate_hz();
    m.stimulus_frequencies_hz = ds.stimulus_frequencies_hz();
    m.channel_names = ds.channel_names();
    m.n_blocks = ds.n_blocks();
    m.n_targets = ds.n_stimuli();
    m.latency_s = ds.latency_s();
    return m;
}

} // namespace

TEST(DatasetIo, RoundTripIsBitwise)
{
    TempDir dir("rt");
    SynthConfig c = testing_support::small_config(1);
    c.latency_s = 0.25;
    const Dataset ds = generate(c);
    save_dataset(ds, dir.path() / "d");
    expect_same(ds, load_dataset(dir.path() / "d"));
    EXPECT_EQ(fs::file_size(dir.path() / "d" / "tensor.f32"),
              static_cast<std::uintmax_t>(4 * 5 * 4 * ds.n_samples() * 4));
}

TEST(DatasetIo, MissingCellsRoundTrip)
{
    TempDir dir("missing");
    const Dataset full = generate(testing_support::small_config(2));
    std::vector<Trial> trials;
    for (const Trial& t : full.trials())
        if (!(t.block == 2 && t.stimulus == 1))
            trials.push_back(t);
    const Dataset ds(trials, full.sampling_rate_hz(), full.stimulus_frequencies_hz(), 4, full.channel_names());
    save_dataset(ds, dir.path());
    const DatasetManifest m = read_manifest(dir.path() / "manifest.json");
    ASSERT_EQ(m.missing_cells.size(), 1u);
    EXPECT_EQ(m.missing_cells[0], (std::pair<int, int>{2, 1}));
    const Dataset back = load_dataset(dir.path());
    expect_same(ds, back);
    EXPECT_EQ(back.find(2, 1), nullptr);
}

TEST(DatasetIo, TruncatedTensor)
{
    TempDir dir("trunc");
    save_dataset(generate(testing_support::small_config(3)), dir.path());
    const fs::path tensor = dir.path() / "tensor.f32";
    fs::resize_file(tensor, fs::file_size(tensor) - 4);
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::corrupt_file);
}

TEST(DatasetIo, ManifestErrors)
{
    TempDir dir("manifest");
    save_dataset(generate(testing_support::small_config(4)), dir.path());
    const fs::path file = dir.path() / "manifest.json";
    const std::string good = slurp(file);

    std::string v2 = good;
    v2.replace(v2.find("\"format_version\": 1"), 19, "\"format_version\": 2");
    spit(file, v2);
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::version);

    std::string big_endian = good;
    big_endian.replace(big_endian.find("\"little\""), 8, "\"big\"");
    spit(file, big_endian);
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::version);

    spit(file, "{ not json");
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::parse);

    spit(file, R"({"format_version": 1})");
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::parse);

    fs::remove(file);
    EXPECT_SSVEP_ERROR(load_dataset(dir.path()), ErrorKind::io);
}

TEST(CsvImport, MatchesBinaryRoundTrip)
{
    TempDir dir("csv");
    const Dataset ds = generate(testing_support::small_config(5, 3, 2));
    for (const Trial& t : ds.trials())
        export_trial_csv(t, ds.channel_names(),
                         dir.path() / ("block" + std::to_string(t.block) + "_target" + std::to_string(t.stimulus) + ".csv"));
    const Dataset imported = import_csv(dir.path(), import_manifest(ds));
    expect_same(ds, imported);

    save_dataset(imported, dir.path() / "bin");
    expect_same(ds, load_dataset(dir.path() / "bin"));
}

TEST(CsvImport, HeaderIsOptional)
{
    TempDir dir("hdr");
    DatasetManifest m;
    m.sampling_rate_hz = 100.0;
    m.stimulus_frequencies_hz = {10.0};
    m.channel_names = {"A", "B"};
    m.n_blocks = 1;
    m.n_targets = 1;
    spit(dir.path() / "block0_target0.csv", "1,2\n3,4\n5,6\n");
    const Dataset a = import_csv(dir.path(), m);
    spit(dir.path() / "block0_target0.csv", "A,B\n1,2\n3,4\n5,6\n");
    const Dataset b = import_csv(dir.path(), m);
    expect_same(a, b);
    EXPECT_EQ(a.n_samples(), 3);
    EXPECT_EQ(a.trials()[0].samples(1, 2), 6.0);
}

TEST(CsvImport, Errors)
{
    TempDir dir("csverr");
    DatasetManifest m;
    m.sampling_rate_hz = 100.0;
    m.stimulus_frequencies_hz = {10.0, 12.0};
    m.channel_names = {"A", "B"};
    m.n_blocks = 1;
    m.n_targets = 2;
    spit(dir.path() / "block0_target0.csv", "1,2\n3,4\n");
    try {
        import_csv(dir.path(), m);
        ADD_FAILURE() << "expected io error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
        EXPECT_NE(std::string(e.what()).find("block 0, target 1"), std::string::npos) << e.what();
    }

    spit(dir.path() / "block0_target1.csv", "1,2\n3\n");
    try {
        import_csv(dir.path(), m);
        ADD_FAILURE() << "expected parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("block0_target1.csv:2"), std::string::npos) << e.what();
    }

    spit(dir.path() / "block0_target1.csv", "1,2\n3,4\n5,6\n");
    EXPECT_SSVEP_ERROR(import_csv(dir.path(), m), ErrorKind::parse);

    spit(dir.path() / "block0_target1.csv", "1,2\nx,4\n");
    EXPECT_SSVEP_ERROR(import_csv(dir.path(), m), ErrorKind::parse);

    m.missing_cells = {{0, 1}};
    fs::remove(dir.path() / "block0_target1.csv");
    EXPECT_NO_THROW(import_csv(dir.path(), m));
}

TEST(AtomicWrite, ReplacesContents)
{
    TempDir dir("atomic");
    const fs::path f = dir.path() / "x.txt";
    write_file_atomic(f, "one");
    write_file_atomic(f, "two");
    EXPECT_EQ(slurp(f), "two");
    EXPECT_FALSE(fs::exists(dir.path() / "x.txt.tmp"));
}

class ModelIo : public ::testing::Test {
protected:
    void SetUp() override
    {
        train_ = extract_windows(generate(testing_support::small_config(6)), 1.0);
        info_.fs = train_.sampling_rate_hz();
        info_.frequencies_hz = train_.stimulus_frequencies_hz();
        info_.channel_names = train_.channel_names();
        info_.window_s = 1.0;
    }

    ModelFile fitted(Method method)
    {
        ModelFile f;
        f.info = info_;
        f.info.method = method;
        f.model = fit_model(train_, method, f.config);
        return f;
    }

    Dataset train_;
    ModelInfo info_;
    TempDir dir_{"model"};
};

TEST_F(ModelIo, RoundTripPreservesPredictions)
{
    for (Method method : all_methods()) {
        const ModelFile m = fitted(method);
        const fs::path file = dir_.path() / (std::string(method_name(method)) + ".ssvf");
        save_model(m, file);
        const ModelFile back = load_model(file);
        EXPECT_EQ(back.info.method, method);
        EXPECT_EQ(back.info.channel_names, info_.channel_names);
        for (const Trial& t : train_.trials()) {
            const Classification a = classify(m.model, m.info, t);
            const Classification b = classify(back.model, back.info, t);
            EXPECT_EQ(a.predicted, b.predicted);
            EXPECT_EQ(a.features, b.features);
        }
    }
}

TEST_F(ModelIo, TypedLoaders)
{
    save_model(fitted(Method::trca), dir_.path() / "t.ssvf");
    save_model(fitted(Method::adtrca), dir_.path() / "a.ssvf");
    const AdTrcaModel ad = load_adtrca_model(dir_.path() / "a.ssvf");
    EXPECT_EQ(ad.n_stimuli(), 5);
    EXPECT_EQ(ad.temporal_filters.front().rows(), 128);
    EXPECT_EQ(load_trca_model(dir_.path() / "t.ssvf").n_stimuli(), 5);
    EXPECT_SSVEP_ERROR(load_trca_model(dir_.path() / "a.ssvf"), ErrorKind::version);
    EXPECT_SSVEP_ERROR(load_adtrca_model(dir_.path() / "t.ssvf"), ErrorKind::version);
}

TEST_F(ModelIo, DamagedFiles)
{
    const fs::path file = dir_.path() / "m.ssvf";
    save_model(fitted(Method::trca), file);
    const std::string good = slurp(file);

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    spit(file, bad_magic);
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::version);

    std::string bad_version = good;
    bad_version[4] = 9;
    spit(file, bad_version);
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::version);

    spit(file, good.substr(0, good.size() - 8));
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::corrupt_file);

    spit(file, good + "x");
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::corrupt_file);

    // Same-length edit of the method tag in the header.
    std::string retagged = good;
    const auto pos = retagged.find("\"method\":\"trca\"");
    ASSERT_NE(pos, std::string::npos);
    retagged.replace(pos, 15, "\"method\":\"xxxx\"");
    spit(file, retagged);
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::version);

    std::string wrong_family = good;
    const auto fam = wrong_family.find("\"family\":\"trca\"");
    ASSERT_NE(fam, std::string::npos);
    wrong_family.replace(fam, 15, "\"family\":\"cca\" ");
    spit(file, wrong_family);
    EXPECT_SSVEP_ERROR(load_model(file), ErrorKind::version);
}
