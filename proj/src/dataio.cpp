#include "ssvep/dataio.hpp"

#include "ssvep/error.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ssvep {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr char kMagic[4] = {'S', 'S', 'V', 'F'};

template <class U>
void put_le(std::string& out, U v)
{
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
U get_le(const char* p)
{
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

std::string read_file(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        fail(ErrorKind::io, "cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        fail(ErrorKind::io, "cannot read " + file.string());
    return buf.str();
}

json parse_json(const std::string& text, const fs::path& file, ErrorKind kind)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(kind, file.string() + ": invalid JSON: " + e.what());
    }
}

template <class T>
T field(const json& j, const char* name, const fs::path& file)
{
    if (!j.contains(name))
        fail(ErrorKind::parse, file.string() + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::parse, file.string() + ": field '" + name + "' has the wrong type");
    }
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        out.push_back(trim(std::string_view(line).substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& v)
{
    if (s.empty())
        return false;
    const char* first = s.data();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

json matrix_header(const std::string& name, const Matrix& m)
{
    json b;
    b["name"] = name;
    b["rows"] = m.rows();
    b["cols"] = m.cols();
    return b;
}

void put_matrix(std::string& out, const Matrix& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            put_le(out, std::bit_cast<std::uint64_t>(m(r, c)));
}

void validate_manifest(const DatasetManifest& m, const fs::path& file)
{
    auto bad = [&](const std::string& msg) { fail(ErrorKind::parse, file.string() + ": " + msg); };
    if (!(m.sampling_rate_hz > 0.0))
        bad("sampling_rate_hz must be positive");
    if (m.stimulus_frequencies_hz.empty())
        bad("stimulus_frequencies_hz is empty");
    if (m.channel_names.empty())
        bad("channel_names is empty");
    if (m.n_blocks < 1)
        bad("n_blocks must be positive");
    if (m.n_targets != static_cast<int>(m.stimulus_frequencies_hz.size()))
        bad("n_targets does not match stimulus_frequencies_hz");
    if (m.n_samples < 0)
        bad("n_samples must be non-negative");
    if (!(m.latency_s >= 0.0))
        bad("latency_s must be non-negative");
    for (const auto& [b, t] : m.missing_cells)
        if (b < 0 || b >= m.n_blocks || t < 0 || t >= m.n_targets)
            bad("missing cell (" + std::to_string(b) + ", " + std::to_string(t) + ") out of range");
}

json ard_json(const ArdConfig& a)
{
    json j;
    j["max_iters"] = a.max_iters;
    j["tol"] = a.tol;
    j["a_init"] = a.a_init;
    j["a0_init"] = a.a0_init ? json(*a.a0_init) : json(nullptr);
    j["prune_threshold"] = a.prune_threshold;
    return j;
}

ArdConfig ard_from_json(const json& j, const fs::path& file)
{
    ArdConfig a;
    a.max_iters = field<int>(j, "max_iters", file);
    a.tol = field<double>(j, "tol", file);
    a.a_init = field<double>(j, "a_init", file);
    if (j.contains("a0_init") && !j.at("a0_init").is_null())
        a.a0_init = field<double>(j, "a0_init", file);
    a.prune_threshold = field<double>(j, "prune_threshold", file);
    return a;
}

std::string family_of(Method m)
{
    switch (m) {
    case Method::cca: return "cca";
    case Method::trca:
    case Method::trca_ensemble: return "trca";
    case Method::adtrca:
    case Method::adtrca_ensemble: return "adtrca";
    }
    return "";
}

} // namespace

void write_file_atomic(const fs::path& file, const std::string& contents)
{
    if (file.has_parent_path())
        fs::create_directories(file.parent_path());
    fs::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorKind::io, "cannot create " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            fail(ErrorKind::io, "cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io, "cannot rename into " + file.string());
    }
}

DatasetManifest read_manifest(const fs::path& file)
{
    const json j = parse_json(read_file(file), file, ErrorKind::parse);
    DatasetManifest m;
    m.format_version = field<int>(j, "format_version", file);
    if (m.format_version != kDatasetFormatVersion)
        fail(ErrorKind::version, file.string() + ": unsupported format_version " + std::to_string(m.format_version));
    m.sampling_rate_hz = field<double>(j, "sampling_rate_hz", file);
    m.stimulus_frequencies_hz = field<std::vector<double>>(j, "stimulus_frequencies_hz", file);
    m.channel_names = field<std::vector<std::string>>(j, "channel_names", file);
    m.n_blocks = field<int>(j, "n_blocks", file);
    m.n_targets = j.contains("n_targets") ? field<int>(j, "n_targets", file)
                                          : static_cast<int>(m.stimulus_frequencies_hz.size());
    if (j.contains("n_samples"))
        m.n_samples = field<Eigen::Index>(j, "n_samples", file);
    if (j.contains("latency_s"))
        m.latency_s = field<double>(j, "latency_s", file);
    if (j.contains("tensor_file"))
        m.tensor_file = field<std::string>(j, "tensor_file", file);
    if (j.contains("byte_order"))
        m.byte_order = field<std::string>(j, "byte_order", file);
    if (j.contains("sample_type"))
        m.sample_type = field<std::string>(j, "sample_type", file);
    if (j.contains("missing_cells"))
        for (const auto& cell : field<std::vector<std::vector<int>>>(j, "missing_cells", file)) {
            if (cell.size() != 2)
                fail(ErrorKind::parse, file.string() + ": missing_cells entries must be [block, target]");
            m.missing_cells.emplace_back(cell[0], cell[1]);
        }
    validate_manifest(m, file);
    return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& file)
{
    json j;
    j["format_version"] = m.format_version;
    j["sampling_rate_hz"] = m.sampling_rate_hz;
    j["stimulus_frequencies_hz"] = m.stimulus_frequencies_hz;
    j["channel_names"] = m.channel_names;
    j["n_blocks"] = m.n_blocks;
    j["n_targets"] = m.n_targets;
    j["n_samples"] = m.n_samples;
    j["latency_s"] = m.latency_s;
    j["tensor_file"] = m.tensor_file;
    j["byte_order"] = m.byte_order;
    j["sample_type"] = m.sample_type;
    json cells = json::array();
    for (const auto& [b, t] : m.missing_cells)
        cells.push_back({b, t});
    j["missing_cells"] = std::move(cells);
    write_file_atomic(file, j.dump(2) + "\n");
}

void save_dataset(const Dataset& dataset, const fs::path& dir)
{
    if (dataset.trials().empty())
        fail(ErrorKind::invalid_input, "save_dataset: dataset has no trials");

    DatasetManifest m;
    m.sampling_rate_hz = dataset.sampling_rate_hz();
    m.stimulus_frequencies_hz = dataset.stimulus_frequencies_hz();
    m.channel_names = dataset.channel_names();
    m.n_blocks = dataset.n_blocks();
    m.n_targets = dataset.n_stimuli();
    m.n_samples = dataset.n_samples();
    m.latency_s = dataset.latency_s();

    const Eigen::Index n_ch = dataset.n_channels();
    std::string tensor;
    tensor.reserve(static_cast<std::size_t>(m.n_blocks * m.n_targets * n_ch * m.n_samples) * 4);
    for (int b = 0; b < m.n_blocks; ++b) {
        for (int t = 0; t < m.n_targets; ++t) {
            const Trial* trial = dataset.find(b, t);
            if (trial == nullptr)
                m.missing_cells.emplace_back(b, t);
            for (Eigen::Index c = 0; c < n_ch; ++c)
                for (Eigen::Index s = 0; s < m.n_samples; ++s) {
                    const float v = trial ? static_cast<float>(trial->samples(c, s)) : 0.0f;
                    put_le(tensor, std::bit_cast<std::uint32_t>(v));
                }
        }
    }

    fs::create_directories(dir);
    write_file_atomic(dir / m.tensor_file, tensor);
    write_manifest(m, dir / "manifest.json");
}

Dataset load_dataset(const fs::path& dir)
{
    const fs::path manifest_file = dir / "manifest.json";
    if (!fs::exists(manifest_file))
        fail(ErrorKind::io, "no manifest.json in " + dir.string());
    const DatasetManifest m = read_manifest(manifest_file);
    if (m.byte_order != "little" || m.sample_type != "float32")
        fail(ErrorKind::version, manifest_file.string() + ": unsupported layout " + m.byte_order + "/" + m.sample_type);
    if (m.n_samples < 1)
        fail(ErrorKind::corrupt_file, manifest_file.string() + ": n_samples must be positive");

    const fs::path tensor_file = dir / m.tensor_file;
    const std::string tensor = read_file(tensor_file);
    const auto n_ch = static_cast<Eigen::Index>(m.channel_names.size());
    const auto expected =
        static_cast<std::size_t>(m.n_blocks) * static_cast<std::size_t>(m.n_targets) * static_cast<std::size_t>(n_ch) *
        static_cast<std::size_t>(m.n_samples) * 4;
    if (tensor.size() != expected) {
        std::ostringstream msg;
        msg << tensor_file.string() << ": expected " << expected << " bytes for " << m.n_blocks << "x" << m.n_targets
            << "x" << n_ch << "x" << m.n_samples << " float32, found " << tensor.size();
        fail(ErrorKind::corrupt_file, msg.str());
    }

    const std::set<std::pair<int, int>> missing(m.missing_cells.begin(), m.missing_cells.end());
    std::vector<Trial> trials;
    const char* p = tensor.data();
    for (int b = 0; b < m.n_blocks; ++b) {
        for (int t = 0; t < m.n_targets; ++t) {
            const bool skip = missing.contains({b, t});
            Trial trial;
            trial.block = b;
            trial.stimulus = t;
            if (!skip)
                trial.samples.resize(n_ch, m.n_samples);
            for (Eigen::Index c = 0; c < n_ch; ++c)
                for (Eigen::Index s = 0; s < m.n_samples; ++s, p += 4)
                    if (!skip)
                        trial.samples(c, s) = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(p)));
            if (!skip)
                trials.push_back(std::move(trial));
        }
    }
    try {
        return Dataset(std::move(trials), m.sampling_rate_hz, m.stimulus_frequencies_hz, m.n_blocks, m.channel_names,
                       m.latency_s);
    } catch (const Error& e) {
        fail(ErrorKind::corrupt_file, dir.string() + ": " + e.what());
    }
}

Dataset import_csv(const fs::path& dir, const DatasetManifest& manifest)
{
    validate_manifest(manifest, dir / "manifest");
    const auto n_ch = manifest.channel_names.size();
    const std::set<std::pair<int, int>> missing(manifest.missing_cells.begin(), manifest.missing_cells.end());
    Eigen::Index n_samples = manifest.n_samples;

    std::vector<Trial> trials;
    for (int b = 0; b < manifest.n_blocks; ++b) {
        for (int t = 0; t < manifest.n_targets; ++t) {
            if (missing.contains({b, t}))
                continue;
            const fs::path file = dir / ("block" + std::to_string(b) + "_target" + std::to_string(t) + ".csv");
            if (!fs::exists(file))
                fail(ErrorKind::io, "import_csv: missing " + file.filename().string() + " (block " + std::to_string(b) +
                                        ", target " + std::to_string(t) + ")");
            std::ifstream in(file);
            if (!in)
                fail(ErrorKind::io, "cannot open " + file.string());

            std::vector<std::vector<double>> rows;
            std::string line;
            int line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (trim(line).empty())
                    continue;
                const auto fields = split_csv_line(line);
                std::vector<double> values(fields.size());
                bool numeric = true;
                for (std::size_t i = 0; i < fields.size(); ++i)
                    numeric = numeric && parse_double(fields[i], values[i]);
                if (!numeric && rows.empty() && line_no == 1) {
                    if (fields.size() != n_ch)
                        fail(ErrorKind::parse, file.string() + ":1: header has " + std::to_string(fields.size()) +
                                                   " columns, manifest lists " + std::to_string(n_ch) + " channels");
                    continue;
                }
                if (fields.size() != n_ch)
                    fail(ErrorKind::parse, file.string() + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(n_ch) + " columns, found " + std::to_string(fields.size()));
                if (!numeric)
                    fail(ErrorKind::parse, file.string() + ":" + std::to_string(line_no) + ": non-numeric value");
                rows.push_back(std::move(values));
            }

            const auto n_rows = static_cast<Eigen::Index>(rows.size());
            if (n_samples == 0)
                n_samples = n_rows;
            if (n_rows != n_samples)
                fail(ErrorKind::parse, file.string() + ": expected " + std::to_string(n_samples) + " rows, found " +
                                           std::to_string(n_rows));

            Trial trial;
            trial.block = b;
            trial.stimulus = t;
            trial.samples.resize(static_cast<Eigen::Index>(n_ch), n_samples);
            for (Eigen::Index s = 0; s < n_samples; ++s)
                for (std::size_t c = 0; c < n_ch; ++c)
                    trial.samples(static_cast<Eigen::Index>(c), s) = rows[static_cast<std::size_t>(s)][c];
            trials.push_back(std::move(trial));
        }
    }
    return Dataset(std::move(trials), manifest.sampling_rate_hz, manifest.stimulus_frequencies_hz, manifest.n_blocks,
                   manifest.channel_names, manifest.latency_s);
}

void export_trial_csv(const Trial& trial, std::span<const std::string> channel_names, const fs::path& file)
{
    if (static_cast<Eigen::Index>(channel_names.size()) != trial.n_channels())
        fail(ErrorKind::invalid_input, "export_trial_csv: channel name count differs from the trial");
    std::string out;
    for (std::size_t c = 0; c < channel_names.size(); ++c)
        out += (c ? "," : "") + channel_names[c];
    out += '\n';
    char buf[32];
    for (Eigen::Index s = 0; s < trial.n_samples(); ++s) {
        for (Eigen::Index c = 0; c < trial.n_channels(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", trial.samples(c, s));
            if (c)
                out += ',';
            out += buf;
        }
        out += '\n';
    }
    write_file_atomic(file, out);
}

void save_model(const ModelFile& file_model, const fs::path& file)
{
    const ModelInfo& info = file_model.info;
    json header;
    header["format_version"] = kModelFormatVersion;
    header["family"] = family_of(info.method);
    header["method"] = std::string(method_name(info.method));

    json ij;
    ij["fs"] = info.fs;
    ij["frequencies_hz"] = info.frequencies_hz;
    ij["channel_names"] = info.channel_names;
    ij["window_s"] = info.window_s;
    ij["n_harmonics"] = info.n_harmonics;
    header["info"] = ij;

    const RecognizerConfig& cfg = file_model.config;
    json cj;
    cj["n_harmonics"] = cfg.n_harmonics;
    cj["ard"] = ard_json(cfg.ard);
    cj["test_filtering"] = cfg.test_filtering == TestFiltering::shared_mean ? "shared-mean" : "class-specific";
    cj["identity_filter"] = cfg.identity_filter;
    header["config"] = cj;

    json blocks = json::array();
    std::string payload;
    auto add = [&](const std::string& name, const Matrix& m) {
        blocks.push_back(matrix_header(name, m));
        put_matrix(payload, m);
    };

    const std::string family = family_of(info.method);
    if (family == "trca") {
        const auto* m = std::get_if<TrcaModel>(&file_model.model);
        if (m == nullptr)
            fail(ErrorKind::invalid_input, "save_model: method and model type disagree");
        header["n_stimuli"] = m->n_stimuli();
        for (int s = 0; s < m->n_stimuli(); ++s) {
            add("filter/" + std::to_string(s), m->filters[static_cast<std::size_t>(s)]);
            add("template/" + std::to_string(s), m->templates[static_cast<std::size_t>(s)]);
        }
        add("ensemble", m->ensemble);
    } else if (family == "adtrca") {
        const auto* m = std::get_if<AdTrcaModel>(&file_model.model);
        if (m == nullptr)
            fail(ErrorKind::invalid_input, "save_model: method and model type disagree");
        header["n_stimuli"] = m->n_stimuli();
        header["model_config"] = {
            {"n_harmonics", m->config.n_harmonics},
            {"ard", ard_json(m->config.ard)},
            {"test_filtering", m->config.test_filtering == TestFiltering::shared_mean ? "shared-mean" : "class-specific"},
            {"identity_filter", m->config.identity_filter},
        };
        header["ard_iterations"] = m->ard_iterations;
        header["ard_active"] = m->ard_active;
        for (int s = 0; s < m->n_stimuli(); ++s) {
            const auto idx = static_cast<std::size_t>(s);
            add("temporal/" + std::to_string(s), m->temporal_filters[idx]);
            add("filter/" + std::to_string(s), m->filters[idx]);
            add("template/" + std::to_string(s), m->templates[idx]);
        }
        add("ensemble", m->ensemble);
    } else {
        if (!std::holds_alternative<CcaModel>(file_model.model))
            fail(ErrorKind::invalid_input, "save_model: method and model type disagree");
        header["n_stimuli"] = static_cast<int>(info.frequencies_hz.size());
    }
    header["blocks"] = std::move(blocks);

    const std::string text = header.dump();
    std::string out(kMagic, 4);
    out.push_back(static_cast<char>(kModelFormatVersion));
    put_le(out, static_cast<std::uint32_t>(text.size()));
    out += text;
    out += payload;
    write_file_atomic(file, out);
}

namespace {

ModelFile read_model(const fs::path& file)
{
    const std::string bytes = read_file(file);
    if (bytes.size() < 9 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        fail(ErrorKind::version, file.string() + ": not a model file (bad magic)");
    const int version = static_cast<unsigned char>(bytes[4]);
    if (version != kModelFormatVersion)
        fail(ErrorKind::version, file.string() + ": unsupported model format version " + std::to_string(version));
    const auto header_len = get_le<std::uint32_t>(bytes.data() + 5);
    if (9 + static_cast<std::size_t>(header_len) > bytes.size())
        fail(ErrorKind::corrupt_file, file.string() + ": header length exceeds file size");

    const json header = parse_json(bytes.substr(9, header_len), file, ErrorKind::version);
    auto tag_error = [&](const std::string& msg) { fail(ErrorKind::version, file.string() + ": " + msg); };
    if (!header.is_object() || !header.contains("format_version") || !header.contains("method") ||
        !header.contains("family"))
        tag_error("header lacks format_version/method/family");
    if (header.at("format_version") != kModelFormatVersion)
        tag_error("header format_version mismatch");

    ModelFile out;
    try {
        out.info.method = parse_method(header.at("method").get<std::string>());
    } catch (const std::exception&) {
        tag_error("unknown method tag");
    }
    const std::string family = header.at("family").is_string() ? header.at("family").get<std::string>() : "";
    if (family != family_of(out.info.method))
        tag_error("method tag '" + std::string(method_name(out.info.method)) + "' does not match family '" + family + "'");

    const json& ij = header.at("info");
    out.info.fs = field<double>(ij, "fs", file);
    out.info.frequencies_hz = field<std::vector<double>>(ij, "frequencies_hz", file);
    out.info.channel_names = field<std::vector<std::string>>(ij, "channel_names", file);
    out.info.window_s = field<double>(ij, "window_s", file);
    out.info.n_harmonics = field<int>(ij, "n_harmonics", file);

    auto parse_filtering = [&](const json& j) {
        const auto name = field<std::string>(j, "test_filtering", file);
        if (name == "shared-mean")
            return TestFiltering::shared_mean;
        if (name != "class-specific")
            tag_error("unknown test_filtering '" + name + "'");
        return TestFiltering::class_specific;
    };
    const json& cj = header.at("config");
    out.config.n_harmonics = field<int>(cj, "n_harmonics", file);
    out.config.ard = ard_from_json(cj.at("ard"), file);
    out.config.test_filtering = parse_filtering(cj);
    out.config.identity_filter = field<bool>(cj, "identity_filter", file);

    // Matrices by name.
    std::map<std::string, Matrix> blocks;
    std::size_t offset = 9 + header_len;
    for (const json& b : field<json>(header, "blocks", file)) {
        const auto name = field<std::string>(b, "name", file);
        const auto rows = field<Eigen::Index>(b, "rows", file);
        const auto cols = field<Eigen::Index>(b, "cols", file);
        if (rows < 0 || cols < 0)
            fail(ErrorKind::corrupt_file, file.string() + ": negative block shape");
        const auto need = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8;
        if (offset + need > bytes.size())
            fail(ErrorKind::corrupt_file, file.string() + ": payload truncated in block '" + name + "'");
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c, offset += 8)
                m(r, c) = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + offset));
        blocks[name] = std::move(m);
    }
    if (offset != bytes.size())
        fail(ErrorKind::corrupt_file, file.string() + ": trailing bytes after payload");

    auto take = [&](const std::string& name) {
        auto it = blocks.find(name);
        if (it == blocks.end())
            fail(ErrorKind::corrupt_file, file.string() + ": missing block '" + name + "'");
        return it->second;
    };
    auto take_vector = [&](const std::string& name) {
        const Matrix m = take(name);
        if (m.cols() != 1)
            fail(ErrorKind::corrupt_file, file.string() + ": block '" + name + "' is not a column");
        return Vector(m.col(0));
    };

    const int n_stimuli = field<int>(header, "n_stimuli", file);
    if (n_stimuli != static_cast<int>(out.info.frequencies_hz.size()))
        fail(ErrorKind::corrupt_file, file.string() + ": n_stimuli disagrees with frequencies_hz");

    if (family == "trca") {
        TrcaModel m;
        for (int s = 0; s < n_stimuli; ++s) {
            m.filters.push_back(take_vector("filter/" + std::to_string(s)));
            m.templates.push_back(take("template/" + std::to_string(s)));
        }
        m.ensemble = take("ensemble");
        out.model = std::move(m);
    } else if (family == "adtrca") {
        AdTrcaModel m;
        const json& mc = field<json>(header, "model_config", file);
        m.config.n_harmonics = field<int>(mc, "n_harmonics", file);
        m.config.ard = ard_from_json(mc.at("ard"), file);
        m.config.test_filtering = parse_filtering(mc);
        m.config.identity_filter = field<bool>(mc, "identity_filter", file);
        m.ard_iterations = field<std::vector<int>>(header, "ard_iterations", file);
        m.ard_active = field<std::vector<Eigen::Index>>(header, "ard_active", file);
        for (int s = 0; s < n_stimuli; ++s) {
            m.temporal_filters.push_back(take("temporal/" + std::to_string(s)));
            m.filters.push_back(take_vector("filter/" + std::to_string(s)));
            m.templates.push_back(take("template/" + std::to_string(s)));
        }
        m.ensemble = take("ensemble");
        out.model = std::move(m);
    } else {
        out.model = CcaModel{};
    }
    return out;
}

} // namespace

ModelFile load_model(const fs::path& file)
{
    try {
        return read_model(file);
    } catch (const json::exception& e) {
        fail(ErrorKind::corrupt_file, file.string() + ": malformed header: " + e.what());
    }
}

TrcaModel load_trca_model(const fs::path& file)
{
    ModelFile m = load_model(file);
    auto* trca = std::get_if<TrcaModel>(&m.model);
    if (trca == nullptr)
        fail(ErrorKind::version, file.string() + ": holds a '" + std::string(method_name(m.info.method)) +
                                     "' model, expected trca");
    return std::move(*trca);
}

AdTrcaModel load_adtrca_model(const fs::path& file)
{
    ModelFile m = load_model(file);
    auto* ad = std::get_if<AdTrcaModel>(&m.model);
    if (ad == nullptr)
        fail(ErrorKind::version, file.string() + ": holds a '" + std::string(method_name(m.info.method)) +
                                     "' model, expected adtrca");
    return std::move(*ad);
}

} // namespace ssvep
