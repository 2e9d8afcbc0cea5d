#include "kcusum/cli/stream_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "kcusum/error.hpp"
#include "kcusum/evaluation.hpp"

namespace kcusum::cli {

namespace {

bool is_blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::vector<double> parse_csv_record(const std::string& line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string_view field(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
            throw InputError("field " + std::to_string(out.size() + 1) + " is not a number: '" + std::string(field) +
                             "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_ndjson_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_array()) throw InputError("record is not a JSON array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw InputError("array element " + std::to_string(out.size() + 1) + " is not a number");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

StreamFormat parse_stream_format(std::string_view name) {
    if (name == "csv") return StreamFormat::Csv;
    if (name == "ndjson" || name == "jsonl") return StreamFormat::Ndjson;
    throw ConfigError("unknown stream format '" + std::string(name) + "' (expected csv or ndjson)");
}

StreamFormat format_for_path(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    return (ext == ".ndjson" || ext == ".jsonl") ? StreamFormat::Ndjson : StreamFormat::Csv;
}

StreamReader::StreamReader(std::istream& in, StreamFormat format, bool skip_header)
    : in_(in), format_(format), skip_header_(skip_header) {}

std::optional<Observation> StreamReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_header_) {
            skip_header_ = false;
            continue;
        }
        if (is_blank(line)) continue;
        try {
            std::vector<double> values =
                format_ == StreamFormat::Csv ? parse_csv_record(line) : parse_ndjson_record(line);
            if (dim_ && values.size() != *dim_) {
                throw InputError("expected " + std::to_string(*dim_) + " values, found " +
                                 std::to_string(values.size()));
            }
            Observation obs(std::move(values));
            dim_ = obs.dim();
            return obs;
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line_) + ": " + e.what());
        }
    }
    return std::nullopt;
}

std::vector<Observation> read_stream_file(const std::filesystem::path& path, StreamFormat format, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    StreamReader reader(in, format, skip_header);
    std::vector<Observation> out;
    while (auto obs = reader.next()) out.push_back(std::move(*obs));
    return out;
}

void write_observation(std::ostream& out, const Observation& x, StreamFormat format) {
    const auto v = x.values();
    if (format == StreamFormat::Ndjson) out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << format_double(v[i]);
    }
    if (format == StreamFormat::Ndjson) out << ']';
    out << '\n';
}

}  // namespace kcusum::cli
