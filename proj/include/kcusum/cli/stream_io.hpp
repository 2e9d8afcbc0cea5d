#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kcusum/observation.hpp"

namespace kcusum::cli {

/// CSV: one observation per line, comma-separated decimals, optional single
/// header line. NDJSON: one JSON array of numbers per line. Blank lines are
/// skipped. Every record must have the dimension of the first one.
enum class StreamFormat { Csv, Ndjson };

[[nodiscard]] StreamFormat parse_stream_format(std::string_view name);
/// ".ndjson" / ".jsonl" select NDJSON; anything else (including "-") is CSV.
[[nodiscard]] StreamFormat format_for_path(const std::string& path);

/// Incremental reader. Parse errors throw InputError("line N: ...").
class StreamReader {
public:
    StreamReader(std::istream& in, StreamFormat format, bool skip_header = false);

    /// Next observation, or nullopt at end of input.
    std::optional<Observation> next();

    [[nodiscard]] std::size_t line_number() const noexcept { return line_; }
    [[nodiscard]] std::optional<std::size_t> dim() const noexcept { return dim_; }

private:
    std::istream& in_;
    StreamFormat format_;
    bool skip_header_;
    std::size_t line_ = 0;
    std::optional<std::size_t> dim_;
};

[[nodiscard]] std::vector<Observation> read_stream_file(const std::filesystem::path& path, StreamFormat format,
                                                        bool skip_header = false);

/// Writes one record with 17 significant digits per coordinate.
void write_observation(std::ostream& out, const Observation& x, StreamFormat format);

}  // namespace kcusum::cli
