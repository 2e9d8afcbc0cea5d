#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kcusum/distributions.hpp"
#include "kcusum/kernels.hpp"

namespace kcusum::cli {

/// Flat key-value document.
///
///   file    := { line '\n' }
///   line    := blank | comment | key ws* '=' ws* value ws* [comment]
///   comment := '#' <anything up to end of line>
///   key     := [A-Za-z0-9_.-]+
///   value   := '"' <chars except '"'> '"' | <bare chars, '#' starts a comment>
///
/// Lists are comma-separated values ("0.5, 0.5, 0.5, 0.5"). Duplicate keys are
/// an error. Keys are case-sensitive.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> get(std::string_view key) const;
    [[nodiscard]] std::string require(std::string_view key) const;
    [[nodiscard]] std::optional<double> get_double(std::string_view key) const;
    [[nodiscard]] std::optional<std::int64_t> get_int(std::string_view key) const;
    [[nodiscard]] std::optional<std::vector<double>> get_doubles(std::string_view key) const;
    [[nodiscard]] std::optional<bool> get_bool(std::string_view key) const;

    /// Keys never looked up through any getter; lets callers reject typos.
    [[nodiscard]] std::vector<std::string> unused_keys() const;

    [[nodiscard]] const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    std::map<std::string, std::string, std::less<>> values_;
    mutable std::map<std::string, bool, std::less<>> used_;
};

/// Parses one real number, rejecting trailing garbage. Throws ConfigError naming `what`.
[[nodiscard]] double parse_double(std::string_view text, std::string_view what);
[[nodiscard]] std::vector<double> parse_double_list(std::string_view text, std::string_view what);

/// Distribution descriptor under `prefix` ("" or e.g. "pre."):
///   dist = gaussian_diag | gaussian_component_scaled | uniform_componentwise
///   dim, mean, variances, scale_factor, component (index or "random"), half_width
/// A scalar mean/variances entry is broadcast to `dim` coordinates.
[[nodiscard]] Distribution distribution_from_config(const KeyValueConfig& cfg, std::string_view prefix = "");

/// kernel = "gaussian" (default), sigma2 = 1.0 (default).
[[nodiscard]] KernelSpec kernel_from_config(const KeyValueConfig& cfg);

/// Log-likelihood ratio between two gaussian_diag laws given under "pre." and "post.".
[[nodiscard]] LogDensityRatioModel llr_from_config(const KeyValueConfig& cfg);

}  // namespace kcusum::cli
