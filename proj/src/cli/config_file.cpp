#include "kcusum/cli/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "kcusum/error.hpp"

namespace kcusum::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    }
    return true;
}

std::string key_with(std::string_view prefix, std::string_view name) {
    std::string k(prefix);
    k += name;
    return k;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string raw;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail("invalid key '" + std::string(key) + "'");
        std::string_view rest = trim(line.substr(eq + 1));
        std::string value;
        if (!rest.empty() && rest.front() == '"') {
            const auto close = rest.find('"', 1);
            if (close == std::string_view::npos) fail("unterminated string");
            value = std::string(rest.substr(1, close - 1));
            const std::string_view tail = trim(rest.substr(close + 1));
            if (!tail.empty() && tail.front() != '#') fail("unexpected text after closing quote");
        } else {
            const auto hash = rest.find('#');
            value = std::string(trim(rest.substr(0, hash)));
        }
        if (!cfg.values_.emplace(std::string(key), std::move(value)).second) {
            fail("duplicate key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, path.string());
}

bool KeyValueConfig::has(std::string_view key) const {
    return values_.find(key) != values_.end();
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_[it->first] = true;
    return it->second;
}

std::string KeyValueConfig::require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
    return *v;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_double(*v, key);
}

std::optional<std::int64_t> KeyValueConfig::get_int(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::int64_t out = 0;
    const auto* end = v->data() + v->size();
    const auto res = std::from_chars(v->data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError(source_ + ": key '" + std::string(key) + "' is not an integer: '" + *v + "'");
    }
    return out;
}

std::optional<std::vector<double>> KeyValueConfig::get_doubles(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_double_list(*v, key);
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(source_ + ": key '" + std::string(key) + "' is not a boolean: '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (!used_.contains(k)) out.push_back(k);
    }
    return out;
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string_view t = trim(text);
    double out = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(out)) {
        throw ConfigError("'" + std::string(what) + "' is not a finite number: '" + std::string(text) + "'");
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_double(text.substr(start, comma - start), what));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Distribution distribution_from_config(const KeyValueConfig& cfg, std::string_view prefix) {
    const std::string kind = cfg.require(key_with(prefix, "dist"));
    const auto dim_opt = cfg.get_int(key_with(prefix, "dim"));
    if (dim_opt && *dim_opt < 1) throw ConfigError(key_with(prefix, "dim") + " must be >= 1");

    auto raw = [&](std::string_view name, std::optional<double> fallback) -> std::vector<double> {
        auto v = cfg.get_doubles(key_with(prefix, name));
        if (v) return *v;
        if (!fallback) throw ConfigError(cfg.source() + ": missing required key '" + key_with(prefix, name) + "'");
        return {*fallback};
    };
    // Scalars broadcast to the dimension: explicit `dim`, else the longest vector given.
    auto fit = [&](std::vector<std::vector<double>> vs) {
        std::size_t dim = dim_opt ? static_cast<std::size_t>(*dim_opt) : 1;
        if (!dim_opt) {
            for (const auto& v : vs) dim = std::max(dim, v.size());
        }
        for (auto& v : vs) {
            if (v.size() == 1) v.assign(dim, v.front());
            if (v.size() != dim) {
                throw ConfigError(cfg.source() + ": distribution '" + std::string(prefix) + "' has a parameter with " +
                                  std::to_string(v.size()) + " entries but dim = " + std::to_string(dim));
            }
        }
        return vs;
    };

    if (kind == "gaussian_diag") {
        auto p = fit({raw("mean", 0.0), raw("variances", std::nullopt)});
        return Distribution::diagonal_gaussian(p[0], p[1]);
    }
    if (kind == "gaussian_component_scaled") {
        const auto scale = cfg.get_double(key_with(prefix, "scale_factor"));
        if (!scale) throw ConfigError("missing required key '" + key_with(prefix, "scale_factor") + "'");
        std::optional<std::size_t> fixed;
        if (auto comp = cfg.get(key_with(prefix, "component")); comp && *comp != "random") {
            const double idx = parse_double(*comp, key_with(prefix, "component"));
            if (idx < 0 || idx != std::floor(idx)) throw ConfigError(key_with(prefix, "component") + " must be an index");
            fixed = static_cast<std::size_t>(idx);
        }
        auto p = fit({raw("mean", 0.0), raw("variances", std::nullopt)});
        return Distribution::component_scaled_gaussian(p[0], p[1], *scale, fixed);
    }
    if (kind == "uniform_componentwise") {
        const auto hw = cfg.get_double(key_with(prefix, "half_width"));
        if (!hw) throw ConfigError("missing required key '" + key_with(prefix, "half_width") + "'");
        auto p = fit({raw("mean", 0.0)});
        return Distribution::componentwise_uniform(p[0], *hw);
    }
    throw ConfigError("unknown distribution '" + kind + "' (expected gaussian_diag, gaussian_component_scaled or "
                      "uniform_componentwise)");
}

KernelSpec kernel_from_config(const KeyValueConfig& cfg) {
    const KernelFamily family = parse_kernel_family(cfg.get("kernel").value_or("gaussian"));
    switch (family) {
        case KernelFamily::Gaussian:
            return KernelSpec::gaussian(cfg.get_double("sigma2").value_or(1.0));
    }
    throw ConfigError("unsupported kernel");
}

LogDensityRatioModel llr_from_config(const KeyValueConfig& cfg) {
    if (auto model = cfg.get("llr"); model && *model != "gaussian_diag") {
        throw ConfigError("unsupported llr model '" + *model + "' (expected gaussian_diag)");
    }
    return LogDensityRatioModel::gaussian(distribution_from_config(cfg, "pre."), distribution_from_config(cfg, "post."));
}

}  // namespace kcusum::cli
