#include "text_util.hpp"

#include <chambereff/io.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace chambereff::io {

using Kind = ParseError::Kind;

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw InputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot move output into '" + path.string() + "': " + ec.message());
    }
}

namespace {

struct CsvRow {
    std::size_t line;
    std::vector<std::string_view> fields;
};

// Header check plus non-blank rows split on commas.
std::vector<CsvRow> read_csv(std::string_view text, std::string_view header, std::size_t n_fields,
                             const std::string& source, std::vector<std::string_view>* header_fields = nullptr) {
    const auto lines = detail::split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && detail::trim(lines[i].text).empty()) ++i;
    if (i >= lines.size()) throw ParseError(Kind::BadHeader, source, 0, "missing header line");
    const auto got = detail::trim(lines[i].text);
    if (header_fields) {
        *header_fields = detail::split(got, ',');
        for (auto& h : *header_fields) h = detail::trim(h);
        n_fields = header_fields->size();
    } else if (got != header) {
        throw ParseError(Kind::BadHeader, source, lines[i].number,
                         "expected header '" + std::string(header) + "', got '" + std::string(got) + "'");
    }
    std::vector<CsvRow> rows;
    for (++i; i < lines.size(); ++i) {
        const auto body = detail::trim(lines[i].text);
        if (body.empty()) continue;
        auto fields = detail::split(body, ',');
        for (auto& f : fields) f = detail::trim(f);
        if (fields.size() < n_fields)
            throw ParseError(Kind::TruncatedRow, source, lines[i].number,
                             "row has " + std::to_string(fields.size()) + " of " + std::to_string(n_fields) + " fields");
        if (fields.size() > n_fields)
            throw ParseError(Kind::ExtraValues, source, lines[i].number,
                             "row has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(n_fields));
        rows.push_back({lines[i].number, std::move(fields)});
    }
    return rows;
}

// Distinct sorted values merged within a relative tolerance.
std::vector<double> distinct(std::vector<double> v, double abs_tol, double rel_tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || std::abs(x - out.back()) > abs_tol + rel_tol * std::abs(x)) out.push_back(x);
    return out;
}

std::size_t index_of(const std::vector<double>& axis, double x) {
    auto it = std::lower_bound(axis.begin(), axis.end(), x - 1e-9 * std::max(1.0, std::abs(x)));
    return static_cast<std::size_t>(it - axis.begin());
}

// Regular axis from the observed values: returns the step. Throws IrregularGrid.
double infer_step(const std::vector<double>& values, double span, bool inclusive, const char* axis,
                  const std::string& source) {
    if (values.size() < 2) throw ParseError(Kind::IrregularGrid, source, 0, std::string(axis) + " axis has fewer than 2 values");
    double step = values[1] - values[0];
    for (std::size_t i = 1; i < values.size(); ++i) step = std::min(step, values[i] - values[i - 1]);
    const double n = std::round(span / step);
    if (std::abs(values.front()) > 1e-6 || std::abs(span / step - n) > 1e-6 * n)
        throw ParseError(Kind::IrregularGrid, source, 0, std::string(axis) + " samples are not a regular grid over the full range");
    step = span / n;
    for (double v : values) {
        const double k = v / step;
        if (std::abs(k - std::round(k)) > 1e-6 || (inclusive ? v > span + 1e-6 : v >= span - 1e-6) || v < -1e-6)
            throw ParseError(Kind::IrregularGrid, source, 0,
                             std::string(axis) + " value " + format_number(v) + " is off the regular grid");
    }
    return step;
}

}  // namespace

// ------------------------------------------------------------------------------------------------

RadiationPattern parse_pattern_csv(std::string_view text, const std::string& source) {
    struct Sample {
        std::size_t line;
        double f, theta, phi, value;
        bool hp;
    };
    const auto rows = read_csv(text, kPatternHeader, 5, source);
    if (rows.empty()) throw ParseError(Kind::EmptyData, source, 0, "pattern file has no samples");
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    std::vector<double> fs_, ths, phs;
    for (const auto& r : rows) {
        Sample s{};
        s.line = r.line;
        s.f = detail::require_number(r.fields[0], source, r.line, "frequency");
        s.theta = detail::require_number(r.fields[1], source, r.line, "theta");
        s.phi = detail::require_number(r.fields[2], source, r.line, "phi");
        if (r.fields[3] == "VP") s.hp = false;
        else if (r.fields[3] == "HP") s.hp = true;
        else throw ParseError(Kind::BadValue, source, r.line, "polarization must be VP or HP");
        s.value = detail::require_number(r.fields[4], source, r.line, "intensity");
        if (s.value < 0.0) throw ParseError(Kind::BadValue, source, r.line, "intensity must be non-negative");
        if (!(s.f > 0.0)) throw ParseError(Kind::NonPositiveFrequency, source, r.line, "frequency must be positive");
        samples.push_back(s);
        fs_.push_back(s.f);
        ths.push_back(s.theta);
        phs.push_back(s.phi);
    }
    const auto freqs = distinct(fs_, 0.0, 1e-9);
    const auto theta_axis = distinct(ths, 1e-6, 0.0);
    const auto phi_axis = distinct(phs, 1e-6, 0.0);
    const SphericalGrid grid(infer_step(theta_axis, 180.0, true, "theta", source),
                             infer_step(phi_axis, 360.0, false, "phi", source));
    const std::size_t nt = grid.theta_samples(), np = grid.phi_samples(), nf = freqs.size();

    std::vector<double> vp(nf * nt * np, 0.0), hp(nf * nt * np, 0.0);
    std::vector<std::size_t> seen_vp(vp.size(), 0), seen_hp(hp.size(), 0);
    for (const auto& s : samples) {
        const std::size_t f = index_of(freqs, s.f);
        const auto it = static_cast<std::size_t>(std::lround(s.theta / grid.theta_step_deg()));
        const auto ip = static_cast<std::size_t>(std::lround(s.phi / grid.phi_step_deg()));
        const std::size_t k = (f * nt + it) * np + ip;
        auto& seen = s.hp ? seen_hp : seen_vp;
        if (seen[k] != 0)
            throw ParseError(Kind::DuplicateSample, source, s.line,
                             "duplicate sample (first seen on line " + std::to_string(seen[k]) + ")");
        seen[k] = s.line;
        (s.hp ? hp : vp)[k] = s.value;
    }
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t it = 0; it < nt; ++it)
            for (std::size_t ip = 0; ip < np; ++ip)
                for (int pol = 0; pol < 2; ++pol) {
                    const std::size_t k = (f * nt + it) * np + ip;
                    if ((pol == 0 ? seen_vp : seen_hp)[k] != 0) continue;
                    throw ParseError(Kind::MissingSample, source, 0,
                                     "missing sample freq " + format_number(freqs[f]) + " Hz, theta " +
                                         format_number(grid.theta_deg(it)) + ", phi " +
                                         format_number(grid.phi_deg(ip)) + ", " + (pol == 0 ? "VP" : "HP"));
                }
    return RadiationPattern(PatternData{grid, FrequencySweep(freqs), std::move(vp), std::move(hp)});
}

std::string write_pattern_csv(const RadiationPattern& p) {
    std::string out(kPatternHeader);
    out += '\n';
    const auto& g = p.grid();
    for (std::size_t f = 0; f < p.frequencies().size(); ++f)
        for (std::size_t it = 0; it < g.theta_samples(); ++it)
            for (std::size_t ip = 0; ip < g.phi_samples(); ++ip) {
                const std::size_t k = p.index(f, it, ip);
                const std::string prefix = format_number(p.frequencies()[f]) + "," + format_number(g.theta_deg(it)) +
                                           "," + format_number(g.phi_deg(ip)) + ",";
                out += prefix + "VP," + format_number(p.intensity_vp()[k]) + "\n";
                out += prefix + "HP," + format_number(p.intensity_hp()[k]) + "\n";
            }
    return out;
}

// ------------------------------------------------------------------------------------------------

Spectrum parse_power_csv(std::string_view text, const std::string& source) {
    const auto rows = read_csv(text, kPowerHeader, 2, source);
    if (rows.empty()) throw ParseError(Kind::EmptyData, source, 0, "power file has no rows");
    std::vector<double> f, p;
    for (const auto& r : rows) {
        f.push_back(detail::require_number(r.fields[0], source, r.line, "frequency"));
        p.push_back(detail::require_number(r.fields[1], source, r.line, "power"));
        if (!(f.back() > 0.0)) throw ParseError(Kind::NonPositiveFrequency, source, r.line, "frequency must be positive");
        if (f.size() > 1 && !(f.back() > f[f.size() - 2]))
            throw ParseError(Kind::NonMonotonicFrequency, source, r.line, "frequencies must be strictly increasing");
    }
    return Spectrum(FrequencySweep(std::move(f)), std::move(p));
}

std::string write_power_csv(const Spectrum& power_db) {
    std::string out(kPowerHeader);
    out += '\n';
    for (std::size_t i = 0; i < power_db.values.size(); ++i)
        out += format_number(power_db.sweep[i]) + "," + format_number(power_db.values[i]) + "\n";
    return out;
}

ReferenceAntenna parse_reference_csv(std::string_view text, const std::string& source) {
    std::vector<std::string_view> header;
    const auto rows = read_csv(text, {}, 0, source, &header);
    if (header.empty() || header[0] != "freq_hz")
        throw ParseError(Kind::BadHeader, source, 1, "reference table header must start with freq_hz");
    int gain_col = -1, eta_col = -1;
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i] == "gain_dbi" && gain_col < 0) gain_col = static_cast<int>(i);
        else if (header[i] == "eta_ref" && eta_col < 0) eta_col = static_cast<int>(i);
        else throw ParseError(Kind::BadHeader, source, 1, "unexpected reference column '" + std::string(header[i]) + "'");
    }
    if (gain_col < 0 && eta_col < 0)
        throw ParseError(Kind::BadHeader, source, 1, "reference table needs gain_dbi and/or eta_ref");
    if (rows.empty()) throw ParseError(Kind::EmptyData, source, 0, "reference table has no rows");
    std::vector<double> f, g, e;
    for (const auto& r : rows) {
        f.push_back(detail::require_number(r.fields[0], source, r.line, "frequency"));
        if (!(f.back() > 0.0)) throw ParseError(Kind::NonPositiveFrequency, source, r.line, "frequency must be positive");
        if (f.size() > 1 && !(f.back() > f[f.size() - 2]))
            throw ParseError(Kind::NonMonotonicFrequency, source, r.line, "frequencies must be strictly increasing");
        if (gain_col >= 0) g.push_back(detail::require_number(r.fields[gain_col], source, r.line, "gain"));
        if (eta_col >= 0) {
            e.push_back(detail::require_number(r.fields[eta_col], source, r.line, "efficiency"));
            if (!(e.back() > 0.0 && e.back() <= 1.0))
                throw ParseError(Kind::BadValue, source, r.line, "reference efficiency must lie in (0, 1]");
        }
    }
    std::optional<std::vector<double>> gain, eta;
    if (gain_col >= 0) gain = std::move(g);
    if (eta_col >= 0) eta = std::move(e);
    return ReferenceAntenna(FrequencySweep(std::move(f)), std::move(gain), std::move(eta));
}

std::string write_reference_csv(const ReferenceAntenna& ref) {
    std::string out = "freq_hz";
    if (ref.has_gain()) out += ",gain_dbi";
    if (ref.has_efficiency()) out += ",eta_ref";
    out += '\n';
    for (std::size_t i = 0; i < ref.frequencies().size(); ++i) {
        out += format_number(ref.frequencies()[i]);
        if (ref.has_gain()) out += "," + format_number(ref.gain_dbi()[i]);
        if (ref.has_efficiency()) out += "," + format_number(ref.eta_ref()[i]);
        out += '\n';
    }
    return out;
}

// ------------------------------------------------------------------------------------------------

namespace {

std::string convention_tag(const EfficiencyResult::FlagSet& flags) {
    for (const auto& f : flags)
        if (f.rfind("convention=", 0) == 0) return f;
    return {};
}

std::string result_variant(const EfficiencyResult& r) {
    return r.flags().empty() ? std::string{} : convention_tag(r.flags().front());
}

}  // namespace

std::string write_results(const std::vector<EfficiencyResult>& results) {
    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = results[a];
        const auto& rb = results[b];
        if (ra.method() != rb.method()) return ra.method() < rb.method();
        if (ra.port() != rb.port()) return ra.port() < rb.port();
        return result_variant(ra) < result_variant(rb);
    });
    std::string out(kResultsHeader);
    out += '\n';
    for (auto idx : order) {
        const auto& r = results[idx];
        const std::string prefix = "," + to_string(r.method()) + "," + to_string(r.port()) + ",";
        for (std::size_t i = 0; i < r.eta().size(); ++i) {
            std::string flags;
            for (const auto& f : r.flags()[i]) {
                if (!flags.empty()) flags += ';';
                flags += f;
            }
            out += format_number(r.frequencies()[i]) + prefix + format_number(r.eta()[i]) + "," +
                   format_number(linear_power_to_db(r.eta()[i])) + "," + flags + "\n";
        }
    }
    return out;
}

std::vector<EfficiencyResult> parse_results(std::string_view text, const std::string& source) {
    const auto rows = read_csv(text, kResultsHeader, 6, source);
    struct Block {
        Method method;
        Port port;
        std::string variant;
        std::vector<double> f, eta;
        std::vector<EfficiencyResult::FlagSet> flags;
    };
    std::vector<Block> blocks;
    for (const auto& r : rows) {
        const double f = detail::require_number(r.fields[0], source, r.line, "frequency");
        if (!(f > 0.0)) throw ParseError(Kind::NonPositiveFrequency, source, r.line, "frequency must be positive");
        Method method;
        Port port;
        try {
            method = parse_method(std::string(r.fields[1]));
            port = parse_port(std::string(r.fields[2]));
        } catch (const InvalidArgument& e) {
            throw ParseError(Kind::BadValue, source, r.line, e.what());
        }
        const double eta = detail::require_number(r.fields[3], source, r.line, "efficiency");
        if (eta < 0.0) throw ParseError(Kind::BadValue, source, r.line, "efficiency must be non-negative");
        EfficiencyResult::FlagSet flags;
        if (!r.fields[5].empty())
            for (auto flag : detail::split(r.fields[5], ';')) {
                flag = detail::trim(flag);
                if (!flag.empty()) flags.insert(std::string(flag));
            }
        const auto variant = convention_tag(flags);
        if (blocks.empty() || blocks.back().method != method || blocks.back().port != port ||
            blocks.back().variant != variant || !(f > blocks.back().f.back()))
            blocks.push_back({method, port, variant, {}, {}, {}});
        auto& b = blocks.back();
        b.f.push_back(f);
        b.eta.push_back(eta);
        b.flags.push_back(std::move(flags));
    }
    std::vector<EfficiencyResult> out;
    for (auto& b : blocks)
        out.emplace_back(FrequencySweep(std::move(b.f)), std::move(b.eta), b.method, b.port, std::move(b.flags));
    return out;
}

// ------------------------------------------------------------------------------------------------

Config Config::parse(std::string_view text, const std::string& source) {
    Config c;
    c.source_ = source;
    for (const auto& line : detail::split_lines(text)) {
        auto body = line.text;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(Kind::BadValue, source, line.number, "expected 'key = value'");
        const std::string key(detail::trim(body.substr(0, eq)));
        const std::string value(detail::trim(body.substr(eq + 1)));
        if (key.empty()) throw ParseError(Kind::BadValue, source, line.number, "empty key");
        if (c.entries_.count(key))
            throw ParseError(Kind::BadValue, source, line.number,
                             "duplicate key '" + key + "' (first on line " + std::to_string(c.entries_[key].line) + ")");
        c.entries_[key] = {value, line.number};
    }
    return c;
}

Config Config::read(const fs::path& path) { return parse(read_file(path), path.string()); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto v = detail::to_double(it->second.value);
    if (!v || std::isnan(*v))
        throw ParseError(Kind::BadValue, source_, it->second.line, "'" + key + "' needs a number");
    return *v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto& s = it->second.value;
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(Kind::BadValue, source_, it->second.line, "'" + key + "' needs a non-negative integer");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto& s = it->second.value;
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ParseError(Kind::BadValue, source_, it->second.line, "'" + key + "' needs true or false");
}

cdouble Config::get_complex(const std::string& key, cdouble fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto parts = detail::split(it->second.value, ',');
    const auto re = detail::to_double(parts[0]);
    const auto im = parts.size() == 2 ? detail::to_double(parts[1]) : std::optional<double>(0.0);
    if (parts.size() > 2 || !re || !im || !std::isfinite(*re) || !std::isfinite(*im))
        throw ParseError(Kind::BadValue, source_, it->second.line, "'" + key + "' needs 're,im'");
    return {*re, *im};
}

void Config::require_known(const std::vector<std::string>& known) const {
    const std::string* first = nullptr;
    std::size_t first_line = 0;
    for (const auto& [key, entry] : entries_)
        if (std::find(known.begin(), known.end(), key) == known.end() && (!first || entry.line < first_line)) {
            first = &key;
            first_line = entry.line;
        }
    if (first) throw ParseError(Kind::UnknownKey, source_, first_line, "unknown key '" + *first + "'");
}

std::string Config::write() const {
    std::string out;
    for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
    return out;
}

}  // namespace chambereff::io
