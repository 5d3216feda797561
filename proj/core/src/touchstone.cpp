#include "text_util.hpp"

#include <chambereff/io.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace chambereff::io {

using detail::TextLine;
using Kind = ParseError::Kind;

namespace {

struct OptionLine {
    double freq_scale = 1e9;
    TouchstoneFormat format = TouchstoneFormat::MA;
    double reference_ohms = 50.0;
};

OptionLine parse_option_line(std::string_view body, const std::string& source, std::size_t line) {
    OptionLine opt;
    const auto tokens = detail::split_whitespace(body);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto t = detail::upper(tokens[i]);
        if (t == "HZ") opt.freq_scale = 1.0;
        else if (t == "KHZ") opt.freq_scale = 1e3;
        else if (t == "MHZ") opt.freq_scale = 1e6;
        else if (t == "GHZ") opt.freq_scale = 1e9;
        else if (t == "S") continue;
        else if (t == "Y" || t == "Z" || t == "H" || t == "G")
            throw ParseError(Kind::MalformedOptionLine, source, line, "only S-parameter files are supported, got " + t);
        else if (t == "RI") opt.format = TouchstoneFormat::RI;
        else if (t == "MA") opt.format = TouchstoneFormat::MA;
        else if (t == "DB") opt.format = TouchstoneFormat::DB;
        else if (t == "R") {
            if (i + 1 >= tokens.size())
                throw ParseError(Kind::MalformedOptionLine, source, line, "reference resistance value missing after R");
            const auto r = detail::to_double(tokens[++i]);
            if (!r || !std::isfinite(*r) || *r <= 0.0)
                throw ParseError(Kind::MalformedOptionLine, source, line,
                                 "reference resistance '" + std::string(tokens[i]) + "' is not a positive number");
            opt.reference_ohms = *r;
        } else {
            throw ParseError(Kind::MalformedOptionLine, source, line, "unknown option token '" + std::string(tokens[i]) + "'");
        }
    }
    return opt;
}

cdouble to_complex(double a, double b, TouchstoneFormat fmt) {
    switch (fmt) {
        case TouchstoneFormat::RI: return {a, b};
        case TouchstoneFormat::MA: return std::polar(a, b * kDegToRad);
        case TouchstoneFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * kDegToRad);
    }
    return {};
}

// Tokens expected on line k (0-based) of a frequency block.
std::size_t tokens_on_line(std::size_t n_ports, std::size_t k) {
    const std::size_t per_row = n_ports <= 2 ? 2 * n_ports * n_ports : 2 * n_ports;
    return per_row + (k == 0 ? 1 : 0);
}

std::size_t lines_per_block(std::size_t n_ports) { return n_ports <= 2 ? 1 : n_ports; }

// Data lines with comments stripped and blanks removed.
struct DataLine {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

struct DataBlock {
    std::vector<double> freqs_hz;
    std::vector<cdouble> matrices;
};

DataBlock parse_data_lines(const std::vector<DataLine>& lines, std::size_t n_ports, const OptionLine& opt,
                           const std::string& source) {
    DataBlock out;
    const std::size_t per_block = lines_per_block(n_ports);
    const std::size_t n2 = n_ports * n_ports;
    std::vector<double> values;
    for (std::size_t li = 0; li < lines.size(); li += per_block) {
        values.clear();
        for (std::size_t k = 0; k < per_block; ++k) {
            if (li + k >= lines.size())
                throw ParseError(Kind::TruncatedRow, source, lines.back().number,
                                 "frequency block ends after " + std::to_string(k) + " of " +
                                     std::to_string(per_block) + " matrix rows");
            const auto& dl = lines[li + k];
            const std::size_t expected = tokens_on_line(n_ports, k);
            if (dl.tokens.size() < expected)
                throw ParseError(Kind::TruncatedRow, source, dl.number,
                                 "row has " + std::to_string(dl.tokens.size()) + " of " + std::to_string(expected) +
                                     " expected values");
            if (dl.tokens.size() > expected)
                throw ParseError(Kind::ExtraValues, source, dl.number,
                                 "row has " + std::to_string(dl.tokens.size()) + " values, expected " +
                                     std::to_string(expected));
            for (const auto& t : dl.tokens) values.push_back(detail::require_number(t, source, dl.number, "value"));
        }
        const std::size_t line_no = lines[li].number;
        const double f = values[0] * opt.freq_scale;
        if (!(f > 0.0)) throw ParseError(Kind::NonPositiveFrequency, source, line_no, "frequency must be positive");
        if (!out.freqs_hz.empty() && !(f > out.freqs_hz.back()))
            throw ParseError(Kind::NonMonotonicFrequency, source, line_no, "frequencies must be strictly increasing");
        out.freqs_hz.push_back(f);

        const std::size_t base = out.matrices.size();
        out.matrices.resize(base + n2);
        for (std::size_t e = 0; e < n2; ++e) {
            std::size_t row = e / n_ports, col = e % n_ports;
            if (n_ports == 2) std::swap(row, col);  // two-port order: S11 S21 S12 S22
            out.matrices[base + row * n_ports + col] = to_complex(values[1 + 2 * e], values[2 + 2 * e], opt.format);
        }
    }
    if (out.freqs_hz.empty()) throw ParseError(Kind::EmptyData, source, 0, "no network data");
    return out;
}

void check_ports(std::size_t n_ports, const std::string& source) {
    if (n_ports < 1 || n_ports > 4)
        throw ParseError(Kind::UnsupportedPortCount, source, 0,
                         "unsupported port count " + std::to_string(n_ports) + " (1-4 supported)");
}

// Classifies one already-split line. Returns the stripped content (empty for comment/blank).
std::string_view strip_comment(std::string_view text) {
    const auto bang = text.find('!');
    if (bang != std::string_view::npos) text = text.substr(0, bang);
    return detail::trim(text);
}

struct TouchstoneScan {
    std::optional<OptionLine> options;
    std::vector<DataLine> data;
};

void scan_line(TouchstoneScan& scan, const TextLine& line, const std::string& source) {
    const auto body = strip_comment(line.text);
    if (body.empty()) return;
    if (body.front() == '[')
        throw ParseError(Kind::UnsupportedVersion, source, line.number, "Touchstone v2 keywords are not supported");
    if (body.front() == '#') {
        if (scan.options)
            throw ParseError(Kind::DuplicateOptionLine, source, line.number, "second option line");
        if (!scan.data.empty())
            throw ParseError(Kind::MalformedOptionLine, source, line.number, "option line after network data");
        scan.options = parse_option_line(body.substr(1), source, line.number);
        return;
    }
    scan.data.push_back({line.number, detail::split_whitespace(body)});
}

std::string fmt(double x) { return format_number(x); }

void append_pair(std::string& out, const cdouble& s, TouchstoneFormat format) {
    double a = 0.0, b = 0.0;
    switch (format) {
        case TouchstoneFormat::RI: a = s.real(); b = s.imag(); break;
        case TouchstoneFormat::MA: a = std::abs(s); b = std::arg(s) / kDegToRad; break;
        case TouchstoneFormat::DB: {
            const double mag = std::abs(s);
            a = mag > 0.0 ? 20.0 * std::log10(mag) : -6000.0;
            b = std::arg(s) / kDegToRad;
            break;
        }
    }
    out += ' ';
    out += fmt(a);
    out += ' ';
    out += fmt(b);
}

const char* format_name(TouchstoneFormat f) {
    switch (f) {
        case TouchstoneFormat::RI: return "RI";
        case TouchstoneFormat::MA: return "MA";
        case TouchstoneFormat::DB: return "DB";
    }
    return "RI";
}

void append_data(std::string& out, std::size_t n_ports, const FrequencySweep& sweep,
                 const std::vector<cdouble>& m, std::size_t offset, TouchstoneFormat format) {
    const std::size_t n2 = n_ports * n_ports;
    const std::size_t per_line = n_ports <= 2 ? n2 : n_ports;
    for (std::size_t f = 0; f < sweep.size(); ++f) {
        out += fmt(sweep[f]);
        for (std::size_t e = 0; e < n2; ++e) {
            std::size_t row = e / n_ports, col = e % n_ports;
            if (n_ports == 2) std::swap(row, col);
            if (e > 0 && e % per_line == 0) out += '\n';
            append_pair(out, m[offset + (f * n_ports + row) * n_ports + col], format);
        }
        out += '\n';
    }
}

}  // namespace

TouchstoneData parse_touchstone(std::string_view text, std::size_t n_ports, const std::string& source) {
    check_ports(n_ports, source);
    TouchstoneScan scan;
    for (const auto& line : detail::split_lines(text)) scan_line(scan, line, source);
    if (scan.data.empty()) throw ParseError(Kind::EmptyData, source, 0, "no network data");
    const OptionLine opt = scan.options.value_or(OptionLine{});
    auto block = parse_data_lines(scan.data, n_ports, opt, source);
    return {n_ports, FrequencySweep(std::move(block.freqs_hz)), std::move(block.matrices), opt.reference_ohms};
}

std::size_t ports_from_extension(const fs::path& path) {
    const auto ext = detail::upper(path.extension().string());
    if (ext.size() == 4 && ext[0] == '.' && ext[1] == 'S' && ext[3] == 'P' && ext[2] >= '1' && ext[2] <= '9')
        return static_cast<std::size_t>(ext[2] - '0');
    throw ParseError(Kind::UnsupportedPortCount, path.string(), 0, "cannot infer port count from extension");
}

TouchstoneData read_touchstone(const fs::path& path) {
    return parse_touchstone(read_file(path), ports_from_extension(path), path.string());
}

std::string write_touchstone(const TouchstoneData& data, TouchstoneFormat format) {
    std::string out = "! written by chambereff\n# HZ S ";
    out += format_name(format);
    out += " R " + fmt(data.reference_ohms) + "\n";
    append_data(out, data.n_ports, data.frequencies, data.matrices, 0, format);
    return out;
}

TouchstoneData ensemble_step(const SParamEnsemble& e, std::size_t step) {
    const std::size_t block = e.frequencies().size() * e.n_ports() * e.n_ports();
    const auto m = e.matrices().subspan(step * block, block);
    return {e.n_ports(), e.frequencies(), std::vector<cdouble>(m.begin(), m.end()), 50.0};
}

// ------------------------------------------------------------------------------------------------

std::string write_ensemble_container(const SParamEnsemble& e, TouchstoneFormat format) {
    std::string out = "! ENSEMBLE ports=" + std::to_string(e.n_ports()) + " steps=" + std::to_string(e.n_steps()) +
                      "\n# HZ S " + format_name(format) + " R 50\n";
    const std::vector<cdouble> all(e.matrices().begin(), e.matrices().end());
    const std::size_t block = e.frequencies().size() * e.n_ports() * e.n_ports();
    for (std::size_t k = 0; k < e.n_steps(); ++k) {
        out += "! STEP " + std::to_string(k) + "\n";
        append_data(out, e.n_ports(), e.frequencies(), all, k * block, format);
    }
    return out;
}

SParamEnsemble parse_ensemble_container(std::string_view text, const std::string& source) {
    const auto lines = detail::split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && detail::trim(lines[i].text).empty()) ++i;
    if (i >= lines.size()) throw ParseError(Kind::EmptyData, source, 0, "empty ensemble container");

    const auto header = detail::trim(lines[i].text);
    std::size_t n_ports = 0, n_steps = 0;
    {
        unsigned long p = 0, s = 0;
        char tail = 0;
        const std::string h(header);
        if (std::sscanf(h.c_str(), "! ENSEMBLE ports=%lu steps=%lu %c", &p, &s, &tail) != 2)
            throw ParseError(Kind::BadHeader, source, lines[i].number, "expected '! ENSEMBLE ports=N steps=K'");
        n_ports = p;
        n_steps = s;
    }
    check_ports(n_ports, source);
    if (n_steps == 0) throw ParseError(Kind::EmptyData, source, lines[i].number, "ensemble declares zero steps");
    ++i;

    std::optional<OptionLine> options;
    std::vector<std::vector<DataLine>> steps;
    for (; i < lines.size(); ++i) {
        const auto raw = detail::trim(lines[i].text);
        if (raw.rfind("! STEP", 0) == 0) {
            const auto idx = detail::to_double(raw.substr(6));
            if (!idx || *idx != static_cast<double>(steps.size()))
                throw ParseError(Kind::BadHeader, source, lines[i].number,
                                 "expected step marker '! STEP " + std::to_string(steps.size()) + "'");
            steps.emplace_back();
            continue;
        }
        const auto body = strip_comment(raw);
        if (body.empty()) continue;
        if (body.front() == '[')
            throw ParseError(Kind::UnsupportedVersion, source, lines[i].number, "Touchstone v2 keywords are not supported");
        if (body.front() == '#') {
            if (options) throw ParseError(Kind::DuplicateOptionLine, source, lines[i].number, "second option line");
            if (!steps.empty())
                throw ParseError(Kind::MalformedOptionLine, source, lines[i].number, "option line after step data");
            options = parse_option_line(body.substr(1), source, lines[i].number);
            continue;
        }
        if (steps.empty())
            throw ParseError(Kind::BadHeader, source, lines[i].number, "network data before the first step marker");
        steps.back().push_back({lines[i].number, detail::split_whitespace(body)});
    }
    if (steps.size() != n_steps)
        throw ParseError(Kind::TruncatedRow, source, lines.empty() ? 0 : lines.back().number,
                         "container declares " + std::to_string(n_steps) + " steps but holds " +
                             std::to_string(steps.size()));
    const OptionLine opt = options.value_or(OptionLine{});

    std::optional<FrequencySweep> sweep;
    std::vector<cdouble> all;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k].empty()) throw ParseError(Kind::EmptyData, source, 0, "step " + std::to_string(k) + " has no data");
        auto block = parse_data_lines(steps[k], n_ports, opt, source);
        FrequencySweep s(std::move(block.freqs_hz));
        if (!sweep) {
            sweep = s;
        } else {
            try {
                align_sweeps(*sweep, s);
            } catch (const SweepMismatch& e) {
                throw SweepMismatch(e.index(), source + " step " + std::to_string(k));
            }
        }
        all.insert(all.end(), block.matrices.begin(), block.matrices.end());
    }
    return SParamEnsemble(n_ports, *sweep, n_steps, std::move(all));
}

// ------------------------------------------------------------------------------------------------

namespace {

PortRoles parse_roles(std::string_view value, const std::string& source, std::size_t line) {
    PortRoles roles;
    bool have_tx = false, have_rx1 = false;
    for (auto item : detail::split(value, ',')) {
        item = detail::trim(item);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(Kind::BadManifest, source, line, "port role '" + std::string(item) + "' is not role:port");
        const auto role = detail::trim(item.substr(0, colon));
        const auto num = detail::to_double(item.substr(colon + 1));
        if (!num || *num < 1.0 || *num > 4.0 || std::floor(*num) != *num)
            throw ParseError(Kind::BadManifest, source, line, "port number must be an integer in 1..4");
        const auto idx = static_cast<std::size_t>(*num) - 1;
        if (role == "tx") { roles.tx = idx; have_tx = true; }
        else if (role == "rx1" || role == "rx") { roles.rx1 = idx; have_rx1 = true; }
        else if (role == "rx2") roles.rx2 = idx;
        else throw ParseError(Kind::BadManifest, source, line, "unknown port role '" + std::string(role) + "'");
    }
    if (!have_tx || !have_rx1) throw ParseError(Kind::BadManifest, source, line, "ports needs at least tx and rx1");
    if (roles.tx == roles.rx1 || (roles.rx2 && (*roles.rx2 == roles.tx || *roles.rx2 == roles.rx1)))
        throw ParseError(Kind::BadManifest, source, line, "port roles must use distinct ports");
    return roles;
}

}  // namespace

EnsembleManifest parse_manifest(std::string_view text, const fs::path& base_dir, const std::string& source) {
    EnsembleManifest m;
    bool have_ports = false;
    for (const auto& line : detail::split_lines(text)) {
        auto body = line.text;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(Kind::BadManifest, source, line.number, "expected 'key = value'");
        const auto key = detail::trim(body.substr(0, eq));
        const auto value = detail::trim(body.substr(eq + 1));
        if (value.empty()) throw ParseError(Kind::BadManifest, source, line.number, "empty value");
        const auto resolve = [&](std::string_view v) {
            fs::path p{std::string(v)};
            return p.is_absolute() ? p : base_dir / p;
        };
        if (key == "file") {
            m.files.push_back(resolve(value));
        } else if (key == "container") {
            if (m.container) throw ParseError(Kind::BadManifest, source, line.number, "second container entry");
            m.container = resolve(value);
        } else if (key == "ports") {
            m.roles = parse_roles(value, source, line.number);
            have_ports = true;
        } else if (key == "label") {
            try {
                m.label = parse_port(std::string(value));
            } catch (const InvalidArgument&) {
                throw ParseError(Kind::BadManifest, source, line.number, "label must be ch1, ch2 or total");
            }
        } else {
            throw ParseError(Kind::UnknownKey, source, line.number, "unknown manifest key '" + std::string(key) + "'");
        }
    }
    if (m.container && !m.files.empty())
        throw ParseError(Kind::BadManifest, source, 0, "manifest lists both a container and step files");
    if (!m.container && m.files.empty()) throw ParseError(Kind::BadManifest, source, 0, "manifest lists no data");
    (void)have_ports;
    return m;
}

EnsembleManifest read_manifest(const fs::path& path) {
    return parse_manifest(read_file(path), path.parent_path(), path.string());
}

std::string write_manifest(const EnsembleManifest& m) {
    std::string out = "# ensemble manifest\n";
    out += "ports = tx:" + std::to_string(m.roles.tx + 1) + ", rx1:" + std::to_string(m.roles.rx1 + 1);
    if (m.roles.rx2) out += ", rx2:" + std::to_string(*m.roles.rx2 + 1);
    out += "\nlabel = " + to_string(m.label) + "\n";
    if (m.container) out += "container = " + m.container->generic_string() + "\n";
    for (const auto& f : m.files) out += "file = " + f.generic_string() + "\n";
    return out;
}

namespace {

SParamEnsemble select_roles(const SParamEnsemble& e, const PortRoles& roles, const std::string& source) {
    std::vector<std::size_t> keep{roles.tx, roles.rx1};
    if (roles.rx2) keep.push_back(*roles.rx2);
    for (auto p : keep)
        if (p >= e.n_ports())
            throw ParseError(Kind::BadManifest, source, 0,
                             "port role refers to port " + std::to_string(p + 1) + " of a " +
                                 std::to_string(e.n_ports()) + "-port data set");
    const std::size_t n = keep.size(), nf = e.frequencies().size();
    std::vector<cdouble> out(e.n_steps() * nf * n * n);
    for (std::size_t k = 0; k < e.n_steps(); ++k)
        for (std::size_t f = 0; f < nf; ++f)
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) out[((k * nf + f) * n + r) * n + c] = e.at(k, f, keep[r], keep[c]);
    return SParamEnsemble(n, e.frequencies(), e.n_steps(), std::move(out));
}

}  // namespace

SParamEnsemble load_ensemble(const EnsembleManifest& m) {
    if (m.container) {
        const auto source = m.container->string();
        return select_roles(parse_ensemble_container(read_file(*m.container), source), m.roles, source);
    }
    if (m.files.empty()) throw InvalidArgument("empty ensemble manifest");
    std::optional<TouchstoneData> first;
    std::vector<cdouble> all;
    for (const auto& path : m.files) {
        auto step = read_touchstone(path);
        if (!first) {
            first = step;
        } else {
            if (step.n_ports != first->n_ports)
                throw ParseError(Kind::UnsupportedPortCount, path.string(), 0,
                                 "port count " + std::to_string(step.n_ports) + " differs from " +
                                     std::to_string(first->n_ports) + " in the first step file");
            try {
                align_sweeps(first->frequencies, step.frequencies);
            } catch (const SweepMismatch& e) {
                throw SweepMismatch(e.index(), path.string());
            }
        }
        all.insert(all.end(), step.matrices.begin(), step.matrices.end());
    }
    SParamEnsemble e(first->n_ports, first->frequencies, m.files.size(), std::move(all));
    return select_roles(e, m.roles, m.files.front().string());
}

}  // namespace chambereff::io
