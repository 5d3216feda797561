#pragma once

// On-disk formats: Touchstone v1, the ensemble container and manifest, pattern scans, power
// traces, reference-antenna tables, results tables and flat key = value configs.
//
// Every parser reports failures as ParseError with the source name and line. Numbers are written
// with 12 significant digits.

#include <chambereff/types.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chambereff::io {

namespace fs = std::filesystem;

// ------------------------------------------------------------------------------------------------
// Touchstone v1
// ------------------------------------------------------------------------------------------------

enum class TouchstoneFormat { RI, MA, DB };

struct TouchstoneData {
    std::size_t n_ports = 0;
    FrequencySweep frequencies;
    std::vector<cdouble> matrices;  // [freq][row][col]
    double reference_ohms = 50.0;

    const cdouble& at(std::size_t f, std::size_t row, std::size_t col) const {
        return matrices[(f * n_ports + row) * n_ports + col];
    }
};

// n_ports in 1..4. Missing option line means "# GHZ S MA R 50".
TouchstoneData parse_touchstone(std::string_view text, std::size_t n_ports, const std::string& source = {});
// Port count from the .sNp extension.
std::size_t ports_from_extension(const fs::path& path);
TouchstoneData read_touchstone(const fs::path& path);
std::string write_touchstone(const TouchstoneData& data, TouchstoneFormat format = TouchstoneFormat::RI);

// One step of an ensemble as a Touchstone record.
TouchstoneData ensemble_step(const SParamEnsemble& e, std::size_t step);

// ------------------------------------------------------------------------------------------------
// Ensembles
// ------------------------------------------------------------------------------------------------

// All steps in one text file: a "! ENSEMBLE ports=N steps=K" header, one Touchstone option line,
// then one "! STEP k" marker before each step's data block.
std::string write_ensemble_container(const SParamEnsemble& e, TouchstoneFormat format = TouchstoneFormat::RI);
SParamEnsemble parse_ensemble_container(std::string_view text, const std::string& source = {});

// Physical (1-based on disk, 0-based here) VNA ports used for each role.
struct PortRoles {
    std::size_t tx = 0;
    std::size_t rx1 = 1;
    std::optional<std::size_t> rx2;
};

struct EnsembleManifest {
    std::vector<fs::path> files;       // one Touchstone file per paddle step, in step order
    std::optional<fs::path> container;  // or a single container
    PortRoles roles;
    Port label = Port::Ch1;  // result label for a 2-role manifest
};

// Format:
//   # comment
//   container = run.sens        (or repeated: file = step_0000.s2p)
//   ports = tx:1, rx1:2, rx2:3
//   label = ch1
// Relative paths resolve against base_dir.
EnsembleManifest parse_manifest(std::string_view text, const fs::path& base_dir, const std::string& source = {});
EnsembleManifest read_manifest(const fs::path& path);
std::string write_manifest(const EnsembleManifest& m);

// Stacks steps in manifest order and keeps only the role ports, ordered {tx, rx1[, rx2]}.
SParamEnsemble load_ensemble(const EnsembleManifest& m);

// ------------------------------------------------------------------------------------------------
// Pattern scans, power traces, reference tables
// ------------------------------------------------------------------------------------------------

inline constexpr std::string_view kPatternHeader = "freq_hz,theta_deg,phi_deg,pol,intensity";
inline constexpr std::string_view kPowerHeader = "freq_hz,power_db";
inline constexpr std::string_view kResultsHeader = "freq_hz,method,port,eta_linear,eta_db,flags";

RadiationPattern parse_pattern_csv(std::string_view text, const std::string& source = {});
std::string write_pattern_csv(const RadiationPattern& p);

Spectrum parse_power_csv(std::string_view text, const std::string& source = {});
std::string write_power_csv(const Spectrum& power_db);

// Header "freq_hz" followed by gain_dbi and/or eta_ref.
ReferenceAntenna parse_reference_csv(std::string_view text, const std::string& source = {});
std::string write_reference_csv(const ReferenceAntenna& ref);

// ------------------------------------------------------------------------------------------------
// Results
// ------------------------------------------------------------------------------------------------

// Rows ordered by (method, port), then block order, then frequency; flags joined with ';'.
std::string write_results(const std::vector<EfficiencyResult>& results);
// A new block starts when method, port or the convention flag changes, or frequency stops increasing.
std::vector<EfficiencyResult> parse_results(std::string_view text, const std::string& source = {});

// ------------------------------------------------------------------------------------------------
// Config
// ------------------------------------------------------------------------------------------------

class Config {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    static Config parse(std::string_view text, const std::string& source = {});
    static Config read(const fs::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    const std::string& source() const noexcept { return source_; }

    // Typed getters; malformed values raise ParseError at the entry's line.
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // "re,im" or a single real value.
    cdouble get_complex(const std::string& key, cdouble fallback) const;

    // ParseError(UnknownKey) for the first key not in `known`.
    void require_known(const std::vector<std::string>& known) const;

    void set(const std::string& key, std::string value) { entries_[key] = {std::move(value), 0}; }
    std::string write() const;

private:
    std::map<std::string, Entry> entries_;
    std::string source_;
};

// ------------------------------------------------------------------------------------------------
// Files
// ------------------------------------------------------------------------------------------------

std::string read_file(const fs::path& path);
// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const fs::path& path, std::string_view content);

// %.12g, with "inf"/"-inf" for infinities.
std::string format_number(double x);

}  // namespace chambereff::io
