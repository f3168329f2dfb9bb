#pragma once

#include "tdl/bounds.hpp"
#include "tdl/covariance.hpp"
#include "tdl/montecarlo.hpp"
#include "tdl/pdp.hpp"
#include "tdl/pilots.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdl::cli {

enum class Format
{
    Csv,
    Json,
};

/// Everything a subcommand needs. Times are in units of tau_ds and
/// bandwidths in units of 1 / tau_ds.
struct RunConfig
{
    std::string subcommand;
    /// Raw --pdp text, resolved after --tau-m is known.
    std::string pdp_text;
    std::vector<PdpSpec> pdps;
    std::vector<double> bandwidths{1.0, 10.0};
    /// nullopt = "auto" (min_window).
    std::optional<std::pair<int, int>> window;
    std::size_t n_obs = 100;
    std::vector<double> snr_db;
    double px = 1.0;
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    double threshold = 0.9;
    int min_side = 1;
    double tau_m = 0.0;
    Format format = Format::Csv;
    std::string out = "-";
    PilotKind pilot_kind = PilotKind::Chu;
    std::optional<std::string> pilot_file;
    std::size_t pilot_length = 4096;
    std::size_t max_lag = 16;
    std::size_t psd_points = 65;
    std::vector<Estimator> estimators{Estimator::LS, Estimator::MMSE};
    unsigned threads = 0;
};

/// "a,b,c" or "start:step:stop" (inclusive). Throws UsageError.
std::vector<double> parse_snr_list(const std::string& text);
/// "L1,L2" or "auto". Throws UsageError.
std::optional<std::pair<int, int>> parse_window(const std::string& text);
/// JSON object, JSON array of objects, or a comma list of kind names.
std::vector<PdpSpec> parse_pdp_list(const std::string& text, double tau_m);

/// Parses argv (argv[0] is the program name). Throws UsageError, and
/// returns nullopt after printing help when --help is given.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

struct Table1Cell
{
    PdpKind kind = PdpKind::Exponential;
    double bandwidth = 1.0;
    std::optional<Window> window;
    /// Published (L1, L2) for this cell, when there is one.
    std::optional<std::pair<int, int>> reference;
    /// Empty on success, otherwise "category: message".
    std::string error;

    bool matches_reference() const;
};

/// Published Table I cell for (kind, B tau_ds), if tabulated.
std::optional<std::pair<int, int>> table1_reference(PdpKind kind, double bandwidth);

std::vector<Table1Cell> cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& log);
BoundCurve cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& log);

struct SimRow
{
    double snr_db = 0.0;
    EstimatorStats stats;
    /// beta for LS, the Bayesian bound for MMSE.
    double bound = 0.0;
};
std::vector<SimRow> cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log);

struct PilotSpectrum
{
    PilotSequence pilot;
    std::vector<std::complex<double>> lags;
    std::vector<std::pair<double, double>> psd;
};
PilotSpectrum cmd_pilot_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& log);

TapCovariance cmd_covariance(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses, dispatches and maps errors to "error: <category>: <message>" on
/// `err`. Returns the process exit code: 0 ok, 2 usage, 1 anything else.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tdl::cli
