#include "tdl/commands.hpp"

#include "tdl/errors.hpp"
#include "tdl/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace tdl::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& text, const std::string& field)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(field + ": '" + text + "' is not a number");
    }
}

int parse_int(const std::string& text, const std::string& field)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(field + ": '" + text + "' is not an integer");
    }
}

std::string cell_text(const std::optional<Window>& w)
{
    if (!w) return "-";
    return "(" + std::to_string(w->l1) + "," + std::to_string(w->l2) + ")";
}

const PdpSpec& single_pdp(const RunConfig& cfg)
{
    if (cfg.pdps.size() != 1) throw UsageError("--pdp: this subcommand takes exactly one profile");
    return cfg.pdps.front();
}

double single_bandwidth(const RunConfig& cfg)
{
    if (cfg.bandwidths.size() != 1) {
        throw UsageError("--bandwidth: this subcommand takes exactly one bandwidth");
    }
    return cfg.bandwidths.front();
}

// Absolute bandwidth for a profile: B is given in units of 1 / tau_ds.
double absolute_bandwidth(const PdpSpec& spec, double b_times_tau)
{
    if (!(b_times_tau > 0.0)) throw UsageError("--bandwidth: must be positive");
    return b_times_tau / spec.tau_ds;
}

TapGrid resolve_grid(const RunConfig& cfg, const PdpSpec& spec, double bandwidth,
                     std::ostream& log)
{
    if (cfg.window) return TapGrid::make(bandwidth, cfg.window->first, cfg.window->second);
    const Window w = min_window(spec, bandwidth, {cfg.threshold, cfg.min_side});
    log << "window: auto -> (" << w.l1 << "," << w.l2 << ") capturing " << w.energy << "\n";
    return TapGrid::make(bandwidth, w.l1, w.l2);
}

SoundingConfig base_config(const RunConfig& cfg, double bandwidth)
{
    if (cfg.n_obs == 0) throw UsageError("--n: must be at least 1");
    if (!(cfg.px > 0.0)) throw UsageError("--px: must be positive");
    return SoundingConfig{cfg.n_obs, cfg.px, 1.0, bandwidth};
}

} // namespace

std::vector<double> parse_snr_list(const std::string& text)
{
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw UsageError("--snr-db: range must be start:step:stop");
        const double start = parse_number(parts[0], "--snr-db");
        const double step = parse_number(parts[1], "--snr-db");
        const double stop = parse_number(parts[2], "--snr-db");
        if (!(step > 0.0) || stop < start) {
            throw UsageError("--snr-db: range needs step > 0 and stop >= start");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) throw UsageError("--snr-db: range has too many points");
        for (long i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
    } else {
        for (const auto& part : split(text, ',')) values.push_back(parse_number(part, "--snr-db"));
    }
    if (values.empty()) throw UsageError("--snr-db: empty list");
    return values;
}

std::optional<std::pair<int, int>> parse_window(const std::string& text)
{
    if (text == "auto") return std::nullopt;
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--window: expected L1,L2 or auto");
    const int l1 = parse_int(parts[0], "--window");
    const int l2 = parse_int(parts[1], "--window");
    if (l1 < 0 || l2 < 0) throw UsageError("--window: L1 and L2 must be nonnegative");
    return std::pair{l1, l2};
}

std::vector<PdpSpec> parse_pdp_list(const std::string& text, double tau_m)
{
    std::vector<PdpSpec> specs;
    const auto start = text.find_first_not_of(" \t");
    if (start != std::string::npos && text[start] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("--pdp: malformed JSON: ") + e.what());
        }
        for (const auto& item : j) specs.push_back(io::pdp_from_json(item, tau_m));
    } else if (start != std::string::npos && text[start] == '{') {
        specs.push_back(io::parse_pdp(text, tau_m));
    } else {
        for (const auto& name : split(text, ',')) {
            specs.push_back(PdpSpec::make(parse_pdp_kind(name), 1.0, tau_m));
        }
    }
    if (specs.empty()) throw UsageError("--pdp: no profile given");
    return specs;
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out)
{
    CLI::App app{"Channel-estimation bounds for tapped-delay-line channel models", "tdlb"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string pdp_text;
    std::string bandwidth_text;
    std::string window_text = "auto";
    std::string snr_text;
    std::string format_text = "csv";
    std::string pilot_text = "chu";
    std::string estimator_text = "ls,mmse";
    std::optional<std::string> pilot_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--pdp", pdp_text, "Profile: JSON object/array or comma list of kinds");
        sub->add_option("--bandwidth", bandwidth_text, "B in units of 1/tau_ds (comma list)");
        sub->add_option("--window", window_text, "L1,L2 or auto");
        sub->add_option("--n", cfg.n_obs, "Observation samples N");
        sub->add_option("--snr-db", snr_text, "Comma list or start:step:stop");
        sub->add_option("--px", cfg.px, "Pilot power Px");
        sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
        sub->add_option("--seed", cfg.seed, "Master seed");
        sub->add_option("--threshold", cfg.threshold, "Energy fraction for auto windows");
        sub->add_option("--min-side", cfg.min_side, "Smallest L1 and L2 for auto windows");
        sub->add_option("--tau-m", cfg.tau_m, "Truncated exponential span (default 6 tau_ds)");
        sub->add_option("--format", format_text, "csv or json");
        sub->add_option("--out", cfg.out, "Output path or - for stdout");
        sub->add_option("--pilot", pilot_text, "constant_modulus, gaussian or chu");
        sub->add_option("--pilot-file", pilot_file, "Pilot samples, one re,im per line");
        sub->add_option("--pilot-length", cfg.pilot_length, "Generated pilot length");
        sub->add_option("--max-lag", cfg.max_lag, "Largest autocorrelation lag");
        sub->add_option("--psd-points", cfg.psd_points, "Frequency samples of the spectrum");
        sub->add_option("--estimators", estimator_text, "Comma list of ls, mmse");
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    };
    for (const char* name : {"table1", "bounds", "simulate", "pilot-spectrum", "covariance"}) {
        add_common(app.add_subcommand(name));
    }
    app.get_subcommand("table1")->description("Minimal tap windows capturing a fraction of the energy");
    app.get_subcommand("bounds")->description("CRB and Bayesian CRB versus SNR");
    app.get_subcommand("simulate")->description("Monte Carlo LS/MMSE validation of the bounds");
    app.get_subcommand("pilot-spectrum")->description("Pilot autocorrelation and folded spectrum");
    app.get_subcommand("covariance")->description("Export the tap covariance matrix");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
    if (auto* sub = app.get_subcommand(cfg.subcommand); sub->count("--help") > 0) {
        out << sub->help();
        return std::nullopt;
    }

    if (format_text == "csv") {
        cfg.format = Format::Csv;
    } else if (format_text == "json") {
        cfg.format = Format::Json;
    } else {
        throw UsageError("--format: expected csv or json, got '" + format_text + "'");
    }
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
        throw UsageError("--threshold: must lie in (0, 1)");
    }
    if (cfg.min_side < 0) throw UsageError("--min-side: must be nonnegative");
    if (cfg.tau_m < 0.0) throw UsageError("--tau-m: must be positive");
    if (!(cfg.px > 0.0)) throw UsageError("--px: must be positive");
    if (cfg.n_obs == 0) throw UsageError("--n: must be at least 1");
    if (cfg.trials == 0) throw UsageError("--trials: must be at least 1");
    cfg.window = parse_window(window_text);
    cfg.pilot_kind = parse_pilot_kind(pilot_text);
    cfg.pilot_file = pilot_file;
    cfg.estimators.clear();
    for (const auto& name : split(estimator_text, ',')) {
        cfg.estimators.push_back(parse_estimator(name));
    }
    if (cfg.estimators.empty()) throw UsageError("--estimators: empty list");

    const bool is_table = cfg.subcommand == "table1";
    if (!bandwidth_text.empty()) {
        cfg.bandwidths.clear();
        for (const auto& part : split(bandwidth_text, ',')) {
            const double b = parse_number(part, "--bandwidth");
            if (!(b > 0.0)) throw UsageError("--bandwidth: must be positive");
            cfg.bandwidths.push_back(b);
        }
    } else if (!is_table) {
        cfg.bandwidths = {1.0};
    }

    cfg.pdp_text = pdp_text;
    if (pdp_text.empty()) {
        pdp_text = is_table ? "exponential,gaussian,uniform,trunc_exponential" : "exponential";
    }
    if (is_table) {
        // A calibration failure belongs to its own cell, so keep going.
        for (const auto& name : split(pdp_text, ',')) {
            if (name.find('{') != std::string::npos || name.find('[') != std::string::npos) {
                cfg.pdps = parse_pdp_list(pdp_text, cfg.tau_m);
                break;
            }
            const PdpKind kind = parse_pdp_kind(name);
            PdpSpec spec;
            spec.kind = kind;
            spec.te_tau_m = cfg.tau_m;
            cfg.pdps.push_back(spec);
        }
    } else {
        cfg.pdps = parse_pdp_list(pdp_text, cfg.tau_m);
    }

    if (snr_text.empty()) snr_text = cfg.subcommand == "simulate" ? "-10,0,10" : "-20:5:30";
    cfg.snr_db = parse_snr_list(snr_text);
    return cfg;
}

std::optional<std::pair<int, int>> table1_reference(PdpKind kind, double bandwidth)
{
    static const std::map<std::pair<PdpKind, int>, std::pair<int, int>> published{
        {{PdpKind::Exponential, 1}, {1, 5}},
        {{PdpKind::Gaussian, 1}, {3, 4}},
        {{PdpKind::Uniform, 1}, {1, 6}},
        {{PdpKind::TruncatedExponential, 1}, {1, 6}},
        {{PdpKind::Exponential, 10}, {1, 48}},
        {{PdpKind::Gaussian, 10}, {33, 33}},
        {{PdpKind::Uniform, 10}, {1, 61}},
        {{PdpKind::TruncatedExponential, 10}, {1, 63}},
    };
    if (bandwidth != 1.0 && bandwidth != 10.0) return std::nullopt;
    const auto it = published.find({kind, static_cast<int>(bandwidth)});
    if (it == published.end()) return std::nullopt;
    return it->second;
}

bool Table1Cell::matches_reference() const
{
    return window && reference && window->l1 == reference->first &&
           window->l2 == reference->second;
}

std::vector<Table1Cell> cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    std::vector<Table1Cell> cells;
    for (double b : cfg.bandwidths) {
        for (const PdpSpec& raw : cfg.pdps) {
            Table1Cell cell;
            cell.kind = raw.kind;
            cell.bandwidth = b;
            cell.reference = table1_reference(raw.kind, b);
            try {
                // Specs from the kind list are calibrated here, per cell.
                const PdpSpec spec = (raw.kind == PdpKind::TruncatedExponential &&
                                      raw.te_tau_0 <= 0.0)
                                         ? PdpSpec::truncated_exponential(raw.tau_ds, raw.te_tau_m)
                                         : raw;
                cell.window =
                    min_window(spec, absolute_bandwidth(spec, b), {cfg.threshold, cfg.min_side});
            } catch (const Error& e) {
                cell.error = e.category() + ": " + e.what();
            }
            cells.push_back(std::move(cell));
        }
    }

    // Aligned table on the log stream, machine-readable rows on `out`.
    log << std::left << std::setw(10) << "B*tau_ds";
    for (const PdpSpec& spec : cfg.pdps) log << std::setw(22) << to_string(spec.kind);
    log << "\n";
    std::size_t idx = 0;
    for (double b : cfg.bandwidths) {
        log << std::setw(10) << io::fmt12(b);
        for (std::size_t k = 0; k < cfg.pdps.size(); ++k, ++idx) {
            const Table1Cell& c = cells[idx];
            std::string text = c.error.empty() ? cell_text(c.window) : "error";
            if (c.reference && !c.matches_reference()) {
                text += " [ref (" + std::to_string(c.reference->first) + "," +
                        std::to_string(c.reference->second) + ")]";
            }
            log << std::setw(22) << text;
        }
        log << "\n";
    }
    for (const auto& c : cells) {
        if (!c.error.empty()) log << "error: " << c.error << "\n";
    }

    if (cfg.format == Format::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cells) {
            nlohmann::json item{{"pdp", std::string(to_string(c.kind))}, {"bandwidth", c.bandwidth}};
            if (c.window) {
                item["L1"] = c.window->l1;
                item["L2"] = c.window->l2;
                item["energy"] = c.window->energy;
            }
            if (c.reference) {
                item["reference"] = {c.reference->first, c.reference->second};
                item["matches_reference"] = c.matches_reference();
            }
            item["status"] = c.error.empty() ? "ok" : c.error;
            arr.push_back(std::move(item));
        }
        out << arr.dump(2) << "\n";
    } else {
        out << "pdp,bandwidth,L1,L2,energy,reference_L1,reference_L2,matches_reference,status\n";
        for (const auto& c : cells) {
            out << to_string(c.kind) << ',' << io::fmt12(c.bandwidth) << ',';
            if (c.window) {
                out << c.window->l1 << ',' << c.window->l2 << ',' << io::fmt12(c.window->energy);
            } else {
                out << ",,";
            }
            out << ',';
            if (c.reference) {
                out << c.reference->first << ',' << c.reference->second << ','
                    << (c.matches_reference() ? "yes" : "no");
            } else {
                out << ",,";
            }
            const std::string status =
                c.error.empty() ? "ok" : "error:" + c.error.substr(0, c.error.find(':'));
            out << ',' << status << '\n';
        }
    }
    return cells;
}

BoundCurve cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    const PdpSpec& spec = single_pdp(cfg);
    const double bandwidth = absolute_bandwidth(spec, single_bandwidth(cfg));
    const TapGrid grid = resolve_grid(cfg, spec, bandwidth, log);
    const TapCovariance rh = build_covariance(spec, grid, cfg.threads);
    log << "covariance: L=" << grid.size() << " trace=" << rh.total_energy
        << " clamped=" << rh.clamp_count << "\n";
    const BoundCurve curve = bound_curve(spec, rh, base_config(cfg, bandwidth), cfg.snr_db,
                                         cfg.threads);
    if (cfg.format == Format::Json) {
        nlohmann::json j{{"pdp", io::to_json(spec)},
                         {"bandwidth", bandwidth},
                         {"L1", grid.l1},
                         {"L2", grid.l2},
                         {"N", cfg.n_obs},
                         {"points", io::to_json(curve)}};
        out << j.dump(2) << "\n";
    } else {
        io::write_bound_curve_csv(out, curve);
    }
    return curve;
}

std::vector<SimRow> cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    const PdpSpec& spec = single_pdp(cfg);
    const double bandwidth = absolute_bandwidth(spec, single_bandwidth(cfg));
    const TapGrid grid = resolve_grid(cfg, spec, bandwidth, log);
    const TapCovariance rh = build_covariance(spec, grid, cfg.threads);

    std::optional<PilotSequence> pilot;
    if (cfg.pilot_file) {
        pilot = io::read_pilot_file(*cfg.pilot_file, 1 - grid.l2, cfg.px, 2.0 * bandwidth);
    }

    std::vector<SimRow> rows;
    for (double snr_db : cfg.snr_db) {
        TrialConfig tc;
        tc.cfg = SoundingConfig::from_snr_db(cfg.n_obs, cfg.px, snr_db, bandwidth);
        tc.grid = grid;
        tc.pilot_kind = cfg.pilot_kind;
        tc.pilot_seed = cfg.seed;
        tc.pilot = pilot;
        tc.master_seed = cfg.seed;
        tc.n_trials = cfg.trials;
        tc.estimators = cfg.estimators;
        tc.threads = cfg.threads;
        SimResult result;
        try {
            result = run_trials(tc, rh);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "simulate at " << snr_db << " dB: " << e.what();
            throw Error(e.category(), msg.str());
        }
        log << "simulate: " << snr_db << " dB, " << cfg.trials << " trials in "
            << result.wall_seconds << " s\n";
        for (auto& s : result.stats) {
            SimRow row;
            row.snr_db = snr_db;
            row.bound = s.estimator == Estimator::LS ? crb_beta(grid.size(), tc.cfg)
                                                     : bcrb_trace(rh, tc.cfg);
            row.stats = std::move(s);
            rows.push_back(std::move(row));
        }
    }

    if (cfg.format == Format::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"snr_db", r.snr_db},
                           {"estimator", std::string(to_string(r.stats.estimator))},
                           {"mse", r.stats.mse},
                           {"stderr", r.stats.stderr_mse},
                           {"trials", r.stats.trials},
                           {"bound", r.bound},
                           {"theory", r.stats.theoretical_mse}});
        }
        out << nlohmann::json{{"pdp", io::to_json(spec)},
                              {"L1", grid.l1},
                              {"L2", grid.l2},
                              {"N", cfg.n_obs},
                              {"pilot", cfg.pilot_file ? "external"
                                                       : std::string(to_string(cfg.pilot_kind))},
                              {"rows", arr}}
                   .dump(2)
            << "\n";
    } else {
        out << "snr_db,estimator,mse,stderr,trials,bound,theory\n";
        for (const auto& r : rows) {
            out << io::fmt12(r.snr_db) << ',' << to_string(r.stats.estimator) << ','
                << io::fmt12(r.stats.mse) << ',' << io::fmt12(r.stats.stderr_mse) << ','
                << r.stats.trials << ',' << io::fmt12(r.bound) << ','
                << io::fmt12(r.stats.theoretical_mse) << '\n';
        }
    }
    return rows;
}

PilotSpectrum cmd_pilot_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&)
{
    const double b_times_tau = single_bandwidth(cfg);
    const double tau_ds = cfg.pdps.empty() ? 1.0 : cfg.pdps.front().tau_ds;
    const double fs = 2.0 * b_times_tau / tau_ds;
    PilotSpectrum result;
    result.pilot = cfg.pilot_file
                       ? io::read_pilot_file(*cfg.pilot_file, 0, cfg.px, fs)
                       : gen_pilot(cfg.pilot_kind, cfg.pilot_length, cfg.px, cfg.seed, 0, fs);
    result.lags = sample_autocorr(result.pilot, cfg.max_lag);
    const std::size_t points = std::max<std::size_t>(cfg.psd_points, 2);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = -0.5 * fs + fs * static_cast<double>(i) / static_cast<double>(points - 1);
        result.psd.emplace_back(f, folded_psd(result.lags, f, fs));
    }

    if (cfg.format == Format::Json) {
        nlohmann::json lags = nlohmann::json::array();
        for (const auto& r : result.lags) lags.push_back({r.real(), r.imag()});
        nlohmann::json psd = nlohmann::json::array();
        for (const auto& [f, s] : result.psd) psd.push_back({f, s});
        out << nlohmann::json{{"pilot", std::string(to_string(result.pilot.kind))},
                              {"length", result.pilot.size()},
                              {"px", cfg.px},
                              {"fs", fs},
                              {"lags", lags},
                              {"psd", psd}}
                   .dump(2)
            << "\n";
    } else {
        out << "lag,re,im\n";
        for (std::size_t k = 0; k < result.lags.size(); ++k) {
            out << k << ',' << io::fmt12(result.lags[k].real()) << ','
                << io::fmt12(result.lags[k].imag()) << '\n';
        }
        out << "\nf,psd\n";
        for (const auto& [f, s] : result.psd) out << io::fmt12(f) << ',' << io::fmt12(s) << '\n';
    }
    return result;
}

TapCovariance cmd_covariance(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    const PdpSpec& spec = single_pdp(cfg);
    const double bandwidth = absolute_bandwidth(spec, single_bandwidth(cfg));
    const TapGrid grid = resolve_grid(cfg, spec, bandwidth, log);
    TapCovariance rh = build_covariance(spec, grid, cfg.threads);
    if (cfg.format == Format::Json) {
        nlohmann::json j = io::to_json(rh);
        j["pdp"] = io::to_json(spec);
        out << j.dump(2) << "\n";
    } else {
        io::write_covariance_csv(out, rh);
    }
    return rh;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        const auto cfg = parse_args(args, out);
        if (!cfg) return 0;

        std::ofstream file;
        std::ostream* sink = &out;
        if (cfg->out != "-") {
            file.open(cfg->out);
            if (!file) throw IoError("cannot open output file " + cfg->out);
            sink = &file;
        }

        if (cfg->subcommand == "table1") {
            cmd_table1(*cfg, *sink, err);
        } else if (cfg->subcommand == "bounds") {
            cmd_bounds(*cfg, *sink, err);
        } else if (cfg->subcommand == "simulate") {
            cmd_simulate(*cfg, *sink, err);
        } else if (cfg->subcommand == "pilot-spectrum") {
            cmd_pilot_spectrum(*cfg, *sink, err);
        } else if (cfg->subcommand == "covariance") {
            cmd_covariance(*cfg, *sink, err);
        } else {
            throw UsageError("unknown subcommand " + cfg->subcommand);
        }
        sink->flush();
        return 0;
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << e.category() << ": " << msg << "\n";
        return e.category() == "usage" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

} // namespace tdl::cli
