#include "tdl/io.hpp"

#include "tdl/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tdl::io {

std::string fmt12(double value)
{
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

PdpSpec pdp_from_json(const nlohmann::json& j, double default_tau_m)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw UsageError("pdp: JSON needs a string field \"kind\"");
    }
    const PdpKind kind = parse_pdp_kind(j["kind"].get<std::string>());
    double tau_ds = 1.0;
    double tau_m = default_tau_m;
    if (j.contains("tau_ds")) {
        if (!j["tau_ds"].is_number()) throw UsageError("pdp: \"tau_ds\" must be a number");
        tau_ds = j["tau_ds"].get<double>();
    }
    if (j.contains("tau_m") && !j["tau_m"].is_null()) {
        if (!j["tau_m"].is_number()) throw UsageError("pdp: \"tau_m\" must be a number");
        tau_m = j["tau_m"].get<double>();
    }
    if (!(tau_ds > 0.0)) throw UsageError("pdp: \"tau_ds\" must be positive");
    return PdpSpec::make(kind, tau_ds, tau_m);
}

PdpSpec parse_pdp(std::string_view text, double default_tau_m)
{
    const auto start = text.find_first_not_of(" \t");
    if (start != std::string_view::npos && text[start] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("pdp: malformed JSON: ") + e.what());
        }
        return pdp_from_json(j, default_tau_m);
    }
    return PdpSpec::make(parse_pdp_kind(text), 1.0, default_tau_m);
}

nlohmann::json to_json(const PdpSpec& spec)
{
    nlohmann::json j{{"kind", std::string(to_string(spec.kind))}, {"tau_ds", spec.tau_ds}};
    if (spec.kind == PdpKind::TruncatedExponential) {
        j["tau_m"] = spec.te_tau_m;
        j["tau_0"] = spec.te_tau_0;
    }
    return j;
}

PilotSequence read_pilot_csv(std::istream& in, std::int64_t first_index, double px, double fs)
{
    PilotSequence seq;
    seq.kind = PilotKind::External;
    seq.first_index = first_index;
    seq.px = px;
    seq.fs = fs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        std::istringstream fields(line);
        double re = 0.0;
        double im = 0.0;
        char comma = 0;
        if (!(fields >> re >> comma >> im) || comma != ',') {
            throw IoError("pilot file: line " + std::to_string(line_no) +
                          " is not \"re,im\": " + line);
        }
        seq.samples.emplace_back(re, im);
    }
    if (seq.samples.empty()) throw IoError("pilot file: no samples");
    return seq;
}

PilotSequence read_pilot_file(const std::string& path, std::int64_t first_index, double px,
                              double fs)
{
    std::ifstream in(path);
    if (!in) throw IoError("pilot file: cannot open " + path);
    return read_pilot_csv(in, first_index, px, fs);
}

void write_pilot_csv(std::ostream& out, const PilotSequence& x)
{
    char buf[96];
    for (const auto& s : x.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.real(), s.imag());
        out << buf;
    }
}

void write_covariance_csv(std::ostream& out, const TapCovariance& cov)
{
    out << "l,p,re,im\n";
    const TapGrid& g = cov.grid;
    for (int l = g.first(); l <= g.last(); ++l) {
        for (int p = g.first(); p <= g.last(); ++p) {
            const auto v = cov.matrix(g.slot(l), g.slot(p));
            out << l << ',' << p << ',' << fmt12(v.real()) << ',' << fmt12(v.imag()) << '\n';
        }
    }
}

nlohmann::json to_json(const TapCovariance& cov)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cov.matrix.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < cov.matrix.cols(); ++c) {
            row.push_back({cov.matrix(r, c).real(), cov.matrix(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    std::vector<double> eig(cov.eigenvalues.data(), cov.eigenvalues.data() + cov.eigenvalues.size());
    return {{"bandwidth", cov.grid.bandwidth},
            {"L1", cov.grid.l1},
            {"L2", cov.grid.l2},
            {"matrix", std::move(rows)},
            {"eigenvalues", eig},
            {"trace", cov.total_energy},
            {"clamp_count", cov.clamp_count}};
}

void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve)
{
    out << "snr_db,beta,bcrb,bcrb_wideband\n";
    for (const auto& pt : curve) {
        out << fmt12(pt.snr_db) << ',' << fmt12(pt.beta) << ',' << fmt12(pt.bcrb_eigen) << ','
            << fmt12(pt.bcrb_wideband) << '\n';
    }
}

nlohmann::json to_json(const BoundCurve& curve)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& pt : curve) {
        nlohmann::json item{{"snr_db", pt.snr_db},         {"snr", pt.snr},
                            {"beta", pt.beta},             {"bcrb", pt.bcrb_eigen},
                            {"bcrb_exact", pt.bcrb_exact}};
        if (std::isnan(pt.bcrb_wideband)) {
            item["bcrb_wideband"] = nullptr;
        } else {
            item["bcrb_wideband"] = pt.bcrb_wideband;
        }
        arr.push_back(std::move(item));
    }
    return arr;
}

} // namespace tdl::io
