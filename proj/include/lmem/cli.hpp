#pragma once

// Command-line layer: a plain run-configuration struct, parsers for the
// user-facing string formats (angular momenta, complex numbers,
// polarizations, initial states, density-matrix files), and the three
// commands — analyze, scan, simulate — each returning its report as a
// string so the layer stays testable without spawning processes.
//
// Conventions shared by every command:
//   * exit codes: 0 success, 1 internal tolerance failure, 2 invalid
//     configuration or input (the binary maps ToleranceError -> 1 and
//     ContractError -> 2);
//   * floats are printed with 12 significant digits, so identical run
//     configurations produce byte-identical reports;
//   * the faithfulness tolerance defaults to 1e-9 and can be overridden
//     through the LAMBDA_MEMORY_TOL environment variable.

#include "lmem/dynamics.hpp"
#include "lmem/memory.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmem::cli {

// ---------------------------------------------------------------------------
// Run configuration (filled by the argument parser in the binary).

struct RunConfig {
    std::string subcommand;       // analyze | scan | simulate
    std::string ja, jb, jc;       // angular momenta as "2" or "3/2"
    std::string drive = "pi";     // name, q-component triple, or ';' list (scan)
    std::string l1 = "sigma-";    // cavity mode 1 polarization
    std::string l2 = "sigma+";    // cavity mode 2 polarization
    double delta = 0.0;           // two-photon detuning
    std::string initial = "m=0";  // m=<value> | mixed | density-matrix file
    std::string xi1 = "1";        // qubit amplitude on mode 1, "re" or "re,im"
    std::string xi2 = "0";        // qubit amplitude on mode 2
    double t1 = 200.0;            // storage stage duration
    double tau = 0.0;             // hold duration
    double t2 = 0.0;              // retrieval duration (0 = storage only)
    double omega_a = 1.0;         // peak drive amplitude (both stages)
    double omega_b = 1.0;         // peak coupling amplitude (both stages)
    double dt = 0.02;             // RK4 step bound
    std::string shape = "sin2";   // sin2 | linear
    std::string format;           // "" = text; analyze: json, scan: csv
    std::string out;              // report path; simulate: trajectory CSV path
    double tol = kFaithfulTol;    // faithfulness tolerance (env override)
};

// ---------------------------------------------------------------------------
// Deterministic formatting helpers.

// 12 significant digits; -0 collapses to 0 so output is sign-stable.
inline std::string fmt12(double x) {
    if (x == 0.0) x = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
}

inline std::string fmt_bool(bool b) { return b ? "true" : "false"; }

inline std::string fmt_complex(Complex z) {
    const double re = z.real() == 0.0 ? 0.0 : z.real();
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    return fmt12(re) + (im < 0.0 ? " - " : " + ") + fmt12(std::abs(im)) + "i";
}

inline std::string json_pair(Complex z) {
    return "[" + fmt12(z.real()) + ", " + fmt12(z.imag()) + "]";
}

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

// ---------------------------------------------------------------------------
// String parsers.

inline std::string trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const std::string t = trimmed(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

inline double parse_real(const std::string& text, const std::string& what) {
    const std::string t = trimmed(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(v))
            throw ContractError(what + ": cannot parse number '" + text + "'");
        return v;
    } catch (const ContractError&) {
        throw;
    } catch (const std::exception&) {
        throw ContractError(what + ": cannot parse number '" + text + "'");
    }
}

// "re" or "re,im".
inline Complex parse_complex(const std::string& text, const std::string& what) {
    const std::string t = trimmed(text);
    const std::size_t comma = t.find(',');
    if (comma == std::string::npos) return Complex(parse_real(t, what), 0.0);
    if (t.find(',', comma + 1) != std::string::npos)
        throw ContractError(what + ": expected \"re\" or \"re,im\", got '" + text + "'");
    return Complex(parse_real(t.substr(0, comma), what),
                   parse_real(t.substr(comma + 1), what));
}

// Magnetic quantum number: "-1", "0", "1/2", "-3/2", ... -> twice its value.
inline int parse_twice_m(const std::string& text) {
    std::string t = trimmed(text);
    int sign = 1;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        if (t[0] == '-') sign = -1;
        t.erase(0, 1);
    }
    try {
        return sign * TwoJ::parse(t).twice;
    } catch (const ContractError&) {
        throw ContractError("initial state: cannot parse m value '" + text +
                            "' (expected an integer like \"-1\" or a half-integer like "
                            "\"1/2\")");
    }
}

// A name (pi, x, y, sigma+, sigma-) or a ':'-separated triple of spherical
// components q = -1, 0, +1, each "re" or "re,im"; triples are normalized.
inline Polarization parse_polarization(const std::string& text) {
    const std::string t = trimmed(text);
    if (t.find(':') == std::string::npos) return Polarization::from_name(t);
    const std::vector<std::string> parts = split_list(t, ':');
    if (parts.size() != 3)
        throw ContractError("polarization '" + text +
                            "': component form needs exactly three ':'-separated entries "
                            "(q = -1, 0, +1)");
    Complex c[3];
    double norm2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        c[i] = parse_complex(parts[static_cast<std::size_t>(i)], "polarization component");
        norm2 += std::norm(c[i]);
    }
    if (!(norm2 > 0.0))
        throw ContractError("polarization '" + text + "': components must not all vanish");
    const double inv = 1.0 / std::sqrt(norm2);
    return Polarization::from_components(c[0] * inv, c[1] * inv, c[2] * inv);
}

// ---------------------------------------------------------------------------
// Initial-state input, including the density-matrix file format: a JSON
// array of rows, each row an array of [re, im] pairs.

inline AtomicDensityMatrix load_density_file(const std::string& path, TwoJ jb) {
    std::ifstream in(path);
    if (!in)
        throw ContractError("density-matrix file '" + path + "': cannot open for reading");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError("density-matrix file '" + path + "': " + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw ContractError("density-matrix file '" + path +
                            "': top level must be a non-empty array of rows");
    const int n = static_cast<int>(doc.size());
    if (n != jb.dim())
        throw ContractError("density-matrix file '" + path + "': matrix has " +
                            std::to_string(n) + " rows but J_b=" + jb.str() + " needs " +
                            std::to_string(jb.dim()));
    CMatrix rho(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = doc[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ContractError("density-matrix file '" + path + "': row " +
                                std::to_string(i) + " must be an array of " +
                                std::to_string(n) + " [re, im] pairs");
        for (int j = 0; j < n; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                !cell[1].is_number())
                throw ContractError("density-matrix file '" + path + "': entry (" +
                                    std::to_string(i) + ", " + std::to_string(j) +
                                    ") must be an [re, im] pair of numbers");
            rho(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    try {
        return AtomicDensityMatrix::from_matrix(Level::B, jb, std::move(rho));
    } catch (const ContractError& e) {
        throw ContractError("density-matrix file '" + path + "': " + e.what());
    }
}

inline AtomicDensityMatrix parse_initial(const std::string& spec, TwoJ jb) {
    const std::string t = trimmed(spec);
    if (t == "mixed") return AtomicDensityMatrix::maximally_mixed(Level::B, jb);
    if (t.rfind("m=", 0) == 0)
        return AtomicDensityMatrix::zeeman_pure(Level::B, jb, parse_twice_m(t.substr(2)));
    return load_density_file(t, jb);
}

// ---------------------------------------------------------------------------
// Configuration assembly.

inline double faithful_tolerance_from_env() {
    const char* s = std::getenv("LAMBDA_MEMORY_TOL");
    if (s == nullptr || *s == '\0') return kFaithfulTol;
    const double v = parse_real(s, "LAMBDA_MEMORY_TOL");
    if (!(v > 0.0))
        throw ContractError("LAMBDA_MEMORY_TOL must be a positive number, got '" +
                            std::string(s) + "'");
    return v;
}

inline SystemConfig make_system(const RunConfig& rc, const Polarization& drive) {
    if (rc.ja.empty() || rc.jb.empty() || rc.jc.empty())
        throw ContractError("all of --ja, --jb, --jc are required");
    const LevelScheme scheme = LevelScheme::parse(rc.ja, rc.jb, rc.jc);
    return SystemConfig(scheme, drive, parse_polarization(rc.l1), parse_polarization(rc.l2),
                        rc.delta);
}

inline PolarizationQubit make_qubit(const RunConfig& rc) {
    return PolarizationQubit::normalized(parse_complex(rc.xi1, "--xi1"),
                                         parse_complex(rc.xi2, "--xi2"));
}

inline std::string scheme_str(const LevelScheme& s) {
    return "Jb=" + s.jb.str() + " -> Jc=" + s.jc.str() + " -> Ja=" + s.ja.str();
}

inline std::string resolve_format(const RunConfig& rc, std::string_view text_default) {
    if (rc.format.empty()) return std::string(text_default);
    return rc.format;
}

// ---------------------------------------------------------------------------
// analyze

inline std::string analyze_report_json(const SystemConfig& cfg, const Decomposition& d,
                                       const StorageReport& rep) {
    const FamilyCounts c = d.counts();
    auto pol = [](const Polarization& l) {
        return "[" + json_pair(l.component(-1)) + ", " + json_pair(l.component(0)) + ", " +
               json_pair(l.component(1)) + "]";
    };
    std::ostringstream o;
    o << "{\n";
    o << "  \"scheme\": {\"ja\": " << json_quote(cfg.scheme.ja.str()) << ", \"jb\": "
      << json_quote(cfg.scheme.jb.str()) << ", \"jc\": " << json_quote(cfg.scheme.jc.str())
      << "},\n";
    o << "  \"polarizations\": {\"drive\": " << pol(cfg.drive) << ", \"l1\": "
      << pol(cfg.mode1) << ", \"l2\": " << pol(cfg.mode2) << "},\n";
    o << "  \"counts\": {\"shared\": " << c.shared << ", \"a_only\": " << c.a_only
      << ", \"b_only\": " << c.b_only << ", \"a_residual\": " << c.a_residual
      << ", \"b_residual\": " << c.b_residual << ", \"bright_pairs\": " << c.bright_pairs
      << ", \"c_uncoupled\": " << c.c_uncoupled << ", \"dark_total\": " << c.dark_total()
      << "},\n";
    o << "  \"w\": [" << json_pair(rep.w(0, 0)) << ", " << json_pair(rep.w(0, 1)) << ", "
      << json_pair(rep.w(1, 0)) << ", " << json_pair(rep.w(1, 1)) << "],\n";
    o << "  \"faithful\": " << fmt_bool(rep.faithful) << ",\n";
    o << "  \"worst_case_prob\": " << fmt12(rep.worst_case_prob) << ",\n";
    o << "  \"stored_state\": [";
    const TwoJ ja = cfg.scheme.ja;
    for (int k = 0; k < rep.stored_state.size(); ++k) {
        if (k > 0) o << ", ";
        const int twice_m = -ja.twice + 2 * k;
        o << "{\"m\": " << json_quote(half_int_str(twice_m)) << ", \"re\": "
          << fmt12(rep.stored_state[k].real()) << ", \"im\": "
          << fmt12(rep.stored_state[k].imag()) << "}";
    }
    o << "],\n";
    o << "  \"leak_weight\": " << fmt12(rep.leak_weight) << "\n";
    o << "}\n";
    return o.str();
}

inline std::string analyze_report_text(const RunConfig& rc, const SystemConfig& cfg,
                                       const Decomposition& d, const StorageReport& rep) {
    const FamilyCounts c = d.counts();
    std::ostringstream o;
    o << "scheme            " << scheme_str(cfg.scheme) << "\n";
    o << "drive             " << trimmed(rc.drive) << "\n";
    o << "cavity modes      l1 = " << trimmed(rc.l1) << ", l2 = " << trimmed(rc.l2) << "\n";
    o << "detuning          " << fmt12(rc.delta) << "\n";
    o << "initial state     " << trimmed(rc.initial) << "\n";
    o << "qubit             xi1 = " << fmt_complex(parse_complex(rc.xi1, "--xi1"))
      << ", xi2 = " << fmt_complex(parse_complex(rc.xi2, "--xi2")) << "\n";
    o << "families          shared=" << c.shared << " a_only=" << c.a_only
      << " b_only=" << c.b_only << " a_residual=" << c.a_residual
      << " b_residual=" << c.b_residual << " bright_pairs=" << c.bright_pairs
      << " c_uncoupled=" << c.c_uncoupled << " (dark total " << c.dark_total() << ")\n";
    o << "w matrix          [" << fmt_complex(rep.w(0, 0)) << ", "
      << fmt_complex(rep.w(0, 1)) << "]\n";
    o << "                  [" << fmt_complex(rep.w(1, 0)) << ", "
      << fmt_complex(rep.w(1, 1)) << "]\n";
    o << "faithful          " << (rep.faithful ? "yes" : "no") << " (tolerance "
      << fmt12(rc.tol) << ")\n";
    o << "worst-case prob   " << fmt12(rep.worst_case_prob) << "\n";
    o << "storage prob      " << fmt12(rep.storage_prob) << "\n";
    o << "leak weight       " << fmt12(rep.leak_weight) << "\n";
    if (rep.stored_state.size() > 0) {
        o << "stored state (level-a amplitudes)\n";
        const TwoJ ja = cfg.scheme.ja;
        for (int k = 0; k < rep.stored_state.size(); ++k) {
            const int twice_m = -ja.twice + 2 * k;
            o << "  m=" << half_int_str(twice_m) << "  "
              << fmt_complex(rep.stored_state[k]) << "\n";
        }
    } else {
        o << "stored state      (mixed input: no single stored vector)\n";
    }
    return o.str();
}

inline std::string cmd_analyze(const RunConfig& rc) {
    if (rc.drive.find(';') != std::string::npos)
        throw ContractError("analyze takes a single --drive (';' lists are for scan)");
    const SystemConfig cfg = make_system(rc, parse_polarization(rc.drive));
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    const AtomicDensityMatrix rho = parse_initial(rc.initial, cfg.scheme.jb);
    const PolarizationQubit xi = make_qubit(rc);
    const StorageReport rep = analyze_storage(d, rho, xi, rc.tol);
    const std::string format = resolve_format(rc, "text");
    if (format == "json") return analyze_report_json(cfg, d, rep);
    if (format == "text") return analyze_report_text(rc, cfg, d, rep);
    throw ContractError("analyze supports --format text or json, got '" + format + "'");
}

// ---------------------------------------------------------------------------
// scan

struct LabeledScan {
    std::string drive;  // the drive spec as given on the command line
    ScanResult result;
};

inline std::vector<LabeledScan> run_scans(const RunConfig& rc) {
    std::vector<std::string> drives = split_list(rc.drive, ';');
    if (drives.empty()) drives.push_back("pi");
    std::vector<LabeledScan> out;
    for (const std::string& spec : drives) {
        const SystemConfig cfg = make_system(rc, parse_polarization(spec));
        out.push_back({spec, scan_initial_states(cfg, rc.tol)});
    }
    return out;
}

inline std::string scan_report_csv(const RunConfig& rc, const std::vector<LabeledScan>& scans) {
    const LevelScheme scheme = LevelScheme::parse(rc.ja, rc.jb, rc.jc);
    std::ostringstream o;
    o << "scheme,drive,initial,w11,w22,|w12|,faithful,worst_case\n";
    for (const LabeledScan& s : scans)
        for (const ScanRow& row : s.result.rows)
            o << scheme_str(scheme) << "," << s.drive << "," << row.initial << ","
              << fmt12(row.w(0, 0).real()) << "," << fmt12(row.w(1, 1).real()) << ","
              << fmt12(std::abs(row.w(0, 1))) << "," << fmt_bool(row.faithful) << ","
              << fmt12(row.worst_case) << "\n";
    return o.str();
}

inline std::string scan_report_text(const RunConfig& rc, const std::vector<LabeledScan>& scans) {
    const LevelScheme scheme = LevelScheme::parse(rc.ja, rc.jb, rc.jc);
    std::ostringstream o;
    o << "scheme " << scheme_str(scheme) << " (faithfulness tolerance " << fmt12(rc.tol)
      << ")\n";
    for (const LabeledScan& s : scans) {
        o << "drive " << s.drive << "\n";
        o << "  initial        w11             w22             |w12|           faithful  "
             "worst_case\n";
        for (const ScanRow& row : s.result.rows) {
            char line[160];
            std::snprintf(line, sizeof line, "  %-12s %-15s %-15s %-15s %-9s %s\n",
                          row.initial.c_str(), fmt12(row.w(0, 0).real()).c_str(),
                          fmt12(row.w(1, 1).real()).c_str(),
                          fmt12(std::abs(row.w(0, 1))).c_str(),
                          row.faithful ? "yes" : "no", fmt12(row.worst_case).c_str());
            o << line;
        }
        const ScanResult& r = s.result;
        if (r.best_index >= 0)
            o << "  best worst-case " << fmt12(r.best_worst_case) << " at initial "
              << r.rows[static_cast<std::size_t>(r.best_index)].initial << "\n";
    }
    return o.str();
}

inline std::string cmd_scan(const RunConfig& rc) {
    const std::vector<LabeledScan> scans = run_scans(rc);
    const std::string format = resolve_format(rc, "text");
    if (format == "csv") return scan_report_csv(rc, scans);
    if (format == "text") return scan_report_text(rc, scans);
    throw ContractError("scan supports --format text or csv, got '" + format + "'");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOutput {
    std::string report;          // text or JSON summary for stdout
    std::string trajectory_csv;  // t,trace,pop_a,pop_b,pop_c,fidelity_to_adiabatic
};

inline SimulateOutput cmd_simulate(const RunConfig& rc) {
    if (rc.drive.find(';') != std::string::npos)
        throw ContractError("simulate takes a single --drive (';' lists are for scan)");
    const SystemConfig cfg = make_system(rc, parse_polarization(rc.drive));
    const BasisIndex idx(cfg.scheme);
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    const AtomicDensityMatrix rho_b = parse_initial(rc.initial, cfg.scheme.jb);
    const PolarizationQubit xi = make_qubit(rc);

    PulseSchedule sched;
    sched.t1 = rc.t1;
    sched.tau = rc.tau;
    sched.t2 = rc.t2;
    sched.omega_a1 = rc.omega_a;
    sched.omega_b1 = rc.omega_b;
    sched.omega_a2 = rc.omega_a;
    sched.omega_b2 = rc.omega_b;
    sched.shape = parse_shape(rc.shape);
    sched.delta = rc.delta;
    sched.validate();

    // Initial joint density: photonic qubit on the two cavity modes, atomic
    // state on level b, everything else empty.
    const CMatrix joint = joint_density(d, rho_b, xi);
    const int n = idx.total();
    const int nb2 = idx.b_total();
    CMatrix rho0 = CMatrix::Zero(n, n);
    rho0.block(idx.offset(Block::B1), idx.offset(Block::B1), nb2, nb2) = joint;

    // Trajectory rows: at most ~800, evenly spread over the schedule.
    const double total = sched.total();
    const int est_steps = static_cast<int>(std::ceil(total / rc.dt));
    const int n_rows = std::min(801, est_steps + 1);
    std::vector<double> wanted(static_cast<std::size_t>(n_rows));
    for (int i = 0; i < n_rows; ++i)
        wanted[static_cast<std::size_t>(i)] = total * i / (n_rows - 1);
    const EvolutionResult res = evolve(cfg, sched, rho0, rc.dt, &wanted);

    const int n_ad = 2000;
    const std::vector<CMatrix> snaps =
        adiabatic_propagators(cfg, sched, res.checkpoint_times, n_ad);
    const double purity = (rho0 * rho0).trace().real();
    const bool pure = std::abs(purity - 1.0) <= 1e-9;

    std::ostringstream csv;
    csv << "t,trace,pop_a,pop_b,pop_c,fidelity_to_adiabatic\n";
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        const CMatrix& rho_t = res.checkpoints[k];
        const CMatrix rho_ad = snaps[k] * rho0 * snaps[k].adjoint();
        const double fid = pure ? (rho_ad * rho_t).trace().real()
                                : 1.0 - trace_distance(rho_t, rho_ad);
        const TrajectorySample s = detail::sample_of(idx, res.checkpoint_times[k], rho_t);
        csv << fmt12(s.time) << "," << fmt12(s.norm) << "," << fmt12(s.pop_a) << ","
            << fmt12(s.pop_b) << "," << fmt12(s.pop_c) << "," << fmt12(fid) << "\n";
    }

    const AdiabaticComparison cmp = compare_adiabatic(cfg, sched, rho0, res, n_ad);

    SimulateOutput out;
    out.trajectory_csv = csv.str();
    const std::string format = resolve_format(rc, "text");
    if (format == "json") {
        std::ostringstream o;
        o << "{\n";
        o << "  \"scheme\": {\"ja\": " << json_quote(cfg.scheme.ja.str()) << ", \"jb\": "
          << json_quote(cfg.scheme.jb.str()) << ", \"jc\": "
          << json_quote(cfg.scheme.jc.str()) << "},\n";
        o << "  \"fidelity\": " << fmt12(cmp.fidelity) << ",\n";
        o << "  \"trace_distance\": " << fmt12(cmp.trace_distance) << ",\n";
        o << "  \"leak_weight\": " << fmt12(cmp.leak_weight) << ",\n";
        o << "  \"max_trace_drift\": " << fmt12(res.max_trace_drift) << ",\n";
        o << "  \"max_hermiticity_drift\": " << fmt12(res.max_hermiticity_drift) << ",\n";
        o << "  \"trajectory_rows\": " << snaps.size() << "\n";
        o << "}\n";
        out.report = o.str();
    } else if (format == "text") {
        std::ostringstream o;
        o << "scheme               " << scheme_str(cfg.scheme) << "\n";
        o << "drive                " << trimmed(rc.drive) << "\n";
        o << "initial state        " << trimmed(rc.initial) << "\n";
        o << "schedule             t1=" << fmt12(sched.t1) << " tau=" << fmt12(sched.tau)
          << " t2=" << fmt12(sched.t2) << " shape=" << shape_name(sched.shape)
          << " delta=" << fmt12(sched.delta) << "\n";
        o << "peaks                omega_a=" << fmt12(rc.omega_a)
          << " omega_b=" << fmt12(rc.omega_b) << " (dt=" << fmt12(rc.dt) << ")\n";
        o << "fidelity             " << fmt12(cmp.fidelity) << "\n";
        o << "trace distance       " << fmt12(cmp.trace_distance) << "\n";
        o << "leak weight          " << fmt12(cmp.leak_weight) << "\n";
        o << "max trace drift      " << fmt12(res.max_trace_drift) << "\n";
        o << "max hermiticity drift " << fmt12(res.max_hermiticity_drift) << "\n";
        o << "trajectory rows      " << snaps.size() << "\n";
        out.report = o.str();
    } else {
        throw ContractError("simulate supports --format text or json, got '" + format + "'");
    }
    return out;
}

}  // namespace lmem::cli
