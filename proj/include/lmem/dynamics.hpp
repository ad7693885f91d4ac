#pragma once
// Time-dependent dynamics on the single-excitation space: smooth storage /
// hold / retrieval pulse schedules, a fixed-step RK4 integrator for the
// density matrix, and an instantaneous-eigenbasis (adiabatic) propagator
// with accumulated dynamical phases. The integrator is an independent check
// of the adiabatic picture: the two are compared by compare_adiabatic.
//
// Equation of motion: d(rho)/dt = (i/2) [V(t), rho], so a constant V evolves
// an eigenvector |v_k> by the phase exp(i lambda_k t / 2).

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmem/darkspace.hpp"
#include "lmem/lambda_system.hpp"
#include "lmem/linalg.hpp"

namespace lmem {

enum class PulseShape { Sin2, Linear };

inline const char* shape_name(PulseShape s) {
    return s == PulseShape::Sin2 ? "sin2" : "linear";
}

inline PulseShape parse_shape(const std::string& s) {
    if (s == "sin2") return PulseShape::Sin2;
    if (s == "linear") return PulseShape::Linear;
    throw ContractError("parse_shape: unknown pulse shape '" + s + "' (expected sin2 or linear)");
}

// Three-stage schedule. Storage on [0, T1]: the drive ramps down from
// omega_a1 to 0 while the cavity coupling ramps up from 0 to omega_b1.
// Hold on (T1, T1+tau]: both amplitudes are zero and only the detuning
// acts. Retrieval on (T1+tau, T1+tau+T2]: the mirror image, ramping the
// drive up to omega_a2 while the coupling falls from omega_b2 to 0.
//
// The zero-eigenvalue (dark) directions are continuous across the stage
// boundaries because the drive amplitude vanishes there; the coupling
// amplitude itself jumps at the hold edges unless omega_b1 = omega_b2 and
// tau = 0. The detuning used by the dynamics is the schedule's `delta`
// field (the SystemConfig detuning only enters the static decomposition).
struct PulseSchedule {
    double t1 = 0.0;
    double tau = 0.0;
    double t2 = 0.0;
    double omega_a1 = 0.0;
    double omega_b1 = 0.0;
    double omega_a2 = 0.0;
    double omega_b2 = 0.0;
    PulseShape shape = PulseShape::Sin2;
    double delta = 0.0;

    double total() const { return t1 + tau + t2; }
    bool has_retrieval() const { return t2 > 0.0; }

    void validate() const {
        const double vals[] = {t1, tau, t2, omega_a1, omega_b1, omega_a2, omega_b2, delta};
        for (double v : vals)
            if (!std::isfinite(v))
                throw ContractError("PulseSchedule: all parameters must be finite");
        if (!(t1 > 0.0)) throw ContractError("PulseSchedule: storage duration T1 must be > 0");
        if (tau < 0.0) throw ContractError("PulseSchedule: hold duration tau must be >= 0");
        if (t2 < 0.0) throw ContractError("PulseSchedule: retrieval duration T2 must be >= 0");
        if (omega_a1 < 0.0 || omega_b1 < 0.0 || omega_a2 < 0.0 || omega_b2 < 0.0)
            throw ContractError("PulseSchedule: peak amplitudes must be >= 0");
    }

    // Peak field scale (including the detuning) that bounds the RK4 step.
    double field_scale() const {
        double s = std::abs(delta);
        for (double v : {omega_a1, omega_b1, omega_a2, omega_b2}) s = std::max(s, v);
        return s;
    }

    static PulseSchedule storage_only(double t1, double omega_a1, double omega_b1,
                                      double delta = 0.0, PulseShape shape = PulseShape::Sin2) {
        PulseSchedule s;
        s.t1 = t1;
        s.omega_a1 = omega_a1;
        s.omega_b1 = omega_b1;
        s.delta = delta;
        s.shape = shape;
        s.validate();
        return s;
    }

    static PulseSchedule round_trip(double t1, double tau, double t2, double omega_a,
                                    double omega_b, double delta = 0.0,
                                    PulseShape shape = PulseShape::Sin2) {
        PulseSchedule s;
        s.t1 = t1;
        s.tau = tau;
        s.t2 = t2;
        s.omega_a1 = omega_a;
        s.omega_b1 = omega_b;
        s.omega_a2 = omega_a;
        s.omega_b2 = omega_b;
        s.delta = delta;
        s.shape = shape;
        s.validate();
        return s;
    }
};

namespace detail {

enum class Stage { Storage, Hold, Retrieval };

// Amplitudes inside one stage, parameterized by local time; keeping the
// stage explicit lets the integrator treat each smooth piece separately.
inline std::pair<double, double> stage_profile(const PulseSchedule& s, Stage st, double tloc) {
    switch (st) {
        case Stage::Storage: {
            const double x = tloc / s.t1;
            if (s.shape == PulseShape::Linear) return {s.omega_a1 * (1.0 - x), s.omega_b1 * x};
            const double c = std::cos(0.5 * M_PI * x), q = std::sin(0.5 * M_PI * x);
            return {s.omega_a1 * c * c, s.omega_b1 * q * q};
        }
        case Stage::Hold:
            return {0.0, 0.0};
        case Stage::Retrieval: {
            const double x = tloc / s.t2;
            if (s.shape == PulseShape::Linear) return {s.omega_a2 * x, s.omega_b2 * (1.0 - x)};
            const double c = std::cos(0.5 * M_PI * x), q = std::sin(0.5 * M_PI * x);
            return {s.omega_a2 * q * q, s.omega_b2 * c * c};
        }
    }
    throw ContractError("stage_profile: invalid stage");
}

}  // namespace detail

// Field amplitudes (Omega_a, Omega_b) at global time t. The storage stage
// owns its right endpoint: omega_profiles(sched, T1) = (0, Omega_b1).
inline std::pair<double, double> omega_profiles(const PulseSchedule& sched, double t) {
    sched.validate();
    const double total = sched.total();
    const double slack = 1e-12 * std::max(1.0, total);
    if (!std::isfinite(t) || t < -slack || t > total + slack)
        throw ContractError("omega_profiles: time " + format_double(t) +
                            " outside the schedule [0, " + format_double(total) + "]");
    t = std::min(std::max(t, 0.0), total);
    if (t <= sched.t1) return detail::stage_profile(sched, detail::Stage::Storage, t);
    if (t <= sched.t1 + sched.tau) return {0.0, 0.0};
    return detail::stage_profile(sched, detail::Stage::Retrieval, t - sched.t1 - sched.tau);
}

struct TrajectorySample {
    double time = 0.0;
    double norm = 0.0;  // trace of the density matrix (real part)
    double pop_a = 0.0;
    double pop_b = 0.0;
    double pop_c = 0.0;
};

struct EvolutionResult {
    CMatrix final_density;
    std::vector<TrajectorySample> trajectory;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    // Full density matrices captured at the step boundaries closest (from
    // above) to the requested checkpoint times; times are strictly
    // increasing, so several requests inside one step collapse to one entry.
    std::vector<double> checkpoint_times;
    std::vector<CMatrix> checkpoints;
};

namespace detail {

inline void check_full_density(const BasisIndex& idx, const CMatrix& rho, const char* where) {
    const std::string name(where);
    if (rho.rows() != idx.total() || rho.cols() != idx.total())
        throw ContractError(name + ": density matrix must be " + std::to_string(idx.total()) +
                            "x" + std::to_string(idx.total()) + ", got " + dim_string(rho));
    if (!rho.allFinite()) throw ContractError(name + ": density matrix has non-finite entries");
    if ((rho - CMatrix(rho.adjoint())).cwiseAbs().maxCoeff() > 1e-12)
        throw ContractError(name + ": density matrix is not Hermitian within 1e-12");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12)
        throw ContractError(name + ": density matrix trace must be 1 within 1e-12");
    const auto eig = hermitian_eig(0.5 * (rho + CMatrix(rho.adjoint())));
    if (eig.back().value < -1e-10)
        throw ContractError(name + ": density matrix has negative eigenvalue " +
                            format_double(eig.back().value));
}

inline TrajectorySample sample_of(const BasisIndex& idx, double t, const CMatrix& rho) {
    TrajectorySample s;
    s.time = t;
    s.norm = rho.trace().real();
    auto block_pop = [&](Block b) {
        double p = 0.0;
        for (int k = 0; k < idx.size(b); ++k) p += rho(idx.offset(b) + k, idx.offset(b) + k).real();
        return p;
    };
    s.pop_a = block_pop(Block::A);
    s.pop_b = block_pop(Block::B1) + block_pop(Block::B2);
    s.pop_c = block_pop(Block::C);
    return s;
}

}  // namespace detail

// Fixed-step 4th-order Runge-Kutta integration of d(rho)/dt = (i/2)[V(t), rho]
// over the full schedule. Each smooth stage is integrated on its own uniform
// grid with step <= dt so stage boundaries are hit exactly. Trajectory
// samples are recorded at every accepted step.
inline EvolutionResult evolve(const SystemConfig& cfg, const PulseSchedule& sched,
                              const CMatrix& rho0, double dt,
                              const std::vector<double>* checkpoint_times = nullptr) {
    sched.validate();
    const BasisIndex idx(cfg.scheme);
    detail::check_full_density(idx, rho0, "evolve");
    if (!std::isfinite(dt) || !(dt > 0.0)) throw ContractError("evolve: dt must be positive");
    const double scale = sched.field_scale();
    if (dt * scale > 0.05 * (1.0 + 1e-12))
        throw ContractError("evolve: step too coarse: dt*max(omega, |delta|) = " +
                            format_double(dt * scale) + " exceeds 0.05");
    const double slack = 1e-12 * std::max(1.0, sched.total());
    if (checkpoint_times) {
        for (std::size_t i = 0; i < checkpoint_times->size(); ++i) {
            const double t = (*checkpoint_times)[i];
            if (!std::isfinite(t) || t < -slack || t > sched.total() + slack)
                throw ContractError("evolve: checkpoint time " + format_double(t) +
                                    " is outside the schedule [0, " +
                                    format_double(sched.total()) + "]");
            if (i > 0 && t < (*checkpoint_times)[i - 1])
                throw ContractError("evolve: checkpoint times must be nondecreasing");
        }
    }

    const CouplingSet g = build_couplings(cfg);
    const Complex ihalf(0.0, 0.5);
    auto rhs = [&](detail::Stage st, double tloc, const CMatrix& rho) {
        const auto [oa, ob] = detail::stage_profile(sched, st, tloc);
        const CMatrix v = interaction_operator(idx, g, sched.delta, oa, ob);
        return CMatrix(ihalf * (v * rho - rho * v));
    };

    struct StageSpan {
        detail::Stage stage;
        double start, length;
    };
    std::vector<StageSpan> spans{{detail::Stage::Storage, 0.0, sched.t1}};
    if (sched.tau > 0.0) spans.push_back({detail::Stage::Hold, sched.t1, sched.tau});
    if (sched.t2 > 0.0) spans.push_back({detail::Stage::Retrieval, sched.t1 + sched.tau, sched.t2});

    EvolutionResult out;
    CMatrix rho = rho0;
    std::size_t next_ck = 0;
    auto record_checkpoints = [&](double t_now) {
        if (!checkpoint_times) return;
        bool wanted = false;
        while (next_ck < checkpoint_times->size() && (*checkpoint_times)[next_ck] <= t_now + slack) {
            wanted = true;
            ++next_ck;
        }
        if (wanted) {
            out.checkpoint_times.push_back(t_now);
            out.checkpoints.push_back(rho);
        }
    };
    out.trajectory.push_back(detail::sample_of(idx, 0.0, rho));
    record_checkpoints(0.0);
    for (const StageSpan& span : spans) {
        const int m = std::max(1, static_cast<int>(std::ceil(span.length / dt - 1e-9)));
        const double h = span.length / m;
        for (int j = 0; j < m; ++j) {
            const double tl = j * h;
            const CMatrix k1 = rhs(span.stage, tl, rho);
            const CMatrix k2 = rhs(span.stage, tl + 0.5 * h, CMatrix(rho + (0.5 * h) * k1));
            const CMatrix k3 = rhs(span.stage, tl + 0.5 * h, CMatrix(rho + (0.5 * h) * k2));
            const CMatrix k4 = rhs(span.stage, tl + h, CMatrix(rho + h * k3));
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            const double tg = span.start + (j + 1) * h;
            out.trajectory.push_back(detail::sample_of(idx, tg, rho));
            record_checkpoints(tg);
            out.max_trace_drift =
                std::max(out.max_trace_drift, std::abs(rho.trace() - Complex(1.0, 0.0)));
            out.max_hermiticity_drift = std::max(
                out.max_hermiticity_drift,
                (rho - CMatrix(rho.adjoint())).cwiseAbs().maxCoeff());
        }
    }
    if (out.max_trace_drift > 1e-8 || out.max_hermiticity_drift > 1e-8)
        throw ToleranceError("evolve: integration drift exceeded 1e-8 (trace drift " +
                             format_double(out.max_trace_drift) + ", Hermiticity drift " +
                             format_double(out.max_hermiticity_drift) + ")");
    out.final_density = rho;
    return out;
}

namespace detail {

// Indices of eigenvalue clusters (descending order in `pairs`); eigenvalues
// closer than the tolerance belong to one cluster and are transported
// together, which keeps the tracking stable through exact degeneracies.
inline std::vector<std::vector<int>> value_clusters(const std::vector<EigenPair>& pairs) {
    double scale = 1.0;
    for (const auto& p : pairs) scale = std::max(scale, std::abs(p.value));
    const double tol = 1e-6 * scale;
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        if (clusters.empty() || pairs[i - 1].value - pairs[i].value > tol)
            clusters.emplace_back();
        clusters.back().push_back(i);
    }
    return clusters;
}

// Instantaneous-eigenbasis transport along a time grid. Eigenvector
// continuity is enforced cluster by cluster: the previous tracked columns
// are assigned to the current clusters by total overlap weight, and within
// each cluster the new eigenvectors are rotated onto the previous ones by
// the polar factor of the overlap block (discrete parallel transport, which
// for degenerate families realizes their geometric holonomy). The result
// holds the propagator S(t) = sum_k exp(i phi_k(t)) |v_k(t)><v_k(0)| with
// phi_k = (1/2) integral of lambda_k, at the requested snapshot indices.
inline std::vector<CMatrix> track_adiabatic(const std::function<CMatrix(double)>& v_of_t,
                                            const std::vector<double>& grid,
                                            const std::vector<std::size_t>& snapshots) {
    const CMatrix v0 = v_of_t(grid[0]);
    const int n = static_cast<int>(v0.rows());
    CMatrix u_base(n, n), u_prev(n, n);
    RVector lam_prev(n);
    RVector phase = RVector::Zero(n);

    {
        const auto eig = hermitian_eig(v0);
        for (int i = 0; i < n; ++i) {
            u_prev.col(i) = eig[i].vector;
            lam_prev[i] = eig[i].value;
        }
        u_base = u_prev;
    }

    std::vector<CMatrix> out;
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](std::size_t step) {
        while (next_snap < snapshots.size() && snapshots[next_snap] == step) {
            CVector ph(n);
            for (int i = 0; i < n; ++i) ph[i] = std::polar(1.0, phase[i]);
            out.push_back(u_prev * ph.asDiagonal() * u_base.adjoint());
            ++next_snap;
        }
    };
    maybe_snapshot(0);

    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double t = grid[j];
        const double h = t - grid[j - 1];
        const auto eig = hermitian_eig(v_of_t(t));
        CMatrix u_raw(n, n);
        for (int i = 0; i < n; ++i) u_raw.col(i) = eig[i].vector;
        const auto clusters = value_clusters(eig);

        // Assign every previous tracked column to the cluster holding most
        // of its weight.
        const CMatrix overlap = u_raw.adjoint() * u_prev;
        std::vector<std::vector<int>> members(clusters.size());
        for (int k = 0; k < n; ++k) {
            int best = 0;
            double best_w = -1.0;
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                double w = 0.0;
                for (int i : clusters[c]) w += std::norm(overlap(i, k));
                if (w > best_w) {
                    best_w = w;
                    best = static_cast<int>(c);
                }
            }
            members[best].push_back(k);
        }

        CMatrix u_next(n, n);
        RVector lam_next(n);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (members[c].size() != clusters[c].size())
                throw ToleranceError(
                    "adiabatic_propagator: eigenvector tracking is ambiguous near t = " +
                    format_double(t) + " (an eigenvalue crossing could not be resolved)");
            const int m = static_cast<int>(clusters[c].size());
            CMatrix block(m, m);
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) block(r, s) = overlap(clusters[c][r], members[c][s]);
            Eigen::JacobiSVD<CMatrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
            if (svd.singularValues()[m - 1] < 0.7)
                throw ToleranceError("adiabatic_propagator: eigenvalue crossing near t = " +
                                     format_double(t) + " (tracking overlap " +
                                     format_double(svd.singularValues()[m - 1]) +
                                     " fell below 0.7)");
            const CMatrix w = svd.matrixU() * svd.matrixV().adjoint();
            double mean = 0.0;
            for (int i : clusters[c]) mean += eig[i].value;
            mean /= m;
            CMatrix cols(n, m);
            for (int r = 0; r < m; ++r) cols.col(r) = u_raw.col(clusters[c][r]);
            const CMatrix aligned = cols * w;
            for (int s = 0; s < m; ++s) {
                const int k = members[c][s];
                u_next.col(k) = aligned.col(s);
                lam_next[k] = mean;
                phase[k] += 0.25 * h * (lam_prev[k] + mean);
            }
        }
        u_prev = u_next;
        lam_prev = lam_next;
        maybe_snapshot(j);
    }
    return out;
}

inline std::vector<double> uniform_grid(double t_end, int n_steps) {
    std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
    for (int j = 0; j <= n_steps; ++j) grid[j] = t_end * j / n_steps;
    return grid;
}

}  // namespace detail

// Adiabatic propagator for an arbitrary Hermitian generator, S(t_end) for
// d(psi)/dt = (i/2) V(t) psi tracked along a uniform grid.
inline CMatrix adiabatic_propagator(const std::function<CMatrix(double)>& v_of_t, double t_end,
                                    int n_steps) {
    if (!std::isfinite(t_end) || t_end < 0.0)
        throw ContractError("adiabatic_propagator: end time must be finite and >= 0");
    if (n_steps < 100)
        throw ContractError("adiabatic_propagator: n_steps must be at least 100");
    if (t_end == 0.0) {
        const CMatrix v0 = v_of_t(0.0);
        return CMatrix::Identity(v0.rows(), v0.cols());
    }
    return detail::track_adiabatic(v_of_t, detail::uniform_grid(t_end, n_steps),
                                   {static_cast<std::size_t>(n_steps)})[0];
}

// Adiabatic propagator of the scheduled system at time t.
inline CMatrix adiabatic_propagator(const SystemConfig& cfg, const PulseSchedule& sched, double t,
                                    int n_steps = 400) {
    sched.validate();
    const double slack = 1e-12 * std::max(1.0, sched.total());
    if (!std::isfinite(t) || t < -slack || t > sched.total() + slack)
        throw ContractError("adiabatic_propagator: time " + format_double(t) +
                            " outside the schedule [0, " + format_double(sched.total()) + "]");
    const BasisIndex idx(cfg.scheme);
    const CouplingSet g = build_couplings(cfg);
    auto v_of_t = [&](double tt) {
        const auto [oa, ob] = omega_profiles(sched, tt);
        return interaction_operator(idx, g, sched.delta, oa, ob);
    };
    return adiabatic_propagator(v_of_t, std::max(t, 0.0), n_steps);
}

// Propagators at several (nondecreasing) times from a single tracking pass.
inline std::vector<CMatrix> adiabatic_propagators(const SystemConfig& cfg,
                                                  const PulseSchedule& sched,
                                                  const std::vector<double>& times,
                                                  int n_steps = 400) {
    sched.validate();
    if (times.empty()) return {};
    if (n_steps < 100)
        throw ContractError("adiabatic_propagators: n_steps must be at least 100");
    const double slack = 1e-12 * std::max(1.0, sched.total());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < -slack || times[i] > sched.total() + slack)
            throw ContractError("adiabatic_propagators: time " + format_double(times[i]) +
                                " outside the schedule [0, " + format_double(sched.total()) + "]");
        if (i > 0 && times[i] < times[i - 1])
            throw ContractError("adiabatic_propagators: times must be nondecreasing");
    }

    // Merge the uniform tracking grid with the requested times so every
    // snapshot is evaluated exactly.
    const double t_end = std::max(times.back(), 0.0);
    std::vector<double> grid = detail::uniform_grid(std::max(t_end, 1e-300), n_steps);
    if (t_end == 0.0) grid = {0.0};
    std::vector<double> wanted;
    for (double t : times) wanted.push_back(std::min(std::max(t, 0.0), sched.total()));
    std::vector<double> merged = grid;
    merged.insert(merged.end(), wanted.begin(), wanted.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [&](double a, double b) { return std::abs(a - b) <= 1e-15; }),
                 merged.end());

    std::vector<std::size_t> snaps;
    for (double t : wanted) {
        const auto it = std::lower_bound(merged.begin(), merged.end(), t - 1e-15);
        snaps.push_back(static_cast<std::size_t>(it - merged.begin()));
    }
    std::vector<std::size_t> snaps_sorted = snaps;
    std::sort(snaps_sorted.begin(), snaps_sorted.end());
    snaps_sorted.erase(std::unique(snaps_sorted.begin(), snaps_sorted.end()), snaps_sorted.end());

    const BasisIndex idx(cfg.scheme);
    const CouplingSet g = build_couplings(cfg);
    auto v_of_t = [&](double tt) {
        const auto [oa, ob] = omega_profiles(sched, tt);
        return interaction_operator(idx, g, sched.delta, oa, ob);
    };
    const auto snapshots = detail::track_adiabatic(v_of_t, merged, snaps_sorted);

    // Map the sorted unique snapshots back onto the requested order.
    std::vector<CMatrix> out;
    out.reserve(times.size());
    for (std::size_t s : snaps) {
        const auto it = std::lower_bound(snaps_sorted.begin(), snaps_sorted.end(), s);
        out.push_back(snapshots[static_cast<std::size_t>(it - snaps_sorted.begin())]);
    }
    return out;
}

struct AdiabaticComparison {
    double fidelity = 0.0;
    double trace_distance = 0.0;
    double leak_weight = 0.0;
};

// Integrate the schedule numerically and compare the endpoint against the
// adiabatic prediction S rho0 S^dag. For a pure input the fidelity is the
// state overlap tr(rho_ad rho_num); otherwise the trace-distance lower
// bound 1 - D is reported. leak_weight is the final weight on the static
// dark directions that never couple (photonic b_only plus atomic a_only).
inline AdiabaticComparison compare_adiabatic(const SystemConfig& cfg, const PulseSchedule& sched,
                                             const CMatrix& rho0, const EvolutionResult& res,
                                             int n_steps = 400) {
    const CMatrix s = adiabatic_propagator(cfg, sched, sched.total(), n_steps);
    const CMatrix rho_ad = s * rho0 * s.adjoint();

    AdiabaticComparison cmp;
    cmp.trace_distance = trace_distance(res.final_density, rho_ad);
    const double purity = (rho0 * rho0).trace().real();
    if (std::abs(purity - 1.0) <= 1e-9)
        cmp.fidelity = (rho_ad * res.final_density).trace().real();
    else
        cmp.fidelity = 1.0 - cmp.trace_distance;

    const BasisIndex idx(cfg.scheme);
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    double leak = 0.0;
    for (const auto& v : d.b_only) {
        const CVector e = idx.embed_b(v);
        leak += (e.adjoint() * res.final_density * e)(0, 0).real();
    }
    for (const auto& v : d.a_only) {
        const CVector e = idx.embed(Block::A, v);
        leak += (e.adjoint() * res.final_density * e)(0, 0).real();
    }
    cmp.leak_weight = leak;
    return cmp;
}

inline AdiabaticComparison compare_adiabatic(const SystemConfig& cfg, const PulseSchedule& sched,
                                             const CMatrix& rho0, double dt, int n_steps = 400) {
    return compare_adiabatic(cfg, sched, rho0, evolve(cfg, sched, rho0, dt), n_steps);
}

}  // namespace lmem
