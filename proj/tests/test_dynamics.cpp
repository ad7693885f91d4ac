// Time-dependent dynamics: pulse profiles, the RK4 density-matrix
// integrator, the instantaneous-eigenbasis propagator, and their agreement.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "lmem/dynamics.hpp"
#include "lmem/memory.hpp"

using namespace lmem;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

SystemConfig rb_pi(double delta = 0.0) {
    return SystemConfig::with_default_modes(LevelScheme(TwoJ(4), TwoJ(2), TwoJ(2)),
                                            Polarization::from_name("pi"), delta);
}

// Joint photon-qubit/atom pure state embedded in the full space.
CVector photonic_input(const BasisIndex& idx, const Decomposition& d,
                       const PolarizationQubit& xi, int twice_m) {
    const int nb = d.index.size(Block::B1);
    const int pos = (twice_m + d.index.twice_j(Block::B1)) / 2;
    CVector stacked = CVector::Zero(2 * nb);
    stacked[pos] = xi.xi1();
    stacked[nb + pos] = xi.xi2();
    return idx.embed_b(stacked);
}

CMatrix pure_density(const CVector& v) { return v * v.adjoint(); }

double state_fidelity(const CMatrix& rho, const CVector& v) {
    return (v.adjoint() * rho * v)(0, 0).real();
}

}  // namespace

TEST_CASE("pulse schedule validation and field profiles") {
    PulseSchedule s;
    s.t1 = 2.0;
    s.tau = 1.0;
    s.t2 = 4.0;
    s.omega_a1 = 1.5;
    s.omega_b1 = 0.5;
    s.omega_a2 = 0.75;
    s.omega_b2 = 1.25;
    s.validate();
    REQUIRE(s.total() == Approx(7.0));
    REQUIRE(s.has_retrieval());

    // Stage boundary values.
    auto p = omega_profiles(s, 0.0);
    REQUIRE(p.first == Approx(1.5));
    REQUIRE(p.second == Approx(0.0).margin(1e-15));
    p = omega_profiles(s, 2.0);
    REQUIRE(p.first == Approx(0.0).margin(1e-15));
    REQUIRE(p.second == Approx(0.5));
    p = omega_profiles(s, 2.5);  // hold
    REQUIRE(p.first == 0.0);
    REQUIRE(p.second == 0.0);
    p = omega_profiles(s, 7.0);  // retrieval end
    REQUIRE(p.first == Approx(0.75));
    REQUIRE(p.second == Approx(0.0).margin(1e-15));

    // Storage midpoint: both strictly positive; sin^2 symmetry.
    p = omega_profiles(s, 1.0);
    REQUIRE(p.first == Approx(0.75));
    REQUIRE(p.second == Approx(0.25));
    REQUIRE(p.first > 0.0);
    REQUIRE(p.second > 0.0);

    // Retrieval midpoint mirrors the storage ramp.
    p = omega_profiles(s, 5.0);
    REQUIRE(p.first == Approx(0.375));
    REQUIRE(p.second == Approx(0.625));

    // Linear shape.
    s.shape = PulseShape::Linear;
    p = omega_profiles(s, 0.5);
    REQUIRE(p.first == Approx(1.5 * 0.75));
    REQUIRE(p.second == Approx(0.5 * 0.25));

    REQUIRE_THROWS_AS(omega_profiles(s, -0.1), ContractError);
    REQUIRE_THROWS_AS(omega_profiles(s, 7.1), ContractError);

    PulseSchedule bad = s;
    bad.t1 = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), ContractError);
    bad = s;
    bad.tau = -1.0;
    REQUIRE_THROWS_AS(bad.validate(), ContractError);
    bad = s;
    bad.omega_b2 = -0.5;
    REQUIRE_THROWS_AS(bad.validate(), ContractError);
    bad = s;
    bad.t2 = std::nan("");
    REQUIRE_THROWS_AS(bad.validate(), ContractError);

    REQUIRE(parse_shape("sin2") == PulseShape::Sin2);
    REQUIRE(parse_shape("linear") == PulseShape::Linear);
    REQUIRE_THROWS_AS(parse_shape("cos"), ContractError);
}

TEST_CASE("free evolution is exact and constant fields match the closed form") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const int n = idx.total();

    // All couplings and the detuning zero: rho stays bitwise constant.
    const PulseSchedule free_sched = PulseSchedule::storage_only(5.0, 0.0, 0.0);
    const CMatrix mixed = CMatrix::Identity(n, n) / static_cast<double>(n);
    const EvolutionResult free_res = evolve(cfg, free_sched, mixed, 0.5);
    REQUIRE((free_res.final_density - mixed).norm() == 0.0);
    // The only drift is the round-off in summing the constant diagonal.
    REQUIRE(free_res.max_trace_drift <= 1e-14);
    for (const auto& smp : free_res.trajectory) REQUIRE(smp.norm == Approx(1.0).margin(1e-15));

    // Zero pulse amplitudes with a detuning: V = -2*delta*P_c is constant,
    // so the evolution is the eigendecomposition propagator.
    const double delta = 0.7, t_end = 4.0;
    const PulseSchedule det_sched = PulseSchedule::storage_only(t_end, 0.0, 0.0, delta);
    CVector psi = CVector::Zero(n);
    psi[idx.index_of(Block::A, 0)] = 1.0 / std::sqrt(2.0);
    psi[idx.index_of(Block::C, 0)] = 1.0 / std::sqrt(2.0);
    const CMatrix rho0 = pure_density(psi);

    const CMatrix v = interaction_operator(idx, build_couplings(cfg), delta, 0.0, 0.0);
    CMatrix u = CMatrix::Zero(n, n);
    for (const auto& pair : hermitian_eig(v))
        u += std::polar(1.0, 0.5 * pair.value * t_end) * CMatrix(pair.vector * pair.vector.adjoint());
    const CMatrix exact = u * rho0 * u.adjoint();

    const EvolutionResult res = evolve(cfg, det_sched, rho0, 0.025);
    REQUIRE((res.final_density - exact).cwiseAbs().maxCoeff() <= 1e-8);
    REQUIRE(res.max_trace_drift <= 1e-10);
    REQUIRE(res.max_hermiticity_drift <= 1e-10);

    // The adiabatic propagator reproduces the same constant-field unitary.
    const CMatrix s = adiabatic_propagator(cfg, det_sched, t_end, 400);
    REQUIRE((s - u).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("storage transfers the photonic qubit onto the atomic register") {
    const PolarizationQubit xi = PolarizationQubit::normalized(Complex(0.6, 0.0),
                                                               Complex(0.0, 0.8));
    const PulseSchedule sched = PulseSchedule::storage_only(200.0, 1.0, 1.0);

    // Pi drive from m_b = 0.
    {
        const SystemConfig cfg = rb_pi();
        const BasisIndex idx(cfg.scheme);
        const Decomposition d = decompose(cfg, 1.0, 1.0);
        const CVector psi0 = photonic_input(idx, d, xi, 0);
        const EvolutionResult res = evolve(cfg, sched, pure_density(psi0), 0.02);

        const StorageReport rep =
            analyze_storage(d, AtomicDensityMatrix::zeeman_pure(Level::B, TwoJ(2), 0), xi);
        const CVector target = idx.embed(Block::A, rep.stored_state);
        REQUIRE(state_fidelity(res.final_density, target) >= 0.999);

        REQUIRE(res.trajectory.front().pop_b == Approx(1.0).margin(1e-12));
        REQUIRE(res.trajectory.back().pop_a >= 0.999);
        REQUIRE(res.max_trace_drift <= 1e-8);
        REQUIRE(res.max_hermiticity_drift <= 1e-8);
        const CMatrix sq = res.final_density * res.final_density;
        REQUIRE(std::abs(sq.trace().real() - 1.0) <= 1e-8);
    }

    // X drive from m_b = 0: the integrator independently confirms the
    // stored amplitudes, including the sign of the m_a = 0 component.
    {
        const SystemConfig cfg = SystemConfig::with_default_modes(
            LevelScheme(TwoJ(4), TwoJ(2), TwoJ(2)), Polarization::from_name("x"));
        const BasisIndex idx(cfg.scheme);
        const Decomposition d = decompose(cfg, 1.0, 1.0);
        const CVector psi0 = photonic_input(idx, d, xi, 0);
        const EvolutionResult res = evolve(cfg, sched, pure_density(psi0), 0.02);

        const StorageReport rep =
            analyze_storage(d, AtomicDensityMatrix::zeeman_pure(Level::B, TwoJ(2), 0), xi);
        const Complex sum = xi.xi1() + xi.xi2();
        REQUIRE(std::abs(rep.stored_state[2] - (-sum / (2.0 * std::sqrt(2.0)))) <= 1e-12);
        const CVector target = idx.embed(Block::A, rep.stored_state);
        REQUIRE(state_fidelity(res.final_density, target) >= 0.999);

        // The opposite middle sign is what storage does NOT produce.
        CVector flipped = rep.stored_state;
        flipped[2] = -flipped[2];
        REQUIRE(state_fidelity(res.final_density, idx.embed(Block::A, flipped)) <= 0.95);
    }
}

TEST_CASE("adiabatic propagator is unitary and reduces to the storage map") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const int n = idx.total();
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    const StorageOperator s1 = storage_operator(d);

    // The duration only scales the bright-state phases; the dark-state
    // geometry is duration-independent, so a short schedule suffices.
    const PulseSchedule sched = PulseSchedule::storage_only(1.0, 1.0, 1.0);

    const CMatrix at0 = adiabatic_propagator(cfg, sched, 0.0, 400);
    REQUIRE((at0 - CMatrix::Identity(n, n)).norm() == 0.0);

    const CMatrix s = adiabatic_propagator(cfg, sched, 1.0, 40000);
    REQUIRE((CMatrix(s.adjoint() * s) - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);

    // On any photonic input, the propagator acts as S1 into the a block
    // while the non-interacting directions stay put with zero phase.
    CMatrix db_proj = CMatrix::Zero(2 * idx.size(Block::B1), 2 * idx.size(Block::B1));
    for (const auto& vb : d.b_only) db_proj += vb * vb.adjoint();
    std::mt19937 rng(5150);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        CVector u(2 * idx.size(Block::B1));
        for (int i = 0; i < u.size(); ++i) u[i] = Complex(gauss(rng), gauss(rng));
        u.normalize();
        const CVector got = s * idx.embed_b(u);
        const CVector want =
            idx.embed(Block::A, CVector(s1.map * u)) + idx.embed_b(CVector(db_proj * u));
        REQUIRE((got - want).norm() <= 1e-8);
    }

    // Same check for the x drive: the tracked dark basis lands on the
    // storage map with the same sign conventions.
    const SystemConfig xcfg = SystemConfig::with_default_modes(
        LevelScheme(TwoJ(4), TwoJ(2), TwoJ(2)), Polarization::from_name("x"));
    const Decomposition xd = decompose(xcfg, 1.0, 1.0);
    const StorageOperator xs1 = storage_operator(xd);
    const CMatrix sx = adiabatic_propagator(xcfg, sched, 1.0, 40000);
    CMatrix xdb_proj = CMatrix::Zero(2 * idx.size(Block::B1), 2 * idx.size(Block::B1));
    for (const auto& vb : xd.b_only) xdb_proj += vb * vb.adjoint();
    for (int trial = 0; trial < 4; ++trial) {
        CVector u(2 * idx.size(Block::B1));
        for (int i = 0; i < u.size(); ++i) u[i] = Complex(gauss(rng), gauss(rng));
        u.normalize();
        const CVector got = sx * idx.embed_b(u);
        const CVector want =
            idx.embed(Block::A, CVector(xs1.map * u)) + idx.embed_b(CVector(xdb_proj * u));
        REQUIRE((got - want).norm() <= 1e-8);
    }

    // Detuning does not move the dark-state endpoint.
    const PulseSchedule det_sched = PulseSchedule::storage_only(1.0, 1.0, 1.0, 0.5);
    const CMatrix s_det = adiabatic_propagator(cfg, det_sched, 1.0, 4000);
    const CMatrix s_res = adiabatic_propagator(cfg, sched, 1.0, 4000);
    const PolarizationQubit xi = PolarizationQubit::normalized(Complex(1.0, 0.0),
                                                               Complex(-0.5, 0.5));
    const CVector probe = photonic_input(idx, d, xi, 0);
    REQUIRE((s_det * probe - s_res * probe).norm() <= 1e-5);
}

TEST_CASE("full schedule round trip restores the photon") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const Decomposition d = decompose(cfg, 1.0, 1.0);

    // Geometric check: over storage + retrieval the photonic block maps to
    // the projector onto the storable subspace plus the static directions.
    const PulseSchedule quick = PulseSchedule::round_trip(1.0, 0.0, 1.0, 1.0, 1.0);
    const CMatrix s_full = adiabatic_propagator(cfg, quick, quick.total(), 80000);
    CMatrix keep = CMatrix::Zero(2 * idx.size(Block::B1), 2 * idx.size(Block::B1));
    for (const auto& p : d.shared) keep += p.b_part * p.b_part.adjoint();
    for (const auto& vb : d.b_only) keep += vb * vb.adjoint();
    std::mt19937 rng(80211);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        CVector u(2 * idx.size(Block::B1));
        for (int i = 0; i < u.size(); ++i) u[i] = Complex(gauss(rng), gauss(rng));
        u.normalize();
        const CVector got = s_full * idx.embed_b(u);
        const CVector want = idx.embed_b(CVector(keep * u));
        REQUIRE((got - want).norm() <= 1e-8);
    }

    // Numerical round trip at pulse area 200 per stage.
    const PolarizationQubit xi = PolarizationQubit::normalized(Complex(0.8, 0.0),
                                                               Complex(0.6, 0.0));
    const CVector psi0 = photonic_input(idx, d, xi, 0);
    const PulseSchedule sched = PulseSchedule::round_trip(200.0, 0.0, 200.0, 1.0, 1.0);
    const EvolutionResult res = evolve(cfg, sched, pure_density(psi0), 0.02);
    REQUIRE(state_fidelity(res.final_density, psi0) >= 0.998);

    // A hold interval with zero detuning freezes the state and does not
    // degrade the retrieval.
    const PulseSchedule held = PulseSchedule::round_trip(200.0, 5.0, 200.0, 1.0, 1.0);
    const EvolutionResult hres = evolve(cfg, held, pure_density(psi0), 0.02);
    double pop_a_start = -1.0, pop_a_end = -1.0;
    for (const auto& smp : hres.trajectory) {
        if (smp.time >= 200.0 && pop_a_start < 0.0) pop_a_start = smp.pop_a;
        if (smp.time <= 205.0) pop_a_end = smp.pop_a;
    }
    REQUIRE(pop_a_start == Approx(pop_a_end).margin(1e-12));
    REQUIRE(state_fidelity(hres.final_density, psi0) >= 0.998);
}

TEST_CASE("numerical and adiabatic evolution converge with pulse area") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    const PolarizationQubit xi = PolarizationQubit::normalized(Complex(0.6, 0.0),
                                                               Complex(0.0, 0.8));
    const CMatrix rho0 = pure_density(photonic_input(idx, d, xi, 0));

    double prev_fid = -1.0, prev_td = 2.0;
    for (double area : {25.0, 50.0, 100.0}) {
        const PulseSchedule sched = PulseSchedule::storage_only(area, 1.0, 1.0);
        const AdiabaticComparison cmp = compare_adiabatic(cfg, sched, rho0, 0.02, 2000);
        REQUIRE(cmp.fidelity > prev_fid);
        REQUIRE(cmp.trace_distance <= prev_td);
        REQUIRE(cmp.leak_weight <= 1e-3);
        prev_fid = cmp.fidelity;
        prev_td = cmp.trace_distance;
    }
    // The effective gaps carry the dipole factors (~0.2-0.45), so area 100
    // is still imperfect; area 200 reaches 0.999 (checked elsewhere).
    REQUIRE(prev_fid >= 0.98);

    // An input with weight on a non-interacting direction leaks exactly
    // that weight through the schedule.
    const int nb = idx.size(Block::B1);
    CVector dead = CVector::Zero(2 * nb);
    dead[nb - 1] = 1.0;  // mode 1, m_b = +1: never couples under the pi drive
    const CVector psi_mix =
        std::sqrt(0.75) * photonic_input(idx, d, xi, 0) + 0.5 * idx.embed_b(dead);
    const PulseSchedule sched = PulseSchedule::storage_only(100.0, 1.0, 1.0);
    const AdiabaticComparison cmp = compare_adiabatic(cfg, sched, pure_density(psi_mix), 0.02, 2000);
    REQUIRE(cmp.leak_weight == Approx(0.25).margin(1e-3));

    // Detuning shrinks the dark<->dressed gap from ~c to ~c^2/(2*delta), so
    // convergence needs larger areas; the limit point itself is the
    // delta-independent storage map (checked against the propagator test).
    double det_prev = 0.0;
    for (const double area : {100.0, 400.0}) {
        const PulseSchedule det = PulseSchedule::storage_only(area, 1.0, 1.0, 0.5);
        const AdiabaticComparison cmp_det = compare_adiabatic(cfg, det, rho0, 0.02, 2000);
        REQUIRE(cmp_det.fidelity > det_prev);
        REQUIRE(cmp_det.leak_weight <= 1e-3);
        det_prev = cmp_det.fidelity;
    }
    REQUIRE(det_prev >= 0.98);
}

TEST_CASE("integrator is fourth order in the step size") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const Decomposition d = decompose(cfg, 1.0, 1.0);
    const PolarizationQubit xi = PolarizationQubit::normalized(Complex(1.0, 0.0),
                                                               Complex(1.0, 0.0));
    const CMatrix rho0 = pure_density(photonic_input(idx, d, xi, 0));
    const PulseSchedule sched = PulseSchedule::storage_only(5.0, 0.4, 0.4, 0.4);

    const CMatrix ref = evolve(cfg, sched, rho0, 0.025).final_density;
    const double e1 = (evolve(cfg, sched, rho0, 0.1).final_density - ref).norm();
    const double e2 = (evolve(cfg, sched, rho0, 0.05).final_density - ref).norm();
    REQUIRE(e1 > 1e-12);  // errors resolvable above round-off
    const double ratio = e1 / e2;
    // Fourth order predicts ~17 against a dt/4 reference; accept a factor 3.
    REQUIRE(ratio >= 16.0 / 3.0);
    REQUIRE(ratio <= 48.0);
}

TEST_CASE("dynamics contracts reject invalid inputs") {
    const SystemConfig cfg = rb_pi();
    const BasisIndex idx(cfg.scheme);
    const int n = idx.total();
    const PulseSchedule sched = PulseSchedule::storage_only(10.0, 1.0, 1.0);
    const CMatrix mixed = CMatrix::Identity(n, n) / static_cast<double>(n);

    REQUIRE_THROWS_AS(evolve(cfg, sched, mixed, 0.06), ContractError);   // dt*omega > 0.05
    REQUIRE_THROWS_AS(evolve(cfg, sched, mixed, -0.01), ContractError);  // dt <= 0
    REQUIRE_THROWS_AS(evolve(cfg, sched, CMatrix::Identity(n, n), 0.02), ContractError);
    REQUIRE_THROWS_AS(evolve(cfg, sched, CMatrix::Identity(n - 1, n - 1) / (n - 1.0), 0.02),
                      ContractError);

    REQUIRE_THROWS_AS(adiabatic_propagator(cfg, sched, 11.0, 400), ContractError);
    REQUIRE_THROWS_AS(adiabatic_propagator(cfg, sched, -1.0, 400), ContractError);
    REQUIRE_THROWS_AS(adiabatic_propagator(cfg, sched, 5.0, 99), ContractError);

    std::vector<double> bad_times{5.0, 1.0};
    REQUIRE_THROWS_AS(adiabatic_propagators(cfg, sched, bad_times, 400), ContractError);

    // A sudden basis rotation that spreads one eigenvector across several
    // others cannot be tracked and is reported with the time.
    CVector mixed_dir(3);
    mixed_dir << 1.0, 1.0, 1.0;
    mixed_dir /= std::sqrt(3.0);
    const CMatrix late = 2.0 * (mixed_dir * mixed_dir.adjoint()) - CMatrix::Identity(3, 3);
    CMatrix early = CMatrix::Zero(3, 3);
    early(0, 0) = 1.0;
    early(1, 1) = -1.0;
    early(2, 2) = -1.0;
    auto v_of_t = [&](double t) { return t < 0.5 ? early : late; };
    REQUIRE_THROWS_WITH(adiabatic_propagator(v_of_t, 1.0, 100),
                        ContainsSubstring("ambiguous") && ContainsSubstring("0.5"));
}

TEST_CASE("propagator snapshots along a schedule are consistent") {
    const SystemConfig cfg = rb_pi();
    const PulseSchedule sched = PulseSchedule::storage_only(1.0, 1.0, 1.0);
    const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    const auto snaps = adiabatic_propagators(cfg, sched, times, 2000);
    REQUIRE(snaps.size() == times.size());

    const BasisIndex idx(cfg.scheme);
    const int n = idx.total();
    REQUIRE((snaps[0] - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        const CMatrix gram = snaps[k].adjoint() * snaps[k];
        REQUIRE((gram - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-7);
        const CMatrix direct = adiabatic_propagator(cfg, sched, times[k], 2000);
        REQUIRE((snaps[k] - direct).cwiseAbs().maxCoeff() <= 1e-6);
    }
}
