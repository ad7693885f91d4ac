#pragma once

// Qubit storage layer: validated atomic density matrices and polarization
// qubits, the storage/retrieval partial isometries built from the shared dark
// pairs, the 2x2 storage probability matrix w, round trips, and initial-state
// scans. Conventions: the photonic qubit lives on the two cavity modes with
// amplitudes (xi_1, xi_2); stacked b-space vectors keep mode-1 components
// first; w_ij = sum_n <b_n^(i)| rho |b_n^(j)> where b_n^(1), b_n^(2) are the
// mode halves of the shared pair's b part.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darkspace.hpp"

namespace lmem {

// Default tolerance for declaring a storage faithful (max |w - I| bound).
inline constexpr double kFaithfulTol = 1e-9;

enum class Level { A, B };

inline const char* level_name(Level lv) { return lv == Level::A ? "a" : "b"; }

// Density matrix on one Zeeman manifold, validated on construction:
// Hermitian and unit trace within 1e-12, eigenvalues above -1e-12.
class AtomicDensityMatrix {
public:
    static constexpr double kHermTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPsdFloor = -1e-12;

    static AtomicDensityMatrix from_matrix(Level level, TwoJ j, CMatrix rho) {
        validate(j, rho);
        return AtomicDensityMatrix(level, j, std::move(rho), std::nullopt);
    }

    // Pure state |psi><psi|; psi is normalized (zero vector rejected).
    static AtomicDensityMatrix pure(Level level, TwoJ j, const CVector& psi) {
        if (psi.size() != j.dim())
            throw ContractError("AtomicDensityMatrix: state vector has dimension " +
                                std::to_string(psi.size()) + " but J=" + j.str() +
                                " needs " + std::to_string(j.dim()));
        if (!psi.allFinite())
            throw ContractError("AtomicDensityMatrix: state vector has non-finite entries");
        const double norm = psi.norm();
        if (norm <= 0.0)
            throw ContractError("AtomicDensityMatrix: state vector must be nonzero");
        CVector unit = psi / norm;
        CMatrix rho = unit * unit.adjoint();
        return AtomicDensityMatrix(level, j, std::move(rho), std::move(unit));
    }

    static AtomicDensityMatrix zeeman_pure(Level level, TwoJ j, int twice_m) {
        if (std::abs(twice_m) > j.twice || ((twice_m - j.twice) % 2) != 0)
            throw ContractError("AtomicDensityMatrix: m=" + half_int_str(twice_m) +
                                " is not a sublevel of J=" + j.str());
        CVector psi = CVector::Zero(j.dim());
        psi[(twice_m + j.twice) / 2] = 1.0;
        return pure(level, j, psi);
    }

    static AtomicDensityMatrix maximally_mixed(Level level, TwoJ j) {
        CMatrix rho = CMatrix::Identity(j.dim(), j.dim()) / static_cast<double>(j.dim());
        return AtomicDensityMatrix(level, j, std::move(rho), std::nullopt);
    }

    Level level() const { return level_; }
    const TwoJ& j() const { return j_; }
    int dim() const { return j_.dim(); }
    const CMatrix& matrix() const { return rho_; }

    // Set only when constructed through pure()/zeeman_pure().
    const std::optional<CVector>& pure_vector() const { return pure_; }

private:
    AtomicDensityMatrix(Level level, TwoJ j, CMatrix rho, std::optional<CVector> pure)
        : level_(level), j_(j), rho_(std::move(rho)), pure_(std::move(pure)) {}

    static void validate(TwoJ j, const CMatrix& rho) {
        if (rho.rows() != j.dim() || rho.cols() != j.dim())
            throw ContractError("AtomicDensityMatrix: matrix is " + std::to_string(rho.rows()) +
                                "x" + std::to_string(rho.cols()) + " but J=" + j.str() +
                                " needs " + std::to_string(j.dim()) + "x" +
                                std::to_string(j.dim()));
        if (!rho.allFinite())
            throw ContractError("AtomicDensityMatrix: matrix has non-finite entries");
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kHermTol)
            throw ContractError("AtomicDensityMatrix: not Hermitian (max deviation " +
                                format_double(herm) + ")");
        const Complex tr = rho.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol)
            throw ContractError("AtomicDensityMatrix: trace " + format_double(tr.real()) +
                                (tr.imag() >= 0 ? "+" : "") + format_double(tr.imag()) +
                                "i must equal 1");
        const CMatrix sym = 0.5 * (rho + rho.adjoint());
        const auto eigs = hermitian_eig(sym);
        if (!eigs.empty() && eigs.back().value < kPsdFloor)
            throw ContractError("AtomicDensityMatrix: negative eigenvalue " +
                                format_double(eigs.back().value));
    }

    Level level_;
    TwoJ j_;
    CMatrix rho_;
    std::optional<CVector> pure_;
};

// Unit two-mode photonic amplitude pair (xi_1, xi_2).
class PolarizationQubit {
public:
    static constexpr double kUnitTol = 1e-12;

    PolarizationQubit(Complex xi1, Complex xi2) : xi_{xi1, xi2} {
        if (!std::isfinite(xi1.real()) || !std::isfinite(xi1.imag()) ||
            !std::isfinite(xi2.real()) || !std::isfinite(xi2.imag()))
            throw ContractError("PolarizationQubit: amplitudes must be finite");
        const double norm = std::sqrt(std::norm(xi1) + std::norm(xi2));
        if (std::abs(norm - 1.0) > kUnitTol)
            throw ContractError("PolarizationQubit: amplitudes have norm " +
                                format_double(norm) + ", expected 1");
    }

    static PolarizationQubit normalized(Complex xi1, Complex xi2) {
        const double norm = std::sqrt(std::norm(xi1) + std::norm(xi2));
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw ContractError("PolarizationQubit: amplitudes must be nonzero and finite");
        return PolarizationQubit(xi1 / norm, xi2 / norm);
    }

    Complex xi1() const { return xi_[0]; }
    Complex xi2() const { return xi_[1]; }
    Complex component(int i) const {
        if (i < 1 || i > 2) throw ContractError("PolarizationQubit: mode index must be 1 or 2");
        return xi_[i - 1];
    }

private:
    Complex xi_[2];
};

// Storage map S1 (or its adjoint, the retrieval map S2) together with the
// number of shared dark channels it was assembled from. n_channels == 0 means
// the scheme supports no storage at all and the map is the zero matrix.
struct StorageOperator {
    CMatrix map;
    int n_channels = 0;

    bool empty() const { return n_channels == 0; }
};

// S1 = -sum_n |A_n><B_n| : stacked two-mode b space -> a space. The sum is a
// polar factor of the b<-a transfer map, so it does not depend on the choice
// of eigenbasis within degenerate ratio clusters.
inline StorageOperator storage_operator(const Decomposition& d) {
    const int na = d.index.size(Block::A);
    const int nb2 = d.index.b_total();
    StorageOperator op;
    op.map = CMatrix::Zero(na, nb2);
    op.n_channels = static_cast<int>(d.shared.size());
    for (const auto& pair : d.shared) op.map -= pair.a_part * pair.b_part.adjoint();
    return op;
}

inline StorageOperator storage_operator(const SystemConfig& cfg) {
    return storage_operator(decompose(cfg, 1.0, 1.0));
}

// S2 = S1^dagger exactly; S2 S1 is the orthogonal projector onto span{B_n}.
inline StorageOperator retrieval_operator(const Decomposition& d) {
    StorageOperator op = storage_operator(d);
    op.map = CMatrix(op.map.adjoint());
    return op;
}

inline StorageOperator retrieval_operator(const SystemConfig& cfg) {
    return retrieval_operator(decompose(cfg, 1.0, 1.0));
}

// 2x2 probability matrix w_ij = sum_n <b_n^(i)| rho |b_n^(j)>. Its quadratic
// form on the qubit amplitudes gives the storage probability; 0 <= w <= I.
inline CMatrix probability_matrix(const Decomposition& d, const AtomicDensityMatrix& rho) {
    if (rho.level() != Level::B)
        throw ContractError("probability_matrix: the initial state must live on level b");
    const int nb = d.index.size(Block::B1);
    if (rho.dim() != nb)
        throw ContractError("probability_matrix: density matrix dimension " +
                            std::to_string(rho.dim()) + " does not match Jb sublevel count " +
                            std::to_string(nb));
    CMatrix w = CMatrix::Zero(2, 2);
    for (const auto& pair : d.shared) {
        const CVector b1 = pair.b_part.head(nb);
        const CVector b2 = pair.b_part.tail(nb);
        const CVector r1 = rho.matrix() * b1;
        const CVector r2 = rho.matrix() * b2;
        w(0, 0) += b1.dot(r1);
        w(0, 1) += b1.dot(r2);
        w(1, 0) += b2.dot(r1);
        w(1, 1) += b2.dot(r2);
    }
    w = 0.5 * (w + CMatrix(w.adjoint()));
    const auto eigs = hermitian_eig(w);
    if (!eigs.empty() &&
        (eigs.front().value > 1.0 + 1e-10 || eigs.back().value < -1e-10))
        throw ToleranceError("probability_matrix: eigenvalues of w escape [0, 1]: largest " +
                             format_double(eigs.front().value) + ", smallest " +
                             format_double(eigs.back().value));
    return w;
}

// P = sum_ij xi_i conj(xi_j) w_ij = |S1 (|xi> tensor |psi>)|^2 for pure rho.
inline double storage_probability(const CMatrix& w, const PolarizationQubit& xi) {
    if (w.rows() != 2 || w.cols() != 2)
        throw ContractError("storage_probability: w must be 2x2");
    const Complex x1 = xi.xi1(), x2 = xi.xi2();
    const Complex p = x1 * std::conj(x1) * w(0, 0) + x1 * std::conj(x2) * w(0, 1) +
                      x2 * std::conj(x1) * w(1, 0) + x2 * std::conj(x2) * w(1, 1);
    return p.real();
}

// Storage is faithful when w is the identity: every qubit is stored with
// probability one and the stored amplitudes preserve the qubit.
inline bool is_faithful(const CMatrix& w, double tol = kFaithfulTol) {
    if (w.rows() != 2 || w.cols() != 2) throw ContractError("is_faithful: w must be 2x2");
    if (!(tol > 0.0)) throw ContractError("is_faithful: tolerance must be positive");
    return (w - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= tol;
}

// Joint photon+atom state |xi><xi| tensor rho on the stacked two-mode b
// space (mode 1 components first).
inline CMatrix joint_density(const Decomposition& d, const AtomicDensityMatrix& rho,
                             const PolarizationQubit& xi) {
    if (rho.level() != Level::B)
        throw ContractError("joint_density: the initial state must live on level b");
    const int nb = d.index.size(Block::B1);
    if (rho.dim() != nb)
        throw ContractError("joint_density: density matrix dimension mismatch");
    CMatrix out(2 * nb, 2 * nb);
    const Complex xs[2] = {xi.xi1(), xi.xi2()};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block(i * nb, j * nb, nb, nb) = xs[i] * std::conj(xs[j]) * rho.matrix();
    return out;
}

// rho2 = (S2 S1) rho0 (S2 S1)^dagger on the stacked b space. trace(rho2) is
// the storage probability of rho0; faithful inputs come back unchanged and
// non-interacting (d_b) inputs are annihilated.
inline CMatrix round_trip(const Decomposition& d, const CMatrix& rho0) {
    const int nb2 = d.index.b_total();
    if (rho0.rows() != nb2 || rho0.cols() != nb2)
        throw ContractError("round_trip: input must be " + std::to_string(nb2) + "x" +
                            std::to_string(nb2) + " on the stacked two-mode b space");
    if (!rho0.allFinite())
        throw ContractError("round_trip: input has non-finite entries");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > AtomicDensityMatrix::kHermTol)
        throw ContractError("round_trip: input must be Hermitian");
    if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > AtomicDensityMatrix::kTraceTol)
        throw ContractError("round_trip: input must have unit trace");
    const StorageOperator s1 = storage_operator(d);
    const CMatrix p = s1.map.adjoint() * s1.map;  // projector onto span{B_n}
    return p * rho0 * p.adjoint();
}

// Full per-state storage summary. stored_state holds the raw amplitudes
// S1 (|xi> tensor |psi>) on the a sublevels (squared norm = storage
// probability); it is empty unless the input is pure.
struct StorageReport {
    CMatrix w;                 // 2x2 probability matrix
    bool faithful = false;     // max |w - I| within tolerance
    double worst_case_prob = 0.0;  // smallest eigenvalue of w
    double storage_prob = 0.0;     // probability for the given qubit
    double leak_weight = 0.0;      // 1 - storage_prob
    CMatrix stored_state_map;      // S1
    int n_channels = 0;            // shared dark channels
    CVector stored_state;          // raw stored amplitudes (pure inputs only)
};

inline StorageReport analyze_storage(const Decomposition& d, const AtomicDensityMatrix& rho,
                                     const PolarizationQubit& xi, double tol = kFaithfulTol) {
    StorageReport rep;
    rep.w = probability_matrix(d, rho);
    rep.faithful = is_faithful(rep.w, tol);
    const auto eigs = hermitian_eig(rep.w);
    rep.worst_case_prob = eigs.empty() ? 0.0 : eigs.back().value;
    rep.storage_prob = storage_probability(rep.w, xi);
    if (rep.storage_prob < -1e-10 || rep.storage_prob > 1.0 + 1e-10)
        throw ToleranceError("analyze_storage: storage probability " +
                             format_double(rep.storage_prob) + " escapes [0, 1]");
    rep.storage_prob = std::clamp(rep.storage_prob, 0.0, 1.0);
    rep.leak_weight = 1.0 - rep.storage_prob;
    const StorageOperator op = storage_operator(d);
    rep.stored_state_map = op.map;
    rep.n_channels = op.n_channels;
    if (rho.pure_vector()) {
        const int nb = d.index.size(Block::B1);
        CVector joint(2 * nb);
        joint.head(nb) = xi.xi1() * (*rho.pure_vector());
        joint.tail(nb) = xi.xi2() * (*rho.pure_vector());
        rep.stored_state = op.map * joint;
    }
    return rep;
}

inline StorageReport analyze_storage(const SystemConfig& cfg, const AtomicDensityMatrix& rho,
                                     const PolarizationQubit& xi, double tol = kFaithfulTol) {
    return analyze_storage(decompose(cfg, 1.0, 1.0), rho, xi, tol);
}

// One row of an initial-state scan.
struct ScanRow {
    std::string initial;  // "m=-1", "m=1/2", ..., or "mixed"
    CMatrix w;
    bool faithful = false;
    double worst_case = 0.0;  // smallest eigenvalue of w
};

struct ScanResult {
    std::vector<ScanRow> rows;
    int best_index = -1;          // first row attaining the best worst case
    double best_worst_case = 0.0;
};

// Deterministic scan over every pure Zeeman state of level b (ascending m)
// followed by the maximally mixed state.
inline ScanResult scan_initial_states(const Decomposition& d, double tol = kFaithfulTol) {
    const TwoJ jb(d.index.twice_j(Block::B1));
    ScanResult result;
    auto add = [&](std::string label, const AtomicDensityMatrix& rho) {
        ScanRow row;
        row.initial = std::move(label);
        row.w = probability_matrix(d, rho);
        row.faithful = is_faithful(row.w, tol);
        const auto eigs = hermitian_eig(row.w);
        row.worst_case = eigs.empty() ? 0.0 : eigs.back().value;
        result.rows.push_back(std::move(row));
    };
    for (const int tm : jb.twice_m_values())
        add("m=" + half_int_str(tm), AtomicDensityMatrix::zeeman_pure(Level::B, jb, tm));
    add("mixed", AtomicDensityMatrix::maximally_mixed(Level::B, jb));
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (result.best_index < 0 || result.rows[i].worst_case > result.best_worst_case) {
            result.best_index = static_cast<int>(i);
            result.best_worst_case = result.rows[i].worst_case;
        }
    }
    return result;
}

inline ScanResult scan_initial_states(const SystemConfig& cfg, double tol = kFaithfulTol) {
    return scan_initial_states(decompose(cfg, 1.0, 1.0), tol);
}

// Certificate for optimizing min(w11, w22) over diagonal initial states.
// Both diagonal entries are linear in the populations, so
//   min(w11, w22) <= (w11 + w22)/2 <= max_m (w11(m) + w22(m))/2,
// and a balanced vertex (w11 = w22) attaining that bound is a certified
// optimum. upper_bound < 1 certifies that w = I is unreachable with any
// diagonal initial state.
struct DiagonalBound {
    std::vector<int> twice_m;        // vertex labels (ascending)
    std::vector<double> vertex_w11;
    std::vector<double> vertex_w22;
    double mixed_value = 0.0;        // min(w11, w22) at the maximally mixed state
    double best_value = 0.0;         // best min(w11, w22) among vertices + mixed
    int best_twice_m = 0;            // argmax vertex (mixed never beats a vertex avg)
    double upper_bound = 0.0;        // max_m (w11 + w22)/2
    bool optimum_certified = false;  // best_value reaches upper_bound
    bool identity_infeasible = false;  // upper_bound < 1
};

inline DiagonalBound diagonal_worst_case_bound(const Decomposition& d, double tol = 1e-12) {
    const TwoJ jb(d.index.twice_j(Block::B1));
    DiagonalBound out;
    out.best_value = -1.0;
    for (const int tm : jb.twice_m_values()) {
        const CMatrix w =
            probability_matrix(d, AtomicDensityMatrix::zeeman_pure(Level::B, jb, tm));
        out.twice_m.push_back(tm);
        out.vertex_w11.push_back(w(0, 0).real());
        out.vertex_w22.push_back(w(1, 1).real());
        const double vmin = std::min(w(0, 0).real(), w(1, 1).real());
        const double vavg = 0.5 * (w(0, 0).real() + w(1, 1).real());
        if (vmin > out.best_value) {
            out.best_value = vmin;
            out.best_twice_m = tm;
        }
        out.upper_bound = std::max(out.upper_bound, vavg);
    }
    const CMatrix wm = probability_matrix(d, AtomicDensityMatrix::maximally_mixed(Level::B, jb));
    out.mixed_value = std::min(wm(0, 0).real(), wm(1, 1).real());
    out.best_value = std::max(out.best_value, out.mixed_value);
    out.optimum_certified = out.best_value >= out.upper_bound - tol;
    out.identity_infeasible = out.upper_bound < 1.0 - tol;
    return out;
}

inline DiagonalBound diagonal_worst_case_bound(const SystemConfig& cfg, double tol = 1e-12) {
    return diagonal_worst_case_bound(decompose(cfg, 1.0, 1.0), tol);
}

}  // namespace lmem
