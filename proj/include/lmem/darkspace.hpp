#pragma once

// Dark/bright eigenstructure of the interaction operator on the
// single-excitation space. Dark states (eigenvalue zero) come in three
// field-independent families plus one field-dependent combination:
//   - shared pairs (A_n, B_n): unit vectors in the a and two-mode b spaces
//     with g_a^dag A_n = ratio_n * g_b^dag B_n; for field amplitudes
//     (omega_a, omega_b) the instantaneous dark combination is
//       D_n = (ratio_n omega_a B_n - omega_b A_n) / sqrt(omega_b^2 + ratio_n^2 omega_a^2),
//   - a-only states annihilated by g_a^dag,
//   - b-only states annihilated by g_b^dag.
// Bright excitations organize into dressed pairs per coupled c-direction,
// with an uncoupled-c family (eigenvalue -2 delta) for directions no beam
// reaches. The decomposition validates itself against the interaction
// operator and refuses (with ToleranceError) configurations for which the
// shared-pair construction does not close.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lmem/lambda_system.hpp"
#include "lmem/linalg.hpp"

namespace lmem {

struct SharedDarkPair {
    double ratio = 0.0;  // ratio_n > 0 in g_a^dag A_n = ratio_n g_b^dag B_n
    CVector a_part;      // unit vector, a sublevel space
    CVector b_part;      // unit vector, stacked two-mode b space
};

struct BrightChannel {
    double strength = 0.0;      // coupling c_n > 0 of this dressed pair
    double theta = 0.0;         // mixing angle: tan(theta) = (sqrt(delta^2+c^2)+delta)/c
    double lambda_plus = 0.0;   // -delta + sqrt(delta^2 + c^2)
    double lambda_minus = 0.0;  // -delta - sqrt(delta^2 + c^2)
    CVector c_part;             // unit vector, c sublevel space
    CVector f_a;                // a component of the bright state F (not unit by itself)
    CVector f_b;                // b component of F; |f_a|^2 + |f_b|^2 = 1
};

struct FamilyCounts {
    int shared = 0;
    int a_only = 0;
    int b_only = 0;
    int a_residual = 0;
    int b_residual = 0;
    int bright_pairs = 0;
    int c_uncoupled = 0;

    int dark_total() const { return shared + a_only + b_only + a_residual + b_residual; }
    int total() const { return dark_total() + 2 * bright_pairs + c_uncoupled; }
};

struct DecomposeOptions {
    double rel_tol = 1e-10;       // relative cut separating zero from coupled
    double residual_tol = 1e-9;   // eigen-residual acceptance, relative to |V|
};

struct Decomposition {
    BasisIndex index;
    CouplingSet couplings;
    double omega_a = 0.0, omega_b = 0.0, delta = 0.0;

    std::vector<SharedDarkPair> shared;   // descending ratio
    std::vector<CVector> a_only;          // block-local (a space)
    std::vector<CVector> b_only;          // block-local (two-mode b space)
    std::vector<CVector> a_residual;      // populated only when omega_a == 0
    std::vector<CVector> b_residual;      // populated only when omega_b == 0
    std::vector<BrightChannel> bright;    // descending strength
    std::vector<CVector> c_uncoupled;     // block-local (c space)

    // Full verified eigenbasis: columns ordered shared, a_only, b_only,
    // a_residual, b_residual, all dressed +, all dressed -, uncoupled c.
    CMatrix eigen_basis;
    RVector eigen_values;
    std::vector<std::string> eigen_families;

    explicit Decomposition(const LevelScheme& s) : index(s) {}

    int n_dark() const {
        return static_cast<int>(shared.size() + a_only.size() + b_only.size() +
                                a_residual.size() + b_residual.size());
    }

    FamilyCounts counts() const {
        FamilyCounts c;
        c.shared = static_cast<int>(shared.size());
        c.a_only = static_cast<int>(a_only.size());
        c.b_only = static_cast<int>(b_only.size());
        c.a_residual = static_cast<int>(a_residual.size());
        c.b_residual = static_cast<int>(b_residual.size());
        c.bright_pairs = static_cast<int>(bright.size());
        c.c_uncoupled = static_cast<int>(c_uncoupled.size());
        return c;
    }

    // Instantaneous dark combination of shared pair n at the stored field
    // amplitudes, as a unit vector in the full space.
    CVector shared_dark(std::size_t n) const {
        const SharedDarkPair& p = shared.at(n);
        const double nrm = std::sqrt(omega_b * omega_b +
                                     p.ratio * p.ratio * omega_a * omega_a);
        if (nrm == 0.0)
            throw ContractError("shared_dark: undefined when both field amplitudes vanish");
        return (p.ratio * omega_a * index.embed_b(p.b_part) -
                omega_b * index.embed(Block::A, p.a_part)) /
               nrm;
    }
};

namespace detail {

// Orthonormal deterministic basis of the orthogonal complement, within an
// n-dimensional space, of the span of the given vectors.
inline std::vector<CVector> complement_basis(int n, const std::vector<const CVector*>& span,
                                             double rel_tol) {
    CMatrix constraints(static_cast<Eigen::Index>(span.size()), n);
    for (std::size_t r = 0; r < span.size(); ++r) constraints.row(static_cast<Eigen::Index>(r)) = span[r]->adjoint();
    const CMatrix basis = null_space(constraints, rel_tol);
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index k = 0; k < basis.cols(); ++k) out.push_back(basis.col(k));
    return out;
}

inline void validate_decomposition(Decomposition& d, const DecomposeOptions& opt) {
    const BasisIndex& idx = d.index;
    const int n = idx.total();
    const int found = d.counts().total();
    if (found != n)
        throw ToleranceError(
            "decompose: assembled " + std::to_string(found) + " eigenvectors for a " +
            std::to_string(n) +
            "-dimensional space; the drive polarization likely couples the a level to "
            "upper-state directions the cavity modes cannot reach, where the shared-pair "
            "construction does not close");

    CMatrix u(n, n);
    RVector values(n);
    std::vector<std::string> families;
    families.reserve(static_cast<std::size_t>(n));
    int col = 0;
    auto push = [&](const CVector& v, double lambda, std::string label) {
        u.col(col) = v;
        values(col) = lambda;
        families.push_back(std::move(label));
        ++col;
    };

    for (std::size_t k = 0; k < d.shared.size(); ++k)
        push(d.shared_dark(k), 0.0, "shared[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < d.a_only.size(); ++k)
        push(idx.embed(Block::A, d.a_only[k]), 0.0, "a_only[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < d.b_only.size(); ++k)
        push(idx.embed_b(d.b_only[k]), 0.0, "b_only[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < d.a_residual.size(); ++k)
        push(idx.embed(Block::A, d.a_residual[k]), 0.0, "a_residual[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < d.b_residual.size(); ++k)
        push(idx.embed_b(d.b_residual[k]), 0.0, "b_residual[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < d.bright.size(); ++k) {
        const BrightChannel& ch = d.bright[k];
        const CVector f = idx.embed(Block::A, ch.f_a) + idx.embed_b(ch.f_b);
        const CVector c = idx.embed(Block::C, ch.c_part);
        push(std::sin(ch.theta) * f + std::cos(ch.theta) * c, ch.lambda_plus,
             "dressed+[" + std::to_string(k) + "]");
    }
    for (std::size_t k = 0; k < d.bright.size(); ++k) {
        const BrightChannel& ch = d.bright[k];
        const CVector f = idx.embed(Block::A, ch.f_a) + idx.embed_b(ch.f_b);
        const CVector c = idx.embed(Block::C, ch.c_part);
        push(std::cos(ch.theta) * f - std::sin(ch.theta) * c, ch.lambda_minus,
             "dressed-[" + std::to_string(k) + "]");
    }
    for (std::size_t k = 0; k < d.c_uncoupled.size(); ++k)
        push(idx.embed(Block::C, d.c_uncoupled[k]), -2.0 * d.delta,
             "c_uncoupled[" + std::to_string(k) + "]");

    const CMatrix gram = u.adjoint() * u;
    const double ortho_defect =
        (gram - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (ortho_defect > opt.residual_tol)
        throw ToleranceError(
            "decompose: assembled eigenvectors are not orthonormal (defect " +
            std::to_string(ortho_defect) +
            "); the configuration likely violates the shared-pair alignment condition");

    const CMatrix v = interaction_operator(idx, d.couplings, d.delta, d.omega_a, d.omega_b);
    const double v_norm = v.norm();
    double worst = 0.0;
    std::size_t worst_col = 0;
    for (int k = 0; k < n; ++k) {
        const double r = (v * u.col(k) - values(k) * u.col(k)).norm();
        if (r > worst) {
            worst = r;
            worst_col = static_cast<std::size_t>(k);
        }
    }
    if (worst > opt.residual_tol * v_norm)
        throw ToleranceError("decompose: eigen-residual " + std::to_string(worst) +
                             " for family " + families[worst_col] + " exceeds tolerance " +
                             std::to_string(opt.residual_tol * v_norm) +
                             "; the configuration likely violates the shared-pair "
                             "alignment condition");

    d.eigen_basis = std::move(u);
    d.eigen_values = std::move(values);
    d.eigen_families = std::move(families);
}

}  // namespace detail

inline Decomposition decompose(const SystemConfig& cfg, double omega_a, double omega_b,
                               DecomposeOptions opt = {}) {
    if (!std::isfinite(omega_a) || !std::isfinite(omega_b))
        throw ContractError("decompose: field amplitudes must be finite");
    if (!(opt.rel_tol > 0.0) || !(opt.residual_tol > 0.0))
        throw ContractError("decompose: tolerances must be positive");

    Decomposition d(cfg.scheme);
    d.couplings = build_couplings(cfg);
    d.omega_a = omega_a;
    d.omega_b = omega_b;
    d.delta = cfg.delta;
    const CouplingSet& g = d.couplings;
    const int nb2 = d.index.b_total();

    // Field-independent null families.
    {
        const CMatrix a_basis = null_space(CMatrix(g.g_a.adjoint()), opt.rel_tol);
        for (Eigen::Index k = 0; k < a_basis.cols(); ++k) d.a_only.push_back(a_basis.col(k));
        const CMatrix b_basis = null_space(CMatrix(g.g_b.adjoint()), opt.rel_tol);
        for (Eigen::Index k = 0; k < b_basis.cols(); ++k) d.b_only.push_back(b_basis.col(k));
    }

    // Shared pairs: B_n proportional to pinv(g_b g_b^dag) g_b g_a^dag A_n,
    // with A_n the eigenvectors of the induced map squared.
    const bool fields_on = (omega_a != 0.0) || (omega_b != 0.0);
    if (fields_on) {
        const CMatrix w_b = g.g_b * g.g_b.adjoint();
        const auto wb_pairs = hermitian_eig(w_b, 1e-8);
        const double wb_max = std::max(wb_pairs.front().value, 0.0);
        CMatrix w_b_pinv = CMatrix::Zero(nb2, nb2);
        for (const auto& p : wb_pairs) {
            if (wb_max > 0.0 && p.value > opt.rel_tol * wb_max)
                w_b_pinv += (p.vector * p.vector.adjoint()) / p.value;
        }
        const CMatrix d_ba = w_b_pinv * g.g_b * g.g_a.adjoint();
        const CMatrix m = d_ba.adjoint() * d_ba;
        const auto m_pairs = hermitian_eig(m, 1e-8);
        const double m_max = std::max(m_pairs.front().value, 0.0);
        for (const auto& p : m_pairs) {
            if (m_max > 0.0 && p.value > opt.rel_tol * m_max) {
                SharedDarkPair pair;
                pair.ratio = std::sqrt(p.value);
                pair.a_part = p.vector;
                pair.b_part = d_ba * p.vector / pair.ratio;
                pair.b_part /= pair.b_part.norm();
                d.shared.push_back(std::move(pair));
            }
        }
    }

    // Bright channels from the c-space coupling form, classified by the
    // directly computed coupling strength of each eigendirection.
    {
        const CMatrix m_c = (omega_a * omega_a) * (g.g_a.adjoint() * g.g_a) +
                            (omega_b * omega_b) * (g.g_b.adjoint() * g.g_b);
        const auto c_pairs = hermitian_eig(m_c, 1e-8);
        const double scale = std::sqrt(std::max(c_pairs.front().value, 0.0));
        for (const auto& p : c_pairs) {
            const CVector fa = omega_a * (g.g_a * p.vector);
            const CVector fb = omega_b * (g.g_b * p.vector);
            const double strength = std::sqrt(fa.squaredNorm() + fb.squaredNorm());
            if (strength <= opt.rel_tol * scale) {
                d.c_uncoupled.push_back(p.vector);
                continue;
            }
            BrightChannel ch;
            ch.strength = strength;
            ch.c_part = p.vector;
            ch.f_a = fa / strength;
            ch.f_b = fb / strength;
            const double root = std::hypot(d.delta, strength);
            ch.theta = std::atan2(root + d.delta, strength);
            ch.lambda_plus = -d.delta + root;
            ch.lambda_minus = -d.delta - root;
            d.bright.push_back(std::move(ch));
        }
    }

    // With a field switched off entirely, every direction of its lower level
    // becomes dark; complete the family beyond the span already collected.
    if (omega_a == 0.0) {
        std::vector<const CVector*> span;
        for (const auto& v : d.a_only) span.push_back(&v);
        for (const auto& p : d.shared) span.push_back(&p.a_part);
        d.a_residual = detail::complement_basis(d.index.size(Block::A), span, opt.rel_tol);
    }
    if (omega_b == 0.0) {
        std::vector<const CVector*> span;
        for (const auto& v : d.b_only) span.push_back(&v);
        for (const auto& p : d.shared) span.push_back(&p.b_part);
        d.b_residual = detail::complement_basis(nb2, span, opt.rel_tol);
    }

    detail::validate_decomposition(d, opt);
    return d;
}

// Counting of dark states against the closed-form mode-counting prediction
// for the b-only family (valid when the stacked cavity couplings reach every
// upper-state direction). The prediction may be negative or disagree for
// small schemes; `formula_applies` reports whether it matched.
struct DarkCountReport {
    int predicted_b_only = 0;
    int actual_b_only = 0;
    bool formula_applies = false;
    FamilyCounts counts;
};

inline DarkCountReport dark_counts(const SystemConfig& cfg, DecomposeOptions opt = {}) {
    const Decomposition d = decompose(cfg, 1.0, 1.0, opt);
    DarkCountReport r;
    r.predicted_b_only = 2 * cfg.scheme.jb.twice - cfg.scheme.jc.twice + 1;
    r.actual_b_only = static_cast<int>(d.b_only.size());
    r.formula_applies = (r.predicted_b_only == r.actual_b_only);
    r.counts = d.counts();
    return r;
}

// Upper-state directions invisible to the drive, and the b-space directions
// they shadow: population reaching span{g_b c_kernel_n} cannot return
// through the drive and is lost for retrieval. Images with negligible norm
// are skipped; the returned b vectors are normalized but not mutually
// orthogonalized.
struct LeakSpace {
    std::vector<CVector> c_kernel;  // c-space basis of null(g_a)
    std::vector<CVector> b_leak;    // normalized g_b images
};

inline LeakSpace leak_states(const SystemConfig& cfg, double rel_tol = 1e-10) {
    const CouplingSet g = build_couplings(cfg);
    LeakSpace out;
    const CMatrix kernel = null_space(g.g_a, rel_tol);
    const double scale = std::max(g.g_b.norm(), 1e-300);
    for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
        out.c_kernel.push_back(kernel.col(k));
        const CVector image = g.g_b * kernel.col(k);
        if (image.norm() > rel_tol * scale) out.b_leak.push_back(image / image.norm());
    }
    return out;
}

}  // namespace lmem
