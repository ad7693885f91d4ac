#pragma once

// The three-level Lambda system with Zeeman structure: two lower levels a, b
// and one upper level c, a classical drive on a<->c, and two orthogonally
// polarized cavity modes on b<->c. States live in the single-excitation
// space: the blocks are the a sublevels, the b sublevels paired with a photon
// in mode 1, the b sublevels paired with a photon in mode 2, and the c
// sublevels (no photon).

#include <array>
#include <string>
#include <string_view>

#include "lmem/angular.hpp"
#include "lmem/linalg.hpp"

namespace lmem {

struct LevelScheme {
    TwoJ ja, jb, jc;

    LevelScheme(TwoJ a, TwoJ b, TwoJ c) : ja(a), jb(b), jc(c) {
        check_transition(ja, jc, "a");
        check_transition(jb, jc, "b");
    }

    static LevelScheme parse(std::string_view a, std::string_view b, std::string_view c) {
        return LevelScheme(TwoJ::parse(a), TwoJ::parse(b), TwoJ::parse(c));
    }

    std::string str() const {
        return "Ja=" + ja.str() + " Jb=" + jb.str() + " Jc=" + jc.str();
    }

private:
    static void check_transition(TwoJ j_low, TwoJ j_up, const char* which) {
        const std::string name(which);
        if ((j_low.twice % 2) != (j_up.twice % 2))
            throw ContractError("LevelScheme: levels " + name +
                                " and c must be both integer or both half-integer");
        if (std::abs(j_low.twice - j_up.twice) > 2)
            throw ContractError("LevelScheme: |J" + name + " - Jc| must be at most 1");
        if (j_low.twice + j_up.twice < 2)
            throw ContractError("LevelScheme: the J" + name +
                                "=0 to Jc=0 transition is dipole-forbidden");
    }
};

// Configuration of beams: the classical drive polarization on a<->c and the
// two cavity mode polarizations on b<->c (which must be orthogonal), plus
// the common one-photon detuning of the upper level.
struct SystemConfig {
    LevelScheme scheme;
    Polarization drive;
    Polarization mode1;
    Polarization mode2;
    double delta = 0.0;

    SystemConfig(LevelScheme s, Polarization drive_pol, Polarization mode1_pol,
                 Polarization mode2_pol, double detuning = 0.0)
        : scheme(s), drive(drive_pol), mode1(mode1_pol), mode2(mode2_pol), delta(detuning) {
        if (!orthogonal(mode1, mode2))
            throw ContractError("SystemConfig: cavity mode polarizations must be orthogonal");
        if (!std::isfinite(delta)) throw ContractError("SystemConfig: detuning must be finite");
    }

    // Default cavity basis: mode 1 collects sigma-, mode 2 collects sigma+.
    static SystemConfig with_default_modes(LevelScheme s, Polarization drive_pol,
                                           double detuning = 0.0) {
        return SystemConfig(s, drive_pol, Polarization::from_name("sigma-"),
                            Polarization::from_name("sigma+"), detuning);
    }
};

enum class Block { A, B1, B2, C };

// Index bookkeeping for the single-excitation space. Within each block the
// sublevels are ordered by ascending magnetic quantum number.
class BasisIndex {
public:
    explicit BasisIndex(const LevelScheme& s)
        : tja_(s.ja.twice), tjb_(s.jb.twice), tjc_(s.jc.twice) {}

    int size(Block b) const {
        switch (b) {
            case Block::A: return tja_ + 1;
            case Block::B1:
            case Block::B2: return tjb_ + 1;
            case Block::C: return tjc_ + 1;
        }
        throw ContractError("BasisIndex: invalid block");
    }

    int offset(Block b) const {
        const int na = tja_ + 1, nb = tjb_ + 1;
        switch (b) {
            case Block::A: return 0;
            case Block::B1: return na;
            case Block::B2: return na + nb;
            case Block::C: return na + 2 * nb;
        }
        throw ContractError("BasisIndex: invalid block");
    }

    int total() const { return (tja_ + 1) + 2 * (tjb_ + 1) + (tjc_ + 1); }
    int b_total() const { return 2 * (tjb_ + 1); }

    int twice_j(Block b) const {
        switch (b) {
            case Block::A: return tja_;
            case Block::B1:
            case Block::B2: return tjb_;
            case Block::C: return tjc_;
        }
        throw ContractError("BasisIndex: invalid block");
    }

    // Global index of the sublevel with magnetic number tm/2 in a block.
    int index_of(Block b, int tm) const {
        const int tj = twice_j(b);
        if (std::abs(tm) > tj || ((tm + tj) % 2) != 0)
            throw ContractError("BasisIndex: magnetic number out of range for block");
        return offset(b) + (tm + tj) / 2;
    }

    Block block_of(int i) const {
        if (i < 0 || i >= total()) throw ContractError("BasisIndex: index out of range");
        if (i < offset(Block::B1)) return Block::A;
        if (i < offset(Block::B2)) return Block::B1;
        if (i < offset(Block::C)) return Block::B2;
        return Block::C;
    }

    int twice_m(int i) const {
        const Block b = block_of(i);
        return -twice_j(b) + 2 * (i - offset(b));
    }

    std::string label_of(int i) const {
        const Block b = block_of(i);
        const char* name = b == Block::A ? "a" : b == Block::B1 ? "b1" : b == Block::B2 ? "b2" : "c";
        return std::string(name) + "[m=" + half_int_str(twice_m(i)) + "]";
    }

    // Lift a block-local vector into the full space (Block::B1, B2, A, or C).
    CVector embed(Block b, const CVector& v) const {
        if (v.size() != size(b)) throw ContractError("BasisIndex: embed dimension mismatch");
        CVector out = CVector::Zero(total());
        out.segment(offset(b), size(b)) = v;
        return out;
    }

    // Lift a stacked two-mode b vector (mode 1 components first).
    CVector embed_b(const CVector& v) const {
        if (v.size() != b_total()) throw ContractError("BasisIndex: embed_b dimension mismatch");
        CVector out = CVector::Zero(total());
        out.segment(offset(Block::B1), b_total()) = v;
        return out;
    }

private:
    int tja_, tjb_, tjc_;
};

// Dipole coupling matrices contracted against the beam polarizations. g_a
// couples the a sublevels to c through the drive; g_b1 and g_b2 couple the b
// sublevels to c through the two cavity modes; g_b stacks them (mode 1 rows
// first) into the full two-mode b space.
struct CouplingSet {
    CMatrix g_a;   // (2Ja+1) x (2Jc+1)
    CMatrix g_b1;  // (2Jb+1) x (2Jc+1)
    CMatrix g_b2;  // (2Jb+1) x (2Jc+1)
    CMatrix g_b;   // 2(2Jb+1) x (2Jc+1)
};

inline CouplingSet build_couplings(const SystemConfig& cfg) {
    const std::array<CMatrix, 3> ac = {dipole_component(cfg.scheme.ja, cfg.scheme.jc, -1),
                                       dipole_component(cfg.scheme.ja, cfg.scheme.jc, 0),
                                       dipole_component(cfg.scheme.ja, cfg.scheme.jc, +1)};
    const std::array<CMatrix, 3> bc = {dipole_component(cfg.scheme.jb, cfg.scheme.jc, -1),
                                       dipole_component(cfg.scheme.jb, cfg.scheme.jc, 0),
                                       dipole_component(cfg.scheme.jb, cfg.scheme.jc, +1)};
    CouplingSet g;
    g.g_a = contract(ac, cfg.drive);
    g.g_b1 = contract(bc, cfg.mode1);
    g.g_b2 = contract(bc, cfg.mode2);
    g.g_b = CMatrix::Zero(2 * g.g_b1.rows(), g.g_b1.cols());
    g.g_b.topRows(g.g_b1.rows()) = g.g_b1;
    g.g_b.bottomRows(g.g_b2.rows()) = g.g_b2;
    return g;
}

// Interaction operator on the single-excitation space for instantaneous
// field amplitudes omega_a (drive) and omega_b (cavity):
//   V = -2 delta P_c + (omega_a g_a + omega_b g_b) + h.c.
// The returned matrix is Hermitian to the last bit.
inline CMatrix interaction_operator(const BasisIndex& idx, const CouplingSet& g, double delta,
                                    double omega_a, double omega_b) {
    if (!std::isfinite(omega_a) || !std::isfinite(omega_b) || !std::isfinite(delta))
        throw ContractError("interaction_operator: amplitudes and detuning must be finite");
    const int n = idx.total();
    CMatrix raised = CMatrix::Zero(n, n);
    raised.block(idx.offset(Block::A), idx.offset(Block::C), idx.size(Block::A),
                 idx.size(Block::C)) = omega_a * g.g_a;
    raised.block(idx.offset(Block::B1), idx.offset(Block::C), idx.size(Block::B1),
                 idx.size(Block::C)) = omega_b * g.g_b1;
    raised.block(idx.offset(Block::B2), idx.offset(Block::C), idx.size(Block::B2),
                 idx.size(Block::C)) = omega_b * g.g_b2;
    CMatrix v = raised + CMatrix(raised.adjoint());
    for (int k = 0; k < idx.size(Block::C); ++k) {
        const int i = idx.offset(Block::C) + k;
        v(i, i) = Complex(-2.0 * delta, 0.0);
    }
    return v;
}

inline CMatrix interaction_operator(const SystemConfig& cfg, double omega_a, double omega_b) {
    const BasisIndex idx(cfg.scheme);
    return interaction_operator(idx, build_couplings(cfg), cfg.delta, omega_a, omega_b);
}

}  // namespace lmem
