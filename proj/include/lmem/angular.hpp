#pragma once

// Angular-momentum utilities: half-integer quantum numbers kept exact as
// twice-integers, spherical-basis polarization vectors, Wigner 3J
// coefficients, and dipole coupling matrices between Zeeman manifolds.

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "lmem/linalg.hpp"

namespace lmem {

// Angular momentum stored as twice its value so half-integers stay exact.
struct TwoJ {
    int twice = 0;

    TwoJ() = default;
    explicit TwoJ(int twice_value) : twice(twice_value) {
        if (twice < 0) throw ContractError("TwoJ: angular momentum must be non-negative");
    }

    // Accepted forms: "2" (integer J) or "3/2" (half-integer J, denominator 2).
    static TwoJ parse(std::string_view text);

    int dim() const { return twice + 1; }  // number of Zeeman sublevels
    double value() const { return 0.5 * twice; }
    bool half_integer() const { return (twice % 2) != 0; }

    // Magnetic quantum numbers (twice their value), ascending.
    std::vector<int> twice_m_values() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(dim()));
        for (int tm = -twice; tm <= twice; tm += 2) out.push_back(tm);
        return out;
    }

    std::string str() const {
        if (twice % 2 == 0) return std::to_string(twice / 2);
        return std::to_string(twice) + "/2";
    }

    friend bool operator==(TwoJ a, TwoJ b) { return a.twice == b.twice; }
    friend bool operator!=(TwoJ a, TwoJ b) { return a.twice != b.twice; }
};

inline TwoJ TwoJ::parse(std::string_view text) {
    auto fail = [&]() -> TwoJ {
        throw ContractError("TwoJ: cannot parse angular momentum '" + std::string(text) +
                            "' (expected an integer like \"1\" or a half-integer like \"3/2\")");
    };
    if (text.empty()) return fail();
    const std::size_t slash = text.find('/');
    const std::string_view head =
        text.substr(0, slash == std::string_view::npos ? text.size() : slash);
    int numerator = 0;
    const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), numerator);
    if (ec != std::errc{} || ptr != head.data() + head.size()) return fail();
    int twice_value = 0;
    if (slash == std::string_view::npos) {
        if (numerator > (1 << 20)) return fail();
        twice_value = 2 * numerator;
    } else {
        if (text.substr(slash + 1) != "2") return fail();
        twice_value = numerator;
    }
    if (twice_value < 0) return fail();
    return TwoJ(twice_value);
}

// Format a (possibly negative) half-integer given as twice its value:
// -4 -> "-2", -3 -> "-3/2", 3 -> "3/2".
inline std::string half_int_str(int twice_value) {
    if (twice_value % 2 == 0) return std::to_string(twice_value / 2);
    return std::to_string(twice_value) + "/2";
}

namespace detail {

// Natural logs of factorials; the table is built once (thread-safe statics).
inline long double log_factorial(int n) {
    constexpr int kMax = 256;
    static const std::array<long double, kMax + 1> table = [] {
        std::array<long double, kMax + 1> t{};
        t[0] = 0.0L;
        for (int i = 1; i <= kMax; ++i) {
            t[static_cast<std::size_t>(i)] =
                t[static_cast<std::size_t>(i - 1)] + std::log(static_cast<long double>(i));
        }
        return t;
    }();
    if (n < 0 || n > kMax) throw ContractError("log_factorial: argument out of range");
    return table[static_cast<std::size_t>(n)];
}

inline int parity_sign(long long k) { return ((k % 2 + 2) % 2 == 0) ? 1 : -1; }

}  // namespace detail

// Wigner 3J coefficient for (j1 j2 j3; m1 m2 m3), every argument given as
// twice its value. Malformed inputs (negative j, or an m differing from its
// j by a non-integer) raise ContractError; inputs that merely violate a
// selection rule return exactly zero. Evaluated by the Racah single-sum
// formula in extended precision.
inline double wigner3j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
    if (tj1 < 0 || tj2 < 0 || tj3 < 0)
        throw ContractError("wigner3j: negative angular momentum");
    if (((tj1 + tm1) % 2) != 0 || ((tj2 + tm2) % 2) != 0 || ((tj3 + tm3) % 2) != 0)
        throw ContractError("wigner3j: m must differ from j by an integer");
    if (tm1 + tm2 + tm3 != 0) return 0.0;
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
    if (tj3 > tj1 + tj2 || tj3 < std::abs(tj1 - tj2)) return 0.0;

    const int a1 = (tj1 + tj2 - tj3) / 2;
    const int a2 = (tj1 - tj2 + tj3) / 2;
    const int a3 = (-tj1 + tj2 + tj3) / 2;
    const int p1 = (tj1 + tm1) / 2, q1 = (tj1 - tm1) / 2;
    const int p2 = (tj2 + tm2) / 2, q2 = (tj2 - tm2) / 2;
    const int p3 = (tj3 + tm3) / 2, q3 = (tj3 - tm3) / 2;

    const long double log_pre =
        detail::log_factorial(a1) + detail::log_factorial(a2) + detail::log_factorial(a3) -
        detail::log_factorial((tj1 + tj2 + tj3) / 2 + 1) + detail::log_factorial(p1) +
        detail::log_factorial(q1) + detail::log_factorial(p2) + detail::log_factorial(q2) +
        detail::log_factorial(p3) + detail::log_factorial(q3);

    const int k_lo = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
    const int k_hi = std::min({a1, q1, p2});
    long double sum = 0.0L;
    for (int k = k_lo; k <= k_hi; ++k) {
        const long double log_den =
            detail::log_factorial(k) + detail::log_factorial(a1 - k) +
            detail::log_factorial(q1 - k) + detail::log_factorial(p2 - k) +
            detail::log_factorial((tj3 - tj2 + tm1) / 2 + k) +
            detail::log_factorial((tj3 - tj1 - tm2) / 2 + k);
        const long double term = std::exp(0.5L * log_pre - log_den);
        sum += (k % 2 == 0) ? term : -term;
    }
    return static_cast<double>(detail::parity_sign((tj1 - tj2 - tm3) / 2) * sum);
}

// A unit polarization vector in the spherical basis, indexed by q in
// {-1, 0, +1}. The Cartesian correspondence is
//   e(+1) = -(e_x + i e_y)/sqrt(2),   e(0) = e_z,   e(-1) = (e_x - i e_y)/sqrt(2),
// and inner products are taken as sum_q u_q conj(v_q).
class Polarization {
public:
    // Components must already form a unit vector (within 1e-12).
    static Polarization from_components(Complex q_minus, Complex q_zero, Complex q_plus) {
        Polarization l;
        l.comp_ = {q_minus, q_zero, q_plus};
        if (std::abs(l.norm() - 1.0) > 1e-12)
            throw ContractError("Polarization: components must form a unit vector");
        return l;
    }

    static Polarization normalized(Complex q_minus, Complex q_zero, Complex q_plus) {
        Polarization l;
        l.comp_ = {q_minus, q_zero, q_plus};
        const double n = l.norm();
        if (!(n > 1e-150)) throw ContractError("Polarization: cannot normalize a zero vector");
        for (auto& c : l.comp_) c /= n;
        return l;
    }

    static Polarization from_cartesian(Complex ex, Complex ey, Complex ez) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const Complex i(0.0, 1.0);
        return normalized((ex - i * ey) * inv_sqrt2, ez, -(ex + i * ey) * inv_sqrt2);
    }

    // Named beams: "pi", "sigma+", "sigma-", linear "x", linear "y".
    static Polarization from_name(std::string_view name) {
        if (name == "pi") return from_components(0.0, 1.0, 0.0);
        if (name == "sigma+") return from_components(0.0, 0.0, 1.0);
        if (name == "sigma-") return from_components(1.0, 0.0, 0.0);
        if (name == "x") return from_cartesian(1.0, 0.0, 0.0);
        if (name == "y") return from_cartesian(0.0, 1.0, 0.0);
        throw ContractError("Polarization: unknown name '" + std::string(name) +
                            "' (expected pi, sigma+, sigma-, x, or y)");
    }

    Complex component(int q) const {
        if (q < -1 || q > 1) throw ContractError("Polarization: q must be -1, 0, or +1");
        return comp_[static_cast<std::size_t>(q + 1)];
    }

    double norm() const {
        double s = 0.0;
        for (const auto& c : comp_) s += std::norm(c);
        return std::sqrt(s);
    }

    friend Complex inner(const Polarization& u, const Polarization& v) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += u.comp_[i] * std::conj(v.comp_[i]);
        return s;
    }

private:
    Polarization() = default;
    std::array<Complex, 3> comp_{};  // [0] -> q=-1, [1] -> q=0, [2] -> q=+1
};

inline bool orthogonal(const Polarization& u, const Polarization& v, double tol = 1e-12) {
    return std::abs(inner(u, v)) <= tol;
}

// Matrix of dipole couplings between the Zeeman sublevels of a lower level
// J_low and an upper level J_up for one spherical component q:
//   entry(m_low, m_up) = (-1)^(J_low - m_low) * 3J(J_low, 1, J_up; -m_low, q, m_up),
// nonzero only when m_up = m_low - q. Rows (columns) are ordered by
// ascending m_low (m_up).
inline CMatrix dipole_component(TwoJ j_low, TwoJ j_up, int q) {
    if (q < -1 || q > 1) throw ContractError("dipole_component: q must be -1, 0, or +1");
    if ((j_low.twice % 2) != (j_up.twice % 2))
        throw ContractError(
            "dipole_component: levels must be both integer or both half-integer");
    if (std::abs(j_low.twice - j_up.twice) > 2 || j_low.twice + j_up.twice < 2)
        throw ContractError("dipole_component: transition is not dipole-allowed");
    CMatrix out = CMatrix::Zero(j_low.dim(), j_up.dim());
    for (int row = 0; row < j_low.dim(); ++row) {
        const int tm_low = -j_low.twice + 2 * row;
        const int tm_up = tm_low - 2 * q;
        if (std::abs(tm_up) > j_up.twice) continue;
        const int col = (tm_up + j_up.twice) / 2;
        const double phase = detail::parity_sign((j_low.twice - tm_low) / 2);
        out(row, col) = phase * wigner3j(j_low.twice, 2, j_up.twice, -tm_low, 2 * q, tm_up);
    }
    return out;
}

// Couple a family of dipole component matrices {g_q : q = -1, 0, +1} to a
// polarization vector: result = sum_q g_q * conj(l_q).
inline CMatrix contract(const std::array<CMatrix, 3>& g, const Polarization& l) {
    for (std::size_t i = 1; i < 3; ++i) {
        if (g[i].rows() != g[0].rows() || g[i].cols() != g[0].cols())
            throw ContractError("contract: component matrices must share dimensions");
    }
    CMatrix out = CMatrix::Zero(g[0].rows(), g[0].cols());
    for (int q = -1; q <= 1; ++q)
        out += g[static_cast<std::size_t>(q + 1)] * std::conj(l.component(q));
    return out;
}

}  // namespace lmem
