#pragma once

// Dense complex linear algebra with deterministic conventions.
//
// Everything downstream (coupling operators, dark-state classification,
// propagators) depends on eigenvectors being reproducible, so the
// eigendecomposition here pins an explicit convention instead of exposing the
// solver's arbitrary choices:
//   * eigenvalues sorted in descending order,
//   * each eigenvector's largest-magnitude component made real and positive,
//   * vectors of a degenerate eigenvalue ordered lexicographically
//     (descending componentwise on (re, im)).
// Identical inputs therefore give bit-identical outputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmem {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Violated precondition: bad dimensions, malformed values, invalid arguments.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation finished but failed its own accuracy or consistency check.
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenPair {
    double value = 0.0;
    CVector vector;
};

namespace detail {

inline std::string dim_string(const CMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

// Rotate v so its largest-magnitude component is real and positive.  Among
// near-equal magnitudes the lowest index wins, keeping the choice stable.
inline void canonicalize_phase(CVector& v) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            pivot = i;
        }
    }
    if (best <= 0.0) return;
    const Complex z = v[pivot] / best;
    v *= std::conj(z);
    v[pivot] = Complex(v[pivot].real(), 0.0);  // kill residual roundoff phase
}

// Descending lexicographic order on (re, im) pairs.
inline bool lex_greater(const CVector& a, const CVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() > b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() > b[i].imag();
    }
    return false;
}

}  // namespace detail

// Compact rendering of a floating-point value for diagnostics.
inline std::string format_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

inline CMatrix adjoint(const CMatrix& m) { return m.adjoint(); }

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ContractError("matmul: dimension mismatch " + detail::dim_string(a) +
                            " * " + detail::dim_string(b));
    }
    return a * b;
}

inline double frobenius_norm(const CMatrix& m) { return m.norm(); }

inline Complex trace(const CMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ContractError("trace: matrix not square (" + detail::dim_string(m) + ")");
    }
    return m.trace();
}

// Hermitian eigendecomposition under the conventions documented above.
// `tol` bounds the accepted relative Hermiticity defect of the input.
inline std::vector<EigenPair> hermitian_eig(const CMatrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) {
        throw ContractError("hermitian_eig: matrix not square (" +
                            detail::dim_string(m) + ")");
    }
    if (!m.allFinite()) {
        throw ContractError("hermitian_eig: non-finite entries");
    }
    const double herm_defect = (m - m.adjoint()).norm();
    const double scale = m.norm();
    if (herm_defect > tol * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "hermitian_eig: matrix not Hermitian, ||m - m^H|| = " << herm_defect
           << " exceeds " << tol << " * ||m|| = " << tol * scale;
        throw ToleranceError(os.str());
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> solver((m + m.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success) {
        throw ToleranceError("hermitian_eig: eigensolver failed to converge");
    }

    const Eigen::Index n = m.rows();
    std::vector<EigenPair> pairs(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        // Solver returns ascending order; flip to descending.
        const Eigen::Index src = n - 1 - i;
        pairs[static_cast<size_t>(i)].value = solver.eigenvalues()[src];
        CVector v = solver.eigenvectors().col(src);
        detail::canonicalize_phase(v);
        pairs[static_cast<size_t>(i)].vector = std::move(v);
    }

    // Within degenerate groups, order vectors lexicographically.
    double spread = 0.0;
    for (const auto& p : pairs) spread = std::max(spread, std::abs(p.value));
    const double group_tol = 1e-10 * std::max(spread, 1e-300);
    size_t lo = 0;
    while (lo < pairs.size()) {
        size_t hi = lo + 1;
        while (hi < pairs.size() &&
               std::abs(pairs[hi].value - pairs[lo].value) <= group_tol) {
            ++hi;
        }
        if (hi - lo > 1) {
            std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(lo),
                      pairs.begin() + static_cast<std::ptrdiff_t>(hi),
                      [](const EigenPair& a, const EigenPair& b) {
                          return detail::lex_greater(a.vector, b.vector);
                      });
        }
        lo = hi;
    }
    return pairs;
}

// Trace distance (1/2)||a - b||_1 between Hermitian matrices. The difference
// is symmetrized before diagonalizing so inputs that are Hermitian only to
// working precision are accepted even when nearly equal.
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw ContractError("trace_distance: need square matrices of equal size, got " +
                            detail::dim_string(a) + " and " + detail::dim_string(b));
    }
    const CMatrix diff = a - b;
    const CMatrix sym = 0.5 * (diff + diff.adjoint());
    double sum = 0.0;
    for (const auto& p : hermitian_eig(sym)) sum += std::abs(p.value);
    return 0.5 * sum;
}

// Orthonormal basis of the (right) null space of m: columns v with
// ||m v|| <= rel_tol * ||m||.  The basis is the deterministic one produced by
// hermitian_eig applied to m^H m; a zero matrix yields the identity basis.
inline CMatrix null_space(const CMatrix& m, double rel_tol = 1e-10) {
    if (!(rel_tol > 0.0) || rel_tol > 1e-4) {
        throw ContractError("null_space: rel_tol must lie in (0, 1e-4]");
    }
    if (m.size() == 0) {
        throw ContractError("null_space: empty matrix");
    }
    // The Gram route fixes the basis and its deterministic ordering, but the
    // squared spectrum floors tiny singular values at sqrt(eps)*sigma_max, so
    // membership is decided on the direct residual ||m v|| instead.
    const CMatrix gram = m.adjoint() * m;
    const auto pairs = hermitian_eig(gram, 1e-8);
    const double cut = rel_tol * m.norm();

    std::vector<const EigenPair*> keep;
    for (const auto& p : pairs) {
        if ((m * p.vector).norm() <= cut) keep.push_back(&p);
    }
    CMatrix basis(m.cols(), static_cast<Eigen::Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) {
        basis.col(static_cast<Eigen::Index>(i)) = keep[i]->vector;
    }
    return basis;
}

}  // namespace lmem
