// The four-dimensional matrix algebra spanned by E+, E-, F, F~.
//
// Elements act on C^{2N} as 2x2 block matrices with scalar blocks:
//
//   a*E+ + b*E- + c*F + d*F~  <->  [[ (a+b) 1_N ,   c 1_N  ],
//                                   [   d 1_N   , (a-b) 1_N ]]
//
// i.e. E+ is the identity, E- = diag(1,-1), F has a single 1_N in the
// upper-right block and F~ in the lower-left block.  The algebra is closed
// under multiplication, and the normalized 2N-trace of an element equals
// half the trace of its 2x2 representative, independent of N.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rmt {

using cd = std::complex<double>;

struct Quat {
    cd ep{0.0};  // coefficient of E+
    cd em{0.0};  // coefficient of E-
    cd f{0.0};   // coefficient of F
    cd fs{0.0};  // coefficient of F~

    // 2x2 representative [[alpha, gamma], [delta, beta]].
    Eigen::Matrix2cd mat() const {
        Eigen::Matrix2cd m;
        m << ep + em, f, fs, ep - em;
        return m;
    }

    static Quat from_mat(const Eigen::Matrix2cd& m) {
        Quat q;
        q.ep = 0.5 * (m(0, 0) + m(1, 1));
        q.em = 0.5 * (m(0, 0) - m(1, 1));
        q.f = m(0, 1);
        q.fs = m(1, 0);
        return q;
    }

    static Quat basis(int i) {
        Quat q;
        switch (i) {
            case 0: q.ep = 1.0; break;
            case 1: q.em = 1.0; break;
            case 2: q.f = 1.0; break;
            case 3: q.fs = 1.0; break;
            default: throw std::out_of_range("Quat::basis index");
        }
        return q;
    }

    cd coeff(int i) const {
        switch (i) {
            case 0: return ep;
            case 1: return em;
            case 2: return f;
            case 3: return fs;
            default: throw std::out_of_range("Quat::coeff index");
        }
    }

    // Block-diagonal embedding into C^{2N x 2N} (blocks of size N).
    Eigen::MatrixXcd embed(int n) const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
        m.topLeftCorner(n, n).diagonal().setConstant(ep + em);
        m.bottomRightCorner(n, n).diagonal().setConstant(ep - em);
        m.topRightCorner(n, n).diagonal().setConstant(f);
        m.bottomLeftCorner(n, n).diagonal().setConstant(fs);
        return m;
    }

    // Operator norm of the embedding (independent of N).
    double norm() const {
        return mat().jacobiSvd().singularValues()(0);
    }

    Quat operator+(const Quat& o) const { return {ep + o.ep, em + o.em, f + o.f, fs + o.fs}; }
    Quat operator-(const Quat& o) const { return {ep - o.ep, em - o.em, f - o.f, fs - o.fs}; }
    Quat operator*(const Quat& o) const {
        return from_mat(Eigen::Matrix2cd(mat() * o.mat()));
    }
    friend Quat operator*(cd s, const Quat& q) { return {s * q.ep, s * q.em, s * q.f, s * q.fs}; }

    bool operator==(const Quat& o) const {
        return ep == o.ep && em == o.em && f == o.f && fs == o.fs;
    }
};

// Normalized trace of the 2N-embedding: <A> = (alpha + beta)/2 = coefficient of E+.
inline cd qtrace(const Quat& a) { return a.ep; }

// Normalized trace form <A B>.
inline cd trace_form(const Quat& a, const Quat& b) { return qtrace(a * b); }

// Self-energy map S[R] = sum_{nu=+-} nu <R E_nu> E_nu.
inline Quat self_energy(const Quat& r) {
    Quat s;
    s.ep = trace_form(r, Quat::basis(0));
    s.em = -trace_form(r, Quat::basis(1));
    return s;
}

// Text round-trip:  "(re+imi)*E+ + (re+imi)*E- + (re+imi)*F + (re+imi)*F~".
std::string to_string(const Quat& q);
Quat parse_quat(const std::string& text);

}  // namespace rmt
