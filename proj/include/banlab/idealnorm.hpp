#pragma once

// Factorization-norm machinery: best found ||R|| ||S|| over factorizations
// of a target through members of a space family, the ideal-axiom check via
// explicit composite factorizations, the two-factorization combination
// through a 2-dim unconditional sum, and the exploratory probes built on
// top (the block-projection demo and the basis-projection sweep).
// All gamma values are certified upper bounds; the only lower bound is the
// operator norm of the target itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banlab/operator.hpp"

namespace banlab {

struct factorization {
    linear_map<double> s; // domain -> through
    linear_map<double> r; // through -> codomain
    space through;
    bound value;     // certified ||r|| * ||s|| window; hi is the reported bound
    double residual; // max-abs error of r(s(x)) against the target, relative
};

inline std::vector<space> lp_family(double p, int kmax) {
    std::vector<space> f;
    for (int k = 1; k <= kmax; ++k) f.push_back(space::lp(k, p));
    return f;
}

namespace detail {

inline double relative_residual(const matrix<double>& got, const matrix<double>& want) {
    double scale = std::max(1.0, want.max_abs());
    matrix<double> d = got;
    d -= want;
    return d.max_abs() / scale;
}

inline bound pair_value(const linear_map<double>& r, const linear_map<double>& s, int budget,
                        std::uint64_t seed) {
    auto nr = operator_norm(r, opnorm_mode::search, budget, mix_seed(seed, 11));
    auto ns = operator_norm(s, opnorm_mode::search, budget, mix_seed(seed, 12));
    return {nr.b.lo * ns.b.lo, nr.b.hi * ns.b.hi, nr.b.exact && ns.b.exact};
}

// Exact factorizations R S = T to start the gauge descent from. Every init
// reproduces T to machine precision by construction. Placements are offered
// both at the base of Z and at the base of each of its blocks, so an e-sum
// family member exposes all of its components.
inline std::vector<std::pair<matrix<double>, matrix<double>>> factorization_inits(
    const matrix<double>& T, const space& Z) {
    const int cod = T.rows(), dom = T.cols(), zdim = Z.dim();
    std::vector<std::pair<matrix<double>, matrix<double>>> inits; // (R, S)

    std::vector<std::pair<int, int>> regions{{0, zdim}}; // (offset, length)
    if (Z.kind() == space_kind::esum) {
        int off = 0;
        for (const auto& blk : Z.inners()) {
            regions.push_back({off, blk.dim()});
            off += blk.dim();
        }
    }

    std::vector<int> rows, cols;
    for (int i = 0; i < cod; ++i)
        for (int j = 0; j < dom; ++j)
            if (T(i, j) != 0) {
                rows.push_back(i);
                break;
            }
    for (int j = 0; j < dom; ++j)
        for (int i = 0; i < cod; ++i)
            if (T(i, j) != 0) {
                cols.push_back(j);
                break;
            }

    for (auto [off, len] : regions) {
        // identity pad: S = [I; 0], R = [T | 0], shifted to the region
        if (len >= dom) {
            matrix<double> S(zdim, dom), R(cod, zdim);
            for (int j = 0; j < dom; ++j) S(off + j, j) = 1;
            for (int i = 0; i < cod; ++i)
                for (int j = 0; j < dom; ++j) R(i, off + j) = T(i, j);
            inits.push_back({std::move(R), std::move(S)});
        }
        // row compress: stack the nonzero rows of T, then place them back
        if (int(rows.size()) <= len && !rows.empty()) {
            matrix<double> S(zdim, dom), R(cod, zdim);
            for (int k = 0; k < int(rows.size()); ++k) {
                for (int j = 0; j < dom; ++j) S(off + k, j) = T(rows[std::size_t(k)], j);
                R(rows[std::size_t(k)], off + k) = 1;
            }
            inits.push_back({std::move(R), std::move(S)});
        }
        // column select: S picks the active coordinates, R holds the columns
        if (int(cols.size()) <= len && !cols.empty()) {
            matrix<double> S(zdim, dom), R(cod, zdim);
            for (int k = 0; k < int(cols.size()); ++k) {
                S(off + k, cols[std::size_t(k)]) = 1;
                for (int i = 0; i < cod; ++i) R(i, off + k) = T(i, cols[std::size_t(k)]);
            }
            inits.push_back({std::move(R), std::move(S)});
        }
        // balanced SVD split: R = U sqrt(Sigma), S = sqrt(Sigma) V^T
        if (off == 0) {
            Eigen::MatrixXd M(cod, dom);
            for (int i = 0; i < cod; ++i)
                for (int j = 0; j < dom; ++j) M(i, j) = T(i, j);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            int rank = 0;
            for (int i = 0; i < sv.size(); ++i)
                if (sv(i) > 1e-13 * sv(0)) ++rank;
            if (rank > 0 && rank <= len) {
                matrix<double> S(zdim, dom), R(cod, zdim);
                for (int k = 0; k < rank; ++k) {
                    double root = std::sqrt(sv(k));
                    for (int j = 0; j < dom; ++j) S(off + k, j) = root * svd.matrixV()(j, k);
                    for (int i = 0; i < cod; ++i) R(i, off + k) = svd.matrixU()(i, k) * root;
                }
                inits.push_back({std::move(R), std::move(S)});
            }
        }
    }
    return inits;
}

} // namespace detail

// Best found factorization of T through one of the candidate spaces. The
// pair is improved by gauge moves (R, S) -> (R M^{-1}, M S) whose inverses
// are exact, so the reproduction identity survives the whole descent.
inline factorization gamma_upper(const linear_map<double>& T, const std::vector<space>& family,
                                 int budget = 200, std::uint64_t seed = 0) {
    if (family.empty()) throw std::invalid_argument("gamma_upper: empty family");
    // nothing can beat the operator norm of the target itself
    const double floor = operator_norm(T, opnorm_mode::search, 24, seed).b.lo;
    const bool costly = T.domain.kind() == space_kind::tsirelson_trunc ||
                        T.codomain.kind() == space_kind::tsirelson_trunc || T.domain.dim() > 10;
    const int opb = costly ? 8 : 16;
    std::optional<factorization> best;
    auto done = [&]() { return best && best->value.hi <= floor * (1 + 1e-12) + 1e-15; };

    auto consider = [&](matrix<double> R, matrix<double> S, const space& Z, std::uint64_t st0) {
        linear_map<double> rm(std::move(R), Z, T.codomain), sm(std::move(S), T.domain, Z);
        bound v = detail::pair_value(rm, sm, opb, st0);
        // gauge descent: diagonal scalings, rotations, shears on the Z side
        std::uint64_t st = st0;
        int evals = 0;
        const int cap = costly ? 4 : std::max(6, budget / 12);
        double step = 0.5;
        while (evals < cap && step > 1e-3 && v.hi > floor * (1 + 1e-12) + 1e-15) {
            bool moved = false;
            int zd = Z.dim();
            int which = int(detail::uniform01(st) * 3);
            matrix<double> Rc = rm.mat, Sc = sm.mat;
            if (which == 0) {
                int i = std::min(int(detail::uniform01(st) * zd), zd - 1);
                double c = std::exp((detail::uniform01(st) * 2 - 1) * step);
                for (int j = 0; j < Sc.cols(); ++j) Sc(i, j) *= c;
                for (int j = 0; j < Rc.rows(); ++j) Rc(j, i) /= c;
            } else if (zd >= 2) {
                int i = std::min(int(detail::uniform01(st) * zd), zd - 1);
                int j = std::min(int(detail::uniform01(st) * zd), zd - 1);
                if (i == j) j = (i + 1) % zd;
                if (which == 1) {
                    double th = (detail::uniform01(st) * 2 - 1) * step;
                    double c = std::cos(th), sn = std::sin(th);
                    for (int col = 0; col < Sc.cols(); ++col) {
                        double a = Sc(i, col), b = Sc(j, col);
                        Sc(i, col) = c * a + sn * b;
                        Sc(j, col) = -sn * a + c * b;
                    }
                    for (int row = 0; row < Rc.rows(); ++row) {
                        double a = Rc(row, i), b = Rc(row, j);
                        Rc(row, i) = c * a + sn * b;
                        Rc(row, j) = -sn * a + c * b;
                    }
                } else {
                    double t = (detail::uniform01(st) * 2 - 1) * step;
                    // S' = (I + t e_ij) S, R' = R (I - t e_ij)
                    for (int col = 0; col < Sc.cols(); ++col) Sc(i, col) += t * Sc(j, col);
                    for (int row = 0; row < Rc.rows(); ++row) Rc(row, j) -= t * Rc(row, i);
                }
            }
            ++evals;
            linear_map<double> rc(std::move(Rc), Z, T.codomain), sc(std::move(Sc), T.domain, Z);
            bound vc = detail::pair_value(rc, sc, opb, st0);
            if (vc.hi < v.hi - 1e-12) {
                rm = std::move(rc);
                sm = std::move(sc);
                v = vc;
                moved = true;
            }
            if (!moved) step *= 0.85;
        }
        double res = detail::relative_residual(rm.mat * sm.mat, T.mat);
        if (!best || v.hi < best->value.hi)
            best = factorization{std::move(sm), std::move(rm), Z, v, res};
    };

    int fi = 0;
    for (const auto& Z : family) {
        auto inits = detail::factorization_inits(T.mat, Z);
        int ii = 0;
        for (auto& [R, S] : inits) {
            consider(std::move(R), std::move(S), Z, detail::mix_seed(seed, 100 * fi + ii++));
            if (done()) return *best;
        }
        ++fi;
    }
    if (!best) throw std::runtime_error("gamma_upper: no admissible factorization found");
    return *best;
}

struct ideal_axiom_report {
    double left;  // best certified bound for gamma(A T B)
    double right; // ||A|| * gamma(T) * ||B||, all certified upper
    bool holds;   // left <= right + slack
    factorization composite;
};

// gamma(A T B) <= ||A|| gamma(T) ||B||, witnessed by the composite pair
// (A R, S B) rather than by re-optimization alone.
inline ideal_axiom_report ideal_axiom_check(const linear_map<double>& A,
                                            const linear_map<double>& T,
                                            const linear_map<double>& B,
                                            const std::vector<space>& family, int budget = 200,
                                            std::uint64_t seed = 0) {
    if (!(A.domain == T.codomain) || !(T.domain == B.codomain))
        throw std::invalid_argument("ideal_axiom_check: maps do not compose");
    auto ft = gamma_upper(T, family, budget, seed);
    auto na = operator_norm(A, opnorm_mode::search, 48, detail::mix_seed(seed, 1));
    auto nb = operator_norm(B, opnorm_mode::search, 48, detail::mix_seed(seed, 2));
    double right = na.b.hi * ft.value.hi * nb.b.hi;

    linear_map<double> target = compose(A, compose(T, B));
    linear_map<double> rr = compose(A, ft.r);
    linear_map<double> ss = compose(ft.s, B);
    bound comp = detail::pair_value(rr, ss, 48, detail::mix_seed(seed, 3));
    double res = detail::relative_residual(rr.mat * ss.mat, target.mat);
    factorization composite{std::move(ss), std::move(rr), ft.through, comp, res};

    auto direct = gamma_upper(target, family, budget, detail::mix_seed(seed, 4));
    double left = std::min(direct.value.hi, comp.hi);
    return {left, right, left <= right + 1e-9, std::move(composite)};
}

// Stack two factorizations through the same Z into Z (+)_u Z, after the
// positive-scaling optimization (lambda S1, R1/lambda), (mu S2, R2/mu).
// For u = 2-dim l_p the optimal table bound collapses to the sum of the two
// values (Holder equality case).
inline factorization combine_factorizations(const factorization& f1, const factorization& f2,
                                            const space& u, int budget = 64,
                                            std::uint64_t seed = 0) {
    if (u.dim() != 2 || !u.is_unconditional())
        throw std::invalid_argument("combine_factorizations: u must be 2-dim 1-unconditional");
    if (!(f1.through == f2.through))
        throw std::invalid_argument("combine_factorizations: factorizations use different Z");
    if (!(f1.s.domain == f2.s.domain) || !(f1.r.codomain == f2.r.codomain))
        throw std::invalid_argument("combine_factorizations: endpoint mismatch");
    if (f2.s.mat.is_zero() || f2.r.mat.is_zero()) return f1;
    if (f1.s.mat.is_zero() || f1.r.mat.is_zero()) return f2;

    const space& Z = f1.through;
    double s1 = operator_norm(f1.s, opnorm_mode::search, 32, seed).b.hi;
    double s2 = operator_norm(f2.s, opnorm_mode::search, 32, seed).b.hi;
    double r1 = operator_norm(f1.r, opnorm_mode::search, 32, seed).b.hi;
    double r2 = operator_norm(f2.r, opnorm_mode::search, 32, seed).b.hi;

    auto table = [&](double t) {
        double lam = std::exp(t / 2), mu = std::exp(-t / 2);
        std::vector<double> svec{lam * s1, mu * s2};
        std::vector<double> rvec{r1 / lam, r2 / mu};
        return u.norm_certified(svec).hi * u.dual_norm(rvec).hi;
    };
    // golden section on the log scaling ratio
    double a = -30, b = 30;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = table(c), fd = table(d);
    for (int it = 0; it < std::max(32, budget); ++it) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - phi * (b - a);
            fc = table(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + phi * (b - a);
            fd = table(d);
        }
    }
    double t = (fc < fd) ? c : d;
    double lam = std::exp(t / 2), mu = std::exp(-t / 2);

    space through = space::esum(u, {Z, Z});
    const int k = Z.dim(), dom = f1.s.domain.dim(), cod = f1.r.codomain.dim();
    matrix<double> S(2 * k, dom), R(cod, 2 * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < dom; ++j) {
            S(i, j) = lam * f1.s.mat(i, j);
            S(k + i, j) = mu * f2.s.mat(i, j);
        }
    for (int i = 0; i < cod; ++i)
        for (int j = 0; j < k; ++j) {
            R(i, j) = f1.r.mat(i, j) / lam;
            R(i, k + j) = f2.r.mat(i, j) / mu;
        }
    linear_map<double> sm(std::move(S), f1.s.domain, through);
    linear_map<double> rm(std::move(R), through, f1.r.codomain);
    bound assembled = detail::pair_value(rm, sm, 32, detail::mix_seed(seed, 9));
    double tb = table(t);
    bound v{assembled.lo, std::min(assembled.hi, tb), false};

    matrix<double> sum = f1.r.mat * f1.s.mat;
    sum += f2.r.mat * f2.s.mat;
    double res = detail::relative_residual(rm.mat * sm.mat, sum);
    return {std::move(sm), std::move(rm), std::move(through), v, res};
}

struct zn_report {
    int n = 0;
    double p = 0;
    bool flagged = false; // p <= 2: outside the intended construction
    double gamma_p1 = 0;
    double gamma_p2 = 0;
    double gamma_sum = 0; // exploratory; no bound asserted
};

// Z = l_p^n (+) l_2^{4n}: both halves of the identity of l_p^{2n} factor
// through the l_p block with value 1, while their sum is forced to cross
// the Hilbert block.
inline zn_report zn_counterexample(int n, double p, int budget = 200, std::uint64_t seed = 0) {
    if (n < 1 || n > 6) throw std::invalid_argument("zn_counterexample: n outside 1..6");
    zn_report rep;
    rep.n = n;
    rep.p = p;
    rep.flagged = !(p > 2);

    space X = space::lp(2 * n, p);
    space Zn = space::esum(space::lp(2, p), {space::lp(n, p), space::lp(4 * n, 2.0)});
    std::vector<space> family{Zn};

    matrix<double> p1(2 * n, 2 * n), p2(2 * n, 2 * n), id(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) p1(i, i) = 1;
    for (int i = n; i < 2 * n; ++i) p2(i, i) = 1;
    for (int i = 0; i < 2 * n; ++i) id(i, i) = 1;

    rep.gamma_p1 = gamma_upper(linear_map<double>(p1, X, X), family, budget, seed).value.hi;
    rep.gamma_p2 =
        gamma_upper(linear_map<double>(p2, X, X), family, budget, detail::mix_seed(seed, 1))
            .value.hi;
    rep.gamma_sum =
        gamma_upper(linear_map<double>(id, X, X), family, budget, detail::mix_seed(seed, 2))
            .value.hi;
    return rep;
}

// Head subspace [y_1..y_n] with the inherited norm, for the spaces whose
// truncations stay in the catalogue.
inline space head_space(const space& Y, int n) {
    if (n < 1 || n > Y.dim()) throw std::invalid_argument("head_space: bad length");
    if (n == Y.dim()) return Y;
    switch (Y.kind()) {
        case space_kind::lp: return space::lp(n, Y.p());
        case space_kind::tsirelson_trunc: return space::tsirelson_trunc(Y.p(), n, Y.adm());
        default:
            throw std::invalid_argument("head_space: no inherited truncation for this space");
    }
}

// gamma-upper of the basis projection Y -> [y_1..y_n] through the family:
// a finite-stage estimate of the crude finite-representability constant.
inline factorization pi_rep_probe(const space& Y, const std::vector<space>& family, int n,
                                  int budget = 200, std::uint64_t seed = 0) {
    space Yn = head_space(Y, n);
    matrix<double> P(n, Y.dim());
    for (int i = 0; i < n; ++i) P(i, i) = 1;
    return gamma_upper(linear_map<double>(P, Y, Yn), family, budget, seed);
}

} // namespace banlab
