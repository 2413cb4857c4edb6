#pragma once

// Finite decompositions Sum_t R_t (x) S_t with R_t: Y -> X and S_t: X -> Y,
// the contraction to Sum R_t S_t, and two-sided projective norm estimates.
// The upper bound evaluates one representation; lower bounds come from weak
// duality against bilinear forms whose injective norm has a certified upper
// bound (the contraction route is the member of that family that is always
// available).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banlab/operator.hpp"

namespace banlab {

template <class S>
struct tensor_term {
    linear_map<S> r; // Y -> X
    linear_map<S> s; // X -> Y
};

template <class S>
class tensor_decomposition {
    space x_, y_;
    std::vector<tensor_term<S>> terms_;

public:
    tensor_decomposition(space X, space Y, std::vector<tensor_term<S>> terms)
        : x_(std::move(X)), y_(std::move(Y)), terms_(std::move(terms)) {
        for (const auto& t : terms_) {
            if (!(t.r.domain == y_) || !(t.r.codomain == x_) || !(t.s.domain == x_) ||
                !(t.s.codomain == y_))
                throw std::invalid_argument("tensor_decomposition: term endpoints do not match");
        }
    }

    const space& X() const { return x_; }
    const space& Y() const { return y_; }
    const std::vector<tensor_term<S>>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
};

template <class S>
linear_map<S> contract(const tensor_decomposition<S>& D) {
    matrix<S> acc(D.X().dim(), D.X().dim());
    for (const auto& t : D.terms()) {
        matrix<S> prod = t.r.mat * t.s.mat;
        acc += prod;
    }
    return linear_map<S>(std::move(acc), D.X(), D.X());
}

// Dense coefficient array of the tensor: index (a,b) runs over entries of the
// R side (X-row, Y-column) and (c,d) over the S side (Y-row, X-column).
template <class S>
struct dense4 {
    int m = 0, n = 0; // m = dim X, n = dim Y
    std::vector<S> v;

    dense4() = default;
    dense4(int m_, int n_) : m(m_), n(n_), v(std::size_t(m_) * n_ * n_ * m_, S(0)) {}

    S& at(int a, int b, int c, int d) { return v[std::size_t(((a * n + b) * n + c)) * m + d]; }
    const S& at(int a, int b, int c, int d) const {
        return v[std::size_t(((a * n + b) * n + c)) * m + d];
    }

    S max_abs() const {
        S best(0);
        for (const auto& x : v) best = std::max(best, abs_val(x));
        return best;
    }
};

template <class S>
dense4<S> dense_tensor(const tensor_decomposition<S>& D) {
    const int m = D.X().dim(), n = D.Y().dim();
    if (m > 12 || n > 12)
        throw std::invalid_argument("dense_tensor: dimensions above the dense budget");
    dense4<S> out(m, n);
    for (const auto& t : D.terms())
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b) {
                if (t.r.mat(a, b) == S(0)) continue;
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < m; ++d)
                        out.at(a, b, c, d) += S(t.r.mat(a, b) * t.s.mat(c, d));
            }
    return out;
}

template <class S>
S max_abs_diff(const dense4<S>& A, const dense4<S>& B) {
    if (A.m != B.m || A.n != B.n) throw std::invalid_argument("max_abs_diff: shape mismatch");
    S best(0);
    for (std::size_t i = 0; i < A.v.size(); ++i) best = std::max(best, abs_val(S(A.v[i] - B.v[i])));
    return best;
}

inline rational projective_upper_exact(const tensor_decomposition<rational>& D) {
    rational s(0);
    for (const auto& t : D.terms())
        s += rational(operator_norm_exact(t.r) * operator_norm_exact(t.s));
    return s;
}

inline bound projective_upper(const tensor_decomposition<double>& D, int budget = 200,
                              std::uint64_t seed = 0) {
    double lo = 0, hi = 0;
    bool exact = true;
    int idx = 0;
    for (const auto& t : D.terms()) {
        auto nr = operator_norm(t.r, opnorm_mode::search, budget, detail::mix_seed(seed, idx++));
        auto ns = operator_norm(t.s, opnorm_mode::search, budget, detail::mix_seed(seed, idx++));
        lo += nr.b.lo * ns.b.lo;
        hi += nr.b.hi * ns.b.hi;
        exact = exact && nr.b.exact && ns.b.exact;
    }
    return {lo, hi, exact};
}

inline tensor_decomposition<double> widened(const tensor_decomposition<rational>& D) {
    std::vector<tensor_term<double>> ts;
    ts.reserve(D.size());
    for (const auto& t : D.terms()) ts.push_back({widened(t.r), widened(t.s)});
    return tensor_decomposition<double>(D.X(), D.Y(), ts);
}

// Representation surgery lowering Sum ||R_t|| ||S_t|| while keeping the
// represented tensor fixed: drop zero terms, merge proportional pairs,
// balance scalings, and seeded invertible 2x2 mixes between term pairs.
inline tensor_decomposition<double> improve_decomposition(const tensor_decomposition<double>& D,
                                                          int budget = 200,
                                                          std::uint64_t seed = 0) {
    auto terms = D.terms();
    auto norm_hi = [&](const linear_map<double>& T) {
        return operator_norm(T, opnorm_mode::search, 32, 0).b.hi;
    };

    auto drop_and_merge = [&]() {
        std::erase_if(terms, [](const tensor_term<double>& t) {
            return t.r.mat.is_zero() || t.s.mat.is_zero();
        });
        for (std::size_t i = 0; i < terms.size(); ++i)
            for (std::size_t j = terms.size(); j-- > i + 1;) {
                // merge when (R_j, S_j) = (alpha R_i, beta S_i)
                auto prop = [](const matrix<double>& A, const matrix<double>& B,
                               double& factor) {
                    double ma = A.max_abs();
                    if (ma == 0) return false;
                    int pr = -1, pc = -1;
                    for (int r = 0; r < A.rows() && pr < 0; ++r)
                        for (int c = 0; c < A.cols(); ++c)
                            if (std::fabs(A(r, c)) == ma) {
                                pr = r, pc = c;
                                break;
                            }
                    factor = B(pr, pc) / A(pr, pc);
                    for (int r = 0; r < A.rows(); ++r)
                        for (int c = 0; c < A.cols(); ++c)
                            if (std::fabs(B(r, c) - factor * A(r, c)) > 1e-12 * (1 + ma))
                                return false;
                    return true;
                };
                double alpha = 0, beta = 0;
                if (prop(terms[i].r.mat, terms[j].r.mat, alpha) &&
                    prop(terms[i].s.mat, terms[j].s.mat, beta)) {
                    double c = 1 + alpha * beta;
                    if (c == 0) {
                        terms.erase(terms.begin() + long(j));
                        terms.erase(terms.begin() + long(i));
                        if (i >= terms.size()) break;
                        j = terms.size();
                        continue;
                    }
                    terms[i].r = scaled(terms[i].r, c);
                    terms.erase(terms.begin() + long(j));
                }
            }
    };
    auto balance = [&]() {
        for (auto& t : terms) {
            double nr = norm_hi(t.r), ns = norm_hi(t.s);
            if (nr > 0 && ns > 0) {
                double c = std::sqrt(ns / nr);
                t.r = scaled(t.r, c);
                t.s = scaled(t.s, 1.0 / c);
            }
        }
    };
    auto value = [&]() {
        double s = 0;
        for (const auto& t : terms) s += norm_hi(t.r) * norm_hi(t.s);
        return s;
    };

    drop_and_merge();
    balance();
    double best = value();
    std::uint64_t st = detail::mix_seed(seed, 77);
    for (int it = 0; it < budget && terms.size() >= 2; ++it) {
        std::size_t i = std::size_t(detail::uniform01(st) * double(terms.size()));
        std::size_t j = std::size_t(detail::uniform01(st) * double(terms.size()));
        i = std::min(i, terms.size() - 1), j = std::min(j, terms.size() - 1);
        if (i == j) continue;
        auto cand = terms;
        auto mix = [&](matrix<double>& P, matrix<double>& Q, double m00, double m01, double m10,
                       double m11) {
            matrix<double> p = P, q = Q;
            p *= m00;
            {
                matrix<double> tmp = Q;
                tmp *= m01;
                p += tmp;
            }
            q *= m11;
            {
                matrix<double> tmp = P;
                tmp *= m10;
                q += tmp;
            }
            P = std::move(p), Q = std::move(q);
        };
        // applying M to the R pair and M^{-T} to the S pair leaves
        // Sum R (x) S unchanged; rotations rebalance, shears cancel
        double pick = detail::uniform01(st);
        if (pick < 0.35) {
            double th = (detail::uniform01(st) * 2 - 1) * 3.14159265358979;
            double a = std::cos(th), b = std::sin(th);
            mix(cand[i].r.mat, cand[j].r.mat, a, b, -b, a);
            mix(cand[i].s.mat, cand[j].s.mat, a, b, -b, a); // rotation: M^{-T} = M
        } else if (pick < 0.5) {
            // same rotation family, but with the angle line-searched on the
            // cost of the touched pair; a coarse grid (which contains the
            // exact pi/4 merges) followed by golden refinement
            auto pair_cost = [&](double th) {
                double a = std::cos(th), b = std::sin(th);
                auto rot = [&](const matrix<double>& P, const matrix<double>& Q, double ca,
                               double cb) {
                    matrix<double> out = P;
                    out *= ca;
                    matrix<double> tmp = Q;
                    tmp *= cb;
                    out += tmp;
                    return out;
                };
                linear_map<double> ri(rot(terms[i].r.mat, terms[j].r.mat, a, b),
                                      terms[i].r.domain, terms[i].r.codomain);
                linear_map<double> rj(rot(terms[j].r.mat, terms[i].r.mat, a, -b),
                                      terms[j].r.domain, terms[j].r.codomain);
                linear_map<double> si(rot(terms[i].s.mat, terms[j].s.mat, a, b),
                                      terms[i].s.domain, terms[i].s.codomain);
                linear_map<double> sj(rot(terms[j].s.mat, terms[i].s.mat, a, -b),
                                      terms[j].s.domain, terms[j].s.codomain);
                return norm_hi(ri) * norm_hi(si) + norm_hi(rj) * norm_hi(sj);
            };
            const double half = 3.14159265358979 / 2;
            double bestth = 0, bestc = pair_cost(0);
            for (int k = -11; k <= 12; ++k) {
                double th = k * half / 12;
                double c = pair_cost(th);
                if (c < bestc) bestc = c, bestth = th;
            }
            double lo2 = bestth - half / 12, hi2 = bestth + half / 12;
            const double phi = (std::sqrt(5.0) - 1) / 2;
            double c1 = hi2 - phi * (hi2 - lo2), c2 = lo2 + phi * (hi2 - lo2);
            double f1 = pair_cost(c1), f2 = pair_cost(c2);
            for (int itg = 0; itg < 40; ++itg) {
                if (f1 < f2) {
                    hi2 = c2, c2 = c1, f2 = f1;
                    c1 = hi2 - phi * (hi2 - lo2);
                    f1 = pair_cost(c1);
                } else {
                    lo2 = c1, c1 = c2, f1 = f2;
                    c2 = lo2 + phi * (hi2 - lo2);
                    f2 = pair_cost(c2);
                }
            }
            double th = (f1 < f2) ? c1 : c2;
            if (pair_cost(bestth) <= std::min(f1, f2)) th = bestth;
            double a = std::cos(th), b = std::sin(th);
            mix(cand[i].r.mat, cand[j].r.mat, a, b, -b, a);
            mix(cand[i].s.mat, cand[j].s.mat, a, b, -b, a);
        } else {
            double t;
            double u = detail::uniform01(st);
            if (u < 0.25)
                t = 1;
            else if (u < 0.5)
                t = -1;
            else
                t = detail::gaussian(st);
            // M = [[1,t],[0,1]] so M^{-T} = [[1,0],[-t,1]]
            mix(cand[i].r.mat, cand[j].r.mat, 1, t, 0, 1);
            mix(cand[i].s.mat, cand[j].s.mat, 1, 0, -t, 1);
        }
        auto keep = terms;
        terms = cand;
        drop_and_merge();
        balance();
        double v = value();
        if (v < best - 1e-15)
            best = v;
        else
            terms = std::move(keep);
    }
    return tensor_decomposition<double>(D.X(), D.Y(), std::move(terms));
}

// Bilinear form pairing the two operator legs; carries its endpoint spaces
// and, when the constructor can prove one, a certified upper bound for its
// injective norm.
struct dual_form {
    space X, Y;
    dense4<double> coeffs;
    std::optional<double> inj_upper_analytic;
    std::string label;

    double eval(const matrix<double>& R, const matrix<double>& Smat) const {
        double acc = 0;
        for (int a = 0; a < coeffs.m; ++a)
            for (int b = 0; b < coeffs.n; ++b) {
                if (R(a, b) == 0) continue;
                double partial = 0;
                for (int c = 0; c < coeffs.n; ++c)
                    for (int d = 0; d < coeffs.m; ++d) {
                        double w = coeffs.at(a, b, c, d);
                        if (w != 0) partial += w * Smat(c, d);
                    }
                acc += R(a, b) * partial;
            }
        return acc;
    }
};

inline double pairing(const tensor_decomposition<double>& D, const dual_form& B) {
    if (!(B.X == D.X()) || !(B.Y == D.Y()))
        throw std::invalid_argument("pairing: form endpoints do not match");
    double s = 0;
    for (const auto& t : D.terms()) s += B.eval(t.r.mat, t.s.mat);
    return s;
}

// Crude certified upper bound: |B(R,S)| <= sum |coeff| * u_ab * v_cd with the
// coordinate bounds |R_ab| <= ||x_a^*|| ||y_b|| ||R|| and the S analogue.
inline double injective_upper(const dual_form& B) {
    if (B.inj_upper_analytic) return *B.inj_upper_analytic;
    const int m = B.coeffs.m, n = B.coeffs.n;
    std::vector<double> xdual(m), ynorm(n), ydual(n), xnorm(m);
    for (int a = 0; a < m; ++a) {
        xdual[a] = B.X.dual_norm(basis_vector<double>(B.X, a)).hi;
        xnorm[a] = B.X.norm_certified(basis_vector<double>(B.X, a)).hi;
    }
    for (int b = 0; b < n; ++b) {
        ydual[b] = B.Y.dual_norm(basis_vector<double>(B.Y, b)).hi;
        ynorm[b] = B.Y.norm_certified(basis_vector<double>(B.Y, b)).hi;
    }
    double s = 0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < m; ++d) {
                    double w = std::fabs(B.coeffs.at(a, b, c, d));
                    if (w != 0) s += w * (xdual[a] * ynorm[b]) * (ydual[c] * xnorm[d]);
                }
    return s;
}

namespace detail {

// Maximizer of <G, R> over the operator unit ball of maps dom -> cod. The
// ball factors into independent codomain balls for l_1 domains (one per
// column) and for l_inf^2 (images of (1,1) and (1,-1)); in those cases each
// factor is solved exactly by norming_vector. nullopt when no factorization
// applies.
inline std::optional<matrix<double>> op_ball_maximizer(const matrix<double>& G, const space& dom,
                                                       const space& cod) {
    const int m = G.rows(), n = G.cols();
    auto solve_factor = [&](const std::vector<double>& u) -> std::optional<std::vector<double>> {
        bool zero = true;
        for (double t : u)
            if (t != 0.0) zero = false;
        if (zero) return std::vector<double>(u.size(), 0.0);
        auto v = norming_vector(cod, u);
        if (v.empty()) return std::nullopt;
        return v;
    };
    if (dom.kind() == space_kind::lp && dom.p() == 1.0) {
        matrix<double> R(m, n);
        for (int b = 0; b < n; ++b) {
            std::vector<double> u(std::size_t(m), 0.0);
            for (int a = 0; a < m; ++a) u[std::size_t(a)] = G(a, b);
            auto col = solve_factor(u);
            if (!col) return std::nullopt;
            for (int a = 0; a < m; ++a) R(a, b) = (*col)[std::size_t(a)];
        }
        return R;
    }
    if (dom.kind() == space_kind::lp && std::isinf(dom.p()) && n == 2) {
        std::vector<double> g1(std::size_t(m), 0.0), g2(std::size_t(m), 0.0);
        for (int a = 0; a < m; ++a) {
            g1[std::size_t(a)] = (G(a, 0) + G(a, 1)) / 2;
            g2[std::size_t(a)] = (G(a, 0) - G(a, 1)) / 2;
        }
        auto c1 = solve_factor(g1), c2 = solve_factor(g2);
        if (!c1 || !c2) return std::nullopt;
        matrix<double> R(m, 2);
        for (int a = 0; a < m; ++a) {
            R(a, 0) = ((*c1)[std::size_t(a)] + (*c2)[std::size_t(a)]) / 2;
            R(a, 1) = ((*c1)[std::size_t(a)] - (*c2)[std::size_t(a)]) / 2;
        }
        return R;
    }
    return std::nullopt;
}

} // namespace detail

// Best found value of B over the two operator-norm unit balls (a certified
// lower bound of the injective norm) together with the certified upper.
// When both slots admit an exact linear maximizer the alternation climbs
// inside the balls and the value needs no normalization; otherwise gradient
// directions are normalized after the fact.
inline bound injective_norm(const dual_form& B, int budget = 200, std::uint64_t seed = 0) {
    const int m = B.coeffs.m, n = B.coeffs.n;
    auto opn_hi = [&](const matrix<double>& M, const space& dom, const space& cod) {
        return operator_norm(linear_map<double>(M, dom, cod), opnorm_mode::search, 32, 1).b.hi;
    };
    auto grad_R = [&](const matrix<double>& Sm) {
        matrix<double> G(m, n);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b) {
                double g = 0;
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < m; ++d) g += B.coeffs.at(a, b, c, d) * Sm(c, d);
                G(a, b) = g;
            }
        return G;
    };
    auto grad_S = [&](const matrix<double>& R) {
        matrix<double> H(n, m);
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < m; ++d) {
                double g = 0;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < n; ++b) g += B.coeffs.at(a, b, c, d) * R(a, b);
                H(c, d) = g;
            }
        return H;
    };
    double lo = 0;
    std::uint64_t st = detail::mix_seed(seed, 303);
    int nstarts = std::clamp(budget / 10, 4, 40);
    for (int start = 0; start < nstarts; ++start) {
        matrix<double> R(m, n), Sm(n, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < n; ++b) R(a, b) = detail::gaussian(st);
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < m; ++d) Sm(c, d) = detail::gaussian(st);

        bool exact_rounds = true;
        for (int round = 0; round < 12 && exact_rounds; ++round) {
            auto optR = detail::op_ball_maximizer(grad_R(Sm), B.Y, B.X);
            if (!optR) {
                exact_rounds = false;
                break;
            }
            R = std::move(*optR);
            auto optS = detail::op_ball_maximizer(grad_S(R), B.X, B.Y);
            if (!optS) {
                exact_rounds = false;
                break;
            }
            Sm = std::move(*optS);
        }
        if (exact_rounds) {
            lo = std::max(lo, std::fabs(B.eval(R, Sm)));
            continue;
        }
        for (int round = 0; round < 12; ++round) {
            auto G = grad_R(Sm);
            if (G.max_abs() > 0) R = std::move(G);
            auto H = grad_S(R);
            if (H.max_abs() > 0) Sm = std::move(H);
        }
        double nr = opn_hi(R, B.Y, B.X), ns = opn_hi(Sm, B.X, B.Y);
        if (nr > 1e-300 && ns > 1e-300) lo = std::max(lo, std::fabs(B.eval(R, Sm)) / (nr * ns));
    }
    double hi = std::max(injective_upper(B), lo);
    return {lo, hi, false};
}

// Coordinate-trace form (S R)_{ll} on the Y side. (SR)_{ll} = y_l^*(S R y_l),
// so the injective norm is at most ||y_l^*|| ||y_l||; that product is 1 for
// normalized 1-unconditional bases but not for arbitrary custom norms, hence
// it is certified here rather than assumed.
inline dual_form coordinate_trace_form(const space& X, const space& Y, int l) {
    if (l < 0 || l >= Y.dim()) throw std::invalid_argument("coordinate_trace_form: bad index");
    auto el = basis_vector<double>(Y, l);
    double inj = Y.dual_norm(el).hi * Y.norm_certified(el).hi;
    dual_form B{X, Y, dense4<double>(X.dim(), Y.dim()), inj, "ytrace" + std::to_string(l)};
    for (int a = 0; a < X.dim(); ++a) B.coeffs.at(a, l, l, a) = 1;
    return B;
}

// Form f((R S) x) for a fixed pair with ||x|| <= 1 and ||f||^* <= 1; the
// whole family has injective norm at most 1 and its supremum over all such
// pairs is the operator norm of the contraction.
inline dual_form contraction_point_form(const space& X, const space& Y,
                                        const std::vector<double>& x,
                                        const std::vector<double>& f) {
    dual_form B{X, Y, dense4<double>(X.dim(), Y.dim()), 1.0, "pi-point"};
    for (int a = 0; a < X.dim(); ++a)
        for (int b = 0; b < Y.dim(); ++b)
            for (int d = 0; d < X.dim(); ++d) B.coeffs.at(a, b, b, d) = f[a] * x[d];
    return B;
}

// Fully factorized form xstar(R y) * f(S x). Its injective norm is at most
// the product of the four vector norms, which is recorded analytically, so
// the weak-duality quotient below stays certified.
inline dual_form factorized_point_form(const space& X, const space& Y,
                                       const std::vector<double>& xstar,
                                       const std::vector<double>& y,
                                       const std::vector<double>& f,
                                       const std::vector<double>& x) {
    dual_form B{X, Y, dense4<double>(X.dim(), Y.dim()), std::nullopt, "factorized"};
    for (int a = 0; a < X.dim(); ++a)
        for (int b = 0; b < Y.dim(); ++b)
            for (int c = 0; c < Y.dim(); ++c)
                for (int d = 0; d < X.dim(); ++d)
                    B.coeffs.at(a, b, c, d) = xstar[std::size_t(a)] * y[std::size_t(b)] *
                                              f[std::size_t(c)] * x[std::size_t(d)];
    B.inj_upper_analytic = X.dual_norm(xstar).hi * Y.norm_certified(y).hi *
                           Y.dual_norm(f).hi * X.norm_certified(x).hi;
    return B;
}

// Norm gradient at u, which pairs to ||u|| wherever the norm is smooth. No
// normalization is attempted here; consumers certify through dual_norm.
inline std::vector<double> norming_functional(const space& sp, const std::vector<double>& u) {
    const double nu = sp.norm_certified(u).hi;
    std::vector<double> g(u.size(), 0.0);
    if (!(nu > 0)) return g;
    const double h = 1e-6 * std::max(1.0, nu);
    std::vector<double> w(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        w[i] = u[i] + h;
        const double np = sp.norm_certified(w).hi;
        w[i] = u[i] - h;
        const double nm = sp.norm_certified(w).hi;
        w[i] = u[i];
        g[i] = (np - nm) / (2 * h);
    }
    return g;
}

inline std::vector<dual_form> standard_forms(const space& X, const space& Y, int count = 64,
                                             std::uint64_t seed = 0) {
    std::vector<dual_form> out;
    for (int l = 0; l < Y.dim() && int(out.size()) < count; ++l)
        out.push_back(coordinate_trace_form(X, Y, l));
    std::uint64_t st = detail::mix_seed(seed, 909);
    while (int(out.size()) < count) {
        dual_form B{X, Y, dense4<double>(X.dim(), Y.dim()), std::nullopt, "random"};
        for (auto& c : B.coeffs.v) c = detail::gaussian(st);
        out.push_back(std::move(B));
    }
    return out;
}

// Forms tuned to the terms at hand: norming data of each term certifies
// elementary tensors at their product value, which the generic families
// cannot see.
inline std::vector<dual_form> adapted_forms(const tensor_decomposition<double>& D, int budget,
                                            std::uint64_t seed) {
    std::vector<dual_form> out;
    const std::size_t cap = 4;
    const int wb = std::clamp(budget, 24, 120);
    for (std::size_t k = 0; k < D.terms().size() && out.size() < cap; ++k) {
        const auto& t = D.terms()[k];
        auto wr = operator_norm(t.r, opnorm_mode::search, wb, detail::mix_seed(seed, 11 + k));
        auto ws = operator_norm(t.s, opnorm_mode::search, wb, detail::mix_seed(seed, 12 + k));
        if (wr.witness.empty() || ws.witness.empty()) continue;
        auto xstar = norming_functional(D.X(), t.r.apply(wr.witness));
        auto f = norming_functional(D.Y(), t.s.apply(ws.witness));
        out.push_back(factorized_point_form(D.X(), D.Y(), xstar, wr.witness, f, ws.witness));
    }
    return out;
}

// Weak duality: every form B with a certified injective upper bound u gives
// ||D||^ >= pairing(D, B) / u. The contraction route is always included.
inline double projective_lower(const tensor_decomposition<double>& D,
                               const std::vector<dual_form>& forms, int budget = 200,
                               std::uint64_t seed = 0) {
    double best = 0;
    {
        auto pi = contract(D);
        best = std::max(best, operator_norm(pi, opnorm_mode::search, budget, seed).b.lo);
    }
    for (const auto& B : forms) {
        double u = injective_upper(B);
        if (!(u > 1e-300) || !std::isfinite(u)) continue;
        best = std::max(best, std::fabs(pairing(D, B)) / u);
    }
    return best;
}

inline double projective_lower(const tensor_decomposition<double>& D, int budget = 200,
                               std::uint64_t seed = 0) {
    auto forms = standard_forms(D.X(), D.Y(), 8 + D.Y().dim(), seed);
    auto tuned = adapted_forms(D, budget, seed);
    forms.insert(forms.end(), std::make_move_iterator(tuned.begin()),
                 std::make_move_iterator(tuned.end()));
    return projective_lower(D, forms, budget, seed);
}

// Exact lower bound in the rational lane through the contraction and the
// coordinate-trace forms.
inline rational projective_lower_exact(const tensor_decomposition<rational>& D) {
    rational best(0);
    try {
        best = operator_norm_exact(contract(D));
    } catch (const exactness_error&) {
        // contraction norm not exactly computable for these spaces
    }
    const int m = D.X().dim(), n = D.Y().dim();
    for (int l = 0; l < n; ++l) {
        rational p(0);
        for (const auto& t : D.terms())
            for (int a = 0; a < m; ++a) p += rational(t.r.mat(a, l) * t.s.mat(l, a));
        best = std::max(best, abs_val(p));
    }
    return best;
}

} // namespace banlab
