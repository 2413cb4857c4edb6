#pragma once

// Generalized diagonals: trace-one coefficient matrices a on the Y side,
// expanded to Sum_{i,j} a_ij Sum_k (y_j^* (x) x_k) (x) (x_k^* (x) y_i).
// Such an element commutes with every W acting on the X legs and contracts
// to the identity; those two properties are what verify_gd checks.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banlab/tensor.hpp"

namespace banlab {

template <class S>
struct generalized_diagonal {
    space X; // dim m, basis x_k
    space Y; // dim n, basis y_i
    matrix<S> coeffs; // n x n, entry (i,j) multiplies the p_{i,j} block

    generalized_diagonal(space X_, space Y_, matrix<S> a)
        : X(std::move(X_)), Y(std::move(Y_)), coeffs(std::move(a)) {
        if (X.dim() < 1 || Y.dim() < 1)
            throw std::invalid_argument("generalized_diagonal: degenerate space");
        if (coeffs.rows() != Y.dim() || coeffs.cols() != Y.dim())
            throw std::invalid_argument("generalized_diagonal: coefficient shape");
    }

    S trace() const {
        S t(0);
        for (int i = 0; i < coeffs.rows(); ++i) t += coeffs(i, i);
        return t;
    }
};

template <class S>
generalized_diagonal<S> diagonal_gd(const space& X, const space& Y, const std::vector<S>& c) {
    matrix<S> a(Y.dim(), Y.dim());
    if (int(c.size()) != Y.dim()) throw std::invalid_argument("diagonal_gd: length mismatch");
    for (int i = 0; i < Y.dim(); ++i) a(i, i) = c[i];
    return generalized_diagonal<S>(X, Y, std::move(a));
}

namespace detail {

template <class S>
bool trace_is_one(const generalized_diagonal<S>& g) {
    if constexpr (is_exact_scalar<S>) {
        return g.trace() == S(1);
    } else {
        return std::fabs(g.trace() - 1.0) <= 1e-12;
    }
}

} // namespace detail

// Expansion without the trace gate, for studying deliberately broken inputs.
template <class S>
tensor_decomposition<S> gd_expand_unchecked(const generalized_diagonal<S>& g) {
    const int m = g.X.dim(), n = g.Y.dim();
    std::vector<tensor_term<S>> terms;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (g.coeffs(i, j) == S(0)) continue;
            for (int k = 0; k < m; ++k) {
                matrix<S> r(m, n), s(n, m);
                r(k, j) = g.coeffs(i, j); // a_ij * y_j^* (x) x_k
                s(i, k) = S(1);           // x_k^* (x) y_i
                terms.push_back({linear_map<S>(r, g.Y, g.X), linear_map<S>(s, g.X, g.Y)});
            }
        }
    return tensor_decomposition<S>(g.X, g.Y, std::move(terms));
}

template <class S>
tensor_decomposition<S> gd_expand(const generalized_diagonal<S>& g) {
    if (!detail::trace_is_one(g))
        throw std::invalid_argument("gd_expand: coefficient trace must be 1");
    return gd_expand_unchecked(g);
}

struct gd_report {
    bool commutes = false;
    bool unit = false;
    double commute_residual = 0;
    double unit_residual = 0;
};

// The defining membrane: W D = D W for every W on the X legs (checked on
// matrix units, which span), and contraction equal to the identity.
template <class S>
gd_report verify_gd(const tensor_decomposition<S>& D, double tol = 1e-10) {
    const int m = D.X().dim();
    gd_report rep;

    const int n = D.Y().dim();
    if (m > 12 || n > 12) throw std::invalid_argument("verify_gd: dimensions above dense budget");
    S cres(0);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            // W = x_k^* (x) x_l; accumulate the dense array of W D - D W
            dense4<S> diff(m, n);
            for (const auto& t : D.terms()) {
                // (W R)(a,b) = delta_{a,l} R(k,b); (S W)(c,d) = delta_{d,k} S(c,l)
                for (int b = 0; b < n; ++b) {
                    S rkb = t.r.mat(k, b);
                    if (rkb != S(0))
                        for (int c = 0; c < n; ++c)
                            for (int d = 0; d < m; ++d) {
                                S s = t.s.mat(c, d);
                                if (s != S(0)) diff.at(l, b, c, d) += S(rkb * s);
                            }
                }
                for (int c = 0; c < n; ++c) {
                    S scl = t.s.mat(c, l);
                    if (scl != S(0))
                        for (int a = 0; a < m; ++a)
                            for (int b = 0; b < n; ++b) {
                                S r = t.r.mat(a, b);
                                if (r != S(0)) diff.at(a, b, c, k) -= S(r * scl);
                            }
                }
            }
            cres = std::max(cres, diff.max_abs());
        }
    rep.commute_residual = to_double(cres);
    rep.commutes = rep.commute_residual <= tol;

    matrix<S> pi = contract(D).mat;
    pi -= matrix<S>::identity(m);
    rep.unit_residual = to_double(pi.max_abs());
    rep.unit = rep.unit_residual <= tol;
    return rep;
}

// R (x) S  |->  2^{-n} Sum_{t in {-1,1}^n} R U_t (x) U_t S with U_t the sign
// operator on the Y basis. Kills every off-diagonal p_{i,j} block and fixes
// the diagonal ones.
template <class S>
tensor_decomposition<S> sign_average(const tensor_decomposition<S>& D) {
    const int n = D.Y().dim();
    if (n > 16) throw std::invalid_argument("sign_average: Y dimension above the sign budget");
    const std::uint32_t total = 1u << n;
    S inv(1);
    {
        S two(2);
        for (int i = 0; i < n; ++i) inv = S(inv / two);
    }
    std::vector<tensor_term<S>> terms;
    terms.reserve(D.size() * total);
    for (std::uint32_t bits = 0; bits < total; ++bits) {
        for (const auto& t : D.terms()) {
            matrix<S> r = t.r.mat, s = t.s.mat;
            for (int j = 0; j < n; ++j)
                if (bits >> j & 1u) {
                    for (int row = 0; row < r.rows(); ++row) r(row, j) = S(-r(row, j));
                    for (int col = 0; col < s.cols(); ++col) s(j, col) = S(-s(j, col));
                }
            for (int row = 0; row < r.rows(); ++row)
                for (int col = 0; col < r.cols(); ++col) r(row, col) = S(r(row, col) * inv);
            terms.push_back({linear_map<S>(std::move(r), D.Y(), D.X()),
                             linear_map<S>(std::move(s), D.X(), D.Y())});
        }
    }
    return tensor_decomposition<S>(D.X(), D.Y(), std::move(terms));
}

template <class S>
struct sign_fix_result {
    generalized_diagonal<S> g;
    bool changed = false;
    std::vector<int> zero_diagonal; // indices where the sign is undefined
};

// Compose one tensor leg with the sign map Lambda(y_i) = sign(a_ii) y_i.
// For 1-unconditional Y this leaves the projective norm of the expansion
// unchanged while making the diagonal coefficients nonnegative; the trace
// of the result is Sum |a_ii| >= 1, so it feeds the unchecked expansion.
template <class S>
sign_fix_result<S> sign_fix(const generalized_diagonal<S>& g) {
    const int n = g.Y.dim();
    std::vector<int> zeros;
    for (int i = 0; i < n; ++i)
        if (g.coeffs(i, i) == S(0)) zeros.push_back(i);
    if (!zeros.empty()) return {g, false, std::move(zeros)};

    bool any = false;
    matrix<S> a = g.coeffs;
    for (int i = 0; i < n; ++i)
        if (a(i, i) < S(0)) {
            any = true;
            for (int j = 0; j < n; ++j) a(i, j) = S(-a(i, j));
        }
    if (!any) return {g, false, {}};
    return {generalized_diagonal<S>(g.X, g.Y, std::move(a)), true, {}};
}

// Group average over G = {diag(t) sigma^j}: (1/|G|) Sum_g g (x) g^{-1} on
// l_p^n. Every g is a signed permutation, so each term contributes exactly
// |G|^{-1} to the upper bound and the total is 1. As a tensor this equals
// Sum_i (1/n) p_{i,i}.
template <class S>
tensor_decomposition<S> signed_cyclic_diagonal(int n, double p) {
    if (n < 1 || n > 12)
        throw std::invalid_argument("signed_cyclic_diagonal: n outside 1..12");
    auto X = space::lp(n, p);
    const std::uint32_t total = 1u << n;
    S scale(1);
    {
        S denom(n);
        S two(2);
        for (int i = 0; i < n; ++i) denom = S(denom * two);
        scale = S(scale / denom); // 1/(n 2^n)
    }
    std::vector<tensor_term<S>> terms;
    terms.reserve(std::size_t(n) * total);
    for (int j = 0; j < n; ++j)
        for (std::uint32_t bits = 0; bits < total; ++bits) {
            matrix<S> gmat(n, n), ginv(n, n);
            for (int c = 0; c < n; ++c) {
                int r = (c + j) % n;
                S t = (bits >> r & 1u) ? S(-1) : S(1);
                gmat(r, c) = S(t * scale); // diag(t) sigma^j, scaled into R
                ginv(c, r) = t;            // sigma^{-j} diag(t)
            }
            terms.push_back({linear_map<S>(std::move(gmat), X, X),
                             linear_map<S>(std::move(ginv), X, X)});
        }
    return tensor_decomposition<S>(X, X, std::move(terms));
}

// Kron assembly: pairs every outer term (R,S) with every inner term (U,V),
// producing kron(R,U) (x) kron(S,V) on the e-sum spaces. The outer terms
// must be monomial so that ||kron(R,U)|| = ||R|| ||U|| holds and the upper
// bound multiplies.
template <class S>
tensor_decomposition<S> assemble_tensor_diagonal(const tensor_decomposition<S>& Dm,
                                                 const tensor_decomposition<S>& dX) {
    for (const auto& t : Dm.terms())
        if (!is_monomial(t.r.mat) || !is_monomial(t.s.mat))
            throw std::invalid_argument(
                "assemble_tensor_diagonal: outer terms must be monomial");
    std::vector<tensor_term<S>> terms;
    terms.reserve(Dm.size() * dX.size());
    for (const auto& outer : Dm.terms())
        for (const auto& inner : dX.terms())
            terms.push_back({kron(outer.r, inner.r), kron(outer.s, inner.s)});
    space Xres = space::esum(Dm.X(), std::vector<space>(std::size_t(Dm.X().dim()), dX.X()));
    space Yres = space::esum(Dm.Y(), std::vector<space>(std::size_t(Dm.Y().dim()), dX.Y()));
    return tensor_decomposition<S>(Xres, Yres, std::move(terms));
}

namespace detail {

// Coordinate embedding data: X sits inside Z by sending block j of X onto a
// slice of block target[j] of Z (or plain coordinates when Z is not an
// e-sum). iota: X -> Z is isometric, proj: Z -> X has norm 1, proj iota = I.
template <class S>
std::pair<linear_map<S>, linear_map<S>> coordinate_embedding(
    const space& X, const space& Z, const std::vector<std::pair<int, int>>& slots) {
    // slots[r] = (block of Z, offset inside that block) for coordinate r of X;
    // a non-e-sum Z counts as one block
    matrix<S> emb(Z.dim(), X.dim()), prj(X.dim(), Z.dim());
    for (int r = 0; r < X.dim(); ++r) {
        auto [blk, off] = slots[std::size_t(r)];
        int base = 0;
        if (Z.kind() == space_kind::esum) {
            auto parts = Z.inners();
            for (int b = 0; b < blk; ++b) base += parts[std::size_t(b)].dim();
        } else if (blk != 0) {
            throw std::invalid_argument("coordinate_embedding: block index on a plain space");
        }
        emb(base + off, r) = S(1);
        prj(r, base + off) = S(1);
    }
    return {linear_map<S>(std::move(emb), X, Z), linear_map<S>(std::move(prj), Z, X)};
}

} // namespace detail

template <class S>
struct lpq_gd_result {
    tensor_decomposition<S> D; // in F(X_km, X_i) (x) F(X_i, X_km)
    space Xi;
    space Xkm;
    int m = 0;
    std::vector<int> ks; // chosen block indices, 1-based
};

// Stage-i diagonal for the q-sum of l_p blocks: build the m x m grid space
// l_q^m(l_p^m), give it the kron of two group diagonals, then push through
// norm-one embeddings so the result acts between X_i and X_{k_m}.
template <class S>
lpq_gd_result<S> lpq_gd(const std::vector<int>& nks, int i, double p, double q) {
    if (i < 1 || i > int(nks.size())) throw std::invalid_argument("lpq_gd: stage out of range");
    int m = i;
    for (int j = 0; j < i; ++j) m = std::max(m, nks[std::size_t(j)]);
    if (m > 6) throw std::invalid_argument("lpq_gd: grid size above the desk budget");

    std::vector<int> ks;
    for (int k = 1; k <= int(nks.size()) && int(ks.size()) < m; ++k)
        if (nks[std::size_t(k - 1)] >= m) ks.push_back(k);
    if (int(ks.size()) < m)
        throw std::invalid_argument("lpq_gd: prefix too short to host the grid blocks");
    const int km = ks.back();

    auto stage_space = [&](int stage) {
        std::vector<space> blocks;
        for (int j = 1; j <= stage; ++j) blocks.push_back(space::lp(nks[std::size_t(j - 1)], p));
        if (stage == 1) return blocks[0];
        return space::esum(space::lp(stage, q), blocks);
    };
    space Xi = stage_space(i);
    space Xkm = stage_space(km);

    auto Douter = signed_cyclic_diagonal<S>(m, q);
    auto Dinner = signed_cyclic_diagonal<S>(m, p);
    auto Dgrid = assemble_tensor_diagonal(Douter, Dinner);
    const space& G = Dgrid.X();

    // X_i -> grid: block j (dim n_j <= m) onto the first n_j entries of row j
    std::vector<std::pair<int, int>> slots1;
    for (int j = 0; j < i; ++j)
        for (int c = 0; c < nks[std::size_t(j)]; ++c) slots1.push_back({j, c});
    auto [iota1, proj1] = detail::coordinate_embedding<S>(Xi, G, slots1);

    // grid -> X_{k_m}: grid row j (dim m) onto the first m coordinates of
    // block k_j of X_{k_m}
    std::vector<std::pair<int, int>> slots2;
    for (int j = 0; j < m; ++j)
        for (int c = 0; c < m; ++c) slots2.push_back({ks[std::size_t(j)] - 1, c});
    auto [iota2, proj2] = detail::coordinate_embedding<S>(G, Xkm, slots2);

    // R (x) S |-> P1 R P2 (x) iota2 S iota1
    std::vector<tensor_term<S>> terms;
    terms.reserve(Dgrid.size());
    for (const auto& t : Dgrid.terms()) {
        matrix<S> r = proj1.mat * t.r.mat * proj2.mat;
        matrix<S> s = iota2.mat * t.s.mat * iota1.mat;
        terms.push_back({linear_map<S>(std::move(r), Xkm, Xi),
                         linear_map<S>(std::move(s), Xi, Xkm)});
    }
    return {tensor_decomposition<S>(Xi, Xkm, std::move(terms)), Xi, Xkm, m, ks};
}

// Weighted cyclic representation of the diagonal element Sum c_i p_{i,i} on
// a single space: terms 2^{-n} diag(t) sigma^j diag(g) (x) diag(g') sigma^{-j} diag(t)
// with g_b g'_b = c_b. The dense array is exact for every split of c; the
// balanced split g = g' = sqrt(c) gives the upper bound n max c_i on spaces
// whose basis is symmetric enough for signed cyclic shifts to be isometries.
inline tensor_decomposition<double> weighted_cyclic_decomposition(const space& X,
                                                                  const std::vector<double>& c) {
    const int n = X.dim();
    if (int(c.size()) != n) throw std::invalid_argument("weighted_cyclic: length mismatch");
    if (n > 12) throw std::invalid_argument("weighted_cyclic: dimension above the sign budget");
    for (double ci : c)
        if (ci < 0) throw std::invalid_argument("weighted_cyclic: coefficients must be >= 0");
    const std::uint32_t total = 1u << n;
    const double scale = 1.0 / double(total);
    std::vector<double> g(c.size());
    for (std::size_t b = 0; b < c.size(); ++b) g[b] = std::sqrt(c[b]);
    std::vector<tensor_term<double>> terms;
    terms.reserve(std::size_t(n) * total);
    for (int j = 0; j < n; ++j)
        for (std::uint32_t bits = 0; bits < total; ++bits) {
            matrix<double> rmat(n, n), smat(n, n);
            for (int col = 0; col < n; ++col) {
                int row = (col + j) % n;
                double t = (bits >> row & 1u) ? -1.0 : 1.0;
                rmat(row, col) = t * g[std::size_t(col)] * scale;
                smat(col, row) = t * g[std::size_t(col)];
            }
            terms.push_back({linear_map<double>(std::move(rmat), X, X),
                             linear_map<double>(std::move(smat), X, X)});
        }
    return tensor_decomposition<double>(X, X, std::move(terms));
}

struct min_gd_result {
    std::vector<double> coeffs;
    double upper = 0;
    double lower = 0;
};

namespace detail {

inline double simplex_gd_value(const space& X, const space& Y, const std::vector<double>& c,
                               int budget, std::uint64_t seed) {
    // canonical expansion, surgically improved
    matrix<double> a(Y.dim(), Y.dim());
    for (int i = 0; i < Y.dim(); ++i) a(i, i) = c[std::size_t(i)];
    generalized_diagonal<double> g(X, Y, std::move(a));
    auto D = improve_decomposition(gd_expand_unchecked(g), std::min(budget, 60), seed);
    double val = projective_upper(D, 32, seed).hi;
    // group representation, available when the two sides coincide
    if (X == Y && X.dim() <= 12) {
        auto W = weighted_cyclic_decomposition(X, c);
        val = std::min(val, projective_upper(W, 32, seed).hi);
    }
    return val;
}

} // namespace detail

// Simplex search for the cheapest diagonal element Sum c_i p_{i,i}. The
// value at each c is the best certified upper bound over the available
// representations; the reported lower bound comes from weak duality on the
// winning point.
inline min_gd_result min_gd_norm(const space& X, const space& Y, int budget = 200,
                                 std::uint64_t seed = 0) {
    if (!Y.is_unconditional())
        throw std::invalid_argument("min_gd_norm: Y must have a 1-unconditional basis");
    const int n = Y.dim();
    auto value = [&](const std::vector<double>& c) {
        return detail::simplex_gd_value(X, Y, c, budget, seed);
    };

    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(std::size_t(n), 1.0 / n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> v(std::size_t(n), 0.0);
        v[std::size_t(i)] = 1;
        starts.push_back(std::move(v));
    }
    std::uint64_t st = detail::mix_seed(seed, 4242);
    int extra = std::clamp(budget / 50, 0, 6);
    for (int e = 0; e < extra; ++e) {
        std::vector<double> v(std::size_t(n), 0.0);
        double s = 0;
        for (auto& x : v) {
            x = -std::log(std::max(detail::uniform01(st), 1e-12));
            s += x;
        }
        for (auto& x : v) x /= s;
        starts.push_back(std::move(v));
    }

    std::vector<double> best;
    double bestval = infinity;
    for (std::size_t s0 = 0; s0 < starts.size(); ++s0) {
        auto c = starts[s0];
        double v = value(c);
        double step = 0.25;
        int evals = 0;
        const int cap = std::max(8, budget / int(starts.size()) / 2);
        while (step > 1e-4 && evals < cap) {
            bool moved = false;
            for (int i = 0; i < n && evals < cap; ++i)
                for (int j = 0; j < n && evals < cap; ++j) {
                    if (i == j) continue;
                    double d = std::min(step, c[std::size_t(j)]);
                    if (d <= 0) continue;
                    auto cand = c;
                    cand[std::size_t(i)] += d;
                    cand[std::size_t(j)] -= d;
                    ++evals;
                    double vc = value(cand);
                    if (vc < v - 1e-12) {
                        c = cand;
                        v = vc;
                        moved = true;
                    }
                }
            if (!moved) step *= 0.5;
        }
        if (v < bestval) {
            bestval = v;
            best = c;
        }
    }

    // weak-duality lower bound at the winner
    double lower = 0;
    {
        matrix<double> a(n, n);
        for (int i = 0; i < n; ++i) a(i, i) = best[std::size_t(i)];
        generalized_diagonal<double> g(X, Y, std::move(a));
        lower = projective_lower(gd_expand_unchecked(g), 64, seed);
    }
    return {best, bestval, lower};
}

} // namespace banlab
