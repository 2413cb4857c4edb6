#pragma once

// Norms of dual-Tsirelson type on finitely supported coefficient vectors.
//
// The base norm is the recursive one: level 0 is the sup norm, and each
// refinement takes max(previous, (1/2) max over admissible block families
// E_1 < ... < E_k with k <= min E_1 of the sum of block values). The limit
// norm is computed directly by a well-founded recursion over support
// intervals; restricting blocks to interval hulls loses nothing because the
// norm is 1-unconditional and monotone under support enlargement (the
// brute-force equivalence test in the suite guards this). The p-convexified
// variant applies the same recursion to p-th powers of the coefficients.

#include "banlab/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace banlab {

enum class admissibility { nonstrict, strict };

// Finitely supported vector, indices 1-based and strictly increasing.
template <class S>
struct fin_supp {
    std::vector<std::pair<int, S>> c;

    fin_supp() = default;
    explicit fin_supp(std::vector<std::pair<int, S>> coeffs) : c(std::move(coeffs)) {
        std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::erase_if(c, [](const auto& e) { return e.second == S(0); });
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i].first < 1) throw std::invalid_argument("fin_supp: indices start at 1");
            if (i > 0 && c[i].first == c[i - 1].first)
                throw std::invalid_argument("fin_supp: duplicate index");
        }
    }

    int support_size() const { return int(c.size()); }
    int max_index() const { return c.empty() ? 0 : c.back().first; }
    bool empty() const { return c.empty(); }
};

// Ordered interval blocks over original indices; validity is checked against
// the chosen admissibility convention.
struct admissible_partition {
    std::vector<std::pair<int, int>> blocks; // closed index intervals, ascending

    bool valid(admissibility adm) const {
        if (blocks.empty()) return false;
        int k = int(blocks.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].first > blocks[i].second || blocks[i].first < 1) return false;
            if (i > 0 && blocks[i].first <= blocks[i - 1].second) return false;
        }
        int min_e1 = blocks.front().first;
        return adm == admissibility::nonstrict ? k <= min_e1 : k < min_e1;
    }
};

namespace detail {

template <class S>
bool family_start_ok(int k, int first_index, admissibility adm) {
    return adm == admissibility::nonstrict ? k <= first_index : k < first_index;
}

// Best value of (sum over an admissible family of blocks inside support
// positions [a..b]) given per-interval block values in `tab` (sentinel -1
// marks an unavailable interval; only the interval currently being computed
// carries it, which is exactly the self-referential family to exclude).
template <class S>
S family_max(const std::vector<int>& idx, const std::vector<std::vector<S>>& tab, int a, int b,
             admissibility adm) {
    const int n = b - a + 1;
    const S none(-1);
    // h[q - a][r]: best sum of exactly r blocks placed inside positions [q..b]
    std::vector<std::vector<S>> h(n + 1, std::vector<S>(n + 1, none));
    for (int r = 0; r <= n; ++r) h[n][r] = (r == 0) ? S(0) : none;
    for (int q = b; q >= a; --q) {
        h[q - a][0] = S(0);
        for (int r = 1; r <= n; ++r) {
            S best = h[q - a + 1][r];
            for (int e = q; e <= b; ++e) {
                if (tab[q][e] == none) continue;
                const S& rest = h[e - a + 1][r - 1];
                if (rest == none) continue;
                S cand = tab[q][e] + rest;
                if (best == none || cand > best) best = cand;
            }
            h[q - a][r] = best;
        }
    }
    S best(0);
    for (int p = a; p <= b; ++p)
        for (int k = 1; k <= b - p + 1; ++k) {
            if (!family_start_ok<S>(k, idx[p], adm)) continue;
            for (int e = p; e <= b; ++e) {
                if (tab[p][e] == none) continue;
                const S& rest = h[e - a + 1][k - 1];
                if (rest == none) continue;
                S cand = tab[p][e] + rest;
                if (cand > best) best = cand;
            }
        }
    return best;
}

template <class S>
void check_support(const fin_supp<S>& x, int cap, const char* who) {
    if (x.support_size() > cap)
        throw std::invalid_argument(std::string(who) + ": support exceeds " + std::to_string(cap));
}

template <class S>
std::pair<std::vector<int>, std::vector<S>> split_support(const fin_supp<S>& x) {
    std::vector<int> idx;
    std::vector<S> val;
    idx.reserve(x.c.size());
    val.reserve(x.c.size());
    for (const auto& [i, v] : x.c) {
        idx.push_back(i);
        val.push_back(abs_val(v));
    }
    return {std::move(idx), std::move(val)};
}

// Limit norms of every support interval, by increasing length.
template <class S>
std::vector<std::vector<S>> tstar_interval_table(const std::vector<int>& idx,
                                                 const std::vector<S>& val, admissibility adm) {
    const int s = int(idx.size());
    const S none(-1), half = S(1) / S(2);
    std::vector<std::vector<S>> tab(s, std::vector<S>(s, none));
    for (int len = 1; len <= s; ++len)
        for (int a = 0; a + len - 1 < s; ++a) {
            int b = a + len - 1;
            S sup(0);
            for (int t = a; t <= b; ++t) sup = std::max(sup, val[t]);
            S fam = family_max(idx, tab, a, b, adm); // tab[a][b] is still `none`: the
                                                     // lone full-interval family is skipped
            tab[a][b] = std::max(sup, S(half * fam));
        }
    return tab;
}

} // namespace detail

template <class S>
S tstar_norm(const fin_supp<S>& x, admissibility adm = admissibility::nonstrict) {
    detail::check_support(x, 24, "tstar_norm");
    if (x.empty()) return S(0);
    auto [idx, val] = detail::split_support(x);
    auto tab = detail::tstar_interval_table(idx, val, adm);
    return tab[0][idx.size() - 1];
}

// Level-m norm: m rounds of the refinement starting from the sup norm.
template <class S>
S tstar_level(const fin_supp<S>& x, int m, admissibility adm = admissibility::nonstrict) {
    detail::check_support(x, 24, "tstar_level");
    if (m < 0) throw std::invalid_argument("tstar_level: negative level");
    if (x.empty()) return S(0);
    auto [idx, val] = detail::split_support(x);
    const int s = int(idx.size());
    const S half = S(1) / S(2);
    std::vector<std::vector<S>> prev(s, std::vector<S>(s));
    for (int a = 0; a < s; ++a) {
        S sup(0);
        for (int b = a; b < s; ++b) {
            sup = std::max(sup, val[b]);
            prev[a][b] = sup;
        }
    }
    for (int round = 0; round < m; ++round) {
        auto cur = prev;
        for (int a = 0; a < s; ++a)
            for (int b = a; b < s; ++b) {
                S fam = detail::family_max(idx, prev, a, b, adm);
                cur[a][b] = std::max(prev[a][b], S(half * fam));
            }
        if (cur == prev) break; // stabilized; further rounds are identical
        prev = std::move(cur);
    }
    return prev[0][s - 1];
}

namespace detail {

// p-th powers of |coefficients| in the exact lane when possible.
template <class S>
std::optional<fin_supp<rational>> powered_exact(const fin_supp<S>& x, double p) {
    if constexpr (!is_exact_scalar<S>) {
        return std::nullopt;
    } else {
        if (!is_integer(p) || p < 1) return std::nullopt;
        std::vector<std::pair<int, rational>> c;
        c.reserve(x.c.size());
        for (const auto& [i, v] : x.c) c.emplace_back(i, pow_abs(v, long(p)));
        return fin_supp<rational>(std::move(c));
    }
}

template <class S>
fin_supp<double> powered_double(const fin_supp<S>& x, double p) {
    std::vector<std::pair<int, double>> c;
    c.reserve(x.c.size());
    for (const auto& [i, v] : x.c) c.emplace_back(i, std::pow(std::fabs(to_double(v)), p));
    return fin_supp<double>(std::move(c));
}

} // namespace detail

// p-convexified norm, p >= 1. Exact-lane arithmetic is used for integer p
// with rational input; the final p-th root leaves the exact lane.
template <class S>
double tp_norm(const fin_supp<S>& x, double p, admissibility adm = admissibility::nonstrict) {
    if (p < 1) throw std::invalid_argument("tp_norm: p must be >= 1");
    if (x.empty()) return 0.0;
    if (p == 1 && is_exact_scalar<S>) {
        if (auto px = detail::powered_exact(x, 1)) return to_double(tstar_norm(*px, adm));
    }
    if (auto px = detail::powered_exact(x, p))
        return std::pow(to_double(tstar_norm(*px, adm)), 1.0 / p);
    return std::pow(tstar_norm(detail::powered_double(x, p), adm), 1.0 / p);
}

// Residual of the fixed-point identity, measured on p-th powers so that the
// rational lane can state exact zero: | ||x||^p - max(sup^p, fam/2) |.
// The family maximum re-derives the top level from independently tabulated
// block values, including the full block.
inline rational fixed_point_residual_exact(const fin_supp<rational>& x, long p = 1,
                                           admissibility adm = admissibility::nonstrict) {
    detail::check_support(x, 20, "fixed_point_residual");
    if (x.empty()) return rational(0);
    if (p < 1) throw std::invalid_argument("fixed_point_residual: p must be >= 1");
    auto px = detail::powered_exact(x, double(p));
    auto [idx, val] = detail::split_support(*px);
    auto tab = detail::tstar_interval_table(idx, val, adm);
    const int s = int(idx.size());
    rational lhs_p = tab[0][s - 1];
    rational sup_p(0);
    for (const auto& v : val) sup_p = std::max(sup_p, v);
    auto full = tab;
    rational fam = detail::family_max(idx, full, 0, s - 1, adm); // full block now available
    rational rhs_p = std::max(sup_p, rational(fam / 2));
    return abs_val(rational(lhs_p - rhs_p));
}

template <class S>
double fixed_point_residual(const fin_supp<S>& x, double p,
                            admissibility adm = admissibility::nonstrict) {
    detail::check_support(x, 20, "fixed_point_residual");
    if (x.empty()) return 0.0;
    if (p < 1) throw std::invalid_argument("fixed_point_residual: p must be >= 1");
    if (auto px = detail::powered_exact(x, p)) {
        auto [idx, val] = detail::split_support(*px);
        auto tab = detail::tstar_interval_table(idx, val, adm);
        const int s = int(idx.size());
        rational lhs_p = tab[0][s - 1];
        rational sup_p(0);
        for (const auto& v : val) sup_p = std::max(sup_p, v);
        rational fam = detail::family_max(idx, tab, 0, s - 1, adm);
        double lhs = std::pow(to_double(lhs_p), 1.0 / p);
        double rhs = std::max(std::pow(to_double(sup_p), 1.0 / p),
                              std::pow(to_double(fam) / 2.0, 1.0 / p));
        return std::fabs(lhs - rhs);
    }
    auto px = detail::powered_double(x, p);
    auto [idx, val] = detail::split_support(px);
    auto tab = detail::tstar_interval_table(idx, val, adm);
    const int s = int(idx.size());
    double lhs = std::pow(tab[0][s - 1], 1.0 / p);
    double sup = 0;
    for (double v : val) sup = std::max(sup, v);
    double fam = detail::family_max(idx, tab, 0, s - 1, adm);
    double rhs = std::max(std::pow(sup, 1.0 / p), std::pow(fam / 2.0, 1.0 / p));
    return std::fabs(lhs - rhs);
}

// ---- polyhedral structure of the p = 1 truncation ----------------------
//
// On indices 1..dim the norm is the max of finitely many functionals
// x -> <w, |x|>; each weight vector w comes from an admissible partition
// tree (leaves weighted 2^-depth). These drive exact dual norms, vertex
// enumeration and certified upper bounds elsewhere.

namespace detail {

inline void weight_vectors_rec(int lo, int hi, int dim, const rational& scale,
                               std::vector<rational>& acc,
                               std::vector<std::vector<rational>>& out, admissibility adm,
                               std::size_t cap) {
    // singleton leaf covering one index of [lo..hi]
    for (int i = lo; i <= hi; ++i) {
        if (out.size() >= cap) return;
        auto w = acc;
        w[i - 1] += scale;
        out.push_back(std::move(w));
    }
    // split into an admissible family of subintervals, each refined recursively;
    // enumerating only full interval partitions of a chosen subrange suffices
    // because weights are monotone under block enlargement
    for (int start = lo; start <= hi; ++start) {
        int kmax = adm == admissibility::nonstrict ? start : start - 1;
        kmax = std::min(kmax, hi - start + 1);
        for (int k = 2; k <= kmax; ++k) {
            // all ways to cut [start..hi] into k consecutive intervals
            std::vector<int> cuts(k - 1);
            auto rec = [&](auto&& self, int at, int prev_end) -> void {
                if (out.size() >= cap) return;
                if (at == k - 1) {
                    std::vector<std::pair<int, int>> blocks;
                    int b = start;
                    for (int j = 0; j < k - 1; ++j) {
                        blocks.emplace_back(b, cuts[j]);
                        b = cuts[j] + 1;
                    }
                    blocks.emplace_back(b, hi);
                    // expand the first block fully, then the rest, sharing acc
                    std::vector<std::vector<rational>> partial{acc};
                    for (auto [blo, bhi] : blocks) {
                        std::vector<std::vector<rational>> next;
                        for (const auto& base : partial) {
                            std::vector<std::vector<rational>> sub;
                            auto tmp = base;
                            weight_vectors_rec(blo, bhi, dim, scale / 2, tmp, sub, adm, cap);
                            for (auto& s : sub) next.push_back(std::move(s));
                            if (next.size() > cap) break;
                        }
                        partial = std::move(next);
                        if (partial.size() > cap) break;
                    }
                    for (auto& w : partial)
                        if (out.size() < cap) out.push_back(std::move(w));
                    return;
                }
                // after cut `at` there remain k-2-at cuts and the final block
                for (int e = prev_end + 1; e <= hi - (k - 1 - at); ++e) {
                    cuts[at] = e;
                    self(self, at + 1, e);
                }
            };
            rec(rec, 0, start - 1);
        }
    }
}

} // namespace detail

// Norming functionals of the p = 1 truncated norm on dimensions 1..dim
// (absolute values implied; apply sign patterns for the full dual ball).
// Duplicates and dominated vectors are pruned.
inline std::vector<std::vector<rational>> tstar_weight_vectors(
    int dim, admissibility adm = admissibility::nonstrict, std::size_t cap = 200000) {
    if (dim < 1 || dim > 10)
        throw std::invalid_argument("tstar_weight_vectors: dim must be in [1, 10]");
    std::vector<std::vector<rational>> out;
    std::vector<rational> acc(dim, rational(0));
    detail::weight_vectors_rec(1, dim, dim, rational(1), acc, out, adm, cap);
    if (out.size() >= cap) throw std::runtime_error("tstar_weight_vectors: cap exceeded");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // prune w dominated coordinatewise by some other w'
    std::vector<std::vector<rational>> kept;
    for (const auto& w : out) {
        bool dominated = false;
        for (const auto& v : out) {
            if (&v == &w || v == w) continue;
            bool ge = true, strict = false;
            for (int i = 0; i < dim; ++i) {
                if (v[i] < w[i]) { ge = false; break; }
                if (v[i] > w[i]) strict = true;
            }
            if (ge && strict) { dominated = true; break; }
        }
        if (!dominated) kept.push_back(w);
    }
    return kept;
}

namespace detail {

// Vertices of {x >= 0 : Wx <= 1} for a row list W >= 0, by exact rational
// enumeration of basic feasible points (tiny dimensions only).
inline std::vector<std::vector<rational>> positive_polytope_vertices(
    const std::vector<std::vector<rational>>& rows, int dim) {
    std::vector<std::vector<rational>> cons = rows; // <w, x> <= 1
    // plus coordinate planes x_i >= 0 handled as equality choices below
    std::vector<std::vector<rational>> verts;
    const int m = int(cons.size());
    // choose which coordinates are zero (set Z) and which constraints are tight
    for (int zmask = 0; zmask < (1 << dim); ++zmask) {
        int free_dim = dim - __builtin_popcount(unsigned(zmask));
        if (free_dim == 0) continue;
        // pick free_dim tight rows among cons
        std::vector<int> pick(free_dim);
        auto rec = [&](auto&& self, int at, int from) -> void {
            if (at == free_dim) {
                // solve the square system on free coordinates
                matrix<rational> A(free_dim, free_dim);
                std::vector<rational> rhs(free_dim, rational(1));
                std::vector<int> freev;
                for (int i = 0; i < dim; ++i)
                    if (!(zmask & (1 << i))) freev.push_back(i);
                for (int r = 0; r < free_dim; ++r)
                    for (int c = 0; c < free_dim; ++c) A(r, c) = cons[pick[r]][freev[c]];
                // gaussian elimination
                matrix<rational> M = A;
                std::vector<rational> b = rhs;
                bool singular = false;
                for (int c2 = 0; c2 < free_dim && !singular; ++c2) {
                    int piv = -1;
                    for (int r2 = c2; r2 < free_dim; ++r2)
                        if (M(r2, c2) != 0) { piv = r2; break; }
                    if (piv < 0) { singular = true; break; }
                    if (piv != c2) {
                        for (int cc = 0; cc < free_dim; ++cc) std::swap(M(piv, cc), M(c2, cc));
                        std::swap(b[piv], b[c2]);
                    }
                    for (int r2 = 0; r2 < free_dim; ++r2) {
                        if (r2 == c2 || M(r2, c2) == 0) continue;
                        rational f = M(r2, c2) / M(c2, c2);
                        for (int cc = c2; cc < free_dim; ++cc) M(r2, cc) -= f * M(c2, cc);
                        b[r2] -= f * b[c2];
                    }
                }
                if (!singular) {
                    std::vector<rational> x(dim, rational(0));
                    bool ok = true;
                    for (int i2 = 0; i2 < free_dim; ++i2) {
                        rational xi = b[i2] / M(i2, i2);
                        if (xi < 0) { ok = false; break; }
                        x[freev[i2]] = xi;
                    }
                    if (ok) {
                        for (const auto& w : cons) {
                            rational dot(0);
                            for (int i2 = 0; i2 < dim; ++i2) dot += w[i2] * x[i2];
                            if (dot > 1) { ok = false; break; }
                        }
                    }
                    if (ok) verts.push_back(std::move(x));
                }
                return;
            }
            for (int r = from; r < m; ++r) {
                pick[at] = r;
                self(self, at + 1, r + 1);
            }
        };
        rec(rec, 0, 0);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    return verts;
}

} // namespace detail

// Vertices of the unit ball of the p = 1 truncation on dimensions 1..dim,
// exact, with all sign reflections applied.
inline std::vector<std::vector<rational>> tstar_ball_vertices(
    int dim, admissibility adm = admissibility::nonstrict) {
    if (dim < 1 || dim > 5)
        throw std::invalid_argument("tstar_ball_vertices: dim must be in [1, 5]");
    auto w = tstar_weight_vectors(dim, adm);
    auto pos = detail::positive_polytope_vertices(w, dim);
    // keep extreme points only: drop points that are convex combinations is
    // unnecessary for sup-of-linear use; reflect signs and dedupe
    std::vector<std::vector<rational>> all;
    for (const auto& v : pos)
        for (int mask = 0; mask < (1 << dim); ++mask) {
            auto x = v;
            bool skip = false;
            for (int i = 0; i < dim; ++i) {
                if (mask & (1 << i)) {
                    if (x[i] == 0) { skip = true; break; } // sign of zero: duplicate
                    x[i] = -x[i];
                }
            }
            if (!skip) all.push_back(std::move(x));
        }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

// ---- probes -------------------------------------------------------------

template <class S>
struct block_probe_result {
    double ratio = 0;
    bool admissible_layout = false;
    bool lower_ok = false;        // ratio >= 2^(-1/p) - tol; suppressed when layout inadmissible
    bool upper_checked = false;   // p == 1 only
    bool upper_ok = false;
    std::string note;
};

// Ratio ||sum c_j y_j|| / ||c||_p for disjoint ordered blocks y_j
// (normalized internally). Inadmissible layouts are reported, and the lower
// assertion is suppressed for them.
template <class S>
block_probe_result<S> block_lp_probe(std::vector<fin_supp<S>> blocks, const std::vector<S>& coeff,
                                     double p, admissibility adm = admissibility::nonstrict,
                                     double tol = 1e-9) {
    if (blocks.empty() || blocks.size() != coeff.size())
        throw std::invalid_argument("block_lp_probe: need matching nonempty blocks/coefficients");
    block_probe_result<S> res;
    int prev_max = 0;
    bool ordered = true;
    for (const auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("block_lp_probe: empty block");
        if (b.c.front().first <= prev_max) ordered = false;
        prev_max = b.c.back().first;
    }
    if (!ordered) throw std::invalid_argument("block_lp_probe: blocks must be disjoint and ordered");
    int k = int(blocks.size());
    int first = blocks.front().c.front().first;
    res.admissible_layout = detail::family_start_ok<S>(k, first, adm);
    if (!res.admissible_layout)
        res.note = "block layout not admissible; lower assertion suppressed";

    std::vector<std::pair<int, double>> merged;
    double cp = 0;
    for (int j = 0; j < k; ++j) {
        double nj = tp_norm(blocks[j], p, adm);
        if (nj <= 0) throw std::invalid_argument("block_lp_probe: zero block");
        double cj = to_double(coeff[j]);
        for (const auto& [i, v] : blocks[j].c) merged.emplace_back(i, cj * to_double(v) / nj);
        cp = std::isinf(p) ? std::max(cp, std::fabs(cj)) : cp + std::pow(std::fabs(cj), p);
    }
    double cnorm = std::isinf(p) ? cp : std::pow(cp, 1.0 / p);
    if (cnorm == 0) throw std::invalid_argument("block_lp_probe: zero coefficient vector");
    double num = tp_norm(fin_supp<double>(std::move(merged)), p, adm);
    res.ratio = num / cnorm;
    double floor_val = std::pow(2.0, -1.0 / p);
    res.lower_ok = !res.admissible_layout || res.ratio >= floor_val - tol;
    if (p == 1) {
        res.upper_checked = true;
        res.upper_ok = res.ratio <= 1 + tol;
    }
    return res;
}

struct embedding_probe_result {
    double distortion_upper = 0;
    bool certified = false; // exact evaluation of the final candidate (p in {1, 2})
    matrix<double> map;     // K x n
    std::string note;
};

namespace detail {

inline double lp_norm_of(std::span<const double> v, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    }
    double s = 0;
    for (double x : v) s += std::pow(std::fabs(x), p);
    return std::pow(s, 1.0 / p);
}

inline double tstar_norm_dense(std::span<const double> x, admissibility adm) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0) c.emplace_back(int(i) + 1, x[i]);
    return tstar_norm(fin_supp<double>(std::move(c)), adm);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    state = mix_seed(state, 0x2545f4914f6cdd1dULL);
    return double(state >> 11) * 0x1p-53;
}

inline double gaussian(std::uint64_t& state) {
    double u1 = std::max(uniform01(state), 1e-300), u2 = uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Vertices of {x : <row, x> <= 1 for all rows}, general signs, by exact
// enumeration of row d-subsets. Tiny dimensions only.
inline std::vector<std::vector<rational>> polytope_vertices(
    const std::vector<std::vector<rational>>& rows, int dim, std::size_t pair_cap = 400000) {
    const int m = int(rows.size());
    if (dim > 4) throw std::invalid_argument("polytope_vertices: dim too large");
    std::vector<std::vector<rational>> verts;
    std::vector<int> pick(dim);
    std::size_t visited = 0;
    auto rec = [&](auto&& self, int at, int from) -> void {
        if (at == dim) {
            if (++visited > pair_cap) throw std::runtime_error("polytope_vertices: cap exceeded");
            matrix<rational> M(dim, dim);
            std::vector<rational> b(dim, rational(1));
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) M(r, c) = rows[pick[r]][c];
            for (int c = 0; c < dim; ++c) {
                int piv = -1;
                for (int r = c; r < dim; ++r)
                    if (M(r, c) != 0) { piv = r; break; }
                if (piv < 0) return;
                if (piv != c) {
                    for (int cc = 0; cc < dim; ++cc) std::swap(M(piv, cc), M(c, cc));
                    std::swap(b[piv], b[c]);
                }
                for (int r = 0; r < dim; ++r) {
                    if (r == c || M(r, c) == 0) continue;
                    rational f = M(r, c) / M(c, c);
                    for (int cc = c; cc < dim; ++cc) M(r, cc) -= f * M(c, cc);
                    b[r] -= f * b[c];
                }
            }
            std::vector<rational> x(dim);
            for (int i = 0; i < dim; ++i) x[i] = b[i] / M(i, i);
            for (const auto& row : rows) {
                rational dot(0);
                for (int i = 0; i < dim; ++i) dot += row[i] * x[i];
                if (dot > 1) return;
            }
            verts.push_back(std::move(x));
            return;
        }
        for (int r = from; r < m; ++r) {
            pick[at] = r;
            self(self, at + 1, r + 1);
        }
    };
    rec(rec, 0, 0);
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    return verts;
}

inline rational rational_of(double x) {
    // every finite double is an exact rational
    if (!std::isfinite(x)) throw std::invalid_argument("rational_of: non-finite");
    int exp = 0;
    double m = std::frexp(x, &exp);
    rational r(std::int64_t(std::ldexp(m, 53)));
    exp -= 53;
    for (int k = 0; k < exp; ++k) r *= 2;
    for (int k = 0; k > exp; --k) r /= 2;
    return r;
}

// Inverse of a small dense matrix by Gauss-Jordan, nullopt when singular
// beyond tolerance.
inline std::optional<matrix<double>> invert_small(const matrix<double>& G) {
    const int d = G.rows();
    if (G.cols() != d) return std::nullopt;
    matrix<double> M = G, inv = matrix<double>::identity(d);
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(M(r, c)) > std::abs(M(piv, c))) piv = r;
        if (std::abs(M(piv, c)) < 1e-12) return std::nullopt;
        if (piv != c)
            for (int cc = 0; cc < d; ++cc) {
                std::swap(M(piv, cc), M(c, cc));
                std::swap(inv(piv, cc), inv(c, cc));
            }
        double f = M(c, c);
        for (int cc = 0; cc < d; ++cc) M(c, cc) /= f, inv(c, cc) /= f;
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            double g = M(r, c);
            if (g == 0) continue;
            for (int cc = 0; cc < d; ++cc) {
                M(r, cc) -= g * M(c, cc);
                inv(r, cc) -= g * inv(c, cc);
            }
        }
    }
    return inv;
}

} // namespace detail

// Seeded input generator for block_lp_probe: k disjoint ordered blocks with
// an admissible layout (first index clears the branching threshold for k) and
// a coefficient vector bounded away from zero. Same seed, same probe.
inline std::pair<std::vector<fin_supp<double>>, std::vector<double>> random_disjoint_blocks(
    std::uint64_t seed, int max_blocks = 4, admissibility adm = admissibility::nonstrict) {
    if (max_blocks < 1 || max_blocks > 8)
        throw std::invalid_argument("random_disjoint_blocks: max_blocks outside 1..8");
    std::uint64_t st = detail::mix_seed(seed, 47);
    const int k = 1 + int(detail::uniform01(st) * max_blocks) % max_blocks;
    int next = k + (adm == admissibility::strict ? 1 : 0) +
               int(detail::uniform01(st) * 3);
    std::vector<fin_supp<double>> blocks;
    for (int j = 0; j < k; ++j) {
        const int len = 1 + int(detail::uniform01(st) * 3) % 3;
        std::vector<std::pair<int, double>> c;
        for (int t = 0; t < len; ++t) {
            double v = detail::gaussian(st);
            if (std::fabs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
            c.emplace_back(next++, v);
        }
        next += int(detail::uniform01(st) * 2);
        blocks.emplace_back(std::move(c));
    }
    std::vector<double> coeff(std::size_t(k), 0.0);
    for (auto& v : coeff) v = detail::gaussian(st);
    double cmax = 0;
    for (double v : coeff) cmax = std::max(cmax, std::fabs(v));
    if (cmax < 0.1) coeff[0] += 1;
    return {std::move(blocks), std::move(coeff)};
}

// Searches K x n maps from the span of t_1..t_n into l_p^K for small
// distortion. The returned value upper-bounds the distortion of the map
// found; for p in {1, 2} (small K resp. any K) the final candidate is
// evaluated exactly rather than via samples. Upper bounds cannot certify
// divergence.
inline embedding_probe_result co_condition2_probe(int n, int K, double p, int budget,
                                                  std::uint64_t seed,
                                                  admissibility adm = admissibility::nonstrict) {
    if (n < 1 || n > 6) throw std::invalid_argument("co_condition2_probe: n must be in [1, 6]");
    if (K < n || K > 24) throw std::invalid_argument("co_condition2_probe: K must be in [n, 24]");
    if (p < 1) throw std::invalid_argument("co_condition2_probe: p must be >= 1");
    if (budget < 1) budget = 1;

    // sample vectors: basis, prefix sums, random sign/sparse combinations
    std::vector<std::vector<double>> samples;
    for (int i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1;
        samples.push_back(e);
    }
    for (int i = 1; i < n; ++i) {
        std::vector<double> s(n, 0.0);
        for (int j = 0; j <= i; ++j) s[j] = 1;
        samples.push_back(s);
    }
    std::uint64_t st = detail::mix_seed(seed, 17);
    for (int r = 0; r < 40; ++r) {
        std::vector<double> v(n);
        for (auto& x : v) x = detail::gaussian(st);
        samples.push_back(v);
    }

    auto sampled_distortion = [&](const matrix<double>& A) {
        double up = 0, down = 1e300;
        for (const auto& v : samples) {
            double tn = detail::tstar_norm_dense(v, adm);
            if (tn < 1e-14) continue;
            std::vector<double> av = A.apply(std::span<const double>(v));
            double ln = detail::lp_norm_of(av, p);
            if (ln < 1e-300) return 1e300;
            up = std::max(up, ln / tn);
            down = std::min(down, ln / tn);
        }
        return up / down;
    };

    std::vector<matrix<double>> candidates;
    {
        matrix<double> id(K, n);
        for (int i = 0; i < n; ++i) id(i, i) = 1;
        candidates.push_back(id);
        if (n == 2 && K >= 2) {
            matrix<double> h(K, 2);
            h(0, 0) = 0.5, h(0, 1) = 0.5, h(1, 0) = 0.5, h(1, 1) = -0.5;
            candidates.push_back(h);
        }
        std::uint64_t cs = detail::mix_seed(seed, 23);
        for (int r = 0; r < budget; ++r) {
            matrix<double> g(K, n);
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = detail::gaussian(cs);
            candidates.push_back(g);
        }
    }
    matrix<double> best;
    double best_d = 1e300;
    for (const auto& A : candidates) {
        double d = sampled_distortion(A);
        if (d < best_d) best_d = d, best = A;
    }
    // local refinement
    std::uint64_t rs = detail::mix_seed(seed, 31);
    double step = 0.3;
    for (int it = 0; it < budget; ++it) {
        matrix<double> cand = best;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < n; ++j) cand(i, j) += step * detail::gaussian(rs);
        double d = sampled_distortion(cand);
        if (d < best_d)
            best_d = d, best = cand;
        else
            step = std::max(step * 0.7, 1e-4);
    }

    embedding_probe_result res;
    res.map = best;

    // exact evaluation of the found map where feasible
    if (p == 1 && n <= 4 && K <= 8) {
        matrix<rational> A(K, n);
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = detail::rational_of(best(i, j));
        auto tverts = tstar_ball_vertices(n, adm);
        rational maxr(0);
        for (const auto& v : tverts) {
            auto av = A.apply(std::span<const rational>(v));
            rational l1(0);
            for (const auto& x : av) l1 += abs_val(x);
            maxr = std::max(maxr, l1);
        }
        std::vector<std::vector<rational>> rows;
        for (int mask = 0; mask < (1 << K); ++mask) {
            std::vector<rational> row(n, rational(0));
            for (int r = 0; r < K; ++r) {
                rational s = (mask & (1 << r)) ? rational(-1) : rational(1);
                for (int c = 0; c < n; ++c) row[c] += s * A(r, c);
            }
            rows.push_back(std::move(row));
        }
        auto pverts = detail::polytope_vertices(rows, n);
        if (!pverts.empty() && maxr > 0) {
            rational maxt(0);
            for (const auto& v : pverts) {
                std::vector<std::pair<int, rational>> c;
                for (int i = 0; i < n; ++i)
                    if (v[i] != 0) c.emplace_back(i + 1, v[i]);
                maxt = std::max(maxt, tstar_norm(fin_supp<rational>(std::move(c)), adm));
            }
            res.distortion_upper = to_double(rational(maxr * maxt));
            res.certified = true;
            res.note = "certified by exact vertex evaluation";
            return res;
        }
    }
    if (p == 2) {
        // max ratio over exact T* vertices; min ratio via support function of
        // the preimage ellipsoid against the norming functionals
        if (n <= 4) {
            auto tverts = tstar_ball_vertices(n, adm);
            double maxr = 0;
            for (const auto& v : tverts) {
                auto vd = widened(v);
                auto av = best.apply(std::span<const double>(vd));
                maxr = std::max(maxr, detail::lp_norm_of(av, 2.0));
            }
            matrix<double> G(n, n); // A^T A
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0;
                    for (int r = 0; r < K; ++r) s += best(r, i) * best(r, j);
                    G(i, j) = s;
                }
            auto Ginv = detail::invert_small(G);
            if (Ginv) {
                double maxt = 0;
                for (const auto& w : tstar_weight_vectors(n, adm)) {
                    std::vector<int> supp;
                    for (int i = 0; i < n; ++i)
                        if (w[i] != 0) supp.push_back(i);
                    for (int mask = 0; mask < (1 << int(supp.size())); ++mask) {
                        std::vector<double> ws(n, 0.0);
                        for (std::size_t t = 0; t < supp.size(); ++t)
                            ws[supp[t]] = ((mask >> t) & 1 ? -1 : 1) * to_double(w[supp[t]]);
                        double q = 0;
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j) q += ws[i] * (*Ginv)(i, j) * ws[j];
                        maxt = std::max(maxt, std::sqrt(std::max(q, 0.0)));
                    }
                }
                res.distortion_upper = maxr * maxt;
                res.certified = true;
                res.note = "certified by vertex/support-function evaluation";
                return res;
            }
        }
    }
    res.distortion_upper = best_d;
    res.certified = false;
    res.note = "sampled estimate only";
    return res;
}

} // namespace banlab
