#pragma once

// Linear maps between spaces and their operator norms. Norms are resolved by
// an oracle chain of exact routes (closed forms, column recursion over l_1
// structure, vertex enumeration, adjoint retry); when none applies, a seeded
// multi-start ascent provides the lower bound and a battery of coordinate
// inequalities provides the certified upper bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "banlab/matrix.hpp"
#include "banlab/rational.hpp"
#include "banlab/space.hpp"

namespace banlab {

template <class S>
struct linear_map {
    matrix<S> mat; // codomain-dim x domain-dim
    space domain, codomain;

    linear_map() = default;
    linear_map(matrix<S> m, space dom, space cod)
        : mat(std::move(m)), domain(std::move(dom)), codomain(std::move(cod)) {
        if (mat.rows() != codomain.dim() || mat.cols() != domain.dim())
            throw std::invalid_argument("linear_map: matrix shape does not match spaces");
    }

    std::vector<S> apply(std::span<const S> v) const { return mat.apply(v); }
    std::vector<S> apply(const std::vector<S>& v) const {
        return mat.apply(std::span<const S>(v));
    }
    std::vector<S> column(int j) const { return mat.col(j); }
};

template <class S>
linear_map<S> identity_map(const space& sp) {
    return linear_map<S>(matrix<S>::identity(sp.dim()), sp, sp);
}

template <class S>
linear_map<S> compose(const linear_map<S>& A, const linear_map<S>& B) {
    if (!(A.domain == B.codomain))
        throw std::invalid_argument("compose: inner spaces do not match");
    return linear_map<S>(A.mat * B.mat, B.domain, A.codomain);
}

template <class S>
linear_map<S> map_sum(const linear_map<S>& A, const linear_map<S>& B) {
    if (!(A.domain == B.domain) || !(A.codomain == B.codomain))
        throw std::invalid_argument("map_sum: endpoint mismatch");
    matrix<S> m = A.mat;
    m += B.mat;
    return linear_map<S>(std::move(m), A.domain, A.codomain);
}

template <class S>
linear_map<S> scaled(const linear_map<S>& A, const S& c) {
    matrix<S> m = A.mat;
    m *= c;
    return linear_map<S>(std::move(m), A.domain, A.codomain);
}

template <class S>
linear_map<S> adjoint(const linear_map<S>& T) {
    return linear_map<S>(T.mat.transposed(), space::dual_of(T.codomain),
                         space::dual_of(T.domain));
}

inline linear_map<double> widened(const linear_map<rational>& T) {
    return linear_map<double>(widened(T.mat), T.domain, T.codomain);
}

// Coordinate embedding and projection for the k-th block of an e-sum
// (0-based). P_k composed with iota_k is the identity of the block.
template <class S>
std::pair<linear_map<S>, linear_map<S>> block_maps(const space& E, int k) {
    if (E.kind() != space_kind::esum) throw std::invalid_argument("block_maps: not an e-sum");
    auto inners = E.inners();
    if (k < 0 || k >= int(inners.size()))
        throw std::invalid_argument("block_maps: block index out of range");
    int offset = 0;
    for (int j = 0; j < k; ++j) offset += inners[j].dim();
    const int bd = inners[k].dim();
    matrix<S> emb(E.dim(), bd), prj(bd, E.dim());
    for (int i = 0; i < bd; ++i) {
        emb(offset + i, i) = S(1);
        prj(i, offset + i) = S(1);
    }
    return {linear_map<S>(std::move(emb), inners[k], E),
            linear_map<S>(std::move(prj), E, inners[k])};
}

// A acts between outer coordinates, U inside every block; the result acts on
// the e-sums built from copies of U's endpoints.
template <class S>
linear_map<S> kron(const linear_map<S>& A, const linear_map<S>& U) {
    const int m = A.domain.dim(), n = A.codomain.dim();
    if (!A.domain.is_unconditional() || !A.codomain.is_unconditional())
        throw std::invalid_argument("kron: outer spaces must be 1-unconditional");
    const int dU = U.domain.dim(), cU = U.codomain.dim();
    space dom = space::esum(A.domain, std::vector<space>(std::size_t(m), U.domain));
    space cod = space::esum(A.codomain, std::vector<space>(std::size_t(n), U.codomain));
    matrix<S> K(n * cU, m * dU);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (A.mat(i, j) == S(0)) continue;
            for (int a = 0; a < cU; ++a)
                for (int b = 0; b < dU; ++b) K(i * cU + a, j * dU + b) = S(A.mat(i, j) * U.mat(a, b));
        }
    return linear_map<S>(std::move(K), std::move(dom), std::move(cod));
}

enum class opnorm_mode { exact, search };

struct op_norm_result {
    bound b;
    std::vector<double> witness; // domain vector attaining b.lo, empty when unavailable
    std::string method;
};

namespace detail {

// true when space::norm<double> returns a formula value rather than a search
// estimate
inline bool norm_exact_double(const space& sp) {
    switch (sp.kind()) {
        case space_kind::lp:
        case space_kind::tsirelson_trunc:
        case space_kind::custom: return true; // custom oracle defines its norm
        case space_kind::esum: {
            if (!norm_exact_double(sp.outer())) return false;
            for (const auto& in : sp.inners())
                if (!norm_exact_double(in)) return false;
            return true;
        }
        case space_kind::dual_space: return sp.predual().is_polyhedral();
    }
    return false;
}

// closed form for a monomial matrix between plain l_p spaces:
// the norm of diag(d) from l_p to l_q is the l_r norm of d, 1/r = 1/q - 1/p
// (r = inf when p <= q); permutations and signs do not change it
template <class S>
std::optional<std::pair<S, std::vector<S>>> monomial_lp_norm(const linear_map<S>& T) {
    if (T.domain.kind() != space_kind::lp || T.codomain.kind() != space_kind::lp)
        return std::nullopt;
    if (!is_monomial(T.mat)) return std::nullopt;
    const double p = T.domain.p(), q = T.codomain.p();
    struct ent {
        int row, col;
        S val;
    };
    std::vector<ent> es;
    for (int i = 0; i < T.mat.rows(); ++i)
        for (int j = 0; j < T.mat.cols(); ++j)
            if (T.mat(i, j) != S(0)) es.push_back({i, j, abs_val(T.mat(i, j))});
    if (es.empty()) return std::pair<S, std::vector<S>>{S(0), basis_vector<S>(T.domain, 0)};
    const bool sup_case = std::isinf(q) || p <= q;
    if (sup_case) {
        const ent* best = &es[0];
        for (const auto& e : es)
            if (e.val > best->val) best = &e;
        return std::pair<S, std::vector<S>>{best->val, basis_vector<S>(T.domain, best->col)};
    }
    if (es.size() == 1)
        return std::pair<S, std::vector<S>>{es[0].val, basis_vector<S>(T.domain, es[0].col)};
    if constexpr (is_exact_scalar<S>) {
        if (std::isinf(p) && q == 1) { // interpolation exponent r = 1: plain sum
            S s(0);
            std::vector<S> w(T.domain.dim(), S(0));
            for (const auto& e : es) {
                s += e.val;
                w[e.col] = T.mat(e.row, e.col) > S(0) ? S(1) : S(-1);
            }
            return std::pair<S, std::vector<S>>{s, std::move(w)};
        }
        throw exactness_error("monomial norm with finite interpolation exponent is irrational");
    } else {
        double r = std::isinf(p) ? q : 1.0 / (1.0 / q - 1.0 / p);
        double s = 0;
        for (const auto& e : es) s += std::pow(e.val, r);
        double v = std::pow(s, 1.0 / r);
        // extremal vector spreads mass as |d_i|^{r/p} over the support
        std::vector<S> w(T.domain.dim(), S(0));
        for (const auto& e : es)
            w[e.col] = std::isinf(p) ? 1.0 : std::pow(e.val / v, r / p);
        return std::pair<S, std::vector<S>>{v, std::move(w)};
    }
}

template <class S>
linear_map<S> restrict_domain(const linear_map<S>& T, const space& block, int offset) {
    matrix<S> m(T.mat.rows(), block.dim());
    for (int i = 0; i < T.mat.rows(); ++i)
        for (int j = 0; j < block.dim(); ++j) m(i, j) = T.mat(i, offset + j);
    return linear_map<S>(std::move(m), block, T.codomain);
}

template <class S>
std::optional<std::pair<S, std::vector<S>>> opnorm_exact_core(const linear_map<S>& T,
                                                              bool allow_adjoint);

// Unit-ball maximizer of the functional u, where the maximum has a closed
// form: coordinate picks for l_1, signs for l_inf, the power formula for
// smooth l_p (double lane only), a vertex scan for polyhedral balls. Empty
// when no closed form applies; never an estimate.
template <class S>
std::vector<S> norming_vector(const space& sp, const std::vector<S>& u) {
    const int n = sp.dim();
    if (int(u.size()) != n) return {};
    bool all_zero = true;
    for (const auto& t : u)
        if (t != S(0)) all_zero = false;
    if (all_zero) return {};
    if (sp.kind() == space_kind::lp) {
        const double p = sp.p();
        std::vector<S> v(std::size_t(n), S(0));
        if (p == 1) {
            int bi = 0;
            for (int i = 1; i < n; ++i)
                if (abs_val(u[std::size_t(i)]) > abs_val(u[std::size_t(bi)])) bi = i;
            v[std::size_t(bi)] = u[std::size_t(bi)] >= S(0) ? S(1) : S(-1);
            return v;
        }
        if (std::isinf(p)) {
            for (int i = 0; i < n; ++i) v[std::size_t(i)] = u[std::size_t(i)] >= S(0) ? S(1) : S(-1);
            return v;
        }
        if constexpr (!is_exact_scalar<S>) {
            const double q = p / (p - 1.0);
            double mass = 0;
            for (int i = 0; i < n; ++i) {
                double a = std::pow(std::fabs(u[std::size_t(i)]), q - 1.0);
                v[std::size_t(i)] = u[std::size_t(i)] >= 0 ? a : -a;
                mass += std::pow(a, p);
            }
            const double scale = std::pow(mass, 1.0 / p);
            if (!(scale > 0) || !std::isfinite(scale)) return {};
            for (auto& t : v) t /= scale;
            return v;
        }
        return {};
    }
    if (sp.is_polyhedral()) {
        try {
            auto verts = sp.ball_vertices();
            std::vector<S> best;
            S bestv(0);
            for (const auto& vq : verts) {
                std::vector<S> v(vq.size());
                S s(0);
                for (std::size_t i = 0; i < vq.size(); ++i) {
                    if constexpr (is_exact_scalar<S>)
                        v[i] = vq[i];
                    else
                        v[i] = to_double(vq[i]);
                    s += v[i] * u[i];
                }
                if (abs_val(s) > bestv) {
                    bestv = abs_val(s);
                    if (s < S(0))
                        for (auto& t : v) t = -t;
                    best = std::move(v);
                }
            }
            return best;
        } catch (const std::exception&) {
            return {};
        }
    }
    return {};
}

// max of the codomain norm over the domain ball vertices; exact whenever the
// lane can evaluate the codomain norm exactly
template <class S>
std::optional<std::pair<S, std::vector<S>>> vertex_route(const linear_map<S>& T) {
    if (!T.domain.is_polyhedral()) return std::nullopt;
    if constexpr (!is_exact_scalar<S>) {
        if (!norm_exact_double(T.codomain)) return std::nullopt;
    }
    try {
        auto verts = T.domain.ball_vertices();
        S best(0);
        std::vector<S> wit;
        for (const auto& vq : verts) {
            std::vector<S> v(vq.size());
            for (std::size_t i = 0; i < vq.size(); ++i) {
                if constexpr (is_exact_scalar<S>)
                    v[i] = vq[i];
                else
                    v[i] = to_double(vq[i]);
            }
            S val = T.codomain.norm(std::span<const S>(T.apply(v)));
            if (val > best) {
                best = val;
                wit = std::move(v);
            }
        }
        if (wit.empty()) wit = basis_vector<S>(T.domain, 0);
        return std::pair<S, std::vector<S>>{best, std::move(wit)};
    } catch (const std::exception&) {
        return std::nullopt; // no vertex description or no exact codomain norm
    }
}

template <class S>
std::optional<std::pair<S, std::vector<S>>> opnorm_exact_core(const linear_map<S>& T,
                                                              bool allow_adjoint) {
    try {
        if (T.mat.is_zero())
            return std::pair<S, std::vector<S>>{S(0), basis_vector<S>(T.domain, 0)};
        if (T.domain.dim() == 1) {
            std::vector<S> one{S(1)};
            S dn = T.domain.norm(std::span<const S>(one));
            S cn = T.codomain.norm(std::span<const S>(T.apply(one)));
            std::vector<S> wit{S(S(1) / dn)};
            return std::pair<S, std::vector<S>>{S(cn / dn), std::move(wit)};
        }
        if (auto r = monomial_lp_norm(T)) return r;
        // every nonzero row inside one codomain block: factor through the
        // block inclusion, which scales norms by ||e_i|| of the outer basis
        if (T.codomain.kind() == space_kind::esum) {
            int rmin = T.mat.rows(), rmax = -1;
            for (int r = 0; r < T.mat.rows(); ++r)
                for (int c = 0; c < T.mat.cols(); ++c)
                    if (T.mat(r, c) != S(0)) {
                        rmin = std::min(rmin, r);
                        rmax = std::max(rmax, r);
                        break;
                    }
            int offset = 0, bi = 0;
            for (const auto& blk : T.codomain.inners()) {
                if (rmin >= offset && rmax < offset + blk.dim()) {
                    matrix<S> sub(blk.dim(), T.mat.cols());
                    for (int r = 0; r < blk.dim(); ++r)
                        for (int c = 0; c < T.mat.cols(); ++c) sub(r, c) = T.mat(offset + r, c);
                    auto inner =
                        opnorm_exact_core(linear_map<S>(std::move(sub), T.domain, blk),
                                          allow_adjoint);
                    if (!inner) return std::nullopt;
                    S basis_norm = T.codomain.outer().template norm<S>(
                        std::span<const S>(basis_vector<S>(T.codomain.outer(), bi)));
                    return std::pair<S, std::vector<S>>{S(inner->first * basis_norm),
                                                        std::move(inner->second)};
                }
                offset += blk.dim();
                ++bi;
            }
        }
        // every nonzero column inside one domain block: precompose with the
        // block inclusion, whose inverse on the range scales by 1/||e_j||
        if (T.domain.kind() == space_kind::esum) {
            int cmin = T.mat.cols(), cmax = -1;
            for (int c = 0; c < T.mat.cols(); ++c)
                for (int r = 0; r < T.mat.rows(); ++r)
                    if (T.mat(r, c) != S(0)) {
                        cmin = std::min(cmin, c);
                        cmax = std::max(cmax, c);
                        break;
                    }
            int offset = 0, bj = 0;
            for (const auto& blk : T.domain.inners()) {
                if (cmin >= offset && cmax < offset + blk.dim()) {
                    auto inner = opnorm_exact_core(restrict_domain(T, blk, offset), allow_adjoint);
                    if (!inner) return std::nullopt;
                    S basis_norm = T.domain.outer().template norm<S>(
                        std::span<const S>(basis_vector<S>(T.domain.outer(), bj)));
                    std::vector<S> wit(std::size_t(T.domain.dim()), S(0));
                    if (int(inner->second.size()) == blk.dim())
                        for (int j = 0; j < blk.dim(); ++j) wit[offset + j] = inner->second[j];
                    return std::pair<S, std::vector<S>>{S(inner->first / basis_norm),
                                                        std::move(wit)};
                }
                offset += blk.dim();
                ++bj;
            }
        }
        // l_1 domain: the ball is the convex hull of +-e_j, so the norm is the
        // largest column norm
        if (T.domain.kind() == space_kind::lp && T.domain.p() == 1) {
            S best(0);
            int bestj = 0;
            for (int j = 0; j < T.domain.dim(); ++j) {
                S v = T.codomain.norm(std::span<const S>(T.apply(basis_vector<S>(T.domain, j))));
                if (v > best) best = v, bestj = j;
            }
            return std::pair<S, std::vector<S>>{best, basis_vector<S>(T.domain, bestj)};
        }
        // e-sum domain with l_1 outer: maximize over blocks
        if (T.domain.kind() == space_kind::esum && T.domain.outer().kind() == space_kind::lp &&
            T.domain.outer().p() == 1) {
            S best(0);
            std::vector<S> wit;
            int offset = 0;
            for (const auto& in : T.domain.inners()) {
                auto sub = opnorm_exact_core(restrict_domain(T, in, offset), allow_adjoint);
                if (!sub) return std::nullopt;
                if (sub->first > best) {
                    best = sub->first;
                    wit.assign(std::size_t(T.domain.dim()), S(0));
                    for (int j = 0; j < in.dim(); ++j) wit[offset + j] = sub->second[j];
                }
                offset += in.dim();
            }
            if (wit.empty()) wit = basis_vector<S>(T.domain, 0);
            return std::pair<S, std::vector<S>>{best, std::move(wit)};
        }
        // block-monomial between e-sums: when each domain block feeds at most
        // one codomain block and conversely, the norm equals the norm of the
        // outer matrix whose entries are the per-block norms (the e-sum norm
        // only sees block norms, and the outer bases are 1-unconditional)
        if (T.domain.kind() == space_kind::esum && T.codomain.kind() == space_kind::esum) {
            auto spans = [](const space& sp) {
                std::vector<std::pair<int, space>> out;
                int off = 0;
                for (const auto& in : sp.inners()) {
                    out.push_back({off, in});
                    off += in.dim();
                }
                return out;
            };
            auto dspans = spans(T.domain), cspans = spans(T.codomain);
            auto block_of = [](const std::vector<std::pair<int, space>>& sp, int idx) {
                for (int b = 0; b < int(sp.size()); ++b)
                    if (idx >= sp[std::size_t(b)].first &&
                        idx < sp[std::size_t(b)].first + sp[std::size_t(b)].second.dim())
                        return b;
                return -1;
            };
            const int db = int(dspans.size()), cb = int(cspans.size());
            std::vector<int> target(std::size_t(db), -1), source(std::size_t(cb), -1);
            bool pattern_ok = true;
            for (int r = 0; r < T.mat.rows() && pattern_ok; ++r)
                for (int c = 0; c < T.mat.cols() && pattern_ok; ++c) {
                    if (T.mat(r, c) == S(0)) continue;
                    int i = block_of(cspans, r), j = block_of(dspans, c);
                    if (target[std::size_t(j)] == -1) target[std::size_t(j)] = i;
                    if (source[std::size_t(i)] == -1) source[std::size_t(i)] = j;
                    if (target[std::size_t(j)] != i || source[std::size_t(i)] != j)
                        pattern_ok = false;
                }
            if (pattern_ok) {
                matrix<S> M(cb, db);
                bool blocks_ok = true;
                for (int j = 0; j < db && blocks_ok; ++j) {
                    int i = target[std::size_t(j)];
                    if (i < 0) continue;
                    const auto& [doff, dsp] = dspans[std::size_t(j)];
                    const auto& [coff, csp] = cspans[std::size_t(i)];
                    matrix<S> sub(csp.dim(), dsp.dim());
                    for (int r = 0; r < csp.dim(); ++r)
                        for (int c = 0; c < dsp.dim(); ++c) sub(r, c) = T.mat(coff + r, doff + c);
                    auto nb = opnorm_exact_core(linear_map<S>(std::move(sub), dsp, csp),
                                                allow_adjoint);
                    if (!nb) {
                        blocks_ok = false;
                        break;
                    }
                    M(i, j) = nb->first;
                }
                if (blocks_ok) {
                    auto outern = opnorm_exact_core(
                        linear_map<S>(std::move(M), T.domain.outer(), T.codomain.outer()),
                        allow_adjoint);
                    if (outern) return std::pair<S, std::vector<S>>{outern->first, {}};
                }
            }
        }
        if (auto r = vertex_route(T)) return r;
    } catch (const exactness_error&) {
        // a route needed an irrational value; the adjoint may still work
    }
    if (allow_adjoint) {
        // the adjoint can expose an l_1 structure (dual of sup-type spaces);
        // for an optimal dual witness psi, any unit x maximizing (T*psi)(x)
        // satisfies ||Tx|| >= psi(Tx) = value, so the norm is attained there
        if (auto r = opnorm_exact_core(adjoint(T), false)) {
            std::vector<S> wit;
            if (!r->second.empty()) {
                std::vector<S> u(std::size_t(T.domain.dim()), S(0));
                for (int j = 0; j < T.mat.cols(); ++j) {
                    S s(0);
                    for (int i = 0; i < T.mat.rows(); ++i)
                        s += T.mat(i, j) * r->second[std::size_t(i)];
                    u[std::size_t(j)] = s;
                }
                wit = norming_vector(T.domain, u);
            }
            return std::pair<S, std::vector<S>>{r->first, std::move(wit)};
        }
    }
    return std::nullopt;
}

// certified upper bounds that need no search
inline double opnorm_upper_battery(const linear_map<double>& T) {
    double hi = infinity;
    const int n = T.domain.dim();
    std::vector<double> colnorm(n), coorddiv(n);
    bool cols_ok = T.domain.is_unconditional();
    if (cols_ok) {
        for (int j = 0; j < n && cols_ok; ++j) {
            auto ej = basis_vector<double>(T.domain, j);
            double cn = T.codomain.norm_certified(T.apply(ej)).hi;
            double en = T.domain.norm_certified(ej).lo;
            if (!(en > 0) || !std::isfinite(cn)) {
                cols_ok = false;
                break;
            }
            colnorm[j] = cn;
            coorddiv[j] = cn / en;
        }
    }
    if (cols_ok) {
        // |x_j| <= ||x|| / ||e_j|| for a 1-unconditional basis
        double s = 0;
        for (int j = 0; j < n; ++j) s += coorddiv[j];
        hi = std::min(hi, s);
    }
    if (cols_ok && T.domain.kind() == space_kind::tsirelson_trunc) {
        // split bound: coordinates below k are bounded by 1, the suffix mass
        // is controlled by the singleton family {k},...,{n} when it is
        // admissible
        const double p = T.domain.p();
        const bool strict = T.domain.adm() == admissibility::strict;
        for (int k = 1; k <= n; ++k) {
            int count = n - k + 1;
            if (strict ? count >= k : count > k) continue;
            double prefix = 0, sufmax = 0;
            for (int j = 0; j < k - 1; ++j) prefix += colnorm[j];
            for (int j = k - 1; j < n; ++j) sufmax = std::max(sufmax, colnorm[j]);
            // sum over the suffix of |x_j| <= count^{1-1/p} * 2^{1/p}
            double mass = std::pow(double(count), 1.0 - 1.0 / p) * std::pow(2.0, 1.0 / p);
            hi = std::min(hi, prefix + sufmax * mass);
        }
    }
    if (T.domain.kind() == space_kind::lp && T.codomain.kind() == space_kind::lp) {
        // factor through l_2 with the closed-form embedding constants
        Eigen::MatrixXd M(T.mat.rows(), T.mat.cols());
        for (int i = 0; i < T.mat.rows(); ++i)
            for (int j = 0; j < T.mat.cols(); ++j) M(i, j) = T.mat(i, j);
        double smax = M.jacobiSvd().singularValues()(0);
        auto embed = [](double pfrom, double pto, int d) {
            // identity l_pfrom^d -> l_pto^d, monomial closed form
            if (pfrom <= pto) return 1.0;
            double r = std::isinf(pfrom) ? pto : 1.0 / (1.0 / pto - 1.0 / pfrom);
            return std::pow(double(d), 1.0 / r);
        };
        double c1 = embed(T.domain.p(), 2.0, n);
        double c2 = embed(2.0, T.codomain.p(), T.codomain.dim());
        hi = std::min(hi, c1 * smax * c2 * (1 + 1e-12));
    }
    return hi;
}

} // namespace detail

inline rational operator_norm_exact(const linear_map<rational>& T) {
    auto r = detail::opnorm_exact_core(T, true);
    if (!r) throw exactness_error("operator_norm_exact: no exact route for these spaces");
    return r->first;
}

inline op_norm_result operator_norm(const linear_map<double>& T,
                                    opnorm_mode mode = opnorm_mode::search, int budget = 200,
                                    std::uint64_t seed = 0) {
    if (auto r = detail::opnorm_exact_core(T, true)) {
        return {{r->first, r->first, true}, std::move(r->second), "exact"};
    }
    if (mode == opnorm_mode::exact)
        throw std::runtime_error("operator_norm: exact mode unavailable for these spaces");

    const int n = T.domain.dim();
    double battery = detail::opnorm_upper_battery(T);

    if (T.domain.kind() == space_kind::lp && T.domain.p() == 2 &&
        T.codomain.kind() == space_kind::lp && T.codomain.p() == 2) {
        Eigen::MatrixXd M(T.mat.rows(), T.mat.cols());
        for (int i = 0; i < T.mat.rows(); ++i)
            for (int j = 0; j < T.mat.cols(); ++j) M(i, j) = T.mat(i, j);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double s = svd.singularValues()(0);
        std::vector<double> wit(n);
        for (int j = 0; j < n; ++j) wit[j] = svd.matrixV()(j, 0);
        double slack = std::max(1e-12 * s, 1e-300);
        return {{s - slack, std::min(battery, s + slack), false}, std::move(wit), "svd"};
    }

    auto ratio = [&](const std::vector<double>& x) {
        double dn = T.domain.norm_certified(x).hi;
        if (!(dn > 1e-300)) return 0.0;
        return T.codomain.norm_certified(T.apply(x)).lo / dn;
    };
    double best = 0;
    std::vector<double> bestx = basis_vector<double>(T.domain, 0);
    std::vector<std::vector<double>> starts;
    for (int j = 0; j < n; ++j) starts.push_back(basis_vector<double>(T.domain, j));
    std::uint64_t st = detail::mix_seed(seed, 211);
    int nstarts = std::clamp(budget, 4, 200);
    if (int(starts.size()) > nstarts) starts.resize(std::size_t(nstarts));
    for (int k = int(starts.size()); k < nstarts; ++k) {
        std::vector<double> s(n);
        for (auto& x : s) x = detail::gaussian(st);
        starts.push_back(std::move(s));
    }
    const int iter_cap = budget >= 48 ? 300 : 140;
    for (std::size_t si = 0; si < starts.size(); ++si) {
        std::vector<double> x = starts[si];
        double cur = ratio(x);
        double step = 0.5;
        const double h = 1e-6;
        for (int it = 0; it < iter_cap && step > 1e-10; ++it) {
            // ascend along the numerical gradient of the ratio
            std::vector<double> g(n);
            double gn = 0;
            for (int j = 0; j < n; ++j) {
                auto xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                g[j] = (ratio(xp) - ratio(xm)) / (2 * h);
                gn += g[j] * g[j];
            }
            gn = std::sqrt(gn);
            if (!(gn > 1e-14)) break;
            double xs = 0;
            for (double c : x) xs += c * c;
            xs = std::sqrt(std::max(xs, 1e-30));
            auto y = x;
            for (int j = 0; j < n; ++j) y[j] += step * xs * g[j] / gn;
            double r = ratio(y);
            if (r > cur * (1 + 1e-10))
                cur = r, x = std::move(y);
            else
                step *= 0.5;
        }
        if (cur > best) {
            best = cur;
            bestx = x;
        }
    }
    double dn = T.domain.norm_certified(bestx).hi;
    if (dn > 1e-300)
        for (auto& c : bestx) c /= dn;
    double hi = std::max(battery, best);
    return {{best, hi, false}, std::move(bestx), "ascent"};
}

} // namespace banlab
