#pragma once

// Finite-dimensional normed spaces with a distinguished basis. A space is an
// immutable structural description; norms are computed on demand. The
// rational lane evaluates only closed-form paths (l_1, l_inf, their e-sums,
// the p=1 Tsirelson truncation, polyhedral duals) and throws exactness_error
// elsewhere. The double lane always produces a value; values that come from a
// search rather than a formula are flagged through the bound struct.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banlab/matrix.hpp"
#include "banlab/rational.hpp"
#include "banlab/tsirelson.hpp"

namespace banlab {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class space_kind { lp, esum, tsirelson_trunc, dual_space, custom };

// Certified interval for a computed quantity. lo is always a valid lower
// bound and hi a valid upper bound (hi may be +inf when no cheap certificate
// exists); exact means lo == hi by construction, not by luck.
struct bound {
    double lo = 0;
    double hi = 0;
    bool exact = false;
};

class space {
    struct payload {
        space_kind kind;
        int dim = 0;
        double pval = 0;                // lp and tsirelson_trunc
        int max_index = 0;              // tsirelson_trunc
        admissibility adm = admissibility::nonstrict;
        std::vector<space> parts;       // esum: [outer, inner_1, ..., inner_k]; dual: [predual]
        std::string name;               // custom
        std::function<double(std::span<const double>)> oracle; // custom
        bool claims_unconditional = false;
    };
    std::shared_ptr<const payload> d_;

    explicit space(std::shared_ptr<const payload> d) : d_(std::move(d)) {}

    static void check_dim(int dim) {
        if (dim < 1) throw std::invalid_argument("space: dimension must be positive");
    }

public:
    space() = default; // empty handle; only assignment is valid afterwards

    static space lp(int dim, double p) {
        check_dim(dim);
        if (!(p >= 1)) throw std::invalid_argument("space::lp: p must be in [1, inf]");
        auto d = std::make_shared<payload>();
        d->kind = space_kind::lp;
        d->dim = dim;
        d->pval = p;
        return space(std::move(d));
    }

    static space esum(space outer, std::vector<space> inners) {
        if (!outer.d_ || inners.empty()) throw std::invalid_argument("space::esum: empty parts");
        if (outer.dim() != int(inners.size()))
            throw std::invalid_argument("space::esum: outer dimension must equal block count");
        if (!outer.is_unconditional())
            throw std::invalid_argument("space::esum: outer basis must be 1-unconditional");
        auto d = std::make_shared<payload>();
        d->kind = space_kind::esum;
        d->dim = 0;
        d->parts.reserve(inners.size() + 1);
        d->parts.push_back(std::move(outer));
        for (auto& in : inners) {
            d->dim += in.dim();
            d->parts.push_back(std::move(in));
        }
        return space(std::move(d));
    }

    static space tsirelson_trunc(double p, int max_index,
                                 admissibility adm = admissibility::nonstrict) {
        check_dim(max_index);
        if (!(p >= 1) || std::isinf(p))
            throw std::invalid_argument("space::tsirelson_trunc: p must be a finite real >= 1");
        if (max_index > 24)
            throw std::invalid_argument("space::tsirelson_trunc: max_index above the DP budget");
        auto d = std::make_shared<payload>();
        d->kind = space_kind::tsirelson_trunc;
        d->dim = max_index;
        d->max_index = max_index;
        d->pval = p;
        d->adm = adm;
        return space(std::move(d));
    }

    static space dual_of(space s) {
        if (!s.d_) throw std::invalid_argument("space::dual_of: empty space");
        // X** = X here: every space in scope is finite-dimensional
        if (s.kind() == space_kind::dual_space) return s.predual();
        if (s.kind() == space_kind::lp) {
            double p = s.p();
            return lp(s.dim(), p == 1 ? infinity : (std::isinf(p) ? 1.0 : p / (p - 1)));
        }
        if (s.kind() == space_kind::esum) {
            std::vector<space> duals;
            for (const auto& in : s.inners()) duals.push_back(dual_of(in));
            return esum(dual_of(s.outer()), std::move(duals));
        }
        auto d = std::make_shared<payload>();
        d->kind = space_kind::dual_space;
        d->dim = s.dim();
        d->parts.push_back(std::move(s));
        return space(std::move(d));
    }

    static space custom(int dim, std::string name,
                        std::function<double(std::span<const double>)> oracle,
                        bool claims_unconditional = false) {
        check_dim(dim);
        if (!oracle) throw std::invalid_argument("space::custom: missing norm oracle");
        auto d = std::make_shared<payload>();
        d->kind = space_kind::custom;
        d->dim = dim;
        d->name = std::move(name);
        d->oracle = std::move(oracle);
        d->claims_unconditional = claims_unconditional;
        return space(std::move(d));
    }

    bool valid() const { return bool(d_); }
    space_kind kind() const { return d_->kind; }
    int dim() const { return d_->dim; }

    double p() const {
        if (d_->kind != space_kind::lp && d_->kind != space_kind::tsirelson_trunc)
            throw std::logic_error("space::p: kind has no exponent");
        return d_->pval;
    }
    int max_index() const {
        if (d_->kind != space_kind::tsirelson_trunc)
            throw std::logic_error("space::max_index: not a Tsirelson truncation");
        return d_->max_index;
    }
    admissibility adm() const { return d_->adm; }
    const space& outer() const {
        if (d_->kind != space_kind::esum) throw std::logic_error("space::outer: not an e-sum");
        return d_->parts[0];
    }
    std::span<const space> inners() const {
        if (d_->kind != space_kind::esum) throw std::logic_error("space::inners: not an e-sum");
        return std::span<const space>(d_->parts).subspan(1);
    }
    const space& predual() const {
        if (d_->kind != space_kind::dual_space)
            throw std::logic_error("space::predual: not a dual");
        return d_->parts[0];
    }
    const std::string& name() const { return d_->name; }

    bool is_unconditional() const {
        switch (d_->kind) {
            case space_kind::lp:
            case space_kind::tsirelson_trunc: return true;
            case space_kind::esum: {
                for (const auto& pt : d_->parts)
                    if (!pt.is_unconditional()) return false;
                return true;
            }
            case space_kind::dual_space: return predual().is_unconditional();
            case space_kind::custom: return d_->claims_unconditional;
        }
        return false;
    }

    bool operator==(const space& o) const {
        if (d_ == o.d_) return true;
        if (!d_ || !o.d_) return false;
        if (d_->kind != o.d_->kind || d_->dim != o.d_->dim) return false;
        switch (d_->kind) {
            case space_kind::lp: return d_->pval == o.d_->pval;
            case space_kind::tsirelson_trunc:
                return d_->pval == o.d_->pval && d_->adm == o.d_->adm;
            case space_kind::esum:
            case space_kind::dual_space: return d_->parts == o.d_->parts;
            case space_kind::custom: return d_->name == o.d_->name;
        }
        return false;
    }
    bool operator!=(const space& o) const { return !(*this == o); }

    std::string describe() const {
        std::ostringstream os;
        switch (d_->kind) {
            case space_kind::lp:
                os << "l_";
                if (std::isinf(d_->pval))
                    os << "inf";
                else
                    os << d_->pval;
                os << "^" << d_->dim;
                break;
            case space_kind::esum: {
                os << "esum(" << outer().describe() << ";";
                for (const auto& in : inners()) os << " " << in.describe();
                os << ")";
                break;
            }
            case space_kind::tsirelson_trunc:
                os << "ttrunc(p=" << d_->pval << ", " << d_->max_index << ")";
                break;
            case space_kind::dual_space: os << "dual(" << predual().describe() << ")"; break;
            case space_kind::custom: os << "custom:" << d_->name << "[" << d_->dim << "]"; break;
        }
        return os.str();
    }

    template <class S>
    S norm(std::span<const S> v) const;
    template <class S>
    S norm(const std::vector<S>& v) const {
        return norm(std::span<const S>(v));
    }

    // Exact value with matching lo == hi when a closed form exists; search
    // value with an honest interval otherwise.
    bound norm_certified(std::span<const double> v) const;

    template <class S>
    S dual_norm_exact(std::span<const S> f) const;
    template <class S>
    S dual_norm_exact(const std::vector<S>& f) const {
        return dual_norm_exact(std::span<const S>(f));
    }

    bound dual_norm(std::span<const double> f, int budget = 200, std::uint64_t seed = 0) const;
    bound dual_norm(const std::vector<double>& f, int budget = 200, std::uint64_t seed = 0) const {
        return dual_norm(std::span<const double>(f), budget, seed);
    }

    bool is_polyhedral() const;
    std::vector<std::vector<rational>> ball_vertices(std::size_t cap = 65536) const;

    std::vector<double> random_unit_vector(std::uint64_t seed) const;
};

namespace detail {

template <class S>
S lp_sum_norm(std::span<const S> v, double p) {
    if (p == 1) {
        S s(0);
        for (const auto& x : v) s += abs_val(x);
        return s;
    }
    if (std::isinf(p)) {
        S m(0);
        for (const auto& x : v) m = std::max(m, abs_val(x));
        return m;
    }
    if (v.size() == 1) return abs_val(v[0]);
    if constexpr (is_exact_scalar<S>) {
        bool single = false;
        S only(0);
        for (const auto& x : v) {
            if (x == 0) continue;
            if (single) throw exactness_error("l_p norm with p not in {1, inf} is irrational here");
            single = true;
            only = abs_val(x);
        }
        return only; // at most one nonzero coordinate: norm is its absolute value
    } else {
        double s = 0;
        for (const auto& x : v) s += std::pow(std::fabs(x), p);
        return std::pow(s, 1.0 / p);
    }
}

} // namespace detail

template <class S>
S space::norm(std::span<const S> v) const {
    if (int(v.size()) != d_->dim) throw std::invalid_argument("space::norm: dimension mismatch");
    switch (d_->kind) {
        case space_kind::lp: return detail::lp_sum_norm(v, d_->pval);
        case space_kind::esum: {
            std::vector<S> blocknorms;
            blocknorms.reserve(inners().size());
            std::size_t at = 0;
            for (const auto& in : inners()) {
                blocknorms.push_back(in.norm(v.subspan(at, in.dim())));
                at += in.dim();
            }
            return outer().norm(std::span<const S>(blocknorms));
        }
        case space_kind::tsirelson_trunc: {
            std::vector<std::pair<int, S>> entries;
            for (int i = 0; i < d_->dim; ++i)
                if (v[i] != S(0)) entries.emplace_back(i + 1, v[i]);
            fin_supp<S> x(std::move(entries));
            if constexpr (is_exact_scalar<S>) {
                if (d_->pval == 1) return tstar_norm(x, d_->adm);
                if (x.support_size() <= 1)
                    return x.support_size() ? abs_val(x.c[0].second) : S(0);
                throw exactness_error("Tsirelson p-convexified norm is irrational here");
            } else {
                return tp_norm(x, d_->pval, d_->adm);
            }
        }
        case space_kind::dual_space: {
            if constexpr (is_exact_scalar<S>) {
                auto verts = predual().ball_vertices();
                S best(0);
                for (const auto& w : verts) {
                    S dot(0);
                    for (int i = 0; i < d_->dim; ++i) dot += S(v[i] * w[i]);
                    best = std::max(best, abs_val(dot));
                }
                return best;
            } else {
                return predual().dual_norm(v).lo;
            }
        }
        case space_kind::custom: {
            if constexpr (is_exact_scalar<S>)
                throw exactness_error("custom norm oracle has no exact lane");
            else
                return d_->oracle(v);
        }
    }
    throw std::logic_error("space::norm: unreachable");
}

inline bound space::norm_certified(std::span<const double> v) const {
    switch (d_->kind) {
        case space_kind::lp:
        case space_kind::esum:
        case space_kind::tsirelson_trunc:
        case space_kind::custom: {
            double x = norm(v);
            return {x, x, true};
        }
        case space_kind::dual_space: {
            if (predual().is_polyhedral()) {
                double x = norm(v);
                return {x, x, true};
            }
            return predual().dual_norm(v);
        }
    }
    throw std::logic_error("space::norm_certified: unreachable");
}

template <class S>
S space::dual_norm_exact(std::span<const S> f) const {
    if (int(f.size()) != d_->dim)
        throw std::invalid_argument("space::dual_norm_exact: dimension mismatch");
    switch (d_->kind) {
        case space_kind::lp: {
            double p = d_->pval;
            double q = p == 1 ? infinity : (std::isinf(p) ? 1.0 : p / (p - 1));
            return detail::lp_sum_norm(f, q);
        }
        case space_kind::esum: {
            std::vector<S> blocknorms;
            std::size_t at = 0;
            for (const auto& in : inners()) {
                blocknorms.push_back(in.dual_norm_exact(f.subspan(at, in.dim())));
                at += in.dim();
            }
            return outer().dual_norm_exact(std::span<const S>(blocknorms));
        }
        case space_kind::tsirelson_trunc:
        case space_kind::custom: {
            auto verts = ball_vertices(); // throws when not polyhedral
            S best(0);
            for (const auto& w : verts) {
                S dot(0);
                for (int i = 0; i < d_->dim; ++i) {
                    if constexpr (is_exact_scalar<S>)
                        dot += f[i] * w[i];
                    else
                        dot += f[i] * to_double(w[i]);
                }
                best = std::max(best, abs_val(dot));
            }
            return best;
        }
        case space_kind::dual_space: return predual().norm(f);
    }
    throw std::logic_error("space::dual_norm_exact: unreachable");
}

inline bound space::dual_norm(std::span<const double> f, int budget, std::uint64_t seed) const {
    if (int(f.size()) != d_->dim)
        throw std::invalid_argument("space::dual_norm: dimension mismatch");
    try {
        double x = dual_norm_exact(f);
        return {x, x, true};
    } catch (const std::exception&) {
        // no exact path (irrational norm, missing vertex description, or
        // vertex cap); fall through to the search
    }
    // certified upper bound through coordinate functionals, valid for
    // 1-unconditional bases: |x_i| <= ||x|| / ||e_i||
    double hi = infinity;
    if (is_unconditional()) {
        hi = 0;
        for (int i = 0; i < d_->dim; ++i) {
            if (f[i] == 0) continue;
            std::vector<double> e(d_->dim, 0.0);
            e[i] = 1;
            double eni = norm_certified(e).lo;
            if (eni <= 0) {
                hi = infinity;
                break;
            }
            hi += std::fabs(f[i]) / eni;
        }
    }
    auto ratio = [&](const std::vector<double>& x) {
        double nx = norm_certified(std::span<const double>(x)).hi;
        if (!(nx > 1e-300)) return 0.0;
        double dot = 0;
        for (int i = 0; i < d_->dim; ++i) dot += f[i] * x[i];
        return std::fabs(dot) / nx;
    };
    std::vector<std::vector<double>> starts;
    {
        std::vector<double> s(d_->dim);
        for (int i = 0; i < d_->dim; ++i) s[i] = f[i] > 0 ? 1 : (f[i] < 0 ? -1 : 0);
        bool nz = false;
        for (double x : s) nz = nz || x != 0;
        if (nz) starts.push_back(s);
    }
    std::uint64_t st = detail::mix_seed(seed, 101);
    int nstarts = std::max(4, budget / 25);
    for (int k = 0; k < nstarts; ++k) {
        std::vector<double> s(d_->dim);
        for (auto& x : s) x = detail::gaussian(st);
        starts.push_back(std::move(s));
    }
    double best = 0;
    for (std::size_t si = 0; si < starts.size(); ++si) {
        std::vector<double> x = starts[si];
        double cur = ratio(x), step = 0.5;
        std::uint64_t ls = detail::mix_seed(seed, 1000 + si);
        for (int it = 0; it < budget && step > 1e-12; ++it) {
            std::vector<double> y = x;
            for (auto& c : y) c += step * detail::gaussian(ls);
            double r = ratio(y);
            if (r > cur)
                cur = r, x = std::move(y);
            else
                step *= 0.7;
        }
        best = std::max(best, cur);
    }
    if (hi < best) hi = best; // the upper certificate cannot undercut a witness
    return {best, hi, false};
}

inline bool space::is_polyhedral() const {
    switch (d_->kind) {
        case space_kind::lp: return d_->pval == 1 || std::isinf(d_->pval) || d_->dim == 1;
        case space_kind::esum: {
            for (const auto& pt : d_->parts)
                if (!pt.is_polyhedral()) return false;
            return true;
        }
        case space_kind::tsirelson_trunc: return d_->pval == 1 && d_->dim <= 5;
        case space_kind::dual_space: return predual().is_polyhedral() && d_->dim <= 4;
        case space_kind::custom: return false;
    }
    return false;
}

inline std::vector<std::vector<rational>> space::ball_vertices(std::size_t cap) const {
    const int n = d_->dim;
    switch (d_->kind) {
        case space_kind::lp: {
            std::vector<std::vector<rational>> out;
            if (d_->pval == 1 || n == 1) {
                for (int i = 0; i < n; ++i)
                    for (int s = -1; s <= 1; s += 2) {
                        std::vector<rational> v(n, rational(0));
                        v[i] = s;
                        out.push_back(std::move(v));
                    }
                return out;
            }
            if (std::isinf(d_->pval)) {
                if (n > 16 || (std::size_t(1) << n) > cap)
                    throw std::invalid_argument("space::ball_vertices: too many sign vertices");
                for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
                    std::vector<rational> v(n);
                    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? -1 : 1;
                    out.push_back(std::move(v));
                }
                return out;
            }
            throw exactness_error("space::ball_vertices: ball is not polyhedral");
        }
        case space_kind::esum: {
            auto wouts = outer().ball_vertices(cap);
            std::vector<std::vector<std::vector<rational>>> inner_verts;
            for (const auto& in : inners()) inner_verts.push_back(in.ball_vertices(cap));
            std::vector<std::vector<rational>> out;
            for (const auto& w : wouts) {
                std::vector<std::vector<rational>> partial{{}};
                for (std::size_t j = 0; j < inners().size(); ++j) {
                    const int dj = inners()[j].dim();
                    std::vector<std::vector<rational>> next;
                    for (const auto& head : partial) {
                        if (w[j] == 0) {
                            auto h = head;
                            h.insert(h.end(), std::size_t(dj), rational(0));
                            next.push_back(std::move(h));
                            continue;
                        }
                        for (const auto& u : inner_verts[j]) {
                            auto h = head;
                            for (const auto& c : u) h.push_back(rational(w[j] * c));
                            next.push_back(std::move(h));
                            if (next.size() > cap)
                                throw std::invalid_argument(
                                    "space::ball_vertices: vertex cap exceeded");
                        }
                    }
                    partial = std::move(next);
                }
                for (auto& v : partial) out.push_back(std::move(v));
                if (out.size() > cap)
                    throw std::invalid_argument("space::ball_vertices: vertex cap exceeded");
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
        case space_kind::tsirelson_trunc: {
            if (d_->pval != 1)
                throw exactness_error("space::ball_vertices: ball is not polyhedral");
            return tstar_ball_vertices(n, d_->adm);
        }
        case space_kind::dual_space: {
            auto prim = predual().ball_vertices(cap);
            std::vector<std::vector<rational>> rows(prim.begin(), prim.end());
            return detail::polytope_vertices(rows, n);
        }
        case space_kind::custom:
            throw exactness_error("space::ball_vertices: custom norm has no vertex description");
    }
    throw std::logic_error("space::ball_vertices: unreachable");
}

inline std::vector<double> space::random_unit_vector(std::uint64_t seed) const {
    std::uint64_t st = detail::mix_seed(seed, 7);
    std::vector<double> v(d_->dim);
    double sq = 0;
    do {
        sq = 0;
        for (auto& x : v) {
            x = detail::gaussian(st);
            sq += x * x;
        }
    } while (sq < 1e-12);
    double nv = norm_certified(v).lo;
    if (!(nv > 0)) throw std::runtime_error("space::random_unit_vector: degenerate norm");
    for (auto& x : v) x /= nv;
    return v;
}

template <class S>
std::vector<S> basis_vector(const space& sp, int i) {
    if (i < 0 || i >= sp.dim()) throw std::invalid_argument("basis_vector: index out of range");
    std::vector<S> v(sp.dim(), S(0));
    v[i] = S(1);
    return v;
}

} // namespace banlab
