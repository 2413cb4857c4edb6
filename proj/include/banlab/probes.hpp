#pragma once

// Geometric probes on finite-dimensional spaces: measured unconditional
// constants, Banach-Mazur distance upper bounds, and cotype-2 ratios.
// Every value returned here is a one-sided certificate: unconditional_constant
// and cotype2_ratio are lower bounds of the true constants (built from
// certified norm intervals, never from raw search values), banach_mazur_upper
// is an upper bound of d(X,Y) because it is ||T|| ||T^-1|| for one concrete
// invertible T, both factors taken at the upper end of their intervals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "banlab/operator.hpp"

namespace banlab {

// Largest ratio ||sum eps_i a_i e_i|| / ||sum a_i e_i|| found over sampled
// coefficient vectors and all sign patterns eps; exhaustive in signs, so the
// dimension is capped at 16. The ratio uses the certified interval ends
// (flipped lo over unflipped hi), making the result a true lower bound of the
// unconditional constant even for optimizer-certified norms.
inline double unconditional_constant(const space& sp, int budget = 200,
                                     std::uint64_t seed = 0) {
    const int n = sp.dim();
    if (n > 16)
        throw std::invalid_argument(
            "unconditional_constant: exhaustive sign enumeration capped at dim 16");
    std::vector<std::vector<double>> samples;
    for (int i = 0; i < n && int(samples.size()) < 4; ++i) {
        std::vector<double> e(std::size_t(n), 0.0);
        e[std::size_t(i)] = 1;
        samples.push_back(std::move(e));
    }
    samples.emplace_back(std::size_t(n), 1.0);
    {
        std::vector<double> v(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) v[std::size_t(i)] = 1.0 / double(i + 1);
        samples.push_back(std::move(v));
    }
    std::uint64_t st = detail::mix_seed(seed, 61);
    const int extra = std::clamp(budget / 8, 4, 64);
    for (int k = 0; k < extra; ++k) {
        std::vector<double> v(std::size_t(n), 0.0);
        for (auto& x : v) x = detail::gaussian(st);
        samples.push_back(std::move(v));
    }

    double best = 1;
    std::vector<double> flipped(std::size_t(n), 0.0);
    for (const auto& a : samples) {
        const bound base = sp.norm_certified(a);
        if (!(base.hi > 1e-12)) continue;
        // eps and -eps give the same ratio, so the top bit stays +1.
        const std::uint32_t half = 1u << (n - 1);
        for (std::uint32_t mask = 0; mask < half; ++mask) {
            for (int i = 0; i < n; ++i)
                flipped[std::size_t(i)] =
                    (mask >> i) & 1u ? -a[std::size_t(i)] : a[std::size_t(i)];
            const bound fb = sp.norm_certified(flipped);
            best = std::max(best, fb.lo / base.hi);
        }
    }
    return best;
}

// Upper bound of the Banach-Mazur distance d(X,Y): the best ||T|| ||T^-1||
// over a seeded multi-start search through invertible T: X -> Y. Structured
// starts (identity, the 2x2 sum/difference matrix, per-coordinate scalings)
// are tried before random ones; singular candidates are skipped. Both factors
// are interval upper ends, so the product certifies.
inline double banach_mazur_upper(const space& X, const space& Y, int budget = 200,
                                 std::uint64_t seed = 0) {
    const int n = X.dim();
    if (Y.dim() != n)
        throw std::invalid_argument("banach_mazur_upper: dimension mismatch");
    if (n == 0) throw std::invalid_argument("banach_mazur_upper: empty space");

    const int opb = n <= 3 ? 16 : 10;
    auto value_of = [&](const matrix<double>& m,
                        std::uint64_t s) -> std::optional<double> {
        auto inv = detail::invert_small(m);
        if (!inv) return std::nullopt;
        const double fwd =
            operator_norm(linear_map<double>(m, X, Y), opnorm_mode::search, opb,
                          detail::mix_seed(s, 1))
                .b.hi;
        const double back =
            operator_norm(linear_map<double>(*inv, Y, X), opnorm_mode::search, opb,
                          detail::mix_seed(s, 2))
                .b.hi;
        return fwd * back;
    };

    std::vector<matrix<double>> starts;
    starts.push_back(matrix<double>::identity(n));
    if (n == 2) {
        matrix<double> h(2, 2);
        h(0, 0) = 1;
        h(0, 1) = 1;
        h(1, 0) = 1;
        h(1, 1) = -1;
        starts.push_back(h);
        for (double c : {0.5, 2.0}) {
            matrix<double> s = matrix<double>::identity(2);
            s(1, 1) = c;
            starts.push_back(s);
        }
    }
    std::uint64_t st = detail::mix_seed(seed, 313);
    const int nstarts = std::clamp(budget / 12, 4, 24);
    while (int(starts.size()) < nstarts) {
        matrix<double> m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = detail::gaussian(st);
        starts.push_back(std::move(m));
    }

    double best = std::numeric_limits<double>::infinity();
    int si = 0;
    for (const auto& s0 : starts) {
        const std::uint64_t ss = detail::mix_seed(seed, 1000 + si++);
        auto cur = s0;
        auto curval = value_of(cur, detail::mix_seed(ss, 0));
        if (!curval) continue;
        double step = 0.5;
        std::uint64_t ls = detail::mix_seed(ss, 5);
        const int iters = std::clamp(budget / 4, 12, 80);
        for (int it = 0; it < iters && step > 1e-5; ++it) {
            matrix<double> cand = cur;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) cand(r, c) += step * detail::gaussian(ls);
            auto cv = value_of(cand, detail::mix_seed(ss, 10 + std::uint64_t(it)));
            if (cv && *cv < *curval - 1e-12) {
                cur = std::move(cand);
                curval = cv;
            } else {
                step *= 0.5;
            }
        }
        best = std::min(best, *curval);
    }
    if (!std::isfinite(best))
        throw std::runtime_error("banach_mazur_upper: no invertible candidate found");
    return std::max(best, 1.0);
}

// (sum ||x_i||^2)^{1/2} divided by the average of ||sum t_i x_i|| over all
// sign vectors t; a lower bound of the cotype-2 constant. Exhaustive sign
// average, set size capped at 16. Numerator uses interval lower ends and the
// denominator upper ends.
inline double cotype2_ratio(const space& sp,
                            const std::vector<std::vector<double>>& xs) {
    if (xs.empty()) throw std::invalid_argument("cotype2_ratio: empty vector set");
    if (xs.size() > 16)
        throw std::invalid_argument("cotype2_ratio: sign average capped at 16 vectors");
    const int n = int(xs.size());
    const int d = sp.dim();
    for (const auto& x : xs)
        if (int(x.size()) != d)
            throw std::invalid_argument("cotype2_ratio: vector dimension mismatch");

    double sq = 0;
    for (const auto& x : xs) {
        const double lo = sp.norm_certified(x).lo;
        sq += lo * lo;
    }

    // t and -t give the same norm; enumerate half the cube and double.
    const std::uint32_t half = 1u << (n - 1);
    double total = 0;
    std::vector<double> acc(std::size_t(d), 0.0);
    for (std::uint32_t mask = 0; mask < half; ++mask) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double t = (mask >> i) & 1u ? -1.0 : 1.0;
            const auto& x = xs[std::size_t(i)];
            for (int j = 0; j < d; ++j) acc[std::size_t(j)] += t * x[std::size_t(j)];
        }
        total += sp.norm_certified(acc).hi;
    }
    const double avg = 2.0 * total / double(std::uint64_t(1) << n);
    if (avg <= 0) return 0;
    return std::sqrt(sq) / avg;
}

} // namespace banlab
