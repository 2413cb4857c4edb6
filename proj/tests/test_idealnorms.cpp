// Factorization-norm machinery: the operator-norm floor, witness validity,
// the ideal axiom via explicit composites, two-factorization combination
// through a 2-dim unconditional sum, the projection counterexample trend,
// and the basis-projection sweep.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "banlab/idealnorm.hpp"
#include "banlab/tsirelson.hpp"
#include "test_support.hpp"

using banlab::infinity;
using banlab::space;

namespace {

const double root2 = std::sqrt(2.0);

// Independent oracle for the identity of l_1^2 through the euclidean plane.
// Any factorization I = R S with S invertible reduces, via a QL step on the
// euclidean side, to S = [[1,0],[b,c]] up to scaling; both norms then have
// closed forms, and a shrinking grid recovers the minimum.
double plane_identity_oracle() {
    auto value = [](double b, double c) {
        double snorm = std::max(std::sqrt(1.0 + b * b), c);
        double worst = 0;
        for (double s : {-1.0, 1.0}) {
            double t1 = 1.0 - s * b / c;
            double t2 = s / c;
            worst = std::max(worst, std::sqrt(t1 * t1 + t2 * t2));
        }
        return snorm * worst;
    };
    double blo = -2, bhi = 2, clo = 0.05, chi = 2.5;
    double best = banlab::infinity, bb = 0, bc = 1;
    for (int round = 0; round < 8; ++round) {
        const int steps = 160;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) {
                double b = blo + (bhi - blo) * i / steps;
                double c = clo + (chi - clo) * j / steps;
                if (c <= 1e-6) continue;
                double v = value(b, c);
                if (v < best) {
                    best = v;
                    bb = b;
                    bc = c;
                }
            }
        double bw = (bhi - blo) / steps * 4, cw = (chi - clo) / steps * 4;
        blo = bb - bw, bhi = bb + bw;
        clo = std::max(1e-6, bc - cw), chi = bc + cw;
    }
    return best;
}

banlab::linear_map<double> identity_map(const space& sp) {
    banlab::matrix<double> m(sp.dim(), sp.dim());
    for (int i = 0; i < sp.dim(); ++i) m(i, i) = 1;
    return banlab::linear_map<double>(std::move(m), sp, sp);
}

} // namespace

TEST_CASE("factorizations respect the operator-norm floor and reproduce the target") {
    testsup::rng rg(31);
    auto fam = banlab::lp_family(2.0, 6);
    double ps[3] = {1.0, 2.0, infinity};
    for (int trial = 0; trial < 8; ++trial) {
        int dn = rg.uniform(1, 4), cn = rg.uniform(1, 4);
        auto dom = space::lp(dn, ps[std::size_t(rg.uniform(0, 2))]);
        auto cod = space::lp(cn, ps[std::size_t(rg.uniform(0, 2))]);
        banlab::matrix<double> m(cn, dn);
        for (int i = 0; i < cn; ++i)
            for (int j = 0; j < dn; ++j) m(i, j) = rg.gauss();
        banlab::linear_map<double> T(m, dom, cod);

        auto f = banlab::gamma_upper(T, fam, 100, std::uint64_t(trial));
        REQUIRE(f.residual <= 1e-9);
        REQUIRE(f.through.dim() <= 6);
        double floor = banlab::operator_norm(T, banlab::opnorm_mode::search, 200, 1).b.lo;
        REQUIRE(f.value.hi >= floor - 1e-6);
        REQUIRE(f.value.lo <= f.value.hi + 1e-12);
    }
}

TEST_CASE("identity factors through its own family at one") {
    auto I3 = identity_map(space::lp(3, 2.0));
    auto f = banlab::gamma_upper(I3, banlab::lp_family(2.0, 6), 100, 0);
    REQUIRE(f.value.hi <= 1 + 1e-6);
    REQUIRE(f.value.hi >= 1 - 1e-6);
    REQUIRE(f.residual <= 1e-9);
}

TEST_CASE("the plane pays the euclidean distance") {
    double oracle = plane_identity_oracle();
    REQUIRE(std::fabs(oracle - root2) <= 1e-9);

    auto I2 = identity_map(space::lp(2, 1.0));
    auto f = banlab::gamma_upper(I2, banlab::lp_family(2.0, 5), 200, 0);
    REQUIRE(std::fabs(f.value.hi - oracle) <= 1e-6);
    REQUIRE(f.residual <= 1e-9);
}

TEST_CASE("rank-one targets factor at the product of the two norms") {
    {
        auto X = space::lp(3, 1.0);
        auto Y = space::lp(2, 2.0);
        std::vector<double> fvec{1, -2, 3};
        std::vector<double> xvec{1.2, 1.6};
        banlab::matrix<double> m(2, 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = xvec[std::size_t(i)] * fvec[std::size_t(j)];
        banlab::linear_map<double> T(m, X, Y);
        double prod = X.dual_norm(fvec).hi * Y.norm_certified(xvec).hi;
        REQUIRE(std::fabs(prod - 6.0) <= 1e-12);
        auto f = banlab::gamma_upper(T, banlab::lp_family(2.0, 4), 120, 0);
        REQUIRE(std::fabs(f.value.hi - prod) <= 1e-6 * prod);
        REQUIRE(f.residual <= 1e-9);
    }
    {
        auto X = space::lp(2, infinity);
        auto Y = space::lp(2, 1.0);
        std::vector<double> fvec{1, 1};
        std::vector<double> xvec{0.5, -0.5};
        banlab::matrix<double> m(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) = xvec[std::size_t(i)] * fvec[std::size_t(j)];
        banlab::linear_map<double> T(m, X, Y);
        double prod = X.dual_norm(fvec).hi * Y.norm_certified(xvec).hi;
        REQUIRE(std::fabs(prod - 2.0) <= 1e-12);
        auto f = banlab::gamma_upper(T, banlab::lp_family(1.0, 3), 120, 0);
        REQUIRE(std::fabs(f.value.hi - prod) <= 1e-6 * prod);
        REQUIRE(f.residual <= 1e-9);
    }
}

TEST_CASE("composition cannot beat the ideal inequality") {
    auto fam = banlab::lp_family(2.0, 5);
    testsup::rng rg(47);
    double ps[3] = {1.0, 2.0, infinity};
    for (int trial = 0; trial < 5; ++trial) {
        int d0 = rg.uniform(1, 3), d1 = rg.uniform(1, 3), d2 = rg.uniform(1, 3),
            d3 = rg.uniform(1, 3);
        auto X0 = space::lp(d0, ps[std::size_t(rg.uniform(0, 2))]);
        auto X1 = space::lp(d1, ps[std::size_t(rg.uniform(0, 2))]);
        auto X2 = space::lp(d2, ps[std::size_t(rg.uniform(0, 2))]);
        auto X3 = space::lp(d3, ps[std::size_t(rg.uniform(0, 2))]);
        auto rnd = [&](const space& dom, const space& cod) {
            banlab::matrix<double> m(cod.dim(), dom.dim());
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) m(i, j) = rg.gauss();
            return banlab::linear_map<double>(std::move(m), dom, cod);
        };
        auto B = rnd(X0, X1);
        auto T = rnd(X1, X2);
        auto A = rnd(X2, X3);
        auto rep = banlab::ideal_axiom_check(A, T, B, fam, 80, std::uint64_t(trial));
        REQUIRE(rep.holds);
        REQUIRE(rep.left <= rep.right + 1e-9);
        REQUIRE(rep.composite.residual <= 1e-9);
    }

    // identity sandwich: both sides agree
    auto X = space::lp(2, 1.0);
    auto I = identity_map(X);
    auto rep = banlab::ideal_axiom_check(I, I, I, fam, 120, 3);
    REQUIRE(rep.holds);
    REQUIRE(std::fabs(rep.left - rep.right) <= 1e-9);

    // scaling comes out of the gamma estimate
    banlab::matrix<double> twice(2, 2);
    twice(0, 0) = 2;
    twice(1, 1) = 2;
    banlab::linear_map<double> A2(twice, X, X);
    auto ft = banlab::gamma_upper(I, fam, 120, 4);
    auto rep2 = banlab::ideal_axiom_check(A2, I, I, fam, 120, 4);
    REQUIRE(rep2.holds);
    REQUIRE(rep2.right == 2 * ft.value.hi);
    REQUIRE(rep2.left <= 2 * ft.value.hi + 1e-9);

    banlab::matrix<double> odd(3, 2);
    banlab::linear_map<double> Aodd(odd, X, space::lp(3, 1.0));
    REQUIRE_THROWS_AS(banlab::ideal_axiom_check(Aodd, Aodd, Aodd, fam, 20, 0),
                      std::invalid_argument);
}

TEST_CASE("stacked factorizations balance by duality") {
    auto X = space::lp(2, 2.0);
    auto Z = space::lp(2, 2.0);
    auto diagmap = [&](double a, double b, const space& dom, const space& cod) {
        banlab::matrix<double> m(2, 2);
        m(0, 0) = a;
        m(1, 1) = b;
        return banlab::linear_map<double>(std::move(m), dom, cod);
    };
    banlab::factorization f1{diagmap(1, 0, X, Z), diagmap(1, 0, Z, X), Z,
                             banlab::bound{1, 1, true}, 0.0};
    banlab::factorization f2{diagmap(0, 1, X, Z), diagmap(0, 1, Z, X), Z,
                             banlab::bound{1, 1, true}, 0.0};
    auto u2 = space::lp(2, 2.0);
    auto comb = banlab::combine_factorizations(f1, f2, u2, 64, 0);
    REQUIRE(comb.value.hi <= 2 + 1e-9);
    REQUIRE(comb.residual <= 1e-9);
    REQUIRE(comb.through.dim() == 4);

    // a zero second factorization changes nothing
    banlab::factorization fz{diagmap(0, 0, X, Z), diagmap(0, 0, Z, X), Z,
                             banlab::bound{0, 0, true}, 0.0};
    auto same = banlab::combine_factorizations(f1, fz, u2, 64, 0);
    REQUIRE(same.value.hi == f1.value.hi);
    REQUIRE(same.through.dim() == Z.dim());

    // random pair through the same l_1 block, combined over the l_1 plane;
    // a fine scaling grid is the oracle for the table minimum
    testsup::rng rg(11);
    auto dom = space::lp(2, 1.0);
    auto cod = space::lp(2, infinity);
    auto fam = std::vector<space>{space::lp(3, 1.0)};
    auto rnd = [&]() {
        banlab::matrix<double> m(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) = rg.gauss();
        return banlab::linear_map<double>(std::move(m), dom, cod);
    };
    auto g1 = banlab::gamma_upper(rnd(), fam, 80, 1);
    auto g2 = banlab::gamma_upper(rnd(), fam, 80, 2);
    auto u1 = space::lp(2, 1.0);
    auto comb2 = banlab::combine_factorizations(g1, g2, u1, 64, 3);
    REQUIRE(comb2.value.hi <= g1.value.hi + g2.value.hi + 1e-6);
    REQUIRE(comb2.residual <= 1e-9);

    double s1 = banlab::operator_norm(g1.s, banlab::opnorm_mode::search, 32, 3).b.hi;
    double s2 = banlab::operator_norm(g2.s, banlab::opnorm_mode::search, 32, 3).b.hi;
    double r1 = banlab::operator_norm(g1.r, banlab::opnorm_mode::search, 32, 3).b.hi;
    double r2 = banlab::operator_norm(g2.r, banlab::opnorm_mode::search, 32, 3).b.hi;
    auto table = [&](double t) {
        double lam = std::exp(t / 2), mu = std::exp(-t / 2);
        return (lam * s1 + mu * s2) * std::max(r1 / lam, r2 / mu);
    };
    double oracle = banlab::infinity, tbest = 0;
    for (int k = -4000; k <= 4000; ++k) {
        double t = k * 30.0 / 4000;
        if (double v = table(t); v < oracle) oracle = v, tbest = t;
    }
    for (double w = 30.0 / 4000; w > 1e-13; w /= 64) {
        double t0 = tbest;
        for (int k = -64; k <= 64; ++k) {
            double t = t0 + k * w / 64;
            if (double v = table(t); v < oracle) oracle = v, tbest = t;
        }
    }
    // the kink where both ratios agree is the exact minimizer for this u
    oracle = std::min(oracle, table(std::log(r1 / r2)));
    REQUIRE(comb2.value.hi <= oracle + 1e-6);
    REQUIRE(oracle <= r1 * s1 + r2 * s2 + 1e-9);

    // guards: the u-space must be a 2-dim unconditional table, the inner
    // spaces must agree, and the endpoints must match
    REQUIRE_THROWS_AS(banlab::combine_factorizations(f1, f2, space::lp(3, 1.0), 32, 0),
                      std::invalid_argument);
    auto skew = space::custom(2, "skew2", [](std::span<const double> v) {
        return std::max(std::fabs(v[0] + v[1]), std::fabs(v[0]));
    });
    REQUIRE_THROWS_AS(banlab::combine_factorizations(f1, f2, skew, 32, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(banlab::combine_factorizations(f1, g1, u1, 32, 0), std::invalid_argument);
}

TEST_CASE("projection pair stays cheap while the identity crosses the hilbert block") {
    struct expect {
        int n;
        double sum;
    };
    std::vector<expect> table{{1, 1.1892071150027210}, {2, 1.4142135623730951},
                              {4, 1.6817928305074290}};
    for (const auto& e : table) {
        auto rep = banlab::zn_counterexample(e.n, 4.0, 200, 0);
        REQUIRE_FALSE(rep.flagged);
        REQUIRE(rep.gamma_p1 <= 1 + 1e-6);
        REQUIRE(rep.gamma_p1 >= 1 - 1e-6);
        REQUIRE(rep.gamma_p2 <= 1 + 1e-6);
        REQUIRE(rep.gamma_p2 >= 1 - 1e-6);
        // the block-diagonal route lands on (2n)^{1/4}; recorded, and pinned
        // here to keep the trend table reproducible
        REQUIRE(std::fabs(rep.gamma_sum - e.sum) <= 1e-6);
        REQUIRE(std::fabs(e.sum - std::pow(2.0 * e.n, 0.25)) <= 1e-12);
    }

    auto flagged = banlab::zn_counterexample(2, 1.5, 40, 0);
    REQUIRE(flagged.flagged);
    REQUIRE_THROWS_AS(banlab::zn_counterexample(0, 4.0, 40, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(banlab::zn_counterexample(7, 4.0, 40, 0), std::invalid_argument);
}

TEST_CASE("basis projections through the coordinate family") {
    auto f = banlab::pi_rep_probe(space::lp(5, 1.0), banlab::lp_family(1.0, 6), 3, 120, 0);
    REQUIRE(f.value.hi <= 1 + 1e-6);
    REQUIRE(f.value.hi >= 1 - 1e-6);
    REQUIRE(f.residual <= 1e-9);

    auto g = banlab::pi_rep_probe(space::tsirelson_trunc(1.0, 4), banlab::lp_family(1.0, 4), 1,
                                  120, 0);
    REQUIRE(g.value.hi <= 1 + 1e-4);
    REQUIRE(g.value.hi >= 1 - 1e-6);

    // sweep on the truncated space: upper bounds grow with the head length
    auto fam = banlab::lp_family(1.0, 8);
    double prev = 0;
    std::vector<double> frozen{2.0, 4.0, 6.0};
    int idx = 0;
    for (int n : {2, 4, 8}) {
        auto h = banlab::pi_rep_probe(space::tsirelson_trunc(1.0, 8), fam, n, 120, 0);
        REQUIRE(h.value.hi >= prev - 1e-9);
        REQUIRE(std::fabs(h.value.hi - frozen[std::size_t(idx++)]) <= 1e-6);
        REQUIRE(h.residual <= 1e-9);
        prev = h.value.hi;
    }

    REQUIRE_THROWS_AS(banlab::head_space(space::lp(3, 1.0), 4), std::invalid_argument);
    auto es = space::esum(space::lp(2, 1.0), {space::lp(2, 2.0), space::lp(2, 2.0)});
    REQUIRE_THROWS_AS(banlab::head_space(es, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(banlab::gamma_upper(identity_map(space::lp(2, 1.0)), {}, 40, 0),
                      std::invalid_argument);
}

TEST_CASE("the dimension sweep family") {
    auto fam = banlab::lp_family(2.0, 6);
    REQUIRE(fam.size() == 6);
    for (int k = 0; k < 6; ++k) {
        REQUIRE(fam[std::size_t(k)].dim() == k + 1);
        REQUIRE(fam[std::size_t(k)].p() == 2.0);
    }
}
