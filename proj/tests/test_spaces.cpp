#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <banlab/probes.hpp>
#include <banlab/tsirelson.hpp>

#include <cmath>

using banlab::bound;
using banlab::rational;
using banlab::space;
using testsup::rat;

namespace {

std::vector<space> sample_zoo() {
    std::vector<space> zoo;
    for (double p : {1.0, 1.5, 2.0, 3.0, banlab::infinity})
        for (int d : {1, 2, 4}) zoo.push_back(space::lp(d, p));
    zoo.push_back(space::esum(space::lp(2, 1), {space::lp(2, 2.0), space::lp(3, banlab::infinity)}));
    zoo.push_back(space::esum(space::lp(2, 2.0),
                              {space::lp(2, 1.0),
                               space::esum(space::lp(2, banlab::infinity),
                                           {space::lp(1, 1.0), space::lp(2, 3.0)})}));
    zoo.push_back(space::tsirelson_trunc(1.0, 4));
    zoo.push_back(space::tsirelson_trunc(2.0, 5));
    zoo.push_back(space::dual_of(space::lp(3, 1.0)));
    zoo.push_back(space::dual_of(space::tsirelson_trunc(1.0, 3)));
    return zoo;
}

// max(|a + b|, |a|): a norm on R^2 whose basis is deliberately skew, so the
// sign cube acts on it nontrivially.
space skew_plane() {
    return space::custom(2, "skew2", [](std::span<const double> v) {
        return std::max(std::fabs(v[0] + v[1]), std::fabs(v[0]));
    });
}

double pairing(std::span<const double> f, std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * x[i];
    return s;
}

} // namespace

TEST_CASE("certified norms obey the axioms across the space zoo") {
    testsup::rng r(41ull);
    for (const auto& sp : sample_zoo()) {
        for (int trial = 0; trial < 12; ++trial) {
            auto x = r.gauss_vec(sp.dim());
            auto y = r.gauss_vec(sp.dim());
            bound nx = sp.norm_certified(x);
            bound ny = sp.norm_certified(y);
            REQUIRE(nx.lo <= nx.hi);
            REQUIRE(nx.lo >= 0.0);

            std::vector<double> sum(x);
            for (int i = 0; i < sp.dim(); ++i) sum[std::size_t(i)] += y[std::size_t(i)];
            bound ns = sp.norm_certified(sum);
            INFO(sp.describe());
            REQUIRE(ns.lo <= nx.hi + ny.hi + 1e-9);

            const double lam = -1.75;
            std::vector<double> lx(x);
            for (auto& t : lx) t *= lam;
            bound nl = sp.norm_certified(lx);
            REQUIRE(nl.lo <= std::fabs(lam) * nx.hi * (1 + 1e-12) + 1e-12);
            REQUIRE(std::fabs(lam) * nx.lo <= nl.hi * (1 + 1e-12) + 1e-12);

            std::vector<double> zero(std::size_t(sp.dim()), 0.0);
            bound nz = sp.norm_certified(zero);
            REQUIRE(nz.hi <= 1e-12);
        }
    }
}

TEST_CASE("sign flips never move an unconditional norm") {
    testsup::rng r(42ull);
    // the exact lane exists for p in {1, inf} and their sums; stay inside it
    std::vector<space> exact_zoo = {
        space::lp(3, 1.0), space::lp(4, banlab::infinity),
        space::esum(space::lp(2, 1.0), {space::lp(2, banlab::infinity), space::lp(1, 1.0)}),
        space::tsirelson_trunc(1.0, 4)};
    for (const auto& sp : exact_zoo) {
        if (!sp.is_unconditional() || sp.dim() > 6) continue;
        for (int trial = 0; trial < 6; ++trial) {
            std::vector<rational> x(std::size_t(sp.dim()), rational(0));
            for (auto& v : x) v = r.small_rational();
            rational base = sp.norm<rational>(x);
            for (unsigned mask = 1; mask < (1u << sp.dim()); ++mask) {
                std::vector<rational> fx(x);
                for (int i = 0; i < sp.dim(); ++i)
                    if (mask >> i & 1u) fx[std::size_t(i)] = -fx[std::size_t(i)];
                REQUIRE(sp.norm<rational>(fx) == base);
            }
        }
    }
    REQUIRE_FALSE(skew_plane().is_unconditional());
}

TEST_CASE("dual norm intervals bracket every pairing") {
    testsup::rng r(43ull);
    for (const auto& sp : sample_zoo()) {
        for (int trial = 0; trial < 8; ++trial) {
            auto f = r.gauss_vec(sp.dim());
            auto x = r.gauss_vec(sp.dim());
            bound df = sp.dual_norm(f, 120, std::uint64_t(trial));
            bound nx = sp.norm_certified(x);
            REQUIRE(df.lo <= df.hi * (1 + 1e-9) + 1e-12);
            REQUIRE(std::fabs(pairing(f, x)) <= df.hi * nx.hi * (1 + 1e-9) + 1e-9);
        }
    }
}

TEST_CASE("polyhedral dual norms agree with vertex enumeration") {
    testsup::rng r(44ull);
    std::vector<space> polys = {space::lp(2, 1.0), space::lp(3, banlab::infinity),
                                space::esum(space::lp(2, 1.0),
                                            {space::lp(2, banlab::infinity), space::lp(1, 1.0)})};
    for (const auto& sp : polys) {
        REQUIRE(sp.is_polyhedral());
        auto verts = sp.ball_vertices();
        REQUIRE_FALSE(verts.empty());
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<rational> f(std::size_t(sp.dim()), rational(0));
            for (auto& v : f) v = r.small_rational();
            rational best(0);
            for (const auto& vert : verts) {
                rational s(0);
                for (int i = 0; i < sp.dim(); ++i) s += f[std::size_t(i)] * vert[std::size_t(i)];
                best = std::max(best, rational(banlab::abs_val(s)));
            }
            REQUIRE(sp.dual_norm_exact<rational>(f) == best);
        }
    }
    REQUIRE_FALSE(space::lp(2, 2.0).is_polyhedral());
}

TEST_CASE("truncated tsirelson spaces delegate to the sequence norm") {
    testsup::rng r(45ull);
    for (double p : {1.0, 2.0}) {
        space sp = space::tsirelson_trunc(p, 5);
        REQUIRE(sp.dim() == 5);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> x = r.gauss_vec(5);
            std::vector<std::pair<int, double>> c;
            for (int i = 0; i < 5; ++i)
                if (x[std::size_t(i)] != 0.0) c.emplace_back(i + 1, x[std::size_t(i)]);
            double expect = banlab::tp_norm(banlab::fin_supp<double>(std::move(c)), p);
            REQUIRE(sp.norm_certified(x).lo == Catch::Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("frozen scalar values") {
    std::vector<double> v{1.0, -2.0};
    REQUIRE(space::lp(2, 1.0).norm_certified(v).lo == Catch::Approx(3.0));
    REQUIRE(space::lp(2, 2.0).norm_certified(v).lo == Catch::Approx(std::sqrt(5.0)));
    REQUIRE(space::lp(2, banlab::infinity).norm_certified(v).lo == Catch::Approx(2.0));
    bound d = space::lp(2, 1.0).dual_norm(v);
    REQUIRE(d.lo == Catch::Approx(2.0));
    REQUIRE(d.hi == Catch::Approx(2.0));

    std::vector<rational> w{rat(1), rat(-2)};
    REQUIRE(space::lp(2, 1.0).dual_norm_exact<rational>(w) == rational(2));
    REQUIRE(space::lp(2, banlab::infinity).dual_norm_exact<rational>(w) == rational(3));
}

TEST_CASE("random unit vectors land on the sphere") {
    for (const auto& sp : sample_zoo()) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto v = sp.random_unit_vector(seed);
            bound b = sp.norm_certified(v);
            REQUIRE(b.lo <= 1.0 + 1e-9);
            REQUIRE(b.hi >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("unconditional constant probe") {
    REQUIRE(banlab::unconditional_constant(space::lp(3, 1.0)) == Catch::Approx(1.0));
    REQUIRE(banlab::unconditional_constant(space::lp(4, 2.5)) == Catch::Approx(1.0));
    REQUIRE(banlab::unconditional_constant(space::tsirelson_trunc(1.0, 6)) ==
            Catch::Approx(1.0));

    double skew = banlab::unconditional_constant(skew_plane());
    REQUIRE(skew > 1.2);

    REQUIRE_THROWS_AS(banlab::unconditional_constant(space::lp(17, 2.0)),
                      std::invalid_argument);
}

TEST_CASE("banach-mazur upper estimates") {
    for (const auto& sp : {space::lp(2, 1.0), space::lp(3, 2.0), space::tsirelson_trunc(1.0, 3)}) {
        double self = banlab::banach_mazur_upper(sp, sp, 120, 1);
        REQUIRE(self >= 1.0);
        REQUIRE(self <= 1.0 + 1e-9);
    }
    REQUIRE(banlab::banach_mazur_upper(space::lp(2, 1.0), space::lp(2, banlab::infinity), 200, 1) <=
            1.0 + 1e-6);
    double d12 = banlab::banach_mazur_upper(space::lp(2, 1.0), space::lp(2, 2.0), 200, 1);
    REQUIRE(d12 == Catch::Approx(std::sqrt(2.0)).margin(1e-6));
    double d2i = banlab::banach_mazur_upper(space::lp(3, 2.0), space::lp(3, banlab::infinity), 200, 1);
    REQUIRE(d2i <= std::sqrt(3.0) + 1e-6);
    REQUIRE(d2i >= 1.0);

    REQUIRE_THROWS_AS(banlab::banach_mazur_upper(space::lp(2, 1.0), space::lp(3, 1.0)),
                      std::invalid_argument);
}

TEST_CASE("cotype 2 ratio probe") {
    space l14 = space::lp(4, 1.0);
    space linf4 = space::lp(4, banlab::infinity);
    auto basis = [](const space& sp) {
        std::vector<std::vector<double>> xs;
        for (int i = 0; i < sp.dim(); ++i) xs.push_back(banlab::basis_vector<double>(sp, i));
        return xs;
    };
    REQUIRE(banlab::cotype2_ratio(l14, basis(l14)) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(banlab::cotype2_ratio(linf4, basis(linf4)) == Catch::Approx(2.0).margin(1e-12));

    std::vector<std::vector<double>> single{{0.3, -0.7}};
    REQUIRE(banlab::cotype2_ratio(space::lp(2, 2.0), single) == Catch::Approx(1.0).margin(1e-12));

    std::vector<std::vector<double>> none;
    REQUIRE_THROWS_AS(banlab::cotype2_ratio(l14, none), std::invalid_argument);
    std::vector<std::vector<double>> many(17, std::vector<double>(4, 1.0));
    REQUIRE_THROWS_AS(banlab::cotype2_ratio(l14, many), std::invalid_argument);
}

TEST_CASE("space identity and guards") {
    REQUIRE(space::lp(2, 1.0) == space::lp(2, 1.0));
    REQUIRE(space::lp(2, 1.0) != space::lp(2, 2.0));
    REQUIRE(space::lp(2, 1.0) != space::lp(3, 1.0));
    space e1 = space::esum(space::lp(2, 1.0), {space::lp(2, 2.0), space::lp(1, 1.0)});
    space e2 = space::esum(space::lp(2, 1.0), {space::lp(2, 2.0), space::lp(1, 1.0)});
    REQUIRE(e1 == e2);

    REQUIRE_THROWS_AS(space::lp(0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(space::lp(2, 0.5), std::invalid_argument);
    std::vector<double> short_vec{1.0};
    REQUIRE_THROWS_AS(space::lp(2, 1.0).norm_certified(short_vec), std::invalid_argument);
}
