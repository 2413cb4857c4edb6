#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <banlab/operator.hpp>

#include <cmath>

using banlab::linear_map;
using banlab::matrix;
using banlab::operator_norm;
using banlab::operator_norm_exact;
using banlab::rational;
using banlab::space;
using testsup::rat;

namespace {

linear_map<double> random_map(testsup::rng& r, const space& dom, const space& cod) {
    matrix<double> m(cod.dim(), dom.dim());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = r.gauss();
    return linear_map<double>(std::move(m), dom, cod);
}

linear_map<rational> random_rational_map(testsup::rng& r, const space& dom, const space& cod) {
    matrix<rational> m(cod.dim(), dom.dim());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = r.small_rational();
    return linear_map<rational>(std::move(m), dom, cod);
}

linear_map<double> to_double_map(const linear_map<rational>& T) {
    matrix<double> m(T.mat.rows(), T.mat.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = banlab::to_double(T.mat(i, j));
    return linear_map<double>(std::move(m), T.domain, T.codomain);
}

} // namespace

TEST_CASE("identity between the extreme p-norms has norm equal to the dimension") {
    for (int d : {2, 3, 4}) {
        auto I = banlab::identity_map<rational>(
            space::lp(d, banlab::infinity));
        linear_map<rational> T(I.mat, space::lp(d, banlab::infinity), space::lp(d, 1.0));
        REQUIRE(operator_norm_exact(T) == rational(d));
        auto res = operator_norm(to_double_map(T));
        REQUIRE(res.b.lo == Catch::Approx(double(d)).margin(1e-9));
        REQUIRE(res.b.hi == Catch::Approx(double(d)).margin(1e-9));
    }
}

TEST_CASE("search brackets the exact value on polyhedral domains") {
    testsup::rng r(11ull);
    std::vector<double> dom_ps = {1.0, banlab::infinity};
    std::vector<double> cod_ps = {1.0, banlab::infinity};
    for (int trial = 0; trial < 40; ++trial) {
        int dd = r.uniform(1, 6), cd = r.uniform(1, 6);
        space dom = space::lp(dd, dom_ps[std::size_t(trial) % 2]);
        space cod = space::lp(cd, cod_ps[std::size_t(trial / 2) % 2]);
        auto T = random_rational_map(r, dom, cod);
        rational exact = operator_norm_exact(T);
        auto res = operator_norm(to_double_map(T), banlab::opnorm_mode::search, 200,
                                 std::uint64_t(trial));
        double ev = banlab::to_double(exact);
        INFO(dom.describe() << " -> " << cod.describe() << " trial " << trial);
        REQUIRE(res.b.lo <= ev * (1 + 1e-9) + 1e-12);
        REQUIRE(res.b.hi >= ev * (1 - 1e-9) - 1e-12);
        REQUIRE(res.b.lo >= ev - 1e-6 * std::max(1.0, ev));
        REQUIRE_FALSE(res.method.empty());
        if (!res.witness.empty()) {
            double wn = dom.norm_certified(res.witness).hi;
            double in = cod.norm_certified(to_double_map(T).apply(res.witness)).lo;
            REQUIRE(in >= (res.b.lo - 1e-9) * wn - 1e-9);
        }
    }
}

TEST_CASE("norm of a composition never exceeds the product of norms") {
    testsup::rng r(12ull);
    std::vector<space> mids = {space::lp(3, 2.0), space::lp(2, 1.0),
                               space::lp(4, banlab::infinity)};
    for (int trial = 0; trial < 20; ++trial) {
        space dom = space::lp(r.uniform(1, 4), trial % 2 ? 1.0 : 2.0);
        space mid = mids[std::size_t(trial) % mids.size()];
        space cod = space::lp(r.uniform(1, 4), trial % 3 ? banlab::infinity : 2.0);
        auto B = random_map(r, dom, mid);
        auto A = random_map(r, mid, cod);
        auto AB = banlab::compose(A, B);
        double na = operator_norm(A, banlab::opnorm_mode::search, 120, 1).b.hi;
        double nb = operator_norm(B, banlab::opnorm_mode::search, 120, 2).b.hi;
        double nab = operator_norm(AB, banlab::opnorm_mode::search, 120, 3).b.lo;
        REQUIRE(nab <= na * nb * (1 + 1e-9) + 1e-9);
    }
}

TEST_CASE("application and composition match plain matrix arithmetic") {
    testsup::rng r(13ull);
    space d3 = space::lp(3, 2.0), d2 = space::lp(2, 2.0);
    auto B = random_map(r, d3, d2);
    auto A = random_map(r, d2, d3);
    auto AB = banlab::compose(A, B);
    for (int trial = 0; trial < 5; ++trial) {
        auto x = r.gauss_vec(3);
        auto direct = A.apply(B.apply(x));
        auto fused = AB.apply(x);
        for (int i = 0; i < 3; ++i)
            REQUIRE(fused[std::size_t(i)] == Catch::Approx(direct[std::size_t(i)]).margin(1e-12));
    }
}

TEST_CASE("rank-one maps factor their norm through the dual") {
    space X = space::lp(2, 1.0);
    space Y = space::lp(3, 1.0);
    // T x = f(x) y with f = (1, -2), y = (1, 1, -1)
    matrix<rational> m(3, 2);
    std::vector<rational> f{rat(1), rat(-2)};
    std::vector<rational> y{rat(1), rat(1), rat(-1)};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = y[std::size_t(i)] * f[std::size_t(j)];
    linear_map<rational> T(std::move(m), X, Y);
    rational expect = X.dual_norm_exact<rational>(f) * Y.norm<rational>(y);
    REQUIRE(expect == rational(6));
    REQUIRE(operator_norm_exact(T) == expect);
}

TEST_CASE("kron of a monomial outer map multiplies norms") {
    testsup::rng r(14ull);
    const std::vector<double> outer_ps = {1.0, 2.0, banlab::infinity};
    for (int trial = 0; trial < 10; ++trial) {
        const int m = r.uniform(1, 3), n = r.uniform(m, 3);
        const double outer_p = outer_ps[std::size_t(trial) % 3];
        std::vector<int> rows(std::size_t(n), 0);
        for (int i = 0; i < n; ++i) rows[std::size_t(i)] = i;
        std::shuffle(rows.begin(), rows.end(), r.eng);
        matrix<double> A(n, m);
        for (int j = 0; j < m; ++j) {
            double v = r.gauss();
            A(rows[std::size_t(j)], j) = (v == 0.0) ? 1.0 : v;
        }
        linear_map<double> Am(std::move(A), space::lp(m, outer_p), space::lp(n, outer_p));
        space ud = space::lp(2, 1.0), uc = space::lp(2, banlab::infinity);
        auto U = random_map(r, ud, uc);
        auto K = banlab::kron(Am, U);
        auto nk = operator_norm(K, banlab::opnorm_mode::search, 120, std::uint64_t(trial));
        auto na = operator_norm(Am, banlab::opnorm_mode::search, 120, 1);
        auto nu = operator_norm(U, banlab::opnorm_mode::search, 120, 2);
        INFO("trial " << trial);
        REQUIRE(std::fabs(nk.b.hi - na.b.hi * nu.b.hi) <= 1e-9 * std::max(1.0, nk.b.hi));
        REQUIRE(nk.b.exact);
    }
}

TEST_CASE("shape and route guards") {
    space d2 = space::lp(2, 2.0), d3 = space::lp(3, 2.0);
    matrix<double> m(2, 2);
    REQUIRE_THROWS_AS(linear_map<double>(m, d3, d2), std::invalid_argument);

    testsup::rng r(15ull);
    auto A = random_map(r, d2, d3);
    auto B = random_map(r, d2, d3);
    REQUIRE_THROWS_AS(banlab::compose(A, B), std::invalid_argument);

    // no exact route: euclidean codomain norms are irrational
    matrix<rational> q(2, 2);
    q(0, 0) = rat(1);
    q(1, 1) = rat(1);
    q(0, 1) = rat(1, 3);
    linear_map<rational> T(std::move(q), space::lp(2, 1.0), space::lp(2, 2.0));
    REQUIRE_THROWS_AS(operator_norm_exact(T), banlab::exactness_error);
}
