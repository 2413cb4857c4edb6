#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <banlab/tensor.hpp>

#include <cmath>

using banlab::linear_map;
using banlab::matrix;
using banlab::rational;
using banlab::space;
using banlab::tensor_decomposition;
using banlab::tensor_term;
using testsup::rat;

namespace {

linear_map<double> random_map(testsup::rng& r, const space& dom, const space& cod) {
    matrix<double> m(cod.dim(), dom.dim());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = r.gauss();
    return linear_map<double>(std::move(m), dom, cod);
}

tensor_decomposition<double> random_dec(testsup::rng& r, const space& X, const space& Y,
                                        int nterms) {
    std::vector<tensor_term<double>> ts;
    for (int k = 0; k < nterms; ++k)
        ts.push_back({random_map(r, Y, X), random_map(r, X, Y)});
    return tensor_decomposition<double>(X, Y, std::move(ts));
}

} // namespace

TEST_CASE("contraction is the sum of term compositions") {
    testsup::rng r(21ull);
    space X = space::lp(3, 2.0), Y = space::lp(2, 1.0);
    auto D = random_dec(r, X, Y, 3);
    auto C = banlab::contract(D);
    REQUIRE(C.domain == X);
    REQUIRE(C.codomain == X);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double direct = 0;
            for (const auto& t : D.terms())
                for (int a = 0; a < 2; ++a) direct += t.r.mat(i, a) * t.s.mat(a, j);
            REQUIRE(C.mat(i, j) == Catch::Approx(direct).margin(1e-12));
        }
}

TEST_CASE("lower estimates never cross the representation upper bound") {
    testsup::rng r(22ull);
    std::vector<std::pair<space, space>> pairs = {
        {space::lp(2, 1.0), space::lp(2, 2.0)},
        {space::lp(3, 2.0), space::lp(2, banlab::infinity)},
        {space::lp(2, banlab::infinity), space::lp(3, 1.0)}};
    for (const auto& [X, Y] : pairs) {
        for (int trial = 0; trial < 8; ++trial) {
            auto D = random_dec(r, X, Y, 1 + trial % 3);
            auto up = banlab::projective_upper(D, 120, std::uint64_t(trial));
            double lo = banlab::projective_lower(D, 120, std::uint64_t(trial));
            INFO(X.describe() << " x " << Y.describe() << " trial " << trial);
            REQUIRE(up.lo <= up.hi * (1 + 1e-9) + 1e-12);
            REQUIRE(lo <= up.hi * (1 + 1e-9) + 1e-9);
        }
    }
}

TEST_CASE("improvement rewrites the representation, not the tensor") {
    testsup::rng r(23ull);
    space X = space::lp(2, 1.0), Y = space::lp(2, banlab::infinity);
    for (int trial = 0; trial < 6; ++trial) {
        auto D = random_dec(r, X, Y, 3);
        auto before = banlab::dense_tensor(D);
        auto up0 = banlab::projective_upper(D, 100, 5);
        auto E = banlab::improve_decomposition(D, 100, 5);
        auto after = banlab::dense_tensor(E);
        double scale = std::max(1.0, before.max_abs());
        REQUIRE(banlab::max_abs_diff(before, after) <= 1e-12 * scale);
        auto up1 = banlab::projective_upper(E, 100, 5);
        REQUIRE(up1.hi <= up0.hi * (1 + 1e-9) + 1e-9);
    }
}

TEST_CASE("single terms are reproduced at their exact product value") {
    space X = space::lp(2, 1.0), Y = space::lp(2, banlab::infinity);
    matrix<rational> rm(2, 2), sm(2, 2);
    rm(0, 0) = rat(1); rm(0, 1) = rat(-2); rm(1, 0) = rat(1, 2); rm(1, 1) = rat(3);
    sm(0, 0) = rat(2); sm(0, 1) = rat(1); sm(1, 0) = rat(0); sm(1, 1) = rat(-1, 3);
    linear_map<rational> R(rm, Y, X), S(sm, X, Y);
    tensor_decomposition<rational> D(X, Y, {{R, S}});
    rational expect = banlab::operator_norm_exact(R) * banlab::operator_norm_exact(S);
    REQUIRE(banlab::projective_upper_exact(D) == expect);
    REQUIRE(banlab::projective_lower_exact(D) <= expect);
}

TEST_CASE("rank-one tensors are certified to within one percent at small dimension") {
    testsup::rng r(24ull);
    std::vector<std::pair<space, space>> pairs = {
        {space::lp(2, 1.0), space::lp(2, banlab::infinity)},
        {space::lp(3, 2.0), space::lp(2, 1.0)},
        {space::lp(2, 2.0), space::lp(3, 2.0)}};
    for (const auto& [X, Y] : pairs) {
        for (int trial = 0; trial < 6; ++trial) {
            auto D = random_dec(r, X, Y, 1);
            auto up = banlab::projective_upper(D, 160, std::uint64_t(trial));
            double lo = banlab::projective_lower(D, 160, std::uint64_t(trial));
            INFO(X.describe() << " x " << Y.describe() << " trial " << trial);
            REQUIRE(lo >= 0.99 * up.lo - 1e-9);
        }
    }
}

TEST_CASE("rational decompositions widen losslessly") {
    space X = space::lp(2, 1.0), Y = space::lp(2, banlab::infinity);
    matrix<rational> rm(2, 2), sm(2, 2);
    rm(0, 0) = rat(3, 4); rm(1, 1) = rat(-5, 8);
    sm(0, 1) = rat(7, 16); sm(1, 0) = rat(1);
    tensor_decomposition<rational> D(
        X, Y, {{linear_map<rational>(rm, Y, X), linear_map<rational>(sm, X, Y)}});
    auto W = banlab::widened(D);
    REQUIRE(W.terms().size() == 1);
    REQUIRE(W.terms()[0].r.mat(0, 0) == 0.75);
    REQUIRE(W.terms()[0].r.mat(1, 1) == -0.625);
    REQUIRE(W.terms()[0].s.mat(0, 1) == 0.4375);
}

TEST_CASE("redundant splittings collapse to the single-term value") {
    testsup::rng r(26ull);
    space X = space::lp(2, 1.0), Y = space::lp(3, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        auto R = random_map(r, Y, X);
        auto S = random_map(r, X, Y);
        std::vector<tensor_term<double>> ts;
        for (double share : {0.5, 0.3, 0.2}) {
            matrix<double> rm = R.mat;
            rm *= share;
            ts.push_back({linear_map<double>(std::move(rm), Y, X), S});
        }
        tensor_decomposition<double> D(X, Y, std::move(ts));
        auto E = banlab::improve_decomposition(D, 200, std::uint64_t(trial));
        double value = banlab::projective_upper(E, 200, 0).hi;
        double expect = banlab::operator_norm(R).b.hi * banlab::operator_norm(S).b.hi;
        INFO("trial " << trial);
        REQUIRE(value <= expect * 1.01 + 1e-9);
        REQUIRE(value >= expect * (1 - 1e-9) - 1e-9);
    }
}

namespace {

// Extreme operators of the unit ball for 2-dim polyhedral domains: the ball
// is a product of codomain balls in vertex coordinates, so extreme maps send
// the coordinate frame to codomain ball vertices.
std::vector<matrix<double>> extreme_ops(const space& dom, const space& cod) {
    std::vector<std::vector<double>> V;
    for (const auto& vq : cod.ball_vertices()) {
        std::vector<double> v;
        for (const auto& q : vq) v.push_back(banlab::to_double(q));
        V.push_back(std::move(v));
    }
    std::vector<matrix<double>> out;
    const int cd = cod.dim();
    for (const auto& c1 : V)
        for (const auto& c2 : V) {
            matrix<double> R(cd, 2);
            if (dom.p() == 1.0) {
                for (int i = 0; i < cd; ++i) {
                    R(i, 0) = c1[std::size_t(i)];
                    R(i, 1) = c2[std::size_t(i)];
                }
            } else { // l_inf^2: images of (1,1) and (1,-1) are the vertices
                for (int i = 0; i < cd; ++i) {
                    R(i, 0) = (c1[std::size_t(i)] + c2[std::size_t(i)]) / 2;
                    R(i, 1) = (c1[std::size_t(i)] - c2[std::size_t(i)]) / 2;
                }
            }
            out.push_back(std::move(R));
        }
    return out;
}

} // namespace

TEST_CASE("alternating maximization matches extreme-pair enumeration at dims 2") {
    testsup::rng r(27ull);
    space X = space::lp(2, 1.0), Y = space::lp(2, banlab::infinity);
    auto exR = extreme_ops(Y, X); // candidates for the R slot, maps Y -> X
    auto exS = extreme_ops(X, Y);
    for (int trial = 0; trial < 8; ++trial) {
        banlab::dual_form B{X, Y, banlab::dense4<double>(2, 2), std::nullopt, "random"};
        for (auto& c : B.coeffs.v) c = r.gauss();
        double oracle = 0;
        for (const auto& Rm : exR)
            for (const auto& Sm : exS) oracle = std::max(oracle, std::fabs(B.eval(Rm, Sm)));
        auto win = banlab::injective_norm(B, 200, std::uint64_t(trial));
        INFO("trial " << trial);
        REQUIRE(win.lo <= oracle * (1 + 1e-9) + 1e-12);
        REQUIRE(win.lo >= 0.99 * oracle - 1e-9);
        REQUIRE(banlab::injective_upper(B) >= oracle * (1 - 1e-9));
    }
}

TEST_CASE("zero forms and factorized forms have known values") {
    space X = space::lp(2, 1.0), Y = space::lp(2, 2.0);
    banlab::dual_form Z{X, Y, banlab::dense4<double>(2, 2), std::nullopt, "zero"};
    REQUIRE(banlab::injective_upper(Z) == 0.0);
    auto zw = banlab::injective_norm(Z, 60, 0);
    REQUIRE(zw.lo == 0.0);
    REQUIRE(zw.hi == 0.0);

    std::vector<double> xstar{1.0, 0.0}, y{0.0, 1.0}, f{0.6, 0.8}, x{1.0, 0.0};
    auto B = banlab::factorized_point_form(X, Y, xstar, y, f, x);
    double expect = X.dual_norm(xstar).hi * Y.norm_certified(y).hi * Y.dual_norm(f).hi *
                    X.norm_certified(x).hi;
    REQUIRE(banlab::injective_upper(B) == Catch::Approx(expect).margin(1e-12));
    auto win = banlab::injective_norm(B, 120, 1);
    REQUIRE(win.lo >= 0.99 * expect - 1e-9);
    REQUIRE(win.lo <= expect * (1 + 1e-9) + 1e-12);
}

TEST_CASE("dual forms provide consistent injective windows") {
    space X = space::lp(2, 1.0), Y = space::lp(2, 2.0);
    auto B = banlab::coordinate_trace_form(X, Y, 0);
    auto win = banlab::injective_norm(B, 120, 9);
    REQUIRE(win.lo <= win.hi * (1 + 1e-9) + 1e-12);
    REQUIRE(win.hi <= banlab::injective_upper(B) * (1 + 1e-9) + 1e-12);
}

TEST_CASE("term endpoint checks") {
    space X = space::lp(2, 1.0), Y = space::lp(2, 2.0), Z = space::lp(3, 2.0);
    testsup::rng r(25ull);
    auto good_r = random_map(r, Y, X);
    auto bad_s = random_map(r, Z, Y);
    std::vector<tensor_term<double>> ts{{good_r, bad_s}};
    REQUIRE_THROWS_AS(tensor_decomposition<double>(X, Y, std::move(ts)), std::invalid_argument);
}
