#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <banlab/tsirelson.hpp>

#include <bit>
#include <optional>

using banlab::admissibility;
using banlab::fin_supp;
using banlab::rational;
using testsup::rat;

namespace {

// Reference evaluator with no interval shortcut. Any successive family of
// finite sets can be intersected with the support and then read off as
// consecutive runs of a subset of the support, so enumerating (subset, run
// split) pairs covers every admissible family; admissibility is checked
// against the true indices, not positions. Exponential and proud of it:
// supports up to 8 only.
struct brute_tstar {
    std::vector<std::pair<int, rational>> c;
    admissibility adm;
    std::vector<std::optional<rational>> memo;

    brute_tstar(const fin_supp<rational>& x, admissibility a)
        : c(x.c), adm(a), memo(std::size_t(1) << c.size()) {}

    rational value(unsigned mask) {
        if (mask == 0) return rational(0);
        if (memo[mask]) return *memo[mask];
        rational best(0);
        for (std::size_t i = 0; i < c.size(); ++i)
            if (mask >> i & 1u) best = std::max(best, rational(banlab::abs_val(c[i].second)));
        for (unsigned sub = mask; sub; sub = (sub - 1) & mask) {
            std::vector<int> q;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (sub >> i & 1u) q.push_back(int(i));
            const int m = int(q.size());
            const int first_index = c[std::size_t(q[0])].first;
            for (unsigned cut = 0; cut < (1u << (m - 1)); ++cut) {
                const int k = std::popcount(cut) + 1;
                const bool admissible =
                    adm == admissibility::nonstrict ? k <= first_index : k < first_index;
                if (!admissible) continue;
                if (sub == mask && k == 1) continue; // the whole vector as its own single
                                                     // block never beats the running max
                rational sum(0);
                unsigned chunk = 0;
                for (int i = 0; i < m; ++i) {
                    chunk |= 1u << unsigned(q[std::size_t(i)]);
                    const bool boundary = (i == m - 1) || (cut >> i & 1u);
                    if (boundary) {
                        sum += value(chunk);
                        chunk = 0;
                    }
                }
                best = std::max(best, rational(sum / 2));
            }
        }
        memo[mask] = best;
        return best;
    }

    rational norm() { return value((1u << c.size()) - 1u); }
};

fin_supp<rational> flat(std::initializer_list<int> idx) {
    std::vector<std::pair<int, rational>> c;
    for (int i : idx) c.emplace_back(i, rational(1));
    return fin_supp<rational>(std::move(c));
}

fin_supp<rational> random_vector(testsup::rng& r, int max_support, int max_index) {
    const int m = r.uniform(1, max_support);
    std::vector<int> pool(std::size_t(max_index), 0);
    for (int i = 0; i < max_index; ++i) pool[std::size_t(i)] = i + 1;
    std::shuffle(pool.begin(), pool.end(), r.eng);
    std::vector<std::pair<int, rational>> c;
    for (int i = 0; i < m; ++i) {
        rational v = r.small_rational();
        if (i == 0 && v == 0) v = rational(1, 2);
        if (v != 0) c.emplace_back(pool[std::size_t(i)], v);
    }
    return fin_supp<rational>(std::move(c));
}

} // namespace

TEST_CASE("interval dynamic programming matches the unrestricted family enumeration") {
    testsup::rng r(20260817ull);
    for (int trial = 0; trial < 100; ++trial) {
        auto x = random_vector(r, 8, 12);
        rational nonstrict_val, strict_val;
        for (auto adm : {admissibility::nonstrict, admissibility::strict}) {
            brute_tstar oracle(x, adm);
            rational expect = oracle.norm();
            rational got = tstar_norm(x, adm);
            INFO("trial " << trial);
            REQUIRE(expect == got);
            (adm == admissibility::nonstrict ? nonstrict_val : strict_val) = got;
        }
        REQUIRE(strict_val <= nonstrict_val);
    }
}

TEST_CASE("flat sums across the first levels") {
    REQUIRE(tstar_norm(flat({1, 2})) == rational(1));
    REQUIRE(tstar_norm(flat({2, 3})) == rational(1));
    REQUIRE(tstar_norm(flat({3, 4, 5, 6})) == rat(3, 2));
    REQUIRE(tstar_norm(flat({1, 2, 3, 4, 5, 6, 7, 8})) == rational(2));
    REQUIRE(tstar_norm(flat({1})) == rational(1));
}

TEST_CASE("p-convexified norm agrees with the squared-vector reference at p = 2") {
    testsup::rng r(7ull);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_vector(r, 6, 10);
        std::vector<std::pair<int, rational>> sq;
        for (const auto& [i, v] : x.c) sq.emplace_back(i, rational(v * v));
        brute_tstar oracle(fin_supp<rational>(std::move(sq)), admissibility::nonstrict);
        const double expect = std::sqrt(banlab::to_double(oracle.norm()));
        REQUIRE(banlab::tp_norm(x, 2.0) == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("norm value satisfies its own defining recursion exactly") {
    testsup::rng r(99ull);
    for (int trial = 0; trial < 25; ++trial) {
        auto x = random_vector(r, 8, 12);
        REQUIRE(banlab::fixed_point_residual_exact(x) == rational(0));
        fin_supp<double> xd;
        for (const auto& [i, v] : x.c) xd.c.emplace_back(i, banlab::to_double(v));
        REQUIRE(banlab::fixed_point_residual(xd, 1.0) <= 1e-9);
    }
}

TEST_CASE("admissible partitions follow the index convention") {
    banlab::admissible_partition one{{{1, 1}}};
    REQUIRE(one.valid(admissibility::nonstrict));
    REQUIRE_FALSE(one.valid(admissibility::strict));

    banlab::admissible_partition two{{{2, 3}, {5, 6}}};
    REQUIRE(two.valid(admissibility::nonstrict));
    REQUIRE_FALSE(two.valid(admissibility::strict));

    banlab::admissible_partition late{{{3, 3}, {5, 6}}};
    REQUIRE(late.valid(admissibility::strict));

    banlab::admissible_partition empty{};
    REQUIRE_FALSE(empty.valid(admissibility::nonstrict));
    banlab::admissible_partition touching{{{2, 3}, {3, 4}}};
    REQUIRE_FALSE(touching.valid(admissibility::nonstrict));
    banlab::admissible_partition below{{{0, 1}}};
    REQUIRE_FALSE(below.valid(admissibility::nonstrict));
}

TEST_CASE("disjoint normalized blocks keep their lower ratio") {
    SECTION("two singleton blocks at p = 1 sit exactly on the floor") {
        std::vector<fin_supp<double>> blocks;
        blocks.push_back(fin_supp<double>({{2, 1.0}}));
        blocks.push_back(fin_supp<double>({{3, 1.0}}));
        auto res = banlab::block_lp_probe<double>(blocks, {1.0, 1.0}, 1.0);
        REQUIRE(res.admissible_layout);
        REQUIRE(res.ratio == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(res.lower_ok);
        REQUIRE(res.upper_checked);
        REQUIRE(res.upper_ok);
    }
    SECTION("a layout starting at index 1 with two blocks is flagged, not asserted") {
        std::vector<fin_supp<double>> blocks;
        blocks.push_back(fin_supp<double>({{1, 1.0}}));
        blocks.push_back(fin_supp<double>({{2, 1.0}}));
        auto res = banlab::block_lp_probe<double>(blocks, {1.0, 1.0}, 1.0);
        REQUIRE_FALSE(res.admissible_layout);
    }
    SECTION("seeded generator output passes for p in {1, 2, 4}") {
        for (double p : {1.0, 2.0, 4.0}) {
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                auto [blocks, coeff] = banlab::random_disjoint_blocks(seed);
                auto res = banlab::block_lp_probe<double>(blocks, coeff, p);
                INFO("p=" << p << " seed=" << seed);
                REQUIRE(res.admissible_layout);
                REQUIRE(res.lower_ok);
                REQUIRE(res.ratio >= std::pow(2.0, -1.0 / p) - 1e-9);
                if (p == 1.0) {
                    REQUIRE(res.upper_checked);
                    REQUIRE(res.upper_ok);
                    REQUIRE(res.ratio <= 1.0 + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("finite-section embedding probe reports a usable distortion") {
    auto res = banlab::co_condition2_probe(2, 8, 2.0, 80, 3);
    REQUIRE(res.distortion_upper >= 1.0 - 1e-9);
    REQUIRE(res.distortion_upper < 4.0);
    REQUIRE(res.certified);
    REQUIRE(res.map.rows() == 8);
    REQUIRE(res.map.cols() == 2);

    auto loose = banlab::co_condition2_probe(1, 6, 3.0, 40, 1);
    REQUIRE(loose.distortion_upper >= 1.0 - 1e-9);
    REQUIRE_FALSE(loose.certified);
}

TEST_CASE("support and argument guards") {
    std::vector<std::pair<int, rational>> big;
    for (int i = 1; i <= 25; ++i) big.emplace_back(i, rational(1));
    fin_supp<rational> wide(std::move(big));
    REQUIRE_THROWS_AS(tstar_norm(wide), std::invalid_argument);

    std::vector<std::pair<int, double>> below{{0, 1.0}};
    REQUIRE_THROWS_AS(fin_supp<double>(std::move(below)), std::invalid_argument);
    std::vector<std::pair<int, double>> dup{{2, 1.0}, {2, 3.0}};
    REQUIRE_THROWS_AS(fin_supp<double>(std::move(dup)), std::invalid_argument);

    REQUIRE_THROWS_AS(banlab::random_disjoint_blocks(0, 9), std::invalid_argument);
    REQUIRE_THROWS_AS(banlab::co_condition2_probe(0, 4, 2.0, 10, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(banlab::co_condition2_probe(2, 1, 2.0, 10, 0), std::invalid_argument);
    std::vector<fin_supp<double>> no_blocks;
    std::vector<double> no_coeffs;
    REQUIRE_THROWS_AS(banlab::block_lp_probe<double>(no_blocks, no_coeffs, 1.0),
                      std::invalid_argument);
}
