// Shared helpers for the test suite: tiny rational literals, seeded random
// vectors, and matrix construction from nested lists.
#pragma once

#include <banlab/rational.hpp>
#include <banlab/matrix.hpp>
#include <banlab/space.hpp>
#include <banlab/operator.hpp>

#include <random>
#include <vector>

namespace testsup {

inline banlab::rational rat(long long n, long long d = 1) {
    return banlab::rational(n, d);
}

template <class S>
banlab::matrix<S> mat(const std::vector<std::vector<S>>& rows) {
    banlab::matrix<S> a(int(rows.size()), int(rows.at(0).size()));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = rows[std::size_t(i)][std::size_t(j)];
    return a;
}

template <class S>
banlab::linear_map<S> map_of(const std::vector<std::vector<S>>& rows, banlab::space dom,
                             banlab::space cod) {
    return banlab::linear_map<S>(mat<S>(rows), std::move(dom), std::move(cod));
}

// Deterministic per-test generator; never seeded from time.
struct rng {
    std::mt19937_64 eng;
    explicit rng(std::uint64_t seed) : eng(seed) {}

    double gauss() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(eng);
    }
    int uniform(int lo, int hi) { // inclusive
        std::uniform_int_distribution<int> d(lo, hi);
        return d(eng);
    }
    banlab::rational small_rational(int num_range = 6, int den_range = 4) {
        int n = uniform(-num_range, num_range);
        int d = uniform(1, den_range);
        return banlab::rational(n, d);
    }
    std::vector<double> gauss_vec(int n) {
        std::vector<double> v(std::size_t(n), 0.0);
        for (auto& x : v) x = gauss();
        return v;
    }
};

} // namespace testsup
