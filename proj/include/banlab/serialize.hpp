#pragma once

// JSON round-trips for the value types that cross the CLI boundary: spaces,
// vectors, linear maps, tensor decompositions, generalized diagonals.
// Scalars travel as strings. Exact scalars keep fraction form ("3/4", "2"),
// doubles use the shortest round-trip decimal; both sides accept both forms,
// and decimal-to-exact conversion is performed exactly. Custom-norm spaces
// hold an opaque oracle and do not serialize.

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "banlab/diagonal.hpp"

namespace banlab {

using json = nlohmann::json;

inline std::string scalar_to_string(const rational& x) { return to_string_exact(x); }

inline std::string scalar_to_string(double x) {
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw std::invalid_argument("cannot serialize NaN");
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("scalar_to_string: to_chars failed");
    return std::string(buf, end);
}

template <class S>
S scalar_from_string(const std::string& s);

template <>
inline rational scalar_from_string<rational>(const std::string& s) {
    return rational_from_string(s);
}

template <>
inline double scalar_from_string<double>(const std::string& s) {
    if (s == "inf") return infinity;
    if (s == "-inf") return -infinity;
    if (s.find('/') != std::string::npos)
        return double(rational_from_string(s));
    double x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad number literal: " + s);
    return x;
}

template <class S>
json vector_to_json(const std::vector<S>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(scalar_to_string(x));
    return a;
}

template <class S>
std::vector<S> vector_from_json(const json& a) {
    if (!a.is_array()) throw std::invalid_argument("vector: expected a JSON array");
    std::vector<S> v;
    v.reserve(a.size());
    for (const auto& e : a) {
        if (e.is_string())
            v.push_back(scalar_from_string<S>(e.get<std::string>()));
        else if (e.is_number())
            v.push_back(S(e.get<double>()));
        else
            throw std::invalid_argument("vector: entries must be strings or numbers");
    }
    return v;
}

inline json space_to_json(const space& sp) {
    json j;
    switch (sp.kind()) {
        case space_kind::lp:
            j["kind"] = "lp";
            j["dim"] = sp.dim();
            j["p"] = scalar_to_string(sp.p());
            break;
        case space_kind::esum: {
            j["kind"] = "esum";
            j["outer"] = space_to_json(sp.outer());
            json in = json::array();
            for (const auto& b : sp.inners()) in.push_back(space_to_json(b));
            j["inners"] = std::move(in);
            break;
        }
        case space_kind::tsirelson_trunc:
            j["kind"] = "tsirelson_trunc";
            j["p"] = scalar_to_string(sp.p());
            j["max_index"] = sp.max_index();
            j["admissibility"] = sp.adm() == admissibility::strict ? "strict" : "nonstrict";
            break;
        case space_kind::dual_space:
            j["kind"] = "dual";
            j["of"] = space_to_json(sp.predual());
            break;
        case space_kind::custom:
            throw std::invalid_argument("custom-norm spaces do not serialize");
    }
    return j;
}

inline space space_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("space: expected an object with a kind tag");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "lp")
        return space::lp(j.at("dim").get<int>(),
                         scalar_from_string<double>(j.at("p").get<std::string>()));
    if (kind == "esum") {
        std::vector<space> inners;
        for (const auto& b : j.at("inners")) inners.push_back(space_from_json(b));
        return space::esum(space_from_json(j.at("outer")), std::move(inners));
    }
    if (kind == "tsirelson_trunc") {
        auto adm = admissibility::nonstrict;
        if (j.contains("admissibility")) {
            const std::string a = j.at("admissibility").get<std::string>();
            if (a == "strict")
                adm = admissibility::strict;
            else if (a != "nonstrict")
                throw std::invalid_argument("space: bad admissibility value: " + a);
        }
        return space::tsirelson_trunc(
            scalar_from_string<double>(j.at("p").get<std::string>()),
            j.at("max_index").get<int>(), adm);
    }
    if (kind == "dual") return space::dual_of(space_from_json(j.at("of")));
    throw std::invalid_argument("space: unknown kind: " + kind);
}

template <class S>
json map_to_json(const linear_map<S>& T) {
    json rows = json::array();
    for (int r = 0; r < T.mat.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < T.mat.cols(); ++c) row.push_back(scalar_to_string(T.mat(r, c)));
        rows.push_back(std::move(row));
    }
    json j;
    j["domain"] = space_to_json(T.domain);
    j["codomain"] = space_to_json(T.codomain);
    j["rows"] = std::move(rows);
    return j;
}

template <class S>
linear_map<S> map_from_json(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("linear map: expected an object");
    space dom = space_from_json(j.at("domain"));
    space cod = space_from_json(j.at("codomain"));
    const json& rows = j.at("rows");
    if (!rows.is_array() || int(rows.size()) != cod.dim())
        throw std::invalid_argument("linear map: row count must equal codomain dim");
    matrix<S> m(cod.dim(), dom.dim());
    for (int r = 0; r < cod.dim(); ++r) {
        const json& row = rows.at(std::size_t(r));
        if (!row.is_array() || int(row.size()) != dom.dim())
            throw std::invalid_argument("linear map: row length must equal domain dim");
        for (int c = 0; c < dom.dim(); ++c) {
            const json& e = row.at(std::size_t(c));
            m(r, c) = e.is_string() ? scalar_from_string<S>(e.get<std::string>())
                                    : S(e.get<double>());
        }
    }
    return linear_map<S>(std::move(m), std::move(dom), std::move(cod));
}

// A decomposition is an array of {r, s} pairs; the endpoint spaces live on
// the maps, so an empty decomposition has no serialized form.
template <class S>
json decomposition_to_json(const tensor_decomposition<S>& D) {
    if (D.terms().empty())
        throw std::invalid_argument("empty decomposition has no serialized form");
    json a = json::array();
    for (const auto& t : D.terms()) {
        json pair;
        pair["r"] = map_to_json(t.r);
        pair["s"] = map_to_json(t.s);
        a.push_back(std::move(pair));
    }
    return a;
}

template <class S>
tensor_decomposition<S> decomposition_from_json(const json& a) {
    if (!a.is_array() || a.empty())
        throw std::invalid_argument("decomposition: expected a nonempty JSON array");
    std::vector<tensor_term<S>> terms;
    for (const auto& pair : a)
        terms.push_back({map_from_json<S>(pair.at("r")), map_from_json<S>(pair.at("s"))});
    space X = terms.front().r.codomain;
    space Y = terms.front().r.domain;
    return tensor_decomposition<S>(std::move(X), std::move(Y), std::move(terms));
}

template <class S>
json gd_to_json(const generalized_diagonal<S>& g) {
    json rows = json::array();
    const int n = g.coeffs.rows();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int jx = 0; jx < n; ++jx) row.push_back(scalar_to_string(g.coeffs(i, jx)));
        rows.push_back(std::move(row));
    }
    json j;
    j["x"] = space_to_json(g.X);
    j["y"] = space_to_json(g.Y);
    j["coeffs"] = std::move(rows);
    return j;
}

template <class S>
generalized_diagonal<S> gd_from_json(const json& j) {
    space X = space_from_json(j.at("x"));
    space Y = space_from_json(j.at("y"));
    const json& rows = j.at("coeffs");
    if (!rows.is_array() || int(rows.size()) != Y.dim())
        throw std::invalid_argument("generalized diagonal: coeff rows must equal dim Y");
    matrix<S> a(Y.dim(), Y.dim());
    for (int r = 0; r < Y.dim(); ++r) {
        const json& row = rows.at(std::size_t(r));
        if (!row.is_array() || int(row.size()) != Y.dim())
            throw std::invalid_argument("generalized diagonal: coeff matrix must be square");
        for (int c = 0; c < Y.dim(); ++c) {
            const json& e = row.at(std::size_t(c));
            a(r, c) = e.is_string() ? scalar_from_string<S>(e.get<std::string>())
                                    : S(e.get<double>());
        }
    }
    return generalized_diagonal<S>(std::move(X), std::move(Y), std::move(a));
}

} // namespace banlab
