// Experiment runner. Every subcommand builds an experiment_config, dispatches
// through run_command (a pure function of config; all randomness flows from
// the seed), and prints the report body. Wall time is never part of the body:
// JSON mode appends a separate "runtime-ms:" line, CSV mode keeps it in the
// final column. Exit codes: 0 success, 2 validation error, 3 a verification
// probe inside the command failed.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "banlab/idealnorm.hpp"
#include "banlab/probes.hpp"
#include "banlab/report.hpp"

namespace banlab {
namespace {

struct probe_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json_arg(const std::string& arg) {
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return json::parse(arg);
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open input file: " + arg);
    json j;
    in >> j;
    return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <class S>
std::vector<S> parse_scalar_list(const std::string& s) {
    std::vector<S> v;
    for (const auto& tok : split(s, ','))
        if (!tok.empty()) v.push_back(scalar_from_string<S>(tok));
    return v;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> v;
    for (const auto& tok : split(s, ','))
        if (!tok.empty()) v.push_back(std::stoi(tok));
    return v;
}

double parse_p(const std::string& s) {
    double p = scalar_from_string<double>(s);
    if (!(p >= 1)) throw std::invalid_argument("p must be >= 1 (or inf): " + s);
    return p;
}

std::string p_str(double p) {
    if (std::isinf(p)) return "inf";
    return scalar_to_string(p);
}

space space_arg(const json& options, const char* key) {
    const json& v = options.at(key);
    if (v.is_string()) return space_from_json(load_json_arg(v.get<std::string>()));
    return space_from_json(v);
}

json object_arg(const json& options, const char* key) {
    const json& v = options.at(key);
    if (v.is_string()) return load_json_arg(v.get<std::string>());
    return v;
}

std::string opt_str(const json& options, const char* key, const std::string& dflt = "") {
    if (!options.contains(key)) {
        if (dflt.empty()) throw std::invalid_argument(std::string("missing option: ") + key);
        return dflt;
    }
    return options.at(key).get<std::string>();
}

int opt_int(const json& options, const char* key, int dflt) {
    return options.contains(key) ? options.at(key).get<int>() : dflt;
}

bool opt_flag(const json& options, const char* key) {
    return options.contains(key) && options.at(key).get<bool>();
}

void require_inexact(const experiment_config& cfg) {
    if (cfg.exact)
        throw std::invalid_argument("exact mode is not available for command " + cfg.command);
}

json verify_detail(const gd_report& v) {
    json d;
    d["commutes"] = v.commutes;
    d["unit"] = v.unit;
    d["commute-residual"] = scalar_to_string(v.commute_residual);
    d["unit-residual"] = scalar_to_string(v.unit_residual);
    return d;
}

// Exact-lane report for a constructed diagonal: rational upper and lower,
// dense verification, probe failure on a bad construction.
template <class S>
void gd_exact_report(const tensor_decomposition<S>& D, run_report& r) {
    rational up = projective_upper_exact(D);
    rational lo = projective_lower_exact(D);
    auto v = verify_gd(D);
    r.value = to_double(up);
    r.upper = r.value;
    r.lower = to_double(lo);
    r.exact = true;
    r.detail = verify_detail(v);
    r.detail["terms"] = D.terms().size();
    r.detail["upper-exact"] = to_string_exact(up);
    r.detail["lower-exact"] = to_string_exact(lo);
    if (!v.commutes || !v.unit) throw probe_failure("generalized diagonal verification failed");
}

run_report base_report(const experiment_config& cfg) {
    run_report r;
    r.command = cfg.command;
    r.seed = cfg.seed;
    r.budget = cfg.budget;
    return r;
}

std::vector<run_report> run_command(const experiment_config& cfg);

run_report cmd_norm(const experiment_config& cfg, bool dual) {
    run_report r = base_report(cfg);
    space sp = space_arg(cfg.options, "space");
    const std::string vec = opt_str(cfg.options, "vec");
    std::ostringstream ps;
    ps << "space=" << sp.describe() << " vec=" << vec << " budget=" << cfg.budget;
    r.parameters = ps.str();
    if (cfg.exact) {
        auto v = parse_scalar_list<rational>(vec);
        rational val = dual ? sp.dual_norm_exact(v) : sp.norm<rational>(v);
        r.value = r.lower = r.upper = to_double(val);
        r.exact = true;
        r.detail["value-exact"] = to_string_exact(val);
        return r;
    }
    auto v = parse_scalar_list<double>(vec);
    bound b = dual ? sp.dual_norm(v, cfg.budget, cfg.seed) : sp.norm_certified(v);
    r.value = b.hi;
    r.lower = b.lo;
    r.upper = b.hi;
    r.exact = b.exact;
    return r;
}

run_report cmd_opnorm(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    json mj = object_arg(cfg.options, "map");
    if (cfg.exact) {
        auto T = map_from_json<rational>(mj);
        std::ostringstream ps;
        ps << "map=" << T.domain.describe() << "->" << T.codomain.describe()
           << " exact=1 budget=" << cfg.budget;
        r.parameters = ps.str();
        rational val = operator_norm_exact(T);
        r.value = r.lower = r.upper = to_double(val);
        r.exact = true;
        r.detail["value-exact"] = to_string_exact(val);
        return r;
    }
    auto T = map_from_json<double>(mj);
    std::ostringstream ps;
    ps << "map=" << T.domain.describe() << "->" << T.codomain.describe()
       << " exact=0 budget=" << cfg.budget;
    r.parameters = ps.str();
    auto res = operator_norm(T, opnorm_mode::search, cfg.budget, cfg.seed);
    r.value = res.b.hi;
    r.lower = res.b.lo;
    r.upper = res.b.hi;
    r.exact = res.b.exact;
    r.detail["method"] = res.method;
    if (!res.witness.empty()) r.detail["witness"] = vector_to_json(res.witness);
    return r;
}

run_report cmd_projnorm(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    json dj = object_arg(cfg.options, "decomp");
    const bool improve = opt_flag(cfg.options, "improve");
    if (cfg.exact) {
        auto D = decomposition_from_json<rational>(dj);
        std::ostringstream ps;
        ps << "x=" << D.X().describe() << " y=" << D.Y().describe()
           << " terms=" << D.terms().size() << " improve=0 budget=" << cfg.budget;
        r.parameters = ps.str();
        rational up = projective_upper_exact(D);
        rational lo = projective_lower_exact(D);
        r.value = r.upper = to_double(up);
        r.lower = to_double(lo);
        r.exact = true;
        r.detail["upper-exact"] = to_string_exact(up);
        r.detail["lower-exact"] = to_string_exact(lo);
        return r;
    }
    auto D = decomposition_from_json<double>(dj);
    std::ostringstream ps;
    ps << "x=" << D.X().describe() << " y=" << D.Y().describe() << " terms=" << D.terms().size()
       << " improve=" << (improve ? 1 : 0) << " budget=" << cfg.budget;
    r.parameters = ps.str();
    if (improve) D = improve_decomposition(D, cfg.budget, cfg.seed);
    bound up = projective_upper(D, cfg.budget, cfg.seed);
    double lo = projective_lower(D, cfg.budget, cfg.seed);
    r.value = up.hi;
    r.upper = up.hi;
    r.lower = lo;
    r.exact = up.exact;
    if (improve) r.detail["terms-after"] = D.terms().size();
    if (opt_flag(cfg.options, "emit")) r.detail["decomposition"] = decomposition_to_json(D);
    return r;
}

run_report cmd_gd_cyclic(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    const int n = opt_int(cfg.options, "n", 2);
    const double p = parse_p(opt_str(cfg.options, "p", "2"));
    std::ostringstream ps;
    ps << "n=" << n << " p=" << p_str(p) << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto D = signed_cyclic_diagonal<rational>(n, p);
    gd_exact_report(D, r);
    return r;
}

run_report cmd_gd_lpq(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    auto nks = parse_int_list(opt_str(cfg.options, "nks"));
    const int i = opt_int(cfg.options, "i", 1);
    const double p = parse_p(opt_str(cfg.options, "p", "1"));
    const double q = parse_p(opt_str(cfg.options, "q", "inf"));
    std::ostringstream ps;
    ps << "nks=" << opt_str(cfg.options, "nks") << " i=" << i << " p=" << p_str(p)
       << " q=" << p_str(q) << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto res = lpq_gd<rational>(nks, i, p, q);
    gd_exact_report(res.D, r);
    r.detail["m"] = res.m;
    r.detail["ks"] = res.ks;
    r.detail["dim-xi"] = res.Xi.dim();
    r.detail["dim-xkm"] = res.Xkm.dim();
    return r;
}

run_report cmd_gd_assemble(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    const int en = opt_int(cfg.options, "en", 2);
    const double ep = parse_p(opt_str(cfg.options, "ep", "1"));
    const int xn = opt_int(cfg.options, "xn", 2);
    const double xp = parse_p(opt_str(cfg.options, "xp", "2"));
    std::ostringstream ps;
    ps << "en=" << en << " ep=" << p_str(ep) << " xn=" << xn << " xp=" << p_str(xp)
       << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto De = signed_cyclic_diagonal<rational>(en, ep);
    auto Dx = signed_cyclic_diagonal<rational>(xn, xp);
    auto D = assemble_tensor_diagonal(De, Dx);
    gd_exact_report(D, r);
    r.detail["dim"] = D.X().dim();
    return r;
}

run_report cmd_gd_minimize(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    space X = cfg.options.contains("x")
                  ? space_arg(cfg.options, "x")
                  : space::lp(opt_int(cfg.options, "n", 2),
                              parse_p(opt_str(cfg.options, "p", "2")));
    space Y = cfg.options.contains("y") ? space_arg(cfg.options, "y") : X;
    std::ostringstream ps;
    ps << "x=" << X.describe() << " y=" << Y.describe() << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto res = min_gd_norm(X, Y, cfg.budget, cfg.seed);
    r.value = res.upper;
    r.upper = res.upper;
    r.lower = res.lower;
    r.detail["coeffs"] = vector_to_json(res.coeffs);
    return r;
}

run_report cmd_gd_verify(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    tensor_decomposition<rational> D = [&] {
        if (cfg.options.contains("gd"))
            return gd_expand(gd_from_json<rational>(object_arg(cfg.options, "gd")));
        return decomposition_from_json<rational>(object_arg(cfg.options, "decomp"));
    }();
    std::ostringstream ps;
    ps << "x=" << D.X().describe() << " y=" << D.Y().describe() << " terms=" << D.terms().size()
       << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto v = verify_gd(D);
    r.detail = verify_detail(v);
    r.value = r.lower = r.upper = (v.commutes && v.unit) ? 1 : 0;
    r.exact = true;
    if (!v.commutes || !v.unit) throw probe_failure("generalized diagonal verification failed");
    return r;
}

run_report cmd_gamma(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    const std::string through = opt_str(cfg.options, "through", "lp");
    if (through != "lp")
        throw std::invalid_argument("gamma: only the lp family is available, got " + through);
    const double p = parse_p(opt_str(cfg.options, "p", "2"));
    const int kmax = opt_int(cfg.options, "kmax", 8);
    auto T = map_from_json<double>(object_arg(cfg.options, "target"));
    std::ostringstream ps;
    ps << "target=" << T.domain.describe() << "->" << T.codomain.describe() << " through=lp p="
       << p_str(p) << " kmax=" << kmax << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto f = gamma_upper(T, lp_family(p, kmax), cfg.budget, cfg.seed);
    r.value = f.value.hi;
    r.upper = f.value.hi;
    r.lower = f.value.lo;
    r.exact = f.value.exact;
    r.detail["through"] = f.through.describe();
    r.detail["residual"] = scalar_to_string(f.residual);
    return r;
}

std::vector<run_report> cmd_zn_demo(const experiment_config& cfg) {
    require_inexact(cfg);
    const double p = parse_p(opt_str(cfg.options, "p", "4"));
    auto ns = parse_int_list(opt_str(cfg.options, "ns", "1,2,4"));
    std::vector<run_report> out;
    for (int n : ns) {
        auto t0 = std::chrono::steady_clock::now();
        run_report r = base_report(cfg);
        std::ostringstream ps;
        ps << "n=" << n << " p=" << p_str(p) << " budget=" << cfg.budget;
        r.parameters = ps.str();
        auto rep = zn_counterexample(n, p, cfg.budget, detail::mix_seed(cfg.seed, std::uint64_t(n)));
        r.value = r.lower = r.upper = rep.gamma_sum;
        r.detail["gamma-p1"] = scalar_to_string(rep.gamma_p1);
        r.detail["gamma-p2"] = scalar_to_string(rep.gamma_p2);
        r.detail["flagged"] = rep.flagged;
        if (rep.flagged) r.detail["note"] = "p <= 2 is outside the intended regime";
        r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        out.push_back(std::move(r));
    }
    return out;
}

run_report cmd_pi_probe(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    space Y = cfg.options.contains("y")
                  ? space_arg(cfg.options, "y")
                  : space::tsirelson_trunc(parse_p(opt_str(cfg.options, "tstar-p", "1")),
                                           opt_int(cfg.options, "max-index", 8));
    const int n = opt_int(cfg.options, "n", 2);
    const double fp = parse_p(opt_str(cfg.options, "family-p", "1"));
    const int kmax = opt_int(cfg.options, "family-kmax", 8);
    std::ostringstream ps;
    ps << "y=" << Y.describe() << " n=" << n << " family-p=" << p_str(fp) << " kmax=" << kmax
       << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto f = pi_rep_probe(Y, lp_family(fp, kmax), n, cfg.budget, cfg.seed);
    r.value = f.value.hi;
    r.upper = f.value.hi;
    r.lower = f.value.lo;
    r.exact = f.value.exact;
    r.detail["through"] = f.through.describe();
    r.detail["residual"] = scalar_to_string(f.residual);
    return r;
}

run_report cmd_tnorm(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    const std::string coeffs = opt_str(cfg.options, "coeffs");
    const double p = parse_p(opt_str(cfg.options, "p", "1"));
    const auto adm =
        opt_flag(cfg.options, "strict") ? admissibility::strict : admissibility::nonstrict;
    std::ostringstream ps;
    ps << "coeffs=" << coeffs << " p=" << p_str(p) << " adm="
       << (adm == admissibility::strict ? "strict" : "nonstrict") << " exact="
       << (cfg.exact ? 1 : 0) << " budget=" << cfg.budget;
    r.parameters = ps.str();
    if (cfg.exact) {
        if (p != 1)
            throw std::invalid_argument("tnorm: exact mode requires p = 1 (roots leave the exact lane)");
        auto cs = parse_scalar_list<rational>(coeffs);
        std::vector<std::pair<int, rational>> supp;
        for (int i = 0; i < int(cs.size()); ++i)
            if (cs[std::size_t(i)] != 0) supp.emplace_back(i + 1, cs[std::size_t(i)]);
        fin_supp<rational> x(std::move(supp));
        rational val = tstar_norm(x, adm);
        rational res = x.empty() ? rational(0) : fixed_point_residual_exact(x, 1, adm);
        r.value = r.lower = r.upper = to_double(val);
        r.exact = true;
        r.detail["value-exact"] = to_string_exact(val);
        r.detail["fixed-point-residual"] = to_string_exact(res);
        if (res != 0) throw probe_failure("tnorm: fixed-point identity violated");
        return r;
    }
    auto cs = parse_scalar_list<double>(coeffs);
    std::vector<std::pair<int, double>> supp;
    for (int i = 0; i < int(cs.size()); ++i)
        if (cs[std::size_t(i)] != 0) supp.emplace_back(i + 1, cs[std::size_t(i)]);
    fin_supp<double> x(std::move(supp));
    r.value = r.lower = r.upper = tp_norm(x, p, adm);
    r.detail["fixed-point-residual"] =
        scalar_to_string(x.empty() ? 0.0 : fixed_point_residual(x, p, adm));
    return r;
}

run_report cmd_tprobe_co1(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    const double p = parse_p(opt_str(cfg.options, "p", "1"));
    const auto adm =
        opt_flag(cfg.options, "strict") ? admissibility::strict : admissibility::nonstrict;
    if (cfg.options.contains("blocks")) {
        const std::string btxt = opt_str(cfg.options, "blocks");
        std::vector<fin_supp<double>> blocks;
        for (const auto& btok : split(btxt, ';')) {
            std::vector<std::pair<int, double>> c;
            for (const auto& etok : split(btok, ',')) {
                auto kv = split(etok, ':');
                if (kv.size() != 2)
                    throw std::invalid_argument("tprobe co1: block entries are index:value");
                c.emplace_back(std::stoi(kv[0]), scalar_from_string<double>(kv[1]));
            }
            blocks.emplace_back(std::move(c));
        }
        auto coeff = parse_scalar_list<double>(opt_str(cfg.options, "coeffs"));
        std::ostringstream ps;
        ps << "p=" << p_str(p) << " blocks=" << btxt << " budget=" << cfg.budget;
        r.parameters = ps.str();
        auto res = block_lp_probe(blocks, coeff, p, adm, cfg.tol);
        r.value = r.lower = r.upper = res.ratio;
        r.detail["admissible-layout"] = res.admissible_layout;
        r.detail["lower-ok"] = res.lower_ok;
        if (res.upper_checked) r.detail["upper-ok"] = res.upper_ok;
        if (!res.note.empty()) r.detail["note"] = res.note;
        if (!res.lower_ok || (res.upper_checked && !res.upper_ok))
            throw probe_failure("tprobe co1: forced bound violated");
        return r;
    }
    const int count = opt_int(cfg.options, "count", 50);
    std::ostringstream ps;
    ps << "p=" << p_str(p) << " count=" << count << " budget=" << cfg.budget;
    r.parameters = ps.str();
    double mn = infinity, mx = 0;
    bool all_ok = true;
    for (int j = 0; j < count; ++j) {
        auto [blocks, coeff] = random_disjoint_blocks(detail::mix_seed(cfg.seed, std::uint64_t(j)));
        auto res = block_lp_probe(blocks, coeff, p, adm, cfg.tol);
        mn = std::min(mn, res.ratio);
        mx = std::max(mx, res.ratio);
        all_ok = all_ok && res.lower_ok && (!res.upper_checked || res.upper_ok);
    }
    r.value = r.lower = r.upper = mn;
    r.detail["max-ratio"] = scalar_to_string(mx);
    r.detail["floor"] = scalar_to_string(std::pow(2.0, -1.0 / p));
    r.detail["all-ok"] = all_ok;
    if (!all_ok) throw probe_failure("tprobe co1: forced bound violated");
    return r;
}

run_report cmd_tprobe_co2(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    const int n = opt_int(cfg.options, "n", 2);
    const int K = opt_int(cfg.options, "bigk", 2 * n);
    const double p = parse_p(opt_str(cfg.options, "p", "2"));
    std::ostringstream ps;
    ps << "n=" << n << " K=" << K << " p=" << p_str(p) << " budget=" << cfg.budget;
    r.parameters = ps.str();
    auto res = co_condition2_probe(n, K, p, cfg.budget, cfg.seed);
    r.value = r.lower = r.upper = res.distortion_upper;
    r.exact = res.certified;
    if (!res.note.empty()) r.detail["note"] = res.note;
    return r;
}

run_report cmd_bm_dist(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    space X = cfg.options.contains("x")
                  ? space_arg(cfg.options, "x")
                  : space::lp(opt_int(cfg.options, "xn", 2),
                              parse_p(opt_str(cfg.options, "xp", "1")));
    space Y = cfg.options.contains("y")
                  ? space_arg(cfg.options, "y")
                  : space::lp(opt_int(cfg.options, "yn", 2),
                              parse_p(opt_str(cfg.options, "yp", "2")));
    std::ostringstream ps;
    ps << "x=" << X.describe() << " y=" << Y.describe() << " budget=" << cfg.budget;
    r.parameters = ps.str();
    r.value = banach_mazur_upper(X, Y, cfg.budget, cfg.seed);
    r.upper = r.value;
    r.lower = 1; // d(X,Y) >= 1 always
    return r;
}

run_report cmd_cotype2(const experiment_config& cfg) {
    run_report r = base_report(cfg);
    require_inexact(cfg);
    space sp = space_arg(cfg.options, "space");
    std::vector<std::vector<double>> xs;
    std::string which;
    if (opt_flag(cfg.options, "basis")) {
        for (int i = 0; i < sp.dim(); ++i) {
            std::vector<double> e(std::size_t(sp.dim()), 0.0);
            e[std::size_t(i)] = 1;
            xs.push_back(std::move(e));
        }
        which = "basis";
    } else {
        for (const auto& row : object_arg(cfg.options, "vectors"))
            xs.push_back(vector_from_json<double>(row));
        which = "file(" + std::to_string(xs.size()) + ")";
    }
    std::ostringstream ps;
    ps << "space=" << sp.describe() << " vectors=" << which << " budget=" << cfg.budget;
    r.parameters = ps.str();
    r.value = r.lower = r.upper = cotype2_ratio(sp, xs);
    return r;
}

run_report cmd_uncond(const experiment_config& cfg) {
    // not a spec-listed command of its own; reachable through norm probes in
    // batch configs, kept for the demos
    run_report r = base_report(cfg);
    require_inexact(cfg);
    space sp = space_arg(cfg.options, "space");
    std::ostringstream ps;
    ps << "space=" << sp.describe() << " budget=" << cfg.budget;
    r.parameters = ps.str();
    r.value = r.lower = r.upper = unconditional_constant(sp, cfg.budget, cfg.seed);
    return r;
}

std::vector<run_report> run_command(const experiment_config& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<run_report> out;
    if (cfg.command == "norm")
        out.push_back(cmd_norm(cfg, false));
    else if (cfg.command == "dualnorm")
        out.push_back(cmd_norm(cfg, true));
    else if (cfg.command == "opnorm")
        out.push_back(cmd_opnorm(cfg));
    else if (cfg.command == "projnorm")
        out.push_back(cmd_projnorm(cfg));
    else if (cfg.command == "gd cyclic")
        out.push_back(cmd_gd_cyclic(cfg));
    else if (cfg.command == "gd lpq")
        out.push_back(cmd_gd_lpq(cfg));
    else if (cfg.command == "gd assemble")
        out.push_back(cmd_gd_assemble(cfg));
    else if (cfg.command == "gd minimize")
        out.push_back(cmd_gd_minimize(cfg));
    else if (cfg.command == "gd verify")
        out.push_back(cmd_gd_verify(cfg));
    else if (cfg.command == "gamma")
        out.push_back(cmd_gamma(cfg));
    else if (cfg.command == "zn-demo")
        out = cmd_zn_demo(cfg);
    else if (cfg.command == "pi-probe")
        out.push_back(cmd_pi_probe(cfg));
    else if (cfg.command == "tnorm")
        out.push_back(cmd_tnorm(cfg));
    else if (cfg.command == "tprobe co1")
        out.push_back(cmd_tprobe_co1(cfg));
    else if (cfg.command == "tprobe co2")
        out.push_back(cmd_tprobe_co2(cfg));
    else if (cfg.command == "bm-dist")
        out.push_back(cmd_bm_dist(cfg));
    else if (cfg.command == "cotype2")
        out.push_back(cmd_cotype2(cfg));
    else if (cfg.command == "uncond")
        out.push_back(cmd_uncond(cfg));
    else
        throw std::invalid_argument("unknown command: " + cfg.command);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    for (auto& r : out)
        if (r.runtime_ms == 0) r.runtime_ms = ms;
    return out;
}

void write_output(const experiment_config& cfg, const std::vector<run_report>& reports) {
    std::string body;
    long long total_ms = 0;
    for (const auto& r : reports) total_ms += r.runtime_ms;
    if (cfg.format == "csv") {
        body = emit_table(reports);
    } else {
        if (reports.size() == 1) {
            body = report_body(reports.front()).dump(2);
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(report_body(r));
            body = arr.dump(2);
        }
        body += '\n';
    }
    if (cfg.output.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(cfg.output);
        if (!out) throw std::invalid_argument("cannot open output file: " + cfg.output);
        out << body;
    }
    if (cfg.format != "csv") std::cout << "runtime-ms: " << total_ms << "\n";
}

int run_and_emit(const experiment_config& cfg) {
    try {
        write_output(cfg, run_command(cfg));
        return exit_ok;
    } catch (const probe_failure& e) {
        std::cerr << "probe failure: " << e.what() << "\n";
        return exit_probe;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

int run_batch(const std::string& path, const std::string& output, const std::string& format) {
    try {
        json arr = load_json_arg(path);
        if (!arr.is_array()) throw std::invalid_argument("batch file must be a JSON array");
        std::vector<run_report> all;
        for (const auto& cj : arr) {
            auto cfg = config_from_json(cj);
            auto rs = run_command(cfg);
            all.insert(all.end(), rs.begin(), rs.end());
        }
        experiment_config outcfg;
        outcfg.command = "batch";
        outcfg.output = output;
        outcfg.format = format;
        write_output(outcfg, all);
        return exit_ok;
    } catch (const probe_failure& e) {
        std::cerr << "probe failure: " << e.what() << "\n";
        return exit_probe;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

} // namespace
} // namespace banlab

int main(int argc, char** argv) {
    using banlab::experiment_config;

    CLI::App app{"finite-dimensional Banach geometry workbench"};
    app.require_subcommand(1);

    experiment_config cfg;
    std::string p = "2", q = "inf", vec, coeffs, nks, ns = "1,2,4", blocks, through = "lp";
    std::string space_arg, y_arg, x_arg, map_arg, decomp_arg, gd_arg, vectors_arg, target_arg;
    std::string batch_file, fam_p = "1", tstar_p = "1", ep = "1", xp = "2";
    int n = 2, i = 1, kmax = 8, maxidx = 8, bigk = 4, count = 50, en = 2, xn = 2;
    bool improve = false, emit_decomp = false, strict = false, basis = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--seed", cfg.seed, "search seed")->capture_default_str();
        c->add_option("--budget", cfg.budget, "search budget (starts/iterations)")
            ->capture_default_str();
        c->add_option("--tol", cfg.tol, "probe tolerance")->capture_default_str();
        c->add_flag("--exact", cfg.exact, "force the exact rational lane or fail");
        c->add_option("--out", cfg.output, "write the report body to this file");
        c->add_option("--format", cfg.format, "json or csv")->capture_default_str();
    };

    auto* cnorm = app.add_subcommand("norm", "norm of a vector in a space");
    cnorm->add_option("--space", space_arg, "space (JSON or file)")->required();
    cnorm->add_option("--vec", vec, "comma-separated coefficients")->required();
    add_common(cnorm);

    auto* cdual = app.add_subcommand("dualnorm", "dual norm of a functional");
    cdual->add_option("--space", space_arg, "space (JSON or file)")->required();
    cdual->add_option("--vec", vec, "comma-separated coefficients")->required();
    add_common(cdual);

    auto* copn = app.add_subcommand("opnorm", "operator norm of a linear map");
    copn->add_option("--map", map_arg, "linear map (JSON or file)")->required();
    add_common(copn);

    auto* cproj = app.add_subcommand("projnorm", "projective norm bounds of a decomposition");
    cproj->add_option("--decomp", decomp_arg, "decomposition (JSON or file)")->required();
    cproj->add_flag("--improve", improve, "search for a cheaper representation");
    cproj->add_flag("--emit-decomp", emit_decomp, "include the final decomposition");
    add_common(cproj);

    auto* cgd = app.add_subcommand("gd", "generalized diagonals");
    cgd->require_subcommand(1);
    auto* cgdc = cgd->add_subcommand("cyclic", "signed-cyclic group diagonal on l_p^n");
    cgdc->add_option("--n", n, "dimension")->capture_default_str();
    cgdc->add_option("--p", p, "exponent (or inf)")->capture_default_str();
    add_common(cgdc);
    auto* cgdl = cgd->add_subcommand("lpq", "staged diagonal on l_q-sums of l_p blocks");
    cgdl->add_option("--nks", nks, "block dimensions n_1,n_2,...")->required();
    cgdl->add_option("--i", i, "stage index")->required();
    cgdl->add_option("--p", p, "inner exponent")->capture_default_str();
    cgdl->add_option("--q", q, "outer exponent")->capture_default_str();
    add_common(cgdl);
    auto* cgda = cgd->add_subcommand("assemble", "tensor assembly of two cyclic diagonals");
    cgda->add_option("--en", en, "outer side dimension")->capture_default_str();
    cgda->add_option("--ep", ep, "outer side exponent")->capture_default_str();
    cgda->add_option("--xn", xn, "inner side dimension")->capture_default_str();
    cgda->add_option("--xp", xp, "inner side exponent")->capture_default_str();
    add_common(cgda);
    auto* cgdm = cgd->add_subcommand("minimize", "minimal-norm diagonal coefficient search");
    cgdm->add_option("--x", x_arg, "space X (JSON or file)");
    cgdm->add_option("--y", y_arg, "space Y (JSON or file), default X");
    cgdm->add_option("--n", n, "shorthand: X = Y = l_p^n")->capture_default_str();
    cgdm->add_option("--p", p, "shorthand exponent")->capture_default_str();
    add_common(cgdm);
    auto* cgdv = cgd->add_subcommand("verify", "module-map identities of a diagonal");
    cgdv->add_option("--gd", gd_arg, "coefficient form (JSON or file)");
    cgdv->add_option("--decomp", decomp_arg, "expanded form (JSON or file)");
    add_common(cgdv);

    auto* cgamma = app.add_subcommand("gamma", "factorization norm upper bound");
    cgamma->add_option("--target", target_arg, "target map (JSON or file)")->required();
    cgamma->add_option("--through", through, "family kind (lp)")->capture_default_str();
    cgamma->add_option("--p", p, "family exponent")->capture_default_str();
    cgamma->add_option("--kmax", kmax, "largest family dimension")->capture_default_str();
    add_common(cgamma);

    auto* czn = app.add_subcommand("zn-demo", "two projections with cheap halves, costly sum");
    czn->add_option("--p", p, "exponent, meaningful for p > 2")->capture_default_str();
    czn->add_option("--ns", ns, "comma-separated n values")->capture_default_str();
    add_common(czn);

    auto* cpi = app.add_subcommand("pi-probe", "basis-projection factorization probe");
    cpi->add_option("--y", y_arg, "space Y (JSON or file)");
    cpi->add_option("--tstar-p", tstar_p, "shorthand: Y = truncated T* with this p")
        ->capture_default_str();
    cpi->add_option("--max-index", maxidx, "shorthand: Y truncation length")->capture_default_str();
    cpi->add_option("--n", n, "projection length")->capture_default_str();
    cpi->add_option("--family-p", fam_p, "factorization family exponent")->capture_default_str();
    cpi->add_option("--family-kmax", kmax, "largest family dimension")->capture_default_str();
    add_common(cpi);

    auto* ctn = app.add_subcommand("tnorm", "truncated dual-Tsirelson norm");
    ctn->add_option("--coeffs", coeffs, "coefficients of t_1..t_k")->required();
    ctn->add_option("--p", p, "convexification exponent")->capture_default_str();
    ctn->add_flag("--strict", strict, "strict branching rule");
    add_common(ctn);

    auto* ctp = app.add_subcommand("tprobe", "forced-bound probes");
    ctp->require_subcommand(1);
    auto* cco1 = ctp->add_subcommand("co1", "disjoint-block ratio probe");
    cco1->add_option("--p", p, "exponent")->capture_default_str();
    cco1->add_option("--blocks", blocks, "explicit blocks i:v,...;i:v,...");
    cco1->add_option("--coeffs", coeffs, "block coefficients (with --blocks)");
    cco1->add_option("--count", count, "seeded batch size (without --blocks)")
        ->capture_default_str();
    cco1->add_flag("--strict", strict, "strict branching rule");
    add_common(cco1);
    auto* cco2 = ctp->add_subcommand("co2", "low-distortion embedding search");
    cco2->add_option("--n", n, "span length")->capture_default_str();
    cco2->add_option("--bigk", bigk, "target dimension")->capture_default_str();
    cco2->add_option("--p", p, "target exponent")->capture_default_str();
    add_common(cco2);

    auto* cbm = app.add_subcommand("bm-dist", "Banach-Mazur distance upper bound");
    cbm->add_option("--x", x_arg, "space X (JSON or file)");
    cbm->add_option("--y", y_arg, "space Y (JSON or file)");
    cbm->add_option("--xn", n, "shorthand: X = l_p^n")->capture_default_str();
    cbm->add_option("--xp", ep, "shorthand X exponent")->capture_default_str();
    cbm->add_option("--yn", xn, "shorthand: Y = l_p^n")->capture_default_str();
    cbm->add_option("--yp", xp, "shorthand Y exponent")->capture_default_str();
    add_common(cbm);

    auto* cct = app.add_subcommand("cotype2", "cotype-2 ratio of a vector set");
    cct->add_option("--space", space_arg, "space (JSON or file)")->required();
    cct->add_option("--vectors", vectors_arg, "vector set (JSON or file)");
    cct->add_flag("--basis", basis, "use the canonical basis vectors");
    add_common(cct);

    auto* cun = app.add_subcommand("uncond", "measured unconditional constant");
    cun->add_option("--space", space_arg, "space (JSON or file)")->required();
    add_common(cun);

    auto* cbatch = app.add_subcommand("batch", "run a JSON array of configs");
    cbatch->add_option("--file", batch_file, "configs (JSON array or file)")->required();
    cbatch->add_option("--out", cfg.output, "write the combined output here");
    cbatch->add_option("--format", cfg.format, "json or csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return banlab::exit_validation;
    }

    if (cfg.format != "json" && cfg.format != "csv") {
        std::cerr << "error: format must be json or csv\n";
        return banlab::exit_validation;
    }

    if (cbatch->parsed()) return banlab::run_batch(batch_file, cfg.output, cfg.format);

    auto& o = cfg.options;
    if (cnorm->parsed() || cdual->parsed()) {
        cfg.command = cnorm->parsed() ? "norm" : "dualnorm";
        o["space"] = space_arg;
        o["vec"] = vec;
    } else if (copn->parsed()) {
        cfg.command = "opnorm";
        o["map"] = map_arg;
    } else if (cproj->parsed()) {
        cfg.command = "projnorm";
        o["decomp"] = decomp_arg;
        o["improve"] = improve;
        o["emit"] = emit_decomp;
    } else if (cgdc->parsed()) {
        cfg.command = "gd cyclic";
        o["n"] = n;
        o["p"] = p;
    } else if (cgdl->parsed()) {
        cfg.command = "gd lpq";
        o["nks"] = nks;
        o["i"] = i;
        o["p"] = p;
        o["q"] = q;
    } else if (cgda->parsed()) {
        cfg.command = "gd assemble";
        o["en"] = en;
        o["ep"] = ep;
        o["xn"] = xn;
        o["xp"] = xp;
    } else if (cgdm->parsed()) {
        cfg.command = "gd minimize";
        if (!x_arg.empty()) o["x"] = x_arg;
        if (!y_arg.empty()) o["y"] = y_arg;
        o["n"] = n;
        o["p"] = p;
    } else if (cgdv->parsed()) {
        cfg.command = "gd verify";
        if (!gd_arg.empty()) o["gd"] = gd_arg;
        if (!decomp_arg.empty()) o["decomp"] = decomp_arg;
        if (gd_arg.empty() && decomp_arg.empty()) {
            std::cerr << "error: gd verify needs --gd or --decomp\n";
            return banlab::exit_validation;
        }
    } else if (cgamma->parsed()) {
        cfg.command = "gamma";
        o["target"] = target_arg;
        o["through"] = through;
        o["p"] = p;
        o["kmax"] = kmax;
    } else if (czn->parsed()) {
        cfg.command = "zn-demo";
        o["p"] = p;
        o["ns"] = ns;
    } else if (cpi->parsed()) {
        cfg.command = "pi-probe";
        if (!y_arg.empty()) o["y"] = y_arg;
        o["tstar-p"] = tstar_p;
        o["max-index"] = maxidx;
        o["n"] = n;
        o["family-p"] = fam_p;
        o["family-kmax"] = kmax;
    } else if (ctn->parsed()) {
        cfg.command = "tnorm";
        o["coeffs"] = coeffs;
        o["p"] = p;
        o["strict"] = strict;
    } else if (cco1->parsed()) {
        cfg.command = "tprobe co1";
        o["p"] = p;
        if (!blocks.empty()) {
            o["blocks"] = blocks;
            o["coeffs"] = coeffs;
        } else {
            o["count"] = count;
        }
        o["strict"] = strict;
    } else if (cco2->parsed()) {
        cfg.command = "tprobe co2";
        o["n"] = n;
        o["bigk"] = bigk;
        o["p"] = p;
    } else if (cbm->parsed()) {
        cfg.command = "bm-dist";
        if (!x_arg.empty()) o["x"] = x_arg;
        if (!y_arg.empty()) o["y"] = y_arg;
        o["xn"] = n;
        o["xp"] = ep;
        o["yn"] = xn;
        o["yp"] = xp;
    } else if (cct->parsed()) {
        cfg.command = "cotype2";
        o["space"] = space_arg;
        if (!vectors_arg.empty()) o["vectors"] = vectors_arg;
        o["basis"] = basis;
    } else if (cun->parsed()) {
        cfg.command = "uncond";
        o["space"] = space_arg;
    }

    return banlab::run_and_emit(cfg);
}
