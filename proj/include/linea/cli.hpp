#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "linea/linea.hpp"

namespace linea::cli {

using nlohmann::json;

struct RunConfig {
    std::uint64_t seed = 1;
    int depth = 12;
    long long samples = 100000;
    double tol = 1e-12;
    std::string output_format = "json";
    std::string output_path;
    int threads = 1;
    std::string require_verdict;
};

namespace detail {

inline std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json jc(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json jseries(const SeriesEstimate& est) {
    json j;
    j["exponent"] = est.exponent;
    j["value"] = est.value();
    j["extrapolated_value"] = est.extrapolated_value();
    j["level_sums"] = est.level_sums;
    j["partial_sums"] = est.partial_sums;
    j["verdict"] = to_string(est.verdict);
    if (est.tail_bound)
        j["tail_bound"] = *est.tail_bound;
    else
        j["tail_bound"] = nullptr;
    return j;
}

inline json jarea(const AreaEstimate& a) {
    return json{{"value", a.value},       {"std_error", a.std_error},
                {"samples", a.samples},   {"seed", a.seed},
                {"hits", a.hits},         {"overflow_misses", a.overflow_misses}};
}

/// Region grammar: disc:cx,cy,r | halfline:ax,ay,dx,dy | polygon:x1,y1;x2,y2;...
/// | julia:POLY[;max_iter[;escape_radius]]
inline RegionSpec parse_region(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error("InvalidArgument", "region: expected 'kind:params', got '" + text + "'");
    std::string kind = text.substr(0, colon);
    std::string body = text.substr(colon + 1);
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep)) out.push_back(item);
        return out;
    };
    auto nums = [&](const std::string& s) {
        std::vector<double> out;
        for (const std::string& f : split(s, ',')) out.push_back(std::stod(f));
        return out;
    };
    if (kind == "disc") {
        auto v = nums(body);
        if (v.size() != 3) throw Error("InvalidArgument", "region disc: need cx,cy,r");
        return RegionSpec::disc(cplx(v[0], v[1]), v[2]);
    }
    if (kind == "halfline") {
        auto v = nums(body);
        if (v.size() != 4) throw Error("InvalidArgument", "region halfline: need ax,ay,dx,dy");
        return RegionSpec::half_line(cplx(v[0], v[1]), cplx(v[2], v[3]));
    }
    if (kind == "polygon") {
        std::vector<cplx> verts;
        for (const std::string& pt : split(body, ';')) {
            auto v = nums(pt);
            if (v.size() != 2) throw Error("InvalidArgument", "region polygon: need x,y pairs");
            verts.emplace_back(v[0], v[1]);
        }
        if (verts.size() < 3) throw Error("InvalidArgument", "region polygon: need >= 3 vertices");
        return RegionSpec::polygon(std::move(verts));
    }
    if (kind == "julia") {
        auto parts = split(body, ';');
        Polynomial p = parse_polynomial(parts[0]);
        int max_iter = parts.size() > 1 ? std::stoi(parts[1]) : 256;
        double esc = parts.size() > 2 ? std::stod(parts[2]) : 0.0;
        return RegionSpec::filled_julia(std::move(p), max_iter, esc);
    }
    throw Error("InvalidArgument", "region: unknown kind '" + kind + "'");
}

struct CommandOutput {
    json result;
    json diagnostics = nullptr;
    std::optional<std::string> verdict;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

inline void series_csv(const SeriesEstimate& est, CommandOutput& out) {
    out.csv_header = {"level", "level_sum", "partial_sum"};
    for (std::size_t k = 0; k < est.level_sums.size(); ++k)
        out.csv_rows.push_back({std::to_string(k + 1), fmt_double(est.level_sums[k]),
                                fmt_double(est.partial_sums[k])});
}

inline void series_diagnostics(const SeriesEstimate& est, CommandOutput& out) {
    out.diagnostics = json{{"verdict", to_string(est.verdict)},
                           {"levels", est.level_sums},
                           {"residuals", nullptr}};
    out.verdict = to_string(est.verdict);
}

} // namespace detail

/// Dispatch a full command line. Exit codes: 0 success, 2 numerical failure
/// (or a verdict that misses --require-verdict), 3 invalid arguments.
inline int run(const std::vector<std::string>& args, std::ostream& out_stream,
               std::ostream& err_stream) {
    using detail::CommandOutput;
    using detail::fmt_double;
    using detail::jc;

    RunConfig cfg;
    CLI::App app{"Poincare functions of polynomials: linearizers, orders of growth, "
                 "area sums, quadratic-differential pushforwards"};
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "flat key=value config file; flags override");
    app.add_option("--seed", cfg.seed, "RNG seed for Monte Carlo commands");
    app.add_option("--depth", cfg.depth, "preimage-tree / annulus depth");
    app.add_option("--samples", cfg.samples, "Monte Carlo sample count");
    app.add_option("--tol", cfg.tol, "root-finding and residual tolerance");
    app.add_option("--output_format,--format", cfg.output_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output_path,--output", cfg.output_path, "write to file instead of stdout");
    app.add_option("--threads", cfg.threads, "Monte Carlo partitions; 1 = bit-exact reference");
    app.add_option("--require-verdict", cfg.require_verdict,
                   "exit 2 unless the series verdict equals this")
        ->check(CLI::IsMember({"converged", "diverging_suspected", "undecided"}));

    std::function<CommandOutput()> action;
    std::string command_name;

    // ---- shared option state ----
    std::string poly_text, fixed_point_text, w_text, region_text, map_kind = "exp";
    std::string num_text = "1", den_text = "z^2", kind_text, radii_text, z_text;
    std::string w_in_text, w_out_text;
    double t_exp = 2.0, escape_radius = 0.0, r_max = 100.0, theta = 0.0, rtol = -1.0;
    int order_m = 64, n_max = 64, k_max = 10000, samples_per_circle = 1024, el_n = 7;
    long long terms = 100000, deg_or_count = 0;
    bool empirical = false, skip_poles = false, exact_rational = false;

    auto parse_radii = [&]() {
        std::vector<double> radii;
        std::stringstream ss(radii_text);
        std::string item;
        while (std::getline(ss, item, ',')) radii.push_back(std::stod(item));
        return radii;
    };
    auto need_linearizer = [&]() {
        Polynomial p = parse_polynomial(poly_text);
        cplx zeta = parse_complex(fixed_point_text);
        return koenigs_coeffs(p, zeta, order_m, cfg.tol);
    };

    // ---- roots ----
    {
        auto* cmd = app.add_subcommand("roots", "all roots of a polynomial");
        cmd->add_option("--poly", poly_text, "polynomial, e.g. \"z^2-1\"")->required();
        cmd->callback([&]() {
            command_name = "roots";
            action = [&]() {
                Polynomial p = parse_polynomial(poly_text);
                auto roots = poly_roots(p, cfg.tol);
                CommandOutput out;
                double worst = 0.0;
                json arr = json::array();
                for (cplx r : roots) {
                    arr.push_back(jc(r));
                    worst = std::max(worst, std::abs(poly_value(p, r)));
                    out.csv_rows.push_back({fmt_double(r.real()), fmt_double(r.imag())});
                }
                out.result = json{{"degree", p.degree()}, {"roots", arr}};
                out.diagnostics = json{{"verdict", nullptr},
                                       {"levels", nullptr},
                                       {"residuals", json{{"max_abs_p_at_root", worst}}}};
                out.csv_header = {"re", "im"};
                return out;
            };
        });
    }

    // ---- fixed-points ----
    {
        auto* cmd = app.add_subcommand("fixed-points", "fixed points with multipliers");
        cmd->add_option("--poly", poly_text)->required();
        cmd->callback([&]() {
            command_name = "fixed-points";
            action = [&]() {
                auto fps = fixed_points(parse_polynomial(poly_text), cfg.tol);
                CommandOutput out;
                json arr = json::array();
                for (const auto& f : fps) {
                    arr.push_back(json{{"location", jc(f.location)},
                                       {"multiplier", jc(f.multiplier)},
                                       {"classification", to_string(f.classification)}});
                    out.csv_rows.push_back({fmt_double(f.location.real()),
                                            fmt_double(f.location.imag()),
                                            fmt_double(f.multiplier.real()),
                                            fmt_double(f.multiplier.imag()),
                                            to_string(f.classification)});
                }
                out.result = json{{"fixed_points", arr}};
                out.csv_header = {"re", "im", "mult_re", "mult_im", "classification"};
                return out;
            };
        });
    }

    // ---- critical-orbit ----
    {
        auto* cmd = app.add_subcommand("critical-orbit", "critical orbits and connectivity");
        cmd->add_option("--poly", poly_text)->required();
        cmd->add_option("--n-max", n_max, "iterations per critical point");
        cmd->add_option("--escape-radius", escape_radius, "0 = derive from coefficients");
        cmd->callback([&]() {
            command_name = "critical-orbit";
            action = [&]() {
                auto rep = critical_orbit_analysis(parse_polynomial(poly_text), n_max,
                                                   escape_radius);
                CommandOutput out;
                json arr = json::array();
                for (cplx q : rep.postcritical_points) {
                    arr.push_back(jc(q));
                    out.csv_rows.push_back({fmt_double(q.real()), fmt_double(q.imag())});
                }
                out.result = json{{"postcritical_points", arr}, {"connected", rep.connected}};
                out.csv_header = {"re", "im"};
                return out;
            };
        });
    }

    // ---- preimages ----
    {
        auto* cmd = app.add_subcommand("preimages", "iterated preimage tree of w");
        cmd->add_option("--poly", poly_text)->required();
        cmd->add_option("--w", w_text)->required();
        cmd->callback([&]() {
            command_name = "preimages";
            action = [&]() {
                auto tree = preimage_tree(parse_polynomial(poly_text), parse_complex(w_text),
                                          cfg.depth, cfg.tol);
                CommandOutput out;
                json levels = json::array();
                out.csv_header = {"level", "index", "z_re", "z_im", "deriv_re", "deriv_im",
                                  "parent"};
                for (std::size_t k = 0; k < tree.levels.size(); ++k) {
                    json level = json::array();
                    for (std::size_t i = 0; i < tree.levels[k].size(); ++i) {
                        const auto& node = tree.levels[k][i];
                        level.push_back(json{{"z", jc(node.z)},
                                             {"cumulative_derivative",
                                              jc(node.cumulative_derivative)},
                                             {"parent", node.parent}});
                        out.csv_rows.push_back(
                            {std::to_string(k), std::to_string(i), fmt_double(node.z.real()),
                             fmt_double(node.z.imag()),
                             fmt_double(node.cumulative_derivative.real()),
                             fmt_double(node.cumulative_derivative.imag()),
                             std::to_string(node.parent)});
                    }
                    levels.push_back(std::move(level));
                }
                out.result = json{{"root", jc(tree.root)}, {"levels", levels}};
                return out;
            };
        });
    }

    // ---- poincare-series ----
    {
        auto* cmd = app.add_subcommand("poincare-series", "Poincare series over the preimage tree");
        cmd->add_option("--poly", poly_text)->required();
        cmd->add_option("--w", w_text)->required();
        cmd->add_option("--t", t_exp, "exponent");
        cmd->add_option("--restrict", region_text, "restrict nodes to a region");
        cmd->add_option("--rtol", rtol, "relative tail rule (default 1e-2)");
        cmd->callback([&]() {
            command_name = "poincare-series";
            action = [&]() {
                std::optional<RegionSpec> restrict_region;
                if (!region_text.empty()) restrict_region = detail::parse_region(region_text);
                auto est = poincare_series(
                    parse_polynomial(poly_text), parse_complex(w_text), t_exp, cfg.depth,
                    restrict_region, cfg.tol, linea::detail::kDefaultNodeBudget,
                    rtol > 0 ? rtol : linea::detail::kPoincareTailRtol);
                CommandOutput out;
                out.result = detail::jseries(est);
                detail::series_diagnostics(est, out);
                detail::series_csv(est, out);
                return out;
            };
        });
    }

    // ---- linearize ----
    {
        auto* lin = app.add_subcommand("linearize", "Poincare function operations");
        lin->require_subcommand(1);
        auto add_common = [&](CLI::App* cmd) {
            cmd->add_option("--poly", poly_text)->required();
            cmd->add_option("--fixed-point", fixed_point_text)->required();
            cmd->add_option("--order", order_m, "series truncation order");
        };
        {
            auto* cmd = lin->add_subcommand("coeffs", "Koenigs series coefficients");
            add_common(cmd);
            cmd->callback([&]() {
                command_name = "linearize coeffs";
                action = [&]() {
                    PoincareMap F = need_linearizer();
                    CommandOutput out;
                    json arr = json::array();
                    out.csv_header = {"n", "re", "im"};
                    for (std::size_t n = 0; n < F.series.coeffs.size(); ++n) {
                        arr.push_back(jc(F.series.coeffs[n]));
                        out.csv_rows.push_back({std::to_string(n),
                                                fmt_double(F.series.coeffs[n].real()),
                                                fmt_double(F.series.coeffs[n].imag())});
                    }
                    out.result = json{{"zeta", jc(F.zeta)},
                                      {"lambda", jc(F.lambda)},
                                      {"eta", F.eta},
                                      {"conv_radius_est", F.conv_radius_est},
                                      {"coefficients", arr}};
                    out.diagnostics =
                        json{{"verdict", nullptr},
                             {"levels", nullptr},
                             {"residuals",
                              json{{"functional_equation", functional_equation_residual(F)}}}};
                    return out;
                };
            });
        }
        {
            auto* cmd = lin->add_subcommand("eval", "evaluate f and f'");
            add_common(cmd);
            cmd->add_option("--z", z_text)->required();
            cmd->callback([&]() {
                command_name = "linearize eval";
                action = [&]() {
                    PoincareMap F = need_linearizer();
                    auto [v, d] = lin_eval(F, parse_complex(z_text));
                    CommandOutput out;
                    out.result = json{{"value", jc(v)}, {"derivative", jc(d)}};
                    out.csv_header = {"value_re", "value_im", "deriv_re", "deriv_im"};
                    out.csv_rows.push_back({fmt_double(v.real()), fmt_double(v.imag()),
                                            fmt_double(d.real()), fmt_double(d.imag())});
                    return out;
                };
            });
        }
        auto register_order = [&](CLI::App* cmd, const char* name) {
            add_common(cmd);
            cmd->add_flag("--empirical", empirical, "growth fit instead of log D / log |lambda|");
            cmd->add_option("--radii", radii_text, "comma-separated circle radii");
            cmd->add_option("--samples-per-circle", samples_per_circle);
            cmd->callback([&, name]() {
                command_name = name;
                action = [&]() {
                    PoincareMap F = need_linearizer();
                    OrderEstimate est;
                    if (empirical) {
                        std::vector<double> radii = parse_radii();
                        if (radii.empty()) radii = {1e2, 1e3, 1e4, 1e5};
                        est = order_empirical(F, radii, samples_per_circle);
                    } else {
                        est = order_exact(F);
                    }
                    CommandOutput out;
                    out.result = json{
                        {"value", est.value},
                        {"method",
                         est.method == OrderMethod::exact_formula ? "exact_formula" : "growth_fit"},
                        {"fit_residual",
                         est.fit_residual ? json(*est.fit_residual) : json(nullptr)}};
                    out.csv_header = {"value", "method", "fit_residual"};
                    out.csv_rows.push_back(
                        {fmt_double(est.value),
                         est.method == OrderMethod::exact_formula ? "exact_formula" : "growth_fit",
                         est.fit_residual ? fmt_double(*est.fit_residual) : ""});
                    return out;
                };
            });
        };
        register_order(lin->add_subcommand("order", "order of growth"), "linearize order");
        // top-level shorthand for the same operation
        register_order(app.add_subcommand("order", "order of growth of a linearizer"), "order");
    }

    // ---- area ----
    {
        auto* area = app.add_subcommand("area", "area-property sums and integrals");
        area->require_subcommand(1);
        {
            auto* cmd = area->add_subcommand("sum", "sum of 1/(|z| |f'(z)|)^t over preimages");
            cmd->add_option("--map", map_kind, "exp | cosh-sqrt | poly")
                ->check(CLI::IsMember({"exp", "cosh-sqrt", "poly"}));
            cmd->add_option("--poly", poly_text);
            cmd->add_option("--fixed-point", fixed_point_text);
            cmd->add_option("--order", order_m);
            cmd->add_option("--w", w_text)->required();
            cmd->add_option("--t", t_exp);
            cmd->add_option("--levels", k_max, "geometric shells / annulus levels");
            cmd->add_option("--rtol", rtol, "relative tail rule (default 1e-4)");
            cmd->callback([&]() {
                command_name = "area sum";
                action = [&]() {
                    double use_rtol = rtol > 0 ? rtol : linea::detail::kDefaultTailRtol;
                    SeriesEstimate est;
                    cplx w = parse_complex(w_text);
                    if (map_kind == "poly") {
                        est = area_sum(need_linearizer(), w, t_exp, k_max, cfg.tol, use_rtol);
                    } else {
                        MapTag tag = map_kind == "exp" ? MapTag::exp_map : MapTag::cosh_sqrt;
                        est = area_sum(tag, w, t_exp, k_max, use_rtol);
                    }
                    CommandOutput out;
                    out.result = detail::jseries(est);
                    detail::series_diagnostics(est, out);
                    detail::series_csv(est, out);
                    return out;
                };
            });
        }
        {
            auto* cmd = area->add_subcommand("mc", "Monte Carlo cylindrical area of f^{-1}(K)");
            cmd->add_option("--map", map_kind)->check(CLI::IsMember({"exp", "cosh-sqrt", "poly"}));
            cmd->add_option("--poly", poly_text);
            cmd->add_option("--fixed-point", fixed_point_text);
            cmd->add_option("--order", order_m);
            cmd->add_option("--region", region_text)->required();
            cmd->add_option("--r-max", r_max)->required();
            cmd->callback([&]() {
                command_name = "area mc";
                action = [&]() {
                    RegionSpec K = detail::parse_region(region_text);
                    AreaEstimate est;
                    if (map_kind == "poly") {
                        est = cylindrical_area_mc(need_linearizer(), K, r_max, cfg.samples,
                                                  cfg.seed, cfg.threads);
                    } else {
                        MapTag tag = map_kind == "exp" ? MapTag::exp_map : MapTag::cosh_sqrt;
                        est = cylindrical_area_mc(tag, K, r_max, cfg.samples, cfg.seed,
                                                  cfg.threads);
                    }
                    CommandOutput out;
                    out.result = detail::jarea(est);
                    out.csv_header = {"value", "std_error", "samples", "seed", "hits"};
                    out.csv_rows.push_back({fmt_double(est.value), fmt_double(est.std_error),
                                            std::to_string(est.samples),
                                            std::to_string(est.seed),
                                            std::to_string(est.hits)});
                    return out;
                };
            });
        }
        {
            auto* cmd = area->add_subcommand("el-growth",
                                             "band areas A_n over 1 <= |z| <= |lambda|^n");
            cmd->add_option("--poly", poly_text)->required();
            cmd->add_option("--fixed-point", fixed_point_text)->required();
            cmd->add_option("--order", order_m);
            cmd->add_option("--region", region_text)->required();
            cmd->add_option("--n-max", el_n);
            cmd->callback([&]() {
                command_name = "area el-growth";
                action = [&]() {
                    auto growth = el_growth(need_linearizer(), detail::parse_region(region_text),
                                            el_n, cfg.samples, cfg.seed, cfg.threads);
                    CommandOutput out;
                    json rows = json::array();
                    std::vector<double> xs, ys;
                    out.csv_header = {"n", "area", "std_error"};
                    for (const auto& g : growth) {
                        rows.push_back(json{{"n", g.n},
                                            {"area", g.area.value},
                                            {"std_error", g.area.std_error}});
                        out.csv_rows.push_back({std::to_string(g.n), fmt_double(g.area.value),
                                                fmt_double(g.area.std_error)});
                        xs.push_back(g.n);
                        ys.push_back(g.area.value);
                    }
                    LineFit fit = fit_line(xs, ys);
                    out.result = json{{"rows", rows},
                                      {"fit", json{{"slope", fit.slope},
                                                   {"intercept", fit.intercept},
                                                   {"r_squared", fit.r_squared}}}};
                    return out;
                };
            });
        }
        {
            auto* cmd = area->add_subcommand(
                "distance", "distance-form sum for exp against the negative ray");
            cmd->add_option("--w", w_text)->required();
            cmd->add_option("--k-max", k_max);
            cmd->callback([&]() {
                command_name = "area distance";
                action = [&]() {
                    auto est = distance_form_sum(parse_complex(w_text), k_max);
                    CommandOutput out;
                    out.result = detail::jseries(est);
                    detail::series_diagnostics(est, out);
                    detail::series_csv(est, out);
                    return out;
                };
            });
        }
        {
            auto* cmd = area->add_subcommand("siegel",
                                             "convergence/divergence contrast at a Siegel disc");
            cmd->add_option("--theta", theta, "rotation number (user-asserted Siegel)")
                ->required();
            cmd->add_option("--w-in", w_in_text)->required();
            cmd->add_option("--w-out", w_out_text)->required();
            cmd->callback([&]() {
                command_name = "area siegel";
                action = [&]() {
                    auto res = siegel_compare(theta, parse_complex(w_in_text),
                                              parse_complex(w_out_text), cfg.depth, cfg.tol);
                    CommandOutput out;
                    out.result = json{{"trace_in", detail::jseries(res.trace_in)},
                                      {"trace_out", detail::jseries(res.trace_out)},
                                      {"repelling_point", jc(res.repelling_point)},
                                      {"repelling_multiplier", jc(res.repelling_multiplier)}};
                    out.diagnostics = json{{"verdict", to_string(res.trace_out.verdict)},
                                           {"levels", res.trace_out.level_sums},
                                           {"residuals", nullptr}};
                    out.verdict = to_string(res.trace_out.verdict);
                    out.csv_header = {"level", "L_in", "S_in", "L_out", "S_out"};
                    for (std::size_t k = 0; k < res.trace_in.level_sums.size(); ++k)
                        out.csv_rows.push_back({std::to_string(k + 1),
                                                fmt_double(res.trace_in.level_sums[k]),
                                                fmt_double(res.trace_in.partial_sums[k]),
                                                fmt_double(res.trace_out.level_sums[k]),
                                                fmt_double(res.trace_out.partial_sums[k])});
                    return out;
                };
            });
        }
    }

    // ---- qd ----
    {
        auto* qd = app.add_subcommand("qd", "quadratic-differential pushforwards");
        qd->require_subcommand(1);
        {
            auto* cmd = qd->add_subcommand("pushforward", "sigma(w) = sum q(z)/f'(z)^2");
            cmd->add_option("--map", map_kind)->check(CLI::IsMember({"exp", "poly"}));
            cmd->add_option("--poly", poly_text);
            cmd->add_option("--fixed-point", fixed_point_text);
            cmd->add_option("--order", order_m);
            cmd->add_option("--num", num_text, "numerator of q");
            cmd->add_option("--den", den_text, "denominator of q");
            cmd->add_option("--w", w_text)->required();
            cmd->add_option("--terms", terms, "k truncation for the exp map");
            cmd->add_flag("--skip-poles", skip_poles, "skip preimages that hit poles of q");
            cmd->callback([&]() {
                command_name = "qd pushforward";
                action = [&]() {
                    QDSpec q{parse_polynomial(num_text), parse_polynomial(den_text)};
                    PushforwardSample s;
                    if (map_kind == "poly")
                        s = pushforward_eval(need_linearizer(), q, parse_complex(w_text),
                                             cfg.depth, skip_poles);
                    else
                        s = pushforward_eval(MapTag::exp_map, q, parse_complex(w_text), terms,
                                             skip_poles);
                    CommandOutput out;
                    out.result = json{{"w", jc(s.w)},
                                      {"sigma", jc(s.sigma)},
                                      {"terms_used", s.terms_used},
                                      {"tail_estimate", s.tail_estimate},
                                      {"skipped_pole_preimages", s.skipped_pole_preimages}};
                    out.csv_header = {"w_re", "w_im", "sigma_re", "sigma_im", "terms_used",
                                      "tail_estimate"};
                    out.csv_rows.push_back({fmt_double(s.w.real()), fmt_double(s.w.imag()),
                                            fmt_double(s.sigma.real()),
                                            fmt_double(s.sigma.imag()),
                                            std::to_string(s.terms_used),
                                            fmt_double(s.tail_estimate)});
                    return out;
                };
            });
        }
        {
            auto* cmd = qd->add_subcommand("exp-identity",
                                           "partial-fraction sum vs 1/(w^3-2w^2+w)");
            cmd->add_option("--w", w_text)->required();
            cmd->add_option("--terms", terms);
            cmd->callback([&]() {
                command_name = "qd exp-identity";
                action = [&]() {
                    auto res = exp_identity(parse_complex(w_text), terms);
                    CommandOutput out;
                    out.result = json{{"lhs", jc(res.lhs)},
                                      {"rhs", jc(res.rhs)},
                                      {"abs_diff", res.abs_diff}};
                    out.diagnostics = json{{"verdict", nullptr},
                                           {"levels", nullptr},
                                           {"residuals", json{{"abs_diff", res.abs_diff}}}};
                    out.csv_header = {"lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff"};
                    out.csv_rows.push_back({fmt_double(res.lhs.real()), fmt_double(res.lhs.imag()),
                                            fmt_double(res.rhs.real()), fmt_double(res.rhs.imag()),
                                            fmt_double(res.abs_diff)});
                    return out;
                };
            });
        }
        {
            auto* cmd = qd->add_subcommand("pole-fit", "pole order of sigma at infinity");
            cmd->add_option("--num", num_text);
            cmd->add_option("--den", den_text);
            cmd->add_option("--radii", radii_text, "comma-separated |w| values");
            cmd->add_option("--terms", terms, "minimum k truncation per sample");
            cmd->add_flag("--exact-rational", exact_rational,
                          "sample num(w)/den(w) directly instead of the exp pushforward");
            cmd->callback([&]() {
                command_name = "qd pole-fit";
                action = [&]() {
                    std::vector<double> radii = parse_radii();
                    if (radii.empty()) radii = {1e2, 1e3, 1e4, 1e5, 1e6};
                    QDSpec q{parse_polynomial(num_text), parse_polynomial(den_text)};
                    std::vector<PushforwardSample> samples;
                    for (double r : radii) {
                        if (exact_rational) {
                            PushforwardSample s;
                            s.w = cplx(r, 0.0);
                            s.sigma = q.eval(s.w);
                            s.terms_used = 1;
                            samples.push_back(s);
                        } else {
                            long long nk = std::max<long long>(
                                terms, static_cast<long long>(50.0 * r));
                            samples.push_back(
                                pushforward_eval(MapTag::exp_map, q, cplx(r, 0.0), nk));
                        }
                    }
                    auto res = pole_fit(samples);
                    CommandOutput out;
                    json rows = json::array();
                    out.csv_header = {"w_abs", "sigma_abs"};
                    for (const auto& s : samples) {
                        rows.push_back(json{{"w_abs", std::abs(s.w)},
                                            {"sigma_abs", std::abs(s.sigma)}});
                        out.csv_rows.push_back(
                            {fmt_double(std::abs(s.w)), fmt_double(std::abs(s.sigma))});
                    }
                    out.result = json{{"slope", res.slope},
                                      {"pole_order_at_infinity", res.pole_order_at_infinity},
                                      {"r_squared", res.fit.r_squared},
                                      {"samples", rows}};
                    return out;
                };
            });
        }
    }

    // ---- schwarzian-order ----
    {
        auto* cmd = app.add_subcommand("schwarzian-order",
                                       "order formulas for rational-Schwarzian maps");
        cmd->add_option("--kind", kind_text)
            ->required()
            ->check(CLI::IsMember(
                {"entire-nonlinearity", "meromorphic-schwarzian", "log-singularity-count"}));
        cmd->add_option("--value", deg_or_count, "degree at infinity or singularity count")
            ->required();
        cmd->callback([&]() {
            command_name = "schwarzian-order";
            action = [&]() {
                SchwarzianKind kind = kind_text == "entire-nonlinearity"
                                          ? SchwarzianKind::entire_nonlinearity
                                          : kind_text == "meromorphic-schwarzian"
                                                ? SchwarzianKind::meromorphic_schwarzian
                                                : SchwarzianKind::log_singularity_count;
                Rational r = schwarzian_order(kind, deg_or_count);
                CommandOutput out;
                out.result = json{{"kind", kind_text},
                                  {"input", deg_or_count},
                                  {"num", r.num},
                                  {"den", r.den},
                                  {"value", r.value()}};
                out.csv_header = {"kind", "input", "num", "den", "value"};
                out.csv_rows.push_back({kind_text, std::to_string(deg_or_count),
                                        std::to_string(r.num), std::to_string(r.den),
                                        fmt_double(r.value())});
                return out;
            };
        });
    }

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("linea");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out_stream << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err_stream << "argument error: " << e.what() << "\n";
        return 3;
    }

    json doc;
    doc["command"] = command_name;
    doc["config"] = json{{"seed", cfg.seed},
                         {"depth", cfg.depth},
                         {"samples", cfg.samples},
                         {"tol", cfg.tol},
                         {"output_format", cfg.output_format},
                         {"output_path", cfg.output_path},
                         {"threads", cfg.threads}};

    int exit_code = 0;
    CommandOutput result;
    try {
        result = action();
        doc["result"] = std::move(result.result);
        doc["diagnostics"] = result.diagnostics.is_null()
                                 ? json{{"verdict", nullptr},
                                        {"levels", nullptr},
                                        {"residuals", nullptr}}
                                 : result.diagnostics;
        if (!cfg.require_verdict.empty()) {
            if (!result.verdict || *result.verdict != cfg.require_verdict) {
                doc["error"] = json{{"type", "VerdictRequirement"},
                                    {"message", "verdict " +
                                                    result.verdict.value_or("(none)") +
                                                    " != required " + cfg.require_verdict}};
                exit_code = 2;
            }
        }
    } catch (const ParseError& e) {
        doc["error"] = json{{"type", e.code()}, {"message", e.what()}};
        err_stream << "argument error: " << e.what() << "\n";
        exit_code = 3;
    } catch (const Error& e) {
        bool bad_args = e.code() == "InvalidArgument";
        doc["error"] = json{{"type", e.code()}, {"message", e.what()}};
        err_stream << (bad_args ? "argument error: " : "numerical error: ") << e.what() << "\n";
        exit_code = bad_args ? 3 : 2;
    } catch (const std::exception& e) {
        doc["error"] = json{{"type", "InternalError"}, {"message", e.what()}};
        err_stream << "error: " << e.what() << "\n";
        exit_code = 2;
    }

    std::string payload;
    if (cfg.output_format == "csv" && exit_code != 3) {
        std::ostringstream csv;
        for (std::size_t i = 0; i < result.csv_header.size(); ++i)
            csv << (i ? "," : "") << result.csv_header[i];
        csv << "\n";
        for (const auto& row : result.csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
            csv << "\n";
        }
        payload = csv.str();
    } else {
        payload = doc.dump(2) + "\n";
    }

    if (!cfg.output_path.empty()) {
        std::ofstream file(cfg.output_path);
        if (!file) {
            err_stream << "error: cannot open output path " << cfg.output_path << "\n";
            return 2;
        }
        file << payload;
    } else {
        out_stream << payload;
    }
    return exit_code;
}

} // namespace linea::cli
