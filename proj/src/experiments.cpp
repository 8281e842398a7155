#include "hofer/experiments.hpp"

#include "hofer/dbar.hpp"
#include "hofer/flow.hpp"
#include "hofer/flux.hpp"
#include "hofer/geodesics.hpp"
#include "hofer/growth.hpp"
#include "hofer/hofer.hpp"
#include "hofer/lagrangian.hpp"
#include "hofer/morse.hpp"
#include "hofer/numerics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#ifndef HOFER_VERSION
#define HOFER_VERSION "dev"
#endif

namespace hofer {

namespace {

double num(const Json& c, const char* k) { return c.at(k).get<double>(); }
int integer(const Json& c, const char* k) { return c.at(k).get<int>(); }
std::string str(const Json& c, const char* k) { return c.at(k).get<std::string>(); }

// -pi lambda |x|^2: the origin is a nondegenerate maximum
Hamiltonian inverted_oscillator(double lambda) {
    Hamiltonian F = catalog("oscillator", {{"lambda", lambda}});
    auto v = F.value;
    auto g = F.gradient;
    auto h = F.hessian;
    auto e = F.exact_flow;
    F.value = [v](const Vec& x, double t) { return -v(x, t); };
    F.gradient = [g](const Vec& x, double t) { return Vec(-g(x, t)); };
    F.hessian = [h](const Vec& x, double t) { return Mat(-h(x, t)); };
    F.exact_flow = [e](const Vec& x, double t0, double t1) { return e(x, t1, t0); };
    F.name = "inverted_oscillator";
    return F;
}

FlowOptions flow_opts(const std::string& scheme, double step) {
    FlowOptions o;
    o.scheme = parse_scheme(scheme);
    o.step = step;
    return o;
}

Report flow_full_turn(const Json& c) {
    Report r;
    const ManifoldSpec S = ManifoldSpec::sphere2();
    const Hamiltonian F = catalog("rotation_1");
    const FlowOptions o = flow_opts(str(c, "scheme"), num(c, "step"));
    const Grid g = sample_grid(S, integer(c, "resolution"));
    std::vector<double> err(g.size());
    parallel_for(g.size(), [&](std::size_t i) { err[i] = (flow_point(F, g.points[i], 0.0, 1.0, o) - g.points[i]).norm(); });
    const double worst = *std::max_element(err.begin(), err.end());
    r.add_scalar("grid_points", double(g.size()));
    r.add_scalar("max_closure_error", worst);
    r.check_le("closure", worst, num(c, "tolerance"));
    return r;
}

Report hamiltonian_product(const Json& c) {
    Report r;
    const ManifoldSpec T = ManifoldSpec::torus2();
    std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Grid g = sample_grid(T, integer(c, "resolution"));
    FlowOptions ex;
    ex.scheme = Scheme::exact;
    const FlowOptions rk = flow_opts("rk4", num(c, "step"));
    double worst = 0.0;
    Curve pairs{{"pair", "amp_f", "phase_f", "beta_f", "amp_g", "phase_g", "beta_g", "max_error"}, {}};
    for (int k = 0; k < integer(c, "pairs"); ++k) {
        auto draw = [&](std::string& name) {
            name = U(rng) < 0.5 ? "shear_p" : "shear_q";
            return Params{{"amplitude", 0.2 + 0.6 * U(rng)}, {"phase", U(rng)}, {"beta", 0.8 * U(rng)}};
        };
        std::string nf, ng;
        const Params pf = draw(nf), pg = draw(ng);
        const Hamiltonian F = catalog(nf, pf), G = catalog(ng, pg);
        auto fF = std::make_shared<FlowMap>(F, ex);
        const Hamiltonian H = product_hamiltonian(F, G, fF);
        std::vector<double> err(g.size());
        parallel_for(g.size(), [&](std::size_t i) {
            const Vec& x = g.points[i];
            const Vec y = flow_point(H, x, 0.0, 0.5, rk);
            const Vec z = flow_point(H, y, 0.5, 1.0, rk);
            const double e1 = distance(T, y, F.exact_flow(G.exact_flow(x, 0.0, 0.5), 0.0, 0.5));
            const double e2 = distance(T, z, F.exact_flow(G.exact_flow(x, 0.0, 1.0), 0.0, 1.0));
            err[i] = std::max(e1, e2);
        });
        const double w = *std::max_element(err.begin(), err.end());
        worst = std::max(worst, w);
        pairs.rows.push_back({double(k), pf.at("amplitude"), pf.at("phase"), pf.at("beta"), pg.at("amplitude"),
                              pg.at("phase"), pg.at("beta"), w});
        r.notes.push_back("pair " + std::to_string(k) + ": F = " + nf + ", G = " + ng);
    }
    r.curves["pairs"] = pairs;
    r.add_scalar("max_error", worst);
    r.check_le("product_flow_matches_composition", worst, num(c, "tolerance"));
    return r;
}

Report flow_symplecticity(const Json& c) {
    const Hamiltonian F = catalog("oscillator", {{"lambda", num(c, "lambda")}});
    const double b = num(c, "box");
    const FlowMap f(F, flow_opts(str(c, "scheme"), num(c, "step")));
    const Grid g = sample_grid(ManifoldSpec::euclidean(1), integer(c, "resolution"), Box{{{-b, b}, {-b, b}}});
    Report r;
    const Report s = symplecticity_report(f, g, num(c, "t"));
    r.absorb(s, "");
    r.verdicts.clear();
    r.check_le("symplectic", s.scalar("max_residual"), num(c, "tolerance"));
    return r;
}

Report square_energy(const Json& c) {
    const double u = num(c, "u"), eps = num(c, "eps");
    const SquareCertificate s = square_displacement_certificate(u, eps);
    Report r;
    r.add_scalar("u", u);
    r.add_scalar("area", u * u);
    r.add_scalar("hofer_length", s.certificate.value, s.certificate.error);
    r.add_scalar("min_distance", s.displacement.min_distance);
    r.add_scalar("cutoff_margin", s.cutoff_margin);
    r.check_le("length_le_area_plus_eps", s.certificate.value, u * u + eps);
    r.check("displaces_square", s.displacement.displaced);
    r.notes.push_back(s.certificate.note);
    return r;
}

Report lp_degeneracy(const Json& c) {
    const LpDegeneracyStep s = lp_degeneracy_demo(num(c, "p"), num(c, "target"), num(c, "radius"), num(c, "shift"));
    Report r = s.report;
    r.check_ge("linf_cost_stays_large", r.scalar("min_linf_cost"), num(c, "linf_floor"));
    return r;
}

Report sphere_loop(const Json& c) {
    const ManifoldSpec S = ManifoldSpec::normalized_sphere2();
    const Hamiltonian F = catalog("rotation_k", {{"k", num(c, "k")}, {"area_scale", S.area_scale}});
    const Grid g = sample_grid(S, integer(c, "resolution"));
    const OscillationEstimate o = oscillation(F, 0.0, g);
    const double len = path_length(F, {0.0, 1.0}, LengthKind::length_linf, g);
    const double tol = num(c, "tolerance"), k = num(c, "k");
    Report r;
    r.add_scalar("max", o.max.value, o.error);
    r.add_scalar("min", o.min.value, o.error);
    r.add_scalar("length", len);
    r.check_le("max_is_half_k", std::abs(o.max.value - 0.5 * k), tol);
    r.check_le("min_is_minus_half_k", std::abs(o.min.value + 0.5 * k), tol);
    r.check_le("length_is_k", std::abs(len - k), tol);
    return r;
}

Report second_variation(const Json& c) {
    if (str(c, "catalog") != "oscillator") throw Error(ErrorCode::config, "second-variation supports catalog=oscillator");
    if (str(c, "curve") != "circle") throw Error(ErrorCode::config, "second-variation supports curve=circle");
    const double lambda = num(c, "lambda"), rad = num(c, "r");
    if (!(rad > 0.0)) throw Error(ErrorCode::invalid_argument, "r must be positive");
    const ExtremalData ex = extremal_at(catalog("oscillator", {{"lambda", lambda}}), std::nullopt, vec2(0, 0));
    const VariationField v = VariationField::sample(
        [rad](double t) { return vec2(rad * (std::cos(2 * pi * t) - 1.0), rad * std::sin(2 * pi * t)); },
        integer(c, "samples"));
    const double Q = second_variation_Q(ex, -1, v);
    const double E = energy(v), A = signed_area(v);
    const double formula = -E / (2 * pi * lambda) + 2 * A;
    Report r;
    r.add_scalar("Q_minus", Q);
    r.add_scalar("formula", formula);
    r.add_scalar("energy", E);
    r.add_scalar("area", A);
    r.add_scalar("isoperimetric_gap", E - 4 * pi * A);
    r.check_le("Q_matches_formula", std::abs(Q - formula), 1e-4);
    r.check_le("four_pi_lambda_area_le_energy", 4 * pi * lambda * A - E, 1e-9);
    r.check_le("circle_equality", std::abs(4 * pi * A - E), 1e-6);
    return r;
}

Report fd_second_variation(const Json& c) {
    const Hamiltonian F = inverted_oscillator(num(c, "lambda"));
    auto flow = std::make_shared<FlowMap>(F);
    const ExtremalData ex = extremal_at(F, vec2(0, 0), std::nullopt);
    const std::uint64_t seed = c.at("seed").get<std::uint64_t>();
    const int n = integer(c, "generators");
    std::vector<double> Q(n), D(n);
    for (int k = 0; k < n; ++k) {
        const Variation var(flow, random_v1_generator(F.manifold, seed + k, 3, num(c, "amplitude")));
        Q[k] = second_variation_Q(ex, 1, var.velocity(vec2(0, 0)));
        D[k] = fd_second_derivative(var, ex, 1, num(c, "h"), integer(c, "time_nodes")).value;
    }
    Report r;
    Curve cv{{"seed", "fd2_ell_plus", "Q_plus", "abs_diff", "bound"}, {}};
    double slack = -1e300;
    for (int k = 0; k < n; ++k) {
        const double bound = std::max(1e-3, 1e-2 * std::abs(Q[k]));
        cv.rows.push_back({double(seed + k), D[k], Q[k], std::abs(D[k] - Q[k]), bound});
        slack = std::max(slack, std::abs(D[k] - Q[k]) - bound);
    }
    r.curves["generators"] = cv;
    r.add_scalar("worst_excess", slack);
    r.check_le("fd_matches_Q", slack, 0.0, "max over generators of |FD - Q| - max(1e-3, 1e-2 |Q|)");
    return r;
}

Report conjugate_scan(const Json& c) {
    const double lambda = num(c, "lambda"), Tmax = num(c, "T_max");
    const int n = integer(c, "samples");
    if (n < 10 || !(Tmax > 0.0)) throw Error(ErrorCode::invalid_argument, "bad scan grid");
    std::vector<double> T;
    for (int i = 1; i <= n; ++i) T.push_back(Tmax * i / n);
    const Hamiltonian F = catalog("oscillator", {{"lambda", lambda}});
    const ConjugateScan s = conjugate_point_scan(F, extremal_at(F, std::nullopt, vec2(0, 0)), -1, T);
    Report r;
    r.curves["det"] = s.curve;
    Json roots = Json::array();
    std::vector<double> found;
    for (const ConjugatePoint& p : s.roots) {
        roots.push_back(p.T);
        if (p.T <= 1.0 + 1e-4) found.push_back(p.T);
    }
    r.results["roots"] = roots;
    r.add_scalar("roots_in_unit_interval", double(found.size()));
    // det(M(T) - I) = 2 - 2 cos(2 pi lambda T) vanishes at T = k / lambda
    std::vector<double> expect;
    if (lambda > 0.0)
        for (int k = 1; k / lambda <= 1.0 + 1e-12; ++k) expect.push_back(k / lambda);
    bool ok = !s.degenerate && found.size() == expect.size();
    double worst = 0.0;
    for (std::size_t i = 0; ok && i < found.size(); ++i) worst = std::max(worst, std::abs(found[i] - expect[i]));
    r.add_scalar("max_root_error", worst);
    r.check("roots_match_k_over_lambda", ok && worst <= 1e-4);
    if (s.degenerate) r.notes.push_back("C(t) degenerate: scan refused");
    return r;
}

Report lemma_cases(const Json& c) {
    std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    const int n = integer(c, "cases");
    auto torus = std::make_shared<FlowMap>(catalog("tilted_height"));
    auto plane = std::make_shared<FlowMap>(inverted_oscillator(0.9));
    Curve cv{{"case", "manifold", "seed", "p", "q", "integral"}, {}};
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const bool on_torus = k % 2 == 0;
        const std::uint64_t seed = rng();
        const Vec x = vec2(U(rng), U(rng));
        const auto& flow = on_torus ? torus : plane;
        const ManifoldSpec M = on_torus ? ManifoldSpec::torus2() : ManifoldSpec::euclidean(1);
        const Variation var(flow, random_v1_generator(M, seed, 3, 2.0));
        const double v = lemma_integral(var, x);
        worst = std::max(worst, std::abs(v));
        cv.rows.push_back({double(k), on_torus ? 1.0 : 0.0, double(seed % 1000000), x[0], x[1], v});
    }
    Report r;
    r.curves["cases"] = cv;
    r.add_scalar("max_abs_integral", worst);
    r.check_le("integral_vanishes", worst, num(c, "tolerance"));
    return r;
}

Report flux_path(const Json& c) {
    const SymplecticPath P = parse_path(str(c, "map"));
    const double audit = path_symplecticity_residual(P);
    FluxValue f = flux_of_path(P, integer(c, "t_samples"), integer(c, "s_samples"));
    f.dp += 0.0;  // no negative zeros in the output
    f.dq += 0.0;
    Report r;
    r.add_scalar("flux_dp", f.dp);
    r.add_scalar("flux_dq", f.dq);
    r.add_scalar("raw_dp", f.raw_dp);
    r.add_scalar("raw_dq", f.raw_dq);
    r.add_scalar("symplectic_residual", audit);
    r.check_le("symplectic_audit", audit, 1e-5);
    r.results["flux"] = {f.dp, f.dq};
    return r;
}

Report flux_gamma(const Json& c) {
    FluxValue v = flux_of_path(translation_path(0.0, 1.0));
    FluxValue h = flux_of_path(translation_path(1.0, 0.0));
    for (FluxValue* f : {&v, &h}) f->dp += 0.0, f->dq += 0.0;
    const SymplecticPath ham = hamiltonian_path(pulsing_shear(num(c, "amplitude")));
    const FluxValue z = flux_of_path(ham);
    Report r;
    r.add_scalar("vertical_dp", v.dp);
    r.add_scalar("vertical_dq", v.dq);
    r.add_scalar("horizontal_dp", h.dp);
    r.add_scalar("horizontal_dq", h.dq);
    r.add_scalar("hamiltonian_flux_norm", std::hypot(z.dp, z.dq));
    r.check_le("vertical_is_(1,0)", std::hypot(v.dp - 1.0, v.dq), 1e-9);
    r.check_le("horizontal_is_(0,-1)", std::hypot(h.dp, h.dq + 1.0), 1e-9);
    r.check_le("hamiltonian_loop_flux_vanishes", std::hypot(z.dp, z.dq), 1e-5);
    r.absorb(flux_pairing_check(translation_path(0.0, 1.0), wavy_cycle(1, 0)), "pair_vertical_");
    r.absorb(flux_pairing_check(translation_path(1.0, 0.0), wavy_cycle(0, 1)), "pair_horizontal_");
    r.absorb(flux_pairing_check(ham, wavy_cycle(1, 1)), "pair_hamiltonian_");
    r.results["gamma_generators"] = Json::array({Json::array({v.dp, v.dq}), Json::array({h.dp, h.dq})});
    return r;
}

Report flux_commutator(const Json& c) {
    const Hamiltonian F = catalog("q_bump", {{"center", num(c, "center")}});
    const CommutatorHamiltonian ch = commutator_hamiltonian(F, num(c, "b"));
    const Grid g = sample_grid(ManifoldSpec::torus2(), integer(c, "resolution"));
    const OscillationEstimate o = oscillation(ch.G, 0.0, g);
    Report r;
    r.add_scalar("max_flow_error", ch.max_error);
    r.add_scalar("oscillation_G", o.value, o.error);
    r.add_scalar("oscillation_F", oscillation(F, 0.0, g).value);
    r.check_le("commutator_generated_by_G", ch.max_error, 1e-4);
    return r;
}

Report suspension_run(const Json& c) {
    Report r;
    const Report eq = suspension_isotropy_check(equator_rotation_suspension());
    r.absorb(eq, "equator_");
    const LoopFamily fam = tilted_axis_family(num(c, "tilt"));
    double worst = 0.0;
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (const Vec& x : {vec3(0.36, 0.48, 0.8), vec3(1, 0, 0), vec3(0, 0.6, -0.8)})
            worst = std::max(worst, std::abs(exactness_integral(fam, x, s).value));
    r.add_scalar("exactness_max", worst);
    r.check_le("exactness_vanishes", worst, 1e-5);

    SuspensionMap broken = meridian_rotation_suspension();
    broken.r_sign = 1.0;
    const double bad_iso = isotropy_residual(broken);
    const double bad_exact = std::abs(exactness_integral(tilted_axis_family(num(c, "tilt"), 0.5), vec3(0.36, 0.48, 0.8), 0.5, false).value);
    r.add_scalar("control_wrong_sign", bad_iso);
    r.add_scalar("control_not_a_loop", bad_exact);
    r.check_ge("control_wrong_sign_detected", bad_iso, 1e-2);
    r.check_ge("control_not_a_loop_detected", bad_exact, 1e-2);
    return r;
}

Report liouville(const Json& c) {
    const double rad = num(c, "r");
    const ParametrizedCycle cyc = named_cycle(str(c, "cycle"), {{"r", rad}}, integer(c, "samples"));
    const double v = liouville_pairing(cyc);
    Report r;
    r.add_scalar("pairing", v);
    r.add_scalar("closure_gap", cyc.closure_gap());
    if (str(c, "cycle") == "circle") r.check_le("circle_gives_pi_r2", std::abs(v - pi * rad * rad), 1e-9);
    return r;
}

Report dbar_family(const Json& c) {
    const double s = num(c, "s");
    const DiscMap f = family_map(s);
    double worst = 0.0;
    for (const Complex z : {Complex(0.1, 0.2), Complex(-0.9, 0.0), Complex(0.0, 0.99), Complex(0.5, -0.5)})
        worst = std::max(worst, std::abs(dbar(f, z)[0] - s));
    const SigmaResult sg = boundary_sigma(f);
    Report r;
    r.add_scalar("dbar_error", worst);
    r.add_scalar("boundary_modulus_defect", family_boundary_modulus_defect(s));
    r.add_scalar("boundary_degree", family_boundary_degree(s));
    r.add_scalar("sigma_re", sg.sigma.real());
    r.add_scalar("sigma_im", sg.sigma.imag());
    r.add_scalar("abs_alpha", s > 0.0 ? std::abs(family_alpha(s)) : std::numeric_limits<double>::infinity());
    r.check_le("dbar_is_s", worst, 1e-12);
    r.check_le("boundary_modulus_one", r.scalar("boundary_modulus_defect"), 1e-9);
    r.check_le("sigma_is_s", std::abs(sg.sigma - s), 1e-6);
    r.check_le("sigma_bounded", std::abs(sg.sigma), 1.0 + 1e-6);
    r.curves["real_section"] = real_section(s, integer(c, "samples"));
    r.results["sigma"] = {sg.sigma.real(), sg.sigma.imag()};
    return r;
}

Report disc_areas(const Json& c) {
    const double s = num(c, "s");
    const DiscAreas a = areas(family_map(s), integer(c, "radial"), integer(c, "angular"));
    Report r = a.report;
    r.check_le("energy_is_2_pi_s2", std::abs(a.dbar_energy - 2 * pi * s * s), std::max(1e-9, 2 * a.error));
    return r;
}

Report morse_homology(const Json& c) {
    const ManifoldSpec M = ManifoldSpec::parse(str(c, "surface"));
    if (M.kind != ManifoldKind::sphere2 && M.kind != ManifoldKind::torus2)
        throw Error(ErrorCode::config, "surface must be sphere2 or torus2");
    const Hamiltonian F = catalog(str(c, "function"));
    if (F.manifold.kind != M.kind) throw Error(ErrorCode::config, "function '" + F.name + "' does not live on " + M.name());
    ShootingOptions o;
    o.offset = num(c, "offset");
    return morse_report(F, M, ConformalMetric(num(c, "amplitude"), c.at("seed").get<std::uint64_t>()), o);
}

Report loop_average(const Json& c) {
    const SkewProduct S = tilted_rotation_loop(num(c, "alpha"), num(c, "beta"));
    const Grid g = sample_grid(S.manifold, integer(c, "resolution"));
    const auto H = [](const Vec& y, double) { return 2.0 * pi * y[2]; };
    const LoopAverage a = loop_average_decay(S, H, integer(c, "N"), g, integer(c, "t_samples"));
    Report r;
    r.curves["averages"] = a.curve();
    r.add_scalar("vert_1", a.vert.front());
    r.add_scalar("vert_N", a.vert.back());
    r.add_scalar("ratio", a.vert.back() / a.vert.front());
    r.add_scalar("telescoping_defect", a.telescoping_defect);
    r.add_scalar("loop_closure_defect", loop_closure_defect(S, g));
    r.check_le("averages_decay", a.vert.back() / a.vert.front(), num(c, "ratio"));
    r.check_le("telescoping", a.telescoping_defect, 1e-9);
    return r;
}

Report growth_delta(const Json& c) {
    const Hamiltonian F = catalog(str(c, "hamiltonian"));
    if (F.manifold.kind != ManifoldKind::torus2) throw Error(ErrorCode::config, "delta runs on torus Hamiltonians");
    const std::string kind = str(c, "candidates");
    CandidateSet C;
    if (kind == "translations") C = torus_translations(integer(c, "n"));
    else if (kind == "identity") C = {identity_candidate()};
    else throw Error(ErrorCode::config, "candidates must be 'translations' or 'identity'");
    const DeltaResult d = delta(F, C, sample_grid(ManifoldSpec::torus2(), integer(c, "resolution")));
    Report r;
    r.add_scalar("delta", d.value);
    r.add_scalar("candidates", double(C.size()));
    r.results["witness"] = d.witness;
    r.check_le("delta_at_most_one", d.value, 1.0 + 1e-12);
    if (kind == "identity") r.check_le("identity_gives_one", std::abs(d.value - 1.0), 1e-12);
    else r.check_le("delta_le_bound", d.value, num(c, "bound"));
    return r;
}

std::vector<Experiment> build_registry() {
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    return {
        {"flow-full-turn", "flow", "full-turn", "full turn of the sphere rotation generated by F1 = 2 pi x3",
         Json{{"scheme", "implicit_midpoint"}, {"step", 2.5e-4}, {"resolution", 12}, {"tolerance", 1e-5}}, "",
         flow_full_turn},
        {"product-formula", "hamiltonian", "product-formula",
         "product formula: f_t g_t is generated by F(x,t) + G(f_t^{-1} x, t)",
         Json{{"pairs", 5}, {"seed", 17}, {"resolution", 32}, {"step", 1e-3}, {"tolerance", 1e-5}}, "pairs",
         hamiltonian_product},
        {"flow-symplecticity", "flow", "symplecticity", "Hamiltonian flows preserve the symplectic form",
         Json{{"lambda", 1.0}, {"scheme", "implicit_midpoint"}, {"step", 1e-3}, {"t", 1.0}, {"box", 1.0},
              {"resolution", 4}, {"tolerance", 1e-6}},
         "", flow_symplecticity},
        {"square-energy", "hofer", "square-energy", "displacement energy of a square: e(A) <= u^2 = area(A)",
         Json{{"u", 0.5}, {"eps", 0.01}}, "", square_energy},
        {"lp-degeneracy", "hofer", "lp-degeneracy", "L_p lengths degenerate while the L-infinity length stays rigid",
         Json{{"p", 1.0}, {"target", 1e-2}, {"radius", 0.5}, {"shift", 1.1}, {"linf_floor", 0.9}}, "sweep",
         lp_degeneracy},
        {"sphere-loop", "hofer", "sphere-loop", "normalized sphere rotation: max F = -min F = 1/2, loop length 1",
         Json{{"k", 1.0}, {"resolution", 12}, {"tolerance", 1e-3}}, "", sphere_loop},
        {"second-variation", "geodesic", "second-variation",
         "second variation on circles and the isoperimetric inequality 4 pi area <= energy",
         Json{{"catalog", "oscillator"}, {"lambda", 0.9}, {"curve", "circle"}, {"r", 0.3}, {"samples", 4096}}, "",
         second_variation},
        {"fd-second-variation", "geodesic", "fd-second-variation",
         "second variation formula for the positive part of the length at a quasi-autonomous path",
         Json{{"lambda", 0.9}, {"generators", 10}, {"seed", 21}, {"amplitude", 8.0}, {"h", 1e-2}, {"time_nodes", 24}},
         "generators", fd_second_variation},
        {"conjugate-scan", "geodesic", "conjugate-scan",
         "conjugate points of the oscillator: none on (0,1] for lambda < 1",
         Json{{"lambda", 0.5}, {"T_max", 1.05}, {"samples", 210}}, "det", conjugate_scan},
        {"lemma-integral", "geodesic", "lemma-integral",
         "the first-order term of the variation integrates to zero at eps = 0",
         Json{{"cases", 50}, {"seed", 5}, {"tolerance", 1e-5}}, "cases", lemma_cases},
        {"flux-path", "flux", "path", "flux of a symplectic path on the torus",
         Json{{"map", "translate_q:0.37"}, {"t_samples", 65}, {"s_samples", 256}}, "", flux_path},
        {"flux-gamma", "flux", "gamma",
         "flux group of the torus: Gamma = Z^2 from the two translation loops; pairing with swept areas",
         Json{{"amplitude", 1.0}}, "", flux_gamma},
        {"flux-commutator", "flux", "commutator", "commutator of a shear with a translation and its generator",
         Json{{"center", 0.0}, {"b", 0.5}, {"resolution", 64}}, "", flux_commutator},
        {"suspension", "lagrangian", "suspension",
         "Lagrangian suspension of a loop and exactness of loop homotopies",
         Json{{"tilt", 1.1}}, "", suspension_run},
        {"liouville-pairing", "lagrangian", "liouville", "Liouville class on planar cycles",
         Json{{"cycle", "circle"}, {"r", 0.3}, {"samples", 1024}}, "", liouville},
        {"dbar-family", "dbar", "family", "explicit family with dbar f_s = s and boundary values on the circle",
         Json{{"s", 0.9}, {"samples", 401}}, "real_section", dbar_family},
        {"disc-areas", "dbar", "areas", "area of a disc bounded by dbar energy plus symplectic area",
         Json{{"s", 0.5}, {"radial", 128}, {"angular", 256}}, "", disc_areas},
        {"morse-homology", "morse", "homology",
         "finite-dimensional Morse homology over Z2; essentiality of the maximum",
         Json{{"surface", "torus2"}, {"function", "tilted_height"}, {"amplitude", 1e-2}, {"seed", 1309}, {"offset", 1e-3}},
         "critical_points", morse_homology},
        {"loop-average", "growth", "loop-average", "averaging a loop over a circle rotation with irrational alpha",
         Json{{"alpha", golden}, {"beta", pi / 4}, {"N", 200}, {"resolution", 6}, {"t_samples", 16}, {"ratio", 0.2}},
         "averages", loop_average},
        {"growth-delta", "growth", "delta", "delta(F) = inf ||F + F o phi|| / (2 ||F||) over symplectic candidates",
         Json{{"hamiltonian", "torus_bump"}, {"candidates", "translations"}, {"n", 4}, {"resolution", 48},
              {"bound", 0.501}},
         "", growth_delta},
    };
}

bool parse_number(const std::string& s, double& out) {
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size() && std::isfinite(out);
}

}  // namespace

const std::vector<Experiment>& experiments() {
    static const std::vector<Experiment> registry = build_registry();
    return registry;
}

const Experiment& find_experiment(const std::string& id) {
    for (const Experiment& e : experiments())
        if (e.id == id) return e;
    throw Error(ErrorCode::config, "unknown experiment '" + id + "'");
}

const Experiment& find_experiment(const std::string& module, const std::string& command) {
    for (const Experiment& e : experiments())
        if (e.module == module && (e.command == command || e.id == command)) return e;
    throw Error(ErrorCode::config, "unknown experiment '" + module + " " + command + "'");
}

Json resolve_config(const Experiment& e, const Json& overrides) {
    if (!overrides.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
    Json out = e.defaults;
    for (const auto& [key, value] : overrides.items()) {
        if (!e.defaults.contains(key)) throw Error(ErrorCode::config, "unknown key '" + key + "' for " + e.id);
        const Json& d = e.defaults.at(key);
        auto bad = [&] { return Error(ErrorCode::config, "bad value for '" + key + "' in " + e.id + ": " + value.dump()); };
        if (d.is_string()) {
            if (!value.is_string()) throw bad();
            out[key] = value;
        } else if (d.is_boolean()) {
            if (value.is_boolean()) out[key] = value;
            else if (value == "true") out[key] = true;
            else if (value == "false") out[key] = false;
            else throw bad();
        } else {
            double x = 0.0;
            if (value.is_number()) x = value.get<double>();
            else if (!(value.is_string() && parse_number(value.get<std::string>(), x))) throw bad();
            if (!std::isfinite(x)) throw bad();
            if (d.is_number_integer()) {
                if (x != std::floor(x) || std::abs(x) > 9e15) throw bad();
                if (d.is_number_unsigned() || x >= 0) {
                    if (x < 0) throw bad();
                    out[key] = static_cast<std::uint64_t>(x);
                } else {
                    out[key] = static_cast<std::int64_t>(x);
                }
            } else {
                out[key] = x;
            }
        }
    }
    return out;
}

Report run_experiment(const std::string& id, const Json& overrides) {
    const Experiment& e = find_experiment(id);
    const Json cfg = resolve_config(e, overrides);
    const auto t0 = std::chrono::steady_clock::now();
    Report r = e.run(cfg);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.experiment = e.id;
    r.version = version_string();
    r.config = cfg;
    r.citations = {e.citation};
    return r;
}

int exit_code(const Report& r) { return r.all_passed() ? exit_pass : exit_verdict_failed; }

int exit_code(const Error& e) {
    switch (e.code()) {
        case ErrorCode::config:
        case ErrorCode::invalid_argument:
        case ErrorCode::unsupported: return exit_config;
        default: return exit_numerical;
    }
}

std::string version_string() { return HOFER_VERSION; }

}  // namespace hofer
