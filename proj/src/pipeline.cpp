#include "lamcon/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "lamcon/energy.hpp"
#include "lamcon/lightcone.hpp"
#include "lamcon/transforms.hpp"

namespace lamcon {

namespace {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

/// Row that passes when value <= tolerance.
CheckRow upper_row(std::string id, std::string ref, std::string desc, double value,
                   double tol, double ms) {
    CheckRow r;
    r.id = std::move(id);
    r.ref = std::move(ref);
    r.description = std::move(desc);
    r.value = value;
    r.tolerance = tol;
    r.pass = value <= tol;
    r.runtime_ms = ms;
    r.extra["cmp"] = "<=";
    return r;
}

/// Row that passes when value >= tolerance (margins, convergence factors).
CheckRow lower_row(std::string id, std::string ref, std::string desc, double value,
                   double tol, double ms) {
    CheckRow r;
    r.id = std::move(id);
    r.ref = std::move(ref);
    r.description = std::move(desc);
    r.value = value;
    r.tolerance = tol;
    r.pass = value >= tol;
    r.runtime_ms = ms;
    r.extra["cmp"] = ">=";
    return r;
}

std::vector<cplx> circle_samples(int n) {
    std::vector<cplx> out;
    for (int j = 0; j < n; ++j) {
        const double th = 2.0 * kPi * (j + 0.37) / n;
        out.push_back(cplx(std::cos(th), std::sin(th)));
    }
    return out;
}

std::vector<cplx> mixed_samples() {
    std::vector<cplx> out = circle_samples(4);
    for (double r : {0.8, 1.25}) {
        out.push_back(r * cplx(std::cos(0.9), std::sin(0.9)));
        out.push_back(r * cplx(std::cos(2.3), std::sin(2.3)));
    }
    return out;
}

struct S3Data {
    SolutionData sol;
    LambdaFamily fam;
};

S3Data s3_constant(int n, cplx q0) {
    const Domain dom = Domain::unit_torus(n, n);
    const double u0 = solve_constant(q0, Target::S3);
    S3Data d;
    d.sol.domain = dom;
    d.sol.u = MatrixField::constant(dom, cmat::Constant(1, 1, cplx(u0, 0.0)));
    d.sol.q = MatrixField::constant(dom, cmat::Constant(1, 1, q0));
    d.sol.target = Target::S3;
    d.fam = family_from_uq(d.sol);
    return d;
}

struct H3Data {
    SolutionData sol;
    LambdaFamily fam;
};

H3Data h3_strip(double halfwidth, int nx, int ny, double yext, cplx q0) {
    H3Data d;
    const double umin = strip_potential_minimum(q0);
    d.sol = solve_gordon_strip(q0, umin, 0.0, -halfwidth, halfwidth, nx, 0.0, yext, ny);
    d.fam = family_from_uq(d.sol);
    return d;
}

double rel(double num, double den) { return num / std::max(std::abs(den), 1e-300); }

// -- acceptance criteria -------------------------------------------------------

void criterion_energy_invariance(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    S3Data d = s3_constant(64, cplx(1.0, 0.0));
    const cplx e0 = energy(d.fam).energy;
    double spread = 0.0;
    for (int s = 1; s <= 100; ++s) {
        GaugeFamily g = random_lift_perturbation(d.sol.domain, 1000 + s, 6);
        if (s % 2 == 0) {
            GaugeFamily c = random_constant_sl2(d.sol.domain, 7000 + s);
            g = gauge_compose(c, g, 0, 6);
        }
        const cplx e = energy(gauge_apply(d.fam, g)).energy;
        spread = std::max(spread, std::abs(e - e0) / std::abs(e0));
    }
    rows.push_back(upper_row("energy_gauge_invariance", "Prop 2.2",
                             "energy spread over 100 random lambda-gauges",
                             spread, 1e-9, sw.ms()));
}

void criterion_sign_dichotomy(std::vector<CheckRow>& rows, VerifyLevel level) {
    Stopwatch sw;
    double min_margin = std::numeric_limits<double>::infinity();
    for (cplx q0 : {cplx(1.0, 0.0), cplx(0.5, 0.25), cplx(2.0, -1.0)}) {
        S3Data d = s3_constant(32, q0);
        min_margin = std::min(min_margin, energy(d.fam).energy.real());
    }
    rows.push_back(lower_row("s3_energy_positive", "Thm 2.4",
                             "energy margin of rho-fixed families", min_margin, 1e-12,
                             sw.ms()));

    Stopwatch sw2;
    const int nx = (level == VerifyLevel::Full) ? 384 : 256;
    H3Data h = h3_strip(0.5, nx, 16, 0.25, cplx(1.0, 0.0));
    // energy integrand as a dx dy density; one sign makes E <= 0 on any subpatch
    GridField psi = GridField::one_form(MatrixField(h.sol.domain, 2),
                                        h.fam.coefficient(1).dzbar());
    GridField w = wedge(h.fam.coefficient(-1), psi);
    MatrixField tr = w.dzdzbar().trace_field();
    double max_density = -std::numeric_limits<double>::infinity();
    for (long p = 0; p < tr.points(); ++p) {
        const cplx dens = tr.entry(p, 0, 0) * cplx(0.0, -2.0) / cplx(0.0, 2.0 * kPi);
        max_density = std::max(max_density, dens.real());
    }
    rows.push_back(lower_row("h3_integrand_sign", "Thm 2.4",
                             "margin of the negative-sign energy density on the H3 strip",
                             -max_density, 1e-12, sw2.ms()));
}

void criterion_reality(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    double im = 0.0;
    {
        S3Data d = s3_constant(48, cplx(1.2, 0.4));
        im = std::max(im, std::abs(energy(d.fam).energy.imag()));
        H3Data h = h3_strip(0.5, 256, 16, 0.25, cplx(1.0, 0.0));
        im = std::max(im, std::abs(energy(h.fam).energy.imag()));
    }
    rows.push_back(upper_row("sigma_fixed_energy_real", "Prop 2.5",
                             "Im E on sigma-fixed families", im, 1e-10, sw.ms()));

    Stopwatch sw2;
    const Domain dom = Domain::unit_torus(32, 32);
    double dev = 0.0;
    for (int s = 0; s < 20; ++s) {
        LambdaFamily fam = random_admissible_family(dom, 300 + s);
        const cplx e = energy(fam).energy;
        for (Involution inv : {Involution::Tau, Involution::Rho})
            dev = std::max(dev, std::abs(energy_sigma(fam, inv) - std::conj(e)));
    }
    rows.push_back(upper_row("energy_sigma_conjugation", "Prop 2.5",
                             "E(sigma* s) vs conj E(s) on random admissible families", dev,
                             1e-10, sw2.ms()));
}

void criterion_twist_energy(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    S3Data d = s3_constant(64, cplx(1.0, 0.0));
    LineSplitting split = kernel_splitting(d.fam.coefficient(-1));
    LambdaFamily tw = twist(d.fam, split);
    const double e = energy(d.fam).energy.real();
    const double etw = energy(tw).energy.real();
    const double deg = line_degree(d.fam, split);
    rows.push_back(upper_row("twist_energy_relation", "Prop 3.1",
                             "|E(twist) - (2E - deg L)|",
                             std::abs(etw - (2.0 * e - deg)), 1e-8, sw.ms()));
    rows.push_back(upper_row("line_degree_integrality", "Prop 3.1",
                             "distance of deg L to the nearest integer",
                             std::abs(deg - std::lround(deg)), 1e-6, sw.ms()));

    Stopwatch sw2;
    GridField block = line_block_curvature(tw, split);
    if (tw.contains(-1) && tw.contains(1)) {
        GridField mixed = wedge(tw.coefficient(-1), tw.coefficient(1));
        mixed += wedge(tw.coefficient(1), tw.coefficient(-1));
        GridField sandwich = lmul(split.p_line, rmul(mixed, split.p_line));
        block += GridField::two_form(sandwich.dzdzbar().trace_field());
    }
    rows.push_back(upper_row("twist_block_identity", "Prop 3.1",
                             "sup of F^L + phi^psi + alpha^beta on the twisted family",
                             block.sup_norm(), 1e-8, sw2.ms()));
}

void criterion_dual_energy(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    S3Data d = s3_constant(64, cplx(0.8, 0.3));
    LineSplitting split = kernel_splitting(d.fam.coefficient(-1));
    LambdaFamily dual = dual_surface(d.fam, split);
    LambdaFamily tw = twist(d.fam, split);
    const double e = energy(d.fam).energy.real();
    const double edual = energy(dual).energy.real();
    const double etw = energy(tw).energy.real();
    const double deg = line_degree(d.fam, split);
    rows.push_back(upper_row("dual_energy_relation", "Prop 5.1",
                             "|E(dual) - (E - deg L)|", std::abs(edual - (e - deg)), 1e-8,
                             sw.ms()));
    rows.push_back(lower_row("twist_positivity_chain", "Cor 3.2",
                             "margin of E(twist) - |deg L| on S3 data", etw - std::abs(deg),
                             1e-12, sw.ms()));
}

void criterion_residue(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    const Domain dom = Domain::unit_torus(48, 48);
    std::mt19937_64 rng(0xabcdef12u);
    double dev = 0.0, dev_twistor = 0.0;
    for (int s = 0; s < 50; ++s) {
        LambdaFamily probe = random_admissible_family(dom, 5000 + s);
        const GridField& phi = probe.coefficient(-1);
        GridField gamma_lift =
            GridField::one_form(MatrixField(dom, 2), probe.coefficient(1).dzbar());
        GridField gamma_ref = phi.adjoint();
        TangentPair lift = make_tangent(gamma_lift, GridField::zeros(dom, 2, FormDegree::One));
        TangentPair ref = make_tangent(gamma_ref, GridField::zeros(dom, 2, FormDegree::One));
        const cplx mu = moment_map(phi);
        const cplx res = residue_rhs(phi, lift, ref, mu);
        const cplx e = energy(probe).energy;
        dev = std::max(dev, std::abs(e - cplx(0.0, 1.0) / (2.0 * kPi) * res));
        dev_twistor = std::max(dev_twistor, std::abs(residue_rhs(phi, ref, ref, mu) - mu));
    }
    rows.push_back(upper_row("residue_identity", "Thm 4.3 / Cor 4.5",
                             "|E - (i/2pi) res| over 50 random tangents", dev, 1e-10,
                             sw.ms()));
    rows.push_back(upper_row("residue_twistor_line", "Thm 4.3",
                             "|res - mu| for the twistor-line tangent", dev_twistor, 1e-13,
                             sw.ms()));
}

void criterion_lightcone(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    H3Data h = h3_strip(0.4, 128, 48, 0.3, cplx(1.0, 0.0));
    FrameField fp = integrate_frame(h.fam, cplx(1.0, 0.0));
    FrameField fm = integrate_frame(h.fam, cplx(-1.0, 0.0));
    VField fhat = embed_hatf(fp, fm);
    rows.push_back(upper_row("lightcone_image", "§5.3", "sup |q(hatf)| on the strip",
                             lightcone_deviation(fhat), 1e-8, sw.ms()));

    Stopwatch sw2;
    std::mt19937_64 rng(0x15097acbu);
    std::uniform_real_distribution<double> un(-2.0, 2.0);
    double iso = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::array<double, 5> x;
        for (double& c : x) c = un(rng);
        const double qref = -x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] +
                            x[4] * x[4];
        iso = std::max(iso, std::abs(minkowski_q(isometry_psi(x)) - qref));
    }
    rows.push_back(upper_row("isometry_identity", "§5.3",
                             "isometry form identity on 1000 random vectors", iso, 1e-14,
                             sw2.ms()));

    Stopwatch sw3;
    const double so5 = so5_connection_check(h.sol, fp, circle_samples(8));
    rows.push_back(upper_row("psi_frame_connection", "Lemma 5.3",
                             "sup deviation of the psi-frame connection matrices", so5, 1e-5,
                             sw3.ms()));

    Stopwatch sw4;
    LineSplitting split = kernel_splitting(h.fam.coefficient(-1));
    LambdaFamily famhat = dual_surface(h.fam, split);
    const double dual_dev = dual_so5_equivalence(h.sol, famhat, circle_samples(8));
    rows.push_back(upper_row("dual_frame_equivalence", "Lemma 5.4",
                             "sup deviation of the dual-family rank-5 connection", dual_dev,
                             1e-6, sw4.ms()));
}

void criterion_willmore(std::vector<CheckRow>& rows, VerifyLevel level) {
    Stopwatch sw;
    const int nx = (level == VerifyLevel::Full) ? 256 : 160;
    H3Data h = h3_strip(0.4, nx, 64, 0.4, cplx(1.0, 0.0));
    LineSplitting split = kernel_splitting(h.fam.coefficient(-1));
    LambdaFamily famhat = dual_surface(h.fam, split);
    FrameField fp = integrate_frame(h.fam, cplx(1.0, 0.0));
    FrameField fm = integrate_frame(h.fam, cplx(-1.0, 0.0));
    VField fhat = embed_hatf(fp, fm);
    WillmoreReport wr = willmore_compare(h.sol, famhat, fhat);
    const double base_ms = sw.ms();
    rows.push_back(upper_row("willmore_algebraic_vs_dual", "Prop 5.2",
                             "pointwise |algebraic - dual-family| Willmore integrand",
                             wr.dev_ab, 1e-10, base_ms));
    rows.push_back(upper_row("willmore_geometric_match", "Prop 5.2",
                             "interior |geometric - algebraic| Willmore integrand",
                             wr.dev_ac_interior, 1e-4, base_ms));
    rows.push_back(upper_row("strip_minimality", "Prop 5.2", "sup |H| on the interior",
                             wr.sup_h_interior, 1e-4, base_ms));
    rows.push_back(upper_row("induced_metric_conformal", "§5.3",
                             "relative deviation of the induced metric from c0 e^{2u}",
                             wr.metric_conformal_dev, 1e-5, base_ms));
    rows.push_back(upper_row("area_energy_relation", "§5.2",
                             "relative |Area + 4 pi E| on the strip",
                             wr.area_energy_residual, 1e-4, base_ms));

    Stopwatch sw2;
    SphereReport sr = mean_curvature_sphere(fhat);
    rows.push_back(upper_row("sphere_signature", "§5.3",
                             "fraction of interior nodes without (3,1) signature",
                             sr.signature_ok ? 0.0 : 1.0, 0.5, sw2.ms()));
    rows.push_back(upper_row("sphere_contains_e4", "§5.3",
                             "projection of (0,1) onto the congruence complement",
                             sr.max_e4_residual, 1e-6, sw2.ms()));
}

void criterion_reality_propagation(std::vector<CheckRow>& rows) {
    Stopwatch sw;
    S3Data d = s3_constant(64, cplx(1.0, 0.0));
    const auto samples = mixed_samples();
    const double rho_in = fingerprint_reality_deviation(d.fam, Involution::Rho, samples);
    LineSplitting split = kernel_splitting(d.fam.coefficient(-1));
    LambdaFamily tw = twist(d.fam, split);
    const double tau_tw = fingerprint_reality_deviation(tw, Involution::Tau, samples);
    const double n_tw = fingerprint_reality_deviation(tw, Involution::N, samples);
    rows.push_back(upper_row("rho_fingerprint_input", "Prop 1.11",
                             "rho-reality fingerprint of the S3 family", rho_in, 1e-7,
                             sw.ms()));
    rows.push_back(upper_row("tau_fingerprint_twist", "Prop 1.11",
                             "tau-reality fingerprint of the twist", tau_tw, 1e-7, sw.ms()));
    rows.push_back(upper_row("n_fingerprint_twist", "Prop 1.11",
                             "N-invariance fingerprint of the twist", n_tw, 1e-7, sw.ms()));
}

void criterion_convergence(std::vector<CheckRow>& rows) {
    {
        Stopwatch sw;
        H3Data coarse = h3_strip(0.5, 256, 16, 0.25, cplx(1.0, 0.0));
        H3Data fine = h3_strip(0.5, 512, 16, 0.25, cplx(1.0, 0.0));
        const double rc = max_flatness_residual(coarse.fam);
        const double rf = max_flatness_residual(fine.fam);
        CheckRow row = lower_row("convergence_flatness", "order check",
                                 "strip flatness residual improvement per mesh halving",
                                 rel(rc, rf), 8.0, sw.ms());
        row.extra["coarse"] = rc;
        row.extra["fine"] = rf;
        rows.push_back(row);
    }
    {
        Stopwatch sw;
        H3Data coarse = h3_strip(0.4, 64, 16, 0.25, cplx(1.0, 0.0));
        H3Data fine = h3_strip(0.4, 128, 16, 0.25, cplx(1.0, 0.0));
        const double mc = integrate_frame(coarse.fam, cplx(1.0, 0.0)).path_mismatch;
        const double mf = integrate_frame(fine.fam, cplx(1.0, 0.0)).path_mismatch;
        CheckRow row = lower_row("convergence_transport", "order check",
                                 "transport path-independence improvement per halving",
                                 rel(mc, mf), 8.0, sw.ms());
        row.extra["coarse"] = mc;
        row.extra["fine"] = mf;
        rows.push_back(row);
    }
    {
        Stopwatch sw;
        auto dev_at = [](int nx) {
            H3Data h = h3_strip(0.4, nx, 48, 0.3, cplx(1.0, 0.0));
            LineSplitting split = kernel_splitting(h.fam.coefficient(-1));
            LambdaFamily famhat = dual_surface(h.fam, split);
            FrameField fp = integrate_frame(h.fam, cplx(1.0, 0.0));
            FrameField fm = integrate_frame(h.fam, cplx(-1.0, 0.0));
            VField fhat = embed_hatf(fp, fm);
            return willmore_compare(h.sol, famhat, fhat).dev_ac_interior;
        };
        const double dc = dev_at(96);
        const double df = dev_at(192);
        CheckRow row = lower_row("convergence_geometric", "order check",
                                 "geometric Willmore integrand improvement per halving",
                                 rel(dc, df), 8.0, sw.ms());
        row.extra["coarse"] = dc;
        row.extra["fine"] = df;
        rows.push_back(row);
    }
}

}  // namespace

std::vector<CheckRow> verify_suite(VerifyLevel level) {
    std::vector<CheckRow> rows;
    criterion_energy_invariance(rows);
    criterion_sign_dichotomy(rows, level);
    criterion_reality(rows);
    criterion_twist_energy(rows);
    criterion_dual_energy(rows);
    criterion_residue(rows);
    criterion_lightcone(rows);
    criterion_willmore(rows, level);
    criterion_reality_propagation(rows);
    if (level == VerifyLevel::Full) criterion_convergence(rows);
    return rows;
}

json row_to_json(const CheckRow& row) {
    json j;
    j["id"] = row.id;
    j["ref"] = row.ref;
    j["description"] = row.description;
    j["value"] = row.value;
    j["tolerance"] = row.tolerance;
    j["pass"] = row.pass;
    j["runtime_ms"] = row.runtime_ms;
    if (!row.extra.empty()) j["extra"] = row.extra;
    return j;
}

int print_rows(const std::vector<CheckRow>& rows, std::ostream& os) {
    int failures = 0;
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", r.value);
        os << r.ref << " " << r.description << ": " << (r.pass ? "PASS" : "FAIL") << " "
           << buf << "\n";
        if (!r.pass) ++failures;
    }
    return failures;
}

// -- config-driven pipeline -------------------------------------------------------

namespace {

double tol_or(const ExperimentConfig& cfg, const std::string& id, double fallback) {
    auto it = cfg.tolerances.find(id);
    return (it != cfg.tolerances.end()) ? it->second : fallback;
}

SolutionData build_solution(const ExperimentConfig& cfg) {
    if (cfg.solver == "constant") {
        if (!cfg.domain.is_torus())
            throw ConfigurationError("constant solver expects a torus domain");
        const double u0 = solve_constant(cfg.q0, cfg.target);
        SolutionData sol;
        sol.domain = cfg.domain;
        sol.u = MatrixField::constant(cfg.domain, cmat::Constant(1, 1, cplx(u0, 0.0)));
        sol.q = MatrixField::constant(cfg.domain, cmat::Constant(1, 1, cfg.q0));
        sol.target = cfg.target;
        return sol;
    }
    if (cfg.domain.is_torus())
        throw ConfigurationError("gordon_strip solver expects a patch domain");
    if (cfg.target != Target::H3)
        throw ConfigurationError("gordon_strip solver is for target H3");
    const double u0 = cfg.u0_at_minimum ? strip_potential_minimum(cfg.q0) : cfg.u0;
    return solve_gordon_strip(cfg.q0, u0, cfg.du0, cfg.domain.x0(), cfg.domain.x1(),
                              cfg.domain.nx(), cfg.domain.y0(), cfg.domain.y1(),
                              cfg.domain.ny());
}

}  // namespace

RunReport run(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.document["schema_version"] = cfg.schema_version;
    rep.document["name"] = cfg.name;
    rep.document["seed"] = cfg.seed;
    rep.document["timestamp"] =
        static_cast<long>(std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count());

    fs::create_directories(cfg.out_dir);

    if (!cfg.pipeline.empty()) {
        SolutionData sol = build_solution(cfg);
        LambdaFamily fam = family_from_uq(sol);
        fam.provenance = cfg.name;
        const bool want_csv =
            std::find(cfg.report_formats.begin(), cfg.report_formats.end(), "csv") !=
            cfg.report_formats.end();

        for (const std::string& step : cfg.pipeline) {
            if (step == "build") {
                Stopwatch sw;
                save_solution(sol, cfg.out_dir + "/" + cfg.name + "_solution.lcf");
                save_family(fam, cfg.out_dir + "/" + cfg.name + "_family.lcf");
                const double fallback = (cfg.solver == "constant") ? 1e-12 : 1e-8;
                rep.rows.push_back(upper_row("flatness", "Rem 1.2",
                                             "flatness residual of the built family",
                                             max_flatness_residual(fam),
                                             tol_or(cfg, "flatness", fallback), sw.ms()));
            } else if (step == "energy") {
                Stopwatch sw;
                EnergyReport er = energy(fam);
                CheckRow row = upper_row("energy_reality", "Prop 2.5", "Im E of the family",
                                         std::abs(er.energy.imag()),
                                         tol_or(cfg, "energy_reality", 1e-10), sw.ms());
                row.extra["energy_re"] = er.energy.real();
                row.extra["energy_im"] = er.energy.imag();
                row.extra["trunc_err"] = er.trunc_err;
                row.extra["quad_err"] = er.quad_err;
                row.extra["family_id"] = er.family_id;
                rep.rows.push_back(row);
            } else if (step == "twist" || step == "dual") {
                Stopwatch sw;
                LineSplitting split = kernel_splitting(fam.coefficient(-1));
                LambdaFamily out =
                    (step == "twist") ? twist(fam, split) : dual_surface(fam, split);
                const double e = energy(fam).energy.real();
                const double eout = energy(out).energy.real();
                double resid;
                double deg = 0.0;
                if (cfg.domain.is_torus()) {
                    deg = line_degree(fam, split);
                    resid = (step == "twist") ? std::abs(eout - (2.0 * e - deg))
                                              : std::abs(eout - (e - deg));
                } else {
                    // open patch: deg L is replaced by the boundary-corrected
                    // curvature integral of the line block
                    const cplx fint =
                        integrate(line_block_curvature(fam, split), Reduce::Trace);
                    const double corr = (cplx(1.0, 0.0) / (2.0 * kPi * cplx(0.0, 1.0)) * fint)
                                            .real();
                    resid = (step == "twist") ? std::abs(eout - (2.0 * e + corr))
                                              : std::abs(eout - (e + corr));
                }
                const std::string id = step + "_energy_relation";
                CheckRow row = upper_row(id, (step == "twist") ? "Prop 3.1" : "Prop 5.1",
                                         "energy relation residual of the " + step,
                                         resid, tol_or(cfg, id, 1e-8), sw.ms());
                row.extra["energy_before"] = e;
                row.extra["energy_after"] = eout;
                row.extra["deg_L"] = deg;
                rep.rows.push_back(row);
                save_family(out, cfg.out_dir + "/" + cfg.name + "_" + step + ".lcf");
            } else if (step == "residue") {
                Stopwatch sw;
                const GridField& phi = fam.coefficient(-1);
                GridField gamma_lift = GridField::one_form(
                    MatrixField(cfg.domain, 2), fam.coefficient(1).dzbar());
                TangentPair lift = make_tangent(
                    gamma_lift, GridField::zeros(cfg.domain, 2, FormDegree::One));
                TangentPair ref = make_tangent(
                    phi.adjoint(), GridField::zeros(cfg.domain, 2, FormDegree::One));
                const cplx mu = moment_map(phi);
                const cplx res = residue_rhs(phi, lift, ref, mu);
                const cplx e = energy(fam).energy;
                CheckRow row =
                    upper_row("residue_identity", "Cor 4.5", "|E - (i/2pi) res|",
                              std::abs(e - cplx(0.0, 1.0) / (2.0 * kPi) * res),
                              tol_or(cfg, "residue_identity", 1e-10), sw.ms());
                row.extra["mu_im"] = mu.imag();
                rep.rows.push_back(row);
            } else if (step == "lightcone") {
                Stopwatch sw;
                if (cfg.domain.is_torus() || cfg.target != Target::H3)
                    throw ConfigurationError(
                        "lightcone step expects an H3 solution on a patch");
                FrameField fp = integrate_frame(fam, cplx(1.0, 0.0));
                FrameField fm = integrate_frame(fam, cplx(-1.0, 0.0));
                VField fhat = embed_hatf(fp, fm);
                rep.rows.push_back(upper_row("lightcone_image", "§5.3", "sup |q(hatf)|",
                                             lightcone_deviation(fhat),
                                             tol_or(cfg, "lightcone_image", 1e-8), sw.ms()));
                LineSplitting split = kernel_splitting(fam.coefficient(-1));
                LambdaFamily famhat = dual_surface(fam, split);
                Stopwatch sw2;
                const double so5 = so5_connection_check(sol, fp, circle_samples(8));
                rep.rows.push_back(upper_row("psi_frame_connection", "Lemma 5.3",
                                             "psi-frame connection deviation", so5,
                                             tol_or(cfg, "psi_frame_connection", 1e-5),
                                             sw2.ms()));
                Stopwatch sw3;
                const double dual_dev =
                    dual_so5_equivalence(sol, famhat, circle_samples(8));
                rep.rows.push_back(upper_row("dual_frame_equivalence", "Lemma 5.4",
                                             "dual-family rank-5 connection deviation",
                                             dual_dev,
                                             tol_or(cfg, "dual_frame_equivalence", 1e-6),
                                             sw3.ms()));
                Stopwatch sw4;
                WillmoreReport wr = willmore_compare(sol, famhat, fhat);
                rep.rows.push_back(
                    upper_row("willmore_algebraic_vs_dual", "Prop 5.2",
                              "pointwise Willmore integrand match (algebraic vs dual)",
                              wr.dev_ab, tol_or(cfg, "willmore_algebraic_vs_dual", 1e-10),
                              sw4.ms()));
                rep.rows.push_back(
                    upper_row("willmore_geometric_match", "Prop 5.2",
                              "interior Willmore integrand match (geometric)",
                              wr.dev_ac_interior,
                              tol_or(cfg, "willmore_geometric_match", 1e-4), sw4.ms()));
                if (want_csv)
                    write_willmore_csv(sol, wr,
                                       cfg.out_dir + "/" + cfg.name + "_willmore.csv");
            }
        }
    }

    json jrows = json::array();
    bool all_pass = true;
    for (const auto& r : rep.rows) {
        jrows.push_back(row_to_json(r));
        all_pass = all_pass && r.pass;
    }
    rep.document["rows"] = jrows;
    rep.document["pass"] = all_pass;
    rep.exit_code = all_pass ? 0 : 1;

    std::ofstream os(cfg.out_dir + "/report.json");
    if (!os) throw Error("cannot write report.json into " + cfg.out_dir);
    os << rep.document.dump(2) << "\n";
    return rep;
}

}  // namespace lamcon
