// SPDX-License-Identifier: Apache-2.0
#include "feec/cli/runner.hpp"

#include "feec/core.hpp"
#include "feec/solvers/solvers.hpp"
#include "feec/solvers/time_domain.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace feec::cli {

namespace fs = std::filesystem;
using derham::BoundaryCondition;
using derham::FemField;
using derham::ScalarField;
using derham::Vec2;
using derham::VectorField;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

void RunConfig::apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' must be key=value");
    values_[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
}

std::string RunConfig::get(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
}

double RunConfig::get_num(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + it->second + "'");
    }
}

int RunConfig::get_int(const std::string& key, int dflt) const {
    const double v = get_num(key, dflt);
    if (v != std::floor(v)) throw ConfigError("config key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
    return os.str();
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

// ---- artifact writing -----------------------------------------------------

struct CsvWriter {
    std::ofstream out;
    CsvWriter(const std::string& path, std::uint64_t config_hash, const std::vector<std::string>& header) {
        out.open(path);
        if (!out) throw ConfigError("cannot open output file '" + path + "'");
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(config_hash));
        out << "# feec-version=" << feec::version() << " config-hash=" << hash_hex << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << fmt17(vals[i]);
        out << "\n";
    }
};

std::shared_ptr<const geometry::MultipatchTopology> load_domain(const RunConfig& cfg) {
    if (cfg.has("domain_file"))
        return std::make_shared<geometry::MultipatchTopology>(geometry::read_domain_file(cfg.get("domain_file")));
    const std::string name = cfg.get("domain", "two_patch_square");
    return std::make_shared<geometry::MultipatchTopology>(geometry::built_in_domain(name));
}

// ---- analytic source catalog ----------------------------------------------

// manufactured elliptic bump: phi = exp(-tau^2 / 2 sigma^2) with
// tau = a (x-y)'^2 + b (x+y)'^2 - 1 around a configurable center
struct EllipticBump {
    double x0 = 1.5, y0 = 1.5;
    double a = 1.0 / (1.7 * 1.7), b = 1.0 / (1.1 * 1.1);
    double sigma = 0.11;

    double tau(const Vec2& p) const {
        const double s = (p[0] - x0) - (p[1] - y0), t = (p[0] - x0) + (p[1] - y0);
        return a * s * s + b * t * t - 1.0;
    }
    Vec2 grad_tau(const Vec2& p) const {
        const double s = (p[0] - x0) - (p[1] - y0), t = (p[0] - x0) + (p[1] - y0);
        return {2 * a * s + 2 * b * t, -2 * a * s + 2 * b * t};
    }
    double phi(const Vec2& p) const {
        const double tv = tau(p);
        return std::exp(-tv * tv / (2 * sigma * sigma));
    }
    double minus_laplace_phi(const Vec2& p) const {
        const double tv = tau(p), s2 = sigma * sigma;
        const double g2 = grad_tau(p).squaredNorm();
        const double lap_tau = 4 * (a + b);
        return -(tv * tv * g2 / (s2 * s2) - (tv * lap_tau + g2) / s2) * phi(p);
    }
    Vec2 current(const Vec2& p) const { // phi * rot(tau)
        const Vec2 g = grad_tau(p);
        return phi(p) * Vec2(g[1], -g[0]);
    }
};

EllipticBump elliptic_from(const RunConfig& cfg) {
    EllipticBump e;
    e.x0 = cfg.get_num("source_x0", e.x0);
    e.y0 = cfg.get_num("source_y0", e.y0);
    e.a = cfg.get_num("source_a", e.a);
    e.b = cfg.get_num("source_b", e.b);
    e.sigma = cfg.get_num("source_sigma", e.sigma);
    return e;
}

// radially quartic gaussian pulse exp(-r^4 / 2 sigma^2)
struct RadialPulse {
    double x0 = 0.5, y0 = 0.5, sigma = 0.02;
    double value(const Vec2& p) const {
        const double r2 = (p - Vec2(x0, y0)).squaredNorm();
        return std::exp(-r2 * r2 / (2 * sigma * sigma));
    }
    Vec2 grad(const Vec2& p) const {
        const Vec2 d = p - Vec2(x0, y0);
        const double r2 = d.squaredNorm();
        return -(2.0 * r2 / (sigma * sigma)) * value(p) * d;
    }
    double laplace(const Vec2& p) const {
        const double r2 = (p - Vec2(x0, y0)).squaredNorm();
        const double s2 = sigma * sigma;
        return (4.0 * r2 * r2 * r2 / (s2 * s2) - 8.0 * r2 / s2) * value(p);
    }
};

// polynomial bump (b(x) b(y))^2 with b(x) = 4 x (1-x): compact on the unit
// square and exactly integrated by the assembly quadrature on affine patches
struct PolyPulse {
    static double b(double x) { return 4.0 * x * (1.0 - x); }
    static double db(double x) { return 4.0 * (1.0 - 2.0 * x); }
    static double d2b() { return -8.0; }
    double value(const Vec2& p) const {
        const double bx = b(p[0]), by = b(p[1]);
        return bx * bx * by * by;
    }
    Vec2 grad(const Vec2& p) const {
        const double bx = b(p[0]), by = b(p[1]);
        return {2 * bx * db(p[0]) * by * by, bx * bx * 2 * by * db(p[1])};
    }
    double laplace(const Vec2& p) const {
        const double bx = b(p[0]), by = b(p[1]);
        const double dx = db(p[0]), dy = db(p[1]);
        return 2 * (dx * dx + bx * d2b()) * by * by + 2 * (dy * dy + by * d2b()) * bx * bx;
    }
};

// dipole current J_z = psi0 - psi1 built from two radial pulses
ScalarField dipole_current(const RunConfig& cfg) {
    RadialPulse pos{cfg.get_num("source_x0", 1.06), cfg.get_num("source_y0", 1.06),
                    cfg.get_num("source_sigma", 0.1)};
    RadialPulse neg{cfg.get_num("source_x1", -1.06), cfg.get_num("source_y1", -1.06),
                    cfg.get_num("source_sigma", 0.1)};
    return [pos, neg](const Vec2& p) { return pos.value(p) - neg.value(p); };
}

BoundaryCondition bc_from(const RunConfig& cfg, const std::string& dflt) {
    const std::string bc = cfg.get("bc", dflt);
    if (bc == "homogeneous") return BoundaryCondition::homogeneous;
    if (bc == "inhomogeneous") return BoundaryCondition::inhomogeneous;
    throw ConfigError("bc must be 'homogeneous' or 'inhomogeneous', got '" + bc + "'");
}

void write_summary(const std::string& out_dir, const RunConfig& cfg, const std::map<std::string, double>& metrics) {
    json j;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(cfg.hash()));
    j["version"] = feec::version();
    j["config_hash"] = hash_hex;
    j["case"] = cfg.get("case");
    {
        std::istringstream is(cfg.canonical());
        std::string line;
        json c;
        while (std::getline(is, line)) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) c[line.substr(0, eq)] = line.substr(eq + 1);
        }
        j["config"] = c;
    }
    const int p_used = metrics.count("p") ? static_cast<int>(metrics.at("p")) : cfg.get_int("p", 3);
    j["quadrature"] = {{"mass_order", p_used + 1}, {"geometric_dof_order", p_used + 2}};
    j["tolerances"] = {{"cg", 1e-13},
                       {"conformity_check", 1e-8},
                       {"harmonic_zero_threshold", cfg.get_num("zero_tol", 1e-8)},
                       {"mass_inverse_residual", 1e-12}};
    json m;
    for (const auto& [k, v] : metrics) m[k] = v;
    j["metrics"] = m;
    std::ofstream out(out_dir + "/summary.json");
    out << j.dump(2) << "\n";
}

void maybe_dump_matrices(const RunConfig& cfg, const std::string& out_dir, const assembly::Discretization& d,
                         const linalg::SparseMatrix* system) {
    if (cfg.get_int("dump_matrices", 0) == 0) return;
    assembly::write_coordinate_format(d.m0.matrix(), out_dir + "/mass0.txt");
    assembly::write_coordinate_format(d.m1.matrix(), out_dir + "/mass1.txt");
    assembly::write_coordinate_format(d.m2.matrix(), out_dir + "/mass2.txt");
    if (system != nullptr) assembly::write_coordinate_format(*system, out_dir + "/system.txt");
}

// ---- cases ------------------------------------------------------------------

std::map<std::string, double> case_poisson(const RunConfig& cfg, const std::string& out_dir, bool inhom_sincos) {
    auto topo = load_domain(cfg);
    const int p = cfg.get_int("p", 3), cells = cfg.get_int("N", 8);
    const double alpha = cfg.get_num("alpha", 10.0);
    auto d = assembly::discretize(topo, p, cells);

    ScalarField exact, source;
    BoundaryCondition bc;
    if (inhom_sincos) {
        exact = [](const Vec2& x) { return std::sin(kPi * x[0]) * std::cos(kPi * x[1]); };
        source = [exact](const Vec2& x) { return 2 * kPi * kPi * exact(x); };
        bc = bc_from(cfg, "inhomogeneous");
    } else if (cfg.get("source", "sincos") == "elliptic") {
        const EllipticBump e = elliptic_from(cfg);
        exact = [e](const Vec2& x) { return e.phi(x); };
        source = [e](const Vec2& x) { return e.minus_laplace_phi(x); };
        bc = bc_from(cfg, "homogeneous");
    } else {
        exact = [](const Vec2& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
        source = [exact](const Vec2& x) { return 2 * kPi * kPi * exact(x); };
        bc = bc_from(cfg, "homogeneous");
    }

    FemField lifting;
    auto sys = assembly::assemble_poisson_system(d, alpha, bc, source,
                                                 bc == BoundaryCondition::inhomogeneous ? &exact : nullptr, &lifting);
    FemField phi = solvers::solve_poisson(d, sys, lifting);
    const double err = solvers::l2_error(d, phi, exact);

    CsvWriter csv(out_dir + "/errors.csv", cfg.hash(), {"cells", "dofs", "l2_error"});
    csv.row({static_cast<double>(cells), static_cast<double>(d.spaces.v0->dim()), err});
    sample_field(phi, cfg.get_int("sample_resolution", 16), out_dir + "/field_phi.csv", cfg.hash());
    maybe_dump_matrices(cfg, out_dir, d, &sys.matrix);
    return {{"l2_error", err},
            {"dofs", static_cast<double>(d.spaces.v0->dim())},
            {"p", static_cast<double>(p)},
            {"N", static_cast<double>(cells)}};
}

std::map<std::string, double> case_maxwell(const RunConfig& cfg, const std::string& out_dir) {
    auto topo = load_domain(cfg);
    const int p = cfg.get_int("p", 3), cells = cfg.get_int("N", 8);
    const double alpha = cfg.get_num("alpha", 10.0);
    const double omega = cfg.get_num("omega", kPi);
    auto d = assembly::discretize(topo, p, cells);

    VectorField exact, source;
    BoundaryCondition bc = bc_from(cfg, "inhomogeneous");
    if (cfg.get("source", "sincos") == "elliptic") {
        const EllipticBump e = elliptic_from(cfg);
        source = [e](const Vec2& x) { return e.current(x); };
        exact = [](const Vec2&) { return Vec2(0, 0); }; // no analytic solution: error column is informational
    } else {
        exact = [](const Vec2& x) { return Vec2(std::sin(kPi * x[1]), std::sin(kPi * x[0]) * std::cos(kPi * x[1])); };
        source = [](const Vec2& x) { return Vec2(-kPi * kPi * std::sin(kPi * x[1]) * std::cos(kPi * x[0]), 0.0); };
    }

    FemField lifting;
    auto sys = assembly::assemble_maxwell_system(d, omega, alpha, bc, source,
                                                 bc == BoundaryCondition::inhomogeneous ? &exact : nullptr, &lifting);
    FemField u = solvers::solve_maxwell_harmonic(d, sys, lifting);
    const double err = solvers::l2_error(d, u, exact);

    CsvWriter csv(out_dir + "/errors.csv", cfg.hash(), {"cells", "dofs", "l2_error"});
    csv.row({static_cast<double>(cells), static_cast<double>(d.spaces.v1->dim()), err});
    sample_field(u, cfg.get_int("sample_resolution", 16), out_dir + "/field_u.csv", cfg.hash());
    maybe_dump_matrices(cfg, out_dir, d, &sys.matrix);
    return {{"l2_error", err},
            {"dofs", static_cast<double>(d.spaces.v1->dim())},
            {"p", static_cast<double>(p)},
            {"N", static_cast<double>(cells)}};
}

std::map<std::string, double> case_eig_curlcurl(const RunConfig& cfg, const std::string& out_dir) {
    RunConfig local = cfg;
    if (!local.has("domain")) local.set("domain", "pi_square");
    auto topo = load_domain(local);
    const int p = cfg.get_int("p", 3), cells = cfg.get_int("N", 16);
    auto d = assembly::discretize(topo, p, cells);
    const auto mode = cfg.get("mode", "conga_generalized") == "hodge_penalized"
                          ? solvers::CurlCurlMode::hodge_penalized
                          : solvers::CurlCurlMode::conga_generalized;
    auto res = solvers::eig_curlcurl(d, mode, bc_from(cfg, "homogeneous"), cfg.get_num("alpha", 10.0),
                                     cfg.get_num("zero_tol", 1e-8));

    CsvWriter csv(out_dir + "/eigenvalues.csv", cfg.hash(), {"index", "lambda"});
    for (int i = 0; i < res.eigenvalues.size(); ++i) csv.row({static_cast<double>(i), res.eigenvalues[i]});
    std::map<std::string, double> metrics{{"n_zero", static_cast<double>(res.n_zero)},
                                           {"p", static_cast<double>(p)},
                                           {"N", static_cast<double>(cells)}};
    for (int i = 0; i < 8 && res.n_zero + i < res.eigenvalues.size(); ++i)
        metrics["lambda_" + std::to_string(i + 1)] = res.eigenvalues[res.n_zero + i];
    return metrics;
}

std::map<std::string, double> case_eig_hodge(const RunConfig& cfg, const std::string& out_dir) {
    RunConfig local = cfg;
    if (!local.has("domain")) local.set("domain", "annulus");
    auto topo = load_domain(local);
    auto d = assembly::discretize(topo, cfg.get_int("p", 3), cfg.get_int("N", 4));
    const auto bc = bc_from(cfg, "inhomogeneous");
    const double alpha = cfg.get_num("alpha", 10.0);
    const Eigen::MatrixXd a = assembly::assemble_hodge_laplace_pencil(d, 1, bc, alpha);
    auto pairs = linalg::dense_generalized_symmetric_eig(a, d.m1.matrix().dense());

    CsvWriter csv(out_dir + "/eigenvalues.csv", cfg.hash(), {"index", "lambda"});
    for (int i = 0; i < pairs.values.size(); ++i) csv.row({static_cast<double>(i), pairs.values[i]});
    const double zero_tol = cfg.get_num("zero_tol", 1e-8);
    int nzero = 0;
    while (nzero < pairs.values.size() && pairs.values[nzero] < zero_tol) ++nzero;
    return {{"n_zero", static_cast<double>(nzero)},
            {"lambda_min", pairs.values[0]},
            {"lambda_after_kernel", nzero < pairs.values.size() ? pairs.values[nzero] : 0.0},
            {"p", static_cast<double>(d.p)},
            {"N", static_cast<double>(d.cells)}};
}

std::map<std::string, double> case_magnetostatic(const RunConfig& cfg, const std::string& out_dir, bool metallic) {
    RunConfig local = cfg;
    if (!local.has("domain")) local.set("domain", "annulus");
    auto topo = load_domain(local);
    auto d = assembly::discretize(topo, cfg.get_int("p", 2), cfg.get_int("N", 4));
    const double a0 = cfg.get_num("alpha0", 10.0), a1 = cfg.get_num("alpha1", 10.0);
    const auto bc = metallic ? solvers::MagnetostaticBc::metallic : solvers::MagnetostaticBc::pseudo_vacuum;
    const auto seq = metallic ? BoundaryCondition::inhomogeneous : BoundaryCondition::homogeneous;
    auto harmonics = solvers::harmonic_basis(d, seq, cfg.get_num("alpha", 10.0), cfg.get_num("zero_tol", 1e-8));
    auto sol = solvers::solve_magnetostatic(d, bc, a0, a1, dipole_current(cfg), harmonics);

    sample_field(sol.b, cfg.get_int("sample_resolution", 16), out_dir + "/field_b.csv", cfg.hash());
    return {{"b_norm", sol.b_norm},
            {"p_rel", sol.b_norm > 0 ? sol.p_norm / sol.b_norm : 0.0},
            {"z_rel", sol.b_norm > 0 ? sol.z_norm / sol.b_norm : 0.0},
            {"harmonic_dim", static_cast<double>(harmonics.dimension())},
            {"p", static_cast<double>(d.p)},
            {"N", static_cast<double>(d.cells)}};
}

void write_trace(const std::string& path, std::uint64_t hash, const solvers::ConservationTrace& trace) {
    CsvWriter csv(path, hash, {"time", "energy", "pseudo_energy", "gauss_broken", "gauss_conforming"});
    for (std::size_t i = 0; i < trace.time.size(); ++i)
        csv.row({trace.time[i], trace.energy[i], trace.pseudo_energy[i], trace.gauss_broken[i],
                 trace.gauss_conforming[i]});
}

std::map<std::string, double> case_td_pulse(const RunConfig& cfg, const std::string& out_dir) {
    RunConfig local = cfg;
    if (!local.has("domain")) local.set("domain", "deformed_square_2x2");
    auto topo = load_domain(local);
    auto d = assembly::discretize(topo, cfg.get_int("p", 3), cfg.get_int("N", 8));

    RadialPulse psi{cfg.get_num("pulse_x0", 0.5), cfg.get_num("pulse_y0", 0.5), cfg.get_num("pulse_sigma", 0.02)};
    // E(0) is the discrete weak curl of the projected potential: its discrete
    // divergence vanishes identically, matching div curl = 0
    FemField chi = derham::primal_projection(*d.spaces.v2, d.ops, [psi](const Vec2& x) { return psi.value(x); });
    FemField e0{d.spaces.v1.get(), solvers::weak_curl(d, chi.coeffs)};
    FemField b0{d.spaces.v2.get(), Eigen::VectorXd::Zero(d.spaces.v2->dim())};

    solvers::LeapfrogOptions opt;
    opt.cfl_factor = cfg.get_num("cfl_factor", 0.8);
    opt.t_end = cfg.get_num("T", 3.2);
    opt.n_steps = cfg.get_int("n_steps", 0);
    auto [state, trace] = solvers::maxwell_leapfrog(d, e0, b0, {}, opt);
    write_trace(out_dir + "/trace.csv", cfg.hash(), trace);
    sample_field(state.e, cfg.get_int("sample_resolution", 16), out_dir + "/field_e_final.csv", cfg.hash());

    double h0 = trace.pseudo_energy.front(), dev = 0.0, gmax = 0.0;
    for (double h : trace.pseudo_energy) dev = std::max(dev, std::abs(h - h0) / h0);
    for (double g : trace.gauss_broken) gmax = std::max(gmax, g);
    return {{"pseudo_energy_rel_drift", dev},
            {"gauss_max", gmax},
            {"steps", static_cast<double>(state.step)},
            {"dt", state.step > 0 ? state.time / state.step : 0.0},
            {"p", static_cast<double>(d.p)},
            {"N", static_cast<double>(d.cells)}};
}

solvers::TimeDependentSource tc2_source(const RunConfig& cfg) {
    const double omega = cfg.get_num("omega", 4.0);
    solvers::TimeDependentSource src;
    if (cfg.get("profile", "poly") == "gaussian") {
        RadialPulse psi{cfg.get_num("pulse_x0", 0.5), cfg.get_num("pulse_y0", 0.5),
                        cfg.get_num("pulse_sigma", 0.1)};
        src.current.push_back({[psi](const Vec2& x) {
                                   const Vec2 g = psi.grad(x);
                                   return Vec2(g[1], -g[0]);
                               },
                               [](double) { return 1.0; }});
        src.current.push_back({[psi](const Vec2& x) { return psi.grad(x); },
                               [omega](double t) { return -std::cos(omega * t); }});
        src.charge.push_back(
            {[psi](const Vec2& x) { return psi.laplace(x); }, [omega](double t) { return std::sin(omega * t) / omega; }});
    } else {
        PolyPulse psi;
        src.current.push_back({[psi](const Vec2& x) {
                                   const Vec2 g = psi.grad(x);
                                   return Vec2(g[1], -g[0]);
                               },
                               [](double) { return 1.0; }});
        src.current.push_back({[psi](const Vec2& x) { return psi.grad(x); },
                               [omega](double t) { return -std::cos(omega * t); }});
        src.charge.push_back(
            {[psi](const Vec2& x) { return psi.laplace(x); }, [omega](double t) { return std::sin(omega * t) / omega; }});
    }
    return src;
}

std::map<std::string, double> case_td_source_compare(const RunConfig& cfg, const std::string& out_dir) {
    RunConfig local = cfg;
    if (!local.has("domain")) local.set("domain", "two_patch_square");
    auto topo = load_domain(local);
    auto d = assembly::discretize(topo, cfg.get_int("p", 3), cfg.get_int("N", 8));
    const auto src = tc2_source(cfg);

    const std::map<std::string, solvers::SourceMode> modes{{"primal", solvers::SourceMode::primal_pi1},
                                                           {"l2", solvers::SourceMode::l2_projection},
                                                           {"dual", solvers::SourceMode::dual_tilde_pi1}};
    std::map<std::string, double> metrics;
    for (const auto& [name, mode] : modes) {
        FemField e0{d.spaces.v1.get(), Eigen::VectorXd::Zero(d.spaces.v1->dim())};
        FemField b0{d.spaces.v2.get(), Eigen::VectorXd::Zero(d.spaces.v2->dim())};
        solvers::LeapfrogOptions opt;
        opt.cfl_factor = cfg.get_num("cfl_factor", 0.8);
        opt.t_end = cfg.get_num("T", 20.0);
        opt.source_mode = mode;
        auto [state, trace] = solvers::maxwell_leapfrog(d, e0, b0, src, opt);
        write_trace(out_dir + "/trace_" + name + ".csv", cfg.hash(), trace);
        const std::size_t n = trace.time.size(), q = n / 4;
        auto max_range = [](const std::vector<double>& v, std::size_t a, std::size_t b) {
            double m = 0.0;
            for (std::size_t i = a; i < b; ++i) m = std::max(m, v[i]);
            return m;
        };
        metrics["gauss_max_" + name] = max_range(trace.gauss_broken, 0, n);
        metrics["gauss_conf_first_quarter_" + name] = max_range(trace.gauss_conforming, 0, q);
        metrics["gauss_conf_last_quarter_" + name] = max_range(trace.gauss_conforming, n - q, n);
    }
    metrics["p"] = static_cast<double>(d.p);
    metrics["N"] = static_cast<double>(d.cells);
    return metrics;
}

const std::map<std::string, std::function<std::map<std::string, double>(const RunConfig&, const std::string&)>>&
case_registry() {
    static const std::map<std::string, std::function<std::map<std::string, double>(const RunConfig&, const std::string&)>>
        registry{
            {"poisson_hom_manufactured",
             [](const RunConfig& c, const std::string& o) { return case_poisson(c, o, false); }},
            {"poisson_inhom_sincos",
             [](const RunConfig& c, const std::string& o) {
                 RunConfig local = c;
                 if (!local.has("domain")) local.set("domain", "two_patch_pi_square");
                 return case_poisson(local, o, true);
             }},
            {"maxwell_inhom_sincos",
             [](const RunConfig& c, const std::string& o) {
                 RunConfig local = c;
                 if (!local.has("domain")) local.set("domain", "two_patch_pi_square");
                 return case_maxwell(local, o);
             }},
            {"eig_curlcurl_square", case_eig_curlcurl},
            {"eig_hodge_annulus", case_eig_hodge},
            {"magnetostatic_vacuum_annulus",
             [](const RunConfig& c, const std::string& o) { return case_magnetostatic(c, o, false); }},
            {"magnetostatic_metal_annulus",
             [](const RunConfig& c, const std::string& o) { return case_magnetostatic(c, o, true); }},
            {"td_maxwell_pulse", case_td_pulse},
            {"td_maxwell_source_compare", case_td_source_compare},
        };
    return registry;
}

} // namespace

std::vector<std::string> registry_cases() {
    std::vector<std::string> names;
    for (const auto& [k, v] : case_registry()) names.push_back(k);
    return names;
}

std::map<std::string, double> run_case(const RunConfig& cfg, const std::string& out_dir) {
    const std::string name = cfg.get("case");
    auto it = case_registry().find(name);
    if (it == case_registry().end()) throw ConfigError("unknown case '" + name + "'");
    fs::create_directories(out_dir);
    auto metrics = it->second(cfg, out_dir);
    write_summary(out_dir, cfg, metrics);
    return metrics;
}

std::vector<ConvergenceRow> convergence_sweep(const RunConfig& cfg, const std::vector<int>& n_list,
                                              const std::string& out_dir) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("sweep: N list must increase");
    fs::create_directories(out_dir);
    std::vector<ConvergenceRow> rows;
    bool non_decreasing = false;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        RunConfig local = cfg;
        local.set("N", std::to_string(n_list[i]));
        const std::string sub = out_dir + "/N" + std::to_string(n_list[i]);
        auto metrics = run_case(local, sub);
        if (metrics.count("l2_error") == 0)
            throw ConfigError("sweep: case '" + cfg.get("case") + "' does not report an l2 error");
        ConvergenceRow row;
        row.cells = n_list[i];
        row.dofs = static_cast<int>(metrics.at("dofs"));
        row.error = metrics.at("l2_error");
        row.order = std::numeric_limits<double>::quiet_NaN();
        if (i > 0) {
            row.order = std::log(rows.back().error / row.error) /
                        std::log(static_cast<double>(n_list[i]) / n_list[i - 1]);
            if (row.error >= rows.back().error) non_decreasing = true;
        }
        rows.push_back(row);
    }
    CsvWriter csv(out_dir + "/convergence.csv", cfg.hash(), {"cells", "dofs", "l2_error", "observed_order"});
    for (const auto& r : rows)
        csv.row({static_cast<double>(r.cells), static_cast<double>(r.dofs), r.error, r.order});
    if (non_decreasing) {
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(cfg.hash()));
        std::ofstream(out_dir + "/convergence_warning.txt")
            << "# feec-version=" << feec::version() << " config-hash=" << hash_hex << "\n"
            << "errors did not decrease monotonically under refinement\n";
    }
    return rows;
}

void sample_field(const FemField& field, int resolution, const std::string& path, std::uint64_t config_hash) {
    const auto& sp = *field.space;
    const bool vector_valued = sp.form_degree() == 1;
    std::vector<std::string> header{"patch", "x", "y"};
    if (vector_valued) {
        header.push_back("vx");
        header.push_back("vy");
    } else {
        header.push_back("v");
    }
    CsvWriter csv(path, config_hash, header);
    for (int k = 0; k < sp.n_patches(); ++k) {
        const auto& map = sp.topology().patches[k];
        for (int i = 0; i <= resolution; ++i)
            for (int j = 0; j <= resolution; ++j) {
                const Vec2 xh(static_cast<double>(i) / resolution, static_cast<double>(j) / resolution);
                const Vec2 x = map(xh);
                if (vector_valued) {
                    const Vec2 v = derham::eval_physical_vector(field, k, xh);
                    csv.row({static_cast<double>(k), x[0], x[1], v[0], v[1]});
                } else {
                    csv.row({static_cast<double>(k), x[0], x[1], derham::eval_physical_scalar(field, k, xh)});
                }
            }
    }
}

int main_cli(int argc, char** argv) {
    CLI::App app{"broken-FEEC multipatch spline solvers"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    std::string n_list_str = "4,8,16";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--override", overrides, "key=value override (repeatable)");
    };
    CLI::App* run = app.add_subcommand("run", "run a single registry case");
    add_common(run);
    CLI::App* sweep = app.add_subcommand("sweep", "run a convergence sweep over N");
    add_common(sweep);
    sweep->add_option("--N-list", n_list_str, "comma-separated cell counts");
    CLI::App* list = app.add_subcommand("list-cases", "print the registry case names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : registry_cases()) std::printf("%s\n", name.c_str());
            for (const auto& name : geometry::built_in_domain_names()) std::printf("domain: %s\n", name.c_str());
            return 0;
        }
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        for (const auto& o : overrides) cfg.apply_override(o);
        if (run->parsed()) {
            auto metrics = run_case(cfg, out_dir);
            for (const auto& [k, v] : metrics) std::printf("%s = %s\n", k.c_str(), fmt17(v).c_str());
            return 0;
        }
        std::vector<int> n_list;
        std::istringstream is(n_list_str);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            try {
                n_list.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("--N-list: '" + tok + "' is not an integer");
            }
        }
        if (n_list.empty()) throw ConfigError("--N-list: empty list");
        auto rows = convergence_sweep(cfg, n_list, out_dir);
        for (const auto& r : rows)
            std::printf("N=%-4d dofs=%-8d error=%-12.5e order=%.3f\n", r.cells, r.dofs, r.error, r.order);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace feec::cli
