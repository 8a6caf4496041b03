#include "rlasso/chance.hpp"
#include "rlasso/cli.hpp"
#include "rlasso/coupled.hpp"
#include "rlasso/distribution.hpp"
#include "rlasso/robust.hpp"
#include "rlasso/solvers.hpp"
#include "rlasso/sparsity.hpp"
#include "rlasso/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#ifndef RLASSO_VERSION
#define RLASSO_VERSION "unknown"
#endif

namespace rlasso::cli {

using Json = nlohmann::ordered_json;

namespace {

/// Raised when a solver stops before its certificate is met; maps to exit code 2.
struct NotConverged {
    Json document;
};

struct CommonFlags {
    std::string loss = "l2";
    std::string uncoupled;
    std::string norm_coupled;
    std::string polytope;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t max_iters = 50000;
    double tol = 1e-8;
};

void add_solver_flags(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--seed", f.seed, "Seed for every random draw")->capture_default_str();
    sub->add_option("--out", f.out, "Write the result here instead of standard output");
    sub->add_option("--max-iters", f.max_iters, "Iteration cap of the primal-dual solver")->capture_default_str();
    sub->add_option("--tol", f.tol, "Relative duality-gap target")->capture_default_str();
}

void add_model_flags(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--loss", f.loss, "Residual norm: l1, l2 or linf")->capture_default_str();
    sub->add_option("--uncoupled-c", f.uncoupled, "Per-feature radii: one value or a comma list");
    sub->add_option("--norm-coupled", f.norm_coupled, "Norm-coupled radii as 'aggregator,l', e.g. 'linf,0.3'");
    sub->add_option("--polytope", f.polytope,
                    "Polytope {\"T\": [[...]], \"s\": [...]} given inline (starting with '{') or as a file");
}

SolverOptions solver_options(const CommonFlags& f) {
    SolverOptions o;
    o.max_iters = f.max_iters;
    o.rel_tol = f.tol;
    o.seed = f.seed;
    o.validate();
    return o;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A comma list given inline, or a file holding one (commas or whitespace).
Vector vector_argument(const std::string& text, const std::string& flag) {
    std::string body = text;
    std::error_code ec;
    if (std::filesystem::is_regular_file(text, ec)) {
        body = slurp(text);
        std::replace_if(body.begin(), body.end(), [](char ch) { return ch == '\n' || ch == ' ' || ch == '\t'; }, ',');
        body.erase(std::unique(body.begin(), body.end(), [](char a, char b) { return a == ',' && b == ','; }),
                   body.end());
        while (!body.empty() && body.back() == ',') body.pop_back();
        while (!body.empty() && body.front() == ',') body.erase(body.begin());
    }
    try {
        const std::vector<double> v = parse_list(body);
        return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(flag + ": " + e.what());
    }
}

/// Rows separated by ';', entries by ','.
Matrix matrix_argument(const std::string& text, const std::string& flag) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        try {
            rows.push_back(parse_list(row));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(flag + ": " + e.what());
        }
    }
    if (rows.empty()) throw std::invalid_argument(flag + ": empty matrix");
    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw std::invalid_argument(flag + ": ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return M;
}

Vector radii_for(const std::string& text, Index m) {
    const Vector c = vector_argument(text, "--uncoupled-c");
    if (c.size() == 1) return Vector::Constant(m, c(0));
    if (c.size() != m) {
        throw std::invalid_argument("--uncoupled-c: expected 1 or " + std::to_string(m) + " values, got " +
                                    std::to_string(c.size()));
    }
    return c;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json to_json(const Matrix& M) {
    Json out = Json::array();
    for (Index i = 0; i < M.rows(); ++i) out.push_back(to_json(Vector(M.row(i).transpose())));
    return out;
}

Json to_json(const std::vector<Index>& v, Index offset) {
    Json out = Json::array();
    for (Index i : v) out.push_back(i + offset);
    return out;
}

Json solution_json(const RegressionSolution& s) {
    Json r;
    r["x"] = to_json(s.x);
    r["objective"] = s.objective;
    r["converged"] = s.converged;
    r["certificate_gap"] = s.certificate_gap;
    r["iterations"] = s.iterations;
    return r;
}

Matrix json_matrix(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw std::invalid_argument("--polytope: '" + what + "' must be a nonempty array of rows");
    }
    Matrix M(static_cast<Index>(j.size()), static_cast<Index>(j.front().size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != j.front().size()) {
            throw std::invalid_argument("--polytope: ragged rows in '" + what + "'");
        }
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            if (!j[i][k].is_number()) throw std::invalid_argument("--polytope: non-numeric entry in '" + what + "'");
            M(static_cast<Index>(i), static_cast<Index>(k)) = j[i][k].get<double>();
        }
    }
    return M;
}

Polytope polytope_argument(const std::string& text) {
    const std::string body = (!text.empty() && text.front() == '{') ? text : slurp(text);
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("--polytope: ") + e.what());
    }
    if (!j.is_object() || !j.contains("T") || !j.contains("s")) {
        throw std::invalid_argument("--polytope: expected an object with 'T' and 's'");
    }
    Polytope out;
    out.T = json_matrix(j["T"], "T");
    const Json& s = j["s"];
    if (!s.is_array()) throw std::invalid_argument("--polytope: 's' must be an array");
    out.s.resize(static_cast<Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number()) throw std::invalid_argument("--polytope: non-numeric entry in 's'");
        out.s(static_cast<Index>(i)) = s[i].get<double>();
    }
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) line += ',';
        line += cells[k];
    }
    return line + '\n';
}

Json envelope(const std::string& command, Json config) {
    Json doc;
    doc["toolkit"] = "rlasso";
    doc["version"] = version();
    doc["command"] = command;
    doc["config"] = std::move(config);
    return doc;
}

Json common_config(const CommonFlags& f) {
    Json c;
    c["seed"] = f.seed;
    c["max_iters"] = f.max_iters;
    c["tol"] = f.tol;
    return c;
}

// ----------------------------------------------------------------------------

std::string cmd_fit(const std::string& input, const CommonFlags& f) {
    const ProblemInstance p = read_instance_csv_file(input);
    const NormTag loss(parse_norm_kind(f.loss));
    const SolverOptions opts = solver_options(f);
    const int models = !f.uncoupled.empty() + !f.norm_coupled.empty() + !f.polytope.empty();
    if (models != 1) {
        throw std::invalid_argument("give exactly one of --uncoupled-c, --norm-coupled, --polytope");
    }

    Json config = common_config(f);
    config["input"] = input;
    config["loss"] = to_string(loss.kind());
    Json result;
    RegressionSolution sol;
    if (!f.uncoupled.empty()) {
        const Vector c = radii_for(f.uncoupled, p.features());
        config["model"] = {{"type", "uncoupled"}, {"radii", to_json(c)}};
        sol = solve_weighted_l1(p, c, loss, opts);
        result = solution_json(sol);
    } else if (!f.norm_coupled.empty()) {
        const auto comma = f.norm_coupled.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("--norm-coupled: expected 'aggregator,l'");
        const NormTag agg(parse_norm_kind(f.norm_coupled.substr(0, comma)));
        const std::vector<double> l = parse_list(f.norm_coupled.substr(comma + 1));
        if (l.size() != 1 || l[0] < 0.0) throw std::invalid_argument("--norm-coupled: l must be one nonnegative value");
        config["model"] = {{"type", "norm_coupled"}, {"aggregator", to_string(agg.kind())}, {"l", l[0]}};
        sol = solve_dual_norm_reg(p, loss, agg, l[0], opts);
        result = solution_json(sol);
    } else {
        const Polytope poly = polytope_argument(f.polytope);
        config["model"] = {{"type", "polytope"}, {"T", to_json(poly.T)}, {"s", to_json(poly.s)}};
        CoupledOptions copts;
        copts.solver = opts;
        const PolytopeSolution ps = solve_polytope_uncertainty(p, poly.T, poly.s, loss, copts);
        sol = ps.solution;
        result = solution_json(sol);
        result["lambda"] = to_json(ps.lambda);
    }
    Json doc = envelope("fit", std::move(config));
    doc["result"] = std::move(result);
    if (!sol.converged) throw NotConverged{std::move(doc)};
    return doc.dump(2) + '\n';
}

std::string cmd_path(const std::string& input, const std::string& grid, const CommonFlags& f, bool& converged) {
    const ProblemInstance p = read_instance_csv_file(input);
    const NormTag loss(parse_norm_kind(f.loss));
    const Vector g = vector_argument(grid, "--grid");
    std::vector<Vector> c_grid;
    for (Index k = 0; k < g.size(); ++k) c_grid.push_back(Vector::Constant(p.features(), g(k)));
    const std::vector<RegressionSolution> path = regularization_path(p, c_grid, loss, solver_options(f));

    std::vector<std::string> header{"c", "objective", "iterations", "converged", "certificate_gap"};
    for (Index j = 0; j < p.features(); ++j) header.push_back("x" + std::to_string(j + 1));
    std::string text = csv_line(header);
    converged = true;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const RegressionSolution& s = path[k];
        converged = converged && s.converged;
        std::vector<std::string> row{format_double(g(static_cast<Index>(k))), format_double(s.objective),
                                     std::to_string(s.iterations), s.converged ? "1" : "0",
                                     format_double(s.certificate_gap)};
        for (Index j = 0; j < s.x.size(); ++j) row.push_back(format_double(s.x(j)));
        text += csv_line(row);
    }
    return text;
}

std::string cmd_worstcase(const std::string& input, const std::string& x_text, std::size_t samples,
                          const CommonFlags& f) {
    const ProblemInstance p = read_instance_csv_file(input);
    const NormTag loss(parse_norm_kind(f.loss));
    const Vector x = vector_argument(x_text, "--x");
    if (x.size() != p.features()) throw std::invalid_argument("--x: length does not match the feature count");
    if (f.uncoupled.empty()) throw std::invalid_argument("worstcase needs --uncoupled-c");
    const Uncoupled u{radii_for(f.uncoupled, p.features())};

    Json config = common_config(f);
    config["input"] = input;
    config["loss"] = to_string(loss.kind());
    config["model"] = {{"type", "uncoupled"}, {"radii", to_json(u.radii)}};
    config["x"] = to_json(x);
    config["samples"] = samples;

    const Perturbation adv = adversarial_perturbation(p, x, u, loss);
    Json result;
    result["nominal_residual"] = norm_eval(p.residual(x), loss);
    result["closed_form"] = worst_case_residual(p, x, u, loss);
    result["adversarial_residual"] = perturbed_residual(p, x, adv, loss);
    result["sampled_lower_bound"] = samples ? sampled_worst_case(p, x, u, loss, samples, f.seed) : 0.0;
    result["witness"] = to_json(Matrix(adv.delta));
    Json doc = envelope("worstcase", std::move(config));
    doc["result"] = std::move(result);
    return doc.dump(2) + '\n';
}

MomentInfo moments_argument(const std::string& mean, const std::string& sigma) {
    return MomentInfo(vector_argument(mean, "--mean"), matrix_argument(sigma, "--sigma"));
}

Json certificate_json(const BoundCertificate& cert, double c) {
    Json r;
    r["value"] = cert.value;
    r["probability"] = cert.probability;
    r["chebyshev"] = cert.chebyshev;
    r["P"] = to_json(cert.P);
    r["q"] = to_json(cert.q);
    r["r"] = cert.r;
    r["lambda_infinite"] = std::isinf(cert.lambda);
    r["lambda"] = std::isinf(cert.lambda) ? Json(nullptr) : Json(cert.lambda);
    const CertificateCheck chk = check_certificate(cert, c);
    r["check"] = {{"nonnegativity", chk.nonnegativity}, {"s_procedure", chk.s_procedure}};
    return r;
}

std::string cmd_bound(const std::string& mean, const std::string& sigma, double c) {
    const MomentInfo m = moments_argument(mean, sigma);
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("--c must be positive");
    Json config;
    config["mean"] = to_json(m.mean());
    config["second_moment"] = to_json(m.second_moment());
    config["c"] = c;
    Json doc = envelope("bound", std::move(config));
    doc["result"] = certificate_json(markov_bound(m, c), c);
    return doc.dump(2) + '\n';
}

std::string cmd_radius(const std::string& mean, const std::string& sigma, double eta) {
    const MomentInfo m = moments_argument(mean, sigma);
    Json config;
    config["mean"] = to_json(m.mean());
    config["second_moment"] = to_json(m.second_moment());
    config["eta"] = eta;
    const double radius = radius_for_confidence(m, eta);
    Json doc = envelope("radius", std::move(config));
    doc["result"] = {{"radius", radius}, {"bound_at_radius", markov_bound(m, radius).value}};
    return doc.dump(2) + '\n';
}

struct GeneratorFlags {
    std::string x0 = "1,-0.5";
    double feature_scale = 3.0;
    double noise = 0.5;
};

void add_generator_flags(CLI::App* sub, GeneratorFlags& g) {
    sub->add_option("--x0", g.x0, "Coefficients of the sampling model b = r^T x0 + noise")->capture_default_str();
    sub->add_option("--feature-scale", g.feature_scale, "Features are uniform on [-scale, scale]")
        ->capture_default_str();
    sub->add_option("--noise", g.noise, "Additive noise is uniform on [-noise, noise]")->capture_default_str();
}

std::vector<std::size_t> n_schedule_argument(const std::string& text, const std::string& flag) {
    if (text == "default") return {50, 200, 800, 3200};
    std::vector<std::size_t> out;
    for (double v : parse_list(text)) {
        if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument(flag + ": sample sizes must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::string cmd_kde(const std::string& n_text, const std::string& bw_text, const GeneratorFlags& gf,
                    std::size_t grid, const std::string& density_out, const CommonFlags& f) {
    const Vector x0 = vector_argument(gf.x0, "--x0");
    const Generator g = uniform_linear_generator(x0, gf.feature_scale, gf.noise);
    const std::vector<std::size_t> ns = n_schedule_argument(n_text, "--n");
    std::vector<double> bws;
    if (bw_text == "default") {
        for (std::size_t n : ns) bws.push_back(default_bandwidth(n, g.features));
    } else {
        bws = parse_list(bw_text);
        if (bws.size() != ns.size()) throw std::invalid_argument("--bandwidth-schedule must align with --n");
    }
    if (!density_out.empty() && g.features != 1) {
        throw std::invalid_argument("--density-out needs a two-dimensional sample space (one feature)");
    }

    std::string text = csv_line({"n", "bandwidth", "normalization", "mass_in_support"});
    std::optional<KdeEstimate> last;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        std::mt19937_64 rng(f.seed + k);
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < ns[k]; ++i) pts.push_back(g.sample(rng));
        KdeEstimate est(std::move(pts), bws[k]);
        const Index d = est.dimension();
        Vector hi = Vector::Constant(d, gf.feature_scale);
        hi(0) = gf.feature_scale * x0.lpNorm<1>() + gf.noise;
        text += csv_line({std::to_string(ns[k]), format_double(bws[k]), format_double(kde_total_mass(est)),
                          format_double(kde_mass(est, -hi, hi))});
        last = std::move(est);
    }

    if (!density_out.empty()) {
        if (grid < 2) throw std::invalid_argument("--grid must be at least 2");
        const double c = last->bandwidth();
        Vector lo = last->samples().front();
        Vector hi = lo;
        for (const Vector& s : last->samples()) {
            lo = lo.cwiseMin(s);
            hi = hi.cwiseMax(s);
        }
        lo.array() -= c;
        hi.array() += c;
        std::ofstream dens(density_out);
        if (!dens) throw std::invalid_argument("cannot write '" + density_out + "'");
        dens << csv_line({"b", "r1", "density"});
        for (std::size_t i = 0; i < grid; ++i) {
            for (std::size_t j = 0; j < grid; ++j) {
                Vector pt(2);
                pt(0) = lo(0) + (hi(0) - lo(0)) * static_cast<double>(i) / static_cast<double>(grid - 1);
                pt(1) = lo(1) + (hi(1) - lo(1)) * static_cast<double>(j) / static_cast<double>(grid - 1);
                dens << csv_line({format_double(pt(0)), format_double(pt(1)), format_double(kde_density(*last, pt))});
            }
        }
    }
    return text;
}

std::string cmd_consistency(const std::string& schedule, const GeneratorFlags& gf, const CommonFlags& f,
                            bool& converged) {
    const Generator g = uniform_linear_generator(vector_argument(gf.x0, "--x0"), gf.feature_scale, gf.noise);
    const std::vector<std::size_t> ns = n_schedule_argument(schedule, "--schedule");
    std::vector<double> cs;
    for (std::size_t n : ns) cs.push_back(std::pow(static_cast<double>(n), -1.0 / 6.0));
    const std::vector<ConsistencyRow> rows = consistency_experiment(g, ns, cs, f.seed, solver_options(f));

    std::vector<std::string> header{"n", "c_n", "prediction_error", "oracle_error", "excess", "trend", "fitted_norm",
                                    "converged"};
    for (Index j = 0; j < g.features; ++j) header.push_back("x" + std::to_string(j + 1));
    std::string text = csv_line(header);
    converged = true;
    double previous = std::numeric_limits<double>::infinity();
    for (const ConsistencyRow& r : rows) {
        const double excess = r.prediction_error - r.oracle_error;
        const char* trend = std::isinf(previous) ? "start" : (excess <= previous ? "down" : "up");
        previous = excess;
        converged = converged && r.converged;
        std::vector<std::string> row{std::to_string(r.n),         format_double(r.c_n),
                                     format_double(r.prediction_error), format_double(r.oracle_error),
                                     format_double(excess),       trend,
                                     format_double(r.fitted_norm), r.converged ? "1" : "0"};
        for (Index j = 0; j < r.x.size(); ++j) row.push_back(format_double(r.x(j)));
        text += csv_line(row);
    }
    return text;
}

std::vector<Index> support_argument(const std::string& text, Index m) {
    std::vector<Index> out;
    if (text.empty()) return out;
    for (double v : parse_list(text)) {
        if (v != std::floor(v) || v < 1.0 || v > static_cast<double>(m)) {
            throw std::invalid_argument("--support: entries must be feature numbers 1.." + std::to_string(m));
        }
        out.push_back(static_cast<Index>(v) - 1);
    }
    return out;
}

std::string cmd_sparsity(const std::string& input, const std::string& support_text, double c, const CommonFlags& f) {
    const ProblemInstance p = read_instance_csv_file(input);
    const std::vector<Index> I = support_argument(support_text, p.features());
    const SupportCertificate cert = incoherence_certificate(p, I, c);

    Json config = common_config(f);
    config["input"] = input;
    config["support"] = to_json(cert.support, 1);
    config["c"] = c;
    Json result;
    result["outside"] = to_json(cert.outside, 1);
    result["projection_norms"] = to_json(cert.projection_norms);
    result["orthogonal_norms"] = to_json(cert.orthogonal_norms);
    result["certified"] = cert.verdict;
    bool converged = true;
    if (cert.verdict) {
        const ZeroSupportCheck chk = verify_zero_support(p, I, c, solver_options(f));
        result["status"] = chk.status == SupportStatus::Zero      ? "zero"
                           : chk.status == SupportStatus::Nonzero ? "nonzero"
                                                                  : "indeterminate";
        result["fit"] = solution_json(chk.solution);
        converged = chk.solution.converged;
    } else {
        result["status"] = "not_certified";
    }
    Json doc = envelope("sparsity", std::move(config));
    doc["result"] = std::move(result);
    if (!converged) throw NotConverged{std::move(doc)};
    return doc.dump(2) + '\n';
}

std::string cmd_stability(const std::string& input, const std::string& z_text, double c, const CommonFlags& f) {
    const ProblemInstance p = read_instance_csv_file(input);
    const Vector z = vector_argument(z_text, "--z");
    const LabeledSet base{p.A(), p.b()};
    const StabilityReport rep = stability_gap(base, z, c, solver_options(f));

    Json config = common_config(f);
    config["input"] = input;
    config["z"] = to_json(z);
    config["c"] = c;
    Json result;
    result["x_star"] = to_json(rep.x_star);
    result["base_objective"] = rep.base_objective;
    result["full_candidate"] = rep.full_candidate;
    result["full_solver"] = rep.full_solver;
    result["loo_candidate"] = rep.loo_candidate;
    result["loo_solver"] = rep.loo_solver;
    result["tie_gap"] = rep.tie_gap;
    result["loss_full"] = rep.loss_full;
    result["loss_loo"] = rep.loss_loo;
    result["beta_witness"] = rep.beta_witness;
    result["trivial_bound"] = rep.trivial_bound;
    Json doc = envelope("stability", std::move(config));
    doc["result"] = std::move(result);
    return doc.dump(2) + '\n';
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot write '" + path + "'");
    file << text;
}

}  // namespace

std::string version() { return RLASSO_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust regression toolkit", "rlasso"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    CommonFlags f;
    GeneratorFlags gf;
    std::string input;
    std::string grid_text;
    std::string x_text;
    std::size_t samples = 10000;
    std::string mean_text;
    std::string sigma_text;
    double c = 0.0;
    double eta = 0.0;
    std::string n_text = "default";
    std::string bw_text = "default";
    std::size_t density_grid = 101;
    std::string density_out;
    std::string schedule = "default";
    std::string support_text;
    std::string z_text;

    auto* fit = app.add_subcommand("fit", "Fit a robust regression; writes JSON");
    fit->add_option("input", input, "CSV with columns b,f1,...,fm")->required();
    add_model_flags(fit, f);
    add_solver_flags(fit, f);

    auto* path = app.add_subcommand("path", "Uniform-radius regularization path; writes CSV");
    path->add_option("input", input, "CSV with columns b,f1,...,fm")->required();
    path->add_option("--grid", grid_text, "Radii, comma separated, solved in order with warm starts")->required();
    path->add_option("--loss", f.loss, "Residual norm: l1, l2 or linf")->capture_default_str();
    add_solver_flags(path, f);

    auto* worst = app.add_subcommand("worstcase", "Worst-case residual of a fixed x; writes JSON");
    worst->add_option("input", input, "CSV with columns b,f1,...,fm")->required();
    worst->add_option("--x", x_text, "Weights as a comma list or a file")->required();
    worst->add_option("--samples", samples, "Random members of the set to evaluate")->capture_default_str();
    add_model_flags(worst, f);
    add_solver_flags(worst, f);

    auto* bound = app.add_subcommand("bound", "Moment bound on Pr(||v|| >= c); writes JSON");
    bound->add_option("--mean", mean_text, "E[v] as a comma list")->required();
    bound->add_option("--sigma", sigma_text, "E[v v^T], rows separated by ';'")->required();
    bound->add_option("--c", c, "Threshold c > 0")->required();
    bound->add_option("--out", f.out, "Write the result here instead of standard output");

    auto* radius = app.add_subcommand("radius", "Smallest c with bound <= eta; writes JSON");
    radius->add_option("--mean", mean_text, "E[v] as a comma list")->required();
    radius->add_option("--sigma", sigma_text, "E[v v^T], rows separated by ';'")->required();
    radius->add_option("--eta", eta, "Target probability in (0, 1]")->required();
    radius->add_option("--out", f.out, "Write the result here instead of standard output");

    auto* kde = app.add_subcommand("kde", "Box-kernel density estimates on generated data; writes CSV");
    kde->add_option("--n", n_text, "Sample sizes, comma list or 'default' (50,200,800,3200)")->capture_default_str();
    kde->add_option("--bandwidth-schedule", bw_text, "Bandwidths aligned with --n, or 'default' (n^(-1/(2(m+1))))")
        ->capture_default_str();
    kde->add_option("--density-out", density_out, "Also write a grid of density values for the largest n");
    kde->add_option("--grid", density_grid, "Grid points per axis for --density-out")->capture_default_str();
    add_generator_flags(kde, gf);
    kde->add_option("--seed", f.seed, "Seed; row k uses seed + k")->capture_default_str();
    kde->add_option("--out", f.out, "Write the result here instead of standard output");

    auto* cons = app.add_subcommand("consistency", "Prediction error of fits with c_n = n^(-1/6); writes CSV");
    cons->add_option("--schedule", schedule, "Sample sizes, comma list or 'default' (50,200,800,3200)")
        ->capture_default_str();
    add_generator_flags(cons, gf);
    add_solver_flags(cons, f);

    auto* sparse = app.add_subcommand("sparsity", "Incoherence certificate and zero-support check; writes JSON");
    sparse->add_option("input", input, "CSV with columns b,f1,...,fm")->required();
    sparse->add_option("--support", support_text, "Feature numbers (1-based) of the support set I");
    sparse->add_option("--c", c, "Uniform radius")->required();
    add_solver_flags(sparse, f);

    auto* stab = app.add_subcommand("stability", "Duplicate-feature stability witness; writes JSON");
    stab->add_option("input", input, "Base set as CSV with columns b,f1,...,fm")->required();
    stab->add_option("--z", z_text, "Held-out test point z* as a comma list")->required();
    stab->add_option("--c", c, "Uniform radius")->required();
    add_solver_flags(stab, f);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        bool converged = true;
        std::string text;
        if (*fit) {
            text = cmd_fit(input, f);
        } else if (*path) {
            text = cmd_path(input, grid_text, f, converged);
        } else if (*worst) {
            text = cmd_worstcase(input, x_text, samples, f);
        } else if (*bound) {
            text = cmd_bound(mean_text, sigma_text, c);
        } else if (*radius) {
            text = cmd_radius(mean_text, sigma_text, eta);
        } else if (*kde) {
            text = cmd_kde(n_text, bw_text, gf, density_grid, density_out, f);
        } else if (*cons) {
            text = cmd_consistency(schedule, gf, f, converged);
        } else if (*sparse) {
            text = cmd_sparsity(input, support_text, c, f);
        } else if (*stab) {
            text = cmd_stability(input, z_text, c, f);
        }
        emit(text, f.out, out);
        if (!converged) {
            err << "error: solver did not reach the gap target\n";
            return 2;
        }
        return 0;
    } catch (const NotConverged& nc) {
        try {
            emit(nc.document.dump(2) + '\n', f.out, out);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        err << "error: solver did not reach the gap target\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const CsvError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace rlasso::cli
