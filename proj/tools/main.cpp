// Command-line front end: every subcommand is a thin adapter over the
// library; no numerical logic lives here.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstrain/core_linalg.hpp"
#include "cstrain/dense_matrix.hpp"
#include "cstrain/dictlearn.hpp"
#include "cstrain/errors.hpp"
#include "cstrain/harness.hpp"
#include "cstrain/l1_solver.hpp"
#include "cstrain/pipeline.hpp"
#include "cstrain/rand_models.hpp"

namespace {

using cstrain::DenseMatrix;
using nlohmann::json;

void write_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) cstrain::fail("IoError", "cannot write " + path);
    f << j.dump(2) << "\n";
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct GenArgs {
    std::string kind;
    std::size_t n = 0, p = 0, q = 0, m = 0, k = 1;
    double theta = 0.25, nu = 1.0;
    std::string dist = "gaussian";
    std::uint64_t seed = 0, stream = 0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    cstrain::RngStream rng{a.seed, a.stream};
    json meta = {{"seed", a.seed}, {"stream", a.stream}, {"kind", a.kind}};

    if (a.kind == "component") {
        cstrain::ModelSpec spec;
        spec.theta = a.theta;
        spec.dist = cstrain::entry_dist_from_string(a.dist);
        spec.nu = a.nu;
        DenseMatrix x = cstrain::gen_component_matrix(a.n, a.p, spec, rng);
        cstrain::write_matrix_text(x, a.out);
        meta["spec"] = {{"theta", spec.theta},
                        {"dist", cstrain::to_string(spec.dist)},
                        {"nu", spec.nu}};
        meta["shape"] = {a.n, a.p};
    } else if (a.kind == "sensing") {
        DenseMatrix s = cstrain::gen_gaussian_sensing(a.m, a.n, rng);
        cstrain::write_matrix_text(s, a.out);
        meta["shape"] = {a.m, a.n};
    } else if (a.kind == "combinator") {
        Eigen::VectorXd z = cstrain::gen_sparse_combinator(a.p, a.k, rng);
        cstrain::write_vector_text(z, a.out);
        meta["spec"] = {{"k", a.k}};
        meta["shape"] = {a.p, 1};
    } else if (a.kind == "training") {
        DenseMatrix z = cstrain::gen_training_matrix(a.p, a.q, a.k, rng);
        cstrain::write_matrix_text(z, a.out);
        meta["spec"] = {{"k_easy", a.k}};
        meta["shape"] = {a.p, a.q};
    } else {
        cstrain::fail("InvalidSpec", "unknown gen kind: " + a.kind);
    }
    write_json(meta, a.out + ".meta.json");
    return 0;
}

json solution_report(const cstrain::L1Solution& sol) {
    return {{"status", cstrain::to_string(sol.status)},
            {"objective", sol.objective},
            {"feas_residual", sol.feas_residual},
            {"iterations", sol.iterations},
            {"support",
             cstrain::support_size(sol.x,
                                   cstrain::default_support_threshold(sol.x))}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"training-assisted compressed sensing toolkit"};
    app.require_subcommand(1);

    // ---- gen ----
    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate model matrices");
    cgen->add_option("--kind", gen.kind, "component|sensing|combinator|training")
        ->required();
    cgen->add_option("--n", gen.n, "rows (component) / columns (sensing)");
    cgen->add_option("--p", gen.p, "component count / combinator length");
    cgen->add_option("--q", gen.q, "training sample count");
    cgen->add_option("--m", gen.m, "sensing rows");
    cgen->add_option("--k", gen.k, "nonzeros per combinator column");
    cgen->add_option("--theta", gen.theta, "Bernoulli rate s/n");
    cgen->add_option("--dist", gen.dist, "gaussian|rademacher|uniform");
    cgen->add_option("--nu", gen.nu, "sqrt of E[R^2]");
    cgen->add_option("--seed", gen.seed, "master seed");
    cgen->add_option("--stream", gen.stream, "stream id");
    cgen->add_option("--out", gen.out, "output matrix file")->required();

    // ---- recover ----
    std::string r_matrix, r_rhs, r_out, r_report;
    cstrain::SolverOptions r_opts;
    bool r_no_polish = false;
    auto* crec = app.add_subcommand("recover", "basis pursuit min ||x||_1");
    crec->add_option("--matrix", r_matrix)->required();
    crec->add_option("--rhs", r_rhs)->required();
    crec->add_option("--out", r_out, "solution vector file");
    crec->add_option("--report", r_report, "JSON status record");
    crec->add_option("--feas-tol", r_opts.feas_tol);
    crec->add_option("--gap-tol", r_opts.gap_tol);
    crec->add_option("--max-iters", r_opts.max_iters);
    crec->add_flag("--no-polish", r_no_polish);

    // ---- factorize ----
    std::string f_input, f_out_x, f_out_z, f_report;
    std::uint64_t f_seed = 0;
    auto* cfac = app.add_subcommand("factorize", "sparse factorization Y = X Z");
    cfac->add_option("--input", f_input)->required();
    cfac->add_option("--seed", f_seed);
    cfac->add_option("--out-x", f_out_x);
    cfac->add_option("--out-z", f_out_z);
    cfac->add_option("--report", f_report);

    // ---- train ----
    std::string t_matrix, t_samples, t_out_x, t_out_z, t_report;
    std::size_t t_u = 1, t_expected_p = 0;
    std::uint64_t t_seed = 0;
    auto* ctr = app.add_subcommand("train", "learn components from samples");
    ctr->add_option("--matrix", t_matrix, "sensing matrix A")->required();
    ctr->add_option("--samples", t_samples, "training right-hand sides B")
        ->required();
    ctr->add_option("--u", t_u, "sparsity filter")->required();
    ctr->add_option("--seed", t_seed);
    ctr->add_option("--expected-p", t_expected_p);
    ctr->add_option("--out-x", t_out_x);
    ctr->add_option("--out-z", t_out_z);
    ctr->add_option("--report", t_report);

    // ---- pipeline ----
    std::string p_matrix, p_rhs, p_samples, p_out, p_report;
    std::vector<std::size_t> p_u;
    std::size_t p_expected_p = 0;
    std::uint64_t p_seed = 0;
    auto* cpipe =
        app.add_subcommand("pipeline", "train on samples, then recover b");
    cpipe->add_option("--matrix", p_matrix)->required();
    cpipe->add_option("--rhs", p_rhs)->required();
    cpipe->add_option("--samples", p_samples)->required();
    cpipe->add_option("--u", p_u, "u candidates (repeatable)")->required();
    cpipe->add_option("--seed", p_seed);
    cpipe->add_option("--expected-p", p_expected_p);
    cpipe->add_option("--out", p_out);
    cpipe->add_option("--report", p_report);

    // ---- rip ----
    std::string rp_matrix;
    std::size_t rp_t = 1;
    std::uint64_t rp_max_supports = 1000000;
    std::size_t rp_samples = 0;
    std::uint64_t rp_seed = 0;
    auto* crip = app.add_subcommand("rip", "restricted isometry constant");
    crip->add_option("--matrix", rp_matrix)->required();
    crip->add_option("--t", rp_t, "support size")->required();
    crip->add_option("--max-supports", rp_max_supports);
    crip->add_option("--samples", rp_samples,
                     "randomized sampling mode (lower bound)");
    crip->add_option("--seed", rp_seed);

    // ---- experiment ----
    std::string e_config, e_output;
    std::size_t e_workers = 0;
    std::optional<std::size_t> e_trials;
    std::optional<std::uint64_t> e_seed;
    auto* cexp = app.add_subcommand("experiment", "seeded Monte-Carlo driver");
    cexp->add_option("--config", e_config, "JSON config")->required();
    cexp->add_option("--output-dir", e_output, "overrides config output_dir");
    cexp->add_option("--workers", e_workers, "0 = CSTRAIN_THREADS or hardware");
    cexp->add_option("--trials", e_trials, "overrides config trials");
    cexp->add_option("--master-seed", e_seed, "overrides config master_seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cgen->parsed()) return run_gen(gen);

        if (crec->parsed()) {
            r_opts.polish = !r_no_polish;
            DenseMatrix m = cstrain::read_matrix_text(r_matrix);
            Eigen::VectorXd b = cstrain::read_vector_text(r_rhs);
            cstrain::L1Solution sol = cstrain::basis_pursuit(m, b, r_opts);
            if (!r_out.empty()) cstrain::write_vector_text(sol.x, r_out);
            if (!r_report.empty()) write_json(solution_report(sol), r_report);
            if (sol.status != cstrain::SolveStatus::Optimal)
                cstrain::fail(cstrain::to_string(sol.status),
                              "basis pursuit did not reach Optimal");
            std::cout << fmt17(sol.objective) << "\n";
            return 0;
        }

        if (cfac->parsed()) {
            DenseMatrix y = cstrain::read_matrix_text(f_input);
            cstrain::RngStream rng{f_seed, 0};
            cstrain::CandidateSet cands = cstrain::er_spud_dc(y, rng);
            cstrain::FactorizationResult fact =
                cstrain::sparse_factorization(y, rng);
            if (!f_out_x.empty()) cstrain::write_matrix_text(fact.x_bar, f_out_x);
            if (!f_out_z.empty()) cstrain::write_matrix_text(fact.z_bar, f_out_z);
            if (!f_report.empty()) {
                json rep = {{"residual", fact.residual},
                            {"rank", fact.x_bar.cols()},
                            {"candidates_kept", cands.candidates.size()},
                            {"candidates_skipped", cands.skipped.size()}};
                json sel = json::array();
                for (std::size_t k = 0; k < fact.x_bar.cols(); ++k) {
                    Eigen::VectorXd col = fact.x_bar.col_vector(k);
                    sel.push_back(cstrain::support_size(
                        col, cstrain::default_support_threshold(col)));
                }
                rep["selected_supports"] = sel;
                write_json(rep, f_report);
            }
            std::cout << fmt17(fact.residual) << "\n";
            return 0;
        }

        if (ctr->parsed()) {
            DenseMatrix a = cstrain::read_matrix_text(t_matrix);
            DenseMatrix b = cstrain::read_matrix_text(t_samples);
            cstrain::TrainResult tr = cstrain::train(
                a, b, t_u, cstrain::RngStream{t_seed, 0}, {}, t_expected_p);
            if (!t_out_x.empty())
                cstrain::write_matrix_text(tr.factorization.x_bar, t_out_x);
            if (!t_out_z.empty())
                cstrain::write_matrix_text(tr.factorization.z_bar, t_out_z);
            if (!t_report.empty())
                write_json({{"residual", tr.factorization.residual},
                            {"kept", tr.kept_columns},
                            {"discarded", tr.discarded}},
                           t_report);
            std::cout << tr.kept_columns.size() << " kept, "
                      << tr.discarded.size() << " discarded\n";
            return 0;
        }

        if (cpipe->parsed()) {
            DenseMatrix a = cstrain::read_matrix_text(p_matrix);
            Eigen::VectorXd b = cstrain::read_vector_text(p_rhs);
            DenseMatrix samples = cstrain::read_matrix_text(p_samples);
            cstrain::TrainResult chosen{
                cstrain::FactorizationResult{DenseMatrix(1, 1), DenseMatrix(1, 1),
                                             0.0},
                {},
                {}};
            cstrain::SweepTimings tm;
            cstrain::RecoveryResult rec = cstrain::train_and_recover(
                a, b, samples, p_u, cstrain::RngStream{p_seed, 0}, {},
                p_expected_p, &chosen, &tm);
            if (!p_out.empty()) cstrain::write_vector_text(rec.x, p_out);
            if (!p_report.empty()) {
                double resid =
                    (a.map() * rec.x - b).norm() / std::max(b.norm(), 1.0);
                write_json(
                    {{"u_used", rec.u_used ? json(*rec.u_used) : json(nullptr)},
                     {"support", rec.support},
                     {"residual", resid},
                     {"kept", chosen.kept_columns},
                     {"discarded", chosen.discarded},
                     {"factorization_residual", chosen.factorization.residual},
                     {"t_train_s", tm.train_seconds},
                     {"t_recover_s", tm.recover_seconds}},
                    p_report);
            }
            std::cout << "u=" << (rec.u_used ? *rec.u_used : 0)
                      << " support=" << rec.support << "\n";
            return 0;
        }

        if (crip->parsed()) {
            DenseMatrix m = cstrain::read_matrix_text(rp_matrix);
            cstrain::RipEstimate est =
                rp_samples > 0
                    ? cstrain::rip_constant_sampled(m, rp_t, rp_samples,
                                                    cstrain::RngStream{rp_seed, 0})
                    : cstrain::rip_constant(m, rp_t, rp_max_supports);
            std::cout << fmt17(est.epsilon) << "\n";
            if (!est.exhaustive)
                std::cerr << "sampled lower bound (" << est.supports_checked
                          << " supports)\n";
            return 0;
        }

        if (cexp->parsed()) {
            cstrain::ExperimentConfig cfg = cstrain::load_config(e_config);
            if (!e_output.empty()) cfg.output_dir = e_output;
            if (e_trials) cfg.trials = *e_trials;
            if (e_seed) cfg.master_seed = *e_seed;
            cstrain::ExperimentSummary s =
                cstrain::run_experiment(cfg, e_workers);
            std::cout << "pipeline_rate=" << s.pipeline_rate
                      << " direct_rate=" << s.direct_l1_rate
                      << " factorization_rate=" << s.factorization_rate << "\n";
            return 0;
        }
    } catch (const cstrain::domain_error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
