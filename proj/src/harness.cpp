#include "cstrain/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cstrain/core_linalg.hpp"
#include "cstrain/errors.hpp"

namespace cstrain {

namespace {

// Stream-id phase tags; adding a phase never perturbs the existing ones.
enum Phase : std::uint64_t {
    kPhaseA = 1,
    kPhaseX = 2,
    kPhaseZ = 3,
    kPhaseCombinator = 4,
    kPhasePairing = 5,
};

RngStream trial_stream(const ExperimentConfig& cfg, std::size_t trial) {
    return RngStream{cfg.master_seed, 0}.child(trial);
}

double rel_error(const Eigen::VectorXd& x, const Eigen::VectorXd& truth) {
    double denom = truth.norm();
    if (denom == 0.0) return x.norm();
    return (x - truth).norm() / denom;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    const auto& d = cfg.dims;
    if (cfg.trials < 1) fail("InvalidSpec", "trials must be >= 1");
    if (d.m < 1 || d.n < 1 || d.p < 1 || d.q < 1 || d.s < 1 || d.t < 1 ||
        d.t_bar < 1 || d.u < 1)
        fail("InvalidSpec", "all dimensions must be positive");
    if (d.q < d.p) fail("InvalidSpec", "need q >= p");
    if (d.t_bar > d.t) fail("InvalidSpec", "need t_bar <= t");
    validate(cfg.model);
    double theta = static_cast<double>(d.s) / static_cast<double>(d.n);
    if (std::abs(cfg.model.theta - theta) > 1e-9)
        fail("InvalidSpec", "model.theta must equal s/n");
    for (std::size_t u : cfg.u_candidates)
        if (u < 1 || u > d.n) fail("InvalidSpec", "u candidates must lie in [1, n]");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("IoError", "cannot open config: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        fail("IoError", std::string("bad config JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("suggest")) {
            const auto& s = j["suggest"];
            SuggestKnobs knobs;
            knobs.c_n = s.value("c_n", 1.0);
            knobs.c2 = s.value("c2", 1.0);
            knobs.beta_m = s.value("beta_m", 1.0);
            SuggestedDims dims = suggest_parameters(
                s.at("p").get<std::size_t>(), s.at("t").get<std::size_t>(), knobs);
            cfg.dims = {dims.m, dims.n, dims.p, dims.q,
                        dims.s, dims.t, dims.t_bar, dims.u};
            if (s.contains("m")) cfg.dims.m = s["m"].get<std::size_t>();
        } else {
            const auto& d = j.at("dims");
            cfg.dims.m = d.at("m").get<std::size_t>();
            cfg.dims.n = d.at("n").get<std::size_t>();
            cfg.dims.p = d.at("p").get<std::size_t>();
            cfg.dims.q = d.at("q").get<std::size_t>();
            cfg.dims.s = d.at("s").get<std::size_t>();
            cfg.dims.t = d.at("t").get<std::size_t>();
            cfg.dims.t_bar = d.at("t_bar").get<std::size_t>();
            cfg.dims.u = d.at("u").get<std::size_t>();
        }

        cfg.model.theta =
            static_cast<double>(cfg.dims.s) / static_cast<double>(cfg.dims.n);
        if (j.contains("model")) {
            const auto& m = j["model"];
            if (m.contains("theta")) cfg.model.theta = m["theta"].get<double>();
            if (m.contains("dist"))
                cfg.model.dist =
                    entry_dist_from_string(m["dist"].get<std::string>());
            cfg.model.nu = m.value("nu", 1.0);
            cfg.model.k_psi2 = m.value("k_psi2", 1.0);
        }

        cfg.trials = j.value("trials", std::size_t{1});
        cfg.master_seed = j.value("master_seed", std::uint64_t{0});
        if (j.contains("u_candidates"))
            cfg.u_candidates = j["u_candidates"].get<std::vector<std::size_t>>();
        if (j.contains("checks")) {
            const auto& c = j["checks"];
            cfg.checks.verify_rip = c.value("verify_rip", false);
            cfg.checks.rip_budget = c.value("rip_budget", std::uint64_t{200000});
            cfg.checks.verify_uniqueness = c.value("verify_uniqueness", false);
            cfg.checks.c1 = c.value("c1", 1.0);
            cfg.checks.c2 = c.value("c2", 1.0);
            cfg.checks.c_srank = c.value("c_srank", 1.0);
            cfg.checks.epsilon = c.value("epsilon", 0.62);
        }
        cfg.record_timings = j.value("record_timings", true);
        cfg.output_dir = j.value("output_dir", std::string("."));
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            cfg.solver.feas_tol = s.value("feas_tol", 1e-9);
            cfg.solver.gap_tol = s.value("gap_tol", 1e-9);
            cfg.solver.max_iters = s.value("max_iters", 50000);
            cfg.solver.polish = s.value("polish", true);
        }
    } catch (const nlohmann::json::exception& e) {
        fail("IoError", std::string("bad config JSON: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
    const auto& d = cfg.dims;
    TrialRecord rec;
    rec.trial_index = trial_index;
    RngStream base = trial_stream(cfg, trial_index);
    rec.seed = SplitMix64(base).next();
    rec.uniqueness_dims_ok = d.m >= 2 * d.s * d.t;

    try {
        DenseMatrix a = gen_gaussian_sensing(d.m, d.n, base.child(kPhaseA));
        DenseMatrix x = gen_component_matrix(d.n, d.p, cfg.model, base.child(kPhaseX));
        std::size_t k_easy = std::max<std::size_t>(1, d.t_bar / 2);
        std::size_t k_z = std::max<std::size_t>(1, d.t / 2);
        DenseMatrix z =
            gen_training_matrix(d.p, d.q, k_easy, base.child(kPhaseZ));
        Eigen::VectorXd zv =
            gen_sparse_combinator(d.p, k_z, base.child(kPhaseCombinator));

        Eigen::MatrixXd xz = x.map() * z.map();
        DenseMatrix b_samples = DenseMatrix::from_eigen(a.map() * xz);
        Eigen::VectorXd x_true = x.map() * zv;
        Eigen::VectorXd b = a.map() * x_true;

        rec.supp_true = support_size(x_true, default_support_threshold(x_true));

        if (cfg.checks.verify_rip && d.t <= d.p &&
            binomial_capped(d.p, d.t) <= cfg.checks.rip_budget) {
            ScalingDiagonal sx = scaling_matrix(x);
            double kappa =
                std::sqrt(static_cast<double>(d.n)) / a.map().norm();
            Eigen::MatrixXd m_rip =
                kappa * (a.map() * apply_scaling(x, sx).map());
            rec.rip_epsilon =
                rip_constant(DenseMatrix::from_eigen(m_rip), d.t,
                             cfg.checks.rip_budget)
                    .epsilon;
        }

        if (cfg.checks.verify_uniqueness && 2 * d.u <= 14 &&
            binomial_capped(d.n, 2 * d.u) <= cfg.checks.rip_budget) {
            bool ok = 2 * d.u <= d.m;
            if (ok) {
                RipEstimate est =
                    rip_constant(a, 2 * d.u, cfg.checks.rip_budget);
                ok = est.sigma_min > 1e-10 * est.sigma_max;
            }
            rec.uniqueness_verified = ok;
        }

        std::vector<std::size_t> u_cands =
            cfg.u_candidates.empty() ? std::vector<std::size_t>{d.u}
                                     : cfg.u_candidates;

        TrainResult chosen{FactorizationResult{DenseMatrix(1, 1),
                                               DenseMatrix(1, 1), 0.0},
                           {},
                           {}};
        SweepTimings tm;
        try {
            RecoveryResult pipe =
                train_and_recover(a, b, b_samples, u_cands,
                                  base.child(kPhasePairing), cfg.solver, d.p,
                                  &chosen, &tm);
            rec.t_train_s = tm.train_seconds;
            rec.t_recover_s = tm.recover_seconds;
            rec.u_used = pipe.u_used;
            rec.supp_pipeline = pipe.support;
            rec.pipeline_exact = rel_error(pipe.x, x_true) <= 1e-6;
            rec.factorization_matched =
                chosen.factorization.x_bar.cols() == d.p &&
                match_up_to_signed_scaled_permutation(
                    x, chosen.factorization.x_bar, 1e-6)
                    .matched;
        } catch (const domain_error& e) {
            rec.error = e.name();
        }

        L1Solution direct = basis_pursuit(a, b, cfg.solver);
        rec.supp_direct =
            support_size(direct.x, default_support_threshold(direct.x));
        rec.direct_l1_exact = direct.status == SolveStatus::Optimal &&
                              rel_error(direct.x, x_true) <= 1e-6;
    } catch (const std::exception& e) {
        const auto* de = dynamic_cast<const domain_error*>(&e);
        rec.error = de ? de->name() : std::string("Error");
    }
    return rec;
}

std::string trials_csv(const ExperimentConfig& cfg,
                       const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    out << "trial_index,seed,factorization_matched,rip_epsilon,pipeline_exact,"
           "direct_l1_exact,supp_true,supp_pipeline,supp_direct,t_train_s,"
           "t_recover_s\n";
    for (const auto& r : records) {
        out << r.trial_index << ',' << r.seed << ','
            << (r.factorization_matched ? 1 : 0) << ',';
        if (r.rip_epsilon) out << fmt17(*r.rip_epsilon);
        out << ',' << (r.pipeline_exact ? 1 : 0) << ','
            << (r.direct_l1_exact ? 1 : 0) << ',' << r.supp_true << ','
            << r.supp_pipeline << ',' << r.supp_direct << ','
            << fmt6(cfg.record_timings ? r.t_train_s : 0.0) << ','
            << fmt6(cfg.record_timings ? r.t_recover_s : 0.0) << '\n';
    }
    return out.str();
}

namespace {

std::size_t default_workers() {
    if (const char* env = std::getenv("CSTRAIN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

nlohmann::json summary_json(const ExperimentConfig& cfg,
                            const ExperimentSummary& s) {
    nlohmann::json j;
    j["trials"] = s.trials;
    j["factorization_rate"] = s.factorization_rate;
    j["pipeline_rate"] = s.pipeline_rate;
    j["direct_l1_rate"] = s.direct_l1_rate;
    if (s.mean_rip_epsilon)
        j["mean_rip_epsilon"] = *s.mean_rip_epsilon;
    else
        j["mean_rip_epsilon"] = nullptr;
    j["rip_trials"] = s.rip_trials;
    j["mean_t_train_s"] = s.mean_t_train_s;
    j["mean_t_recover_s"] = s.mean_t_recover_s;
    j["failed_trials"] = s.failed_trials;
    j["config"] = {
        {"dims",
         {{"m", cfg.dims.m},
          {"n", cfg.dims.n},
          {"p", cfg.dims.p},
          {"q", cfg.dims.q},
          {"s", cfg.dims.s},
          {"t", cfg.dims.t},
          {"t_bar", cfg.dims.t_bar},
          {"u", cfg.dims.u}}},
        {"model",
         {{"theta", cfg.model.theta},
          {"dist", to_string(cfg.model.dist)},
          {"nu", cfg.model.nu},
          {"k_psi2", cfg.model.k_psi2}}},
        {"trials", cfg.trials},
        {"master_seed", cfg.master_seed},
        {"record_timings", cfg.record_timings},
    };
    return j;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 std::size_t workers) {
    validate(cfg);
    if (workers == 0) workers = default_workers();
    workers = std::min(workers, cfg.trials);

    std::vector<TrialRecord> records(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cfg.trials) break;
            records[i] = run_trial(cfg, i);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    ExperimentSummary s;
    s.trials = cfg.trials;
    double rip_sum = 0.0;
    for (const auto& r : records) {
        s.factorization_rate += r.factorization_matched ? 1.0 : 0.0;
        s.pipeline_rate += r.pipeline_exact ? 1.0 : 0.0;
        s.direct_l1_rate += r.direct_l1_exact ? 1.0 : 0.0;
        s.mean_t_train_s += r.t_train_s;
        s.mean_t_recover_s += r.t_recover_s;
        if (r.rip_epsilon) {
            rip_sum += *r.rip_epsilon;
            ++s.rip_trials;
        }
        if (!r.error.empty()) ++s.failed_trials;
    }
    double nt = static_cast<double>(cfg.trials);
    s.factorization_rate /= nt;
    s.pipeline_rate /= nt;
    s.direct_l1_rate /= nt;
    s.mean_t_train_s /= nt;
    s.mean_t_recover_s /= nt;
    if (s.rip_trials) s.mean_rip_epsilon = rip_sum / static_cast<double>(s.rip_trials);

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) fail("IoError", "cannot create output dir: " + cfg.output_dir);

    std::string csv_path = cfg.output_dir + "/trials.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) fail("IoError", "cannot write " + csv_path);
    csv << trials_csv(cfg, records);
    csv.close();
    if (!csv) fail("IoError", "write failed: " + csv_path);

    std::string json_path = cfg.output_dir + "/summary.json";
    std::ofstream js(json_path, std::ios::binary);
    if (!js) fail("IoError", "cannot write " + json_path);
    js << summary_json(cfg, s).dump(2) << "\n";
    js.close();
    if (!js) fail("IoError", "write failed: " + json_path);

    s.records = std::move(records);
    return s;
}

std::vector<AssumptionCheck> check_assumptions(const ExperimentConfig& cfg,
                                               const DenseMatrix& a,
                                               const DenseMatrix& x) {
    const auto& d = cfg.dims;
    const auto& k = cfg.checks;
    std::vector<AssumptionCheck> out;
    auto push = [&](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok ? "pass" : "fail", std::move(detail)});
    };

    push("size.samples", d.p <= d.q,
         "p = " + std::to_string(d.p) + ", q = " + std::to_string(d.q));

    double lp = std::log(static_cast<double>(d.p));
    double bound_n = k.c1 * static_cast<double>(d.p) * static_cast<double>(d.p) *
                     lp * lp;
    push("size.columns", static_cast<double>(d.n) > bound_n,
         "n = " + std::to_string(d.n) + ", c1 p^2 log^2 p = " +
             std::to_string(bound_n));

    double theta = static_cast<double>(d.s) / static_cast<double>(d.n);
    bool theta_ok = theta >= 2.0 / static_cast<double>(d.p) &&
                    theta <= k.c2 / std::sqrt(static_cast<double>(d.p));
    push("size.sparsity", theta_ok,
         "s/n = " + std::to_string(theta) + " vs [2/p, c2/sqrt(p)] = [" +
             std::to_string(2.0 / static_cast<double>(d.p)) + ", " +
             std::to_string(k.c2 / std::sqrt(static_cast<double>(d.p))) + "]");

    double srank = stable_rank(a);
    double kk = cfg.model.k_psi2;
    double eps = k.epsilon;
    double rhs = k.c_srank * kk * kk * kk * kk *
                 (static_cast<double>(d.n) * static_cast<double>(d.t)) /
                 (static_cast<double>(d.s) * eps * eps) *
                 std::log(3.0 * static_cast<double>(d.p) /
                          (eps * static_cast<double>(d.t)));
    push("size.stable_rank", srank >= rhs,
         "srank(A) = " + std::to_string(srank) + ", bound = " +
             std::to_string(rhs));

    if (2 * d.u <= 14 && binomial_capped(d.n, 2 * d.u) <= k.rip_budget) {
        bool ok = 2 * d.u <= d.m;
        std::string detail = "2u = " + std::to_string(2 * d.u);
        if (ok) {
            RipEstimate est = rip_constant(a, 2 * d.u, k.rip_budget);
            ok = est.sigma_min > 1e-10 * est.sigma_max;
            detail += ", min sigma over supports = " + std::to_string(est.sigma_min);
        } else {
            detail += " exceeds m = " + std::to_string(d.m);
        }
        push("uniqueness", ok, detail);
    } else {
        out.push_back({"uniqueness", "assumed",
                       "enumeration over binomial(n, 2u) supports exceeds budget"});
    }

    std::size_t rank_x = numerical_rank(x);
    push("component_rank", rank_x == d.p,
         "rank(X) = " + std::to_string(rank_x) + ", p = " + std::to_string(d.p));
    return out;
}

}  // namespace cstrain
