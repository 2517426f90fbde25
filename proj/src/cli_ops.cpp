#include "stc/cli_ops.hpp"

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "stc/examples.hpp"
#include "stc/io.hpp"
#include "stc/triggering.hpp"

namespace stc {

namespace ex = examples;

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    ExperimentConfig cfg;
    cfg.system = j.at("system").get<std::string>();
    if (cfg.system != "example1" && cfg.system != "example2")
        throw std::invalid_argument("config: unknown system '" + cfg.system + "'");
    if (j.contains("mechanism")) cfg.mechanism = j["mechanism"].get<std::string>();
    if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
    if (j.contains("m")) cfg.fir_m = j["m"].get<int>();
    if (j.contains("r1")) cfg.iir_r1 = j["r1"].get<double>();
    if (j.contains("r2")) cfg.iir_r2 = j["r2"].get<double>();
    if (j.contains("eps_ref")) cfg.eps_ref = j["eps_ref"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("horizon")) cfg.horizon = j["horizon"].get<double>();
    if (j.contains("x0")) cfg.x0 = j["x0"].get<std::vector<double>>();
    if (j.contains("disturbance")) cfg.disturbance = j["disturbance"].get<std::string>();
    return cfg;
}

CertificateBank build_bank_for(const std::string& system) {
    if (system == "example1") return ex::example1_bank();
    if (system == "example2") return ex::example2_bank();
    throw std::invalid_argument("unknown system '" + system + "'");
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg) {
    ResolvedExperiment r;
    if (cfg.system == "example1") {
        r.system = ex::example1_system();
        r.builder = ex::example1_builder();
        r.trigger = ex::example1_config();
        r.x0 = ex::example1_x0();
        r.disturbance = ex::example1_disturbance();
        r.horizon = ex::kEx1Horizon;
        r.baseline_period = 0.0;  // filled from the synthesized fall-back by cmd_bench
    } else {
        r.system = ex::example2_system();
        r.builder = ex::example2_builder();
        r.trigger = ex::example2_config();
        r.x0 = ex::example2_x0();
        r.disturbance = ex::example2_disturbance();
        r.horizon = ex::kEx2Horizon;
        r.baseline_period = 0.0;
    }
    if (!cfg.variant.empty())
        r.trigger.variant = cfg.variant == "ras" ? TriggerConfig::Variant::RAS
                                                 : TriggerConfig::Variant::ISS;
    if (cfg.eps_ref) r.trigger.eps_ref = *cfg.eps_ref;
    if (cfg.delta) r.trigger.delta = *cfg.delta;
    if (cfg.horizon) r.horizon = *cfg.horizon;
    if (cfg.x0) {
        r.x0 = Eigen::Map<const Eigen::VectorXd>(cfg.x0->data(),
                                                 static_cast<Eigen::Index>(cfg.x0->size()));
    }
    if (cfg.disturbance == "none") r.disturbance = zero_disturbance();
    return r;
}

MechanismState make_mechanism(const ExperimentConfig& cfg, const TriggerConfig& trigger,
                              double v0) {
    if (cfg.mechanism == "fir") return make_fir(cfg.fir_m, v0);
    if (cfg.mechanism == "iir") return make_iir(cfg.iir_r1, cfg.iir_r2, v0);
    if (cfg.mechanism == "ref") return make_ref_initial(v0, trigger);
    throw std::invalid_argument("unknown mechanism '" + cfg.mechanism + "'");
}

int cmd_certify(const ExperimentConfig& cfg, const std::string& bank_path, std::string& out_log) {
    std::ostringstream log;
    CertificateBank bank;
    try {
        bank = build_bank_for(cfg.system);
    } catch (const std::runtime_error& e) {
        out_log = std::string("certification infeasible: ") + e.what() + "\n";
        return kExitInfeasible;
    }
    log << "level  c           eps1      gamma1      L1        fallback\n";
    for (std::size_t l = 0; l < bank.levels.size(); ++l) {
        const auto& fb = bank.levels[l].sets.front();
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-6zu %-11.5g %-9.4g %-11.6g %-9.5g %.6g\n", l + 1,
                      bank.levels[l].c, fb.epsilon, fb.gamma, fb.l_gain,
                      fallback_period(bank, static_cast<int>(l), 0.999));
        log << buf;
    }
    save_bank(bank, bank_path);
    log << "bank written to " << bank_path << "\n";
    out_log = log.str();
    return kExitOk;
}

namespace {

struct RunResult {
    HybridTrajectory traj;
    BoundReport report;
};

RunResult run_one(const ExperimentConfig& cfg, const ResolvedExperiment& r,
                  const CertificateBank& bank, double dt_max) {
    RunResult res;
    const double v0 = r.x0.dot(bank.p_matrix * r.x0);
    if (cfg.mechanism == "baseline") {
        if (cfg.system == "example1")
            res.traj = simulate_periodic(r.system, bank, r.trigger, fallback_period(bank, 0, r.trigger.delta),
                                         r.x0, r.disturbance, r.horizon, false, dt_max);
        else
            res.traj = simulate_periodic(r.system, bank, r.trigger, 0.0, r.x0, r.disturbance,
                                         r.horizon, true, dt_max);
    } else {
        res.traj = simulate(r.system, bank, r.trigger, make_mechanism(cfg, r.trigger, v0), r.x0,
                            r.disturbance, r.horizon, dt_max);
    }
    res.report = check_prop1_bound(res.traj, bank, r.trigger, r.disturbance, &r.builder);
    return res;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& bank_path, double dt_max, std::string& out_log) {
    std::ostringstream log;
    const ResolvedExperiment r = resolve_experiment(cfg);
    const CertificateBank bank =
        bank_path.empty() ? build_bank_for(cfg.system) : load_bank(bank_path);
    if (bank.p_matrix.rows() != r.system.n_x) {
        out_log = "config/bank mismatch: P dimension does not fit the system\n";
        return kExitUsage;
    }
    std::filesystem::create_directories(out_dir);
    RunResult res;
    try {
        res = run_one(cfg, r, bank, dt_max);
    } catch (const OutOfRegionError& e) {
        out_log = std::string("out of region: ") + e.what() + "\n";
        return kExitOutOfRegion;
    }
    save_trajectory_csv(res.traj, out_dir + "/trajectory.csv");
    write_text_file(out_dir + "/summary.json", summary_to_json(res.traj, res.report));
    log << "events: " << res.traj.events.size() << ", bound check "
        << (res.report.passed ? "passed" : "FAILED") << "\n";
    out_log = log.str();
    return res.report.passed ? kExitOk : kExitBoundViolation;
}

int cmd_bench(const std::vector<ExperimentConfig>& cfgs, const std::string& out_dir,
              double dt_max, std::string& out_log) {
    std::ostringstream csv, txt;
    csv << "system,mechanism,num_events,min_interval,mean_interval,max_interval,final_V\n";
    txt << "system    mechanism  events  min_iv     mean_iv    max_iv     final_V\n";
    bool any_example2 = false;
    int rc = kExitOk;
    for (const auto& base_cfg : cfgs) {
        any_example2 = any_example2 || base_cfg.system == "example2";
        const ResolvedExperiment r = resolve_experiment(base_cfg);
        const CertificateBank bank = build_bank_for(base_cfg.system);
        for (const std::string mech : {"fir", "iir", "ref", "baseline"}) {
            ExperimentConfig cfg = base_cfg;
            cfg.mechanism = mech;
            RunResult res;
            try {
                res = run_one(cfg, r, bank, dt_max);
            } catch (const OutOfRegionError&) {
                rc = kExitOutOfRegion;
                continue;
            }
            if (!res.report.passed) rc = kExitBoundViolation;
            double min_iv = std::numeric_limits<double>::infinity(), max_iv = 0.0, sum = 0.0;
            for (const auto& ev : res.traj.events) {
                min_iv = std::min(min_iv, ev.gamma);
                max_iv = std::max(max_iv, ev.gamma);
                sum += ev.gamma;
            }
            const double mean_iv =
                res.traj.events.empty() ? 0.0 : sum / static_cast<double>(res.traj.events.size());
            const double final_v = res.traj.samples.back().v;
            csv << base_cfg.system << ',' << mech << ',' << res.traj.events.size() << ','
                << format_double(min_iv) << ',' << format_double(mean_iv) << ','
                << format_double(max_iv) << ',' << format_double(final_v) << '\n';
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%-9s %-10s %-7zu %-10.5g %-10.5g %-10.5g %.5g\n",
                          base_cfg.system.c_str(), mech.c_str(), res.traj.events.size(), min_iv,
                          mean_iv, max_iv, final_v);
            txt << buf;
        }
    }
    if (any_example2)
        txt << "reference: static STC of Tiberi et al., 12907 events (external, not reproduced)\n";
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/bench.csv", csv.str());
    write_text_file(out_dir + "/bench.txt", txt.str());
    out_log = txt.str();
    return rc;
}

}  // namespace stc
