// expertise-audit — command-line front end.
//
// Subcommands: ingest, match, audit, scm, hte, power, actionpred, simulate,
// pipeline. Exit codes: 0 success, 2 validation error, 3 statistical error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "expaudit/expert_test.hpp"
#include "expaudit/expertise.hpp"
#include "expaudit/hte.hpp"
#include "expaudit/io.hpp"
#include "expaudit/matching.hpp"
#include "expaudit/pipeline.hpp"
#include "expaudit/power.hpp"
#include "expaudit/scm.hpp"

namespace {

using nlohmann::ordered_json;
namespace ea = expaudit;

void emit(const ordered_json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        ea::io::write_file(out_path, text);
}

ea::scm::Assignment parse_assignments(const std::vector<std::string>& kvs) {
    ea::scm::Assignment a;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ea::ValidationError("expected name=value, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (val != "0" && val != "1")
            throw ea::ValidationError("assignment value for '" + name + "' must be 0 or 1");
        a.emplace_back(name, val == "1" ? 1 : 0);
    }
    return a;
}

// Shared ingestion flags for the commands that read audit CSVs.
struct IngestOptions {
    std::string input;
    std::string id_column = "id";
    std::string stratum_column;
    std::string outcome_column = "outcome";
    std::string outcome_kind = "binary";
    double gpa_threshold = 3.5;
    std::vector<std::string> features;
    std::vector<std::string> actions = {"A"};
    std::vector<std::string> drop_if_missing;
    bool keep_summer = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "audit CSV file")->required();
        cmd->add_option("--id-column", id_column, "record id column");
        cmd->add_option("--stratum-column", stratum_column, "stratum (semester) column");
        cmd->add_option("--outcome-column", outcome_column, "outcome column");
        cmd->add_option("--outcome-kind", outcome_kind, "binary or gpa")
            ->check(CLI::IsMember({"binary", "gpa"}));
        cmd->add_option("--gpa-threshold", gpa_threshold, "outcome bit = gpa >= threshold");
        cmd->add_option("--features", features, "feature columns")->delimiter(',');
        cmd->add_option("--actions", actions, "action columns")->delimiter(',');
        cmd->add_option("--drop-if-missing", drop_if_missing,
                        "columns whose missing values drop the row")
            ->delimiter(',');
        cmd->add_flag("--keep-summer", keep_summer, "keep summer-semester rows");
    }

    ea::io::IngestionPolicy policy() const {
        ea::io::IngestionPolicy p;
        p.id_column = id_column;
        p.stratum_column = stratum_column;
        p.outcome_column = outcome_column;
        p.outcome_is_gpa = outcome_kind == "gpa";
        p.gpa_threshold = gpa_threshold;
        p.feature_columns = features;
        p.action_columns = actions;
        p.drop_if_missing = drop_if_missing;
        p.exclude_summer = !keep_summer;
        return p;
    }
};

ordered_json exclusions_json(const std::vector<ea::io::ExclusionEntry>& log) {
    ordered_json out = ordered_json::array();
    for (const auto& e : log) {
        ordered_json entry;
        entry["line"] = e.line;
        entry["reason"] = e.reason;
        out.push_back(entry);
    }
    return out;
}

ordered_json fit_json(const ea::hte::RegressionFit& fit) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
        ordered_json r;
        r["variable"] = fit.labels[static_cast<std::size_t>(i)];
        r["coef"] = fit.beta[i];
        r["std_err"] = fit.se[i];
        r["z"] = fit.z[i];
        r["p"] = fit.p[i];
        r["ci_low"] = fit.ci_low[i];
        r["ci_high"] = fit.ci_high[i];
        rows.push_back(r);
    }
    ordered_json j;
    j["coefficients"] = rows;
    j["log_likelihood"] = fit.log_lik;
    j["pseudo_r_squared"] = fit.pseudo_r2;
    j["iterations"] = fit.iterations;
    return j;
}

void print_fit_table(const ea::hte::RegressionFit& fit, long observations) {
    std::printf("%-16s %10s %10s %8s %8s   %s\n", "Variable", "Coef.", "Std.Err.", "z", "P>|z|",
                "95% CI");
    for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
        std::printf("%-16s %10.4f %10.3f %8.3f %8.3f   [%.3f, %.3f]\n",
                    fit.labels[static_cast<std::size_t>(i)].c_str(), fit.beta[i], fit.se[i],
                    fit.z[i], fit.p[i], fit.ci_low[i], fit.ci_high[i]);
    }
    std::printf("Observations: %ld, Pseudo R-squared: %.5f, Log-Likelihood: %.2f\n", observations,
                fit.pseudo_r2, fit.log_lik);
}

int run(int argc, char** argv) {
    CLI::App app{"audit toolkit for discretionary expertise in algorithm-assisted interventions"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "sample a synthetic dataset from a model");
    std::string sim_model, sim_out;
    long sim_n = 1000;
    std::uint64_t sim_seed = 0;
    bool sim_include_context = false;
    simulate->add_option("model", sim_model, "model spec file")->required();
    simulate->add_option("--n", sim_n, "number of records");
    simulate->add_option("--seed", sim_seed, "random seed");
    simulate->add_option("--out", sim_out, "output CSV path (default stdout)");
    simulate->add_flag("--include-context", sim_include_context,
                       "emit the context variable as a feature column");
    simulate->callback([&] {
        const auto model = ea::io::load_model_file(sim_model);
        const auto ds = ea::io::sample_from_scm(model, sim_n, sim_seed, sim_include_context);
        const std::string csv = ea::io::format_audit_csv(ds);
        if (sim_out.empty() || sim_out == "-")
            std::cout << csv;
        else
            ea::io::write_file(sim_out, csv);
    });

    // ---- ingest ------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "clean an audit CSV per the ingestion policy");
    IngestOptions ing_opts;
    ing_opts.attach(ingest);
    std::string ing_out, ing_log;
    ingest->add_option("--out", ing_out, "cleaned CSV path (default stdout)");
    ingest->add_option("--log", ing_log, "exclusion log JSON path");
    ingest->callback([&] {
        const auto res = ea::io::load_audit_csv(ing_opts.input, ing_opts.policy());
        const std::string csv = ea::io::format_audit_csv(
            res.dataset,
            ing_opts.stratum_column.empty() ? "semester" : ing_opts.stratum_column, "outcome");
        if (ing_out.empty() || ing_out == "-")
            std::cout << csv;
        else
            ea::io::write_file(ing_out, csv);
        ordered_json log;
        log["rows_kept"] = res.dataset.rows();
        log["rows_dropped"] = res.dropped_count;
        log["exclusions"] = exclusions_json(res.exclusion_log);
        if (!ing_log.empty())
            ea::io::write_file(ing_log, log.dump(2) + "\n");
        else
            std::cerr << log.dump(2) << "\n";
    });

    // ---- match -------------------------------------------------------------
    auto* match = app.add_subcommand("match", "greedy-pair algorithmically similar records");
    IngestOptions match_opts;
    match_opts.attach(match);
    int match_pairs = 100;
    double match_warn = 0.5;
    bool match_no_stratum = false;
    std::string match_out;
    match->add_option("--pairs", match_pairs, "number of pairs L")->required();
    match->add_option("--max-distance-warn", match_warn, "warn ceiling for the max distance");
    match->add_flag("--no-stratum-constraint", match_no_stratum,
                    "allow cross-stratum pairs");
    match->add_option("--out", match_out, "pair-set JSON path (default stdout)");
    match->callback([&] {
        const auto res = ea::io::load_audit_csv(match_opts.input, match_opts.policy());
        const auto scaled = ea::matching::scale_features(res.dataset);
        const auto pairs = ea::matching::greedy_pair(scaled, match_pairs, !match_no_stratum);
        const auto quality = ea::matching::match_quality_report(pairs, scaled, match_warn);
        ordered_json j;
        j["match"] = ea::pipeline::match_json(pairs, quality);
        emit(j, match_out);
    });

    // ---- audit -------------------------------------------------------------
    auto* audit = app.add_subcommand(
        "audit", "run the matched-pair action/outcome independence test family");
    IngestOptions audit_opts;
    audit_opts.attach(audit);
    int audit_pairs = 100, audit_k = 1000;
    std::uint64_t audit_seed = 0;
    double audit_alpha = 0.05, audit_warn = 0.5;
    std::string audit_direction = "both", audit_out;
    bool audit_no_bh = false, audit_no_stratum = false;
    audit->add_option("--pairs", audit_pairs, "number of pairs L")->required();
    audit->add_option("--k", audit_k, "synthetic datasets per hypothesis");
    audit->add_option("--seed", audit_seed, "random seed");
    audit->add_option("--direction", audit_direction, "both, positive, negative, or two_tailed")
        ->check(CLI::IsMember({"both", "positive", "negative", "two_tailed"}));
    audit->add_option("--alpha", audit_alpha, "significance level");
    audit->add_option("--max-distance-warn", audit_warn, "warn ceiling for the max distance");
    audit->add_flag("--no-bh", audit_no_bh, "skip the false-discovery-rate adjustment");
    audit->add_flag("--no-stratum-constraint", audit_no_stratum, "allow cross-stratum pairs");
    audit->add_option("--out", audit_out, "report JSON path (default stdout)");
    audit->callback([&] {
        ea::io::PipelineConfig cfg;
        cfg.input = audit_opts.input;
        cfg.policy = audit_opts.policy();
        cfg.pairs = audit_pairs;
        cfg.stratum_constraint = !audit_no_stratum;
        cfg.max_distance_warn = audit_warn;
        cfg.k = audit_k;
        cfg.seed = audit_seed;
        cfg.alpha = audit_alpha;
        cfg.bh = !audit_no_bh;
        cfg.directions = audit_direction;
        const ordered_json report = ea::pipeline::run_pipeline(cfg);
        emit(report, audit_out);
        std::cerr << "\n" << ea::pipeline::human_summary(report) << "\n"
                  << ea::pipeline::swap_table(report);
    });

    // ---- scm ---------------------------------------------------------------
    auto* scm_cmd = app.add_subcommand("scm", "exact model computations");
    scm_cmd->require_subcommand(1);

    auto* scm_joint = scm_cmd->add_subcommand("joint", "enumerate the exact joint distribution");
    std::string sj_model, sj_out;
    std::vector<std::string> sj_do, sj_marginal;
    scm_joint->add_option("model", sj_model, "model spec file")->required();
    scm_joint->add_option("--do", sj_do, "interventions, e.g. A=1")->delimiter(',');
    scm_joint->add_option("--marginal", sj_marginal, "variables to marginalize onto")
        ->delimiter(',');
    scm_joint->add_option("--out", sj_out, "output JSON path (default stdout)");
    scm_joint->callback([&] {
        auto model = ea::io::load_model_file(sj_model);
        if (!sj_do.empty())
            model = ea::scm::intervene(model, ea::scm::DoAssignment{parse_assignments(sj_do)});
        auto joint = ea::scm::enumerate_joint(model);
        if (!sj_marginal.empty()) joint = ea::scm::marginalize(joint, sj_marginal);
        ordered_json rows = ordered_json::array();
        for (Eigen::Index idx = 0; idx < joint.probs.size(); ++idx) {
            ordered_json r;
            for (std::size_t v = 0; v < joint.variables.size(); ++v)
                r[joint.variables[v]] = (idx >> v) & 1;
            r["probability"] = joint.probs[idx];
            rows.push_back(r);
        }
        ordered_json j;
        j["joint"] = rows;
        emit(j, sj_out);
    });

    auto* scm_audit = scm_cmd->add_subcommand("audit", "evaluate the expertise conditions");
    std::string sa_model, sa_out;
    std::vector<std::string> sa_x;
    int sa_u = 1;
    scm_audit->add_option("model", sa_model, "model spec file")->required();
    scm_audit->add_option("--x", sa_x, "feature assignment, e.g. X=1")->delimiter(',');
    scm_audit->add_option("--u", sa_u, "context value (0 or 1)");
    scm_audit->add_option("--out", sa_out, "output JSON path (default stdout)");
    scm_audit->callback([&] {
        const auto model = ea::io::load_model_file(sa_model);
        const auto x = parse_assignments(sa_x);
        const auto v = ea::expertise::check_expertly_targeted(model, x, sa_u);
        const auto impact = ea::expertise::check_impactful_action(model);
        const auto nonalg = ea::expertise::check_non_algorithmic_action(model);
        ordered_json j;
        ordered_json verdict;
        verdict["effective"] = v.effective;
        verdict["targeted"] = v.targeted;
        verdict["heterogeneous"] = v.heterogeneous;
        verdict["expertly_targeted"] = v.expertly_targeted;
        verdict["margin_effective"] = v.margin_effective;
        verdict["margin_targeted"] = v.margin_targeted;
        verdict["margin_heterogeneous"] = v.margin_heterogeneous;
        if (v.targeted_reason) verdict["targeted_reason"] = *v.targeted_reason;
        if (v.heterogeneous_reason) verdict["heterogeneous_reason"] = *v.heterogeneous_reason;
        ordered_json at;
        for (const auto& [name, value] : v.evaluated_x) at[name] = value;
        at["u"] = v.evaluated_u;
        verdict["evaluated_at"] = at;
        j["verdict"] = verdict;
        j["impactful"] = impact.holds;
        j["non_algorithmic"] = nonalg.holds;
        emit(j, sa_out);
    });

    auto* scm_check = scm_cmd->add_subcommand("check", "causal minimality and faithfulness");
    std::string sc_model, sc_out;
    scm_check->add_option("model", sc_model, "model spec file")->required();
    scm_check->add_option("--out", sc_out, "output JSON path (default stdout)");
    scm_check->callback([&] {
        const auto model = ea::io::load_model_file(sc_model);
        const auto minimality = ea::scm::check_causal_minimality(model);
        const auto faith = ea::scm::check_faithfulness(model);
        ordered_json j;
        ordered_json entries = ordered_json::array();
        for (const auto& e : minimality.entries) {
            ordered_json row;
            row["variable"] = e.variable;
            row["parent"] = e.parent;
            row["dependent"] = e.dependent;
            row["max_gap"] = e.max_gap;
            entries.push_back(row);
        }
        j["causal_minimality"] = {{"minimal", minimality.minimal}, {"checks", entries}};
        ordered_json viols = ordered_json::array();
        for (const auto& viol : faith.violations) {
            ordered_json row;
            row["x"] = viol.x;
            row["y"] = viol.y;
            row["z"] = viol.z;
            viols.push_back(row);
        }
        j["faithfulness"] = {{"faithful", faith.faithful()}, {"violations", viols}};
        emit(j, sc_out);
    });

    // ---- hte ---------------------------------------------------------------
    auto* hte_cmd = app.add_subcommand("hte", "heterogeneous-treatment-effect regressions");
    hte_cmd->require_subcommand(1);
    std::string hte_students, hte_concordance = "data/sat_act_concordance.csv", hte_out;
    bool hte_treatment_only = false;
    for (const char* name : {"advisor", "race"}) {
        auto* sub = hte_cmd->add_subcommand(name, std::string("heterogeneity by ") + name);
        sub->add_option("--students", hte_students, "student CSV file")->required();
        sub->add_option("--concordance", hte_concordance, "SAT->ACT concordance CSV");
        sub->add_option("--out", hte_out, "output JSON path");
        if (std::string(name) == "advisor")
            sub->add_flag("--treatment-only", hte_treatment_only,
                          "fit on treatment-arm students only");
        sub->callback([&, mode = std::string(name)] {
            const auto conc = ea::io::load_concordance_file(hte_concordance);
            auto loaded = ea::io::load_students_csv(hte_students, conc);
            if (mode == "advisor" && hte_treatment_only) {
                std::vector<ea::hte::StudentRecord> kept;
                for (auto& r : loaded.records)
                    if (r.treatment == 1) kept.push_back(r);
                loaded.records = std::move(kept);
            }
            const auto design = mode == "advisor"
                                    ? ea::hte::build_advisor_design(loaded.records)
                                    : ea::hte::build_race_design(loaded.records);
            const auto fit = ea::hte::fit_logistic(design);
            print_fit_table(fit, design.X.rows());
            ordered_json j = fit_json(fit);
            j["observations"] = design.X.rows();
            j["rows_dropped"] = loaded.dropped_count;
            if (mode == "race") {
                ordered_json combined = ordered_json::array();
                std::printf("\n%-12s %10s %10s %8s %8s\n", "Race", "Coef2", "Std.Err.", "z",
                            "P>|z|");
                for (const auto& ce :
                     ea::hte::combined_treatment_effects(fit, design)) {
                    ordered_json r;
                    r["race"] = ce.race;
                    r["coef"] = ce.coef;
                    r["std_err"] = ce.se;
                    r["z"] = ce.z;
                    r["p"] = ce.p;
                    combined.push_back(r);
                    std::printf("%-12s %10.4f %10.3f %8.3f %8.3f\n", ce.race.c_str(), ce.coef,
                                ce.se, ce.z, ce.p);
                }
                j["combined_effects"] = combined;
            }
            if (!hte_out.empty()) ea::io::write_file(hte_out, j.dump(2) + "\n");
        });
    }

    // ---- power -------------------------------------------------------------
    auto* power_cmd = app.add_subcommand("power", "minimum detectable effects and sample sizes");
    power_cmd->require_subcommand(1);
    double pw_alpha = 0.05, pw_power = 0.80;

    auto* power_mde = power_cmd->add_subcommand("mde", "MDE from a standard error");
    double pw_se = 0.0;
    power_mde->add_option("--se", pw_se, "standard error of the interaction coefficient")
        ->required();
    power_mde->add_option("--alpha", pw_alpha, "significance level");
    power_mde->add_option("--power", pw_power, "target power");
    power_mde->callback([&] {
        ea::power::PowerConfig cfg{pw_alpha, pw_power};
        std::printf("MDE = %.6f  (z_alpha = %.4f, z_power = %.4f)\n", ea::power::mde(pw_se, cfg),
                    cfg.z_alpha(), cfg.z_power());
    });

    auto* power_n = power_cmd->add_subcommand("samplesize", "minimum N for a target MDE");
    double pn_mde = 0.0, pn_rss = 0.0, pn_g33 = 0.0;
    int pn_params = 4;
    power_n->add_option("--mde", pn_mde, "target minimum detectable effect")->required();
    power_n->add_option("--rss", pn_rss, "residual sum of squares")->required();
    power_n->add_option("--ginv33", pn_g33, "interaction entry of (X'X)^-1")->required();
    power_n->add_option("--params", pn_params, "number of model parameters");
    power_n->add_option("--alpha", pw_alpha, "significance level");
    power_n->add_option("--power", pw_power, "target power");
    power_n->callback([&] {
        ea::power::PowerConfig cfg{pw_alpha, pw_power};
        std::printf("required N = %ld\n",
                    ea::power::required_sample_size(pn_mde, pn_rss, pn_g33, cfg, pn_params));
    });

    auto* power_table = power_cmd->add_subcommand("table", "simulated MDEs across sample sizes");
    std::vector<long> pt_ns = {745, 1000, 7000, 10000};
    double pt_treated = 0.526, pt_subgroup = 0.47, pt_baseline = 0.27;
    int pt_reps = 50;
    std::uint64_t pt_seed = 1;
    power_table->add_option("--n", pt_ns, "sample sizes")->delimiter(',');
    power_table->add_option("--treated", pt_treated, "treated share");
    power_table->add_option("--subgroup", pt_subgroup, "subgroup share");
    power_table->add_option("--baseline", pt_baseline, "baseline outcome rate");
    power_table->add_option("--replicates", pt_reps, "simulation replicates per N");
    power_table->add_option("--seed", pt_seed, "random seed");
    power_table->add_option("--alpha", pw_alpha, "significance level");
    power_table->add_option("--power", pw_power, "target power");
    power_table->callback([&] {
        ea::power::PowerConfig cfg{pw_alpha, pw_power};
        std::printf("%10s %16s %16s %8s %12s %8s\n", "Sample", "Treated share", "Subgroup share",
                    "Power", "Significance", "MDE");
        for (long n : pt_ns) {
            ea::power::MdeScenario sc;
            sc.n = n;
            sc.treated_share = pt_treated;
            sc.subgroup_share = pt_subgroup;
            sc.baseline_rate = pt_baseline;
            sc.seed = pt_seed;
            sc.replicates = pt_reps;
            const auto res = ea::power::simulated_mde(sc, cfg);
            std::printf("%10ld %15.1f%% %15.1f%% %8.2f %12.2f %7.1f%%\n", n, 100 * pt_treated,
                        100 * pt_subgroup, pw_power, pw_alpha, 100 * res.mde);
        }
    });

    // ---- actionpred --------------------------------------------------------
    auto* actionpred =
        app.add_subcommand("actionpred", "action-prediction AUCs with and without race");
    std::string ap_meetings, ap_out;
    actionpred->add_option("--meetings", ap_meetings, "meeting-level CSV file")->required();
    actionpred->add_option("--out", ap_out, "output JSON path");
    actionpred->callback([&] {
        const auto loaded = ea::io::load_meetings_csv(ap_meetings);
        std::vector<std::string> strata;
        for (const auto& r : loaded.records)
            if (std::find(strata.begin(), strata.end(), r.stratum) == strata.end())
                strata.push_back(r.stratum);
        std::sort(strata.begin(), strata.end());

        ordered_json grid = ordered_json::array();
        std::printf("%-16s", "Intervention");
        for (const auto& s : strata) std::printf(" %12s", s.c_str());
        std::printf("\n");
        for (const auto& label : loaded.action_labels) {
            ordered_json row;
            row["intervention"] = label;
            std::printf("%-16s", label.c_str());
            for (const auto& s : strata) {
                std::string cell;
                try {
                    const auto cmp =
                        ea::hte::compare_action_models(loaded.records, label, s);
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.3f/%.3f", cmp.auc_with_race,
                                  cmp.auc_without_race);
                    cell = buf;
                    row[s] = {{"auc_with_race", cmp.auc_with_race},
                              {"auc_without_race", cmp.auc_without_race}};
                } catch (const ea::SingleClass&) {
                    cell = "-/-";  // undefined with one action class
                    row[s] = nullptr;
                }
                std::printf(" %12s", cell.c_str());
            }
            std::printf("\n");
            grid.push_back(row);
        }
        if (!ap_out.empty()) {
            ordered_json j;
            j["action_prediction"] = grid;
            ea::io::write_file(ap_out, j.dump(2) + "\n");
        }
    });

    // ---- pipeline ----------------------------------------------------------
    auto* pipe = app.add_subcommand("pipeline", "run the full audit pipeline from a config file");
    std::string pp_config, pp_out, pp_summary;
    std::optional<std::uint64_t> pp_seed;
    pipe->add_option("--config", pp_config,
                     "config file (default: $EXPERTISE_AUDIT_CONFIG)");
    pipe->add_option("--out", pp_out, "override the report output path");
    pipe->add_option("--summary", pp_summary, "override the summary output path");
    pipe->add_option("--seed", pp_seed, "override the configured seed");
    pipe->callback([&] {
        std::string config_path = pp_config;
        if (config_path.empty()) {
            const char* env = std::getenv("EXPERTISE_AUDIT_CONFIG");
            if (env) config_path = env;
        }
        if (config_path.empty())
            throw ea::ValidationError(
                "no config file: pass --config or set EXPERTISE_AUDIT_CONFIG");
        ea::io::PipelineConfig cfg = ea::io::load_pipeline_config(config_path);
        if (!pp_out.empty()) cfg.out = pp_out;
        if (!pp_summary.empty()) cfg.summary = pp_summary;
        if (pp_seed) cfg.seed = *pp_seed;

        ordered_json report = ea::pipeline::run_pipeline(cfg);
        report["manifest"]["config_digest"] = ea::io::file_digest(config_path);
        emit(report, cfg.out);
        const std::string summary =
            ea::pipeline::human_summary(report) + "\n" + ea::pipeline::swap_table(report);
        if (cfg.summary.empty() || cfg.summary == "-")
            std::cerr << "\n" << summary;
        else
            ea::io::write_file(cfg.summary, summary);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag/usage problems are validation errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const expaudit::StatError& e) {
        std::cerr << "statistical error: " << e.what() << "\n";
        return 3;
    } catch (const expaudit::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
