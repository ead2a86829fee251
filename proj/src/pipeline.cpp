#include "expaudit/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace expaudit::pipeline {

using expert_test::Direction;
using expert_test::FamilyResult;
using expert_test::TestConfig;
using nlohmann::ordered_json;

namespace {

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<Direction> directions_from(const std::string& s) {
    if (s == "both") return {Direction::positive, Direction::negative};
    if (s == "positive") return {Direction::positive};
    if (s == "negative") return {Direction::negative};
    if (s == "two_tailed") return {Direction::two_tailed};
    throw ValidationError("unknown directions value '" + s + "'");
}

}  // namespace

ordered_json match_json(const matching::PairSet& pairs,
                        const matching::MatchQualityReport& quality) {
    ordered_json j;
    j["pair_count"] = pairs.pairs.size();
    j["max_distance"] = quality.max_distance;
    j["warn_ceiling"] = quality.warn_ceiling;
    j["ceiling_exceeded"] = quality.ceiling_exceeded;
    ordered_json feats = ordered_json::array();
    for (const auto& f : quality.per_feature) {
        ordered_json e;
        e["feature"] = f.name;
        e["min_abs_diff"] = f.min;
        e["median_abs_diff"] = f.median;
        e["max_abs_diff"] = f.max;
        feats.push_back(e);
    }
    j["per_feature"] = feats;
    ordered_json plist = ordered_json::array();
    for (const auto& p : pairs.pairs) plist.push_back({p.i, p.j, p.distance});
    j["pairs"] = plist;
    return j;
}

ordered_json family_json(const FamilyResult& family,
                         const std::vector<std::string>& action_names, int k) {
    ordered_json j;
    j["k"] = k;
    j["alpha"] = family.alpha;
    j["bh_applied"] = family.bh_applied;
    j["min_attainable_p"] = 1.0 / (k + 1);
    ordered_json hyps = ordered_json::array();
    for (const auto& h : family.hypotheses) {
        ordered_json e;
        e["label"] = h.label;
        e["direction"] = expert_test::direction_name(h.direction);
        e["j"] = h.result.j;
        e["k"] = h.result.k;
        e["tau"] = h.result.tau;
        e["raw_p"] = h.result.raw_p;
        e["adjusted_p"] = h.adjusted_p;
        e["significant"] = h.significant;
        e["mse_original"] = h.result.mse_original;
        e["mse_synth_min"] = h.result.mse_synth_min;
        e["mse_synth_median"] = h.result.mse_synth_median;
        e["mse_synth_max"] = h.result.mse_synth_max;
        hyps.push_back(e);
    }
    j["hypotheses"] = hyps;
    ordered_json diags = ordered_json::array();
    for (std::size_t i = 0; i < family.diagnostics.size(); ++i) {
        const auto& d = family.diagnostics[i];
        ordered_json e;
        e["action"] = i < action_names.size() ? action_names[i] : std::to_string(i);
        e["count"] = d.action_count;
        e["could_decrease"] = d.could_decrease;
        e["could_increase"] = d.could_increase;
        e["neutral"] = d.neutral;
        diags.push_back(e);
    }
    j["swap_diagnostics"] = diags;
    return j;
}

ordered_json run_pipeline(const io::PipelineConfig& config) {
    const io::IngestResult ingest = io::load_audit_csv(config.input, config.policy);
    const AuditDataset scaled = matching::scale_features(ingest.dataset);
    const matching::PairSet pairs =
        matching::greedy_pair(scaled, config.pairs, config.stratum_constraint);
    const matching::MatchQualityReport quality =
        matching::match_quality_report(pairs, scaled, config.max_distance_warn);

    TestConfig base;
    base.k = config.k;
    base.seed = config.seed;
    base.alpha = config.alpha;

    FamilyResult family;
    family.alpha = config.alpha;
    family.bh_applied = config.bh;
    const std::vector<Direction> dirs = directions_from(config.directions);
    if (dirs.size() == 2) {
        family = expert_test::run_family(scaled, pairs, base, config.bh);
    } else {
        for (std::size_t c = 0; c < scaled.action_names.size(); ++c) {
            TestConfig cfg = base;
            cfg.direction = dirs[0];
            const char* suffix = dirs[0] == Direction::positive   ? "+"
                                 : dirs[0] == Direction::negative ? "-"
                                                                  : "~";
            cfg.label = scaled.action_names[c] + suffix;
            expert_test::HypothesisOutcome h;
            h.label = cfg.label;
            h.direction = dirs[0];
            h.result = expert_test::run_expert_test(scaled, pairs, cfg, static_cast<int>(c));
            family.hypotheses.push_back(std::move(h));
            family.diagnostics.push_back(expert_test::swap_diagnostics(
                scaled.actions.col(static_cast<Eigen::Index>(c)), scaled.outcomes, pairs));
        }
        std::vector<double> raw;
        for (const auto& h : family.hypotheses) raw.push_back(h.result.raw_p);
        const std::vector<double> adj =
            config.bh ? expert_test::benjamini_hochberg(raw) : raw;
        for (std::size_t i = 0; i < family.hypotheses.size(); ++i) {
            family.hypotheses[i].adjusted_p = adj[i];
            family.hypotheses[i].significant = adj[i] < config.alpha;
        }
    }

    ordered_json report;
    ordered_json manifest;
    manifest["version"] = io::kVersion;
    manifest["seed"] = config.seed;
    manifest["input_digest"] = io::file_digest(config.input);
    report["manifest"] = manifest;

    ordered_json ing;
    ing["input"] = config.input;
    ing["rows_kept"] = ingest.dataset.rows();
    ing["rows_dropped"] = ingest.dropped_count;
    ordered_json excl = ordered_json::array();
    for (const auto& e : ingest.exclusion_log) {
        ordered_json entry;
        entry["line"] = e.line;
        entry["reason"] = e.reason;
        excl.push_back(entry);
    }
    ing["exclusions"] = excl;
    ing["outcome_column"] = config.policy.outcome_column;
    if (config.policy.outcome_is_gpa) ing["gpa_threshold"] = config.policy.gpa_threshold;
    report["ingest"] = ing;

    report["match"] = match_json(pairs, quality);
    report["test"] = family_json(family, scaled.action_names, config.k);
    report["directions"] = config.directions;
    return report;
}

std::string human_summary(const ordered_json& report) {
    // One row per action, one column per direction, in the published layout:
    // adjusted p-values with a star when below alpha.
    const auto& test = report.at("test");
    const double alpha = test.at("alpha").get<double>();

    std::vector<std::string> actions;
    std::vector<std::string> dirs;
    for (const auto& h : test.at("hypotheses")) {
        const std::string label = h.at("label").get<std::string>();
        const std::string action = label.substr(0, label.size() - 1);
        const std::string dir = h.at("direction").get<std::string>();
        if (std::find(actions.begin(), actions.end(), action) == actions.end())
            actions.push_back(action);
        if (std::find(dirs.begin(), dirs.end(), dir) == dirs.end()) dirs.push_back(dir);
    }

    std::ostringstream out;
    const int first_w = 24;
    out << std::string("Intervention").append(first_w - 12, ' ');
    for (const auto& d : dirs) {
        const std::string head = d == "positive" ? "(+)" : d == "negative" ? "(-)" : "(~)";
        out << "  " << head << std::string(10, ' ');
    }
    out << "\n";
    for (const auto& a : actions) {
        std::string row = a;
        if (row.size() < static_cast<std::size_t>(first_w))
            row.append(static_cast<std::size_t>(first_w) - row.size(), ' ');
        out << row;
        for (const auto& d : dirs) {
            for (const auto& h : test.at("hypotheses")) {
                if (h.at("direction") != d) continue;
                const std::string label = h.at("label").get<std::string>();
                if (label.substr(0, label.size() - 1) != a) continue;
                const double adj = h.at("adjusted_p").get<double>();
                std::string cell = fixed6(adj);
                cell += h.at("significant").get<bool>() ? "*" : " ";
                out << "  " << cell << "   ";
            }
        }
        out << "\n";
    }
    out << "\n(*) adjusted p < " << fixed6(alpha).substr(0, 4)
        << "; smallest attainable raw p = "
        << fixed6(test.at("min_attainable_p").get<double>()) << "\n";
    return out.str();
}

std::string swap_table(const ordered_json& report) {
    const auto& diags = report.at("test").at("swap_diagnostics");
    std::ostringstream out;
    out << "Intervention              Count   vMSE   ^MSE   neutral\n";
    for (const auto& d : diags) {
        std::string name = d.at("action").get<std::string>();
        if (name.size() < 24) name.append(24 - name.size(), ' ');
        char buf[64];
        std::snprintf(buf, sizeof buf, "  %5ld  %5ld  %5ld  %6ld",
                      d.at("count").get<long>(), d.at("could_decrease").get<long>(),
                      d.at("could_increase").get<long>(), d.at("neutral").get<long>());
        out << name << buf << "\n";
    }
    return out.str();
}

}  // namespace expaudit::pipeline
