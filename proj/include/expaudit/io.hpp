#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expaudit/dataset.hpp"
#include "expaudit/hte.hpp"
#include "expaudit/scm.hpp"

namespace expaudit::io {

inline constexpr const char* kVersion = "expertise-audit 0.1.0";

// ---------------------------------------------------------------------------
// Model specification files
//
// Plain-text key-value lines; '#' starts a comment. Example:
//
//   var U
//   var A
//   var Y
//   role action = A
//   role outcome = Y
//   role context = U
//   noise U = 0.5
//   noise A = 0.5
//   noise Y = 0.5
//   eq U = N_U
//   eq A = max(U, N_A)
//   eq Y = min(A, max(U, N_Y))
//
// Equations use prefix notation over min, max, not (the 1-x complement),
// constants 0/1, parent names, and the variable's own noise (N or N_<name>).
// Truth-table equations need an explicit parent order:
//
//   parents Y = A U
//   eq Y = table(0 1 1 0 1 0 0 1)
//
// with entries indexed by the parent bits (first parent most significant)
// followed by the noise bit.
// ---------------------------------------------------------------------------
scm::ScmSpec parse_model(const std::string& text);
scm::ScmSpec load_model_file(const std::string& path);
std::string format_model(const scm::ScmSpec& model);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> line_numbers;  // 1-based source lines, one per row

    int column(const std::string& name) const;  // throws MissingColumn
};

CsvTable parse_csv(const std::string& text);
CsvTable load_csv_file(const std::string& path);

// ---------------------------------------------------------------------------
// Audit-dataset ingestion
// ---------------------------------------------------------------------------
struct IngestionPolicy {
    // Rows missing any of these columns are dropped (value empty).
    std::vector<std::string> drop_if_missing = {"transfer_status", "hs_gpa", "efc"};
    bool exclude_summer = true;        // strata labeled *-Su
    double gpa_threshold = 3.5;        // outcome bit = (gpa >= threshold)
    std::string stratum_column = "semester";  // empty = no strata
    std::string id_column = "id";
    std::vector<std::string> action_columns = {"action"};
    std::string outcome_column = "gpa";
    bool outcome_is_gpa = true;        // false: outcome column already 0/1
    std::vector<std::string> feature_columns;

    void validate(const std::vector<std::string>& header) const;
};

struct ExclusionEntry {
    long line = 0;
    std::string reason;  // e.g. "missing:efc", "summer"
};

struct IngestResult {
    AuditDataset dataset;
    long dropped_count = 0;
    std::vector<ExclusionEntry> exclusion_log;
};

IngestResult load_audit_csv(const std::string& path, const IngestionPolicy& policy);
IngestResult ingest_table(const CsvTable& table, const IngestionPolicy& policy);

// ---------------------------------------------------------------------------
// Synthetic sampling
// ---------------------------------------------------------------------------
// Independent draws from the model: per record, sample every noise bit from
// the counter stream keyed by (seed, "simulate", record index), then evaluate
// equations in topological order. Feature columns are the non-role variables;
// the context variable stays hidden unless `include_context` is set.
AuditDataset sample_from_scm(const scm::ScmSpec& model, long n, std::uint64_t seed,
                             bool include_context = false);

// ---------------------------------------------------------------------------
// Student / meeting tables for the regression commands
// ---------------------------------------------------------------------------
struct ConcordanceRow {
    double sat_low = 0.0;
    double sat_high = 0.0;
    double act = 0.0;
};

std::vector<ConcordanceRow> load_concordance_file(const std::string& path);
std::optional<double> sat_to_act(double sat, const std::vector<ConcordanceRow>& table);

struct StudentIngestResult {
    std::vector<hte::StudentRecord> records;
    long dropped_count = 0;
    std::vector<ExclusionEntry> exclusion_log;
};

// Columns: id, treatment, graduated, gender, race, act, sat, efc, hours_other,
// meetings_advisor_1..meetings_advisor_<J>. Missing ACT scores are converted
// from SAT via the concordance table; rows that stay unresolvable are dropped
// with a reason.
StudentIngestResult load_students_csv(const std::string& path,
                                      const std::vector<ConcordanceRow>& concordance);

struct MeetingIngestResult {
    std::vector<hte::MeetingRecord> records;
    std::vector<std::string> action_labels;
    long dropped_count = 0;
    std::vector<ExclusionEntry> exclusion_log;
};

// Columns: semester, treatment, gender, race, act, efc, hours_other, and one
// action_<label> column per intervention.
MeetingIngestResult load_meetings_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Pipeline configuration (flat key-value file with [sections])
// ---------------------------------------------------------------------------
struct PipelineConfig {
    // [ingest]
    std::string input;
    IngestionPolicy policy;
    // [match]
    int pairs = 100;
    bool stratum_constraint = true;
    double max_distance_warn = 0.5;
    // [test]
    int k = 1000;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    bool bh = true;
    std::string directions = "both";  // both | positive | negative | two_tailed
    // [report]
    std::string out;           // machine-readable report path; empty = stdout
    std::string summary = "-"; // human summary path; "-" = stdout
};

PipelineConfig parse_pipeline_config(const std::string& text);
PipelineConfig load_pipeline_config(const std::string& path);

// Renders a dataset back to CSV: id, stratum (when present), features,
// actions, outcome. Round-trips through ingest_table with outcome_kind
// binary.
std::string format_audit_csv(const AuditDataset& dataset,
                             const std::string& stratum_name = "semester",
                             const std::string& outcome_name = "outcome");

// FNV-1a digest of a file's bytes, as fixed-width hex; used in run manifests.
std::string file_digest(const std::string& path);
std::string text_digest(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace expaudit::io
