#include "expaudit/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "expaudit/rng.hpp"

namespace expaudit::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    // Comma- or whitespace-separated list.
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what, long line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow("line " + std::to_string(line) + ": cannot parse " + what + " '" + s +
                           "' as a number");
    }
}

long parse_long(const std::string& s, const std::string& what, long line) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow("line " + std::to_string(line) + ": cannot parse " + what + " '" + s +
                           "' as an integer");
    }
}

int parse_bit(const std::string& s, const std::string& what, long line) {
    const long v = parse_long(s, what, line);
    if (v != 0 && v != 1)
        throw MalformedRow("line " + std::to_string(line) + ": " + what + " must be 0 or 1, got '" +
                           s + "'");
    return static_cast<int>(v);
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
}

std::string text_digest(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(text)));
    return std::string(buf);
}

std::string file_digest(const std::string& path) { return text_digest(read_file(path)); }

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

namespace {

struct ExprParser {
    const std::string& text;
    std::size_t pos = 0;
    const std::string& var_name;  // owner of the equation, for noise refs
    long line;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError("line " + std::to_string(line) + ": " + msg + " in equation for '" +
                              var_name + "'");
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected identifier or constant");
        return text.substr(start, pos - start);
    }

    scm::Expr parse() {
        const std::string name = ident();
        if (name == "min" || name == "max") {
            if (!consume('(')) fail("expected '(' after " + name);
            scm::Expr a = parse();
            if (!consume(',')) fail("expected ',' in " + name);
            scm::Expr b = parse();
            if (!consume(')')) fail("expected ')' closing " + name);
            return name == "min" ? scm::Expr::min_of(std::move(a), std::move(b))
                                 : scm::Expr::max_of(std::move(a), std::move(b));
        }
        if (name == "not") {
            if (!consume('(')) fail("expected '(' after not");
            scm::Expr a = parse();
            if (!consume(')')) fail("expected ')' closing not");
            return scm::Expr::complement(std::move(a));
        }
        if (name == "0") return scm::Expr::constant(0);
        if (name == "1") return scm::Expr::constant(1);
        if (name == "N" || name == "N_" + var_name) return scm::Expr::noise();
        return scm::Expr::parent(name);
    }

    scm::Expr parse_full() {
        scm::Expr e = parse();
        skip_ws();
        if (pos != text.size()) fail("trailing input '" + text.substr(pos) + "'");
        return e;
    }
};

}  // namespace

scm::ScmSpec parse_model(const std::string& text) {
    struct PendingVar {
        double noise_p = -1.0;
        std::optional<std::vector<std::string>> parents;  // explicit order for tables
        std::optional<scm::Expr> expr;
        std::optional<scm::TruthTable> table;
        long line = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, PendingVar> pending;
    std::string role_action, role_outcome, role_context;

    std::istringstream in(text);
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;

        const std::size_t sp = s.find_first_of(" \t");
        const std::string keyword = sp == std::string::npos ? s : s.substr(0, sp);
        const std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp));

        if (keyword == "var") {
            if (rest.empty()) throw ValidationError("line " + std::to_string(line) + ": var needs a name");
            if (pending.count(rest))
                throw ValidationError("line " + std::to_string(line) + ": variable '" + rest +
                                      "' declared twice");
            order.push_back(rest);
            pending[rest].line = line;
            continue;
        }

        const std::size_t eq = rest.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(line) + ": expected '=' after " + keyword);
        const std::string lhs = trim(rest.substr(0, eq));
        const std::string rhs = trim(rest.substr(eq + 1));

        if (keyword == "role") {
            if (lhs == "action") role_action = rhs;
            else if (lhs == "outcome") role_outcome = rhs;
            else if (lhs == "context") role_context = rhs;
            else
                throw ValidationError("line " + std::to_string(line) + ": unknown role '" + lhs + "'");
        } else if (keyword == "noise") {
            if (!pending.count(lhs))
                throw ValidationError("line " + std::to_string(line) + ": noise for undeclared '" +
                                      lhs + "'");
            pending[lhs].noise_p = parse_double(rhs, "noise parameter", line);
        } else if (keyword == "parents") {
            if (!pending.count(lhs))
                throw ValidationError("line " + std::to_string(line) + ": parents for undeclared '" +
                                      lhs + "'");
            pending[lhs].parents = split_ws(rhs);
        } else if (keyword == "eq") {
            if (!pending.count(lhs))
                throw ValidationError("line " + std::to_string(line) + ": equation for undeclared '" +
                                      lhs + "'");
            if (rhs.rfind("table(", 0) == 0) {
                if (rhs.back() != ')')
                    throw ValidationError("line " + std::to_string(line) + ": unterminated table");
                scm::TruthTable t;
                for (const auto& tok : split_ws(rhs.substr(6, rhs.size() - 7))) {
                    if (tok == "0") t.out.push_back(0);
                    else if (tok == "1") t.out.push_back(1);
                    else
                        throw ValidationError("line " + std::to_string(line) +
                                              ": table entries must be 0 or 1, got '" + tok + "'");
                }
                pending[lhs].table = std::move(t);
            } else {
                ExprParser p{rhs, 0, lhs, line};
                pending[lhs].expr = p.parse_full();
            }
        } else {
            throw ValidationError("line " + std::to_string(line) + ": unknown keyword '" + keyword +
                                  "'");
        }
    }

    scm::ScmBuilder b;
    for (const auto& name : order) {
        const PendingVar& pv = pending[name];
        if (pv.noise_p < 0.0)
            throw ValidationError("variable '" + name + "' has no noise parameter");
        if (pv.table) {
            if (!pv.parents)
                throw ValidationError("table equation for '" + name +
                                      "' needs an explicit parents line");
            b.variable(name, pv.noise_p, *pv.parents, *pv.table);
        } else if (pv.expr) {
            b.variable(name, pv.noise_p, *pv.expr);
        } else {
            throw ValidationError("variable '" + name + "' has no equation");
        }
    }
    if (!role_action.empty() || !role_outcome.empty() || !role_context.empty()) {
        if (role_action.empty() || role_outcome.empty())
            throw ValidationError("roles must include at least action and outcome");
        b.roles(role_action, role_outcome,
                role_context.empty() ? std::nullopt : std::optional<std::string>(role_context));
    }
    return b.build();
}

scm::ScmSpec load_model_file(const std::string& path) { return parse_model(read_file(path)); }

std::string format_model(const scm::ScmSpec& model) {
    std::ostringstream out;
    for (const auto& v : model.variables()) out << "var " << v.name << "\n";
    if (model.declared_roles()) {
        out << "role action = " << model.declared_roles()->action << "\n";
        out << "role outcome = " << model.declared_roles()->outcome << "\n";
        if (model.declared_roles()->context)
            out << "role context = " << *model.declared_roles()->context << "\n";
    }
    for (const auto& v : model.variables()) {
        out << "noise " << v.name << " = " << v.noise_p << "\n";
    }
    for (const auto& v : model.variables()) {
        if (std::holds_alternative<scm::Expr>(v.equation)) {
            out << "eq " << v.name << " = "
                << std::get<scm::Expr>(v.equation).to_string("N_" + v.name) << "\n";
        } else {
            out << "parents " << v.name << " =";
            for (const auto& p : v.parents) out << " " << p;
            out << "\n";
            out << "eq " << v.name << " = table(";
            const auto& t = std::get<scm::TruthTable>(v.equation);
            for (std::size_t i = 0; i < t.out.size(); ++i)
                out << (i ? " " : "") << static_cast<int>(t.out[i]);
            out << ")\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw MissingColumn("no column named '" + name + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& s, long line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < s.size() && s[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw MalformedRow("line " + std::to_string(line) + ": unterminated quote");
    out.push_back(field);
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (line == 1) {
            t.header = split_csv_line(raw, line);
            for (auto& h : t.header) h = trim(h);
            continue;
        }
        if (trim(raw).empty()) continue;
        auto fields = split_csv_line(raw, line);
        if (fields.size() != t.header.size())
            throw MalformedRow("line " + std::to_string(line) + ": expected " +
                               std::to_string(t.header.size()) + " fields, found " +
                               std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line);
    }
    if (t.header.empty()) throw ValidationError("CSV input has no header row");
    return t;
}

CsvTable load_csv_file(const std::string& path) { return parse_csv(read_file(path)); }

// ---------------------------------------------------------------------------
// Audit ingestion
// ---------------------------------------------------------------------------

void IngestionPolicy::validate(const std::vector<std::string>& header) const {
    if (!(gpa_threshold >= 0.0 && gpa_threshold <= 4.3))
        throw ValidationError("GPA threshold must lie in [0, 4.3]");
    const auto need = [&](const std::string& col) {
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw MissingColumn("required column '" + col + "' is absent");
    };
    for (const auto& c : drop_if_missing) need(c);
    for (const auto& c : action_columns) need(c);
    for (const auto& c : feature_columns) need(c);
    need(outcome_column);
    if (!id_column.empty()) need(id_column);
    if (!stratum_column.empty()) need(stratum_column);
    if (action_columns.empty()) throw ValidationError("at least one action column is required");
}

namespace {

bool is_summer_label(const std::string& label) {
    // Semester convention: YYYY-Fa / YYYY-Sp / YYYY-Su.
    return label.size() >= 2 && lower(label.substr(label.size() - 2)) == "su";
}

}  // namespace

IngestResult ingest_table(const CsvTable& table, const IngestionPolicy& policy) {
    policy.validate(table.header);

    const int outcome_col = table.column(policy.outcome_column);
    const int id_col = policy.id_column.empty() ? -1 : table.column(policy.id_column);
    const int stratum_col = policy.stratum_column.empty() ? -1 : table.column(policy.stratum_column);
    std::vector<int> feature_cols, action_cols, drop_cols;
    for (const auto& c : policy.feature_columns) feature_cols.push_back(table.column(c));
    for (const auto& c : policy.action_columns) action_cols.push_back(table.column(c));
    for (const auto& c : policy.drop_if_missing) drop_cols.push_back(table.column(c));

    IngestResult res;
    std::vector<std::vector<double>> features;
    std::vector<std::vector<int>> actions;
    std::vector<int> outcomes;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const long line = table.line_numbers[r];

        std::optional<std::string> drop_reason;
        for (std::size_t d = 0; d < drop_cols.size(); ++d) {
            if (row[static_cast<std::size_t>(drop_cols[d])].empty()) {
                drop_reason = "missing:" + policy.drop_if_missing[d];
                break;
            }
        }
        if (!drop_reason && stratum_col >= 0 && policy.exclude_summer &&
            is_summer_label(row[static_cast<std::size_t>(stratum_col)]))
            drop_reason = "summer";
        if (!drop_reason) {
            for (std::size_t f = 0; f < feature_cols.size(); ++f) {
                if (row[static_cast<std::size_t>(feature_cols[f])].empty()) {
                    drop_reason = "missing:" + policy.feature_columns[f];
                    break;
                }
            }
        }
        if (!drop_reason && row[static_cast<std::size_t>(outcome_col)].empty())
            drop_reason = "missing:" + policy.outcome_column;

        if (drop_reason) {
            ++res.dropped_count;
            res.exclusion_log.push_back({line, *drop_reason});
            continue;
        }

        std::vector<double> feat(feature_cols.size());
        for (std::size_t f = 0; f < feature_cols.size(); ++f)
            feat[f] = parse_double(row[static_cast<std::size_t>(feature_cols[f])],
                                   "feature '" + policy.feature_columns[f] + "'", line);
        std::vector<int> act(action_cols.size());
        for (std::size_t a = 0; a < action_cols.size(); ++a)
            act[a] = parse_bit(row[static_cast<std::size_t>(action_cols[a])],
                               "action '" + policy.action_columns[a] + "'", line);
        int y;
        if (policy.outcome_is_gpa) {
            const double gpa = parse_double(row[static_cast<std::size_t>(outcome_col)],
                                            "outcome '" + policy.outcome_column + "'", line);
            y = gpa >= policy.gpa_threshold ? 1 : 0;  // threshold is inclusive
        } else {
            y = parse_bit(row[static_cast<std::size_t>(outcome_col)],
                          "outcome '" + policy.outcome_column + "'", line);
        }

        features.push_back(std::move(feat));
        actions.push_back(std::move(act));
        outcomes.push_back(y);
        if (id_col >= 0) res.dataset.ids.push_back(row[static_cast<std::size_t>(id_col)]);
        if (stratum_col >= 0)
            res.dataset.strata.push_back(row[static_cast<std::size_t>(stratum_col)]);
    }

    const auto n = static_cast<Eigen::Index>(features.size());
    res.dataset.feature_names = policy.feature_columns;
    res.dataset.action_names = policy.action_columns;
    res.dataset.features.resize(n, static_cast<Eigen::Index>(policy.feature_columns.size()));
    res.dataset.actions.resize(n, static_cast<Eigen::Index>(policy.action_columns.size()));
    res.dataset.outcomes.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < res.dataset.features.cols(); ++c)
            res.dataset.features(i, c) =
                features[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        for (Eigen::Index c = 0; c < res.dataset.actions.cols(); ++c)
            res.dataset.actions(i, c) =
                actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        res.dataset.outcomes[i] = outcomes[static_cast<std::size_t>(i)];
    }
    res.dataset.validate();
    return res;
}

IngestResult load_audit_csv(const std::string& path, const IngestionPolicy& policy) {
    return ingest_table(load_csv_file(path), policy);
}

// ---------------------------------------------------------------------------
// Synthetic sampling
// ---------------------------------------------------------------------------

AuditDataset sample_from_scm(const scm::ScmSpec& model, long n, std::uint64_t seed,
                             bool include_context) {
    if (n < 1) throw ValidationError("sample size must be positive");
    const scm::VariableRoles roles = model.roles();
    const int action_idx = model.index_of(roles.action);
    const int outcome_idx = model.index_of(roles.outcome);
    const int context_idx =
        roles.context && model.find(*roles.context) ? model.index_of(*roles.context) : -1;

    AuditDataset ds;
    std::vector<int> feature_idx;
    for (const auto& v : model.variables()) {
        const int idx = model.index_of(v.name);
        if (idx == action_idx || idx == outcome_idx) continue;
        if (idx == context_idx && !include_context) continue;
        feature_idx.push_back(idx);
        ds.feature_names.push_back(v.name);
    }
    ds.action_names = {roles.action};

    ds.features.resize(n, static_cast<Eigen::Index>(feature_idx.size()));
    ds.actions.resize(n, 1);
    ds.outcomes.resize(n);
    ds.ids.reserve(static_cast<std::size_t>(n));

    for (long i = 0; i < n; ++i) {
        CounterRng rng(seed, "simulate", static_cast<std::uint64_t>(i));
        std::uint32_t noise_bits = 0;
        for (std::size_t v = 0; v < model.size(); ++v) {
            const double p = model.variables()[v].noise_p;
            if (rng.next_unit() < p) noise_bits |= 1u << v;
        }
        const std::vector<int> values = model.evaluate(noise_bits);
        for (std::size_t f = 0; f < feature_idx.size(); ++f)
            ds.features(i, static_cast<Eigen::Index>(f)) =
                values[static_cast<std::size_t>(feature_idx[f])];
        ds.actions(i, 0) = values[static_cast<std::size_t>(action_idx)];
        ds.outcomes[i] = values[static_cast<std::size_t>(outcome_idx)];
        char buf[24];
        std::snprintf(buf, sizeof buf, "r%06ld", i);
        ds.ids.emplace_back(buf);
    }
    return ds;
}

std::string format_audit_csv(const AuditDataset& dataset, const std::string& stratum_name,
                             const std::string& outcome_name) {
    std::ostringstream out;
    const bool has_strata = !dataset.strata.empty();
    out << "id";
    if (has_strata) out << "," << stratum_name;
    for (const auto& f : dataset.feature_names) out << "," << f;
    for (const auto& a : dataset.action_names) out << "," << a;
    out << "," << outcome_name << "\n";

    for (Eigen::Index i = 0; i < dataset.rows(); ++i) {
        out << (dataset.ids.empty() ? "r" + std::to_string(i)
                                    : dataset.ids[static_cast<std::size_t>(i)]);
        if (has_strata) out << "," << dataset.strata[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
            const double v = dataset.features(i, c);
            if (v == std::floor(v) && std::abs(v) < 1e15) {
                out << "," << static_cast<long long>(v);
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "," << buf;
            }
        }
        for (Eigen::Index c = 0; c < dataset.actions.cols(); ++c)
            out << "," << dataset.actions(i, c);
        out << "," << dataset.outcomes[i] << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Student / meeting tables
// ---------------------------------------------------------------------------

std::vector<ConcordanceRow> load_concordance_file(const std::string& path) {
    const CsvTable t = parse_csv(read_file(path));
    const int lo = t.column("sat_low");
    const int hi = t.column("sat_high");
    const int act = t.column("act");
    std::vector<ConcordanceRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        ConcordanceRow row;
        row.sat_low = parse_double(t.rows[r][static_cast<std::size_t>(lo)], "sat_low",
                                   t.line_numbers[r]);
        row.sat_high = parse_double(t.rows[r][static_cast<std::size_t>(hi)], "sat_high",
                                    t.line_numbers[r]);
        row.act = parse_double(t.rows[r][static_cast<std::size_t>(act)], "act", t.line_numbers[r]);
        out.push_back(row);
    }
    return out;
}

std::optional<double> sat_to_act(double sat, const std::vector<ConcordanceRow>& table) {
    for (const auto& row : table)
        if (sat >= row.sat_low && sat <= row.sat_high) return row.act;
    return std::nullopt;
}

StudentIngestResult load_students_csv(const std::string& path,
                                      const std::vector<ConcordanceRow>& concordance) {
    const CsvTable t = load_csv_file(path);
    const int id = t.column("id");
    const int treatment = t.column("treatment");
    const int graduated = t.column("graduated");
    const int gender = t.column("gender");
    const int race = t.column("race");
    const int act = t.column("act");
    const int sat = t.column("sat");
    const int efc = t.column("efc");
    const int hours = t.column("hours_other");
    std::vector<int> advisor_cols;
    for (int j = 1;; ++j) {
        const std::string name = "meetings_advisor_" + std::to_string(j);
        if (std::find(t.header.begin(), t.header.end(), name) == t.header.end()) break;
        advisor_cols.push_back(t.column(name));
    }

    StudentIngestResult res;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const long line = t.line_numbers[r];
        const auto field = [&](int c) { return row[static_cast<std::size_t>(c)]; };

        std::optional<std::string> drop;
        if (field(race).empty()) drop = "missing:race";
        else if (field(efc).empty()) drop = "missing:efc";
        else if (field(hours).empty()) drop = "missing:hours_other";
        else if (field(act).empty() && field(sat).empty()) drop = "missing:act";

        hte::StudentRecord rec;
        if (!drop) {
            rec.id = field(id);
            rec.treatment = parse_bit(field(treatment), "treatment", line);
            rec.graduated = parse_bit(field(graduated), "graduated", line);
            rec.gender = parse_bit(field(gender), "gender", line);
            rec.race = lower(field(race));
            rec.efc = parse_double(field(efc), "efc", line);
            rec.hours_other = parse_double(field(hours), "hours_other", line);
            if (!field(act).empty()) {
                rec.act = parse_double(field(act), "act", line);
            } else {
                const double sat_score = parse_double(field(sat), "sat", line);
                const auto converted = sat_to_act(sat_score, concordance);
                if (!converted) drop = "unconvertible:sat";
                else rec.act = *converted;
            }
            for (int c : advisor_cols) {
                const std::string v = field(c);
                rec.advisor_meetings.push_back(
                    v.empty() ? 0 : static_cast<int>(parse_long(v, "advisor meetings", line)));
            }
        }

        if (drop) {
            ++res.dropped_count;
            res.exclusion_log.push_back({line, *drop});
        } else {
            res.records.push_back(std::move(rec));
        }
    }
    return res;
}

MeetingIngestResult load_meetings_csv(const std::string& path) {
    const CsvTable t = load_csv_file(path);
    const int semester = t.column("semester");
    const int treatment = t.column("treatment");
    const int gender = t.column("gender");
    const int race = t.column("race");
    const int act = t.column("act");
    const int efc = t.column("efc");
    const int hours = t.column("hours_other");

    MeetingIngestResult res;
    std::vector<int> action_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (t.header[c].rfind("action_", 0) == 0) {
            action_cols.push_back(static_cast<int>(c));
            res.action_labels.push_back(t.header[c].substr(7));
        }
    }
    if (action_cols.empty()) throw MissingColumn("no action_* columns found");

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const long line = t.line_numbers[r];
        const auto field = [&](int c) { return row[static_cast<std::size_t>(c)]; };

        if (field(race).empty() || field(act).empty() || field(efc).empty() ||
            field(hours).empty()) {
            ++res.dropped_count;
            res.exclusion_log.push_back({line, "missing:baseline"});
            continue;
        }

        hte::MeetingRecord rec;
        rec.stratum = field(semester);
        rec.treatment = parse_bit(field(treatment), "treatment", line);
        rec.gender = parse_bit(field(gender), "gender", line);
        rec.race = lower(field(race));
        rec.act = parse_double(field(act), "act", line);
        rec.efc = parse_double(field(efc), "efc", line);
        rec.hours_other = parse_double(field(hours), "hours_other", line);
        for (std::size_t a = 0; a < action_cols.size(); ++a)
            rec.actions[res.action_labels[a]] =
                parse_bit(field(action_cols[a]), "action", line);
        res.records.push_back(std::move(rec));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Pipeline config
// ---------------------------------------------------------------------------

PipelineConfig parse_pipeline_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    long line = 0;
    bool policy_drop_set = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ValidationError("line " + std::to_string(line) + ": unterminated section");
            section = s.substr(1, s.size() - 2);
            if (section != "ingest" && section != "match" && section != "test" &&
                section != "report")
                throw ValidationError("line " + std::to_string(line) + ": unknown section [" +
                                      section + "]");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto as_bool = [&]() {
            const std::string v = lower(value);
            if (v == "true" || v == "1" || v == "yes") return true;
            if (v == "false" || v == "0" || v == "no") return false;
            throw ValidationError("line " + std::to_string(line) + ": key '" + key +
                                  "' expects a boolean, got '" + value + "'");
        };

        if (section == "ingest") {
            if (key == "input") cfg.input = value;
            else if (key == "id_column") cfg.policy.id_column = value;
            else if (key == "action_columns") cfg.policy.action_columns = split_list(value);
            else if (key == "outcome_column") cfg.policy.outcome_column = value;
            else if (key == "outcome_kind") {
                if (value == "gpa") cfg.policy.outcome_is_gpa = true;
                else if (value == "binary") cfg.policy.outcome_is_gpa = false;
                else
                    throw ValidationError("line " + std::to_string(line) +
                                          ": outcome_kind must be gpa or binary");
            } else if (key == "gpa_threshold")
                cfg.policy.gpa_threshold = parse_double(value, "gpa_threshold", line);
            else if (key == "stratum_column") cfg.policy.stratum_column = value;
            else if (key == "feature_columns") cfg.policy.feature_columns = split_list(value);
            else if (key == "drop_if_missing") {
                cfg.policy.drop_if_missing = split_list(value);
                policy_drop_set = true;
            } else if (key == "exclude_summer") cfg.policy.exclude_summer = as_bool();
            else
                throw ValidationError("line " + std::to_string(line) + ": unknown key '" + key +
                                      "' in [ingest]");
        } else if (section == "match") {
            if (key == "pairs") cfg.pairs = static_cast<int>(parse_long(value, "pairs", line));
            else if (key == "stratum_constraint") cfg.stratum_constraint = as_bool();
            else if (key == "max_distance_warn")
                cfg.max_distance_warn = parse_double(value, "max_distance_warn", line);
            else
                throw ValidationError("line " + std::to_string(line) + ": unknown key '" + key +
                                      "' in [match]");
        } else if (section == "test") {
            if (key == "k") cfg.k = static_cast<int>(parse_long(value, "k", line));
            else if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(parse_long(value, "seed", line));
            else if (key == "alpha") cfg.alpha = parse_double(value, "alpha", line);
            else if (key == "bh") cfg.bh = as_bool();
            else if (key == "directions") {
                if (value != "both" && value != "positive" && value != "negative" &&
                    value != "two_tailed")
                    throw ValidationError("line " + std::to_string(line) +
                                          ": directions must be both, positive, negative, or "
                                          "two_tailed");
                cfg.directions = value;
            } else
                throw ValidationError("line " + std::to_string(line) + ": unknown key '" + key +
                                      "' in [test]");
        } else if (section == "report") {
            if (key == "out") cfg.out = value;
            else if (key == "summary") cfg.summary = value;
            else
                throw ValidationError("line " + std::to_string(line) + ": unknown key '" + key +
                                      "' in [report]");
        } else {
            throw ValidationError("line " + std::to_string(line) + ": key '" + key +
                                  "' outside any section");
        }
    }
    if (cfg.input.empty()) throw ValidationError("config is missing [ingest] input");
    if (!policy_drop_set) cfg.policy.drop_if_missing.clear();  // synthetic schemas rarely carry them
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    return parse_pipeline_config(read_file(path));
}

}  // namespace expaudit::io
