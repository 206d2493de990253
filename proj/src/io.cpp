#include "softmdp/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace softmdp {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string digest_hex(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// MDP document parsing
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

double as_real(const json& j, const std::string& what) {
    if (!j.is_number()) throw ParseError(what + " must be a number");
    return j.get<double>();
}

std::vector<double> as_real_vector(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_real(j[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> as_real_matrix(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " must be an array");
    std::vector<std::vector<double>> out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_real_vector(j[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace

MdpDocument parse_mdp_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top level must be an object");

    for (const char* field : {"num_states", "num_actions", "gamma", "rewards", "transitions"}) {
        if (!j.contains(field)) throw ParseError(std::string("missing field: ") + field);
    }

    MdpDocument doc;
    if (!j["num_states"].is_number_integer()) throw ParseError("num_states must be an integer");
    if (!j["num_actions"].is_number_integer()) throw ParseError("num_actions must be an integer");
    doc.mdp.num_states = j["num_states"].get<int>();
    doc.mdp.num_actions = j["num_actions"].get<int>();
    doc.mdp.gamma = as_real(j["gamma"], "gamma");
    doc.mdp.rewards = as_real_matrix(j["rewards"], "rewards");

    const json& trans = j["transitions"];
    if (!trans.is_array()) throw ParseError("transitions must be an array");
    doc.mdp.transitions.reserve(trans.size());
    for (size_t s = 0; s < trans.size(); ++s) {
        doc.mdp.transitions.push_back(
            as_real_matrix(trans[s], "transitions[" + std::to_string(s) + "]"));
    }

    if (j.contains("initial_distribution")) {
        doc.initial_distribution = as_real_vector(j["initial_distribution"], "initial_distribution");
    }
    if (j.contains("prior_policy")) {
        Policy prior;
        prior.probs = as_real_matrix(j["prior_policy"], "prior_policy");
        doc.prior_policy = std::move(prior);
    }
    return doc;
}

MdpDocument parse_mdp_file(const std::string& path) {
    return parse_mdp_text(read_file(path));
}

// ---------------------------------------------------------------------------
// Canonical JSON emission
// ---------------------------------------------------------------------------

void JsonWriter::newline_indent() {
    out_ += '\n';
    out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::prepare_slot() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (stack_.empty()) return;
    Frame& top = stack_.back();
    if (!top.first) out_ += ',';
    if (top.kind == '[' && top.inline_elements) {
        if (!top.first) out_ += ' ';
    } else {
        newline_indent();
    }
    top.first = false;
}

JsonWriter& JsonWriter::begin_object() {
    prepare_slot();
    out_ += '{';
    stack_.push_back({'{'});
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    const bool empty = stack_.back().first;
    stack_.pop_back();
    if (!empty) newline_indent();
    out_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array(bool inline_elements) {
    prepare_slot();
    out_ += '[';
    stack_.push_back({'[', true, inline_elements});
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    const Frame frame = stack_.back();
    stack_.pop_back();
    if (!frame.first && !frame.inline_elements) newline_indent();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
    prepare_slot();
    out_ += '"';
    out_ += name;
    out_ += "\": ";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    prepare_slot();
    out_ += format_real(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    prepare_slot();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(long v) {
    prepare_slot();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(uint64_t v) {
    prepare_slot();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    prepare_slot();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
    prepare_slot();
    out_ += '"';
    for (char c : v) {
        switch (c) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\t': out_ += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out_ += buf;
                } else {
                    out_ += c;
                }
        }
    }
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value_row(const std::vector<double>& row) {
    begin_array(true);
    for (double v : row) value(v);
    end_array();
    return *this;
}

std::string write_mdp_text(const MdpDocument& doc) {
    JsonWriter w;
    w.begin_object();
    w.key("num_states").value(doc.mdp.num_states);
    w.key("num_actions").value(doc.mdp.num_actions);
    w.key("gamma").value(doc.mdp.gamma);
    w.key("rewards").begin_array();
    for (const auto& row : doc.mdp.rewards) w.value_row(row);
    w.end_array();
    w.key("transitions").begin_array();
    for (const auto& per_state : doc.mdp.transitions) {
        w.begin_array();
        for (const auto& row : per_state) w.value_row(row);
        w.end_array();
    }
    w.end_array();
    if (doc.initial_distribution) {
        w.key("initial_distribution").value_row(*doc.initial_distribution);
    }
    if (doc.prior_policy) {
        w.key("prior_policy").begin_array();
        for (const auto& row : doc.prior_policy->probs) w.value_row(row);
        w.end_array();
    }
    w.end_object();
    return w.str() + "\n";
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

namespace {

void emit_provenance(JsonWriter& w, const Provenance& prov) {
    w.key("artifact").value(std::string_view(kArtifactName));
    w.key("version").value(std::string_view(kArtifactVersion));
    if (!prov.timestamp.empty()) w.key("timestamp").value(std::string_view(prov.timestamp));
    w.key("input_digest").value(std::string_view(prov.input_digest));
    if (prov.seed) w.key("seed").value(*prov.seed);
}

void emit_config(JsonWriter& w, const SolveConfig& config) {
    w.key("config").begin_object();
    w.key("tolerance").value(config.tolerance);
    w.key("max_iterations").value(config.max_iterations);
    w.key("evaluation_mode")
        .value(std::string_view(config.evaluation_mode == EvalMode::Iterative ? "iterative" : "exact"));
    w.key("record_trace").value(config.record_trace);
    w.end_object();
}

}  // namespace

std::string write_solve_report(const SolveReport& report, const std::string& method,
                               const std::string& reg_name, double eta,
                               const SolveConfig& config, const Provenance& prov) {
    JsonWriter w;
    w.begin_object();
    emit_provenance(w, prov);
    w.key("command").value(std::string_view("solve"));
    w.key("method").value(std::string_view(method));
    w.key("regularizer").value(std::string_view(reg_name));
    if (reg_name != "none") w.key("eta").value(eta);
    emit_config(w, config);
    w.key("result").begin_object();
    w.key("converged").value(report.converged);
    w.key("iterations").value(report.iterations);
    w.key("final_residual").value(report.final_residual);
    w.key("v").value_row(report.fixed_point_v.v);
    w.key("q").begin_array();
    for (const auto& row : report.fixed_point_q.q) w.value_row(row);
    w.end_array();
    w.key("policy").begin_array();
    for (const auto& row : report.policy.probs) w.value_row(row);
    w.end_array();
    if (!report.trace.empty()) w.key("trace").value_row(report.trace);
    w.end_object();
    w.end_object();
    return w.str() + "\n";
}

std::string write_compare_report(const std::vector<CompareRow>& rows, const SweepSummary& summary,
                                 double threshold, const SolveConfig& config,
                                 const Provenance& prov) {
    JsonWriter w;
    w.begin_object();
    emit_provenance(w, prov);
    w.key("command").value(std::string_view("compare"));
    w.key("threshold").value(threshold);
    emit_config(w, config);
    w.key("instances").begin_array();
    for (const auto& row : rows) {
        w.begin_object();
        w.key("instance_id").value(std::string_view(row.instance_id));
        w.key("num_states").value(row.num_states);
        w.key("num_actions").value(row.num_actions);
        w.key("gamma").value(row.gamma);
        w.key("eta").value(row.eta);
        w.key("regularizer").value(std::string_view(row.reg));
        w.key("q_gap").value(row.report.q_gap);
        w.key("v_gap").value(row.report.v_gap);
        w.key("policy_gap").value(row.report.policy_gap);
        w.key("vi_iterations").value(row.report.vi_iterations);
        w.key("spi_iterations").value(row.report.spi_iterations);
        w.key("v_dominance_excess").value(row.report.v_dominance_excess);
        w.key("verdict").value(std::string_view(row.report.pass ? "pass" : "fail"));
        if (!row.report.failure_reason.empty()) {
            w.key("failure_reason").value(std::string_view(row.report.failure_reason));
        }
        w.end_object();
    }
    w.end_array();
    w.key("summary").begin_object();
    w.key("total").value(summary.total);
    w.key("passed").value(summary.passed);
    w.key("max_q_gap").value(summary.max_q_gap);
    w.key("max_v_gap").value(summary.max_v_gap);
    w.key("max_policy_gap").value(summary.max_policy_gap);
    w.key("max_vi_iterations").value(summary.max_vi_iterations);
    w.key("max_spi_iterations").value(summary.max_spi_iterations);
    w.key("total_vi_iterations").value(summary.total_vi_iterations);
    w.key("total_spi_iterations").value(summary.total_spi_iterations);
    w.end_object();
    w.end_object();
    return w.str() + "\n";
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::string out =
        "instance_id,S,A,gamma,eta,reg,q_gap,v_gap,policy_gap,vi_iters,spi_iters,verdict\n";
    for (const auto& row : rows) {
        out += row.instance_id;
        out += ',';
        out += std::to_string(row.num_states);
        out += ',';
        out += std::to_string(row.num_actions);
        out += ',';
        out += format_real(row.gamma);
        out += ',';
        out += format_real(row.eta);
        out += ',';
        out += row.reg;
        out += ',';
        out += format_real(row.report.q_gap);
        out += ',';
        out += format_real(row.report.v_gap);
        out += ',';
        out += format_real(row.report.policy_gap);
        out += ',';
        out += std::to_string(row.report.vi_iterations);
        out += ',';
        out += std::to_string(row.report.spi_iterations);
        out += ',';
        out += row.report.pass ? "pass" : "fail";
        out += '\n';
    }
    return out;
}

}  // namespace softmdp
