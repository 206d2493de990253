#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "softmdp/equivalence.hpp"
#include "softmdp/mdp.hpp"
#include "softmdp/solvers.hpp"

namespace softmdp {

inline constexpr const char* kArtifactName = "softmdp";
inline constexpr const char* kArtifactVersion = "0.1.0";

// Structural problems with an input document: unreadable file, JSON syntax
// errors, missing or mistyped fields. Value-level problems (row sums, gamma
// range, shape mismatches) are validation violations instead.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// On-disk MDP document: the MDP itself plus the optional initial-state
// distribution (accepted and carried, used by nothing) and optional prior
// policy for KL runs.
struct MdpDocument {
    TabularMdp mdp;
    std::optional<std::vector<double>> initial_distribution;
    std::optional<Policy> prior_policy;
};

MdpDocument parse_mdp_text(const std::string& text);
MdpDocument parse_mdp_file(const std::string& path);

// Canonical form: fixed key order, fixed layout, reals at 17 significant
// digits. parse(write(doc)) reproduces doc exactly, and write(parse(text))
// is byte-identical for canonically written files.
std::string write_mdp_text(const MdpDocument& doc);

std::string read_file(const std::string& path);       // throws ParseError
void write_file(const std::string& path, const std::string& text);  // throws on failure

// %.17g — enough digits for exact double round-trips.
std::string format_real(double value);

// FNV-1a 64-bit content digest, rendered as 16 hex characters.
std::string digest_hex(std::string_view bytes);

// Run provenance stamped into every report file. timestamp is empty (and
// omitted) under --deterministic.
struct Provenance {
    std::string input_digest;
    std::optional<uint64_t> seed;
    std::string timestamp;
};

// Per-instance row of a comparison run; mirrors one CSV line.
struct CompareRow {
    std::string instance_id;
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    double eta = 0.0;
    std::string reg;
    EquivalenceReport report;
};

// Small canonical JSON writer: insertion-ordered keys, %.17g reals, stable
// two-space indentation. Used for every emitted document.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(bool inline_elements = false);
    JsonWriter& end_array();
    JsonWriter& key(std::string_view name);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long v);
    JsonWriter& value(uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value_row(const std::vector<double>& row);  // one-line array

    const std::string& str() const { return out_; }

  private:
    void prepare_slot();
    void newline_indent();

    struct Frame {
        char kind;  // '{' or '['
        bool first = true;
        bool inline_elements = false;
    };

    std::string out_;
    std::vector<Frame> stack_;
    bool pending_key_ = false;
};

std::string write_solve_report(const SolveReport& report, const std::string& method,
                               const std::string& reg_name, double eta,
                               const SolveConfig& config, const Provenance& prov);

std::string write_compare_report(const std::vector<CompareRow>& rows, const SweepSummary& summary,
                                 double threshold, const SolveConfig& config,
                                 const Provenance& prov);

// Fixed-header CSV of per-instance gaps, numeric fields at full round-trip
// precision.
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace softmdp
