#pragma once

// File formats: event CSV, parameter JSON, run configuration JSON, trace CSV,
// and ingestion adapters for order-book messages and posting logs.

#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"
#include "hawkes/simulate.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hawkes {

// ---- event CSV: header `time,type`, one event per line -------------------

void write_events_csv(std::ostream& out, const EventSequence& events);
void write_events_csv(const std::string& path, const EventSequence& events);

struct EventReadOptions {
    /// Declared type count; inferred as max(type) + 1 when unset.
    std::optional<int> num_types;
    /// Declared horizon; the last event time when unset.
    std::optional<double> horizon;
};

/// Throws DataError naming the offending line for malformed rows, unsorted times,
/// out-of-range types, or times beyond the declared horizon.
[[nodiscard]] EventSequence read_events_csv(std::istream& in, const EventReadOptions& options = {});
[[nodiscard]] EventSequence read_events_csv(const std::string& path,
                                            const EventReadOptions& options = {});

// ---- parameter JSON ------------------------------------------------------

struct FitSummary {
    std::string algorithm;
    std::size_t iterations{0};
    std::size_t aa_accepted{0};
    std::size_t aa_rejected{0};
    std::size_t restarts{0};
    std::size_t num_events{0};
    double horizon{0.0};
    double reg_c{0.0};
};

struct ParamsDocument {
    ModelSpec spec;
    ParamVector params;
    std::optional<double> objective;
    std::optional<FitSummary> fit;
};

/// Keys: mu, alpha ([m][i][j]), beta, kernels, objective, meta.
[[nodiscard]] std::string params_to_json(const ParamsDocument& doc);
[[nodiscard]] ParamsDocument params_from_json(const std::string& text);
void write_params_json(const std::string& path, const ParamsDocument& doc);
[[nodiscard]] ParamsDocument read_params_json(const std::string& path);

// ---- run configuration JSON ------------------------------------------------

/// Sections: model, domain, init, truth (optional), regularization, optimizer,
/// horizon. Unknown keys are rejected with ConfigError.
struct RunConfig {
    ModelSpec spec;
    BoxDomain domain;
    ParamVector init;
    std::optional<ParamVector> truth;
    double reg_c{0.0};
    std::optional<double> horizon;
    double truncation_horizon{std::numeric_limits<double>::infinity()};
    Algorithm algorithm{Algorithm::kAaIpalm};
    HyperParams hp;
    /// Lbar given as "estimate": filled from a local curvature estimate at init.
    bool estimate_lbar{false};
    double lbar_safety{2.0};
    /// delta given as "auto": max(delta1, delta2).
    bool auto_delta{false};
};

[[nodiscard]] RunConfig config_from_json(const std::string& text);
[[nodiscard]] RunConfig read_config(const std::string& path);
[[nodiscard]] std::string config_to_json(const RunConfig& config);

/// Applies the "estimate"/"auto" placeholders using the given problem.
void resolve_hyperparams(RunConfig& config, const LikelihoodProblem& problem);

// ---- trace CSV: header `iter,objective,residual,step_kind,lyapunov,seconds` --

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);
[[nodiscard]] std::vector<TraceRecord> read_trace_csv(std::istream& in);
[[nodiscard]] std::vector<TraceRecord> read_trace_csv(const std::string& path);

// ---- ingestion -----------------------------------------------------------

struct IngestSummary {
    std::size_t rows{0};      // data rows seen (header excluded)
    std::size_t bad{0};       // rows that failed to parse
    std::size_t unmapped{0};  // parsed rows without a type assignment
    std::size_t emitted{0};
    double time_offset{0.0};  // subtracted from every emitted time
};

/// Order-book message ingestion. Six target types in the order
/// L^b, L^a, M^b, M^a, C^b, C^a (indices 0..5).
struct LobsterMapping {
    /// (event code, direction) -> type index. Direction is +1 (buy) or -1 (sell).
    std::map<std::pair<int, int>, int> table;
    /// Fraction of unparseable rows above which ingestion fails.
    double max_bad_fraction{0.01};

    /// Codes 1 -> limit, 4/5 -> market (executions), 2/3 -> cancellation, split by direction.
    static LobsterMapping standard();
};

[[nodiscard]] LobsterMapping lobster_mapping_from_json(const std::string& text);
[[nodiscard]] LobsterMapping read_lobster_mapping(const std::string& path);

/// Rows: time, event code, order id, size, price, direction. A leading
/// non-numeric header row is skipped.
[[nodiscard]] EventSequence ingest_lobster(std::istream& in, const LobsterMapping& mapping,
                                           IngestSummary* summary = nullptr);

/// Posting-log ingestion: CSV rows `time,group`; groups are mapped to type
/// indices by a user-supplied table, unmapped groups are dropped.
struct GroupMapping {
    std::map<std::string, int> groups;
    double max_bad_fraction{0.01};
};

[[nodiscard]] GroupMapping group_mapping_from_json(const std::string& text);
[[nodiscard]] GroupMapping read_group_mapping(const std::string& path);
[[nodiscard]] EventSequence ingest_posting_log(std::istream& in, const GroupMapping& mapping,
                                               IngestSummary* summary = nullptr);

/// Reads a whole file; throws DataError if it cannot be opened.
[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace hawkes
