#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netex/model.hpp"
#include "netex/solver.hpp"

// Instance / outcome documents (versioned JSON), the seeded instance
// generator, and frontier CSV export. Documents are diffable: object keys
// are sorted and numbers round-trip exactly.

namespace netex {

inline constexpr const char* kInstanceVersion = "exchange-instance/1";
inline constexpr const char* kOutcomeVersion = "exchange-outcome/1";

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string where, int line = 0)
      : std::runtime_error(message), where_(std::move(where)), line_(line) {}

  // JSON pointer-style path of the offending field, or "" for syntax errors.
  const std::string& where() const { return where_; }
  // 1-based line for syntax errors, 0 when unknown.
  int line() const { return line_; }

 private:
  std::string where_;
  int line_;
};

// Optional solver configuration carried by an instance document.
struct SolverOverrides {
  std::optional<Side> propose_side;
  std::optional<double> step;
  std::optional<int> max_rounds;
  std::optional<int> max_retries;
  std::optional<double> tol;

  void apply(SolverConfig& config) const;
};

struct InstanceDocument {
  Instance instance;
  SolverOverrides overrides;
};

// Parses and validates; unknown fields are rejected with their path.
// The returned instance already has degenerate edges dropped; warnings are
// appended to `report` when given.
InstanceDocument parse_instance_document(const std::string& text,
                                         ValidationReport* report = nullptr);

Instance parse_instance(const std::string& text,
                        ValidationReport* report = nullptr);

std::string serialize_instance_document(const InstanceDocument& doc);
std::string serialize_instance(const Instance& instance);

struct GenParams {
  int n_buyers{1};
  int n_sellers{1};
  double edge_density{1.0};
  // Family tokens: "additive_power", "shifted_cobb_douglas", "ces", or
  // "canonical-sqrt" (fixed sqrt-additive parameters, unit endowments and
  // capacities; the fixture used throughout the tests).
  std::vector<std::string> families{"additive_power"};
  std::uint64_t seed{0};
};

// Deterministic for a fixed seed: all randomness flows from one
// std::mt19937_64 through explicit bit-to-double mappings, so documents are
// byte-identical across platforms. Every generated edge passes the
// rationally-feasible validation; candidate edges that cannot are skipped
// after bounded capacity redraws.
Instance generate_instance(const GenParams& params);

std::string export_frontier(const Instance& instance, const FrontierSet& fs,
                            const EdgeKey& edge, int n_samples);

// FNV-1a over the canonical serialized instance; ties outcome files to the
// instance they were computed from.
std::string instance_digest(const Instance& instance);

std::string serialize_outcome(const Instance& instance,
                              const StableOutcome& outcome);

// Rebuilds a StableOutcome (including the reciprocal strategy profile) from
// a document. Throws ParseError if the digest does not match the instance.
StableOutcome parse_outcome(const Instance& instance, const std::string& text);

// Write-temp-then-rename; the destination is never left half-written.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace netex
