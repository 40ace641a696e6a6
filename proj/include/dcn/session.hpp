#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcn/circuit.hpp"
#include "dcn/dsl.hpp"
#include "dcn/layout.hpp"
#include "dcn/records.hpp"
#include "dcn/separability.hpp"
#include "dcn/svg.hpp"

namespace dcn {

struct ServiceConfig {
  SeparabilityTolerances sep;
  StateTolerances state;
  std::uint64_t seed = kDefaultSeed;
  std::chrono::seconds ttl{3600};
  std::size_t capacity = 256;
  int max_qubits = 6;
};

Json config_json(const ServiceConfig& config);

/// Failure with an HTTP status and a stable error code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message, std::optional<SourceSpan> span = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), span_(span) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::optional<SourceSpan>& span() const { return span_; }
  Json body() const;

 private:
  int status_;
  std::string code_;
  std::optional<SourceSpan> span_;
};

struct TimelineEntry {
  std::optional<CircuitOp> op;  // absent for the initialization
  StateVector state;
  std::optional<MeasurementOutcome> outcome;
};

/// In-memory sessions: an op timeline with a cursor for undo/redo. Sampled measurements are
/// recorded with their drawn outcome, so replaying the timeline is deterministic.
/// Calls on one session are serialized; distinct sessions proceed concurrently.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(ServiceConfig config = {}, std::function<Clock::time_point()> now = &Clock::now);

  const ServiceConfig& config() const { return config_; }

  /// Returns the new session id. Throws ServiceError(400) on invalid input.
  std::string create(int n, std::optional<InitSpec> init = std::nullopt, bool normalize = false,
                     std::optional<std::uint64_t> seed = std::nullopt);

  Json apply(const std::string& id, const CircuitOp& op);
  Json apply_text(const std::string& id, std::string_view statement);
  Json undo(const std::string& id);
  Json redo(const std::string& id);
  Json state(const std::string& id);

  std::string render(const std::string& id, const std::optional<LayoutSpec>& spec, const RenderOptions& options = {});
  Json separability(const std::string& id, const PartitionSpec& part);
  Json separability_of_qubit(const std::string& id, int qubit);
  Json placement(const std::string& id, const std::optional<LayoutSpec>& spec);

  /// The timeline up to the cursor as circuit text.
  std::string export_dcn(const std::string& id);

  /// Canonical serialization of timeline and cursor; amplitudes as exact hex floats.
  std::string snapshot(const std::string& id);

  std::size_t size();

 private:
  struct Session {
    std::string id;
    int qubits = 1;
    std::optional<InitSpec> init;
    std::vector<TimelineEntry> timeline;
    std::size_t cursor = 0;
    std::mt19937_64 rng;
    std::mutex mutex;
    Clock::time_point last_access;
  };

  std::shared_ptr<Session> acquire(const std::string& id);
  void evict_expired(Clock::time_point now);
  Json summary(const Session& s) const;

  ServiceConfig config_;
  std::function<Clock::time_point()> now_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 ids_;
  std::uint64_t created_ = 0;
};

}  // namespace dcn
