#include "dcn/session.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace dcn {

Json config_json(const ServiceConfig& config) {
  return Json{{"tolerances", tolerances_json(config.sep, config.state)},
              {"seed", config.seed},
              {"ttl_seconds", config.ttl.count()},
              {"capacity", config.capacity},
              {"max_qubits", config.max_qubits}};
}

Json ServiceError::body() const {
  Json out{{"code", code_}, {"message", what()}};
  if (span_) out["span"] = Json{{"line", span_->line}, {"column", span_->column}, {"length", span_->length}};
  return out;
}

SessionManager::SessionManager(ServiceConfig config, std::function<Clock::time_point()> now)
    : config_(std::move(config)), now_(std::move(now)), ids_(std::random_device{}()) {}

void SessionManager::evict_expired(Clock::time_point now) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_access >= config_.ttl)
      it = sessions_.erase(it);
    else
      ++it;
  }
}

std::shared_ptr<SessionManager::Session> SessionManager::acquire(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto now = now_();
  evict_expired(now);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "not_found", "unknown session '" + id + "'");
  it->second->last_access = now;
  return it->second;
}

std::size_t SessionManager::size() {
  std::lock_guard lock(mutex_);
  evict_expired(now_());
  return sessions_.size();
}

std::string SessionManager::create(int n, std::optional<InitSpec> init, bool normalize,
                                   std::optional<std::uint64_t> seed) {
  if (n < 1 || n > config_.max_qubits)
    throw ServiceError(400, "bad_request", "qubit count must be in 1.." + std::to_string(config_.max_qubits));
  auto session = std::make_shared<Session>();
  session->qubits = n;
  try {
    if (init) {
      if (auto* amps = std::get_if<InitAmps>(&*init); amps && normalize)
        amps->amps = StateVector::from_amplitudes(n, amps->amps, NormMode::normalize).amplitudes();
      Circuit c{n, {}, {}, init};
      session->timeline.push_back(TimelineEntry{std::nullopt, initial_state(c, config_.state), std::nullopt});
    } else {
      session->timeline.push_back(TimelineEntry{std::nullopt, StateVector::basis(n, 0), std::nullopt});
    }
  } catch (const std::exception& e) {
    throw ServiceError(400, "bad_request", e.what());
  }
  session->init = std::move(init);

  std::lock_guard lock(mutex_);
  const auto now = now_();
  evict_expired(now);
  if (sessions_.size() >= config_.capacity && !sessions_.empty()) {
    const auto oldest = std::min_element(sessions_.begin(), sessions_.end(), [](const auto& a, const auto& b) {
      return a.second->last_access < b.second->last_access;
    });
    sessions_.erase(oldest);
  }
  std::string id;
  do {
    id = fmt::format("{:016x}", ids_());
  } while (sessions_.count(id));
  session->id = id;
  session->rng.seed(seed.value_or(config_.seed + created_++));
  session->last_access = now;
  sessions_.emplace(id, std::move(session));
  return id;
}

Json SessionManager::summary(const Session& s) const {
  const TimelineEntry& e = s.timeline[s.cursor];
  Json out;
  out["id"] = s.id;
  out["qubits"] = s.qubits;
  out["cursor"] = s.cursor;
  out["length"] = s.timeline.size();
  out["can_undo"] = s.cursor > 0;
  out["can_redo"] = s.cursor + 1 < s.timeline.size();
  out["op"] = e.op ? Json(statement_text(*e.op)) : Json(nullptr);
  out["amplitudes"] = polar_list(e.state);
  out["p1"] = one_probabilities(e.state);
  Json verdicts = Json::array();
  for (Verdict v : qubit_verdicts(e.state, config_.sep)) verdicts.push_back(verdict_name(v));
  out["verdicts"] = verdicts;
  out["outcome"] = e.outcome ? outcome_json(*e.outcome) : Json(nullptr);
  return out;
}

Json SessionManager::apply(const std::string& id, const CircuitOp& op) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  try {
    validate(op, s->qubits);
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_op", e.what());
  }
  StepResult step{s->timeline[s->cursor].state, std::nullopt};
  try {
    step = apply_op(s->timeline[s->cursor].state, op, s->rng, config_.state);
  } catch (const ZeroProbabilityError& e) {
    throw ServiceError(409, "zero_probability", e.what());
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_op", e.what());
  }
  CircuitOp recorded = op;
  if (auto* m = std::get_if<MeasureOp>(&recorded.body); m && !m->forced) m->forced = step.outcome->bits;
  s->timeline.resize(s->cursor + 1);
  s->timeline.push_back(TimelineEntry{std::move(recorded), std::move(step.state), std::move(step.outcome)});
  ++s->cursor;
  return summary(*s);
}

Json SessionManager::apply_text(const std::string& id, std::string_view statement) {
  int n = 0;
  {
    const auto s = acquire(id);
    std::lock_guard lock(s->mutex);
    n = s->qubits;
  }
  CircuitOp op;
  try {
    op = parse_statement(statement, n);
  } catch (const ParseError& e) {
    throw ServiceError(422, "parse_error", e.message(), e.span());
  }
  return apply(id, op);
}

Json SessionManager::undo(const std::string& id) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  if (s->cursor == 0) throw ServiceError(409, "timeline_boundary", "nothing to undo");
  --s->cursor;
  return summary(*s);
}

Json SessionManager::redo(const std::string& id) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  if (s->cursor + 1 >= s->timeline.size()) throw ServiceError(409, "timeline_boundary", "nothing to redo");
  ++s->cursor;
  return summary(*s);
}

Json SessionManager::state(const std::string& id) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  return summary(*s);
}

std::string SessionManager::render(const std::string& id, const std::optional<LayoutSpec>& spec,
                                   const RenderOptions& options) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  const LayoutSpec chosen = spec.value_or(default_layout(s->qubits));
  try {
    validate_layout(chosen, s->qubits);
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_layout", e.what());
  }
  const TimelineEntry& e = s->timeline[s->cursor];
  const std::string caption = e.op ? statement_text(*e.op) : "initial";
  return render_frame(e.state, chosen, options, caption, config_.sep);
}

Json SessionManager::placement(const std::string& id, const std::optional<LayoutSpec>& spec) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  const LayoutSpec chosen = spec.value_or(default_layout(s->qubits));
  try {
    return placement_json(layout(s->qubits, chosen));
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_layout", e.what());
  }
}

Json SessionManager::separability(const std::string& id, const PartitionSpec& part) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  const StateVector& state = s->timeline[s->cursor].state;
  try {
    validate_partition(part, s->qubits);
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_partition", e.what());
  }
  return report_json(check_pq(state, part, config_.sep), s->qubits);
}

Json SessionManager::separability_of_qubit(const std::string& id, int qubit) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  if (qubit < 1 || qubit > s->qubits || s->qubits < 2)
    throw ServiceError(422, "invalid_partition",
                       "qubit must be in 1.." + std::to_string(s->qubits) + " of a register with at least 2 qubits");
  const StateVector& state = s->timeline[s->cursor].state;
  return report_json(check_qubit(state, qubit, config_.sep), s->qubits);
}

std::string SessionManager::export_dcn(const std::string& id) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  Circuit c{s->qubits, {}, "session", s->init};
  for (std::size_t i = 1; i <= s->cursor; ++i) c.ops.push_back(*s->timeline[i].op);
  return format(c);
}

std::string SessionManager::snapshot(const std::string& id) {
  const auto s = acquire(id);
  std::lock_guard lock(s->mutex);
  std::string out = fmt::format("qubits {} cursor {} length {}\n", s->qubits, s->cursor, s->timeline.size());
  for (const TimelineEntry& e : s->timeline) {
    out += e.op ? statement_text(*e.op) : "init";
    for (Eigen::Index i = 0; i < e.state.dim(); ++i)
      out += fmt::format(" {:a},{:a}", e.state[i].real(), e.state[i].imag());
    out += "\n";
  }
  return out;
}

}  // namespace dcn
