#include "psychot/agent.hpp"

#include <algorithm>
#include <set>

namespace psychot {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MentalPoint encode_label(const MetricSpec& space, std::string_view label) {
  std::uint64_t state = fnv1a64(label);
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(space.m()));
  for (auto& d : digits) d = static_cast<std::uint8_t>(splitmix64(state) % static_cast<std::uint64_t>(space.p()));
  return MentalPoint(std::move(digits));
}

void validate(const AgentConfig& cfg) {
  if (cfg.id.empty()) throw ValidationError("/id", "agent id must be non-empty");
  if (cfg.model_level < 1 || cfg.model_level > 4)
    throw ValidationError("/model_level", "model level must be 1, 2, 3 or 4");
  if (cfg.processors.empty()) throw ValidationError("/processors", "at least one processor is required");
  std::set<std::string> ids;
  bool has_scc = false;
  for (std::size_t i = 0; i < cfg.processors.size(); ++i) {
    const auto& proc = cfg.processors[i];
    const auto path = "/processors/" + std::to_string(i);
    try {
      validate(cfg.metric, proc);
    } catch (const ValidationError& ex) {
      throw ex.under(path);
    }
    if (!ids.insert(proc.id).second) throw ValidationError(path + "/id", "duplicate processor id '" + proc.id + "'");
    has_scc = has_scc || proc.output_target == OutputTarget::SCC;
  }
  if (!has_scc) throw ValidationError("/processors", "at least one processor must output to SCC");
  for (std::size_t i = 0; i < cfg.routing.size(); ++i) {
    const auto& rule = cfg.routing[i];
    const auto path = "/routing/" + std::to_string(i);
    if (rule.prefix.size() == 0 || rule.prefix.size() > static_cast<std::size_t>(cfg.metric.m()))
      throw ValidationError(path + "/prefix", "routing prefix length must lie in [1, m]");
    if (!ids.count(rule.processor))
      throw ValidationError(path + "/processor", "unknown processor '" + rule.processor + "'");
  }
  for (const auto* db : {&cfg.interest_db, &cfg.interdiction_db})
    for (const auto& x : db->points()) cfg.metric.check(x);
  try {
    validate(cfg.metric, cfg.thresholds);
  } catch (const ValidationError& ex) {
    throw ex.under("/thresholds");
  }
  try {
    validate(cfg.collector);
  } catch (const ValidationError& ex) {
    throw ex.under("/collector");
  }
  try {
    validate(cfg.unconscious);
  } catch (const ValidationError& ex) {
    throw ex.under("/unconscious");
  }
}

Agent::Agent(AgentConfig cfg) : cfg_(std::move(cfg)), collector_(cfg_.collector), rng_(cfg_.seed) {
  validate(cfg_);
  for (std::size_t i = 0; i < cfg_.processors.size(); ++i)
    if (cfg_.processors[i].output_target == OutputTarget::SCC) scc_processors_.push_back(i);
}

Event& Agent::emit(EventKind kind, std::optional<IdeaId> idea) {
  Event e;
  e.tick = tick_;
  e.agent = cfg_.id;
  e.seq = seq_++;
  e.kind = kind;
  e.idea = idea;
  events_.push_back(std::move(e));
  return events_.back();
}

std::size_t Agent::route(const MentalPoint& point) {
  const RoutingRule* best = nullptr;
  for (const auto& rule : cfg_.routing) {
    if (common_prefix_length(rule.prefix, point) < rule.prefix.size()) continue;
    if (!best || rule.prefix.size() > best->prefix.size()) best = &rule;
  }
  if (best) {
    auto it = std::find_if(cfg_.processors.begin(), cfg_.processors.end(),
                           [&](const ProcessorSpec& p) { return p.id == best->processor; });
    return static_cast<std::size_t>(it - cfg_.processors.begin());
  }
  const auto chosen = scc_processors_[round_robin_ % scc_processors_.size()];
  ++round_robin_;
  return chosen;
}

void Agent::dispatch(IdeaId idea, std::size_t processor, std::vector<Pending>& into, std::uint32_t chain) {
  auto& e = emit(EventKind::Dispatched, idea);
  e.point = ideas_.at(idea).point.to_string();
  e.processor = cfg_.processors[processor].id;
  into.push_back(Pending{idea, processor, chain});
}

Injected Agent::inject_stimulus(const MentalPoint& point, std::string_view source) {
  cfg_.metric.check(point);
  const IdeaId id = next_idea_++;
  ideas_[id] = IdeaState{point, std::nullopt, 0, 0, {}};
  auto& e = emit(EventKind::StimulusEncoded, id);
  e.point = point.to_string();
  e.detail = std::string(source);
  dispatch(id, route(point), pending_);
  return Injected{id, point};
}

Injected Agent::inject(std::string_view point_or_label, std::string_view source) {
  if (cfg_.metric.is_point_literal(point_or_label))
    return inject_stimulus(cfg_.metric.parse(point_or_label), source);
  if (point_or_label.empty()) throw InvalidPoint("empty stimulus");
  return inject_stimulus(encode_label(cfg_.metric, point_or_label), source);
}

void Agent::apply_patch(const ConfigPatch& patch) {
  Thresholds th = cfg_.thresholds;
  EmotionProfile profile = cfg_.profile;
  if (patch.realization) th.realization = *patch.realization;
  if (patch.preserving) th.preserving = *patch.preserving;
  if (patch.max_interest) th.max_interest = *patch.max_interest;
  if (patch.max_interdiction) th.max_interdiction = *patch.max_interdiction;
  if (patch.a) profile.a = *patch.a;
  if (patch.b) profile.b = *patch.b;
  try {
    validate(cfg_.metric, th);
  } catch (const ValidationError& ex) {
    throw ex.under("/thresholds");
  }
  cfg_.thresholds = th;
  cfg_.profile = profile;
  emit(EventKind::ConfigChanged).patch = patch;
}

void Agent::tick() {
  realized_last_tick_.clear();
  std::vector<Pending> work;
  work.swap(pending_);

  if (cfg_.model_level == 4) {
    for (const auto& wish : unconscious_.select_leaks(cfg_.unconscious.leak_rate, rng_)) {
      const IdeaId id = next_idea_++;
      ideas_[id] = IdeaState{wish.point, wish.idea_id, 0, 0, {}};
      auto& e = emit(EventKind::Leaked, id);
      e.point = wish.point.to_string();
      e.root_wish = wish.idea_id;
      dispatch(id, route(wish.point), work);
    }
  }

  for (std::size_t i = 0; i < work.size(); ++i) {
    const Pending item = work[i];
    think(item, work);
  }

  if (cfg_.model_level >= 2) {
    for (const auto& q : collector_.decay(1.0, cfg_.thresholds.realization)) {
      auto& e = emit(EventKind::Purged, q.idea_id);
      e.point = ideas_.at(q.idea_id).point.to_string();
      e.measures = Measures{.score = q.score};
      ++metrics_.purges;
      finish(q.idea_id);
    }
    for (const auto& q : collector_.pop_for_realization()) realize(q.idea_id, q.score);
  }
  ++tick_;
}

void Agent::think(const Pending& item, std::vector<Pending>& work) {
  auto& st = ideas_.at(item.idea);
  const auto& proc = cfg_.processors[item.processor];
  const auto outcome = iterate(cfg_.metric, proc, st.point);

  if (const auto* cycle = std::get_if<Cycle>(&outcome)) {
    auto& e = emit(EventKind::NoSolution, item.idea);
    e.point = st.point.to_string();
    e.processor = proc.id;
    e.detail = "cycle period " + std::to_string(cycle->period);
    ++metrics_.no_solutions;
    finish(item.idea);
    return;
  }
  if (std::holds_alternative<Exhausted>(outcome)) {
    auto& e = emit(EventKind::NoSolution, item.idea);
    e.point = st.point.to_string();
    e.processor = proc.id;
    e.detail = "exhausted";
    ++metrics_.no_solutions;
    finish(item.idea);
    return;
  }

  const auto& attractor = std::get<Attractor>(outcome);
  st.point = attractor.point;
  {
    auto& e = emit(EventKind::AttractorFound, item.idea);
    e.point = st.point.to_string();
    e.processor = proc.id;
    e.detail = "steps " + std::to_string(attractor.steps);
  }

  switch (proc.output_target) {
  case OutputTarget::Internal: {
    if (item.internal_chain >= kMaxInternalChain) {
      auto& e = emit(EventKind::NoSolution, item.idea);
      e.point = st.point.to_string();
      e.processor = proc.id;
      e.detail = "internal chain cap";
      ++metrics_.no_solutions;
      finish(item.idea);
      return;
    }
    auto& e = emit(EventKind::ReDispatch, item.idea);
    e.point = st.point.to_string();
    e.processor = proc.id;
    e.detail = "internal";
    dispatch(item.idea, route(st.point), work, item.internal_chain + 1);
    return;
  }
  case OutputTarget::UC: {
    if (++st.uc_arrivals % 2 == 1) {
      auto& e = emit(EventKind::ReDispatch, item.idea);
      e.point = st.point.to_string();
      e.processor = proc.id;
      e.detail = "uc";
      dispatch(item.idea, route(st.point), work, item.internal_chain);
    } else {
      auto& e = emit(EventKind::UnconsciousPerformance, item.idea);
      e.point = st.point.to_string();
      e.processor = proc.id;
      finish(item.idea);
    }
    return;
  }
  case OutputTarget::SCC:
    deliver_to_scc(item.idea, proc, item.processor);
    return;
  }
}

void Agent::deliver_to_scc(IdeaId idea, const ProcessorSpec& proc, std::size_t proc_index) {
  auto& st = ideas_.at(idea);
  const auto& space = cfg_.metric;
  const auto point = st.point.to_string();
  const int level = cfg_.model_level;

  if (level == 4 &&
      resistance_check(space, st.point, unconscious_.hidden_db(), proc) == Resistance::Blocked) {
    auto& e = emit(EventKind::Blocked, idea);
    e.point = point;
    e.processor = proc.id;
    e.measures = Measures{.unconscious = unconscious_interdiction(space, st.point, unconscious_.hidden_db())};
    ++metrics_.blocks;
    finish(idea);
    return;
  }

  if (level == 1) {
    realize(idea, std::nullopt);
    return;
  }

  const double interest = interest_measure(space, st.point, cfg_.interest_db);
  std::optional<double> interdiction;
  if (level >= 3) interdiction = interdiction_measure(space, st.point, cfg_.interdiction_db);
  const double d = interdiction.value_or(space.min_measure());
  const auto disposition = classify(interest, d, cfg_.profile, cfg_.thresholds, level);

  Measures m;
  m.interest = interest;
  m.interdiction = interdiction;
  m.score = level == 2 ? interest : consistency(interest, d, cfg_.profile);
  m.pleasure = pleasure_reality(interest, d, cfg_.profile, level);
  st.measures = m;

  if (std::holds_alternative<Discard>(disposition)) {
    auto& e = emit(EventKind::Discarded, idea);
    e.point = point;
    e.processor = proc.id;
    e.measures = m;
    e.detail = "below realization threshold";
    ++metrics_.discards;
    finish(idea);
    return;
  }

  if (const auto* q = std::get_if<Queue>(&disposition)) {
    std::optional<QueuedIdea> evicted;
    try {
      evicted = collector_.enqueue(QueuedIdea{idea, q->score, q->pinned, tick_});
    } catch (const CollectorFull&) {
      auto& e = emit(EventKind::Discarded, idea);
      e.point = point;
      e.processor = proc.id;
      e.measures = m;
      e.detail = "collector full of pinned ideas";
      ++metrics_.discards;
      finish(idea);
      return;
    }
    if (evicted && evicted->idea_id == idea) {
      auto& e = emit(EventKind::Discarded, idea);
      e.point = point;
      e.processor = proc.id;
      e.measures = m;
      e.detail = "evicted";
      ++metrics_.discards;
      finish(idea);
      return;
    }
    {
      auto& e = emit(EventKind::Queued, idea);
      e.point = point;
      e.processor = proc.id;
      e.measures = m;
      e.root_wish = st.root_wish;
      e.detail = q->pinned ? "pinned" : "unpinned";
    }
    if (evicted) {
      auto& e = emit(EventKind::Discarded, evicted->idea_id);
      e.point = ideas_.at(evicted->idea_id).point.to_string();
      e.measures = Measures{.score = evicted->score};
      e.detail = "evicted";
      ++metrics_.discards;
      finish(evicted->idea_id);
    }
    return;
  }

  // Doubtful: a few attempts on other processors, then repression.
  if (st.retries_used < cfg_.unconscious.retry_attempts) {
    ++st.retries_used;
    auto& e = emit(EventKind::ReDispatch, idea);
    e.point = point;
    e.processor = proc.id;
    e.measures = m;
    e.detail = "doubt retry " + std::to_string(st.retries_used);
    dispatch(idea, (proc_index + 1) % cfg_.processors.size(), pending_);
    return;
  }
  auto& e = emit(EventKind::Repressed, idea);
  e.point = point;
  e.processor = proc.id;
  e.measures = m;
  e.root_wish = st.root_wish;
  unconscious_.repress(idea, st.point, tick_);
  ++metrics_.repressions;
  finish(idea);
}

void Agent::realize(IdeaId idea, std::optional<double> score) {
  auto& st = ideas_.at(idea);
  const auto point = st.point.to_string();
  {
    auto& e = emit(EventKind::Realized, idea);
    e.point = point;
    e.root_wish = st.root_wish;
    if (score) {
      Measures m = st.measures;
      m.score = *score;
      e.measures = m;
    }
  }
  ++metrics_.realizations;
  if (score && st.measures.pleasure) {
    metrics_.pleasure_sum += *st.measures.pleasure;
    ++metrics_.pleasure_count;
  }
  if (st.root_wish) {
    auto& e = emit(EventKind::Symptom, idea);
    e.point = point;
    e.root_wish = st.root_wish;
    ++metrics_.symptoms;
  }
  if (cfg_.learning) cfg_.interest_db.insert(st.point);
  realized_last_tick_.push_back(st.point);
  finish(idea);
}

AgentSnapshot Agent::snapshot() const {
  AgentSnapshot s;
  s.agent = cfg_.id;
  s.model_level = cfg_.model_level;
  s.tick = tick_;
  for (const auto& q : collector_.items())
    s.queue.push_back(QueueEntry{q.idea_id, ideas_.at(q.idea_id).point.to_string(), q.score, q.pinned,
                                 q.enqueued_tick, tick_ - q.enqueued_tick});
  for (const auto& x : cfg_.interest_db.points()) s.interest_db.push_back(x.to_string());
  for (const auto& x : cfg_.interdiction_db.points()) s.interdiction_db.push_back(x.to_string());
  for (const auto& x : unconscious_.hidden_db().points()) s.hidden_db.push_back(x.to_string());
  for (const auto& w : unconscious_.wishes())
    s.repressed.push_back(WishEntry{w.idea_id, w.point.to_string(), w.repressed_tick, w.leak_count,
                                    tick_ - w.repressed_tick});
  s.thresholds = cfg_.thresholds;
  s.profile = cfg_.profile;
  s.metrics = metrics_;
  s.pending = pending_.size();
  return s;
}

} // namespace psychot
