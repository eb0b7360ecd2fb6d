#include "cha/session.hpp"

namespace cha {

namespace {

Json exchanges_json(const std::vector<PromptExchange>& exchanges) {
  Json out = Json::array();
  for (const auto& e : exchanges) {
    out.push_back({{"stage", e.stage}, {"prompt", e.prompt}, {"response", e.response}});
  }
  return out;
}

Json records_json(const std::vector<ActionRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) out.push_back(to_json(r));
  return out;
}

std::vector<ActionRecord> records_from(const Json& j) {
  std::vector<ActionRecord> out;
  for (const auto& r : j) out.push_back(action_record_from_json(r));
  return out;
}

}  // namespace

std::vector<std::string> TurnTrace::all_prompts() const {
  std::vector<std::string> out;
  for (const auto& it : iterations) {
    for (const auto& e : it.exchanges) out.push_back(e.prompt);
  }
  if (!thinker_prompt.empty()) out.push_back(thinker_prompt);
  return out;
}

Json to_json(const IterationTrace& t) {
  return Json{{"exchanges", exchanges_json(t.exchanges)},
              {"status", t.status},
              {"decision", t.decision},
              {"final_text", t.final_text},
              {"plan_source", t.plan_source},
              {"plan_canonical", t.plan_canonical},
              {"records", records_json(t.records)},
              {"error", t.error}};
}

Json to_json(const TurnTrace& t) {
  Json iterations = Json::array();
  for (const auto& it : t.iterations) iterations.push_back(to_json(it));
  return Json{{"turn_id", t.turn_id},
              {"query", t.query},
              {"question", t.question},
              {"source_language", t.source_language},
              {"iterations", std::move(iterations)},
              {"thinker_prompt", t.thinker_prompt},
              {"raw_answer", t.raw_answer},
              {"answer", t.answer},
              {"tasks_used", t.tasks_used},
              {"planner_invocations", t.planner_invocations},
              {"outcome", t.outcome}};
}

TurnTrace turn_trace_from_json(const Json& j) {
  TurnTrace t;
  t.turn_id = j.value("turn_id", std::size_t{0});
  t.query = j.value("query", std::string{});
  t.question = j.value("question", std::string{});
  t.source_language = j.value("source_language", std::string{"en"});
  for (const auto& it : j.value("iterations", Json::array())) {
    IterationTrace trace;
    for (const auto& e : it.value("exchanges", Json::array())) {
      trace.exchanges.push_back({e.value("stage", std::string{}), e.value("prompt", std::string{}),
                                 e.value("response", std::string{})});
    }
    trace.status = it.value("status", std::string{});
    trace.decision = it.value("decision", std::string{});
    trace.final_text = it.value("final_text", std::string{});
    trace.plan_source = it.value("plan_source", std::string{});
    trace.plan_canonical = it.value("plan_canonical", std::string{});
    trace.records = records_from(it.value("records", Json::array()));
    trace.error = it.value("error", std::string{});
    t.iterations.push_back(std::move(trace));
  }
  t.thinker_prompt = j.value("thinker_prompt", std::string{});
  t.raw_answer = j.value("raw_answer", std::string{});
  t.answer = j.value("answer", std::string{});
  t.tasks_used = j.value("tasks_used", std::vector<std::string>{});
  t.planner_invocations = j.value("planner_invocations", std::size_t{0});
  t.outcome = j.value("outcome", std::string{});
  return t;
}

Json to_json(const ConversationTurn& turn) {
  return Json{{"turn_id", turn.turn_id},   {"query", turn.query},
              {"question", turn.question}, {"answer", turn.answer},
              {"answer_en", turn.answer_en}, {"language", turn.language},
              {"tasks_used", turn.tasks_used}, {"trace", to_json(turn.trace)}};
}

ConversationTurn conversation_turn_from_json(const Json& j) {
  ConversationTurn t;
  t.turn_id = j.at("turn_id").get<std::size_t>();
  t.query = j.value("query", std::string{});
  t.question = j.value("question", std::string{});
  t.answer = j.value("answer", std::string{});
  t.answer_en = j.value("answer_en", std::string{});
  t.language = j.value("language", std::string{"en"});
  t.tasks_used = j.value("tasks_used", std::vector<std::string>{});
  if (j.contains("trace")) t.trace = turn_trace_from_json(j.at("trace"));
  return t;
}

Json to_json(const Session& s) {
  Json history = Json::array();
  for (const auto& turn : s.history) history.push_back(to_json(turn));
  Json metadata = Json::array();
  for (const auto& m : s.metadata_items) {
    metadata.push_back({{"kind", m.kind}, {"reference", m.reference}, {"caption", m.caption}});
  }
  return Json{{"session_id", s.session_id},
              {"language", s.language.code()},
              {"history", std::move(history)},
              {"previous_actions", records_json(s.previous_actions)},
              {"metadata_items", std::move(metadata)}};
}

Session session_from_json(const Json& j) {
  Session s;
  s.session_id = j.at("session_id").get<std::string>();
  s.language = LanguageTag(j.value("language", std::string{"en"}));
  for (const auto& turn : j.value("history", Json::array())) {
    s.history.push_back(conversation_turn_from_json(turn));
  }
  s.previous_actions = records_from(j.value("previous_actions", Json::array()));
  for (const auto& m : j.value("metadata_items", Json::array())) {
    s.metadata_items.push_back({m.value("kind", std::string{}), m.value("reference", std::string{}),
                                m.value("caption", std::string{})});
  }
  return s;
}

std::string render_history(const Session& session) {
  std::vector<std::string> lines;
  for (const auto& turn : session.history) {
    lines.push_back("USER: " + turn.question);
    lines.push_back("CHA: " + turn.answer_en);
  }
  return join(lines, "\n");
}

std::string history_hash(const Session& session) {
  Json history = Json::array();
  for (const auto& turn : session.history) history.push_back(to_json(turn));
  return hex64(fnv1a64(history.dump()));
}

}  // namespace cha
