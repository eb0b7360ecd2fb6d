#include "cha/engine.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

#include "cha/log.hpp"

namespace cha {

namespace fs = std::filesystem;

namespace {

fs::path sessions_dir(const EngineConfig& c) { return c.persistence_dir / "sessions"; }

std::string new_session_id() {
  static std::mutex m;
  static boost::uuids::random_generator gen;
  std::lock_guard lock(m);
  return boost::uuids::to_string(gen());
}

}  // namespace

std::unique_ptr<llm::ChatBackend> make_backend(const BackendConfig& b) {
  if (b.kind == "scripted") return std::make_unique<llm::ScriptedBackend>(llm::load_fixture(b.fixture));
  return std::make_unique<llm::RemoteBackend>(b.remote);
}

health::HealthLibrary make_health_library(const EngineConfig& c) {
  health::HealthLibrary lib;
  if (!c.data_dir.empty()) lib.dataset = std::make_shared<health::HealthDataset>(c.data_dir);
  if (c.search == "remote") {
    lib.search = std::make_shared<health::RemoteSearchClient>(c.remote_search);
  } else if (!c.search_map.empty()) {
    lib.search = health::StubSearchClient::from_file(c.search_map);
  } else {
    lib.search = std::make_shared<health::StubSearchClient>();
  }
  if (c.fetcher == "remote") {
    lib.fetcher = std::make_shared<health::RemoteFetcher>();
  } else if (!c.www_dir.empty()) {
    lib.fetcher = std::make_shared<health::FixtureFetcher>(c.www_dir);
  }
  lib.text_budget = c.text_budget;
  return lib;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  check_config(config_);
  const PromptTemplates templates =
      config_.prompts_dir.empty() ? PromptTemplates::defaults() : PromptTemplates::with_overrides(config_.prompts_dir);

  const auto lib = make_health_library(config_);
  try {
    if (!config_.task_manifest.empty()) {
      TaskRegistry all;
      load_task_manifest(config_.task_manifest, health::health_task_bodies(lib), all);
      for (const auto& t : all) {
        if (config_.enabled_tasks.empty() ||
            std::find(config_.enabled_tasks.begin(), config_.enabled_tasks.end(), t.spec.name) !=
                config_.enabled_tasks.end()) {
          registry_.register_task(t.spec, t.body);
        }
      }
      for (const auto& name : config_.enabled_tasks) {
        if (!registry_.contains(name)) throw Error(Errc::UnknownTask, name);
      }
    } else {
      health::register_health_tasks(registry_, lib, config_.enabled_tasks);
    }
    registry_.check_dependencies();
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    throw Error(Errc::ConfigError, std::string("enabled tasks: ") + e.what());
  }

  pipe_ = config_.persistence_dir.empty() ? std::make_unique<DataPipe>()
                                          : std::make_unique<DataPipe>(config_.persistence_dir / "datapipe");
  planner_llm_ = make_backend(config_.planner_backend);
  responder_llm_ = config_.responder_backend ? std::shared_ptr<llm::ChatBackend>(make_backend(*config_.responder_backend))
                                             : planner_llm_;

  if (config_.translator == "stub") {
    translator_ = config_.translation_dictionary.empty()
                      ? std::make_unique<StubDictionaryClient>()
                      : StubDictionaryClient::from_file(config_.translation_dictionary);
  } else if (config_.translator == "remote") {
    translator_ = std::make_unique<RemoteTranslationClient>(config_.translation_endpoint, config_.translation_api_key);
  }

  if (config_.strategy == "react") {
    strategy_ = std::make_unique<ReActPlanner>(templates, config_.repair_budget);
  } else {
    strategy_ = std::make_unique<TreeOfThoughtPlanner>(templates, config_.repair_budget);
  }

  OrchestratorConfig oc;
  oc.max_iterations = config_.max_iterations;
  oc.lang_mode = config_.lang_mode;
  oc.planner_params = config_.planner_params;
  oc.responder_params = config_.responder_params;
  oc.response_prefix = config_.response_prefix;
  orchestrator_ = std::make_unique<Orchestrator>(
      registry_, *pipe_, *strategy_, *planner_llm_, *responder_llm_, translator_.get(),
      SupportedLanguages(std::set<std::string>(config_.languages.begin(), config_.languages.end())), oc, templates);

  load_persisted();
}

Engine::~Engine() = default;

void Engine::load_persisted() {
  if (config_.persistence_dir.empty()) return;
  const auto dir = sessions_dir(config_);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& file : fs::directory_iterator(dir)) {
    if (file.path().extension() != ".json") continue;
    try {
      std::ifstream in(file.path());
      auto s = std::make_shared<Slot>();
      s->session = session_from_json(Json::parse(in));
      sessions_.emplace(s->session.session_id, std::move(s));
    } catch (const std::exception& e) {
      log::warn("skipping unreadable session file " + file.path().string() + ": " + e.what());
    }
  }
}

void Engine::persist(const Session& s) const {
  if (config_.persistence_dir.empty()) return;
  const auto dir = sessions_dir(config_);
  const auto tmp = dir / (s.session_id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json(s).dump();
    if (!out) throw Error(Errc::StorageFailure, "cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / (s.session_id + ".json"));
}

std::shared_ptr<Engine::Slot> Engine::slot(const std::string& id, bool create) {
  std::lock_guard lock(sessions_mutex_);
  if (const auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (!create) throw Error(Errc::NotFound, "no session '" + id + "'");
  auto s = std::make_shared<Slot>();
  s->session.session_id = id;
  sessions_.emplace(id, s);
  return s;
}

std::string Engine::create_session() {
  const std::string id = new_session_id();
  const auto s = slot(id, true);
  std::lock_guard lock(s->state);
  persist(s->session);
  return id;
}

bool Engine::has_session(std::string_view id) const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.contains(id);
}

Session Engine::session(std::string_view id) const {
  std::shared_ptr<Slot> s;
  {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::NotFound, "no session '" + std::string(id) + "'");
    s = it->second;
  }
  std::lock_guard lock(s->state);
  return s->session;
}

std::vector<std::string> Engine::session_ids() const {
  std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::string Engine::store_metadata(const UploadedFile& file) {
  if (file.content.empty()) throw Error(Errc::InvalidArgument, "uploaded file is empty");
  Json payload{{"type", "metadata"},
               {"kind", file.kind.empty() ? "file" : file.kind},
               {"filename", file.filename},
               {"caption", file.caption},
               {"size", file.content.size()},
               {"content_base64", base64_encode(file.content)}};
  return pipe_->store(std::move(payload), "upload");
}

TurnResult Engine::respond(const std::string& session_id, const std::string& query,
                           const std::vector<std::string>& metadata_refs, std::optional<std::string> language) {
  if (trim(query).empty()) throw Error(Errc::InvalidArgument, "query is empty");
  std::optional<LanguageTag> tag;
  if (language && !language->empty()) tag = LanguageTag(*language);

  std::vector<MetadataItem> items;
  for (const auto& ref : metadata_refs) {
    const auto entry = is_datapipe_reference(ref) ? pipe_->entry(ref) : std::nullopt;
    if (!entry || !entry->payload.is_object() || entry->payload.value("type", "") != "metadata") {
      throw Error(Errc::NotFound, "unknown metadata reference '" + ref + "'");
    }
    items.push_back({entry->payload.value("kind", "file"), ref, entry->payload.value("caption", "")});
  }

  const std::string id = session_id.empty() ? new_session_id() : session_id;
  const auto s = slot(id, true);
  std::unique_lock turn(s->turn, std::try_to_lock);
  if (!turn.owns_lock()) throw Error(Errc::EngineBusy, "a turn is already running for session " + id);

  Session working;
  {
    std::lock_guard lock(s->state);
    working = s->session;
  }
  TurnResult result = orchestrator_->orchestrate_turn(working, query, items, tag);
  {
    std::lock_guard lock(s->state);
    s->session = working;
  }
  persist(working);
  return result;
}

}  // namespace cha
