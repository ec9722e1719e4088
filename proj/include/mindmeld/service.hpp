#pragma once

// HTTP + server-sent-events front end over in-memory sessions.
//
// Each session has one writer lock: utterances and config changes are applied
// in a single total order and their events are published under that lock, so
// subscribers see them in processing order. Subscribers own a bounded queue;
// a slow consumer loses buffered frames and receives a "gap" event instead of
// stalling the writer.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "httplib.h"
#include "mindmeld/config.hpp"
#include "mindmeld/error.hpp"
#include "mindmeld/json_util.hpp"
#include "mindmeld/session.hpp"

namespace mindmeld {

class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  void push(std::string frame, std::uint64_t version) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return;
      if (queue_.size() >= capacity_) {
        dropped_ += queue_.size();
        queue_.clear();
      }
      if (dropped_ > 0 && queue_.empty()) {
        Json gap{{"type", "gap"}, {"version", version}, {"dropped", dropped_}};
        queue_.push_back("event: gap\ndata: " + gap.dump() + "\n\n");
        dropped_ = 0;
      }
      queue_.push_back(std::move(frame));
    }
    ready_.notify_all();
  }

  /// Waits up to `timeout` for the next frame; nullopt on timeout or close.
  std::optional<std::string> next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    ready_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return std::nullopt;
    std::string frame = std::move(queue_.front());
    queue_.pop_front();
    return frame;
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::string> queue_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

class Service {
 public:
  struct Reply {
    int status = 200;
    Json body;
  };

  explicit Service(SessionConfig default_config = {}, std::size_t event_buffer = 256)
      : default_config_(std::move(default_config)), event_buffer_(event_buffer) {
    validate(default_config_);
  }

  ~Service() { shutdown(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Reply create_session(const std::string& body) {
    return guarded([&] {
      Json doc = json_util::parse(body, "body", ErrorCode::kInvalidConfig);
      json_util::reject_unknown_keys(doc, {"participants", "config"}, "body", ErrorCode::kInvalidConfig);
      SessionConfig config = doc.contains("config") ? session_config_from_json(doc.at("config")) : default_config_;
      auto specs = participants_from_json(json_util::require(doc, "participants", "body", ErrorCode::kInvalidConfig),
                                          config.engine.rng_seed);
      std::unique_lock lock(registry_mutex_);
      std::string id = "s" + std::to_string(++session_counter_);
      auto entry = std::make_shared<Entry>(Session::create(id, specs, std::move(config)));
      sessions_.emplace(id, entry);
      return Reply{201, Json{{"id", id}, {"version", 0}}};
    });
  }

  Reply post_utterance(const std::string& session_id, const std::string& body) {
    return guarded([&] {
      auto entry = find(session_id);
      Json doc = json_util::parse(body, "body", ErrorCode::kInvalidConfig);
      json_util::reject_unknown_keys(doc, {"speaker", "text"}, "body", ErrorCode::kInvalidConfig);
      auto speaker = json_util::require_string(doc, "speaker", "body", ErrorCode::kInvalidConfig);
      auto text = json_util::require_string(doc, "text", "body", ErrorCode::kInvalidConfig);

      std::unique_lock lock(entry->mutex);
      TurnResult turn = entry->session.post_utterance(speaker, text);
      const auto version = static_cast<std::uint64_t>(entry->session.tick());
      publish_turn(*entry, turn, version);
      Json reply = to_json(turn);
      reply["version"] = version;
      return Reply{200, std::move(reply)};
    });
  }

  Reply get_mindmap(const std::string& session_id, const std::string& agent_id, const std::string& view) {
    return guarded([&] {
      auto entry = find(session_id);
      std::shared_lock lock(entry->mutex);
      const Agent& agent = entry->session.agent(agent_id);
      if (view.empty() || view == "self") return Reply{200, snapshot(agent.self_map)};
      if (view.starts_with("outer:")) {
        std::string partner = view.substr(6);
        entry->session.agent(partner);
        const MindMap* outer = agent.outer_map(partner);
        if (outer == nullptr) throw Error(ErrorCode::kNoOuterMap, partner + " has not spoken to " + agent_id);
        return Reply{200, snapshot(*outer)};
      }
      throw Error(ErrorCode::kInvalidConfig, "view must be self or outer:<partner>");
    });
  }

  Reply get_trust(const std::string& session_id, const std::string& observer, const std::string& partner) {
    return guarded([&] {
      auto entry = find(session_id);
      std::shared_lock lock(entry->mutex);
      return Reply{200, to_json(entry->session.trust_between(observer, partner))};
    });
  }

  Reply put_agent_config(const std::string& session_id, const std::string& agent_id, const std::string& body) {
    return guarded([&] {
      auto entry = find(session_id);
      constexpr auto kCode = ErrorCode::kInvalidConfig;
      Json doc = json_util::parse(body, "body", kCode);
      json_util::reject_unknown_keys(doc, {"partner", "alpha", "strategy", "relevance_mode"}, "body", kCode);

      std::unique_lock lock(entry->mutex);
      const std::uint64_t seed = entry->session.config().engine.rng_seed;
      AgentSettings settings;
      if (doc.contains("partner")) settings.partner = json_util::require_string(doc, "partner", "body", kCode);
      if (doc.contains("alpha")) settings.alpha = json_util::require_number(doc, "alpha", "body", kCode);
      if (doc.contains("strategy")) {
        settings.strategy = parse_strategy(json_util::require_string(doc, "strategy", "body", kCode), seed);
      }
      if (doc.contains("relevance_mode")) {
        settings.relevance_mode =
            parse_relevance_mode(json_util::require_string(doc, "relevance_mode", "body", kCode), seed);
      }
      entry->session.configure_agent(agent_id, settings);

      const Agent& agent = entry->session.agent(agent_id);
      const auto version = static_cast<std::uint64_t>(entry->session.tick());
      Json reports = Json::array();
      for (const Agent& partner : entry->session.agents()) {
        if (partner.id != agent.id && agent.outer_map(partner.id) != nullptr) {
          reports.push_back(to_json(entry->session.trust_between(agent.id, partner.id)));
        }
      }
      if (!reports.empty()) {
        publish(*entry, "trust_updated", Json{{"type", "trust_updated"}, {"version", version}, {"reports", reports}},
                version);
      }
      Json agent_doc = to_json(agent);
      return Reply{200, Json{{"agent", agent.id},
                             {"alpha", agent_doc["alpha"]},
                             {"alpha_by_partner", agent_doc["alpha_by_partner"]},
                             {"strategy", agent_doc["strategy"]},
                             {"relevance_mode", agent_doc["relevance_mode"]},
                             {"version", version},
                             {"trust", std::move(reports)}}};
    });
  }

  Reply get_session(const std::string& session_id) {
    return guarded([&] {
      auto entry = find(session_id);
      std::shared_lock lock(entry->mutex);
      Json participants = Json::array();
      for (const Agent& agent : entry->session.agents()) participants.push_back(agent.id);
      return Reply{200, Json{{"id", session_id},
                             {"version", entry->session.tick()},
                             {"participants", std::move(participants)}}};
    });
  }

  Reply get_snapshot(const std::string& session_id) {
    return guarded([&] {
      auto entry = find(session_id);
      std::shared_lock lock(entry->mutex);
      return Reply{200, to_json(entry->session)};
    });
  }

  /// nullptr when the session does not exist.
  std::shared_ptr<Subscription> subscribe(const std::string& session_id) {
    std::shared_ptr<Entry> entry;
    {
      std::shared_lock lock(registry_mutex_);
      auto it = sessions_.find(session_id);
      if (it == sessions_.end() || closing_) return nullptr;
      entry = it->second;
    }
    auto subscription = std::make_shared<Subscription>(event_buffer_);
    std::unique_lock lock(entry->mutex);
    entry->subscribers.push_back(subscription);
    return subscription;
  }

  /// Wakes and closes every open event stream.
  void shutdown() {
    std::unique_lock lock(registry_mutex_);
    closing_ = true;
    for (auto& [id, entry] : sessions_) {
      std::unique_lock entry_lock(entry->mutex);
      for (auto& weak : entry->subscribers) {
        if (auto sub = weak.lock()) sub->close();
      }
    }
  }

  void register_routes(httplib::Server& server) {
    auto send = [](httplib::Response& res, const Reply& reply) {
      res.status = reply.status;
      res.set_content(reply.body.dump(), "application/json");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [send](const httplib::Request&, httplib::Response& res) {
      send(res, Reply{200, Json{{"status", "ok"}}});
    });
    server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, create_session(req.body));
    });
    server.Get(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get_session(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/snapshot)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get_snapshot(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/utterances)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, post_utterance(req.matches[1], req.body));
                });
    server.Get(R"(/sessions/([^/]+)/agents/([^/]+)/mindmap)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, get_mindmap(req.matches[1], req.matches[2],
                                       req.has_param("view") ? req.get_param_value("view") : "self"));
               });
    server.Put(R"(/sessions/([^/]+)/agents/([^/]+)/config)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, put_agent_config(req.matches[1], req.matches[2], req.body));
               });
    server.Get(R"(/sessions/([^/]+)/trust)", [this, send](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("observer") || !req.has_param("partner")) {
        send(res, error_reply(400, "BadRequest", "observer and partner query parameters are required"));
        return;
      }
      send(res, get_trust(req.matches[1], req.get_param_value("observer"), req.get_param_value("partner")));
    });
    server.Get(R"(/sessions/([^/]+)/events)", [this, send](const httplib::Request& req, httplib::Response& res) {
      auto subscription = subscribe(req.matches[1]);
      if (!subscription) {
        send(res, error_reply(404, "UnknownSession", "no session \"" + std::string(req.matches[1]) + "\""));
        return;
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [subscription, first = true](std::size_t, httplib::DataSink& sink) mutable {
            if (first) {
              first = false;
              const std::string hello = ": subscribed\n\n";
              return sink.write(hello.data(), hello.size());
            }
            if (auto frame = subscription->next(std::chrono::milliseconds(500))) {
              return sink.write(frame->data(), frame->size());
            }
            if (subscription->closed()) {
              sink.done();
              return true;
            }
            const std::string keepalive = ": keepalive\n\n";
            return sink.write(keepalive.data(), keepalive.size());
          },
          [subscription](bool) { subscription->close(); });
    });
  }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::shared_mutex mutex;
    Session session;
    std::vector<std::weak_ptr<Subscription>> subscribers;
  };

  static Reply error_reply(int status, std::string_view code, const std::string& message) {
    return Reply{status, Json{{"error", code}, {"message", message}}};
  }

  static int status_for(ErrorCode code) {
    switch (code) {
      case ErrorCode::kInvalidConfig:
      case ErrorCode::kMalformedSnapshot:
        return 400;
      case ErrorCode::kUnknownAgent:
      case ErrorCode::kNoOuterMap:
        return 404;
      default:
        return 422;
    }
  }

  struct UnknownSession {
    std::string id;
  };

  template <typename Fn>
  Reply guarded(Fn&& fn) {
    try {
      return fn();
    } catch (const UnknownSession& e) {
      return error_reply(404, "UnknownSession", "no session \"" + e.id + "\"");
    } catch (const Error& e) {
      return error_reply(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      return error_reply(400, "BadRequest", e.what());
    }
  }

  std::shared_ptr<Entry> find(const std::string& session_id) {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw UnknownSession{session_id};
    return it->second;
  }

  // Caller holds entry.mutex exclusively.
  void publish(Entry& entry, const std::string& type, const Json& payload, std::uint64_t version) {
    std::string frame = "event: " + type + "\nid: " + std::to_string(version) + "\ndata: " + payload.dump() + "\n\n";
    auto& subs = entry.subscribers;
    for (auto it = subs.begin(); it != subs.end();) {
      auto sub = it->lock();
      if (!sub || sub->closed()) {
        it = subs.erase(it);
        continue;
      }
      sub->push(frame, version);
      ++it;
    }
  }

  void publish_turn(Entry& entry, const TurnResult& turn, std::uint64_t version) {
    Json deltas = Json::array();
    Json reports = Json::array();
    for (const ListenerOutcome& o : turn.listeners) {
      deltas.push_back(Json{{"listener", o.listener},
                            {"merge", o.merge ? to_json(*o.merge) : Json(nullptr)},
                            {"forgotten", to_json(o.forgotten)}});
      reports.push_back(to_json(o.trust));
    }
    publish(entry, "utterance_processed",
            Json{{"type", "utterance_processed"},
                 {"version", version},
                 {"speaker", turn.utterance.speaker},
                 {"text", turn.utterance.text},
                 {"labels", turn.labels},
                 {"deltas", std::move(deltas)}},
            version);
    for (const ListenerOutcome& o : turn.listeners) {
      for (const Signature& signature : o.memory.promoted) {
        publish(entry, "skeleton_promoted",
                Json{{"type", "skeleton_promoted"},
                     {"version", version},
                     {"listener", o.listener},
                     {"partner", turn.utterance.speaker},
                     {"signature", signature}},
                version);
      }
    }
    publish(entry, "trust_updated", Json{{"type", "trust_updated"}, {"version", version}, {"reports", reports}},
            version);
  }

  SessionConfig default_config_;
  std::size_t event_buffer_;
  std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t session_counter_ = 0;
  bool closing_ = false;
};

}  // namespace mindmeld
