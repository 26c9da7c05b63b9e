#include "logkg/backend.hpp"

#include <fstream>

#include "http_util.hpp"
#include "logkg/errors.hpp"

namespace logkg {

ScriptedBackend::ScriptedBackend(std::vector<ScriptedResponse> script)
    : queue_(std::make_move_iterator(script.begin()), std::make_move_iterator(script.end())) {}

void ScriptedBackend::push(ScriptedResponse response) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(response));
}

std::string ScriptedBackend::complete(const BackendRequest& request) {
  std::lock_guard lock(mutex_);
  calls_.push_back({Conversation(request.messages.begin(), request.messages.end()), request.temperature,
                    request.output_schema != nullptr});
  if (queue_.empty()) throw BackendUnavailable("scripted backend has no responses left");
  ScriptedResponse next = std::move(queue_.front());
  queue_.pop_front();
  if (next.failure) {
    switch (*next.failure) {
      case ScriptedFailure::kUnavailable:
        throw BackendUnavailable("scripted: backend unavailable");
      case ScriptedFailure::kTimeout:
        throw Timeout("scripted: request timed out");
      case ScriptedFailure::kRateLimited:
        throw RateLimited("scripted: rate limited");
    }
  }
  return std::move(next.text);
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

std::vector<ScriptedBackend::Call> ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::vector<ScriptedResponse> ScriptedBackend::load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open backend script " + path.string());
  std::vector<ScriptedResponse> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (j.contains("text") && j["text"].is_string()) {
      script.push_back(ScriptedResponse::ok(j["text"].get<std::string>()));
    } else if (j.contains("graph")) {
      script.push_back(ScriptedResponse::ok(j["graph"].dump()));
    } else if (j.contains("error") && j["error"].is_string()) {
      const auto kind = j["error"].get<std::string>();
      if (kind == "unavailable") {
        script.push_back(ScriptedResponse::fail(ScriptedFailure::kUnavailable));
      } else if (kind == "timeout") {
        script.push_back(ScriptedResponse::fail(ScriptedFailure::kTimeout));
      } else if (kind == "rate_limited") {
        script.push_back(ScriptedResponse::fail(ScriptedFailure::kRateLimited));
      } else {
        throw ConfigError(where + ": unknown scripted error '" + kind + "'");
      }
    } else {
      throw ConfigError(where + ": expected one of \"text\", \"graph\" or \"error\"");
    }
  }
  return script;
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("HTTP backend endpoint is not configured");
  if (config_.model.empty()) throw ConfigError("HTTP backend model is not configured");
}

nlohmann::json HttpChatBackend::request_body(const BackendRequest& request) const {
  nlohmann::json body = {{"model", config_.model}, {"temperature", request.temperature}};
  body["messages"] = conversation_to_json(request.messages);
  if (request.output_schema) {
    body["tools"] = nlohmann::json::array({{
        {"type", "function"},
        {"function",
         {{"name", kToolName},
          {"description", "Record the knowledge graph extracted from the log event."},
          {"parameters", *request.output_schema}}},
    }});
    body["tool_choice"] = {{"type", "function"}, {"function", {{"name", kToolName}}}};
  }
  return body;
}

std::string HttpChatBackend::extract_output(const nlohmann::json& response, bool structured) {
  try {
    const auto& message = response.at("choices").at(0).at("message");
    if (structured && message.contains("tool_calls") && message["tool_calls"].is_array() &&
        !message["tool_calls"].empty()) {
      const auto& args = message["tool_calls"][0].at("function").at("arguments");
      return args.is_string() ? args.get<std::string>() : args.dump();
    }
    const auto& content = message.at("content");
    return content.is_string() ? content.get<std::string>() : std::string();
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailable(std::string("malformed chat-completions response: ") + e.what());
  }
}

std::string HttpChatBackend::complete(const BackendRequest& request) {
  const auto target = detail::split_url(config_.endpoint);
  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(target.base_path + config_.path, headers, request_body(request).dump(),
                         "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write) {
      throw Timeout("chat request timed out or was cut off: " + httplib::to_string(err));
    }
    throw BackendUnavailable("chat request failed: " + httplib::to_string(err));
  }
  if (res->status == 429) throw RateLimited("chat endpoint returned HTTP 429");
  if (res->status == 408 || res->status == 504) {
    throw Timeout("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw BackendUnavailable("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendUnavailable(std::string("chat endpoint returned invalid JSON: ") + e.what());
  }
  return extract_output(body, request.output_schema != nullptr);
}

void BackendRegistry::add(std::string id, std::shared_ptr<GenerationBackend> backend) {
  backends_[std::move(id)] = std::move(backend);
}

bool BackendRegistry::contains(const std::string& id) const { return backends_.contains(id); }

GenerationBackend& BackendRegistry::get(const std::string& id) const {
  const auto it = backends_.find(id);
  if (it == backends_.end()) throw ConfigError("no generation backend registered as '" + id + "'");
  return *it->second;
}

}  // namespace logkg
