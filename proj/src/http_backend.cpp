#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "logbatch/errors.hpp"
#include "logbatch/llm_client.hpp"

namespace logbatch {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : std::move(fallback);
}

bool is_retryable(int status) { return status == 0 || status == 429 || status >= 500; }

// Returns "{origin}" and "{path prefix}" for httplib.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpSettings HttpSettings::from_env() {
  HttpSettings s;
  s.base_url = env_or("LLM_BASE_URL", "");
  s.api_key = env_or("LLM_API_KEY", "");
  s.model = env_or("LLM_MODEL", s.model);
  if (s.base_url.empty()) throw ConfigError("LLM_BASE_URL", "LLM_BASE_URL is not set");
  if (s.api_key.empty()) throw ConfigError("LLM_API_KEY", "LLM_API_KEY is not set");
  return s;
}

HttpTransport make_httplib_transport(std::chrono::seconds timeout) {
  return [timeout](const HttpRequest& req) {
    HttpResponse out;
    const auto [origin, path] = split_url(req.url);
    try {
      httplib::Client client(origin);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      httplib::Headers headers;
      for (const auto& [k, v] : req.headers) {
        if (k != "Content-Type") headers.emplace(k, v);
      }
      auto res = client.Post(path.empty() ? "/" : path, headers, req.body, "application/json");
      if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
      }
      out.status = res->status;
      out.body = res->body;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  };
}

HttpBackend::HttpBackend(HttpSettings settings, HttpTransport transport, Sleeper sleeper)
    : settings_(std::move(settings)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      in_flight_(std::clamp(settings_.max_in_flight, 1, 1024)) {
  if (!transport_) transport_ = make_httplib_transport(settings_.timeout);
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  while (!settings_.base_url.empty() && settings_.base_url.back() == '/') settings_.base_url.pop_back();
}

std::string HttpBackend::request_body(const PromptSpec& prompt) const {
  nlohmann::json body = {
      {"model", settings_.model},
      {"temperature", settings_.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", prompt.instruction}},
                              {{"role", "user"}, {"content", prompt.user_message}}})},
  };
  return body.dump();
}

LlmReply HttpBackend::complete(const PromptSpec& prompt) {
  HttpRequest req;
  req.url = settings_.base_url + "/chat/completions";
  req.headers = {{"Authorization", "Bearer " + settings_.api_key}, {"Content-Type", "application/json"}};
  req.body = request_body(prompt);

  struct Permit {
    std::counting_semaphore<1024>& sem;
    explicit Permit(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
    ~Permit() { sem.release(); }
  } permit(in_flight_);

  std::string last_error;
  const int max_attempts = 1 + std::max(0, settings_.max_retries);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(settings_.backoff_base * (1LL << (attempt - 2)));
    const HttpResponse res = transport_(req);
    if (res.status == 200) {
      try {
        const auto json = nlohmann::json::parse(res.body);
        LlmReply reply;
        reply.raw_text = json.at("choices").at(0).at("message").at("content").get<std::string>();
        reply.backend_id = id();
        reply.attempts = attempt;
        if (json.contains("usage") && json["usage"].is_object() && json["usage"].contains("prompt_tokens")) {
          reply.prompt_tokens = json["usage"]["prompt_tokens"].get<std::size_t>();
          reply.completion_tokens = json["usage"].value("completion_tokens", std::size_t{0});
        } else {
          reply.prompt_tokens = estimate_tokens(prompt.rendered);
          reply.completion_tokens = estimate_tokens(reply.raw_text);
          reply.tokens_estimated = true;
        }
        return reply;
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed chat-completions response: ") + e.what();
        continue;
      }
    }
    last_error = res.status == 0 ? "transport error: " + res.error
                                 : "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200);
    if (!is_retryable(res.status)) throw BackendUnavailable(last_error, attempt);
  }
  throw BackendUnavailable("backend unavailable after " + std::to_string(max_attempts) + " attempts: " + last_error,
                           max_attempts);
}

}  // namespace logbatch
