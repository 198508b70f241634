#include "membias/chat_client.hpp"

#include <algorithm>
#include <thread>

#include "httplib.h"
#include "membias/common.hpp"

namespace membias {
namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError("endpoint URL must include a scheme: '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw InputError("unsupported URL scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
    out.path = "/";
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  if (out.scheme_host_port.size() <= scheme_end + 3) {
    throw InputError("endpoint URL has no host: '" + url + "'");
  }
  return out;
}

RequestLimiter::RequestLimiter(std::size_t max_in_flight, std::size_t tokens_per_minute)
    : max_in_flight_(std::max<std::size_t>(1, max_in_flight)),
      tokens_per_minute_(tokens_per_minute) {}

RequestLimiter::Permit RequestLimiter::acquire(std::size_t estimated_tokens) {
  std::unique_lock lock(mutex_);
  for (;;) {
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    if (tokens_per_minute_ == 0) break;
    const auto now = std::chrono::steady_clock::now();
    while (!window_.empty() && now - window_.front().first >= std::chrono::minutes(1)) {
      window_.pop_front();
    }
    std::size_t used = 0;
    for (const auto& [t, n] : window_) used += n;
    // A single request larger than the budget is let through on an empty window.
    if (window_.empty() || used + estimated_tokens <= tokens_per_minute_) {
      window_.emplace_back(now, estimated_tokens);
      break;
    }
    const auto wake = window_.front().first + std::chrono::minutes(1);
    cv_.wait_until(lock, wake);
  }
  ++in_flight_;
  std::size_t peak = peak_.load();
  while (in_flight_ > peak && !peak_.compare_exchange_weak(peak, in_flight_)) {
  }
  return Permit(*this);
}

void RequestLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  cv_.notify_all();
}

JsonPoster::JsonPoster(HttpEndpoint endpoint, RetryPolicy retry, std::size_t max_in_flight,
                       std::size_t tokens_per_minute)
    : endpoint_(std::move(endpoint)),
      url_(parse_url(endpoint_.url)),
      retry_(retry),
      limiter_(max_in_flight, tokens_per_minute) {}

JsonPoster::~JsonPoster() = default;

JsonPoster::Result JsonPoster::post(const nlohmann::json& body, std::size_t estimated_tokens) {
  const std::string payload = body.dump();
  auto permit = limiter_.acquire(estimated_tokens);

  httplib::Client client(url_.scheme_host_port);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(endpoint_.timeout);
  client.set_write_timeout(endpoint_.timeout);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }

  std::string last_error;
  auto backoff = retry_.base_backoff;
  for (int attempt = 1; attempt <= std::max(1, retry_.max_attempts); ++attempt) {
    auto res = client.Post(url_.path, headers, payload, "application/json");
    if (res) {
      if (res->status >= 200 && res->status < 300) {
        try {
          return {nlohmann::json::parse(res->body), attempt};
        } catch (const nlohmann::json::parse_error& e) {
          throw BackendError(std::string("response is not JSON: ") + e.what());
        }
      }
      if (!retryable_status(res->status)) {
        throw BackendExhausted("request to " + endpoint_.url + " failed with HTTP " +
                               std::to_string(res->status) + " (not retryable)");
      }
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt < retry_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, retry_.max_backoff);
    }
  }
  throw BackendExhausted("request to " + endpoint_.url + " failed after " +
                         std::to_string(retry_.max_attempts) + " attempts: " + last_error);
}

ChatClient::ChatClient(RemoteChatConfig config)
    : config_(std::move(config)),
      poster_(HttpEndpoint{config_.endpoint, config_.api_key}, config_.retry,
              config_.max_in_flight, config_.tokens_per_minute) {}

ChatResponse ChatClient::chat(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user}});
  const nlohmann::json body = {
      {"model", request.model}, {"messages", messages}, {"temperature", config_.temperature}};

  // Rough estimate: four characters per token.
  const std::size_t estimate = (request.system.size() + request.user.size()) / 4 + 1;
  auto result = poster_.post(body, estimate);
  try {
    const auto& content = result.body.at("choices").at(0).at("message").at("content");
    return {content.get<std::string>(), result.attempts};
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion: ") + e.what());
  }
}

}  // namespace membias
