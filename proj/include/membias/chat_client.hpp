#ifndef MEMBIAS_CHAT_CLIENT_HPP_
#define MEMBIAS_CHAT_CLIENT_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"

namespace membias {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
};

struct HttpEndpoint {
  std::string url;  // scheme://host[:port]/path
  std::string api_key;
  std::chrono::seconds timeout{120};
};

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};
ParsedUrl parse_url(const std::string& url);

// Caps concurrent requests and, optionally, estimated tokens per minute.
class RequestLimiter {
 public:
  RequestLimiter(std::size_t max_in_flight, std::size_t tokens_per_minute);

  class Permit {
   public:
    explicit Permit(RequestLimiter& owner) : owner_(&owner) {}
    Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit() {
      if (owner_) owner_->release();
    }

   private:
    RequestLimiter* owner_;
  };

  // Blocks until a slot (and token budget) is available.
  Permit acquire(std::size_t estimated_tokens);
  std::size_t peak_in_flight() const { return peak_.load(); }
  std::size_t max_in_flight() const { return max_in_flight_; }

 private:
  void release();

  std::size_t max_in_flight_;
  std::size_t tokens_per_minute_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::atomic<std::size_t> peak_{0};
  std::deque<std::pair<std::chrono::steady_clock::time_point, std::size_t>> window_;
};

// POSTs JSON with bearer auth. Transport errors, 408, 429 and 5xx are retried
// with exponential backoff; other 4xx fail immediately.
class JsonPoster {
 public:
  JsonPoster(HttpEndpoint endpoint, RetryPolicy retry, std::size_t max_in_flight,
             std::size_t tokens_per_minute = 0);
  ~JsonPoster();

  struct Result {
    nlohmann::json body;
    int attempts = 0;
  };
  Result post(const nlohmann::json& body, std::size_t estimated_tokens = 0);

  const RequestLimiter& limiter() const { return limiter_; }

 private:
  HttpEndpoint endpoint_;
  ParsedUrl url_;
  RetryPolicy retry_;
  RequestLimiter limiter_;
};

struct RemoteChatConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::string model_small = "gpt-4.1-nano";  // semantic memory, personalized query
  std::string model_large = "gpt-4.1";       // summary, job description, re-rank, classify
  std::size_t max_in_flight = 8;
  std::size_t tokens_per_minute = 0;  // 0 = unlimited
  double temperature = 0.0;
  RetryPolicy retry;
};

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
};

struct ChatResponse {
  std::string text;
  int attempts = 0;
};

// Chat-completions client: {"model", "messages", "temperature"} in,
// choices[0].message.content out.
class ChatClient {
 public:
  explicit ChatClient(RemoteChatConfig config);

  ChatResponse chat(const ChatRequest& request);
  const RemoteChatConfig& config() const { return config_; }
  std::size_t peak_in_flight() const { return poster_.limiter().peak_in_flight(); }

 private:
  RemoteChatConfig config_;
  JsonPoster poster_;
};

}  // namespace membias

#endif  // MEMBIAS_CHAT_CLIENT_HPP_
