#include "membias/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "membias/chat_client.hpp"
#include "membias/common.hpp"
#include "membias/rng.hpp"
#include "membias/text.hpp"

namespace membias {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero-norm vector");
  // sqrt(na)*sqrt(nb) rather than sqrt(na*nb): keeps sim(a,b) == sim(b,a) bitwise.
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(sim, -1.0, 1.0);
}

std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::DeterministicHashing: return "hashing";
    case ProviderKind::FileCache: return "file";
    case ProviderKind::Remote: return "remote";
  }
  return "hashing";
}

ProviderKind parse_provider_kind(std::string_view text) {
  const std::string v = to_lower(trim(text));
  if (v == "hashing") return ProviderKind::DeterministicHashing;
  if (v == "file" || v == "file-cache") return ProviderKind::FileCache;
  if (v == "remote") return ProviderKind::Remote;
  throw InputError("unknown embedding provider '" + std::string(text) +
                   "' (expected hashing|file|remote)");
}

std::string EmbeddingProviderConfig::cache_namespace() const {
  // A file cache serves vectors produced by some other provider; the
  // namespace is the producing model, not the cache itself.
  std::string name = model_id + "-" + std::to_string(dimension);
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return name;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension)
    : HashingEmbedder(EmbeddingProviderConfig{ProviderKind::DeterministicHashing,
                                              "feature-hashing-v1", dimension, {}, 1, 1}) {}

HashingEmbedder::HashingEmbedder(EmbeddingProviderConfig config) : config_(std::move(config)) {
  if (config_.dimension == 0) throw InputError("embedding dimension must be positive");
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
  EmbeddingVector v(config_.dimension, 0.0);
  for (const auto& tok : tokenize(text)) {
    const std::uint64_t h = splitmix64(fnv1a64(tok.lower));
    const std::size_t bucket = h % config_.dimension;
    v[bucket] += ((h >> 63) & 1U) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    throw InputError("text has no hashable content: '" + std::string(text.substr(0, 40)) + "'");
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<EmbeddingVector> HashingEmbedder::embed_many(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out(texts.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(texts.size()); ++i) {
    try {
      out[i] = embed(texts[i]);
    } catch (...) {
#pragma omp critical(membias_embed_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct RemoteEmbedder::Impl {
  Impl(HttpEndpoint endpoint, RetryPolicy retry, std::size_t max_in_flight)
      : poster(std::move(endpoint), retry, max_in_flight) {}
  JsonPoster poster;
};

RemoteEmbedder::RemoteEmbedder(EmbeddingProviderConfig config, std::string api_key)
    : config_(std::move(config)) {
  RetryPolicy retry;
  retry.max_attempts = config_.max_attempts;
  impl_ = std::make_unique<Impl>(HttpEndpoint{config_.endpoint, std::move(api_key)}, retry,
                                 config_.max_in_flight);
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::vector<EmbeddingVector> RemoteEmbedder::embed_many(std::span<const std::string> texts) {
  constexpr std::size_t kBatch = 64;
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += kBatch) {
    const std::size_t end = std::min(texts.size(), start + kBatch);
    nlohmann::json input = nlohmann::json::array();
    for (std::size_t i = start; i < end; ++i) input.push_back(texts[i]);
    auto result = impl_->poster.post({{"model", config_.model_id}, {"input", input}});
    try {
      const auto& data = result.body.at("data");
      if (data.size() != end - start) {
        throw BackendError("embedding response has " + std::to_string(data.size()) +
                           " vectors for " + std::to_string(end - start) + " inputs");
      }
      for (const auto& item : data) {
        auto vec = item.at("embedding").get<EmbeddingVector>();
        if (vec.size() != config_.dimension) {
          throw BackendError("embedding dimension " + std::to_string(vec.size()) +
                             " does not match configured " + std::to_string(config_.dimension));
        }
        if (!std::all_of(vec.begin(), vec.end(), [](double x) { return std::isfinite(x); })) {
          throw BackendError("embedding contains non-finite values");
        }
        out.push_back(std::move(vec));
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("malformed embedding response: ") + e.what());
    }
  }
  return out;
}

std::string embedding_cache_key(const EmbeddingProviderConfig& provider, std::string_view text) {
  std::uint64_t h = fnv1a64(provider.model_id);
  h = fnv1a64(std::to_string(provider.dimension), h ^ 0x1f);
  const std::uint64_t a = fnv1a64(text, h);
  const std::uint64_t b = splitmix64(fnv1a64(text, splitmix64(h)));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path EmbeddingCache::path_for(const EmbeddingProviderConfig& provider,
                                               std::string_view text) const {
  return root_ / "embeddings" / provider.cache_namespace() / embedding_cache_key(provider, text);
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const EmbeddingProviderConfig& provider,
                                                      std::string_view text) const {
  const auto path = path_for(provider, text);
  std::shared_lock lock(mutex_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  EmbeddingVector v(provider.dimension);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(v.size() * sizeof(double))) return std::nullopt;
  return v;
}

void EmbeddingCache::store(const EmbeddingProviderConfig& provider, std::string_view text,
                           const EmbeddingVector& vec) {
  const auto path = path_for(provider, text);
  std::unique_lock lock(mutex_);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed to write embedding cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

CachedOnlyEmbedder::CachedOnlyEmbedder(EmbeddingProviderConfig config,
                                       std::filesystem::path cache_root)
    : config_(std::move(config)), cache_(std::move(cache_root)) {}

std::vector<EmbeddingVector> CachedOnlyEmbedder::embed_many(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto v = cache_.lookup(config_, texts[i]);
    if (!v) {
      throw InputError("no cached embedding for text #" + std::to_string(i) + " under " +
                       cache_.path_for(config_, texts[i]).parent_path().string());
    }
    out.push_back(std::move(*v));
  }
  return out;
}

EmbeddingVector embed(std::string_view text, EmbeddingProvider& provider) {
  const std::string s(text);
  return embed_batch(std::span<const std::string>(&s, 1), provider, nullptr).front();
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         EmbeddingProvider& provider, EmbeddingCache* cache) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (trim(texts[i]).empty()) {
      throw InputError("cannot embed empty text at index " + std::to_string(i));
    }
  }
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> missing;
  if (cache) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (auto hit = cache->lookup(provider.config(), texts[i])) {
        out[i] = std::move(*hit);
      } else {
        missing.push_back(i);
      }
    }
  } else {
    missing.resize(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) missing[i] = i;
  }
  if (missing.empty()) return out;

  std::vector<std::string> pending;
  pending.reserve(missing.size());
  for (std::size_t i : missing) pending.push_back(texts[i]);
  auto computed = provider.embed_many(pending);
  if (computed.size() != pending.size()) {
    throw BackendError("embedding provider returned " + std::to_string(computed.size()) +
                       " vectors for " + std::to_string(pending.size()) + " texts");
  }
  for (std::size_t j = 0; j < missing.size(); ++j) {
    if (cache) cache->store(provider.config(), pending[j], computed[j]);
    out[missing[j]] = std::move(computed[j]);
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& config,
    const std::optional<std::filesystem::path>& cache_root) {
  switch (config.kind) {
    case ProviderKind::DeterministicHashing:
      return std::make_unique<HashingEmbedder>(config);
    case ProviderKind::FileCache:
      if (!cache_root) throw InputError("file-cache embedding provider needs a cache directory");
      return std::make_unique<CachedOnlyEmbedder>(config, *cache_root);
    case ProviderKind::Remote: {
      if (config.endpoint.empty()) throw InputError("remote embedding provider needs an endpoint");
      const char* key = std::getenv("MEMBIAS_EMBEDDING_API_KEY");
      if (!key) key = std::getenv("MEMBIAS_API_KEY");
      return std::make_unique<RemoteEmbedder>(config, key ? key : "");
    }
  }
  throw InputError("unknown embedding provider");
}

}  // namespace membias
