#ifndef MEMBIAS_EMBEDDING_HPP_
#define MEMBIAS_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace membias {

using EmbeddingVector = std::vector<double>;

// dot(a,b) / (|a| |b|), clamped to [-1, 1].
// Throws std::invalid_argument on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class ProviderKind { DeterministicHashing, FileCache, Remote };

std::string_view to_string(ProviderKind k);
ProviderKind parse_provider_kind(std::string_view text);

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::DeterministicHashing;
  std::string model_id = "feature-hashing-v1";
  std::size_t dimension = 384;
  std::string endpoint;  // Remote only
  std::size_t max_in_flight = 4;
  int max_attempts = 4;

  // Directory name used under the cache root.
  std::string cache_namespace() const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const EmbeddingProviderConfig& config() const = 0;
  // Texts are already validated as nonempty.
  virtual std::vector<EmbeddingVector> embed_many(std::span<const std::string> texts) = 0;
};

// Signed feature hashing over lowercased alphanumeric tokens, L2-normalized.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 384);
  explicit HashingEmbedder(EmbeddingProviderConfig config);

  const EmbeddingProviderConfig& config() const override { return config_; }
  EmbeddingVector embed(std::string_view text) const;
  std::vector<EmbeddingVector> embed_many(std::span<const std::string> texts) override;

 private:
  EmbeddingProviderConfig config_;
};

// POSTs {"model": ..., "input": [...]} and expects {"data": [{"embedding": [...]}, ...]}.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(EmbeddingProviderConfig config, std::string api_key);
  ~RemoteEmbedder() override;

  const EmbeddingProviderConfig& config() const override { return config_; }
  std::vector<EmbeddingVector> embed_many(std::span<const std::string> texts) override;

 private:
  struct Impl;
  EmbeddingProviderConfig config_;
  std::unique_ptr<Impl> impl_;
};

// Content-addressed vectors under <root>/<provider namespace>/<hash>.
// Concurrent readers, serialized writers.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path root);

  std::optional<EmbeddingVector> lookup(const EmbeddingProviderConfig& provider,
                                        std::string_view text) const;
  void store(const EmbeddingProviderConfig& provider, std::string_view text,
             const EmbeddingVector& vec);
  std::filesystem::path path_for(const EmbeddingProviderConfig& provider,
                                 std::string_view text) const;

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
};

// Serves vectors only from a cache populated earlier (e.g. by `membias embed`
// with a remote provider). A miss is an error.
class CachedOnlyEmbedder final : public EmbeddingProvider {
 public:
  CachedOnlyEmbedder(EmbeddingProviderConfig config, std::filesystem::path cache_root);

  const EmbeddingProviderConfig& config() const override { return config_; }
  std::vector<EmbeddingVector> embed_many(std::span<const std::string> texts) override;

 private:
  EmbeddingProviderConfig config_;
  EmbeddingCache cache_;
};

// Cache key uses the provider identity and a content hash of the text. For the
// file-cache provider the identity is that of the provider that filled it.
std::string embedding_cache_key(const EmbeddingProviderConfig& provider, std::string_view text);

EmbeddingVector embed(std::string_view text, EmbeddingProvider& provider);

// Order-preserving; cache hits skip the provider. Throws InputError naming the
// first empty text's index.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         EmbeddingProvider& provider,
                                         EmbeddingCache* cache = nullptr);

// API key for the remote provider is read from MEMBIAS_EMBEDDING_API_KEY
// (falling back to MEMBIAS_API_KEY).
std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& config,
    const std::optional<std::filesystem::path>& cache_root);

}  // namespace membias

#endif  // MEMBIAS_EMBEDDING_HPP_
