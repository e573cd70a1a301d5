#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stylo/embed.h"

namespace stylo {

struct RemoteEmbedderOptions {
  // Base URL of the service, e.g. "http://127.0.0.1:8077". A trailing path
  // is prefixed to /embed and /health.
  std::string endpoint;
  // Texts per POST /embed request; larger inputs are split.
  std::size_t max_batch = 64;
  // Upper bound on concurrently outstanding requests for one embed() call.
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
};

struct ServiceHealth {
  std::string status;
  std::string provider_id;
  std::size_t dim = 0;
};

// Client for the embedding service wire protocol:
//   POST /embed   {"texts": [...]} -> {"vectors": [[...]], "dim": D,
//                                      "provider_id": "..."}
//   GET  /health  -> {"status": "ok", "provider_id": "...", "dim": D}
// A call either returns every vector in request order or throws; no partial
// results are returned. TransportError for connection failures,
// ProtocolError for responses that break the contract, both naming the
// failing batch.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteEmbedderOptions options);

  std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const override;
  std::string provider_id() const override;

  ServiceHealth health() const;
  const RemoteEmbedderOptions& options() const { return options_; }

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                           std::size_t batch_index) const;

  RemoteEmbedderOptions options_;
  std::string scheme_host_port_;
  std::string base_path_;
};

// Convenience wrapper used by the CLI.
std::vector<EmbeddingVector> remote_embed(std::span<const std::string> texts,
                                          const std::string& endpoint);

}  // namespace stylo
