#include "stylo/remote_embed.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stylo/error.h"
#include "text_util.h"

namespace stylo {
namespace {

httplib::Client make_client(const std::string& scheme_host_port,
                            std::chrono::milliseconds timeout) {
  httplib::Client client(scheme_host_port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

std::string describe(const httplib::Result& result) {
  return httplib::to_string(result.error());
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options)
    : options_(std::move(options)) {
  if (options_.endpoint.empty()) {
    throw PreconditionError("remote embedder needs an endpoint URL");
  }
  if (options_.max_batch == 0 || options_.max_in_flight == 0) {
    throw PreconditionError("max_batch and max_in_flight must be positive");
  }
  std::string url = options_.endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  if (path_begin == std::string::npos) {
    scheme_host_port_ = url;
  } else {
    scheme_host_port_ = url.substr(0, path_begin);
    base_path_ = url.substr(path_begin);
  }
  if (scheme_end == std::string::npos) {
    scheme_host_port_ = "http://" + scheme_host_port_;
  }
}

std::string RemoteEmbedder::provider_id() const {
  return health().provider_id;
}

ServiceHealth RemoteEmbedder::health() const {
  auto client = make_client(scheme_host_port_, options_.timeout);
  const auto result = client.Get(base_path_ + "/health");
  if (!result) {
    throw TransportError("cannot reach embedding service at " +
                         options_.endpoint + ": " + describe(result));
  }
  if (result->status != 200) {
    throw ProtocolError("embedding service at " + options_.endpoint +
                        " answered /health with status " +
                        std::to_string(result->status));
  }
  try {
    const auto body = nlohmann::json::parse(result->body);
    ServiceHealth health;
    health.status = body.at("status").get<std::string>();
    health.provider_id = body.at("provider_id").get<std::string>();
    health.dim = body.at("dim").get<std::size_t>();
    return health;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed /health response from " +
                        options_.endpoint + ": " + e.what());
  }
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    std::span<const std::string> texts, std::size_t batch_index) const {
  const std::string where = "batch " + std::to_string(batch_index) + " (" +
                            options_.endpoint + ")";
  nlohmann::json request;
  request["texts"] = std::vector<std::string>(texts.begin(), texts.end());

  auto client = make_client(scheme_host_port_, options_.timeout);
  const auto result =
      client.Post(base_path_ + "/embed", request.dump(), "application/json");
  if (!result) {
    throw TransportError("cannot reach embedding service, " + where + ": " +
                         describe(result));
  }

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError("malformed response, " + where + ": " + e.what());
  }
  if (result->status != 200) {
    std::string message = "status " + std::to_string(result->status);
    if (body.is_object() && body.contains("error") &&
        body["error"].is_string()) {
      message += ": " + body["error"].get<std::string>();
    }
    throw ProtocolError("embedding service rejected " + where + ", " + message);
  }

  try {
    const auto& vectors = body.at("vectors");
    const auto dim = body.at("dim").get<std::size_t>();
    const auto provider = body.at("provider_id").get<std::string>();
    if (!vectors.is_array() || vectors.size() != texts.size()) {
      throw ProtocolError("expected " + std::to_string(texts.size()) +
                          " vectors, got " +
                          std::to_string(vectors.is_array() ? vectors.size()
                                                            : 0) +
                          ", " + where);
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      EmbeddingVector v;
      v.provider_id = provider;
      v.values = vectors[i].get<std::vector<double>>();
      if (v.values.size() != dim) {
        throw ProtocolError("vector " + std::to_string(i) + " has dim " +
                            std::to_string(v.values.size()) +
                            " but response declares " + std::to_string(dim) +
                            ", " + where);
      }
      out.push_back(std::move(v));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed response, " + where + ": " + e.what());
  }
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(
    std::span<const std::string> texts) const {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (trim(texts[i]).empty()) {
      throw PreconditionError("cannot embed empty text at index " +
                              std::to_string(i));
    }
  }
  if (texts.empty()) return {};

  const std::size_t batch_count =
      (texts.size() + options_.max_batch - 1) / options_.max_batch;
  std::vector<std::vector<EmbeddingVector>> batches(batch_count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<std::size_t> failed_batch;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= batch_count) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      const std::size_t begin = b * options_.max_batch;
      const std::size_t size = std::min(options_.max_batch, texts.size() - begin);
      try {
        batches[b] = embed_batch(texts.subspan(begin, size), b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failed_batch || b < *failed_batch) {
          failed_batch = b;
          error = std::current_exception();
        }
      }
    }
  };

  const std::size_t workers = std::min(options_.max_in_flight, batch_count);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& batch : batches) {
    for (auto& v : batch) {
      if (!out.empty() && v.dim() != out.front().dim()) {
        throw ProtocolError("dimension changed across batches (" +
                            std::to_string(out.front().dim()) + " vs " +
                            std::to_string(v.dim()) + ")");
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<EmbeddingVector> remote_embed(std::span<const std::string> texts,
                                          const std::string& endpoint) {
  return RemoteEmbedder(RemoteEmbedderOptions{.endpoint = endpoint})
      .embed(texts);
}

}  // namespace stylo
