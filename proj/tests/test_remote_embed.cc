#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stylo/embed.h"
#include "stylo/error.h"
#include "stylo/features.h"
#include "stylo/remote_embed.h"
#include "test_support.h"

namespace stylo {
namespace {

enum class Mode { kOk, kShortCount, kBadRequest, kGarbage, kRagged };

// In-process stand-in for the embedding service. Vectors come from the
// builtin embedder so results can be compared directly.
class FakeService {
 public:
  FakeService() {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      const auto body = nlohmann::json::parse(req.body);
      const auto texts = body.at("texts").get<std::vector<std::string>>();
      {
        std::lock_guard lock(mutex_);
        batch_sizes_.push_back(texts.size());
      }
      switch (mode_.load()) {
        case Mode::kBadRequest:
          res.status = 400;
          res.set_content(R"({"error":"texts must be non-empty"})", "application/json");
          return;
        case Mode::kGarbage:
          res.set_content("not json", "text/plain");
          return;
        default:
          break;
      }
      auto vectors = builtin_embed(texts);
      nlohmann::json out;
      out["dim"] = kBuiltinDim;
      out["provider_id"] = "fake-service";
      out["vectors"] = nlohmann::json::array();
      for (const auto& v : vectors) out["vectors"].push_back(v.values);
      if (mode_ == Mode::kShortCount) out["vectors"].erase(out["vectors"].size() - 1);
      if (mode_ == Mode::kRagged) out["vectors"][0].erase(0);
      res.set_content(out.dump(), "application/json");
    });
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","provider_id":"fake-service","dim":256})",
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  void set_mode(Mode m) { mode_ = m; }
  int requests() const { return requests_; }
  std::vector<std::size_t> batch_sizes() {
    std::lock_guard lock(mutex_);
    auto out = batch_sizes_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<Mode> mode_{Mode::kOk};
  std::atomic<int> requests_{0};
  std::mutex mutex_;
  std::vector<std::size_t> batch_sizes_;
};

RemoteEmbedder client(const std::string& endpoint, std::size_t batch = 64) {
  return RemoteEmbedder(RemoteEmbedderOptions{.endpoint = endpoint,
                                              .max_batch = batch,
                                              .max_in_flight = 3,
                                              .timeout = std::chrono::milliseconds(2000)});
}

const std::vector<std::string> kTexts = {"alpha beta", "gamma delta", "epsilon",
                                         "zeta eta theta", "iota"};

TEST(RemoteEmbedTest, ReturnsVectorsInOrder) {
  FakeService service;
  const auto got = client(service.endpoint()).embed(kTexts);
  const auto want = builtin_embed(kTexts);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].values, want[i].values);
    EXPECT_EQ(got[i].provider_id, "fake-service");
  }
}

TEST(RemoteEmbedTest, SplitsLargeInputsIntoBatches) {
  FakeService service;
  const auto got = client(service.endpoint(), 2).embed(kTexts);
  EXPECT_EQ(service.requests(), 3);
  EXPECT_EQ(service.batch_sizes(), (std::vector<std::size_t>{1, 2, 2}));
  const auto want = builtin_embed(kTexts);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].values, want[i].values);
}

TEST(RemoteEmbedTest, HealthAndProviderId) {
  FakeService service;
  const auto c = client(service.endpoint());
  const auto h = c.health();
  EXPECT_EQ(h.status, "ok");
  EXPECT_EQ(h.dim, 256u);
  EXPECT_EQ(c.provider_id(), "fake-service");
}

TEST(RemoteEmbedTest, CountMismatchIsProtocolError) {
  FakeService service;
  service.set_mode(Mode::kShortCount);
  EXPECT_THROW(client(service.endpoint()).embed(kTexts), ProtocolError);
}

TEST(RemoteEmbedTest, DimensionMismatchIsProtocolError) {
  FakeService service;
  service.set_mode(Mode::kRagged);
  EXPECT_THROW(client(service.endpoint()).embed(kTexts), ProtocolError);
}

TEST(RemoteEmbedTest, RejectedRequestCarriesServiceMessage) {
  FakeService service;
  service.set_mode(Mode::kBadRequest);
  try {
    client(service.endpoint()).embed(kTexts);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("400"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("texts must be non-empty"), std::string::npos);
  }
}

TEST(RemoteEmbedTest, MalformedBodyIsProtocolError) {
  FakeService service;
  service.set_mode(Mode::kGarbage);
  EXPECT_THROW(client(service.endpoint()).embed(kTexts), ProtocolError);
}

TEST(RemoteEmbedTest, UnreachableEndpointIsTransportError) {
  const int port = testing::closed_port();
  const std::string endpoint = "http://127.0.0.1:" + std::to_string(port);
  try {
    client(endpoint).embed(kTexts);
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find(endpoint), std::string::npos);
  }
}

TEST(RemoteEmbedTest, EmptyTextIsRejectedBeforeSending) {
  FakeService service;
  const std::vector<std::string> texts = {"fine", "   "};
  EXPECT_THROW(client(service.endpoint()).embed(texts), PreconditionError);
  EXPECT_EQ(service.requests(), 0);
  EXPECT_THROW(RemoteEmbedder(RemoteEmbedderOptions{}), PreconditionError);
}

TEST(RemoteEmbedTest, FeaturesMatchBuiltinThroughService) {
  FakeService service;
  const Document doc{"d1", "Graph learning", Branch::kComputerEng, Section::kIntroduction,
                     Source::kGpt,
                     "Graph learning is popular. It scales.\n\nWe study graph models here."};
  const auto remote = extract_all(doc, client(service.endpoint()));
  const auto local = extract_all(doc, BuiltinEmbedder{});
  EXPECT_EQ(remote, local);
}

}  // namespace
}  // namespace stylo
