/* Copyright 2026 The refseg Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "refseg/backends.h"
#include "refseg/errors.h"
#include "refseg/http_backends.h"
#include "refseg/wire.h"

namespace refseg {
namespace {

using std::chrono::milliseconds;

TEST(WireTest, RequestRoundTrips) {
  const RgbImage img(3, 2, Rgb{10, 20, 30});
  wire::CompleteRequest c{"r1", "describe", {wire::EncodeImage(img)}, 0.0};
  EXPECT_EQ(wire::CompleteRequest::FromJson(c.ToJson()), c);
  EXPECT_EQ(wire::DecodeImagePayload(c.images[0]), img);
  EXPECT_EQ(c.ToJson()["schema_version"], wire::kSchemaVersion);
  wire::EmbedTextRequest t{"r2", "a red mug"};
  EXPECT_EQ(wire::EmbedTextRequest::FromJson(t.ToJson()), t);
  wire::EmbedImageRequest i{"r3", wire::EncodeImage(img)};
  EXPECT_EQ(wire::EmbedImageRequest::FromJson(i.ToJson()), i);
  wire::SegmentRequest s{"r4", wire::EncodeImage(img), {{1, 2}, {0, 0}}};
  EXPECT_EQ(wire::SegmentRequest::FromJson(s.ToJson()), s);
  EXPECT_EQ(s.ToJson()["points"], nlohmann::json({{1, 2}, {0, 0}}));
}

TEST(WireTest, UnknownFieldsIgnoredMissingRejected) {
  nlohmann::json j = wire::EmbedTextRequest{"r", "x"}.ToJson();
  j["future_field"] = {1, 2, 3};
  EXPECT_EQ(wire::EmbedTextRequest::FromJson(j).text, "x");
  j.erase("text");
  EXPECT_THROW(wire::EmbedTextRequest::FromJson(j), ParseError);
  EXPECT_THROW(wire::EmbedTextRequest::FromJson({{"schema_version", 99}, {"request_id", "r"},
                                                 {"text", "x"}}),
               ParseError);
  EXPECT_EQ(wire::ParseCompletion({{"completion", "yes"}, {"usage", 3}}), "yes");
  EXPECT_THROW(wire::ParseCompletion({{"text", "yes"}}), ParseError);
  EXPECT_THROW(wire::ParseEmbedding({{"embedding", nlohmann::json::array()}}), ParseError);
  const BinaryMask m = BinaryMask::FromBox(4, 4, {1, 1, 2, 2});
  EXPECT_EQ(wire::ParseMasks(wire::MasksToJson({m})), std::vector<BinaryMask>{m});
  const auto e = wire::ErrorReply::FromJson({{"code", "bad_request"}, {"message", "nope"}});
  EXPECT_EQ(e.code, "bad_request");
  EXPECT_EQ(e.message, "nope");
}

TEST(RetryTest, BackoffDoubles) {
  std::vector<milliseconds> slept;
  RetryPolicy p;
  p.sleep = [&](milliseconds d) { slept.push_back(d); };
  int calls = 0, attempts = 0;
  EXPECT_THROW(WithRetries(p, [&]() -> int { ++calls; throw BackendError("x", true); }, &attempts),
               BackendError);
  EXPECT_EQ(calls, 4);
  EXPECT_EQ(attempts, 4);
  EXPECT_EQ(slept, (std::vector<milliseconds>{milliseconds(1000), milliseconds(2000),
                                              milliseconds(4000)}));
  calls = 0;
  EXPECT_THROW(WithRetries(p, [&]() -> int { ++calls; throw BackendError("x", false); }),
               BackendError);
  EXPECT_EQ(calls, 1);
  calls = 0;
  EXPECT_EQ(WithRetries(p, [&] { return ++calls < 2 ? throw BackendError("x", true), 0 : 7; }), 7);
}

// Local HTTP server whose handlers the tests script.
class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  BackendDescriptor Descriptor(BackendRole role) const {
    BackendDescriptor d;
    d.role = role;
    d.backend_id = "local";
    d.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    d.timeout_seconds = 5;
    return d;
  }

  RetryPolicy Recording() {
    RetryPolicy p;
    p.sleep = [this](milliseconds d) {
      std::lock_guard<std::mutex> lock(mu_);
      slept_.push_back(d);
    };
    return p;
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::vector<milliseconds> slept_;
  std::atomic<int> hits_{0};
};

TEST_F(ServerTest, CompleteRetriesOnOverloadThenSucceeds) {
  nlohmann::json seen;
  server_.Post("/complete", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++hits_;
    if (n == 1) {
      res.status = 503;
      res.set_content(R"({"code":"overloaded","message":"busy"})", "application/json");
    } else if (n == 2) {
      res.status = 429;
      res.set_content("{}", "application/json");
    } else {
      seen = nlohmann::json::parse(req.body);
      res.set_content(R"({"completion":"A gray backrest","extra":1})", "application/json");
    }
  });
  HttpMllmClient client(Descriptor(BackendRole::kMllm), Recording());
  const RgbImage img(2, 2, Rgb{1, 1, 1});
  const std::vector<RgbImage> imgs = {img};
  EXPECT_EQ(client.Complete(imgs, "describe"), "A gray backrest");
  EXPECT_EQ(hits_, 3);
  EXPECT_EQ(client.transport().last_attempts(), 3);
  EXPECT_EQ(slept_, (std::vector<milliseconds>{milliseconds(1000), milliseconds(2000)}));
  const auto req = wire::CompleteRequest::FromJson(seen);
  EXPECT_EQ(req.prompt, "describe");
  EXPECT_EQ(req.temperature, 0.0);
  ASSERT_EQ(req.images.size(), 1u);
  EXPECT_EQ(wire::DecodeImagePayload(req.images[0]), img);
  EXPECT_FALSE(req.request_id.empty());
}

TEST_F(ServerTest, GivesUpAfterThreeRetries) {
  server_.Post("/complete", [&](const httplib::Request&, httplib::Response& res) {
    ++hits_;
    res.status = 500;
    res.set_content(R"({"code":"internal","message":"down"})", "application/json");
  });
  HttpMllmClient client(Descriptor(BackendRole::kMllm), Recording());
  try {
    client.Complete({}, "p");
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_TRUE(e.retryable());
    EXPECT_NE(std::string(e.what()).find("down"), std::string::npos);
  }
  EXPECT_EQ(hits_, 4);
  EXPECT_EQ(slept_, (std::vector<milliseconds>{milliseconds(1000), milliseconds(2000),
                                               milliseconds(4000)}));
}

TEST_F(ServerTest, ClientErrorIsNotRetried) {
  server_.Post("/complete", [&](const httplib::Request&, httplib::Response& res) {
    ++hits_;
    res.status = 400;
    res.set_content(R"({"code":"bad_request","message":"prompt too long"})", "application/json");
  });
  HttpMllmClient client(Descriptor(BackendRole::kMllm), Recording());
  try {
    client.Complete({}, "p");
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_FALSE(e.retryable());
    EXPECT_NE(std::string(e.what()).find("bad_request"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("prompt too long"), std::string::npos);
  }
  EXPECT_EQ(hits_, 1);
  EXPECT_TRUE(slept_.empty());
  const std::vector<RgbImage> five(5, RgbImage(1, 1));
  EXPECT_THROW(client.Complete(five, "p"), InvalidInputError);
}

TEST_F(ServerTest, EmbedderEnforcesDimensionAndNormalizes) {
  server_.Post("/embed_text", [&](const httplib::Request& req, httplib::Response& res) {
    const auto r = wire::EmbedTextRequest::FromJson(nlohmann::json::parse(req.body));
    const std::vector<float> v =
        r.text == "short" ? std::vector<float>{1, 0} : std::vector<float>{3, 4, 0};
    res.set_content(wire::EmbeddingToJson(v).dump(), "application/json");
  });
  server_.Post("/embed_image", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"embedding":[0,0,2]})", "application/json");
  });
  HttpEmbedderClient e(Descriptor(BackendRole::kEmbedder), Recording());
  const auto v = e.EmbedText("a chair");
  EXPECT_EQ(e.dimension(), 3);
  EXPECT_FLOAT_EQ(v[0], 0.6f);
  EXPECT_FLOAT_EQ(v[1], 0.8f);
  EXPECT_EQ(e.EmbedImage(RgbImage(2, 2)), (std::vector<float>{0, 0, 1}));
  EXPECT_THROW(e.EmbedText("short"), ParseError);
}

TEST_F(ServerTest, SegmenterValidatesMaskGrid) {
  server_.Post("/segment", [&](const httplib::Request& req, httplib::Response& res) {
    const auto r = wire::SegmentRequest::FromJson(nlohmann::json::parse(req.body));
    const RgbImage img = wire::DecodeImagePayload(r.image);
    const int w = r.points.size() == 1 ? img.width() : img.width() + 1;
    res.set_content(wire::MasksToJson({BinaryMask::Full(w, img.height())}).dump(),
                    "application/json");
  });
  HttpSegmenterClient s(Descriptor(BackendRole::kSegmenter), Recording());
  const RgbImage img(4, 3);
  const std::vector<Point> one = {{1, 1}}, two = {{0, 0}, {2, 2}};
  EXPECT_EQ(s.Segment(img, one), std::vector<BinaryMask>{BinaryMask::Full(4, 3)});
  EXPECT_THROW(s.Segment(img, two), DimensionError);
  EXPECT_THROW(s.Segment(img, {}), InvalidInputError);
}

TEST_F(ServerTest, MakeBackendsBuildsHttpClients) {
  server_.Post("/complete", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"completion":"ok"})", "application/json");
  });
  auto mllm = Descriptor(BackendRole::kMllm);
  auto emb = Descriptor(BackendRole::kEmbedder);
  emb.backend_id = "local-emb";
  const Backends b = MakeBackends({mllm, emb}, ".");
  ASSERT_TRUE(b.mllm && b.embedder);
  EXPECT_FALSE(b.segmenter);
  EXPECT_EQ(b.mllm->id(), "local");
  EXPECT_EQ(b.mllm->Complete({}, "p"), "ok");
}

TEST(DescriptorTest, Validation) {
  BackendDescriptor d;
  d.backend_id = "x";
  d.endpoint = "ftp://nowhere";
  EXPECT_THROW(MakeBackends({d}, "."), ConfigError);
  const auto j = DescriptorToJson(d);
  const auto back = DescriptorFromJson(j);
  EXPECT_EQ(back.backend_id, "x");
  EXPECT_EQ(back.endpoint, "ftp://nowhere");
  EXPECT_EQ(back.max_retries, 3);
  EXPECT_EQ(ParseRole(RoleName(BackendRole::kSegmenter)), BackendRole::kSegmenter);
}

}  // namespace
}  // namespace refseg
