/* Copyright 2026 The FaceShield Toolkit Authors. All Rights Reserved.

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
#include <doctest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fsk/datagen.hpp"
#include "fsk/error.hpp"
#include "fsk/metrics.hpp"
#include "fsk/taskproto.hpp"
#include "support/fixtures.hpp"

using namespace fsk;

namespace {

// A scriptable in-process assistant for exercising edge cases.
class LambdaAssistant : public AssistantClient {
 public:
  explicit LambdaAssistant(
      std::function<std::string(const AssistantRequest&)> fn)
      : fn_(std::move(fn)) {}
  std::string generate(const AssistantRequest& request) override {
    return fn_(request);
  }

 private:
  std::function<std::string(const AssistantRequest&)> fn_;
};

std::vector<CatalogRecord> twelve_class_catalog() {
  std::vector<CatalogRecord> catalog;
  int i = 0;
  for (AttackClass cls : all_attack_classes()) {
    CatalogRecord rec;
    rec.id = "rec" + std::to_string(i);
    rec.image_path = "";  // fixtures carry no image files
    rec.source = static_cast<Source>(i % 3);
    rec.cls = cls;
    if (cls != AttackClass::kBonafide) {
      rec.bbox = BBox(8 + i, 8, 40 + i, 48);
    }
    ++i;
    catalog.push_back(std::move(rec));
  }
  return catalog;
}

struct Toolkit {
  TemplateSet templates = TemplateSet::load_dir(fsk::testing::templates_dir());
  SynonymTable synonyms = SynonymTable::load(fsk::testing::synonyms_path());
  MockAssistant mock;
};

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("generate builds one gold-consistent record per annotation") {
  Toolkit kit;
  const auto catalog = twelve_class_catalog();
  const std::vector<CatalogRecord> three(catalog.begin(), catalog.begin() + 3);

  const auto result =
      generate(three, "coarse", kit.mock, kit.templates, kit.synonyms);
  CHECK(result.records.size() == 3);
  CHECK(result.skipped.empty());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    CHECK(rec.task == "coarse");
    CHECK(rec.conversations.size() == 2);
    CHECK(rec.conversations[0].role == "human");
    const CoarseVerdict want = three[i].cls == AttackClass::kBonafide
                                   ? CoarseVerdict::kBonafide
                                   : CoarseVerdict::kSpoof;
    CHECK(parse_coarse(rec.conversations[1].text) == want);
  }
}

TEST_CASE("generate skips localization records without a box") {
  Toolkit kit;
  std::vector<CatalogRecord> catalog = twelve_class_catalog();
  catalog[1].bbox.reset();  // an attack record missing its annotation

  const auto result = generate(catalog, "localization", kit.mock,
                               kit.templates, kit.synonyms);
  CHECK(result.records.size() == catalog.size() - 1);
  REQUIRE(result.skipped.size() == 1);
  CHECK(result.skipped[0].id == "rec1.localization");
  CHECK(result.skipped[0].reason.find("bbox") != std::string::npos);
}

TEST_CASE("generate encodes no-attack answers for bonafide localization") {
  Toolkit kit;
  const std::vector<CatalogRecord> one = {twelve_class_catalog()[0]};
  REQUIRE(one[0].cls == AttackClass::kBonafide);

  const auto result = generate(one, "localization", kit.mock, kit.templates,
                               kit.synonyms);
  REQUIRE(result.records.size() == 1);
  const std::string& answer = result.records[0].conversations[1].text;
  CHECK(!parse_box(answer, 512, 512).has_value());
  CHECK(parse_coarse(answer) == CoarseVerdict::kBonafide);
}

TEST_CASE("label fidelity holds for every task over all 12 classes") {
  Toolkit kit;
  const auto catalog = twelve_class_catalog();

  for (const std::string task : {"coarse", "fine", "reasoning",
                                 "localization", "pretrain"}) {
    const auto result =
        generate(catalog, task, kit.mock, kit.templates, kit.synonyms);
    REQUIRE(result.records.size() == catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      const CatalogRecord& gold = catalog[i];
      const std::string& answer = result.records[i].conversations[1].text;

      if (task == "coarse" || task == "reasoning") {
        const CoarseVerdict want = gold.cls == AttackClass::kBonafide
                                       ? CoarseVerdict::kBonafide
                                       : CoarseVerdict::kSpoof;
        CHECK(parse_coarse(answer) == want);
      } else if (task == "fine") {
        CHECK(parse_fine(answer, kit.synonyms) == gold.cls);
      } else if (task == "localization") {
        const auto box = parse_box(answer, 1 << 20, 1 << 20);
        if (gold.cls == AttackClass::kBonafide) {
          CHECK(!box.has_value());
        } else {
          REQUIRE(box.has_value());
          CHECK(*box == *gold.bbox);
        }
      } else {
        CHECK(!answer.empty());
      }
    }
  }
}

TEST_CASE("generate aborts with the record id on transport failure") {
  Toolkit kit;
  LambdaAssistant failing([](const AssistantRequest&) -> std::string {
    throw TransportError("connection refused");
  });
  const std::vector<CatalogRecord> one = {twelve_class_catalog()[2]};
  try {
    generate(one, "coarse", failing, kit.templates, kit.synonyms);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(std::string(e.what()).find("rec2.coarse") != std::string::npos);
  }
}

TEST_CASE("generate skips records whose assistant output is empty") {
  Toolkit kit;
  LambdaAssistant silent([](const AssistantRequest&) { return "   "; });
  const std::vector<CatalogRecord> one = {twelve_class_catalog()[3]};
  const auto result =
      generate(one, "pretrain", silent, kit.templates, kit.synonyms);
  CHECK(result.records.empty());
  REQUIRE(result.skipped.size() == 1);
  CHECK(result.skipped[0].reason.find("empty") != std::string::npos);
}

TEST_CASE("similarity_filter keeps the boundary score") {
  Toolkit kit;
  const auto generated = generate(twelve_class_catalog(), "pretrain", kit.mock,
                                  kit.templates, kit.synonyms);
  const std::vector<InstructionRecord> records(generated.records.begin(),
                                               generated.records.begin() + 3);

  const std::vector<double> scores = {0.14, 0.15, 0.90};
  auto counter = std::make_shared<std::size_t>(0);
  RecordScorer scripted = [scores, counter](const InstructionRecord&) {
    return scores[(*counter)++ % scores.size()];
  };

  const auto [kept, report] = similarity_filter(records, scripted, 0.15);
  CHECK(kept.size() == 2);  // 0.15 stays, strictly-below goes
  CHECK(report.input_count == 3);
  CHECK(report.dropped_by_similarity == 1);
  CHECK(report.kept + report.dropped_by_similarity == report.input_count);

  SUBCASE("constant scorers keep everything or nothing") {
    CHECK(similarity_filter(records, make_const_scorer(1.0)).first.size() ==
          3);
    CHECK(similarity_filter(records, make_const_scorer(0.0)).first.empty());
  }
  SUBCASE("out-of-range scores abort the run") {
    CHECK_THROWS_AS(similarity_filter(records, make_const_scorer(1.5)),
                    DegenerateInputError);
  }
  SUBCASE("scorer failures are hard errors, not drops") {
    RecordScorer broken = [](const InstructionRecord&) -> double {
      throw TransportError("scorer offline");
    };
    CHECK_THROWS_AS(similarity_filter(records, broken), TransportError);
  }
}

TEST_CASE("keyword_filter drops banned phrases and gold-inconsistent text") {
  Toolkit kit;
  const auto catalog = twelve_class_catalog();
  auto generated =
      generate(catalog, "fine", kit.mock, kit.templates, kit.synonyms);
  auto records = generated.records;
  const auto policy = RequiredKeywordPolicy::from_catalog(catalog,
                                                          kit.synonyms);

  SUBCASE("well-formed records with an empty ban list all pass") {
    const auto [kept, report] = keyword_filter(records, {}, policy);
    CHECK(kept.size() == records.size());
    CHECK(report.dropped_by_keyword == 0);
  }
  SUBCASE("an answer that never names its gold class is dropped") {
    records[2].conversations[1].text = "The category is unclear.";
    const auto [kept, report] = keyword_filter(records, {}, policy);
    CHECK(kept.size() == records.size() - 1);
    CHECK(report.dropped_by_keyword == 1);
  }
  SUBCASE("the shipped ban list removes refusal boilerplate") {
    const auto banned =
        load_banned_phrases(fsk::testing::data_dir() + "/banned_phrases.json");
    records[4].conversations[1].text =
        "As an AI model I cannot classify " +
        kit.synonyms.canonical(catalog[4].cls) + " images.";
    const auto [kept, report] = keyword_filter(records, banned, policy);
    CHECK(kept.size() == records.size() - 1);
    CHECK(report.dropped_by_keyword == 1);
  }
}

TEST_CASE("manual_filter excludes listed ids") {
  Toolkit kit;
  const auto generated = generate(twelve_class_catalog(), "coarse", kit.mock,
                                  kit.templates, kit.synonyms);
  const auto [kept, report] =
      manual_filter(generated.records, {"rec5.coarse", "rec7.coarse"});
  CHECK(report.dropped_by_manual == 2);
  CHECK(kept.size() == generated.records.size() - 2);
  CHECK(report.kept + report.dropped_by_manual == report.input_count);
}

TEST_CASE("augment multiplies records and rejects bad paraphrases") {
  Toolkit kit;
  const auto generated = generate(twelve_class_catalog(), "coarse", kit.mock,
                                  kit.templates, kit.synonyms);
  const std::vector<InstructionRecord> records(generated.records.begin(),
                                               generated.records.begin() + 4);

  SUBCASE("zero variants is the identity") {
    const auto result = augment(records, kit.mock, 0);
    CHECK(result.records == records);
  }
  SUBCASE("n variants give (n+1) times the records") {
    const auto result = augment(records, kit.mock, 2);
    CHECK(result.records.size() == records.size() * 3);
    CHECK(result.skipped.empty());
    // Variants keep the assistant turn verbatim and suffix the id.
    CHECK(result.records[1].id == records[0].id + "#1");
    CHECK(result.records[1].conversations[1].text ==
          records[0].conversations[1].text);
    CHECK(result.records[1].conversations[0].text !=
          records[0].conversations[0].text);
    CHECK(result.records[1].conversations[0].text.find("<image>") !=
          std::string::npos);
  }
  SUBCASE("paraphrases that lose the image token are rejected") {
    LambdaAssistant stripper(
        [](const AssistantRequest&) { return std::string("no token here"); });
    const auto result = augment(records, stripper, 1);
    CHECK(result.records.size() == records.size());  // originals only
    CHECK(result.skipped.size() == records.size());
    CHECK(result.skipped[0].reason.find("<image>") != std::string::npos);
  }
}

TEST_CASE("write_corpus is sorted, hashed, and deterministic") {
  Toolkit kit;
  fsk::testing::TempDir dir("corpus");
  const auto catalog = twelve_class_catalog();

  std::vector<InstructionRecord> records;
  for (const std::string task : {"coarse", "fine"}) {
    const auto result =
        generate(catalog, task, kit.mock, kit.templates, kit.synonyms);
    records.insert(records.end(), result.records.begin(),
                   result.records.end());
  }

  const auto manifest_a = write_corpus(records, dir.file("a.jsonl"));
  std::reverse(records.begin(), records.end());
  const auto manifest_b = write_corpus(records, dir.file("b.jsonl"));

  CHECK(manifest_a.total == 24);
  CHECK(manifest_a.counts_by_task.at("coarse") == 12);
  CHECK(manifest_a.counts_by_task.at("fine") == 12);
  CHECK(manifest_a.content_hash == manifest_b.content_hash);
  CHECK(read_file_bytes(dir.file("a.jsonl")) ==
        read_file_bytes(dir.file("b.jsonl")));

  SUBCASE("round-trips through the loader") {
    const auto loaded = load_corpus(dir.file("a.jsonl"));
    REQUIRE(loaded.size() == records.size());
    CHECK(std::is_sorted(loaded.begin(), loaded.end(),
                         [](const auto& x, const auto& y) {
                           return x.id < y.id;
                         }));
  }
  SUBCASE("empty corpus gives a zero-count manifest") {
    const auto manifest = write_corpus({}, dir.file("empty.jsonl"));
    CHECK(manifest.total == 0);
    CHECK(manifest.counts_by_task.empty());
    CHECK(read_file_bytes(dir.file("empty.jsonl")).empty());
  }
}

TEST_CASE("instruction records validate their conversation shape") {
  InstructionRecord rec;
  rec.id = "x";
  rec.task = "coarse";
  rec.conversations = {{"human", "q"}};
  CHECK_THROWS_AS(rec.validate(), DegenerateInputError);

  rec.conversations = {{"assistant", "a"}, {"human", "q"}};
  CHECK_THROWS_AS(rec.validate(), DegenerateInputError);

  rec.conversations = {{"human", "q"}, {"assistant", "a"}};
  CHECK_NOTHROW(rec.validate());
}

TEST_CASE("http assistant and scorer speak the wire contract") {
  httplib::Server server;
  std::atomic<int> assistant_hits{0};

  server.Post("/generate", [&](const httplib::Request& req,
                               httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("system"));
    REQUIRE(body.contains("prompt"));
    REQUIRE(body.contains("image_b64"));
    ++assistant_hits;
    res.set_content(
        nlohmann::json({{"text", "echo: " + body["prompt"].get<std::string>()}})
            .dump(),
        "application/json");
  });
  server.Post("/score", [&](const httplib::Request& req,
                            httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("text"));
    res.set_content(nlohmann::json({{"score", 0.42}}).dump(),
                    "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpAssistantClient client(base + "/generate");
  CHECK(client.generate({"sys", "ping", ""}) == "echo: ping");
  CHECK(assistant_hits == 1);

  InstructionRecord rec;
  rec.id = "r";
  rec.task = "pretrain";
  rec.conversations = {{"human", "<image>\nq"}, {"assistant", "caption"}};
  const auto scorer = make_http_scorer(base + "/score");
  CHECK(scorer(rec) == doctest::Approx(0.42));

  SUBCASE("non-200 responses raise TransportError") {
    HttpAssistantClient missing(base + "/nope");
    CHECK_THROWS_AS(missing.generate({"s", "p", ""}), TransportError);
  }

  server.stop();
  server_thread.join();
}

TEST_CASE("http clients reject unreachable endpoints") {
  // Port 1 on loopback is essentially never listening.
  HttpAssistantClient client("http://127.0.0.1:1/generate");
  CHECK_THROWS_AS(client.generate({"s", "p", ""}), TransportError);
  CHECK_THROWS_AS(HttpAssistantClient("ftp://example.com/x"),
                  DegenerateInputError);
}

TEST_CASE("base64 encoding matches known vectors") {
  auto enc = [](const std::string& s) {
    return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end()));
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foobar") == "Zm9vYmFy");
}

}  // TEST_SUITE
