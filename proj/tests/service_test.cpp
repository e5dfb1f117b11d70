#include "irtcat/service.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "irtcat/simulator.hpp"

namespace irtcat {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToken = "s3cret";

ServiceConfig test_config() {
  ServiceConfig config;
  config.admin_token = kToken;
  config.persist_bank = false;
  return config;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("irtcat-service-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Keys that would reveal the key or the scoring of an item.
void expect_no_correctness(const json& j, bool finished, const std::string& where) {
  static const std::set<std::string> always{"correct", "correct_options", "correct_option_indices", "is_correct",
                                            "guessing_override", "a", "c"};
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      EXPECT_FALSE(always.contains(key)) << where << " exposes '" << key << "': " << j.dump();
      if (!finished) {
        EXPECT_NE(key, "u") << where << ": " << j.dump();
        EXPECT_NE(key, "report") << where << ": " << j.dump();
      }
      expect_no_correctness(value, finished, where);
    }
  } else if (j.is_array()) {
    for (const auto& value : j) expect_no_correctness(value, finished, where);
  }
}

json selection_for(const ItemBank& bank, ItemId id, int u) {
  const Item& item = *bank.find(id);
  if (u == 1) return item.correct_options;
  std::vector<int> wrong;
  for (int i = 0; i < static_cast<int>(item.options.size()); ++i) {
    if (std::find(item.correct_options.begin(), item.correct_options.end(), i) == item.correct_options.end()) {
      wrong.push_back(i);
    }
  }
  return wrong;
}

json answer_body(const ItemBank& bank, ItemId id, int u) {
  return {{"item_id", id}, {"selected", selection_for(bank, id, u)}};
}

// Consistent examinee: knows everything up to average difficulty.
json knows_easy(const ItemBank& bank, const json& item) {
  const ItemId id = item["id"];
  return answer_body(bank, id, bank.find(id)->params.b <= 0.0 ? 1 : 0);
}

std::vector<double> in_process_trajectory(const ItemBank& bank, const ServiceConfig& config, std::uint64_t seed,
                                          const std::vector<int>& script) {
  auto session = start_session(bank, config.termination, config.strategy, seed);
  std::vector<double> thetas;
  for (int u : script) {
    if (session.phase == Phase::Finished) break;
    submit_answer(session, bank, *session.pending, u);
    thetas.push_back(session.administered.back().theta_after);
  }
  return thetas;
}

std::vector<int> random_script(std::uint64_t seed, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<int> script;
  for (int i = 0; i < 40; ++i) script.push_back(coin(rng) ? 1 : 0);
  return script;
}

TEST(Service, CreateSessionHidesKey) {
  CatService service(test_config(), make_reference_bank());
  const auto created = service.create_session({{"examinee_id", "ann"}});
  ASSERT_EQ(created.status, 201);
  EXPECT_EQ(created.body["phase"], "Warmup");
  const auto& item = created.body["item"];
  EXPECT_EQ(item.size(), 3u);
  EXPECT_TRUE(item.contains("stem"));
  EXPECT_TRUE(item.contains("options"));
  expect_no_correctness(created.body, false, "create");
}

TEST(Service, CreateSessionErrors) {
  CatService service(test_config(), make_reference_bank());
  EXPECT_EQ(service.create_session(json::array()).status, 400);
  EXPECT_EQ(service.create_session({{"examinee_id", ""}}).status, 400);
  EXPECT_EQ(service.create_session({{"examinee_id", "x"}, {"seed", -3}}).status, 400);

  auto bank = make_reference_bank();
  std::erase_if(bank.items, [](const Item& item) { return item.level == 5; });
  CatService thin(test_config(), bank);
  const auto response = thin.create_session({{"examinee_id", "bob"}});
  EXPECT_EQ(response.status, 409);
  EXPECT_EQ(response.body["error"], "insufficient_bank");
  EXPECT_EQ(response.body["missing_levels"], json::array({5}));
}

TEST(Service, ConcurrentCreatesGetDistinctSessions) {
  CatService service(test_config(), make_reference_bank());
  std::vector<std::string> ids(16);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    threads.emplace_back([&, i] { ids[i] = service.create_session({{"examinee_id", "same"}}).body["session_id"]; });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
}

TEST(Service, ExactMatchScoring) {
  auto bank = make_reference_bank();
  // Give every level-1 item two correct options so partial answers are possible.
  for (auto& item : bank.items) {
    if (item.level == 1 && item.correct_options.size() == 1 && item.options.size() > 2) {
      item.correct_options = {0, 1};
      item.guessing_override = true;
    }
  }
  CatService service(test_config(), bank);
  const auto created = service.create_session({{"examinee_id", "cy"}, {"seed", 3}});
  const std::string id = created.body["session_id"];
  ItemId pending = created.body["item"]["id"];
  const Item& first = *bank.find(pending);

  std::vector<int> partial{first.correct_options.front()};
  auto next = service.submit_answer(id, {{"item_id", pending}, {"selected", partial}});
  ASSERT_EQ(next.status, 200);
  EXPECT_EQ(next.body["status"], "next");
  pending = next.body["item"]["id"];
  next = service.submit_answer(id, answer_body(bank, pending, 1));
  const auto snapshot = service.admin_session(id).body;
  EXPECT_EQ(snapshot["administered"][0]["u"], first.correct_options.size() == 1 ? 1 : 0);
  EXPECT_EQ(snapshot["administered"][1]["u"], 1);

  // Duplicated and unordered indices describe the same selection.
  pending = next.body["item"]["id"];
  auto reversed = selection_for(bank, pending, 1);
  std::reverse(reversed.begin(), reversed.end());
  reversed.push_back(reversed.front());
  service.submit_answer(id, {{"item_id", pending}, {"selected", reversed}});
  EXPECT_EQ(service.admin_session(id).body["administered"][2]["u"], 1);
}

TEST(Service, AnswerErrors) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto created = service.create_session({{"examinee_id", "dee"}});
  const std::string id = created.body["session_id"];
  const ItemId pending = created.body["item"]["id"];

  EXPECT_EQ(service.submit_answer("nope", answer_body(bank, pending, 1)).status, 404);
  EXPECT_EQ(service.submit_answer(id, {{"item_id", pending}}).status, 400);
  EXPECT_EQ(service.submit_answer(id, {{"item_id", pending}, {"selected", {99}}}).status, 400);
  const auto wrong = service.submit_answer(id, answer_body(bank, pending == 1 ? 2 : 1, 1));
  EXPECT_EQ(wrong.status, 409);
  EXPECT_EQ(wrong.body["pending_item_id"], pending);
  EXPECT_EQ(service.get_report(id).status, 409);
  EXPECT_EQ(service.get_session("nope").status, 404);
}

TEST(Service, RetriedAnswerIsNotRecordedTwice) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto created = service.create_session({{"examinee_id", "eve"}});
  const std::string id = created.body["session_id"];
  const auto body = answer_body(bank, created.body["item"]["id"], 1);
  const auto first = service.submit_answer(id, body);
  const auto retry = service.submit_answer(id, body);
  EXPECT_EQ(first.status, retry.status);
  EXPECT_EQ(first.body, retry.body);
  EXPECT_EQ(service.admin_session(id).body["administered"].size(), 1u);
}

TEST(Service, FullSessionEndsAtCap) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto created = service.create_session({{"examinee_id", "fay"}, {"seed", 11}});
  const std::string id = created.body["session_id"];
  json step = created.body;
  int n = 0;
  ApiResponse last;
  while (true) {
    last = service.submit_answer(id, knows_easy(bank, step["item"]));
    ++n;
    ASSERT_EQ(last.status, 200);
    if (last.body["status"] == "finished") break;
    expect_no_correctness(last.body, false, "answer");
    expect_no_correctness(service.get_session(id).body, false, "get");
    step = last.body;
  }
  EXPECT_EQ(n, 35);
  EXPECT_EQ(last.body["report"]["finish_reason"], "MaxItems");
  expect_no_correctness(last.body, true, "final");

  const auto report = service.get_report(id);
  EXPECT_EQ(report.status, 200);
  EXPECT_EQ(report.body, last.body["report"]);
  expect_no_correctness(report.body, true, "report");
  EXPECT_EQ(service.get_session(id).body["phase"], "Finished");

  // Retrying the final answer replays the report; anything else is refused.
  const auto& final_item = report.body["items"].back();
  EXPECT_EQ(service.submit_answer(id, answer_body(bank, final_item["id"], final_item["u"])).status, 200);
  EXPECT_EQ(service.submit_answer(id, answer_body(bank, final_item["id"], 1 - final_item["u"].get<int>())).status,
            410);
}

TEST(Service, ConfigChangesApplyToNewSessions) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto put = service.put_config({{"termination", {{"max_items", 20}}}});
  ASSERT_EQ(put.status, 200);
  EXPECT_EQ(put.body["termination"]["max_items"], 20);
  EXPECT_EQ(service.get_config().body["termination"]["max_items"], 20);

  const auto created = service.create_session({{"examinee_id", "gus"}, {"seed", 4}});
  const std::string id = created.body["session_id"];
  json step = created.body;
  int n = 0;
  while (true) {
    const auto next = service.submit_answer(id, knows_easy(bank, step["item"]));
    ++n;
    if (next.body["status"] == "finished") {
      EXPECT_EQ(next.body["report"]["finish_reason"], "MaxItems");
      break;
    }
    step = next.body;
  }
  EXPECT_EQ(n, 25);

  EXPECT_EQ(service.put_config({{"max_items", 0}}).status, 422);
  EXPECT_EQ(service.put_config({{"strategy", {{"kind", "nonsense"}}}}).status, 422);
  EXPECT_EQ(service.put_config(json::array()).status, 400);
  const auto strategy = service.put_config({{"strategy", {{"kind", "topk"}, {"k", 5}}}, {"se_threshold", 0.3}});
  EXPECT_EQ(strategy.body["strategy"]["kind"], "topk");
  EXPECT_EQ(strategy.body["termination"]["se_threshold"], 0.3);
  EXPECT_EQ(strategy.body["termination"]["max_items"], 20);
}

TEST(Service, ActivationWindow) {
  CatService service(test_config(), make_reference_bank());
  service.set_clock([] { return std::int64_t{1000}; });
  service.put_config({{"activation_window", {{"opens_at", 2000}, {"closes_at", 3000}}}});
  const auto early = service.create_session({{"examinee_id", "hal"}});
  EXPECT_EQ(early.status, 403);
  EXPECT_EQ(early.body["error"], "test_not_open");
  service.set_clock([] { return std::int64_t{2500}; });
  EXPECT_EQ(service.create_session({{"examinee_id", "hal"}}).status, 201);
  service.set_clock([] { return std::int64_t{3000}; });
  EXPECT_EQ(service.create_session({{"examinee_id", "hal"}}).status, 403);
  service.put_config({{"activation_window", {{"closes_at", nullptr}}}});
  EXPECT_EQ(service.create_session({{"examinee_id", "hal"}}).status, 201);
}

TEST(Service, ItemMaintenance) {
  CatService service(test_config(), make_reference_bank());
  const json item{{"stem", "Pick the two vowels"}, {"options", {"a", "b", "e", "k", "z"}}, {"correct", {0, 2}},
                  {"level", 2}};
  const auto created = service.create_item(item);
  ASSERT_EQ(created.status, 201);
  EXPECT_EQ(created.body["id"], 172);
  EXPECT_DOUBLE_EQ(created.body["c"].get<double>(), 0.1);
  EXPECT_EQ(created.body["b"], -1.5);
  EXPECT_EQ(service.bank()->items.size(), 172u);
  EXPECT_EQ(service.get_item(172).body["stem"], "Pick the two vowels");
  EXPECT_EQ(service.list_items().body["items"].size(), 172u);

  json duplicate = item;
  duplicate["id"] = 172;
  EXPECT_EQ(service.create_item(duplicate).status, 409);
  json invalid = item;
  invalid["correct"] = {7};
  const auto rejected = service.create_item(invalid);
  EXPECT_EQ(rejected.status, 422);
  EXPECT_FALSE(rejected.body["details"].empty());
  EXPECT_EQ(service.create_item({{"stem", "no options"}}).status, 422);

  json mismatch = item;
  mismatch["c"] = 0.4;
  const auto warned = service.update_item(172, mismatch);
  EXPECT_EQ(warned.status, 200);
  ASSERT_TRUE(warned.body.contains("warnings"));
  EXPECT_NE(warned.body["warnings"][0].get<std::string>().find("0.1"), std::string::npos);
  EXPECT_EQ(service.update_item(999, item).status, 404);
  json other_id = item;
  other_id["id"] = 3;
  EXPECT_EQ(service.update_item(172, other_id).status, 422);

  EXPECT_EQ(service.delete_item(172).status, 200);
  EXPECT_EQ(service.get_item(172).status, 404);
  EXPECT_EQ(service.delete_item(172).status, 404);
}

TEST(Service, DeleteGuardsItemsInUse) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto a = service.create_session({{"examinee_id", "ida"}, {"seed", 8}});
  const auto b = service.create_session({{"examinee_id", "jon"}, {"seed", 8}});
  const ItemId shared = a.body["item"]["id"];
  EXPECT_EQ(b.body["item"]["id"], shared);
  const auto refused = service.delete_item(shared);
  EXPECT_EQ(refused.status, 409);
  EXPECT_EQ(refused.body["error"], "item_in_use");
  EXPECT_EQ(refused.body["active_sessions"], 2);
}

TEST(Service, EditsDoNotDisturbRunningSessions) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  const auto created = service.create_session({{"examinee_id", "kim"}, {"seed", 21}});
  const std::string id = created.body["session_id"];
  const std::vector<int> script = random_script(5, 0.5);
  json step = created.body;
  std::vector<double> thetas;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (i == 7) {
      json edit = to_json(*bank.find(171));
      edit["b"] = 2.0;
      ASSERT_EQ(service.update_item(171, edit).status, 200);
    }
    const auto next = service.submit_answer(id, answer_body(bank, step["item"]["id"], script[i]));
    if (next.body["status"] == "finished") break;
    step = next.body;
  }
  EXPECT_EQ(service.get_session(id).status, 200);
}

TEST(Service, ExposureStatsCountFinishedSessions) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  int administered = 0;
  for (int s = 0; s < 3; ++s) {
    const auto created = service.create_session({{"examinee_id", "x"}, {"seed", s}});
    const std::string id = created.body["session_id"];
    json step = created.body;
    while (true) {
      const auto next = service.submit_answer(id, knows_easy(bank, step["item"]));
      if (next.body["status"] == "finished") {
        administered += static_cast<int>(next.body["report"]["items"].size());
        break;
      }
      step = next.body;
    }
  }
  service.create_session({{"examinee_id", "unfinished"}});
  const auto stats = service.exposure_stats();
  EXPECT_EQ(stats.body["n_sessions"], 3);
  EXPECT_EQ(stats.body["total_administered"], administered);
  EXPECT_EQ(stats.body["counts"].size(), 171u);
  EXPECT_GT(stats.body["sigma"].get<double>(), 0.0);
}

TEST(Service, CalibrationEndpoint) {
  CatService service(test_config(), make_reference_bank());
  std::string log = "user_id,item_id,correct,timestamp\n";
  // Item 1 (level 1): first answers 1,1,1,0; item 171 (level 5): 0,0,0,1.
  for (int u = 0; u < 4; ++u) {
    log += "u" + std::to_string(u) + ",1," + (u < 3 ? "1" : "0") + "," + std::to_string(10 + u) + "\n";
    log += "u" + std::to_string(u) + ",171," + (u < 3 ? "0" : "1") + "," + std::to_string(20 + u) + "\n";
    log += "u" + std::to_string(u) + ",171,1," + std::to_string(90 + u) + "\n";
  }
  const auto response = service.calibrate(log);
  ASSERT_EQ(response.status, 200);
  const auto& estimates = response.body["estimation"]["estimates"];
  ASSERT_EQ(estimates.size(), 2u);
  EXPECT_EQ(estimates[0]["p_incorrect"], 0.25);
  EXPECT_EQ(estimates[1]["p_incorrect"], 0.75);
  EXPECT_EQ(response.body["comparison"]["original_mean"], 0.5);
  EXPECT_EQ(response.body["comparison"]["estimated_mean"], 0.5);

  EXPECT_EQ(service.calibrate("garbage").status, 422);
  EXPECT_EQ(service.calibrate("user_id,item_id,correct,timestamp\na,1,1,5\na,1,0,5\n").body["error"],
            "ambiguous_log");
  EXPECT_EQ(service.calibrate("user_id,item_id,correct,timestamp\na,999,1,5\n").body["error"], "no_overlap");
}

TEST(Service, AdminToken) {
  CatService service(test_config(), make_reference_bank());
  EXPECT_TRUE(service.authorized(kToken));
  EXPECT_FALSE(service.authorized("guess"));
  EXPECT_FALSE(service.authorized(""));
  CatService open(ServiceConfig{}, make_reference_bank());
  EXPECT_FALSE(open.authorized(""));
}

TEST(ServiceConfig, LoadsFileAndEnvironment) {
  TempDir dir;
  std::ofstream(dir.path() / "service.json") << R"({
    "bind": "0.0.0.0:9090",
    "bank": "bank.json",
    "session_dir": "sessions",
    "admin_token": "tok",
    "termination": {"max_items": 12, "se_threshold": 0.25},
    "strategy": {"kind": "topk", "k": 4},
    "activation_window": {"opens_at": 100}
  })";
  auto config = load_service_config(dir.path() / "service.json");
  EXPECT_EQ(config.host, "0.0.0.0");
  EXPECT_EQ(config.port, 9090);
  EXPECT_EQ(config.bank_path, dir.path() / "bank.json");
  EXPECT_EQ(config.session_dir, dir.path() / "sessions");
  EXPECT_EQ(config.termination.max_items, 12);
  EXPECT_EQ(config.termination.se_threshold, 0.25);
  EXPECT_EQ(config.strategy.kind, StrategyKind::TopKRandom);
  EXPECT_EQ(config.strategy.k, 4u);
  EXPECT_EQ(config.window.opens_at, 100);
  EXPECT_FALSE(config.window.closes_at.has_value());

  const std::map<std::string, std::string> env{
      {"IRTCAT_BIND", ":7070"}, {"IRTCAT_BANK", "/srv/bank.json"}, {"IRTCAT_ADMIN_TOKEN", "env-token"}};
  apply_env_overrides(config, [&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(config.host, "0.0.0.0");
  EXPECT_EQ(config.port, 7070);
  EXPECT_EQ(config.bank_path, "/srv/bank.json");
  EXPECT_EQ(config.admin_token, "env-token");

  EXPECT_THROW(service_config_from_json({{"termination", {{"max_items", 0}}}}), std::invalid_argument);
  EXPECT_THROW(service_config_from_json({{"bind", "nocolon"}}), std::invalid_argument);
}

TEST(ServicePersistence, SessionsSurviveRestart) {
  TempDir dir;
  const auto bank = make_reference_bank();
  auto config = test_config();
  config.session_dir = dir.path() / "sessions";

  std::string id;
  json step;
  auto first = std::make_unique<CatService>(config, bank);
  {
    const auto created = first->create_session({{"examinee_id", "lou"}, {"seed", 77}});
    id = created.body["session_id"];
    step = created.body;
    for (int i = 0; i < 9; ++i) step = first->submit_answer(id, knows_easy(bank, step["item"])).body;
  }
  CatService second(config, bank);
  EXPECT_EQ(second.get_session(id).body, first->get_session(id).body);
  for (int i = 0; i < 6; ++i) {
    const auto body = knows_easy(bank, step["item"]);
    const auto a = first->submit_answer(id, body);
    const auto b = second.submit_answer(id, body);
    ASSERT_EQ(a.body, b.body);
    step = a.body;
  }
  first.reset();
  EXPECT_EQ(second.get_session("s-unknown").status, 404);
}

TEST(ServicePersistence, FinishedSessionAfterRestart) {
  TempDir dir;
  const auto bank = make_reference_bank();
  auto config = test_config();
  config.session_dir = dir.path();
  std::string id;
  ItemId last_item = 0;
  {
    CatService service(config, bank);
    const auto created = service.create_session({{"examinee_id", "mo"}});
    id = created.body["session_id"];
    json step = created.body;
    while (true) {
      last_item = step["item"]["id"];
      const auto next = service.submit_answer(id, answer_body(bank, last_item, 1));
      if (next.body["status"] == "finished") break;
      step = next.body;
    }
  }
  CatService restarted(config, bank);
  EXPECT_EQ(restarted.get_report(id).status, 200);
  EXPECT_EQ(restarted.submit_answer(id, answer_body(bank, last_item, 0)).status, 410);
}

// Runs the HTTP facade on an ephemeral port for the lifetime of the object.
class LiveServer {
 public:
  explicit LiveServer(CatService& service) : server_(service) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client cli("127.0.0.1", port_);
    cli.set_read_timeout(10, 0);
    return cli;
  }
  int port() const { return port_; }

 private:
  HttpServer server_;
  int port_ = -1;
  std::thread thread_;
};

json parse(const httplib::Result& res) {
  EXPECT_TRUE(res) << httplib::to_string(res.error());
  return res ? json::parse(res->body) : json();
}

TEST(Http, TrajectoryMatchesInProcess) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  LiveServer live(service);
  ASSERT_GT(live.port(), 0);
  auto cli = live.client();

  for (std::uint64_t trial = 0; trial < 12; ++trial) {
    const std::uint64_t seed = 1000 + trial;
    const auto script = random_script(trial, 0.2 + 0.05 * static_cast<double>(trial));
    auto res = cli.Post("/sessions", json{{"examinee_id", "http"}, {"seed", seed}}.dump(), "application/json");
    ASSERT_EQ(res->status, 201);
    json step = parse(res);
    expect_no_correctness(step, false, "POST /sessions");
    const std::string id = step["session_id"];

    std::vector<ItemId> items;
    for (int u : script) {
      const ItemId pending = step["item"]["id"];
      items.push_back(pending);
      res = cli.Post("/sessions/" + id + "/answers", answer_body(bank, pending, u).dump(), "application/json");
      ASSERT_EQ(res->status, 200);
      step = parse(res);
      if (step["status"] == "finished") break;
      expect_no_correctness(step, false, "POST answers");
      expect_no_correctness(parse(cli.Get("/sessions/" + id)), false, "GET session");
    }
    ASSERT_EQ(step["status"], "finished") << "script too short";
    expect_no_correctness(step, true, "final answer");
    const auto report = parse(cli.Get("/sessions/" + id + "/report"));
    expect_no_correctness(report, true, "GET report");

    std::vector<double> over_http;
    for (const auto& item : report["items"]) over_http.push_back(item["theta_after"]);
    const auto expected = in_process_trajectory(bank, service.config(), seed, script);
    EXPECT_EQ(over_http, expected) << "trial " << trial;

    auto session = start_session(bank, service.config().termination, service.config().strategy, seed);
    for (std::size_t i = 0; i < items.size(); ++i) {
      EXPECT_EQ(*session.pending, items[i]);
      submit_answer(session, bank, items[i], script[i]);
    }
  }
}

TEST(Http, ErrorStatuses) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  LiveServer live(service);
  auto cli = live.client();
  EXPECT_EQ(cli.Get("/health")->status, 200);
  EXPECT_EQ(cli.Post("/sessions", "{not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Post("/sessions", "{}", "application/json")->status, 400);
  EXPECT_EQ(cli.Get("/sessions/missing")->status, 404);
  EXPECT_EQ(cli.Post("/sessions/missing/answers", R"({"item_id": 1, "selected": [0]})", "application/json")->status,
            404);
  const auto created = parse(cli.Post("/sessions", R"({"examinee_id": "z"})", "application/json"));
  const std::string id = created["session_id"];
  const ItemId wrong = created["item"]["id"].get<ItemId>() == 1 ? 2 : 1;
  EXPECT_EQ(cli.Post("/sessions/" + id + "/answers", answer_body(bank, wrong, 1).dump(), "application/json")->status,
            409);
}

TEST(Http, AdminSurface) {
  const auto bank = make_reference_bank();
  CatService service(test_config(), bank);
  LiveServer live(service);
  auto cli = live.client();

  EXPECT_EQ(cli.Get("/admin/items")->status, 401);
  EXPECT_EQ(cli.Get("/admin/items", {{"Authorization", "Bearer wrong"}})->status, 401);
  const httplib::Headers auth{{"Authorization", std::string("Bearer ") + kToken}};
  const httplib::Headers alt{{"X-Admin-Token", kToken}};
  EXPECT_EQ(parse(cli.Get("/admin/items", auth))["items"].size(), 171u);
  EXPECT_EQ(cli.Get("/admin/items/5", alt)->status, 200);
  EXPECT_EQ(cli.Get("/admin/items/9999", auth)->status, 404);

  const json item{{"stem", "True or false?"}, {"options", {"true", "false"}}, {"correct", {0}}, {"level", 3}};
  auto res = cli.Post("/admin/items", auth, item.dump(), "application/json");
  ASSERT_EQ(res->status, 201);
  EXPECT_EQ(parse(res)["c"], 0.5);
  EXPECT_EQ(cli.Put("/admin/items/172", auth, item.dump(), "application/json")->status, 200);
  EXPECT_EQ(cli.Delete("/admin/items/172", auth)->status, 200);

  res = cli.Put("/admin/config", auth, R"({"termination": {"max_items": 20}})", "application/json");
  EXPECT_EQ(parse(res)["termination"]["max_items"], 20);
  EXPECT_EQ(parse(cli.Get("/admin/config", auth))["termination"]["max_items"], 20);
  EXPECT_EQ(cli.Put("/admin/config", R"({"max_items": 3})", "application/json")->status, 401);

  const auto created = parse(cli.Post("/sessions", R"({"examinee_id": "adm"})", "application/json"));
  const std::string id = created["session_id"];
  EXPECT_EQ(cli.Get("/admin/sessions/" + id)->status, 401);
  EXPECT_EQ(parse(cli.Get("/admin/sessions/" + id, auth))["format"], "irtcat-session");
  EXPECT_EQ(parse(cli.Get("/admin/stats/exposure", auth))["n_sessions"], 0);

  const std::string log = "user_id,item_id,correct,timestamp\na,1,0,1\nb,1,1,2\n";
  const httplib::MultipartFormDataItems form{{"log", log, "log.csv", "text/csv"}};
  res = cli.Post("/admin/calibration/estimate", auth, form);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(parse(res)["estimation"]["estimates"][0]["p_incorrect"], 0.5);
  res = cli.Post("/admin/calibration/estimate", auth, log, "text/csv");
  EXPECT_EQ(res->status, 200);
  const httplib::MultipartFormDataItems wrong_field{{"file", log, "log.csv", "text/csv"}};
  EXPECT_EQ(cli.Post("/admin/calibration/estimate", auth, wrong_field)->status, 400);
}

}  // namespace
}  // namespace irtcat
