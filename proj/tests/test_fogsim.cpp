#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "cpad/error.hpp"
#include "cpad/fogsim.hpp"

namespace cpad::fogsim {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kParties = R"(
PARTY aa authority
PARTY obj object
PARTY fog1 fog
PARTY cloud1 cloud
PARTY alice user
PARTY bob user
)";

constexpr std::string_view kLifecycle = R"(
STEP aa setup dummy,Doctor,Nurse,Cardio
STEP aa keygen obj dummy,Doctor,Cardio
STEP aa keygen alice dummy,Doctor,Cardio
STEP aa keygen bob dummy,Nurse
STEP obj upload rec1 text:heart-rate dummy AND Doctor AND Cardio
STEP alice fetch rec1
STEP bob fetch rec1
STEP obj delete rec1
STEP obj verify rec1
STEP alice fetch rec1
)";

std::string script(std::string_view steps) { return std::string(kParties) + std::string(steps); }

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("cpad-sim-" + std::to_string(rd()) + std::to_string(rd()));
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::size_t scenario_step(const std::string& text, std::uint64_t seed = 1) {
  try {
    run_scenario(text, seed);
  } catch (const ScenarioError& e) {
    return e.step();
  }
  ADD_FAILURE() << "no ScenarioError raised";
  return 0;
}

TEST(MessageKinds, FrozenCodes) {
  EXPECT_EQ(kind_from_code(0x01), MessageKind::KeyIssue);
  EXPECT_EQ(kind_from_code(0x0C), MessageKind::DelResponse);
  EXPECT_EQ(kind_name(MessageKind::CloudDelete), "CloudDelete");
  EXPECT_THROW(kind_from_code(0x00), Error);
  EXPECT_THROW(kind_from_code(0x0D), Error);
}

TEST(Scenario, HonestLifecycle) {
  const TraceLog log = run_scenario(script(kLifecycle), 7);
  EXPECT_EQ(log.notes("verify="), std::vector<std::string>{"verify=true"});
  EXPECT_EQ(log.notes("fetch="), (std::vector<std::string>{"fetch=ok match=true", "fetch=not-authorized",
                                                           "fetch=payload-not-found key=stale"}));
  EXPECT_EQ(log.notes("response-received").size(), 1u);
  EXPECT_EQ(log.notes("cloud-deleted").size(), 1u);
  EXPECT_EQ(log.messages(MessageKind::KeyIssue).size(), 3u);
  EXPECT_EQ(log.messages(MessageKind::DelResponse).size(), 1u);
  for (const auto& e : log.entries) {
    if (e.note.starts_with("verify=")) EXPECT_FALSE(e.flagged);
  }
}

TEST(Scenario, DeterministicForSeed) {
  const TraceLog a = run_scenario(script(kLifecycle), 11);
  const TraceLog b = run_scenario(script(kLifecycle), 11);
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.export_text(), b.export_text());
  const TraceLog c = run_scenario(script(kLifecycle), 12);
  EXPECT_NE(a.digest(), c.digest());
}

TEST(Scenario, SerialAndParallelKernelsAgree) {
  ScenarioOptions serial;
  serial.exec = Exec::Serial;
  EXPECT_EQ(run_scenario(script(kLifecycle), 13, serial).digest(), run_scenario(script(kLifecycle), 13).digest());
}

TEST(Scenario, ExportHasOneLinePerEntry) {
  const TraceLog log = run_scenario(script(kLifecycle), 7);
  const std::string text = log.export_text();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), log.entries.size());
  const std::string first = text.substr(0, text.find('\n'));
  EXPECT_EQ(std::count(first.begin(), first.end(), '\t'), 8);
}

TEST(Scenario, ForwardedDeleteIsVerbatim) {
  const TraceLog log = run_scenario(script(kLifecycle), 7);
  const auto reqs = log.messages(MessageKind::DelRequest);
  const auto fwds = log.messages(MessageKind::CloudDelete);
  ASSERT_EQ(reqs.size(), 1u);
  ASSERT_EQ(fwds.size(), 1u);
  EXPECT_EQ(reqs[0]->body, fwds[0]->body);
  EXPECT_EQ(fwds[0]->sender, "fog1");
  EXPECT_EQ(fwds[0]->receiver, "cloud1");
}

TEST(Scenario, MessagesRouteThroughFog) {
  const TraceLog log = run_scenario(script(kLifecycle), 7);
  for (const Message* m : log.messages(MessageKind::Upload)) {
    EXPECT_EQ(m->sender, "obj");
    EXPECT_EQ(m->receiver, "fog1");
  }
  for (const Message* m : log.messages(MessageKind::CloudUpload)) EXPECT_EQ(m->receiver, "cloud1");
  EXPECT_TRUE(log.messages(MessageKind::CloudDeleteAck).size() == 1u);
}

TEST(Scenario, SkipUpdateFogIsCaught) {
  const TraceLog log = run_scenario(script(R"(
STEP aa setup dummy,A
STEP aa keygen obj dummy,A
STEP aa keygen alice dummy,A
STEP obj upload f text:x dummy AND A
STEP fog1 behave skip-update
STEP obj delete f
STEP obj verify f
)"),
                                    3);
  EXPECT_EQ(log.notes("verify="), std::vector<std::string>{"verify=false"});
  bool flagged = false;
  for (const auto& e : log.entries) flagged |= e.note.starts_with("verify=false") && e.flagged;
  EXPECT_TRUE(flagged);
}

TEST(Scenario, InconsistentGammaFogIsCaught) {
  const TraceLog log = run_scenario(script(R"(
STEP aa setup dummy,A
STEP aa keygen obj dummy,A
STEP obj upload f random:64 dummy AND A
STEP fog1 behave inconsistent-gamma
STEP obj delete f
STEP obj verify f
)"),
                                    4);
  EXPECT_EQ(log.notes("verify="), std::vector<std::string>{"verify=false"});
}

TEST(Scenario, DeletionMakesPayloadUnavailable) {
  const TraceLog log = run_scenario(script(R"(
STEP aa setup dummy,A,B
STEP aa keygen obj dummy,A
STEP aa keygen alice dummy,A,B
STEP obj upload f hex:00ff10 dummy AND (A OR B)
STEP alice fetch f
STEP obj delete f
STEP alice fetch f
)"),
                                    5);
  EXPECT_EQ(log.notes("fetch="),
            (std::vector<std::string>{"fetch=ok match=true", "fetch=payload-not-found key=stale"}));
}

TEST(Scenario, RestartPreservesState) {
  constexpr std::string_view steps = R"(
STEP aa setup dummy,A
STEP aa keygen obj dummy,A
STEP aa keygen alice dummy,A
STEP obj upload f text:persisted dummy AND A
STEP fog1 restart
STEP cloud1 restart
STEP alice fetch f
STEP obj delete f
STEP fog1 restart
STEP obj verify f
)";
  TempDir a;
  TempDir b;
  ScenarioOptions opts_a;
  opts_a.store_root = a.path();
  ScenarioOptions opts_b;
  opts_b.store_root = b.path();
  const TraceLog first = run_scenario(script(steps), 9, opts_a);
  const TraceLog second = run_scenario(script(steps), 9, opts_b);
  EXPECT_EQ(first.digest(), second.digest());
  EXPECT_EQ(first.notes("fetch="), std::vector<std::string>{"fetch=ok match=true"});
  EXPECT_EQ(first.notes("verify="), std::vector<std::string>{"verify=true"});
  // Restart steps change nothing observable in the state digests.
  for (std::size_t i = 1; i < first.entries.size(); ++i) {
    const auto& e = first.entries[i];
    if (e.note == "restart") EXPECT_EQ(e.state, first.entries[i - 1].state) << "entry " << i;
  }
}

TEST(Scenario, RestartWithoutStoreFails) {
  EXPECT_EQ(scenario_step(script("STEP aa setup dummy,A\nSTEP fog1 restart\n")), 2u);
}

TEST(Scenario, ErrorsCarryStepOrLine) {
  EXPECT_EQ(scenario_step(script("STEP aa keygen obj dummy\n")), 1u);
  EXPECT_EQ(scenario_step(script("STEP aa setup dummy,A\nSTEP obj upload f text:x dummy AND A\n")), 2u);
  EXPECT_EQ(scenario_step(script("STEP aa setup dummy,A\nSTEP aa frobnicate\n")), 2u);
  EXPECT_EQ(scenario_step(script("STEP ghost setup dummy\n")), 1u);
  EXPECT_EQ(scenario_step(script("STEP aa setup dummy,A\nSTEP aa keygen obj dummy,A\nSTEP obj verify f\n")), 3u);
  // Malformed directives report the line number.
  EXPECT_EQ(scenario_step("PARTY x wizard\n"), 1u);
  EXPECT_EQ(scenario_step("# comment\n\nHELLO world\n"), 3u);
}

TEST(Scenario, DoubleDeleteRejected) {
  EXPECT_EQ(scenario_step(script(R"(
STEP aa setup dummy,A
STEP aa keygen obj dummy,A
STEP obj upload f text:x dummy AND A
STEP fog1 behave skip-update
STEP obj delete f
STEP obj delete f
)")),
            6u);
}

TEST(Scenario, CommentsIgnored) {
  const std::string with_comments = "# leading\n" + script("#note here\n") + std::string(kLifecycle);
  EXPECT_EQ(run_scenario(with_comments, 7).digest(), run_scenario(script(kLifecycle), 7).digest());
}

}  // namespace
}  // namespace cpad::fogsim
