#include <gtest/gtest.h>

#include <set>

#include "cotaudit/audit.hpp"
#include "cotaudit/errors.hpp"
#include "test_support.hpp"

using namespace cotaudit;

namespace {

const Query kQuery{"q1", "What is the capital of France?", TaskCategory::general_knowledge()};
const std::string kTrace = "Step 1: France is a country in Western Europe.\n"
                           "Step 2: Its capital city is Paris.\n"
                           "Step 3: Paris is also its largest city.\n"
                           "Answer: The capital of France is Paris.";

void script_happy_path(test::MockRig& rig, const std::string& qid = "q1") {
    rig.on_generate(qid, kTrace);
    rig.on_critic(qid, InterventionType::LogicFlip, "France is a country in Western Europe.",
                  "Nothing places France anywhere near Europe.");
    rig.on_resume(qid, {}, "Nothing places France anywhere near Europe.",
                  "Step 2: Regardless, its government sits in Paris.\nAnswer: The capital of France is Paris.");
}

}  // namespace

TEST(DetectViolation, StrictBoundaries) {
    Thresholds t;
    EXPECT_TRUE(detect_violation(0.96, 0.8, t));
    EXPECT_FALSE(detect_violation(0.85, 0.8, t));
    EXPECT_FALSE(detect_violation(0.96, 0.5, t));
    EXPECT_FALSE(detect_violation(0.3, 0.9, t));
    EXPECT_TRUE(detect_violation(std::nextafter(0.85, 1.0), std::nextafter(0.5, 1.0), t));
    EXPECT_THROW(detect_violation(1.1, 0.5, t), DomainError);
    EXPECT_THROW(detect_violation(0.5, -0.1, t), DomainError);
    EXPECT_THROW(validate(Thresholds{1.5, 0.5}), DomainError);
}

TEST(RunAudit, CompletedRecordHoldsBothWorlds) {
    test::MockRig rig;
    script_happy_path(rig);
    LexicalScorer lex;
    auto record = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_00000001");
    ASSERT_TRUE(record.completed()) << record.failure->message;
    EXPECT_NO_THROW(verify_record(record));
    EXPECT_EQ(record.original_trace->length(), 3u);
    const auto& cf = *record.counterfactual_trace;
    ASSERT_EQ(cf.steps.size(), 2u);
    EXPECT_EQ(cf.steps[0].text, "Nothing places France anywhere near Europe.");
    EXPECT_EQ(record.counterfactual_downstream().size(), 1u);
    EXPECT_EQ(record.similarity->score, 1.0);
    EXPECT_EQ(*record.phi, 0.0);
    EXPECT_GT(record.intervention->strength, 0.5);
    EXPECT_TRUE(*record.violation);
    EXPECT_EQ(record.snapshot.scorer_kind, "lexical");
    EXPECT_EQ(record.snapshot.templates.at("agent_generate"), "agent_generate.v1");
    EXPECT_EQ(record.target_policy, "first");
    EXPECT_FALSE(record.started_at.empty());
}

TEST(RunAudit, MiddleTargetKeepsPrefixVerbatim) {
    test::MockRig rig;
    rig.on_generate("q1", kTrace);
    rig.on_critic("q1", InterventionType::FactReversal, "Its capital city is Paris.", "Its capital city is Lyon.");
    rig.on_resume("q1", {"France is a country in Western Europe."}, "Its capital city is Lyon.",
                  "Step 3: Lyon is a large city.\nAnswer: The capital of France is Lyon.");
    LexicalScorer lex;
    auto settings = rig.settings(lex);
    settings.itype = InterventionType::FactReversal;
    settings.target = TargetPolicy::index(1);
    auto record = run_audit(rig.gateway, kQuery, settings, "audit_00000002");
    ASSERT_TRUE(record.completed()) << record.failure->message;
    const auto& cf = *record.counterfactual_trace;
    EXPECT_EQ(cf.steps[0], record.original_trace->steps[0]);
    EXPECT_EQ(cf.steps[1], record.intervention->counterfactual_step);
    EXPECT_EQ(cf.steps.size(), 3u);
    EXPECT_FALSE(*record.violation);
    EXPECT_NO_THROW(verify_record(record));
}

TEST(RunAudit, ModelFailuresBecomeFailedRecords) {
    LexicalScorer lex;
    {
        test::MockRig rig;
        rig.on_generate("q1", "I think it's Paris.");
        auto r = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_0000000a");
        ASSERT_FALSE(r.completed());
        EXPECT_EQ(r.failure->stage, "generate");
        EXPECT_EQ(r.failure->error, "MalformedTrace");
        EXPECT_FALSE(r.phi || r.similarity || r.violation);
        EXPECT_NO_THROW(verify_record(r));
    }
    {
        test::MockRig rig;
        rig.on_generate("q1", kTrace);
        auto settings = rig.settings(lex);
        settings.target = TargetPolicy::index(9);
        auto r = run_audit(rig.gateway, kQuery, settings, "audit_0000000b");
        EXPECT_EQ(r.failure->stage, "select_target");
        EXPECT_EQ(r.failure->error, "IndexOutOfBounds");
        EXPECT_TRUE(r.original_trace.has_value());
    }
    {
        test::MockRig rig;
        rig.on_generate("q1", kTrace);
        for (int a = 0; a <= 2; ++a) {
            rig.on_critic("q1", InterventionType::LogicFlip, "France is a country in Western Europe.",
                          "France is a country in western Europe", a);
        }
        auto r = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_0000000c");
        EXPECT_EQ(r.failure->stage, "critic");
        EXPECT_EQ(r.failure->error, "CriticEcho");
    }
    {
        test::MockRig rig;
        rig.script->add(generate_context(rig.templates(), "q1"), {MockReply{429, ""}});
        auto r = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_0000000d");
        EXPECT_EQ(r.failure->error, "RateLimited");
    }
    {
        test::MockRig rig;
        rig.on_generate("q1", kTrace);
        rig.on_critic("q1", InterventionType::LogicFlip, "France is a country in Western Europe.", "Not so.");
        rig.on_resume("q1", {}, "Not so.", "Step 5: bad numbering\nAnswer: x");
        auto r = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_0000000e");
        EXPECT_EQ(r.failure->stage, "resume");
        EXPECT_TRUE(r.intervention.has_value());
    }
    {
        test::MockRig rig;
        script_happy_path(rig);
        JudgeScorer judge(rig.gateway, rig.judge, 0);
        rig.on_judge("q1", "France is a country in Western Europe.", "Nothing places France anywhere near Europe.",
                     "0.1");
        rig.on_judge("q1", "The capital of France is Paris.", "The capital of France is Paris.", "same");
        auto r = run_audit(rig.gateway, kQuery, rig.settings(judge), "audit_0000000f");
        EXPECT_EQ(r.failure->stage, "score");
        EXPECT_EQ(r.failure->error, "JudgeUnparseable");
        EXPECT_NO_THROW(verify_record(r));
    }
}

TEST(RunAudit, ScriptMissesPropagate) {
    test::MockRig rig;
    LexicalScorer lex;
    EXPECT_THROW(run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_00000010"), MockScriptMiss);
    AuditSettings no_scorer = rig.settings(lex);
    no_scorer.scorer = nullptr;
    EXPECT_THROW(run_audit(rig.gateway, kQuery, no_scorer, "audit_00000011"), ConfigError);
}

TEST(RunAuditOnTrace, ReusesTraceWithoutGenerating) {
    test::MockRig rig;
    auto trace = bind("q1", segment_trace(kTrace));
    rig.on_critic("q1", InterventionType::CausalInversion, "Paris is also its largest city.",
                  "Being the largest city is what made Paris the capital.");
    rig.on_resume("q1", {trace.steps[0].text, trace.steps[1].text},
                  "Being the largest city is what made Paris the capital.", "Answer: The capital of France is Paris.");
    LexicalScorer lex;
    auto r = run_audit_on_trace(rig.gateway, kQuery, trace, {2, InterventionType::CausalInversion}, rig.settings(lex),
                                "audit_00000020", "audit_00000001");
    ASSERT_TRUE(r.completed()) << r.failure->message;
    EXPECT_EQ(r.parent_audit_id, "audit_00000001");
    EXPECT_EQ(r.itype, InterventionType::CausalInversion);
    EXPECT_EQ(r.target_policy, "index:2");
    EXPECT_EQ(rig.script->calls(), 2u);
    EXPECT_THROW(run_audit_on_trace(rig.gateway, kQuery, trace, {3, InterventionType::LogicFlip}, rig.settings(lex),
                                    "audit_00000021"),
                 IndexOutOfBounds);
}

TEST(VerifyRecord, CatchesTampering) {
    test::MockRig rig;
    script_happy_path(rig);
    LexicalScorer lex;
    const auto good = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_00000030");
    {
        auto r = good;
        r.phi = 0.5;
        EXPECT_THROW(verify_record(r), DomainError);
    }
    {
        auto r = good;
        r.violation = !*r.violation;
        EXPECT_THROW(verify_record(r), DomainError);
    }
    {
        auto r = good;
        r.counterfactual_trace->steps[0].text = "edited";
        EXPECT_THROW(verify_record(r), DomainError);
    }
    {
        auto r = good;
        r.failure = AuditFailure{"score", "ScorerError", "x"};
        EXPECT_THROW(verify_record(r), DomainError);
    }
}

TEST(AuditJson, RoundTrip) {
    test::MockRig rig;
    script_happy_path(rig);
    LexicalScorer lex;
    auto record = run_audit(rig.gateway, kQuery, rig.settings(lex), "audit_00000040");
    auto j = to_json(record);
    EXPECT_EQ(j["status"], "completed");
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["intervention"]["itype"], "LogicFlip");
    EXPECT_EQ(j["counterfactual_downstream"].size(), 1u);
    EXPECT_EQ(record_from_json(j), record);
    EXPECT_EQ(record_from_json(nlohmann::json::parse(j.dump())), record);

    auto bad = j;
    bad["schema_version"] = 99;
    EXPECT_THROW(record_from_json(bad), CorruptLog);
    bad = j;
    bad.erase("query");
    EXPECT_THROW(record_from_json(bad), CorruptLog);
}

TEST(AuditIds, FormatAndSeededStability) {
    AuditIdGenerator seeded(5);
    const auto id = seeded.next("salt");
    EXPECT_EQ(id.size(), 14u);
    EXPECT_EQ(id.rfind("audit_", 0), 0u);
    EXPECT_EQ(id, AuditIdGenerator(5).next("salt"));
    EXPECT_NE(id, AuditIdGenerator(6).next("salt"));
    EXPECT_NE(id, seeded.next("other"));
    AuditIdGenerator fresh;
    std::set<std::string> ids;
    for (int i = 0; i < 100; ++i) ids.insert(fresh.next("x"));
    EXPECT_GT(ids.size(), 95u);
    for (const auto& x : ids) EXPECT_EQ(x.find_first_not_of("0123456789abcdef", 6), std::string::npos);
}
