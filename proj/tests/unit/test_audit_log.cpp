#include <gtest/gtest.h>

#include "cotaudit/audit_log.hpp"
#include "cotaudit/errors.hpp"
#include "test_support.hpp"

using namespace cotaudit;
using cotaudit::test::read_file;
using cotaudit::test::synthetic_record;
using cotaudit::test::TempDir;
using cotaudit::test::write_file;

namespace {

AuditRecord rec(const std::string& qid) { return synthetic_record(qid, TaskCategory::general_knowledge(), 0.9, 0.3); }

}  // namespace

TEST(AuditLog, AppendAndScan) {
    TempDir dir;
    const auto path = dir / "nested/log.jsonl";
    {
        AuditLog log(path);
        log.append(rec("a"));
        log.append(rec("b"));
    }
    auto scan = scan_log(path);
    ASSERT_EQ(scan.records.size(), 2u);
    EXPECT_EQ(scan.records[0], rec("a"));
    EXPECT_FALSE(scan.truncated_tail);
    EXPECT_EQ(resume_scan(path), (std::set<std::string>{"a", "b"}));
    EXPECT_TRUE(scan_log(dir / "missing.jsonl").records.empty());
}

TEST(AuditLog, TornFinalLineIsDroppedAndRepaired) {
    TempDir dir;
    const auto path = dir / "log.jsonl";
    {
        AuditLog log(path);
        log.append(rec("a"));
    }
    const auto intact = read_file(path);
    write_file(path, intact + R"({"schema_version":1,"audit_id":"audit_dead)");
    std::vector<std::string> warnings;
    EXPECT_EQ(resume_scan(path, &warnings), std::set<std::string>{"a"});
    ASSERT_EQ(warnings.size(), 1u);
    {
        AuditLog log(path);
        EXPECT_EQ(log.warnings().size(), 1u);
        EXPECT_EQ(read_file(path), intact);
        log.append(rec("b"));
    }
    auto scan = scan_log(path);
    EXPECT_EQ(scan.records.size(), 2u);
    EXPECT_FALSE(scan.truncated_tail);
}

TEST(AuditLog, MissingFinalNewlineIsRestored) {
    TempDir dir;
    const auto path = dir / "log.jsonl";
    write_file(path, to_json(rec("a")).dump());
    {
        AuditLog log(path);
        log.append(rec("b"));
    }
    EXPECT_EQ(scan_log(path).records.size(), 2u);
}

TEST(AuditLog, CorruptMiddleLineThrows) {
    TempDir dir;
    const auto path = dir / "log.jsonl";
    write_file(path, to_json(rec("a")).dump() + "\n{garbage}\n" + to_json(rec("b")).dump() + "\n");
    EXPECT_THROW(scan_log(path), CorruptLog);
    EXPECT_THROW(AuditLog{path}, CorruptLog);
}

TEST(AuditLog, InconsistentRecordIsCorrupt) {
    TempDir dir;
    const auto path = dir / "log.jsonl";
    auto j = to_json(rec("a"));
    j["phi"] = 0.99;
    write_file(path, j.dump() + "\n" + to_json(rec("b")).dump() + "\n");
    EXPECT_THROW(scan_log(path), CorruptLog);
}
