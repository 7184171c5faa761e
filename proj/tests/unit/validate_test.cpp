#include "polyret/error.hpp"
#include "polyret/validate.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace polyret;

namespace {

std::vector<Diagnostic> check(std::string const &text, ArtifactKind kind)
{
    std::istringstream in(text);
    return validate_stream(in, kind, "f");
}

std::vector<std::string> rules(std::vector<Diagnostic> const &diagnostics)
{
    std::vector<std::string> out;
    for (auto const &d : diagnostics) {
        out.push_back(d.rule);
    }
    return out;
}

void write_file(std::filesystem::path const &path, std::string const &text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST(Validate, CleanRunHasNoDiagnostics)
{
    EXPECT_TRUE(check("# h\nq1 Q0 d1 1 0.9 t\nq1 Q0 d2 2 0.5 t\nq2 Q0 d1 1 3 t\n", ArtifactKind::run).empty());
}

TEST(Validate, RunProblems)
{
    auto dup = check("q1 Q0 d1 1 0.9 t\nq1 Q0 d1 2 0.5 t\n", ArtifactKind::run);
    ASSERT_EQ(dup.size(), 1u);
    EXPECT_EQ(dup[0].rule, "run.duplicate");
    EXPECT_EQ(dup[0].line, 2u);
    EXPECT_EQ(rules(check("q1 Q0 d1 1 0.5 t\nq1 Q0 d2 2 0.9 t\n", ArtifactKind::run)),
              (std::vector<std::string>{"run.order"}));
    EXPECT_EQ(rules(check("q1 Q0 d1 1 x t\n", ArtifactKind::run)), (std::vector<std::string>{"run.score"}));
    EXPECT_EQ(rules(check("q1 Q0 d1 1 0.5\n", ArtifactKind::run)), (std::vector<std::string>{"run.columns"}));
    EXPECT_EQ(rules(check("q1 Q0 d1 1 0.5 a\nq1 Q0 d2 2 0.4 b\n", ArtifactKind::run)),
              (std::vector<std::string>{"run.tag"}));
    EXPECT_EQ(rules(check("q1 Q0 d1 1 0.5 t\nq2 Q0 d1 1 0.5 t\nq1 Q0 d2 2 0.4 t\n", ArtifactKind::run)),
              (std::vector<std::string>{"run.grouping"}));
}

TEST(Validate, KeepsGoingAfterViolations)
{
    auto found = check("q1 Q0 d1 x\nq1 0 d2 -1\nq1 0 d1 1\nq2 0 d3 1\n", ArtifactKind::qrels);
    EXPECT_EQ(rules(found), (std::vector<std::string>{"qrels.grade", "qrels.negative-grade", "qrels.duplicate"}));
    EXPECT_EQ(found[1].line, 2u);
}

TEST(Validate, OtherKinds)
{
    EXPECT_TRUE(check("{\"docid\":\"a\",\"title\":\"\",\"text\":\"x\"}\n", ArtifactKind::corpus).empty());
    EXPECT_FALSE(check("{\"docid\":\"a\"\n", ArtifactKind::corpus).empty());
    EXPECT_TRUE(check("q1\thello\n", ArtifactKind::topics).empty());
    EXPECT_FALSE(check("q1\thello\nq1\tagain\n", ArtifactKind::topics).empty());
    EXPECT_TRUE(check("a\t1,2\nb\t3,4\n", ArtifactKind::vectors).empty());
    EXPECT_EQ(rules(check("a\t1,2\nb\t3\n", ArtifactKind::vectors)), (std::vector<std::string>{"vectors.dimension"}));
    EXPECT_TRUE(check("q\td\t0\tnegative\ttext\n", ArtifactKind::pairs).empty());
    EXPECT_EQ(rules(check("q\td\t0.5\tnegative\ttext\n", ArtifactKind::pairs)),
              (std::vector<std::string>{"pairs.negative-label"}));
    EXPECT_TRUE(check("bm25\tndcg@10\tq1\t0.5\n", ArtifactKind::report).empty());
    EXPECT_EQ(rules(check("bm25\tndcg@10\tq1\t1.5\n", ArtifactKind::report)),
              (std::vector<std::string>{"report.value"}));
}

TEST(Validate, DetectsKinds)
{
    gen::TempDir dir("validate");
    write_file(dir / "a.trec", "q Q0 d 1 1 t\n");
    write_file(dir / "corpus.jsonl", "{}\n");
    write_file(dir / "dev-qrels.txt", "q 0 d 1\n");
    write_file(dir / "x.tsv", "q\td\t0\tnegative\ttext\n");
    write_file(dir / "v.tsv", "a\t0.5,1\n");
    write_file(dir / "t.tsv", "q1\tsome words\n");
    write_file(dir / "empty.txt", "");
    EXPECT_EQ(detect_artifact_kind(dir / "a.trec"), ArtifactKind::run);
    EXPECT_EQ(detect_artifact_kind(dir / "corpus.jsonl"), ArtifactKind::corpus);
    EXPECT_EQ(detect_artifact_kind(dir / "dev-qrels.txt"), ArtifactKind::qrels);
    EXPECT_EQ(detect_artifact_kind(dir / "x.tsv"), ArtifactKind::pairs);
    EXPECT_EQ(detect_artifact_kind(dir / "v.tsv"), ArtifactKind::vectors);
    EXPECT_EQ(detect_artifact_kind(dir / "t.tsv"), ArtifactKind::topics);
    EXPECT_FALSE(detect_artifact_kind(dir / "empty.txt").has_value());
}

TEST(Validate, FilesAndDiagnosticFormat)
{
    gen::TempDir dir("validate");
    write_file(dir / "bad.trec", "q1 Q0 d1 1 0.9 t\nq1 Q0 d1 2 0.5 t\n");
    std::vector<std::filesystem::path> paths = {dir / "bad.trec"};
    auto found = validate_artifacts(paths);
    ASSERT_EQ(found.size(), 1u);
    std::ostringstream out;
    write_diagnostic(out, found[0]);
    EXPECT_EQ(out.str().rfind((dir / "bad.trec").string() + ":2: [run.duplicate] ", 0), 0u) << out.str();
    EXPECT_FALSE(validate_file(dir / "missing.trec").empty());
    EXPECT_EQ(parse_artifact_kind("pairs"), ArtifactKind::pairs);
    EXPECT_THROW((void)parse_artifact_kind("csv"), InvalidArgument);
}
