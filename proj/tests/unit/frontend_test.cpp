#include "doctest.h"

#include "plccov/errors.hpp"
#include "plccov/parser.hpp"
#include "plccov/printer.hpp"

#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace plccov;

TEST_CASE("fig3 fragment parses to one IF with two condition branches and an else") {
    SourceProject p = parse_project({{"sign.st", fixtures::kSignCheckFb}});
    REQUIRE(p.pous.size() == 1);
    const PouDecl& pou = p.pous[0];
    CHECK(pou.kind == PouKind::FunctionBlock);
    CHECK(pou.name == "SignCheck");
    REQUIRE(pou.body.stmts.size() == 1);
    const Stmt& s = pou.body.stmts[0];
    REQUIRE(s.kind == StmtKind::If);
    CHECK(s.branches.size() == 2);
    CHECK(s.has_else);
    CHECK(s.else_body.size() == 2);
    CHECK(expr_text(s.branches[0].cond) == "in < 0");
    CHECK(expr_text(s.branches[1].cond) == "in = 0");
    CHECK(s.branches[0].body.size() == 2);
}

TEST_CASE("empty POU body yields empty statement list") {
    SourceProject p = parse_project({{"a.st", "PROGRAM Main\nEND_PROGRAM\n"}});
    REQUIRE(p.pous.size() == 1);
    CHECK_FALSE(p.pous[0].body.is_sfc);
    CHECK(p.pous[0].body.stmts.empty());
}

TEST_CASE("statement locations point inside the source text") {
    std::string src = "PROGRAM Main\nVAR\n    x : INT;\nEND_VAR\nx := 1;\nIF x > 0 THEN\n"
                      "    x := 2;\nEND_IF;\nEND_PROGRAM\n";
    SourceProject p = parse_project({{"main.st", src}});
    int lines = 1;
    for (char c : src)
        if (c == '\n') ++lines;
    const PouDecl& pou = p.pous[0];
    REQUIRE(pou.body.stmts.size() == 2);
    for (const Stmt& s : pou.body.stmts) {
        CHECK(s.loc.file == "main.st");
        CHECK(s.loc.line >= 1);
        CHECK(s.loc.line <= lines);
        CHECK(s.loc.col >= 1);
    }
    CHECK(pou.body.stmts[0].loc.line == 5);
    CHECK(pou.body.stmts[1].loc.line == 6);
    CHECK(pou.body.stmts[1].branches[0].body[0].loc.line == 7);
}

TEST_CASE("parser reports syntax errors with position") {
    CHECK_THROWS_AS(parse_project({{"bad.st", "PROGRAM Main\nx := ;\nEND_PROGRAM\n"}}),
                    ParseError);
    try {
        parse_project({{"bad.st", "PROGRAM Main\nx := ;\nEND_PROGRAM\n"}});
    } catch (const ParseError& e) {
        CHECK(e.loc().line == 2);
        CHECK(std::string(e.what()).find("bad.st") != std::string::npos);
    }
}

TEST_CASE("unresolved identifiers are rejected") {
    CHECK_THROWS_AS(parse_project({{"a.st", "PROGRAM Main\nx := 1;\nEND_PROGRAM\n"}}),
                    ParseError);
    CHECK_THROWS_AS(parse_project({{"a.st", "PROGRAM Main\nNope();\nEND_PROGRAM\n"}}),
                    ParseError);
}

TEST_CASE("duplicate declarations are rejected") {
    CHECK_THROWS_AS(
        parse_project({{"a.st", "PROGRAM Main\nEND_PROGRAM\nPROGRAM Main\nEND_PROGRAM\n"}}),
        ParseError);
    CHECK_THROWS_AS(parse_project({{"a.st",
                                    "PROGRAM Main\nVAR\n    x : INT;\n    x : BOOL;\nEND_VAR\n"
                                    "END_PROGRAM\n"}}),
                    ParseError);
}

TEST_CASE("recursion between POUs is rejected") {
    const char* direct = "FUNCTION_BLOCK A\nA();\nEND_FUNCTION_BLOCK\n";
    CHECK_THROWS_AS(parse_project({{"a.st", direct}}), ParseError);

    const char* mutual = "FUNCTION_BLOCK A\nB();\nEND_FUNCTION_BLOCK\n"
                         "FUNCTION_BLOCK B\nA();\nEND_FUNCTION_BLOCK\n";
    CHECK_THROWS_AS(parse_project({{"a.st", mutual}}), ParseError);

    // Recursion through an expression-level function call.
    const char* through_expr =
        "FUNCTION F : INT\nVAR_INPUT\n    n : INT;\nEND_VAR\nF := G(n := n);\nEND_FUNCTION\n"
        "FUNCTION G : INT\nVAR_INPUT\n    n : INT;\nEND_VAR\nG := F(n := n);\nEND_FUNCTION\n";
    CHECK_THROWS_AS(parse_project({{"a.st", through_expr}}), ParseError);
}

TEST_CASE("task validation") {
    const char* src = "PROGRAM Main\nEND_PROGRAM\nFUNCTION_BLOCK Fb\nEND_FUNCTION_BLOCK\n";
    std::vector<std::pair<std::string, std::string>> files{{"a.st", src}};

    CHECK_NOTHROW(parse_project(files, {{"T", 10, 1, "Main"}}));
    // entry must exist
    CHECK_THROWS_AS(parse_project(files, {{"T", 10, 1, "Nope"}}), ParseError);
    // entry must be a PROGRAM
    CHECK_THROWS_AS(parse_project(files, {{"T", 10, 1, "Fb"}}), ParseError);
    // positive cycle time
    CHECK_THROWS_AS(parse_project(files, {{"T", 0, 1, "Main"}}), ParseError);
    // unique priorities
    CHECK_THROWS_AS(
        parse_project(files, {{"T", 10, 1, "Main"}, {"U", 20, 1, "Main"}}), ParseError);
}

TEST_CASE("SFC chart parses and validates") {
    SourceProject p = parse_project({{"c.st", fixtures::kTinySfcProgram}});
    const PouDecl& pou = p.pous[0];
    REQUIRE(pou.body.is_sfc);
    REQUIRE(pou.body.chart.steps.size() == 2);
    CHECK(pou.body.chart.steps[0].is_initial);
    CHECK(pou.body.chart.steps[0].actions.size() == 1);
    CHECK(pou.body.chart.steps[0].actions[0].qual == ActionQualifier::N);
    CHECK(pou.body.chart.steps[1].actions[0].qual == ActionQualifier::P1);
    REQUIRE(pou.body.chart.transitions.size() == 2);
    CHECK(expr_text(pou.body.chart.transitions[0].cond) == "go");

    // exactly one initial step
    CHECK_THROWS_AS(parse_project({{"c.st", "PROGRAM P\nSTEP A\nEND_STEP\nEND_PROGRAM\n"}}),
                    ParseError);
    // transition endpoints must exist
    CHECK_THROWS_AS(
        parse_project({{"c.st", "PROGRAM P\nSTEP A INITIAL\nEND_STEP\n"
                                "TRANSITION FROM A TO B WHEN TRUE END_TRANSITION\nEND_PROGRAM\n"}}),
        ParseError);
    // referenced actions must exist
    CHECK_THROWS_AS(
        parse_project({{"c.st", "PROGRAM P\nSTEP A INITIAL\n    ACTION missing QUALIFIER N\n"
                                "END_STEP\nEND_PROGRAM\n"}}),
        ParseError);
    // unsupported qualifier
    CHECK_THROWS_AS(
        parse_project({{"c.st", "PROGRAM P\nVAR\n    x : INT;\nEND_VAR\n"
                                "STEP A INITIAL\n    ACTION a QUALIFIER L\nEND_STEP\n"
                                "ACTION a\n    x := 1;\nEND_ACTION\nEND_PROGRAM\n"}}),
        ParseError);
}

TEST_CASE("expression precedence and operators") {
    SourceProject p = parse_project({{"e.st",
                                      "PROGRAM Main\nVAR\n    a : INT;\n    b : INT;\n"
                                      "    ok : BOOL;\nEND_VAR\n"
                                      "a := 1 + 2 * 3;\n"
                                      "ok := a < b AND NOT (a = 3) OR b >= 2;\n"
                                      "a := (1 + 2) * 3 MOD 4;\n"
                                      "a := -b + 1;\n"
                                      "END_PROGRAM\n"}});
    const auto& stmts = p.pous[0].body.stmts;
    CHECK(expr_text(stmts[0].rhs) == "1 + 2 * 3");
    CHECK(expr_text(stmts[1].rhs) == "a < b AND NOT (a = 3) OR b >= 2");
    CHECK(expr_text(stmts[2].rhs) == "(1 + 2) * 3 MOD 4");
    CHECK(expr_text(stmts[3].rhs) == "-b + 1");
}

TEST_CASE("literals lex and print canonically") {
    SourceProject p = parse_project({{"l.st",
                                      "PROGRAM Main\nVAR\n    t : TIME := T#1s;\n"
                                      "    r : REAL := 2.5;\n    s : STRING := 'hi';\n"
                                      "    d : DINT := -7;\nEND_VAR\n"
                                      "t := T#1m30s;\nr := 1.0E3;\nEND_PROGRAM\n"}});
    const PouDecl& pou = p.pous[0];
    CHECK(pou.vars[0].init.ival == 1000);
    CHECK(pou.vars[1].init.rval == 2.5);
    CHECK(pou.vars[2].init.sval == "hi");
    CHECK(pou.vars[3].init.ival == -7);
    CHECK(expr_text(pou.body.stmts[0].rhs) == "T#90000ms");
    CHECK(expr_text(pou.body.stmts[1].rhs) == "1000.0");
}

TEST_CASE("parsing is deterministic") {
    SourceProject a = parse_project({{"s.st", fixtures::kSignCheckFb}});
    SourceProject b = parse_project({{"s.st", fixtures::kSignCheckFb}});
    CHECK(ast_equal(a, b));
}

TEST_CASE("print -> parse is a fixpoint on the fig3 fragment") {
    SourceProject p = parse_project({{"sign.st", fixtures::kSignCheckFb}});
    auto printed = pretty_print(p);
    REQUIRE(printed.size() == 1);
    SourceProject q = parse_project(printed);
    CHECK(ast_equal(p, q));
    CHECK(pretty_print(q) == printed);
}

TEST_CASE("empty project prints to empty file set") {
    SourceProject p;
    CHECK(pretty_print(p).empty());
}

TEST_CASE("round-trip over generated corpus of 200 random programs") {
    for (uint32_t seed = 1; seed <= 200; ++seed) {
        gen::GenConfig cfg;
        gen::Generated g = gen::random_project(seed, cfg);
        SourceProject parsed = parse_project(g.files, g.tasks);
        auto printed = pretty_print(parsed);
        SourceProject reparsed = parse_project(printed, g.tasks);
        REQUIRE_MESSAGE(ast_equal(parsed, reparsed), "seed ", seed);
        // print(parse(print(parse(x)))) == print(parse(x))
        REQUIRE_MESSAGE(pretty_print(reparsed) == printed, "seed ", seed);
    }
}

TEST_CASE("calls bind to declarations and check parameters") {
    const char* src =
        "FUNCTION Add2 : INT\nVAR_INPUT\n    a : INT;\n    b : INT;\nEND_VAR\n"
        "Add2 := a + b;\nEND_FUNCTION\n"
        "FUNCTION_BLOCK Counter\nVAR_INPUT\n    inc : BOOL;\nEND_VAR\n"
        "VAR_OUTPUT\n    count : INT;\nEND_VAR\n"
        "IF inc THEN\n    count := Add2(a := count, b := 1);\nEND_IF;\nEND_FUNCTION_BLOCK\n"
        "PROGRAM Main\nVAR\n    n : INT;\nEND_VAR\n"
        "Counter(inc := TRUE, count => n);\nEND_PROGRAM\n";
    SourceProject p = parse_project({{"a.st", src}});
    CHECK(p.pous.size() == 3);

    // unknown named argument
    CHECK_THROWS_AS(parse_project({{"a.st",
                                    "FUNCTION F : INT\nVAR_INPUT\n    a : INT;\nEND_VAR\n"
                                    "F := a;\nEND_FUNCTION\n"
                                    "PROGRAM Main\nVAR\n    x : INT;\nEND_VAR\n"
                                    "x := F(nope := 1);\nEND_PROGRAM\n"}}),
                    ParseError);
    // unknown output binding
    CHECK_THROWS_AS(parse_project({{"a.st",
                                    "FUNCTION_BLOCK Fb\nVAR_INPUT\n    a : INT;\nEND_VAR\n"
                                    "END_FUNCTION_BLOCK\n"
                                    "PROGRAM Main\nVAR\n    x : INT;\nEND_VAR\n"
                                    "Fb(a := 1, nope => x);\nEND_PROGRAM\n"}}),
                    ParseError);
    // programs cannot be called
    CHECK_THROWS_AS(parse_project({{"a.st", "PROGRAM A\nEND_PROGRAM\n"
                                            "PROGRAM Main\nA();\nEND_PROGRAM\n"}}),
                    ParseError);
}

TEST_CASE("ARRAY type only allowed in VAR_GLOBAL") {
    CHECK_NOTHROW(parse_project({{"g.st", "VAR_GLOBAL\n    tpa : ARRAY[0..9] OF BOOL;\n"
                                          "END_VAR\nPROGRAM Main\nEND_PROGRAM\n"}}));
    CHECK_THROWS_AS(parse_project({{"g.st", "PROGRAM Main\nVAR\n    a : ARRAY[0..9] OF BOOL;\n"
                                            "END_VAR\nEND_PROGRAM\n"}}),
                    ParseError);
}
