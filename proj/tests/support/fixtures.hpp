#pragma once

namespace fixtures {

// The sign-check fragment wrapped in a FUNCTION_BLOCK, plus a driver program
// so a task can reach it.
inline const char* kSignCheckFb =
    "FUNCTION_BLOCK SignCheck\n"
    "VAR_INPUT\n"
    "    in : INT;\n"
    "END_VAR\n"
    "VAR_OUTPUT\n"
    "    out : INT;\n"
    "    negative : BOOL;\n"
    "END_VAR\n"
    "IF in < 0 THEN\n"
    "    out := -1;\n"
    "    negative := TRUE;\n"
    "ELSIF in = 0 THEN\n"
    "    out := 0;\n"
    "    negative := FALSE;\n"
    "ELSE\n"
    "    out := 1;\n"
    "    negative := FALSE;\n"
    "END_IF;\n"
    "END_FUNCTION_BLOCK\n";

inline const char* kSignCheckDriver =
    "VAR_GLOBAL\n"
    "    in_val AT %I : INT;\n"
    "    out_val AT %Q : INT;\n"
    "    neg_val AT %Q : BOOL;\n"
    "END_VAR\n"
    "PROGRAM Main\n"
    "VAR\n"
    "    tmp_out : INT;\n"
    "    tmp_neg : BOOL;\n"
    "END_VAR\n"
    "SignCheck(in := in_val, out => tmp_out, negative => tmp_neg);\n"
    "out_val := tmp_out;\n"
    "neg_val := tmp_neg;\n"
    "END_PROGRAM\n";

inline const char* kTinySfcProgram =
    "PROGRAM Chart\n"
    "VAR\n"
    "    ticks : INT;\n"
    "END_VAR\n"
    "VAR_INPUT\n"
    "    go : BOOL;\n"
    "END_VAR\n"
    "STEP Idle INITIAL\n"
    "    ACTION tick QUALIFIER N\n"
    "END_STEP\n"
    "STEP Run\n"
    "    ACTION arm QUALIFIER P1\n"
    "END_STEP\n"
    "TRANSITION FROM Idle TO Run WHEN go END_TRANSITION\n"
    "TRANSITION FROM Run TO Idle WHEN NOT go END_TRANSITION\n"
    "ACTION tick\n"
    "    ticks := ticks + 1;\n"
    "END_ACTION\n"
    "ACTION arm\n"
    "    ticks := 0;\n"
    "END_ACTION\n"
    "END_PROGRAM\n";

} // namespace fixtures
