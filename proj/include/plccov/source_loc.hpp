#pragma once

#include <string>

namespace plccov {

// 1-based position in a source file. line == 0 means "no location".
struct SourceLoc {
    std::string file;
    int line = 0;
    int col = 0;

    bool valid() const { return line > 0 && col > 0; }
    std::string str() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(col);
    }
};

inline bool operator==(const SourceLoc& a, const SourceLoc& b) {
    return a.file == b.file && a.line == b.line && a.col == b.col;
}

} // namespace plccov
