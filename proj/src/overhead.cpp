#include "plccov/overhead.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace plccov {

double calibrate(double delta_cycle_ms, int calls_per_cycle) {
    if (calls_per_cycle <= 0) throw std::invalid_argument("calls per cycle must be positive");
    if (delta_cycle_ms < 0) throw std::invalid_argument("cycle-time increase must be >= 0");
    return delta_cycle_ms * 1000.0 / calls_per_cycle;
}

OverheadEstimate estimate(int calls_per_cycle, double cycle_time_ms, double per_call_cost_us,
                          double headroom_fraction) {
    if (calls_per_cycle < 0 || cycle_time_ms <= 0 || per_call_cost_us < 0 ||
        headroom_fraction <= 0 || headroom_fraction > 1)
        throw std::invalid_argument("bad overhead parameters");
    OverheadEstimate e;
    e.absolute_time_us = calls_per_cycle * per_call_cost_us;
    e.fraction_of_cycle = e.absolute_time_us / (1000.0 * cycle_time_ms);
    e.within_headroom = e.fraction_of_cycle <= 1.0 - headroom_fraction;
    return e;
}

OverheadTable reproduce_table2(double per_call_cost_us) {
    OverheadTable t;
    t.per_call_cost_us = per_call_cost_us;
    for (size_t row = 0; row < OverheadTable::kCalls.size(); ++row)
        for (size_t col = 0; col < OverheadTable::kCycleMs.size(); ++col)
            t.fraction[row][col] = estimate(OverheadTable::kCalls[row],
                                            OverheadTable::kCycleMs[col], per_call_cost_us)
                                       .fraction_of_cycle;
    return t;
}

int64_t max_trace_calls(double cycle_time_ms, double per_call_cost_us, double budget_fraction) {
    if (cycle_time_ms <= 0 || per_call_cost_us <= 0 || budget_fraction < 0)
        throw std::invalid_argument("bad overhead parameters");
    return static_cast<int64_t>(std::floor(budget_fraction * 1000.0 * cycle_time_ms /
                                           per_call_cost_us));
}

namespace {

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

} // namespace

std::string table_text(const OverheadTable& table) {
    std::string out = "Trace calls per scan cycle vs. PLC scan cycle time\n";
    char head[64];
    std::snprintf(head, sizeof(head), "%8s %9s %9s %9s\n", "calls", "10ms", "5ms", "1ms");
    out += head;
    for (size_t row = 0; row < OverheadTable::kCalls.size(); ++row) {
        char line[96];
        std::snprintf(line, sizeof(line), "%8d %9s %9s %9s\n", OverheadTable::kCalls[row],
                      pct(table.fraction[row][0]).c_str(), pct(table.fraction[row][1]).c_str(),
                      pct(table.fraction[row][2]).c_str());
        out += line;
    }
    return out;
}

std::string table_csv(const OverheadTable& table) {
    std::string out = "calls,10ms,5ms,1ms\n";
    for (size_t row = 0; row < OverheadTable::kCalls.size(); ++row) {
        out += std::to_string(OverheadTable::kCalls[row]);
        for (size_t col = 0; col < OverheadTable::kCycleMs.size(); ++col) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), ",%.4f", table.fraction[row][col] * 100.0);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace plccov
