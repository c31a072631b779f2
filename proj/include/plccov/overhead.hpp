#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace plccov {

// Per-call cost implied by the reference extrapolation grid (microseconds).
inline constexpr double kGridCostUs = 0.5443;
// Measured averages the tool also surfaces: scan-cycle increase and trace
// invocations per cycle on the reference controller. Note these imply a
// slightly different per-call cost than the grid; both are reported as is.
inline constexpr double kMeasuredDeltaMs = 0.26;
inline constexpr int kMeasuredCallsPerCycle = 395;
// Practical real-time rule: the application keeps 80% of the cycle.
inline constexpr double kDefaultHeadroom = 0.80;

struct OverheadParams {
    double per_call_cost_us = kGridCostUs;
    int calls_per_cycle = 0;
    double cycle_time_ms = 10.0;
    double headroom_fraction = kDefaultHeadroom; // application-reserved share
};

struct OverheadEstimate {
    double fraction_of_cycle = 0.0; // n*c / (1000*T)
    double absolute_time_us = 0.0;  // n*c
    bool within_headroom = true;    // fraction <= 1 - headroom_fraction

    double percent() const { return fraction_of_cycle * 100.0; }
};

// Per-call cost in microseconds from a measured scan-cycle increase.
// Throws std::invalid_argument when calls_per_cycle is not positive.
double calibrate(double delta_cycle_ms, int calls_per_cycle);

OverheadEstimate estimate(int calls_per_cycle, double cycle_time_ms, double per_call_cost_us,
                          double headroom_fraction = kDefaultHeadroom);

// The extrapolation grid: trace calls per cycle x scan cycle time.
struct OverheadTable {
    static constexpr std::array<int, 7> kCalls{10, 50, 100, 200, 300, 400, 1000};
    static constexpr std::array<double, 3> kCycleMs{10.0, 5.0, 1.0};
    double per_call_cost_us = kGridCostUs;
    std::array<std::array<double, 3>, 7> fraction{}; // [row][col]
};

OverheadTable reproduce_table2(double per_call_cost_us = kGridCostUs);

// Largest call count whose tracing share stays within the budget fraction.
int64_t max_trace_calls(double cycle_time_ms, double per_call_cost_us, double budget_fraction);

std::string table_text(const OverheadTable& table);
std::string table_csv(const OverheadTable& table);

} // namespace plccov
