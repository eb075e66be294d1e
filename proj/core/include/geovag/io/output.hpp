#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geovag/assembly/model.hpp"
#include "geovag/solver/newton.hpp"

namespace geovag {

/// Legacy VTK unstructured grid of the cells with p, T and s^g per cell and,
/// optionally, per node.
void write_vtk_cells(const std::filesystem::path& path, const FlowModel& model, const ReservoirState& state,
                     bool node_fields);
/// Fracture faces as polygons with their own p, T and s^g.
void write_vtk_fractures(const std::filesystem::path& path, const FlowModel& model, const ReservoirState& state);

/// Comma separated table with a fixed header; numbers are written with 17
/// significant digits.
class CsvWriter {
public:
    CsvWriter() = default;
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append = false);

    bool is_open() const { return out_.is_open(); }
    const std::vector<std::string>& header() const { return header_; }
    /// Cells already formatted; throws if the count differs from the header.
    void row(const std::vector<std::string>& cells);

    static std::string num(double v);
    static std::string num(int v) { return std::to_string(v); }

private:
    std::ofstream out_;
    std::vector<std::string> header_;
};

/// Per-well columns follow `wells`, the names of every well of the scenario;
/// wells missing from the stage model are written as closed with empty values.
std::vector<std::string> timeseries_header(const std::vector<std::string>& wells);
std::vector<std::string> diagnostics_header(const std::vector<std::string>& wells);
std::vector<std::string> profile_header();

/// Row of the time-series table after an accepted step.
std::vector<std::string> timeseries_row(int stage, const StepRecord& r, const FlowModel& model,
                                        const ReservoirState& state, const std::vector<WellTrace>& traces,
                                        const std::vector<std::string>& wells);
std::vector<std::string> diagnostics_row(int stage, const StepRecord& r, const FlowModel& model,
                                         const std::vector<std::string>& wells);
/// One row per well node: well-side p, T and s^g of the current trace.
std::vector<std::vector<std::string>> profile_rows(int stage, int step, double time, const FlowModel& model,
                                                   const std::vector<WellTrace>& traces);

/// Everything needed to resume a run at an accepted step.
struct Checkpoint {
    int stage = 0;  // 0-based
    double time = 0.0;
    double dt = 0.0;
    int steps = 0;
    std::vector<std::string> well_names;  // wells open in the stage, in state order
    ReservoirState state;
    std::vector<WellTrace> traces;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace geovag
