#pragma once

#include <Eigen/Core>

#include <array>
#include <span>
#include <string>
#include <vector>

#include "geovag/assembly/model.hpp"

namespace geovag {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// Block compressed sparse row pattern with sorted columns.
struct BlockPattern {
    int rows = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> cols;
    std::vector<int> diag;  // position of the diagonal block of each row

    static BlockPattern from_rows(std::vector<std::vector<int>> rows);
    int find(int r, int c) const;
    int nnz() const { return static_cast<int>(cols.size()); }
};

/// Sparsity of the Jacobian. Node, fracture-face and well unknowns form the
/// reduced block matrix; each cell keeps its diagonal block D_K, its row
/// blocks B_K (cell equation, stencil dof) and column blocks C_K (stencil
/// equation, cell unknown). Wells are padded to 2x2 blocks.
class SystemStructure {
public:
    explicit SystemStructure(const FlowModel& model);

    const DofLayout& layout() const { return layout_; }
    int num_wells() const { return num_wells_; }
    /// Unknowns of the reduced system: nodes, fracture faces, then wells.
    int reduced_size() const { return layout_.nodes + layout_.fractures + num_wells_; }
    int well_index(int w) const { return layout_.nodes + layout_.fractures + w; }
    /// Entries of the full residual vector: reservoir dofs then wells.
    int full_size() const { return layout_.total() + num_wells_; }
    int full_well_index(int w) const { return layout_.total() + w; }

    const BlockPattern& pattern() const { return pattern_; }
    int cell_block_offset(int k) const { return cell_offset_[k]; }
    int cell_block_count() const { return cell_offset_.back(); }
    /// Stencil dofs of cell k, aligned with its B_K and C_K blocks.
    std::span<const int> cell_stencil(int k) const {
        return {cell_dofs_.data() + cell_offset_[k], static_cast<std::size_t>(cell_offset_[k + 1] - cell_offset_[k])};
    }

    /// Reduced-matrix positions of entity e (cells first, then fracture
    /// faces) over its local dofs (owner, stencil...) as a row-major square;
    /// -1 for Dirichlet rows or columns and for cell rows/columns.
    std::span<const int> positions(int entity) const {
        return {pos_.data() + pos_offset_[entity], static_cast<std::size_t>(pos_offset_[entity + 1] - pos_offset_[entity])};
    }
    /// Positions of (well node, well), (well, well node) per well-local node.
    const std::vector<std::array<int, 2>>& well_positions(int w) const { return well_pos_[w]; }

    bool active(int dof) const { return active_[dof] != 0; }

private:
    DofLayout layout_;
    int num_wells_ = 0;
    BlockPattern pattern_;
    std::vector<int> cell_offset_;
    std::vector<int> cell_dofs_;
    std::vector<int> pos_offset_{0};
    std::vector<int> pos_;
    std::vector<std::vector<std::array<int, 2>>> well_pos_;
    std::vector<char> active_;
};

/// Assembled residual and Jacobian for primary unknowns (p, second) per dof
/// and the bottom-hole pressure per well. Rows are scaled.
struct ResidualSystem {
    std::vector<Vec2> residual;  // full_size entries
    std::vector<Mat2> reduced;   // values over the reduced pattern
    std::vector<Mat2> cell_diag;
    std::vector<Mat2> cell_row;  // B_K
    std::vector<Mat2> cell_col;  // C_K

    void resize(const SystemStructure& s);
    void zero();
};

/// Data frozen over one time step.
struct StepContext {
    double dt = 0.0;
    std::vector<std::array<double, 2>> acc_prev;  // accumulations at the previous time
    std::vector<double> conductivity;             // effective lambda per entity
    std::vector<Vec2> row_scale;                  // multipliers of the mass and energy rows
    std::vector<WellTrace> traces;
};

StepContext prepare_step(const FlowModel& model, const ReservoirState& prev, double dt, std::vector<WellTrace> traces);

/// Upwinded phase mass flux of one stencil entry (owner -> neighbour i).
struct PhaseFlux {
    double darcy = 0.0;  // V^alpha
    bool owner_upwind = true;
    double mass = 0.0;
    double energy = 0.0;
};
std::array<PhaseFlux, kNumPhases> phase_darcy_flux(const FlowModel& model, const ReservoirState& x, int entity,
                                                   int i);

/// Scaled well equation for the current mode and the total mass rate.
struct WellEquation {
    double residual = 0.0;
    double total_rate = 0.0;
    WellBranches branches;
};
WellEquation evaluate_well(const FlowModel& model, const ReservoirState& x, const WellTrace& trace, int w);

class Assembler {
public:
    explicit Assembler(const FlowModel& model);

    const FlowModel& model() const { return *model_; }
    const SystemStructure& structure() const { return structure_; }

    /// Residual and, if requested, Jacobian at state x for the frozen active
    /// set. Throws AssemblyError on non-finite entries.
    void assemble(const ReservoirState& x, const StepContext& step, ResidualSystem& sys, bool jacobian = true) const;

    /// Residual only.
    std::vector<Vec2> residual(const ReservoirState& x, const StepContext& step) const;

private:
    const FlowModel* model_;
    SystemStructure structure_;
};

/// Scaled l-infinity norm of the residual.
double residual_norm(const std::vector<Vec2>& r);

/// Dense copy of the Jacobian over the full unknown vector (reservoir dofs in
/// layout order, then wells; two entries each).
Eigen::MatrixXd dense_jacobian(const SystemStructure& s, const ResidualSystem& sys);
Eigen::VectorXd flatten(const std::vector<Vec2>& v);

/// Human-readable name of a full-system entry, for diagnostics.
std::string describe_dof(const FlowModel& model, int index);

}  // namespace geovag
