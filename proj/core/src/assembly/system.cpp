#include "geovag/assembly/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geovag/assembly/parallel.hpp"
#include "geovag/error.hpp"

namespace geovag {

BlockPattern BlockPattern::from_rows(std::vector<std::vector<int>> rows) {
    BlockPattern p;
    p.rows = static_cast<int>(rows.size());
    p.row_ptr.assign(1, 0);
    p.diag.assign(p.rows, -1);
    for (int r = 0; r < p.rows; ++r) {
        auto& c = rows[r];
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (int col : c) {
            if (col == r) p.diag[r] = static_cast<int>(p.cols.size());
            p.cols.push_back(col);
        }
        p.row_ptr.push_back(static_cast<int>(p.cols.size()));
    }
    return p;
}

int BlockPattern::find(int r, int c) const {
    const auto b = cols.begin() + row_ptr[r], e = cols.begin() + row_ptr[r + 1];
    const auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? static_cast<int>(it - cols.begin()) : -1;
}

namespace {

const StencilSet& darcy_stencils(const FlowModel& m, int entity, int& local) {
    const int nc = m.layout().cells;
    local = entity < nc ? entity : entity - nc;
    return entity < nc ? m.trans().cell_darcy : m.trans().fracture_darcy;
}

const StencilSet& fourier_stencils(const FlowModel& m, int entity) {
    return entity < m.layout().cells ? m.trans().cell_geometric : m.trans().fracture_geometric;
}

int num_entities(const FlowModel& m) { return m.layout().cells + m.layout().fractures; }

}  // namespace

SystemStructure::SystemStructure(const FlowModel& model)
    : layout_(model.layout()), num_wells_(static_cast<int>(model.wells().size())) {
    const int nr = reduced_size();
    active_.assign(layout_.total(), 1);
    for (int s = 0; s < layout_.nodes; ++s) active_[s] = !model.is_dirichlet(s);

    std::vector<std::vector<int>> rows(nr);
    for (int r = 0; r < nr; ++r) rows[r].push_back(r);
    const int ne = num_entities(model);
    std::vector<int> local;
    auto gather = [&](int e) {
        int le = 0;
        const StencilSet& st = darcy_stencils(model, e, le);
        local.assign(1, st.owner(le));
        for (int d : st.dofs(le)) local.push_back(d);
    };
    auto reduced = [&](int dof) { return !layout_.is_cell(dof) && active_[dof]; };
    for (int e = 0; e < ne; ++e) {
        gather(e);
        for (int a : local)
            if (reduced(a))
                for (int b : local)
                    if (reduced(b)) rows[a].push_back(b);
    }
    for (int w = 0; w < num_wells_; ++w) {
        const int wi = well_index(w);
        for (int s : model.wells()[w].geometry.nodes)
            if (active_[s]) {
                rows[s].push_back(wi);
                rows[wi].push_back(s);
            }
    }
    pattern_ = BlockPattern::from_rows(std::move(rows));

    cell_offset_.assign(1, 0);
    for (int k = 0; k < layout_.cells; ++k) {
        const auto d = model.trans().cell_darcy.dofs(k);
        cell_dofs_.insert(cell_dofs_.end(), d.begin(), d.end());
        cell_offset_.push_back(static_cast<int>(cell_dofs_.size()));
    }

    for (int e = 0; e < ne; ++e) {
        gather(e);
        const int m = static_cast<int>(local.size());
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                pos_.push_back(reduced(local[a]) && reduced(local[b]) ? pattern_.find(local[a], local[b]) : -1);
        pos_offset_.push_back(static_cast<int>(pos_.size()));
    }

    well_pos_.resize(num_wells_);
    for (int w = 0; w < num_wells_; ++w)
        for (int s : model.wells()[w].geometry.nodes)
            well_pos_[w].push_back(active_[s] ? std::array<int, 2>{pattern_.find(s, well_index(w)),
                                                                    pattern_.find(well_index(w), s)}
                                              : std::array<int, 2>{-1, -1});
}

void ResidualSystem::resize(const SystemStructure& s) {
    residual.assign(s.full_size(), Vec2::Zero());
    reduced.assign(s.pattern().nnz(), Mat2::Zero());
    cell_diag.assign(s.layout().cells, Mat2::Zero());
    cell_row.assign(s.cell_block_count(), Mat2::Zero());
    cell_col.assign(s.cell_block_count(), Mat2::Zero());
}

void ResidualSystem::zero() {
    std::fill(residual.begin(), residual.end(), Vec2::Zero());
    std::fill(reduced.begin(), reduced.end(), Mat2::Zero());
    std::fill(cell_diag.begin(), cell_diag.end(), Mat2::Zero());
    std::fill(cell_row.begin(), cell_row.end(), Mat2::Zero());
    std::fill(cell_col.begin(), cell_col.end(), Mat2::Zero());
}

StepContext prepare_step(const FlowModel& model, const ReservoirState& prev, double dt, std::vector<WellTrace> traces) {
    if (!(dt > 0.0)) throw SolverError("time step must be positive");
    const DofLayout& L = model.layout();
    const auto& vol = model.volumes();
    const auto& sc = model.scaling();
    StepContext c;
    c.dt = dt;
    c.acc_prev.assign(L.total(), {0.0, 0.0});
    c.row_scale.assign(L.total(), Vec2::Ones());
    for (int i = 0; i < L.total(); ++i) {
        if (model.is_dirichlet(i)) continue;
        const auto props = evaluate_props<double>(prev.dofs[i], model.eos(), model.relperm(i));
        c.acc_prev[i] = accumulation(props, vol.porous[i], vol.rock_heat[i]);
        const double v = model.scaling_volume(i);
        c.row_scale[i] = Vec2(dt / (sc.density * v),
                              dt / (sc.density * sc.internal_energy * v + vol.rock_heat[i] * sc.temperature));
    }
    const int nc = L.cells;
    c.conductivity.resize(nc + L.fractures);
    for (int k = 0; k < nc; ++k) {
        const auto& x = prev.dofs[L.cell(k)];
        c.conductivity[k] = effective_conductivity(model.rock().cell_porosity[k], model.rock().cell_conductivity[k],
                                                   model.fluid_conductivity(), x.sl, x.sg);
    }
    for (int j = 0; j < L.fractures; ++j) {
        const auto& x = prev.dofs[L.fracture(j)];
        c.conductivity[nc + j] =
            effective_conductivity(model.rock().fracture_porosity[j], model.rock().fracture_conductivity[j],
                                   model.fluid_conductivity(), x.sl, x.sg);
    }
    if (traces.size() != model.wells().size()) throw SolverError("one well trace per well is required");
    c.traces = std::move(traces);
    return c;
}

std::array<PhaseFlux, kNumPhases> phase_darcy_flux(const FlowModel& model, const ReservoirState& x, int entity,
                                                   int i) {
    int le = 0;
    const StencilSet& st = darcy_stencils(model, entity, le);
    const auto dofs = st.dofs(le);
    const int n = static_cast<int>(dofs.size());
    const double* T = st.matrix(le);
    const auto& G = model.gravity_potential();
    const int K = st.owner(le), nu = dofs[i];
    const auto PK = evaluate_props<double>(x.dofs[K], model.eos(), model.relperm(K));
    const auto Pn = evaluate_props<double>(x.dofs[nu], model.eos(), model.relperm(nu));
    double FP = 0.0, FG = 0.0;
    for (int j = 0; j < n; ++j) {
        FP += T[i * n + j] * (x.dofs[K].p - x.dofs[dofs[j]].p);
        FG += T[i * n + j] * (G[K] - G[dofs[j]]);
    }
    std::array<PhaseFlux, kNumPhases> out;
    for (int a = 0; a < kNumPhases; ++a) {
        auto& f = out[a];
        f.darcy = FP - 0.5 * (PK.phase[a].density + Pn.phase[a].density) * FG;
        f.owner_upwind = f.darcy >= 0.0;
        const auto& up = f.owner_upwind ? PK.phase[a] : Pn.phase[a];
        f.mass = up.mobility * f.darcy;
        f.energy = up.enthalpy * f.mass;
    }
    return out;
}

WellEquation evaluate_well(const FlowModel& model, const ReservoirState& x, const WellTrace& trace, int w) {
    const Well& well = model.wells()[w];
    const double pw = x.wells[w].p;
    WellEquation e;
    for (std::size_t i = 0; i < well.geometry.size(); ++i) {
        const int s = well.geometry.nodes[i];
        const auto props = evaluate_props<double>(x.dofs[s], model.eos(), model.relperm(s));
        e.total_rate += coupling_flux<double>(well, static_cast<int>(i), props, pw + trace.dp[i], model.eos()).mass;
    }
    e.branches = well_branches(well, e.total_rate, pw);
    const double b = x.wells[w].mode == WellMode::Rate ? e.branches.rate : e.branches.bhp;
    e.residual = well.kind == WellKind::Production ? b : -b;
    return e;
}

namespace {

using Row2 = Eigen::RowVector2d;

Row2 grad(const Dual<2>& x) { return Row2(x.d[0], x.d[1]); }

constexpr int kBatch = 2048;

struct LocalBlock {
    int m = 0;
    std::vector<Vec2> r;
    std::vector<Mat2> J;

    void reset(int size) {
        m = size;
        r.assign(m, Vec2::Zero());
        J.assign(static_cast<std::size_t>(m) * m, Mat2::Zero());
    }
};

// Darcy and Fourier fluxes of one entity: owner row +q, neighbour rows -q.
void entity_fluxes(const FlowModel& model, int entity, double lambda, const std::vector<DofProps<Dual<2>>>& props,
                   LocalBlock& out) {
    int le = 0;
    const StencilSet& st = darcy_stencils(model, entity, le);
    const StencilSet& sg = fourier_stencils(model, entity);
    const auto dofs = st.dofs(le);
    const int n = static_cast<int>(dofs.size());
    const int K = st.owner(le);
    const double* T = st.matrix(le);
    const double* Tg = sg.matrix(le);
    const auto& G = model.gravity_potential();
    out.reset(n + 1);
    const auto& PK = props[K];
    auto at = [&](int a) -> const DofProps<Dual<2>>& { return a == 0 ? PK : props[dofs[a - 1]]; };
    auto J = [&](int a, int b) -> Mat2& { return out.J[static_cast<std::size_t>(a) * out.m + b]; };

    std::vector<Row2> dV(n + 1);
    for (int i = 0; i < n; ++i) {
        double FP = 0.0, FG = 0.0, rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = T[i * n + j];
            FP += t * (PK.p.v - props[dofs[j]].p.v);
            FG += t * (G[K] - G[dofs[j]]);
            rowsum += t;
        }
        const auto& Pi = props[dofs[i]];
        Vec2 q = Vec2::Zero();
        std::vector<Mat2> dq(n + 1, Mat2::Zero());
        for (int a = 0; a < kNumPhases; ++a) {
            const Dual<2>& rK = PK.phase[a].density;
            const Dual<2>& ri = Pi.phase[a].density;
            const double V = FP - 0.5 * (rK.v + ri.v) * FG;
            dV[0] = rowsum * grad(PK.p) - 0.5 * FG * grad(rK);
            for (int j = 0; j < n; ++j) dV[j + 1] = -T[i * n + j] * grad(props[dofs[j]].p);
            dV[i + 1] -= 0.5 * FG * grad(ri);
            const int up = V >= 0.0 ? 0 : i + 1;
            const auto& Pu = at(up).phase[a];
            const Dual<2> mob = Pu.mobility;
            const Dual<2> hmob = Pu.mobility * Pu.enthalpy;
            q += Vec2(mob.v * V, hmob.v * V);
            for (int b = 0; b <= n; ++b) {
                dq[b].row(0) += mob.v * dV[b];
                dq[b].row(1) += hmob.v * dV[b];
            }
            dq[up].row(0) += V * grad(mob);
            dq[up].row(1) += V * grad(hmob);
        }
        double FT = 0.0, tgsum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = lambda * Tg[i * n + j];
            FT += t * (PK.T.v - props[dofs[j]].T.v);
            tgsum += t;
            dq[j + 1].row(1) -= t * grad(props[dofs[j]].T);
        }
        q(1) += FT;
        dq[0].row(1) += tgsum * grad(PK.T);

        out.r[0] += q;
        out.r[i + 1] -= q;
        for (int b = 0; b <= n; ++b) {
            J(0, b) += dq[b];
            J(i + 1, b) -= dq[b];
        }
    }
}

void check_finite(const FlowModel& model, const ReservoirState& x, const SystemStructure& s,
                  const ResidualSystem& sys, bool jacobian) {
    auto fail = [&](int index, const char* what) {
        throw AssemblyError(std::string("non-finite ") + what + " at " + describe_dof(model, index));
    };
    for (int i = 0; i < s.full_size(); ++i) {
        if (sys.residual[i].allFinite()) continue;
        // blame the unknown that carries the bad value when there is one
        for (std::size_t j = 0; j < x.dofs.size(); ++j) {
            const DofState& d = x.dofs[j];
            if (!std::isfinite(d.p) || !std::isfinite(d.T) || !std::isfinite(d.sg))
                fail(static_cast<int>(j), "state");
        }
        for (std::size_t w = 0; w < x.wells.size(); ++w)
            if (!std::isfinite(x.wells[w].p)) fail(s.full_well_index(static_cast<int>(w)), "state");
        fail(i, "residual");
    }
    if (!jacobian) return;
    const auto& p = s.pattern();
    for (int r = 0; r < p.rows; ++r)
        for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
            if (!sys.reduced[k].allFinite())
                fail(r < s.layout().nodes + s.layout().fractures ? r : s.full_well_index(r - s.layout().nodes - s.layout().fractures),
                     "jacobian entry");
    for (int k = 0; k < s.layout().cells; ++k) {
        bool ok = sys.cell_diag[k].allFinite();
        for (int j = s.cell_block_offset(k); j < s.cell_block_offset(k + 1); ++j)
            ok = ok && sys.cell_row[j].allFinite() && sys.cell_col[j].allFinite();
        if (!ok) fail(s.layout().cell(k), "jacobian entry");
    }
}

}  // namespace

Assembler::Assembler(const FlowModel& model) : model_(&model), structure_(model) {}

void Assembler::assemble(const ReservoirState& x, const StepContext& step, ResidualSystem& sys, bool jacobian) const {
    const FlowModel& model = *model_;
    const SystemStructure& S = structure_;
    const DofLayout& L = model.layout();
    const auto& vol = model.volumes();
    if (static_cast<int>(sys.residual.size()) != S.full_size() ||
        static_cast<int>(sys.reduced.size()) != S.pattern().nnz())
        sys.resize(S);
    else
        sys.zero();

    std::vector<DofProps<Dual<2>>> props(L.total());
    parallel_for(0, L.total(), [&](int i) { props[i] = evaluate_props<Dual<2>>(x.dofs[i], model.eos(), model.relperm(i)); });

    auto diag = [&](int dof) -> Mat2& {
        return L.is_cell(dof) ? sys.cell_diag[dof - L.nodes - L.fractures] : sys.reduced[S.pattern().diag[dof]];
    };

    // accumulation and Dirichlet rows
    for (int i = 0; i < L.total(); ++i) {
        if (!S.active(i)) {
            const DofState& d = model.dirichlet().values[i];
            sys.residual[i] = Vec2(x.dofs[i].p - d.p, x.dofs[i].second_primary() - d.second_primary());
            if (jacobian) diag(i) = Mat2::Identity();
            continue;
        }
        const auto A = accumulation(props[i], vol.porous[i], vol.rock_heat[i]);
        const Vec2& sc = step.row_scale[i];
        sys.residual[i] += sc.cwiseProduct(Vec2(A[0].v - step.acc_prev[i][0], A[1].v - step.acc_prev[i][1])) / step.dt;
        if (jacobian) {
            Mat2 J;
            J.row(0) = grad(A[0]) * (sc(0) / step.dt);
            J.row(1) = grad(A[1]) * (sc(1) / step.dt);
            diag(i) += J;
        }
    }

    // fluxes, computed in batches and scattered in entity order
    const int ne = L.cells + L.fractures;
    std::vector<LocalBlock> batch(std::min(ne, kBatch));
    for (int start = 0; start < ne; start += kBatch) {
        const int stop = std::min(ne, start + kBatch);
        parallel_for(start, stop, [&](int e) { entity_fluxes(model, e, step.conductivity[e], props, batch[e - start]); });
        for (int e = start; e < stop; ++e) {
            const LocalBlock& lb = batch[e - start];
            int le = 0;
            const StencilSet& st = darcy_stencils(model, e, le);
            const auto dofs = st.dofs(le);
            const int K = st.owner(le);
            const auto pos = S.positions(e);
            const bool is_cell = e < L.cells;
            const int off = is_cell ? S.cell_block_offset(e) : 0;
            auto dof = [&](int a) { return a == 0 ? K : dofs[a - 1]; };
            for (int a = 0; a < lb.m; ++a) {
                const int ra = dof(a);
                if (!S.active(ra)) continue;
                const Vec2& sc = step.row_scale[ra];
                sys.residual[ra] += sc.cwiseProduct(lb.r[a]);
                if (!jacobian) continue;
                for (int b = 0; b < lb.m; ++b) {
                    if (!S.active(dof(b))) continue;
                    const Mat2 blk = sc.asDiagonal() * lb.J[static_cast<std::size_t>(a) * lb.m + b];
                    if (is_cell && a == 0 && b == 0)
                        sys.cell_diag[e] += blk;
                    else if (is_cell && a == 0)
                        sys.cell_row[off + b - 1] += blk;
                    else if (is_cell && b == 0)
                        sys.cell_col[off + a - 1] += blk;
                    else
                        sys.reduced[pos[static_cast<std::size_t>(a) * lb.m + b]] += blk;
                }
            }
        }
    }

    // wells
    for (int w = 0; w < S.num_wells(); ++w) {
        const Well& well = model.wells()[w];
        const WellTrace& trace = step.traces[w];
        const double pw = x.wells[w].p;
        const int wr = S.well_index(w);
        Dual<3> total{0.0};
        std::vector<Row2> dtotal(well.geometry.size(), Row2::Zero());
        for (std::size_t i = 0; i < well.geometry.size(); ++i) {
            const int s = well.geometry.nodes[i];
            const auto P = evaluate_props<Dual<3>>(x.dofs[s], model.eos(), model.relperm(s), 0, 1);
            const auto q = coupling_flux<Dual<3>>(well, static_cast<int>(i), P, Dual<3>(pw + trace.dp[i], 2), model.eos());
            total += q.mass;
            dtotal[i] = Row2(q.mass.d[0], q.mass.d[1]);
            if (!S.active(s)) continue;
            const Vec2& sc = step.row_scale[s];
            sys.residual[s] += sc.cwiseProduct(Vec2(q.mass.v, q.energy.v));
            if (!jacobian) continue;
            Mat2 Jss;
            Jss << q.mass.d[0], q.mass.d[1], q.energy.d[0], q.energy.d[1];
            diag(s) += sc.asDiagonal() * Jss;
            Mat2 Jsw = Mat2::Zero();
            Jsw(0, 0) = sc(0) * q.mass.d[2];
            Jsw(1, 0) = sc(1) * q.energy.d[2];
            sys.reduced[S.well_positions(w)[i][0]] += Jsw;
        }
        // scaled branch of the current mode, sign of the well kind
        const double sign = well.kind == WellKind::Production ? 1.0 : -1.0;
        double r = 0.0, dr_dpw = 0.0;
        std::vector<Row2> dr(well.geometry.size(), Row2::Zero());
        if (x.wells[w].mode == WellMode::Rate) {
            const double f = (well.kind == WellKind::Production ? -1.0 : 1.0) / well.rate_scale();
            r = sign * well_branches(well, total.v, pw).rate;
            dr_dpw = sign * f * total.d[2];
            for (std::size_t i = 0; i < dr.size(); ++i) dr[i] = sign * f * dtotal[i];
        } else {
            r = sign * well_branches(well, total.v, pw).bhp;
            dr_dpw = sign * (well.kind == WellKind::Production ? 1.0 : -1.0) / well.pressure_scale();
        }
        sys.residual[S.full_well_index(w)] = Vec2(r, 0.0);
        if (!jacobian) continue;
        Mat2 Jww = Mat2::Identity();
        Jww(0, 0) = dr_dpw;
        sys.reduced[S.pattern().diag[wr]] = Jww;
        for (std::size_t i = 0; i < dr.size(); ++i) {
            const int p = S.well_positions(w)[i][1];
            if (p < 0) continue;
            Mat2 blk = Mat2::Zero();
            blk.row(0) = dr[i];
            sys.reduced[p] += blk;
        }
    }

    check_finite(model, x, S, sys, jacobian);
}

std::vector<Vec2> Assembler::residual(const ReservoirState& x, const StepContext& step) const {
    ResidualSystem sys;
    assemble(x, step, sys, false);
    return sys.residual;
}

double residual_norm(const std::vector<Vec2>& r) {
    double m = 0.0;
    for (const auto& v : r) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

Eigen::VectorXd flatten(const std::vector<Vec2>& v) {
    Eigen::VectorXd out(2 * static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out.segment<2>(2 * i) = v[i];
    return out;
}

Eigen::MatrixXd dense_jacobian(const SystemStructure& s, const ResidualSystem& sys) {
    const DofLayout& L = s.layout();
    const int nf = L.nodes + L.fractures;
    const int n = s.full_size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    auto full = [&](int reduced) { return reduced < nf ? reduced : s.full_well_index(reduced - nf); };
    const auto& p = s.pattern();
    for (int r = 0; r < p.rows; ++r)
        for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
            A.block<2, 2>(2 * full(r), 2 * full(p.cols[k])) += sys.reduced[k];
    for (int k = 0; k < L.cells; ++k) {
        const int K = L.cell(k);
        A.block<2, 2>(2 * K, 2 * K) += sys.cell_diag[k];
        const auto d = s.cell_stencil(k);
        for (std::size_t j = 0; j < d.size(); ++j) {
            const int o = s.cell_block_offset(k) + static_cast<int>(j);
            A.block<2, 2>(2 * K, 2 * d[j]) += sys.cell_row[o];
            A.block<2, 2>(2 * d[j], 2 * K) += sys.cell_col[o];
        }
    }
    return A;
}

std::string describe_dof(const FlowModel& model, int index) {
    const DofLayout& L = model.layout();
    std::ostringstream os;
    if (index < L.nodes)
        os << "node " << index;
    else if (index < L.nodes + L.fractures)
        os << "fracture face " << index - L.nodes;
    else if (index < L.total())
        os << "cell " << index - L.nodes - L.fractures;
    else
        os << "well '" << model.wells()[index - L.total()].geometry.name << "'";
    return os.str();
}

}  // namespace geovag
