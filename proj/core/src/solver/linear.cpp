#include "geovag/solver/linear.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

template <int B>
void BsrMatrix<B>::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const auto& p = *pattern;
    y.setZero(size());
    for (int r = 0; r < p.rows; ++r) {
        Eigen::Matrix<double, B, 1> acc = Eigen::Matrix<double, B, 1>::Zero();
        for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) acc += values[k] * x.template segment<B>(B * p.cols[k]);
        y.template segment<B>(B * r) = acc;
    }
}

template <int B>
Ilu0<B>::Ilu0(const BsrMatrix<B>& A) : pattern_(A.pattern), lu_(A.values), inv_diag_(A.pattern->rows) {
    const auto& p = *pattern_;
    for (int i = 0; i < p.rows; ++i) {
        if (p.diag[i] < 0) throw LinearSolveError("ilu0: missing diagonal block");
        for (int kp = p.row_ptr[i]; kp < p.diag[i]; ++kp) {
            const int k = p.cols[kp];
            lu_[kp] = lu_[kp] * inv_diag_[k];
            // row i -= L_ik * row k, restricted to the pattern of row i
            int ip = kp + 1;
            for (int jp = p.diag[k] + 1; jp < p.row_ptr[k + 1] && ip < p.row_ptr[i + 1]; ++jp) {
                const int j = p.cols[jp];
                while (ip < p.row_ptr[i + 1] && p.cols[ip] < j) ++ip;
                if (ip < p.row_ptr[i + 1] && p.cols[ip] == j) lu_[ip] -= lu_[kp] * lu_[jp];
            }
        }
        const Block& d = lu_[p.diag[i]];
        if constexpr (B == 1) {
            const double v = d(0, 0);
            inv_diag_[i](0, 0) = std::abs(v) > 1e-300 ? 1.0 / v : 1.0;
        } else {
            const double det = d.determinant();
            inv_diag_[i] = (std::isfinite(det) && std::abs(det) > 1e-300) ? Block(d.inverse()) : Block::Identity();
        }
    }
}

template <int B>
void Ilu0<B>::solve(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
    using Vec = Eigen::Matrix<double, B, 1>;
    const auto& p = *pattern_;
    z.resize(r.size());
    for (int i = 0; i < p.rows; ++i) {
        Vec acc = r.template segment<B>(B * i);
        for (int kp = p.row_ptr[i]; kp < p.diag[i]; ++kp) acc -= lu_[kp] * z.template segment<B>(B * p.cols[kp]);
        z.template segment<B>(B * i) = acc;
    }
    for (int i = p.rows - 1; i >= 0; --i) {
        Vec acc = z.template segment<B>(B * i);
        for (int kp = p.diag[i] + 1; kp < p.row_ptr[i + 1]; ++kp) acc -= lu_[kp] * z.template segment<B>(B * p.cols[kp]);
        z.template segment<B>(B * i) = inv_diag_[i] * acc;
    }
}

template struct BsrMatrix<1>;
template struct BsrMatrix<2>;
template class Ilu0<1>;
template class Ilu0<2>;

GmresResult fgmres(const LinearOperator& A, const LinearOperator& M, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                   double tol, int restart, int max_iterations) {
    GmresResult res;
    const Eigen::Index n = b.size();
    if (x.size() != n) x.setZero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        x.setZero();
        res.converged = true;
        return res;
    }
    Eigen::VectorXd r(n), w(n);
    A(x, w);
    r = b - w;
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
        res.converged = true;
        return res;
    }
    const int m = std::max(restart, 1);
    std::vector<Eigen::VectorXd> V(m + 1), Z(m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd g(m + 1), cs(m), sn(m);
    while (res.iterations < max_iterations) {
        V[0] = r / beta;
        g.setZero();
        g(0) = beta;
        H.setZero();
        int k = 0;
        for (int j = 0; j < m && res.iterations < max_iterations; ++j) {
            M(V[j], Z[j]);
            A(Z[j], w);
            for (int i = 0; i <= j; ++i) {
                H(i, j) = w.dot(V[i]);
                w -= H(i, j) * V[i];
            }
            H(j + 1, j) = w.norm();
            const bool breakdown = H(j + 1, j) <= 1e-14 * bnorm;
            if (!breakdown) V[j + 1] = w / H(j + 1, j);
            for (int i = 0; i < j; ++i) {
                const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            const double den = std::hypot(H(j, j), H(j + 1, j));
            cs(j) = den > 0.0 ? H(j, j) / den : 1.0;
            sn(j) = den > 0.0 ? H(j + 1, j) / den : 0.0;
            H(j, j) = den;
            H(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);
            ++res.iterations;
            k = j + 1;
            if (std::abs(g(j + 1)) <= tol * bnorm || breakdown) break;
        }
        Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        for (int i = 0; i < k; ++i) x += y(i) * Z[i];
        A(x, w);
        r = b - w;
        beta = r.norm();
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= tol) {
            res.converged = true;
            break;
        }
        if (!std::isfinite(beta)) break;
    }
    return res;
}

CprPreconditioner::CprPreconditioner(const BsrMatrix<2>& A, const LinearSolverConfig& cfg) : A_(&A), cfg_(cfg) {
    const auto& p = *A.pattern;
    weights_.assign(p.rows, Eigen::RowVector2d(1.0, 0.0));
    if (cfg.decouple)
        for (int i = 0; i < p.rows; ++i) {
            const Mat2& d = A.values[p.diag[i]];
            if (std::abs(d(1, 1)) > 1e-12 * d.cwiseAbs().maxCoeff()) weights_[i](1) = -d(0, 1) / d(1, 1);
        }
    P_.pattern = A.pattern;
    P_.values.resize(p.nnz());
    for (int i = 0; i < p.rows; ++i)
        for (int k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k) P_.values[k](0, 0) = weights_[i] * A.values[k].col(0);
    p_ilu_ = std::make_unique<Ilu0<1>>(P_);
    ilu_ = std::make_unique<Ilu0<2>>(A);
}

void CprPreconditioner::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
    const int n = A_->rows();
    Eigen::VectorXd rp(n);
    for (int i = 0; i < n; ++i) rp(i) = weights_[i] * r.segment<2>(2 * i);
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(n);
    const auto pres = fgmres([&](const Eigen::VectorXd& u, Eigen::VectorXd& v) { P_.multiply(u, v); },
                             [&](const Eigen::VectorXd& u, Eigen::VectorXd& v) { p_ilu_->solve(u, v); }, rp, xp,
                             cfg_.pressure_tolerance, cfg_.pressure_iterations, cfg_.pressure_iterations);
    pressure_its_ += pres.iterations;
    Eigen::VectorXd z1 = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) z1(2 * i) = xp(i);
    Eigen::VectorXd Az(2 * n);
    A_->multiply(z1, Az);
    Eigen::VectorXd z2;
    ilu_->solve(r - Az, z2);
    z = z1 + z2;
}

GmresResult solve_linear(const BsrMatrix<2>& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                         const LinearSolverConfig& cfg) {
    LinearOperator op = [&](const Eigen::VectorXd& u, Eigen::VectorXd& v) { A.multiply(u, v); };
    x.setZero(b.size());
    switch (cfg.preconditioner) {
        case Preconditioner::None:
            return fgmres(op, [](const Eigen::VectorXd& u, Eigen::VectorXd& v) { v = u; }, b, x, cfg.tolerance,
                          cfg.restart, cfg.max_iterations);
        case Preconditioner::Ilu0: {
            Ilu0<2> ilu(A);
            return fgmres(op, [&](const Eigen::VectorXd& u, Eigen::VectorXd& v) { ilu.solve(u, v); }, b, x,
                          cfg.tolerance, cfg.restart, cfg.max_iterations);
        }
        case Preconditioner::Cpr: {
            CprPreconditioner cpr(A, cfg);
            return fgmres(op, [&](const Eigen::VectorXd& u, Eigen::VectorXd& v) { cpr.apply(u, v); }, b, x,
                          cfg.tolerance, cfg.restart, cfg.max_iterations);
        }
    }
    return {};
}

SchurSystem schur_eliminate(const FlowModel& model, const SystemStructure& s, const ResidualSystem& sys) {
    const DofLayout& L = s.layout();
    const int nf = L.nodes + L.fractures;
    SchurSystem out;
    out.matrix.pattern = &s.pattern();
    out.matrix.values = sys.reduced;
    out.rhs.resize(2 * s.reduced_size());
    for (int r = 0; r < s.reduced_size(); ++r)
        out.rhs.segment<2>(2 * r) = -sys.residual[r < nf ? r : s.full_well_index(r - nf)];
    out.cell_inverse.resize(L.cells);
    std::vector<Mat2> CD;
    for (int k = 0; k < L.cells; ++k) {
        const Mat2& D = sys.cell_diag[k];
        const double det = D.determinant();
        const double scale = D.cwiseAbs().maxCoeff();
        if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale * scale) {
            std::ostringstream os;
            os << "singular diagonal block at " << describe_dof(model, L.cell(k));
            throw LinearSolveError(os.str());
        }
        const Mat2 Dinv = D.inverse();
        out.cell_inverse[k] = Dinv;
        const auto dofs = s.cell_stencil(k);
        const int n = static_cast<int>(dofs.size());
        const int off = s.cell_block_offset(k);
        const auto pos = s.positions(k);
        const Vec2 DR = Dinv * sys.residual[L.cell(k)];
        CD.resize(n);
        for (int i = 0; i < n; ++i) {
            CD[i] = sys.cell_col[off + i] * Dinv;
            if (s.active(dofs[i])) out.rhs.segment<2>(2 * dofs[i]) += sys.cell_col[off + i] * DR;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int p = pos[static_cast<std::size_t>(i + 1) * (n + 1) + j + 1];
                if (p >= 0) out.matrix.values[p] -= CD[i] * sys.cell_row[off + j];
            }
    }
    return out;
}

Eigen::VectorXd back_substitute(const SystemStructure& s, const ResidualSystem& sys, const SchurSystem& schur,
                                const Eigen::VectorXd& y) {
    const DofLayout& L = s.layout();
    const int nf = L.nodes + L.fractures;
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(2 * s.full_size());
    dx.head(2 * nf) = y.head(2 * nf);
    for (int w = 0; w < s.num_wells(); ++w) dx.segment<2>(2 * s.full_well_index(w)) = y.segment<2>(2 * (nf + w));
    for (int k = 0; k < L.cells; ++k) {
        Vec2 acc = -sys.residual[L.cell(k)];
        const auto dofs = s.cell_stencil(k);
        const int off = s.cell_block_offset(k);
        for (std::size_t j = 0; j < dofs.size(); ++j) acc -= sys.cell_row[off + j] * y.segment<2>(2 * dofs[j]);
        dx.segment<2>(2 * L.cell(k)) = schur.cell_inverse[k] * acc;
    }
    return dx;
}

}  // namespace geovag
