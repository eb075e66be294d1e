#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

#include "geovag/assembly/system.hpp"

namespace geovag {

/// Block sparse matrix with B x B blocks over a shared pattern.
template <int B>
struct BsrMatrix {
    using Block = Eigen::Matrix<double, B, B>;
    const BlockPattern* pattern = nullptr;
    std::vector<Block> values;

    int rows() const { return pattern->rows; }
    int size() const { return B * pattern->rows; }
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
};

/// Incomplete block LU factorisation without fill-in.
template <int B>
class Ilu0 {
public:
    using Block = Eigen::Matrix<double, B, B>;
    explicit Ilu0(const BsrMatrix<B>& A);
    void solve(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

private:
    const BlockPattern* pattern_;
    std::vector<Block> lu_;
    std::vector<Block> inv_diag_;
};

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct GmresResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Flexible restarted GMRES with right preconditioning; x holds the initial
/// guess and the result. Tolerance is relative to |b|.
GmresResult fgmres(const LinearOperator& A, const LinearOperator& M, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                   double tol, int restart, int max_iterations);

enum class Preconditioner { None, Ilu0, Cpr };

struct LinearSolverConfig {
    double tolerance = 1e-8;
    int restart = 50;
    int max_iterations = 500;
    Preconditioner preconditioner = Preconditioner::Cpr;
    bool decouple = true;            // quasi-IMPES weights for the pressure equation
    double pressure_tolerance = 1e-2;
    int pressure_iterations = 30;
};

/// Two-stage pressure/full-system preconditioner on a 2x2 block matrix.
class CprPreconditioner {
public:
    CprPreconditioner(const BsrMatrix<2>& A, const LinearSolverConfig& cfg);
    void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;
    int pressure_iterations() const { return pressure_its_; }

private:
    const BsrMatrix<2>* A_;
    LinearSolverConfig cfg_;
    std::vector<Eigen::RowVector2d> weights_;
    BsrMatrix<1> P_;
    std::unique_ptr<Ilu0<1>> p_ilu_;
    std::unique_ptr<Ilu0<2>> ilu_;
    mutable int pressure_its_ = 0;
};

/// Solves A x = b with the configured preconditioner.
GmresResult solve_linear(const BsrMatrix<2>& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                         const LinearSolverConfig& cfg);

/// Reduced system after elimination of the cell unknowns.
struct SchurSystem {
    BsrMatrix<2> matrix;
    Eigen::VectorXd rhs;
    std::vector<Mat2> cell_inverse;
};

/// A = A_nn - C D^-1 B, rhs = -R_n + C D^-1 R_K. Throws LinearSolveError
/// naming the cell when a diagonal cell block is singular.
SchurSystem schur_eliminate(const FlowModel& model, const SystemStructure& s, const ResidualSystem& sys);

/// Full Newton update (full-system order) from the reduced solution.
Eigen::VectorXd back_substitute(const SystemStructure& s, const ResidualSystem& sys, const SchurSystem& schur,
                                const Eigen::VectorXd& reduced_solution);

}  // namespace geovag
