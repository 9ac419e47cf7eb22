#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace uavsec::conic {

using Index = std::int32_t;

struct LinTerm {
    Index var = 0;
    double coeff = 0.0;
};

// Sparse affine expression sum_i coeff_i x_i + constant.
class AffineExpr {
  public:
    AffineExpr() = default;
    AffineExpr(double constant) : constant_(constant) {}  // implicit on purpose

    static AffineExpr variable(Index v, double coeff = 1.0) {
        AffineExpr e;
        e.terms_.push_back({v, coeff});
        return e;
    }

    AffineExpr& operator+=(const AffineExpr& o);
    AffineExpr& operator-=(const AffineExpr& o);
    AffineExpr& operator*=(double s);

    const std::vector<LinTerm>& terms() const { return terms_; }
    double constant() const { return constant_; }

    double eval(std::span<const double> x) const;

    // Merge duplicate variables, drop zero coefficients, sort by index.
    void canonicalize();
    bool is_zero() const;
    bool same_as(const AffineExpr& o) const;  // canonical-form equality

  private:
    std::vector<LinTerm> terms_;
    double constant_ = 0.0;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double s, AffineExpr a);
AffineExpr operator-(AffineExpr a);

// expr == 0
struct LinearEq {
    AffineExpr expr;
};

// expr >= 0
struct LinearIneq {
    AffineExpr expr;
};

// ||norm_args(x)|| <= bound(x)
struct SecondOrderCone {
    std::vector<AffineExpr> norm_args;
    AffineExpr bound;
};

// 2 left(x) right(x) >= ||norm_args(x)||^2 with left(x) >= 0, right(x) >= 0
struct RotatedCone {
    AffineExpr left;
    AffineExpr right;
    std::vector<AffineExpr> norm_args;
};

// Affine 3x3 PSD block with the arrow structure
//   [ diag  0     a    ]
//   [ 0     diag  b    ]  >= 0.
//   [ a     b    corner]
struct ArrowPsd3 {
    AffineExpr diag;
    AffineExpr a;
    AffineExpr b;
    AffineExpr corner;
};

// Builds the arrow block from a full symmetric 3x3 affine matrix, validating
// the shape (m01 identically zero, m00 and m11 identical). Throws
// std::invalid_argument on shape mismatch. Entry order: m[row][col], row <= col.
ArrowPsd3 make_arrow_psd(const std::array<std::array<AffineExpr, 3>, 3>& m);

using Constraint = std::variant<LinearEq, LinearIneq, SecondOrderCone, RotatedCone, ArrowPsd3>;

// Feasible-set-equivalent lowering of the arrow LMI:
// {diag >= 0, corner >= 0, diag * corner >= a^2 + b^2 (rotated cone)}.
std::vector<Constraint> lmi_to_rotated_cone(const ArrowPsd3& block);

// Solver-agnostic convex subproblem: maximize objective . x over the blocks.
class ConicProgram {
  public:
    explicit ConicProgram(Index variable_count);

    Index variable_count() const { return variable_count_; }

    void set_objective_coeff(Index var, double coeff);
    const std::vector<double>& objective() const { return objective_; }

    void add(Constraint c);
    void add_linear_eq(AffineExpr expr) { add(LinearEq{std::move(expr)}); }
    void add_linear_ineq(AffineExpr expr) { add(LinearIneq{std::move(expr)}); }

    const std::vector<Constraint>& constraints() const { return constraints_; }

    double objective_value(std::span<const double> x) const;

    // Worst constraint violation at x (0 when feasible). Linear blocks report
    // the affine gap; cone blocks the norm / quadratic-form excess.
    double max_violation(std::span<const double> x) const;

  private:
    void check_expr(const AffineExpr& e) const;

    Index variable_count_ = 0;
    std::vector<double> objective_;
    std::vector<Constraint> constraints_;
};

double constraint_violation(const Constraint& c, std::span<const double> x);

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus s);

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::vector<double> primal;
    double objective_value = 0.0;  // in the maximize sense
    double kkt_residual = 0.0;     // max of scaled primal/dual residual and rel. gap
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-8;         // target accuracy; normal exit when reached
    double accept_tol = 1e-8;  // bound for reduced-accuracy exits when progress stalls
    int max_iterations = 200;
    bool verbose = false;
};

// Embedded primal-dual interior-point solve over {linear, SOC, rotated-SOC}
// cones; arrow PSD blocks are lowered via lmi_to_rotated_cone.
ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});
ConicSolution solve(const ConicProgram& program, double tol);

// Debug dump in the versioned "uavsec-conic 1" sparse text format.
void write_program(const ConicProgram& program, std::ostream& out);
std::string program_to_string(const ConicProgram& program);

}  // namespace uavsec::conic
