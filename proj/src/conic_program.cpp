#include "uavsec/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uavsec::conic {

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    constant_ += o.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
    for (const auto& t : o.terms_) terms_.push_back({t.var, -t.coeff});
    constant_ -= o.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
    for (auto& t : terms_) t.coeff *= s;
    constant_ *= s;
    return *this;
}

double AffineExpr::eval(std::span<const double> x) const {
    double v = constant_;
    for (const auto& t : terms_) v += t.coeff * x[static_cast<std::size_t>(t.var)];
    return v;
}

void AffineExpr::canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    std::vector<LinTerm> merged;
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const LinTerm& t) { return t.coeff == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

bool AffineExpr::is_zero() const {
    AffineExpr c = *this;
    c.canonicalize();
    return c.terms_.empty() && c.constant_ == 0.0;
}

bool AffineExpr::same_as(const AffineExpr& o) const {
    AffineExpr d = *this;
    d -= o;
    return d.is_zero();
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

ArrowPsd3 make_arrow_psd(const std::array<std::array<AffineExpr, 3>, 3>& m) {
    if (!m[0][1].same_as(AffineExpr{})) throw std::invalid_argument("arrow PSD: (0,1) entry must be zero");
    if (!m[0][0].same_as(m[1][1])) throw std::invalid_argument("arrow PSD: (0,0) and (1,1) entries must match");
    return ArrowPsd3{m[0][0], m[0][2], m[1][2], m[2][2]};
}

std::vector<Constraint> lmi_to_rotated_cone(const ArrowPsd3& block) {
    std::vector<Constraint> out;
    out.push_back(LinearIneq{block.diag});
    out.push_back(LinearIneq{block.corner});
    // diag * corner >= a^2 + b^2, as 2 * diag * corner >= ||sqrt(2) a, sqrt(2) b||^2.
    const double s = std::sqrt(2.0);
    out.push_back(RotatedCone{block.diag, block.corner, {s * block.a, s * block.b}});
    return out;
}

ConicProgram::ConicProgram(Index variable_count)
    : variable_count_(variable_count),
      objective_(static_cast<std::size_t>(variable_count), 0.0) {
    if (variable_count < 0) throw std::invalid_argument("negative variable count");
}

void ConicProgram::set_objective_coeff(Index var, double coeff) {
    if (var < 0 || var >= variable_count_) throw std::invalid_argument("objective: variable out of range");
    objective_[static_cast<std::size_t>(var)] = coeff;
}

void ConicProgram::check_expr(const AffineExpr& e) const {
    for (const auto& t : e.terms())
        if (t.var < 0 || t.var >= variable_count_)
            throw std::invalid_argument("constraint references undeclared variable");
    if (!std::isfinite(e.constant())) throw std::invalid_argument("non-finite constant in constraint");
    for (const auto& t : e.terms())
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite coefficient in constraint");
}

void ConicProgram::add(Constraint c) {
    std::visit(
        [&](const auto& blk) {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, LinearEq> || std::is_same_v<T, LinearIneq>) {
                check_expr(blk.expr);
            } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
                check_expr(blk.bound);
                for (const auto& e : blk.norm_args) check_expr(e);
            } else if constexpr (std::is_same_v<T, RotatedCone>) {
                check_expr(blk.left);
                check_expr(blk.right);
                for (const auto& e : blk.norm_args) check_expr(e);
            } else {
                check_expr(blk.diag);
                check_expr(blk.a);
                check_expr(blk.b);
                check_expr(blk.corner);
            }
        },
        c);
    constraints_.push_back(std::move(c));
}

double ConicProgram::objective_value(std::span<const double> x) const {
    double v = 0.0;
    for (Index i = 0; i < variable_count_; ++i)
        v += objective_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    return v;
}

double constraint_violation(const Constraint& c, std::span<const double> x) {
    return std::visit(
        [&](const auto& blk) -> double {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, LinearEq>) {
                return std::abs(blk.expr.eval(x));
            } else if constexpr (std::is_same_v<T, LinearIneq>) {
                return std::max(0.0, -blk.expr.eval(x));
            } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
                double nn = 0.0;
                for (const auto& e : blk.norm_args) {
                    const double v = e.eval(x);
                    nn += v * v;
                }
                return std::max(0.0, std::sqrt(nn) - blk.bound.eval(x));
            } else if constexpr (std::is_same_v<T, RotatedCone>) {
                const double l = blk.left.eval(x);
                const double r = blk.right.eval(x);
                double nn = 0.0;
                for (const auto& e : blk.norm_args) {
                    const double v = e.eval(x);
                    nn += v * v;
                }
                return std::max({0.0, -l, -r, nn - 2.0 * l * r});
            } else {
                const double d = blk.diag.eval(x);
                const double a = blk.a.eval(x);
                const double b = blk.b.eval(x);
                const double cc = blk.corner.eval(x);
                return std::max({0.0, -d, -cc, a * a + b * b - d * cc});
            }
        },
        c);
}

double ConicProgram::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (const auto& c : constraints_) worst = std::max(worst, constraint_violation(c, x));
    return worst;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_expr(std::ostream& out, const AffineExpr& e) {
    AffineExpr c = e;
    c.canonicalize();
    out << num17(c.constant());
    for (const auto& t : c.terms()) out << " " << t.var << ":" << num17(t.coeff);
}

}  // namespace

void write_program(const ConicProgram& program, std::ostream& out) {
    // Format "uavsec-conic 1": one block per line, rows as
    // <constant> <var>:<coeff> ... entries. Objective is in the maximize sense.
    out << "uavsec-conic 1\n";
    out << "vars " << program.variable_count() << "\n";
    out << "maximize";
    for (Index i = 0; i < program.variable_count(); ++i) {
        const double c = program.objective()[static_cast<std::size_t>(i)];
        if (c != 0.0) out << " " << i << ":" << num17(c);
    }
    out << "\n";
    for (const auto& c : program.constraints()) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, LinearEq>) {
                    out << "eq ";
                    write_expr(out, blk.expr);
                    out << "\n";
                } else if constexpr (std::is_same_v<T, LinearIneq>) {
                    out << "ineq ";
                    write_expr(out, blk.expr);
                    out << "\n";
                } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
                    out << "soc " << blk.norm_args.size() << "\n  bound ";
                    write_expr(out, blk.bound);
                    out << "\n";
                    for (const auto& e : blk.norm_args) {
                        out << "  row ";
                        write_expr(out, e);
                        out << "\n";
                    }
                } else if constexpr (std::is_same_v<T, RotatedCone>) {
                    out << "rsoc " << blk.norm_args.size() << "\n  left ";
                    write_expr(out, blk.left);
                    out << "\n  right ";
                    write_expr(out, blk.right);
                    out << "\n";
                    for (const auto& e : blk.norm_args) {
                        out << "  row ";
                        write_expr(out, e);
                        out << "\n";
                    }
                } else {
                    out << "psd3arrow\n  diag ";
                    write_expr(out, blk.diag);
                    out << "\n  a ";
                    write_expr(out, blk.a);
                    out << "\n  b ";
                    write_expr(out, blk.b);
                    out << "\n  corner ";
                    write_expr(out, blk.corner);
                    out << "\n";
                }
            },
            c);
    }
}

std::string program_to_string(const ConicProgram& program) {
    std::ostringstream oss;
    write_program(program, oss);
    return oss.str();
}

}  // namespace uavsec::conic
