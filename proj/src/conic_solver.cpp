#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uavsec/conic.hpp"

// Primal-dual interior-point method with Nesterov-Todd scaling for
//   minimize c'x  s.t.  A x = b,  G x + s = h,  s in K,
// K = nonnegative orthant x second-order cones. Rotated cones and arrow PSD
// blocks are lowered to this family at compile time. The KKT system is solved
// with a regularized sparse LDL' factorization plus iterative refinement;
// data is Ruiz-equilibrated first (per-cone uniform row scaling).

namespace uavsec::conic {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConeLayout {
    int orthant = 0;
    std::vector<int> soc_dims;
    int total = 0;
    int degree() const { return orthant + static_cast<int>(soc_dims.size()); }
};

struct StandardForm {
    int n = 0;
    Vec c;
    SpMat A;
    Vec b;
    SpMat G;
    Vec h;
    ConeLayout cones;
};

struct RowBuf {
    std::vector<Triplet> trips;
    std::vector<double> rhs;
    int rows = 0;

    // Appends the row  -(terms . x) with rhs = constant, so h - Gx = expr(x).
    void add_expr_row(const AffineExpr& e) {
        for (const auto& t : e.terms())
            if (t.coeff != 0.0) trips.emplace_back(rows, t.var, -t.coeff);
        rhs.push_back(e.constant());
        ++rows;
    }
};

StandardForm compile(const ConicProgram& prog) {
    StandardForm sf;
    sf.n = prog.variable_count();
    sf.c = -Eigen::Map<const Vec>(prog.objective().data(), sf.n);  // maximize -> minimize

    // Lower arrow blocks first so a single pass sees only the base family.
    std::vector<Constraint> flat;
    for (const auto& c : prog.constraints()) {
        if (std::holds_alternative<ArrowPsd3>(c)) {
            auto lowered = lmi_to_rotated_cone(std::get<ArrowPsd3>(c));
            for (auto& lc : lowered) flat.push_back(std::move(lc));
        } else {
            flat.push_back(c);
        }
    }

    std::vector<Triplet> a_trips;
    std::vector<double> b_vals;
    int eq_rows = 0;
    RowBuf lin;   // orthant rows
    RowBuf cone;  // SOC rows
    ConeLayout layout;

    auto add_soc = [&](const AffineExpr& bound, const std::vector<AffineExpr>& args) {
        if (args.empty()) {
            lin.add_expr_row(bound);
            return;
        }
        cone.add_expr_row(bound);
        for (const auto& e : args) cone.add_expr_row(e);
        layout.soc_dims.push_back(static_cast<int>(args.size()) + 1);
    };

    for (const auto& c : flat) {
        if (const auto* eq = std::get_if<LinearEq>(&c)) {
            for (const auto& t : eq->expr.terms())
                if (t.coeff != 0.0) a_trips.emplace_back(eq_rows, t.var, t.coeff);
            b_vals.push_back(-eq->expr.constant());
            ++eq_rows;
        } else if (const auto* li = std::get_if<LinearIneq>(&c)) {
            lin.add_expr_row(li->expr);
        } else if (const auto* soc = std::get_if<SecondOrderCone>(&c)) {
            add_soc(soc->bound, soc->norm_args);
        } else if (const auto* rc = std::get_if<RotatedCone>(&c)) {
            if (rc->norm_args.empty()) {
                lin.add_expr_row(rc->left);
                lin.add_expr_row(rc->right);
            } else {
                // (l, r, w) in Qr  <=>  (l + r, l - r, sqrt(2) w) in Q.
                std::vector<AffineExpr> args;
                args.push_back(rc->left - rc->right);
                const double s2 = std::sqrt(2.0);
                for (const auto& w : rc->norm_args) args.push_back(s2 * w);
                add_soc(rc->left + rc->right, args);
            }
        }
    }

    layout.orthant = lin.rows;
    layout.total = lin.rows + cone.rows;

    sf.A.resize(eq_rows, sf.n);
    sf.A.setFromTriplets(a_trips.begin(), a_trips.end());
    sf.b.resize(eq_rows);
    for (int i = 0; i < eq_rows; ++i) sf.b[i] = b_vals[static_cast<std::size_t>(i)];

    std::vector<Triplet> g_trips = lin.trips;
    for (const auto& t : cone.trips)
        g_trips.emplace_back(t.row() + lin.rows, t.col(), t.value());
    sf.G.resize(layout.total, sf.n);
    sf.G.setFromTriplets(g_trips.begin(), g_trips.end());
    sf.h.resize(layout.total);
    for (int i = 0; i < lin.rows; ++i) sf.h[i] = lin.rhs[static_cast<std::size_t>(i)];
    for (int i = 0; i < cone.rows; ++i) sf.h[lin.rows + i] = cone.rhs[static_cast<std::size_t>(i)];
    sf.cones = std::move(layout);
    return sf;
}

struct Equilibration {
    Vec col;    // variable scaling d, x = d .* x_scaled
    Vec row_a;  // equality row scaling
    Vec row_g;  // cone row scaling, constant within each SOC block
    double cost = 1.0;
};

Equilibration equilibrate(StandardForm& sf) {
    const int n = sf.n;
    const int p = static_cast<int>(sf.A.rows());
    const int m = static_cast<int>(sf.G.rows());
    Equilibration eq;
    eq.col = Vec::Ones(n);
    eq.row_a = Vec::Ones(p);
    eq.row_g = Vec::Ones(m);

    Vec ra(p), rg(m), cn(n);
    for (int pass = 0; pass < 12; ++pass) {
        ra.setZero();
        rg.setZero();
        cn.setZero();
        for (int k = 0; k < sf.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf.A, k); it; ++it) {
                const double v = std::abs(it.value());
                ra[it.row()] = std::max(ra[it.row()], v);
                cn[it.col()] = std::max(cn[it.col()], v);
            }
        for (int k = 0; k < sf.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf.G, k); it; ++it) {
                const double v = std::abs(it.value());
                rg[it.row()] = std::max(rg[it.row()], v);
                cn[it.col()] = std::max(cn[it.col()], v);
            }
        // Rows of one SOC block share a scale, otherwise scaling would leave the cone.
        int row = sf.cones.orthant;
        for (int d : sf.cones.soc_dims) {
            const double blk = rg.segment(row, d).maxCoeff();
            rg.segment(row, d).setConstant(blk);
            row += d;
        }

        double dev = 0.0;
        auto scale_of = [&dev](double v) {
            if (v <= 0.0) return 1.0;
            dev = std::max(dev, std::abs(1.0 - v));
            return 1.0 / std::sqrt(v);
        };
        Vec sa = ra.unaryExpr(scale_of);
        Vec sg = rg.unaryExpr(scale_of);
        Vec sc = cn.unaryExpr(scale_of);

        for (int k = 0; k < sf.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf.A, k); it; ++it)
                it.valueRef() *= sa[it.row()] * sc[it.col()];
        for (int k = 0; k < sf.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf.G, k); it; ++it)
                it.valueRef() *= sg[it.row()] * sc[it.col()];
        eq.row_a.array() *= sa.array();
        eq.row_g.array() *= sg.array();
        eq.col.array() *= sc.array();
        if (dev < 1e-3) break;
    }

    sf.b.array() *= eq.row_a.array();
    sf.h.array() *= eq.row_g.array();
    sf.c.array() *= eq.col.array();
    const double cnorm = sf.c.size() > 0 ? sf.c.lpNorm<Eigen::Infinity>() : 0.0;
    eq.cost = cnorm > 1.0 ? 1.0 / cnorm : 1.0;
    sf.c *= eq.cost;
    return eq;
}

// Nesterov-Todd scaling per cone. For the orthant w2 = s/z; for each SOC the
// scaled point wbar with wbar'J wbar = 1 and magnitude eta.
struct Scalings {
    Vec orth_w;   // sqrt(s/z)
    Vec orth_l;   // lambda = sqrt(s z)
    struct Soc {
        double eta = 1.0;
        Vec wbar;
        Vec lambda;
    };
    std::vector<Soc> socs;
};

bool in_cone_interior(const Vec& u, const ConeLayout& lay, double margin = 0.0) {
    for (int i = 0; i < lay.orthant; ++i)
        if (!(u[i] > margin)) return false;
    int row = lay.orthant;
    for (int d : lay.soc_dims) {
        const double nrm = u.segment(row + 1, d - 1).norm();
        if (!(u[row] - nrm > margin)) return false;
        row += d;
    }
    return true;
}

bool compute_scalings(const Vec& s, const Vec& z, const ConeLayout& lay, Scalings& w) {
    w.orth_w.resize(lay.orthant);
    w.orth_l.resize(lay.orthant);
    for (int i = 0; i < lay.orthant; ++i) {
        if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
        w.orth_w[i] = std::sqrt(s[i] / z[i]);
        w.orth_l[i] = std::sqrt(s[i] * z[i]);
    }
    w.socs.assign(lay.soc_dims.size(), {});
    int row = lay.orthant;
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const int d = lay.soc_dims[k];
        auto sb = s.segment(row, d);
        auto zb = z.segment(row, d);
        const double sres = sb[0] * sb[0] - sb.tail(d - 1).squaredNorm();
        const double zres = zb[0] * zb[0] - zb.tail(d - 1).squaredNorm();
        if (!(sres > 0.0) || !(zres > 0.0)) return false;
        const Vec sbar = sb / std::sqrt(sres);
        const Vec zbar = zb / std::sqrt(zres);
        const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
        auto& soc = w.socs[k];
        soc.eta = std::pow(sres / zres, 0.25);
        soc.wbar.resize(d);
        soc.wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
        soc.wbar.tail(d - 1) = (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
        // lambda = W z
        soc.lambda.resize(d);
        const double wz = soc.wbar.tail(d - 1).dot(zb.tail(d - 1));
        soc.lambda[0] = soc.eta * (soc.wbar[0] * zb[0] + wz);
        soc.lambda.tail(d - 1) =
            soc.eta * (zb.tail(d - 1) +
                       (zb[0] + wz / (1.0 + soc.wbar[0])) * soc.wbar.tail(d - 1));
        row += d;
    }
    return true;
}

enum class Op { W, Winv };

// out = W v  or  W^{-1} v (W is symmetric).
void apply_scaling(const Scalings& w, const ConeLayout& lay, Op op, const Vec& v, Vec& out) {
    out.resize(v.size());
    for (int i = 0; i < lay.orthant; ++i)
        out[i] = (op == Op::W) ? w.orth_w[i] * v[i] : v[i] / w.orth_w[i];
    int row = lay.orthant;
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const int d = lay.soc_dims[k];
        const auto& soc = w.socs[k];
        auto vb = v.segment(row, d);
        const double sign = (op == Op::W) ? 1.0 : -1.0;  // W^{-1} uses J wbar
        const double w0 = soc.wbar[0];
        auto w1 = soc.wbar.tail(d - 1);
        const double dot = w1.dot(vb.tail(d - 1)) * sign;
        const double p0 = w0 * vb[0] + dot;
        out[row] = p0;
        out.segment(row + 1, d - 1) =
            vb.tail(d - 1) + sign * (vb[0] + dot / (1.0 + w0)) * w1;
        const double scale = (op == Op::W) ? soc.eta : 1.0 / soc.eta;
        out.segment(row, d) *= scale;
        row += d;
    }
}

// Jordan product u o v.
void jordan_mul(const ConeLayout& lay, const Vec& u, const Vec& v, Vec& out) {
    out.resize(u.size());
    for (int i = 0; i < lay.orthant; ++i) out[i] = u[i] * v[i];
    int row = lay.orthant;
    for (int d : lay.soc_dims) {
        auto ub = u.segment(row, d);
        auto vb = v.segment(row, d);
        out[row] = ub.dot(vb);
        out.segment(row + 1, d - 1) = ub[0] * vb.tail(d - 1) + vb[0] * ub.tail(d - 1);
        row += d;
    }
}

// out = lambda \ d (Jordan division by the scaling point).
void jordan_div_lambda(const Scalings& w, const ConeLayout& lay, const Vec& d, Vec& out) {
    out.resize(d.size());
    for (int i = 0; i < lay.orthant; ++i) out[i] = d[i] / w.orth_l[i];
    int row = lay.orthant;
    for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
        const int dim = lay.soc_dims[k];
        const auto& l = w.socs[k].lambda;
        auto db = d.segment(row, dim);
        const double det = l[0] * l[0] - l.tail(dim - 1).squaredNorm();
        const double x0 = (l[0] * db[0] - l.tail(dim - 1).dot(db.tail(dim - 1))) / det;
        out[row] = x0;
        out.segment(row + 1, dim - 1) = (db.tail(dim - 1) - x0 * l.tail(dim - 1)) / l[0];
        row += dim;
    }
}

Vec cone_identity(const ConeLayout& lay) {
    Vec e = Vec::Zero(lay.total);
    for (int i = 0; i < lay.orthant; ++i) e[i] = 1.0;
    int row = lay.orthant;
    for (int d : lay.soc_dims) {
        e[row] = 1.0;
        row += d;
    }
    return e;
}

double smallest_positive_root(double a, double b, double c) {
    // a t^2 + b t + c = 0, c > 0; returns +inf when no positive root.
    if (std::abs(a) < 1e-300) {
        if (b >= 0.0) return kInf;
        return -c / b;
    }
    const double disc = b * b - 4.0 * a * c;
    if (a > 0.0 && disc < 0.0) return kInf;
    if (disc < 0.0) return kInf;
    const double sq = std::sqrt(std::max(0.0, disc));
    // Numerically stable pair of roots.
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : kInf;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0) return r1;
    if (r2 > 0.0) return r2;
    return kInf;
}

// Largest step alpha with u + alpha du staying in the cone.
double max_step(const Vec& u, const Vec& du, const ConeLayout& lay) {
    double alpha = kInf;
    for (int i = 0; i < lay.orthant; ++i)
        if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
    int row = lay.orthant;
    for (int d : lay.soc_dims) {
        auto ub = u.segment(row, d);
        auto db = du.segment(row, d);
        const double a = db[0] * db[0] - db.tail(d - 1).squaredNorm();
        const double b = 2.0 * (ub[0] * db[0] - ub.tail(d - 1).dot(db.tail(d - 1)));
        const double c = ub[0] * ub[0] - ub.tail(d - 1).squaredNorm();
        alpha = std::min(alpha, smallest_positive_root(a, b, c));
        row += d;
    }
    return alpha;
}

class KktSystem {
  public:
    KktSystem(const StandardForm& sf, double reg) : sf_(sf), reg_(reg) {
        n_ = sf.n;
        p_ = static_cast<int>(sf.A.rows());
        m_ = static_cast<int>(sf.G.rows());
        dim_ = n_ + p_ + m_;
        build_pattern();
        solver_.analyzePattern(K_);
    }

    // Writes -(W'W + reg I) into the (z,z) block and refactorizes.
    bool factorize(const Scalings* w) {
        auto put = [&](std::size_t slot_index, double v) {
            const auto& sl = slots_[slot_index];
            K_.valuePtr()[sl.lower] = v;
            if (sl.upper >= 0) K_.valuePtr()[sl.upper] = v;
        };
        std::size_t si = 0;  // slots: per-row diagonal first, then SOC off-diagonals
        if (w == nullptr) {
            for (int i = 0; i < m_; ++i) put(static_cast<std::size_t>(i), -1.0 - reg_);
            si = static_cast<std::size_t>(m_);
            for (; si < slots_.size(); ++si) put(si, 0.0);
        } else {
            for (int i = 0; i < sf_.cones.orthant; ++i)
                put(static_cast<std::size_t>(i), -w->orth_w[i] * w->orth_w[i] - reg_);
            si = static_cast<std::size_t>(m_);
            int row = sf_.cones.orthant;
            for (std::size_t k = 0; k < sf_.cones.soc_dims.size(); ++k) {
                const int d = sf_.cones.soc_dims[k];
                const auto& soc = w->socs[k];
                const double e2 = soc.eta * soc.eta;
                for (int i = 0; i < d; ++i) {
                    for (int j = i; j < d; ++j) {
                        // W^2 = eta^2 (2 wbar wbar' - J)
                        double v = 2.0 * soc.wbar[i] * soc.wbar[j];
                        if (i == j) v -= (i == 0 ? 1.0 : -1.0);
                        v *= e2;
                        if (i == j)
                            put(static_cast<std::size_t>(row + i), -v - reg_);
                        else
                            put(si++, -v);
                    }
                }
                row += d;
            }
        }
        solver_.factorize(K_);
        return solver_.info() == Eigen::Success;
    }

    // Solves the *unregularized* KKT system via the regularized factor with
    // iterative refinement.
    Vec solve(const Vec& rhs) const {
        Vec x = solver_.solve(rhs);
        double best = kInf;
        Vec best_x = x;
        for (int pass = 0; pass < 10; ++pass) {
            Vec r = rhs - apply_true(x);
            const double rn = r.lpNorm<Eigen::Infinity>();
            if (rn < best) {
                best = rn;
                best_x = x;
            }
            if (rn < 1e-14 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) break;
            x += solver_.solve(r);
        }
        return best_x;
    }

    int n() const { return n_; }
    int p() const { return p_; }
    int m() const { return m_; }
    int dim() const { return dim_; }

  private:
    // K x with the regularization removed (true KKT matrix is K - R).
    Vec apply_true(const Vec& v) const {
        Vec out = K_ * v;
        out.head(n_) -= reg_ * v.head(n_);
        out.tail(p_ + m_) += reg_ * v.tail(p_ + m_);
        return out;
    }

    void add_sym(std::vector<Triplet>& trips, int r, int c, double v) {
        trips.emplace_back(r, c, v);
        if (r != c) trips.emplace_back(c, r, v);
    }

    void build_pattern() {
        std::vector<Triplet> trips;
        for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, reg_);
        for (int k = 0; k < sf_.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf_.A, k); it; ++it)
                add_sym(trips, n_ + static_cast<int>(it.row()), static_cast<int>(it.col()),
                        it.value());
        for (int i = 0; i < p_; ++i) trips.emplace_back(n_ + i, n_ + i, -reg_);
        for (int k = 0; k < sf_.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(sf_.G, k); it; ++it)
                add_sym(trips, n_ + p_ + static_cast<int>(it.row()),
                        static_cast<int>(it.col()), it.value());
        for (int i = 0; i < m_; ++i) trips.emplace_back(n_ + p_ + i, n_ + p_ + i, -1.0 - reg_);
        int row = sf_.cones.orthant;
        for (int d : sf_.cones.soc_dims) {
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j)
                    add_sym(trips, n_ + p_ + row + j, n_ + p_ + row + i, 0.0);
            row += d;
        }
        K_.resize(dim_, dim_);
        K_.setFromTriplets(trips.begin(), trips.end());
        K_.makeCompressed();

        slots_.clear();
        for (int i = 0; i < m_; ++i)
            slots_.push_back({find_slot(n_ + p_ + i, n_ + p_ + i), -1});
        row = sf_.cones.orthant;
        for (int d : sf_.cones.soc_dims) {
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j)
                    slots_.push_back({find_slot(n_ + p_ + row + j, n_ + p_ + row + i),
                                      find_slot(n_ + p_ + row + i, n_ + p_ + row + j)});
            row += d;
        }
    }

    std::ptrdiff_t find_slot(int r, int c) {
        for (SpMat::InnerIterator it(K_, c); it; ++it)
            if (it.row() == r) return &it.valueRef() - K_.valuePtr();
        throw std::logic_error("kkt: missing slot");
    }

    struct Slot {
        std::ptrdiff_t lower;
        std::ptrdiff_t upper;  // -1 for diagonal entries
    };

    const StandardForm& sf_;
    double reg_;
    int n_ = 0, p_ = 0, m_ = 0, dim_ = 0;
    SpMat K_;
    std::vector<Slot> slots_;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> solver_;
};

struct IpmResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    Vec x, y, z, s;
    double kkt_residual = kInf;
    int iterations = 0;
};

IpmResult run_ipm(const StandardForm& sf, const SolverOptions& opt) {
    IpmResult res;
    const int n = sf.n;
    const int p = static_cast<int>(sf.A.rows());
    const int m = static_cast<int>(sf.G.rows());
    const ConeLayout& lay = sf.cones;

    if (m == 0) {
        // Pure equality problem: one KKT solve decides it.
        KktSystem kkt(sf, 1e-10);
        if (!kkt.factorize(nullptr)) return res;
        Vec rhs(n + p);
        rhs.head(n) = -sf.c;
        rhs.tail(p) = sf.b;
        Vec xy = kkt.solve(rhs);
        res.x = xy.head(n);
        res.y = xy.tail(p);
        const double dres = (sf.A.transpose() * res.y + sf.c).lpNorm<Eigen::Infinity>();
        const double pres = p > 0 ? (sf.A * res.x - sf.b).lpNorm<Eigen::Infinity>() : 0.0;
        res.kkt_residual = std::max(pres, dres);
        if (res.kkt_residual < std::sqrt(opt.tol))
            res.status = SolveStatus::Optimal;
        else if (sf.c.lpNorm<Eigen::Infinity>() > 0.0)
            res.status = SolveStatus::Unbounded;
        return res;
    }

    // Homogeneous self-dual embedding: iterate on (x, y, z, s, tau, kappa).
    // tau -> positive with kappa -> 0 certifies optimality of x/tau; the
    // reverse certifies primal or dual infeasibility.
    KktSystem kkt(sf, 1e-11);
    const Vec e = cone_identity(lay);
    const double nu = static_cast<double>(lay.degree()) + 1.0;

    if (!kkt.factorize(nullptr)) return res;
    Vec x, y, z, s;
    {
        Vec rhs = Vec::Zero(kkt.dim());
        rhs.segment(n, p) = sf.b;
        rhs.tail(m) = sf.h;
        Vec sol = kkt.solve(rhs);
        x = sol.head(n);
        s = -sol.tail(m);  // s = h - Gx
        rhs.setZero();
        rhs.head(n) = -sf.c;
        sol = kkt.solve(rhs);
        y = sol.segment(n, p);
        z = sol.tail(m);

        auto shift_into_cone = [&](Vec& u) {
            double t = -kInf;
            for (int i = 0; i < lay.orthant; ++i) t = std::max(t, -u[i]);
            int row = lay.orthant;
            for (int d : lay.soc_dims) {
                t = std::max(t, u.segment(row + 1, d - 1).norm() - u[row]);
                row += d;
            }
            if (t >= -1e-8) u += (1.0 + std::max(0.0, t)) * e;
        };
        shift_into_cone(s);
        shift_into_cone(z);
        if (!in_cone_interior(s, lay) || !in_cone_interior(z, lay)) {
            s = e;
            z = e;
        }
    }
    double tau = 1.0;
    double kappa = 1.0;

    const double bnorm = std::max(1.0, sf.b.size() ? sf.b.lpNorm<Eigen::Infinity>() : 0.0);
    const double hnorm = std::max(1.0, sf.h.lpNorm<Eigen::Infinity>());
    const double cnorm = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());

    Scalings w;
    Vec rx(n), ry(p), rz(m);
    Vec lambda(m), ll(m), ds(m), tmp(m), wds(m);
    double best_kkt = kInf;
    double last_alpha = 1.0;
    std::vector<double> gap_hist;

    auto assemble_lambda = [&](Vec& out) {
        for (int i = 0; i < lay.orthant; ++i) out[i] = w.orth_l[i];
        int row = lay.orthant;
        for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
            out.segment(row, lay.soc_dims[k]) = w.socs[k].lambda;
            row += lay.soc_dims[k];
        }
    };

    for (int iter = 0; iter <= opt.max_iterations; ++iter) {
        res.iterations = iter;
        rx = sf.A.transpose() * y + sf.G.transpose() * z + tau * sf.c;
        ry = sf.A * x - tau * sf.b;
        rz = sf.G * x + s - tau * sf.h;
        const double rtau = sf.c.dot(x) + sf.b.dot(y) + sf.h.dot(z) + kappa;

        // Convergence measured on the de-homogenized point x/tau.
        const double pcost = sf.c.dot(x) / tau;
        const double dcost = (-sf.b.dot(y) - sf.h.dot(z)) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double pres = std::max(p > 0 ? ry.lpNorm<Eigen::Infinity>() / (tau * bnorm) : 0.0,
                                     rz.lpNorm<Eigen::Infinity>() / (tau * hnorm));
        const double dres = rx.lpNorm<Eigen::Infinity>() / (tau * cnorm);
        const double relgap = std::abs(pcost - dcost) / std::max(1.0, std::abs(pcost));
        const double kkt_res = std::max({pres, dres, relgap});
        best_kkt = std::min(best_kkt, kkt_res);

        if (opt.verbose)
            std::printf("ipm %3d pcost=% .9e pres=%.2e dres=%.2e gap=%.2e tau=%.2e kappa=%.2e\n",
                        iter, pcost, pres, dres, relgap, tau, kappa);

        const bool feasible_now = pres <= opt.tol && dres <= opt.tol;
        if (feasible_now && (relgap <= opt.tol || gap <= opt.tol * opt.tol)) {
            res.status = SolveStatus::Optimal;
            res.x = x / tau;
            res.y = y / tau;
            res.z = z / tau;
            res.s = s / tau;
            res.kkt_residual = kkt_res;
            return res;
        }
        // Degenerate optimal faces can pin the certified gap a couple of
        // orders above tol while the primal iterate has long converged; once
        // the gap improves by less than 2x over a 15-iteration window, accept
        // the point at reduced gap accuracy (the achieved figures stay
        // visible through kkt_residual).
        gap_hist.push_back(relgap);
        const std::size_t lag = 15;
        const bool stalled = (gap_hist.size() > lag &&
                              relgap > 0.5 * gap_hist[gap_hist.size() - 1 - lag]) ||
                             iter == opt.max_iterations;
        const double accept = std::max(opt.accept_tol, opt.tol);
        if (pres <= accept && dres <= accept && stalled && relgap <= accept) {
            res.status = SolveStatus::Optimal;
            res.x = x / tau;
            res.y = y / tau;
            res.z = z / tau;
            res.s = s / tau;
            res.kkt_residual = kkt_res;
            return res;
        }

        // Infeasibility: tau -> 0 faster than kappa, with a clean certificate.
        const double ib = sf.b.dot(y) + sf.h.dot(z);
        if (kappa > 1e-8 && tau <= 1e-10 * std::max(1.0, kappa)) {
            if (ib < 0.0) {
                const double cert =
                    (sf.A.transpose() * y + sf.G.transpose() * z).lpNorm<Eigen::Infinity>() /
                    (-ib);
                if (cert <= 1e-6) {
                    res.status = SolveStatus::Infeasible;
                    res.kkt_residual = cert;
                    return res;
                }
            }
            if (sf.c.dot(x) < 0.0) {
                res.status = SolveStatus::Unbounded;
                res.x = x / std::max(1e-300, -sf.c.dot(x));
                res.kkt_residual = best_kkt;
                return res;
            }
            res.status = SolveStatus::NumericalFailure;
            return res;
        }
        // Early certificate exit while tau is still sizable.
        if (ib < 0.0) {
            const double scale = -ib;
            const double cert =
                (sf.A.transpose() * y + sf.G.transpose() * z).lpNorm<Eigen::Infinity>() / scale;
            const double size = std::max(
                {1.0, y.size() ? y.lpNorm<Eigen::Infinity>() / scale : 0.0,
                 z.lpNorm<Eigen::Infinity>() / scale});
            if (cert <= 1e-10 * size && kappa > 1e3 * tau) {
                res.status = SolveStatus::Infeasible;
                res.kkt_residual = cert;
                return res;
            }
        }

        if (iter == opt.max_iterations) break;

        const double mu = (s.dot(z) + tau * kappa) / nu;
        if (!compute_scalings(s, z, lay, w)) break;
        if (!kkt.factorize(&w)) break;
        assemble_lambda(lambda);
        jordan_mul(lay, lambda, lambda, ll);

        // Basis solve for the tau column.
        Vec th;
        {
            Vec rhs(kkt.dim());
            rhs.head(n) = -sf.c;
            rhs.segment(n, p) = sf.b;
            rhs.tail(m) = sf.h;
            th = kkt.solve(rhs);
        }
        const Vec th_x = th.head(n);
        const Vec th_y = th.segment(n, p);
        const Vec th_z = th.tail(m);
        const double th_dot = sf.c.dot(th_x) + sf.b.dot(th_y) + sf.h.dot(th_z);

        // One Newton direction for given residual/complementarity targets.
        auto direction = [&](const Vec& bx, const Vec& by, const Vec& bz, double btau,
                             const Vec& bs, double bkappa, Vec& dx, Vec& dy, Vec& dz,
                             Vec& dsv, double& dtau, double& dkappa) {
            jordan_div_lambda(w, lay, bs, tmp);
            apply_scaling(w, lay, Op::W, tmp, wds);
            Vec rhs(kkt.dim());
            rhs.head(n) = bx;
            rhs.segment(n, p) = by;
            rhs.tail(m) = bz - wds;
            Vec u = kkt.solve(rhs);
            const double num = btau - bkappa / tau - sf.c.dot(u.head(n)) -
                               sf.b.dot(u.segment(n, p)) - sf.h.dot(u.tail(m));
            const double den = th_dot - kappa / tau;
            dtau = num / den;
            dx = u.head(n) + dtau * th_x;
            dy = u.segment(n, p) + dtau * th_y;
            dz = u.tail(m) + dtau * th_z;
            dsv = bz + dtau * sf.h - sf.G * dx;
            dkappa = (bkappa - kappa * dtau) / tau;
        };

        Vec dxa(n), dya(p), dza(m), dsa(m);
        double dtaua = 0.0, dkappaa = 0.0;
        ds = -ll;
        direction(-rx, -ry, -rz, -rtau, ds, -tau * kappa, dxa, dya, dza, dsa, dtaua, dkappaa);
        // Step lengths are computed against the scaled point lambda, where the
        // cone geometry stays well conditioned even for nearly degenerate pairs.
        Vec wis(m), wz(m);
        apply_scaling(w, lay, Op::Winv, dsa, wis);
        apply_scaling(w, lay, Op::W, dza, wz);
        double alpha_aff = std::min({1.0, max_step(lambda, wis, lay), max_step(lambda, wz, lay)});
        if (dtaua < 0.0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
        if (dkappaa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);
        const double mu_aff = ((s + alpha_aff * dsa).dot(z + alpha_aff * dza) +
                               (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) /
                              nu;
        double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);
        // A blocked predictor drives sigma to 1 and freezes mu even when the
        // combined step still moves freely; cap the centering weight whenever
        // steps are flowing.
        sigma = std::min(sigma, last_alpha >= 0.3 ? 0.9 : 0.995);

        // Combined direction with a step-damped Mehrotra correction.
        const double cscale = std::min(1.0, alpha_aff * alpha_aff);
        Vec corr(m);
        jordan_mul(lay, wis, wz, corr);
        ds = sigma * mu * e - ll - cscale * corr;
        const double bkappa = sigma * mu - tau * kappa - cscale * dtaua * dkappaa;

        Vec dx(n), dy(p), dz(m), dsv(m);
        double dtau = 0.0, dkappa = 0.0;
        const double rscale = -(1.0 - sigma);
        direction(rscale * rx, rscale * ry, rscale * rz, rscale * rtau, ds, bkappa, dx, dy, dz,
                  dsv, dtau, dkappa);

        apply_scaling(w, lay, Op::Winv, dsv, wis);
        apply_scaling(w, lay, Op::W, dz, wz);
        double alpha =
            std::min({1.0, 0.99 * max_step(lambda, wis, lay), 0.99 * max_step(lambda, wz, lay)});
        if (dtau < 0.0) alpha = std::min(alpha, -0.99 * tau / dtau);
        if (dkappa < 0.0) alpha = std::min(alpha, -0.99 * kappa / dkappa);
        // Roundoff near a cone boundary can push the quadratic root past the
        // true crossing; back off until the stepped point is strictly interior.
        for (int guard = 0; guard < 60; ++guard) {
            if (in_cone_interior(s + alpha * dsv, lay) && in_cone_interior(z + alpha * dz, lay) &&
                tau + alpha * dtau > 0.0 && kappa + alpha * dkappa > 0.0)
                break;
            alpha *= 0.5;
        }
        if (!std::isfinite(alpha) || alpha < 1e-14) break;

        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * dsv;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        last_alpha = alpha;
    }

    res.x = x / tau;
    res.y = y / tau;
    res.z = z / tau;
    res.s = s / tau;
    res.kkt_residual = best_kkt;
    res.status = SolveStatus::NumericalFailure;
    return res;
}

ConicSolution solve_internal(const ConicProgram& program, const SolverOptions& options,
                             bool allow_certificates);

void append_cone_membership(ConicProgram& prog, const ConeLayout& lay, int z_offset) {
    for (int i = 0; i < lay.orthant; ++i)
        prog.add_linear_ineq(AffineExpr::variable(z_offset + i));
    int row = lay.orthant;
    for (int d : lay.soc_dims) {
        std::vector<AffineExpr> args;
        for (int i = 1; i < d; ++i) args.push_back(AffineExpr::variable(z_offset + row + i));
        prog.add(SecondOrderCone{std::move(args), AffineExpr::variable(z_offset + row)});
        row += d;
    }
}

// Farkas certificate of primal infeasibility: z in K*, A'y + G'z = 0,
// b'y + h'z = -1. Solved as an SOCP minimizing the residual norm; a residual
// near zero certifies infeasibility of the original program.
bool primal_infeasibility_certified(const StandardForm& sf, const SolverOptions& opt) {
    const int p = static_cast<int>(sf.A.rows());
    const int m = static_cast<int>(sf.G.rows());
    const int n = sf.n;
    ConicProgram cert(p + m + 1);
    const int t_idx = p + m;
    cert.set_objective_coeff(t_idx, -1.0);  // minimize t

    std::vector<AffineExpr> resid(static_cast<std::size_t>(n));
    for (int k = 0; k < sf.A.outerSize(); ++k)
        for (SpMat::InnerIterator it(sf.A, k); it; ++it)
            resid[static_cast<std::size_t>(it.col())] +=
                AffineExpr::variable(static_cast<Index>(it.row()), it.value());
    for (int k = 0; k < sf.G.outerSize(); ++k)
        for (SpMat::InnerIterator it(sf.G, k); it; ++it)
            resid[static_cast<std::size_t>(it.col())] +=
                AffineExpr::variable(static_cast<Index>(p + it.row()), it.value());
    cert.add(SecondOrderCone{std::move(resid), AffineExpr::variable(t_idx)});

    AffineExpr normalize(1.0);  // b'y + h'z + 1 == 0
    for (int i = 0; i < p; ++i)
        if (sf.b[i] != 0.0) normalize += AffineExpr::variable(i, sf.b[i]);
    for (int i = 0; i < m; ++i)
        if (sf.h[i] != 0.0) normalize += AffineExpr::variable(p + i, sf.h[i]);
    cert.add_linear_eq(normalize);
    append_cone_membership(cert, sf.cones, p);

    SolverOptions copt = opt;
    copt.verbose = false;
    copt.max_iterations = 100;
    const ConicSolution sol = solve_internal(cert, copt, false);
    return sol.status == SolveStatus::Optimal &&
           sol.primal[static_cast<std::size_t>(t_idx)] <= 1e-6;
}

// Improving-ray certificate of unboundedness: A x = 0, -G x in K, c'x = -1.
bool unboundedness_certified(const StandardForm& sf, const SolverOptions& opt) {
    const int p = static_cast<int>(sf.A.rows());
    const int n = sf.n;
    ConicProgram cert(n + 1);
    const int t_idx = n;
    cert.set_objective_coeff(t_idx, -1.0);

    std::vector<AffineExpr> eqres(static_cast<std::size_t>(p));
    for (int k = 0; k < sf.A.outerSize(); ++k)
        for (SpMat::InnerIterator it(sf.A, k); it; ++it)
            eqres[static_cast<std::size_t>(it.row())] +=
                AffineExpr::variable(static_cast<Index>(it.col()), it.value());
    cert.add(SecondOrderCone{std::move(eqres), AffineExpr::variable(t_idx)});

    AffineExpr normalize(1.0);  // c'x + 1 == 0
    for (int i = 0; i < n; ++i)
        if (sf.c[i] != 0.0) normalize += AffineExpr::variable(i, sf.c[i]);
    cert.add_linear_eq(normalize);

    // -Gx in K, expressed row-block-wise.
    std::vector<AffineExpr> grows(static_cast<std::size_t>(sf.G.rows()));
    for (int k = 0; k < sf.G.outerSize(); ++k)
        for (SpMat::InnerIterator it(sf.G, k); it; ++it)
            grows[static_cast<std::size_t>(it.row())] +=
                AffineExpr::variable(static_cast<Index>(it.col()), -it.value());
    for (int i = 0; i < sf.cones.orthant; ++i) cert.add_linear_ineq(grows[static_cast<std::size_t>(i)]);
    int row = sf.cones.orthant;
    for (int d : sf.cones.soc_dims) {
        std::vector<AffineExpr> args;
        for (int i = 1; i < d; ++i) args.push_back(grows[static_cast<std::size_t>(row + i)]);
        cert.add(SecondOrderCone{std::move(args), grows[static_cast<std::size_t>(row)]});
        row += d;
    }

    SolverOptions copt = opt;
    copt.verbose = false;
    copt.max_iterations = 100;
    const ConicSolution sol = solve_internal(cert, copt, false);
    return sol.status == SolveStatus::Optimal &&
           sol.primal[static_cast<std::size_t>(t_idx)] <= 1e-6;
}

}  // namespace

namespace {

ConicSolution solve_internal(const ConicProgram& program, const SolverOptions& options,
                             bool allow_certificates) {
    StandardForm sf = compile(program);
    Equilibration eq = equilibrate(sf);
    IpmResult ipm = run_ipm(sf, options);

    if (ipm.status == SolveStatus::NumericalFailure && allow_certificates) {
        // The plain path-following loop stalls on pathological problems; settle
        // the classification with explicit Farkas / improving-ray subproblems.
        const double ib =
            ipm.y.size() || ipm.z.size() ? sf.b.dot(ipm.y) + sf.h.dot(ipm.z) : 0.0;
        const double cx = ipm.x.size() ? sf.c.dot(ipm.x) : 0.0;
        if (ib < 0.0 && primal_infeasibility_certified(sf, options))
            ipm.status = SolveStatus::Infeasible;
        else if (cx < 0.0 && unboundedness_certified(sf, options))
            ipm.status = SolveStatus::Unbounded;
    }

    ConicSolution sol;
    sol.status = ipm.status;
    sol.iterations = ipm.iterations;
    sol.kkt_residual = ipm.kkt_residual;
    sol.primal.assign(static_cast<std::size_t>(program.variable_count()), 0.0);
    if (ipm.x.size() == program.variable_count()) {
        for (Index i = 0; i < program.variable_count(); ++i)
            sol.primal[static_cast<std::size_t>(i)] = eq.col[i] * ipm.x[i];
    }
    sol.objective_value = program.objective_value(sol.primal);
    return sol;
}

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& options) {
    return solve_internal(program, options, true);
}

ConicSolution solve(const ConicProgram& program, double tol) {
    SolverOptions opt;
    opt.tol = tol;
    return solve(program, opt);
}

}  // namespace uavsec::conic
