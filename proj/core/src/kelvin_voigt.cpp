#include "evo/kelvin_voigt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace evo {

namespace {

double min_sym_eig(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

void require_lower_bound(const OperatorFamily& fam, const std::vector<double>& t_samples,
                         double c, const char* name) {
    for (double t : t_samples) {
        const double lambda = min_sym_eig(fam.at(t));
        if (lambda < c - 1e-12) {
            std::ostringstream msg;
            msg << "kelvin-voigt hypothesis fails: " << name << " has eigenvalue " << lambda
                << " < c=" << c << " at t=" << t;
            throw PreconditionError(msg.str());
        }
    }
}

}  // namespace

void KelvinVoigtConfig::validate() const {
    if (m < 2) throw PreconditionError("kelvin-voigt: m must be >= 2");
    if (!(dx > 0.0)) throw PreconditionError("kelvin-voigt: dx must be positive");
    if (!(c > 0.0)) throw PreconditionError("kelvin-voigt: c must be positive");
    if (viscous_cells.empty())
        throw PreconditionError("kelvin-voigt: D vanishes identically (no viscous cells)");
    std::set<int> seen;
    for (int j : viscous_cells) {
        if (j < 0 || j >= m) throw PreconditionError("kelvin-voigt: viscous cell out of range");
        if (!seen.insert(j).second)
            throw PreconditionError("kelvin-voigt: duplicate viscous cell");
    }
    const int r = static_cast<int>(viscous_cells.size());
    if (C.dim != m || eta.dim != m || B.dim != r)
        throw PreconditionError("kelvin-voigt: family dimensions disagree with m and V");
}

KelvinVoigtConfig KelvinVoigtConfig::reference(int m, double dx) {
    KelvinVoigtConfig cfg;
    cfg.m = m;
    cfg.dx = dx;
    for (int j = 0; j < m / 2; ++j) cfg.viscous_cells.push_back(j);
    cfg.C = OperatorFamily::identity(m);
    cfg.B = OperatorFamily::identity(m / 2);
    cfg.eta = OperatorFamily::identity(m);
    cfg.c = 1.0;
    return cfg;
}

KelvinVoigtConfig KelvinVoigtConfig::purely_viscous(int m, double dx) {
    KelvinVoigtConfig cfg;
    cfg.m = m;
    cfg.dx = dx;
    for (int j = 0; j < m; ++j) cfg.viscous_cells.push_back(j);
    cfg.C = OperatorFamily::identity(m);
    cfg.B = OperatorFamily::identity(m);
    cfg.eta = OperatorFamily::identity(m);
    cfg.c = 1.0;
    return cfg;
}

SchurDecomposition schur_decompose(const Eigen::MatrixXd& c_t, const Eigen::MatrixXd& b_t,
                                   const SubspaceProjector& v) {
    if (c_t.rows() != v.dim() || c_t.cols() != v.dim())
        throw PreconditionError("schur_decompose: C dimension mismatch");
    const int r = v.rank();
    if (b_t.rows() != r || b_t.cols() != r)
        throw PreconditionError("schur_decompose: B must act on V");
    const Eigen::MatrixXd c_vv = v.basis().transpose() * c_t * v.basis();
    const Eigen::MatrixXd c_pv = v.complement().transpose() * c_t * v.basis();
    const Eigen::MatrixXd c_pp = v.complement().transpose() * c_t * v.complement();

    const double lambda = min_sym_eig(c_pp);
    if (!(lambda > 1e-12)) {
        std::ostringstream msg;
        msg << "schur_decompose: complement block not invertible (min eigenvalue " << lambda
            << ")";
        throw SolveError(msg.str());
    }

    SchurDecomposition dec;
    const int s = v.dim() - r;
    dec.c_block = s > 0 ? Eigen::MatrixXd(c_pp.inverse()) : Eigen::MatrixXd(0, 0);
    dec.S = Eigen::MatrixXd::Identity(v.dim(), v.dim());
    if (s > 0) dec.S.bottomLeftCorner(s, r) = -dec.c_block * c_pv;
    dec.schur_block =
        s > 0 ? Eigen::MatrixXd(c_vv - c_pv.transpose() * dec.c_block * c_pv) : c_vv;
    return dec;
}

Eigen::MatrixXd schur_reconstruct(const SchurDecomposition& dec) {
    const int r = static_cast<int>(dec.schur_block.rows());
    const int s = static_cast<int>(dec.c_block.rows());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(r + s, r + s);
    w.topLeftCorner(r, r) = dec.schur_block;
    if (s > 0) w.bottomRightCorner(s, s) = dec.c_block.inverse();
    const Eigen::MatrixXd s_inv = dec.S.inverse();
    return s_inv.transpose() * w * s_inv;
}

namespace {

/// Per-time Schur data in [V; V_perp] block coordinates plus the sup norms the
/// deterministic tail bound needs.
struct KvFrames {
    SubspaceProjector v_stress;
    std::function<Eigen::MatrixXd(double)> s_at;       // block S(t)
    std::function<Eigen::MatrixXd(double)> schur_at;   // r x r
    std::function<Eigen::MatrixXd(double)> cblock_at;  // s x s inverse block
    std::function<Eigen::MatrixXd(double)> binv_at;    // r x r
};

KvFrames make_frames(const KelvinVoigtConfig& cfg) {
    KvFrames f{SubspaceProjector::coordinates(cfg.m, cfg.viscous_cells), {}, {}, {}, {}};
    const SubspaceProjector v = f.v_stress;
    const OperatorFamily c_fam = cfg.C;
    const OperatorFamily b_fam = cfg.B;
    f.s_at = [c_fam, b_fam, v](double t) { return schur_decompose(c_fam.at(t), b_fam.at(t), v).S; };
    f.schur_at = [c_fam, b_fam, v](double t) {
        return schur_decompose(c_fam.at(t), b_fam.at(t), v).schur_block;
    };
    f.cblock_at = [c_fam, b_fam, v](double t) {
        return schur_decompose(c_fam.at(t), b_fam.at(t), v).c_block;
    };
    f.binv_at = [b_fam](double t) { return Eigen::MatrixXd(b_fam.at(t).inverse()); };
    return f;
}

double sup_norm(const std::function<Eigen::MatrixXd(double)>& fn,
                const std::vector<double>& ts) {
    double best = 0.0;
    for (double t : ts) best = std::max(best, fn(t).norm());
    return best;
}

/// z with (1 + d0_inv B^{-1} schur) z = a, the exact discrete Volterra
/// forward substitution. a and z live in V coordinates.
Trajectory resolve_tail(const KvFrames& f, const Trajectory& a) {
    const TimeGrid& grid = a.grid();
    const double h = grid.h();
    const int r = a.dim();
    Trajectory z(grid, r);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(r);  // h * sum_{j<k} G_j z_j
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.t(k);
        const Eigen::MatrixXd g = f.binv_at(t) * f.schur_at(t);
        const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(r, r) + h * g;
        const Eigen::VectorXd zk = lhs.partialPivLu().solve(a.col(k) - acc);
        if (!zk.allFinite()) throw SolveError("kelvin-voigt tail: singular Volterra step");
        z.col(k) = zk;
        acc += h * g * zk;
    }
    return z;
}

double contraction_factor(const KvFrames& f, const Weight& w, const std::vector<double>& ts) {
    double sup = 0.0;
    for (double t : ts) sup = std::max(sup, (f.binv_at(t) * f.schur_at(t)).norm());
    return sup / w.rho;
}

}  // namespace

double neumann_tail_norm(const KelvinVoigtConfig& cfg, const Weight& w, const TimeGrid& grid) {
    cfg.validate();
    const KvFrames f = make_frames(cfg);
    const std::vector<double> ts = sample_times(grid);
    const double q = contraction_factor(f, w, ts);
    if (!(q < 1.0)) {
        std::ostringstream msg;
        msg << "neumann_tail_norm: contraction factor " << q << " >= 1; increase rho";
        throw PreconditionError(msg.str());
    }

    const int r = static_cast<int>(cfg.viscous_cells.size());
    std::mt19937_64 rng(0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Trajectory x(grid, r);
        for (int k = 0; k <= grid.n; ++k)
            for (int i = 0; i < r; ++i) x.col(k)(i) = gauss(rng);
        Trajectory b(grid, r);
        for (int k = 0; k <= grid.n; ++k) b.col(k) = f.binv_at(grid.t(k)) * x.col(k);
        // The series starts at k = 1, so the whole tail carries a d0_inv factor:
        // sum_{k>=1} (-d0_inv B^{-1} schur)^k d0_inv B^{-1}.
        const Trajectory a = d0_inv(b);
        const Trajectory tail = resolve_tail(f, a) - a;
        best = std::max(best, weighted_norm(tail, w) / weighted_norm(x, w));
    }
    return best;
}

KelvinVoigtSystem build_kv_problem(const KelvinVoigtConfig& cfg, const Weight& w,
                                   const TimeGrid& grid, const Trajectory& F) {
    cfg.validate();
    const int m = cfg.m;
    if (F.dim() != 2 * m)
        throw PreconditionError("kelvin-voigt: F must carry velocity and stress (dim 2m)");

    const std::vector<double> ts = sample_times(grid);
    require_lower_bound(cfg.B, ts, cfg.c, "Re B");
    require_lower_bound(cfg.eta, ts, cfg.c, "eta");
    const KvFrames f = make_frames(cfg);
    {
        const SubspaceProjector& v = f.v_stress;
        if (v.rank() < v.dim()) {
            OperatorFamily cpp;
            cpp.dim = v.dim() - v.rank();
            const OperatorFamily c_fam = cfg.C;
            cpp.sampler = [c_fam, v](double t) {
                return Eigen::MatrixXd(v.complement().transpose() * c_fam.at(t) *
                                       v.complement());
            };
            require_lower_bound(cpp, ts, cfg.c, "iota_perp* C iota_perp");
        }
    }

    const int r = static_cast<int>(cfg.viscous_cells.size());
    const SubspaceProjector v_stress = f.v_stress;
    // Ambient stress-space frame [iota_V iota_perp]; block coordinates are
    // exact permutations for coordinate subspaces.
    Eigen::MatrixXd frame(m, m);
    frame.leftCols(r) = v_stress.basis();
    frame.rightCols(m - r) = v_stress.complement();

    const OperatorFamily eta_fam = cfg.eta;
    OperatorFamily m0;
    m0.dim = 2 * m;
    m0.sampler = [m, r, frame, eta_fam, f](double t) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        out.topLeftCorner(m, m) = eta_fam.at(t);
        const int s = m - r;
        if (s > 0) {
            Eigen::MatrixXd mt0 = Eigen::MatrixXd::Zero(m, m);
            mt0.bottomRightCorner(s, s) = f.cblock_at(t);
            out.bottomRightCorner(m, m) = frame * mt0 * frame.transpose();
        }
        return out;
    };
    m0.breakpoints = cfg.C.breakpoints;

    OperatorFamily m1;
    m1.dim = 2 * m;
    m1.sampler = [m, r, frame, f](double t) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        Eigen::MatrixXd core = Eigen::MatrixXd::Zero(m, m);
        core.topLeftCorner(r, r) = f.binv_at(t);
        const Eigen::MatrixXd s_t = f.s_at(t);
        out.bottomRightCorner(m, m) = frame * (s_t * core * s_t.transpose()) * frame.transpose();
        return out;
    };
    m1.breakpoints = cfg.C.breakpoints;

    const SkewOperator a = make_block_skew(grad_1d_dirichlet(m, cfg.dx));
    EvoProblem p{std::move(m0), std::move(m1), a, F, w, std::nullopt};

    // S derivative through the same differentiation rules as the families.
    OperatorFamily s_fam;
    s_fam.dim = m;
    s_fam.sampler = f.s_at;
    s_fam.breakpoints = cfg.C.breakpoints;

    PerturbationOp minf;
    minf.apply = [m, r, frame, f, s_fam](const Trajectory& z) {
        if (z.dim() != 2 * m) throw PreconditionError("kelvin-voigt perturbation: dim mismatch");
        const TimeGrid& g = z.grid();
        // Stress block in [V; V_perp] coordinates, hit with S(t)^*.
        Trajectory w_v(g, r);
        for (int k = 0; k <= g.n; ++k) {
            const Eigen::VectorXd zb = frame.transpose() * z.col(k).tail(m);
            w_v.col(k) = (f.s_at(g.t(k)).transpose() * zb).head(r);
        }
        Trajectory bw(g, r);
        for (int k = 0; k <= g.n; ++k) bw.col(k) = f.binv_at(g.t(k)) * w_v.col(k);
        const Trajectory a_int = d0_inv(bw);          // d0^{-1} B^{-1} (S^* z)_V
        const Trajectory tail = resolve_tail(f, a_int) - a_int;

        Trajectory out = Trajectory::zero(g, 2 * m);
        for (int k = 0; k <= g.n; ++k) {
            const double t = g.t(k);
            Eigen::VectorXd blk = Eigen::VectorXd::Zero(m);
            blk.head(r) = a_int.col(k);
            Eigen::VectorXd blk_tail = Eigen::VectorXd::Zero(m);
            blk_tail.head(r) = tail.col(k);
            const Eigen::VectorXd ob =
                s_fam.derivative_at(t) * blk + f.s_at(t) * blk_tail;
            out.col(k).tail(m) = frame * ob;
        }
        return out;
    };
    minf.norm_estimate = [f, s_fam, ts, grid](const Weight& ww) {
        const double q = contraction_factor(f, ww, ts);
        const double binv_sup = sup_norm(f.binv_at, ts);
        const double s_sup = sup_norm(f.s_at, ts);
        const double sdot_sup =
            sup_norm([&s_fam](double t) { return s_fam.derivative_at(t); }, ts);
        // Discrete d0_inv slightly exceeds 1/rho; e^{rho h} absorbs the gap.
        const double d0inv_norm = std::exp(ww.rho * grid.h()) / ww.rho;
        if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
        return sdot_sup * d0inv_norm * binv_sup * s_sup +
               s_sup * s_sup * (q / (1.0 - q)) * d0inv_norm * binv_sup;
    };

    std::vector<int> full_indices;
    for (int j : cfg.viscous_cells) full_indices.push_back(m + j);
    SubspaceProjector v_full = SubspaceProjector::coordinates(2 * m, full_indices);

    return KelvinVoigtSystem{std::move(p), std::move(minf), std::move(v_full)};
}

}  // namespace evo
