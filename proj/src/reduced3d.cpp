#include "affine/reduced3d.hpp"

#include <cmath>
#include <random>

#include "affine/parallel.hpp"
#include "affine/reduced1d.hpp"

namespace affine {

namespace {

double pair_weight(double u, double v, double w, MeasureKind kind) {
    Vec q(3);
    q << u, v, w;
    return measure_weight(q, kind);
}

const CMat& axis_matrix(const AngularMatrices& s, int a) {
    switch (a) {
        case 0: return s.S1;
        case 1: return s.S2;
        default: return s.S3;
    }
}

}  // namespace

ReducedOperator3D reduced_kinetic_3d(const InertiaModel& model, double s, double j,
                                     const Grid3D& grid, double hbar) {
    if (model.n != 3) throw InvalidModel("reduced_kinetic_3d: body dimension must be 3");
    ReducedOperator3D op{Channel3D(s, j), model.kind,
                         model.kind == ModelKind::DAlembert ? MeasureKind::Lebesgue
                                                            : MeasureKind::Haar,
                         grid, hbar};
    if (grid.N < 2 || grid.hi <= grid.lo) throw ValidationError("reduced_kinetic_3d: bad grid");

    if (model.kind == ModelKind::DAlembert) {
        const double iscal = model.J(0, 0);
        if ((model.J - iscal * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() > 1e-10 * iscal) {
            throw InvalidModel("reduced_kinetic_3d: d'Alembert form requires doubly isotropic J");
        }
        if (grid.lo < 0.0) throw ValidationError("reduced_kinetic_3d: Q grid must be positive");
        op.coef_d = 0.5 * hbar * hbar / iscal;
        op.coef_qbar = 0.0;
        op.coef_lattice = 0.25 / iscal;
    } else {
        const double alpha =
            (model.kind == ModelKind::AffineAffine) ? model.A : model.I + model.A;
        op.coef_d = 0.5 * hbar * hbar / alpha;
        op.coef_qbar = hbar * hbar * model.B / (2.0 * alpha * (alpha + 3.0 * model.B));
        op.coef_lattice = 1.0 / (16.0 * alpha);
        if (model.kind == ModelKind::MetricAffine) {
            op.const_shift =
                model.I / (2.0 * (model.I * model.I - model.A * model.A)) * hbar * hbar * s *
                (s + 1.0);
        } else if (model.kind == ModelKind::AffineMetric) {
            op.const_shift =
                model.I / (2.0 * (model.I * model.I - model.A * model.A)) * hbar * hbar * j *
                (j + 1.0);
        }
    }

    op.Ss = angular_momentum_matrices(s, hbar);
    op.Sj = angular_momentum_matrices(j, hbar);
    op.ds = op.Ss.dim();
    op.dj = op.Sj.dim();

    const int N = grid.N;
    const double h = op.cell();
    op.node_weight.assign(op.nodes(), 0.0);
    op.mask.assign(op.nodes(), false);
    for (int i = 0; i < N; ++i) {
        for (int jn = 0; jn < N; ++jn) {
            for (int k = 0; k < N; ++k) {
                const double a = op.coord(i), b = op.coord(jn), c = op.coord(k);
                const double gap =
                    std::min({std::abs(a - b), std::abs(b - c), std::abs(a - c)});
                const int u = op.node_index(i, jn, k);
                if (gap < 0.5 * h) {
                    op.mask[u] = true;  // coincidence plane: weight zero, Dirichlet
                } else {
                    op.node_weight[u] = pair_weight(a, b, c, op.measure);
                }
            }
        }
    }
    return op;
}

CVec ReducedOperator3D::apply(const CVec& f, bool parallel) const {
    if (f.size() != amplitude_size()) throw ShapeError("ReducedOperator3D::apply: size mismatch");
    const int N = grid.N;
    const double h = cell();
    const int block = ds * dj;
    CVec out = CVec::Zero(f.size());

    auto body = [&](std::size_t node) {
        const int u = static_cast<int>(node);
        if (mask[u]) return;
        const int i = u / (N * N), jn = (u / N) % N, k = u % N;
        const double qa = coord(i), qb = coord(jn), qc = coord(k);
        const double pw = node_weight[u];

        Eigen::Map<const CMat> fu(f.data() + u * block, ds, dj);
        CMat acc = CMat::Zero(ds, dj);

        // -coef_d * D term: flux form per axis with face weights.
        const int steps[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        const int idx[3] = {i, jn, k};
        double diag_flux = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                const int ni = i + dir * steps[axis][0];
                const int nj = jn + dir * steps[axis][1];
                const int nk = k + dir * steps[axis][2];
                double fa = qa, fb = qb, fc = qc;
                const double shift = 0.5 * dir * h;
                if (axis == 0) fa += shift;
                if (axis == 1) fb += shift;
                if (axis == 2) fc += shift;
                const double pface = pair_weight(fa, fb, fc, measure);
                diag_flux += pface;
                const bool inside = ni >= 0 && ni < N && nj >= 0 && nj < N && nk >= 0 && nk < N;
                if (inside) {
                    const int v = node_index(ni, nj, nk);
                    if (!mask[v]) {
                        Eigen::Map<const CMat> fv(f.data() + v * block, ds, dj);
                        acc += (-coef_d * pface / (pw * h * h)) * fv;
                    }
                }
                (void)idx;
            }
        }
        acc += (coef_d * diag_flux / (pw * h * h)) * fu;

        // + coef_qbar * (sum_a d/dq^a)^2 via the (1,1,1)-diagonal stencil;
        // the weight is constant along the diagonal, keeping it symmetric.
        if (coef_qbar != 0.0) {
            acc += (-2.0 * coef_qbar / (h * h)) * fu;
            for (int dir = -1; dir <= 1; dir += 2) {
                const int ni = i + dir, nj = jn + dir, nk = k + dir;
                if (ni >= 0 && ni < N && nj >= 0 && nj < N && nk >= 0 && nk < N) {
                    const int v = node_index(ni, nj, nk);
                    if (!mask[v]) {
                        Eigen::Map<const CMat> fv(f.data() + v * block, ds, dj);
                        acc += (coef_qbar / (h * h)) * fv;
                    }
                }
            }
        }

        // Lattice sandwich terms; for axis a the complementary pair is (b, c).
        if (channel.s > 0.0 || channel.j > 0.0) {
            const double q[3] = {qa, qb, qc};
            for (int a = 0; a < 3; ++a) {
                const int b = (a + 1) % 3, c = (a + 2) % 3;
                const CMat& sa = axis_matrix(Ss, a);
                const CMat& ja = axis_matrix(Sj, a);
                const CMat minus_type = sa * sa * fu - 2.0 * sa * fu * ja + fu * (ja * ja);
                const CMat plus_type = sa * sa * fu + 2.0 * sa * fu * ja + fu * (ja * ja);
                if (measure == MeasureKind::Haar) {
                    const double sh = std::sinh(0.5 * (q[b] - q[c]));
                    const double ch = std::cosh(0.5 * (q[b] - q[c]));
                    acc += coef_lattice * (minus_type / (sh * sh) - plus_type / (ch * ch));
                } else {
                    const double dm = q[b] - q[c], dp = q[b] + q[c];
                    acc += coef_lattice * (minus_type / (dm * dm) + plus_type / (dp * dp));
                }
            }
        }

        if (const_shift != 0.0) acc += const_shift * fu;

        Eigen::Map<CMat>(out.data() + u * block, ds, dj) = acc;
    };

    if (parallel) {
        parallel_for(static_cast<std::size_t>(nodes()), body);
    } else {
        serial_for(static_cast<std::size_t>(nodes()), body);
    }
    return out;
}

std::complex<double> ReducedOperator3D::inner(const CVec& f1, const CVec& f2) const {
    if (f1.size() != amplitude_size() || f2.size() != amplitude_size()) {
        throw ShapeError("ReducedOperator3D::inner: size mismatch");
    }
    const double h = cell();
    const int block = ds * dj;
    std::complex<double> acc = 0.0;
    for (int u = 0; u < nodes(); ++u) {
        if (mask[u]) continue;
        Eigen::Map<const CMat> a(f1.data() + u * block, ds, dj);
        Eigen::Map<const CMat> b(f2.data() + u * block, ds, dj);
        acc += node_weight[u] * (a.adjoint() * b).trace();
    }
    return acc * h * h * h / double(block);
}

double ReducedOperator3D::hermiticity_residual(int trials, unsigned seed) const {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int block = ds * dj;
    auto random_amplitude = [&] {
        CVec f = CVec::Zero(amplitude_size());
        for (int u = 0; u < nodes(); ++u) {
            if (mask[u]) continue;
            for (int c = 0; c < block; ++c) {
                f(u * block + c) = std::complex<double>(nd(rng), nd(rng));
            }
        }
        return f;
    };
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const CVec f1 = random_amplitude();
        const CVec f2 = random_amplitude();
        const std::complex<double> a = inner(f1, apply(f2));
        const std::complex<double> b = inner(f2, apply(f1));
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        worst = std::max(worst, std::abs(a - std::conj(b)) / scale);
    }
    return worst;
}

CMat ReducedOperator3D::dense() const {
    const int m = amplitude_size();
    CMat out(m, m);
    CVec e = CVec::Zero(m);
    for (int c = 0; c < m; ++c) {
        e(c) = 1.0;
        out.col(c) = apply(e);
        e(c) = 0.0;
    }
    return out;
}

Mat scalar_channel_dense(const InertiaModel& model, const Grid3D& grid, double hbar) {
    // Independent assembly of the (0,0) channel in the sqrt-weight frame:
    // symmetric matrix over unmasked nodes only.
    if (model.n != 3) throw InvalidModel("scalar_channel_dense: body dimension must be 3");
    const int N = grid.N;
    const double h = (grid.hi - grid.lo) / N;
    auto coord = [&](int i) { return grid.lo + (i + 0.5) * h; };

    MeasureKind measure = MeasureKind::Haar;
    double coef_d, coef_qbar = 0.0;
    if (model.kind == ModelKind::DAlembert) {
        measure = MeasureKind::Lebesgue;
        coef_d = 0.5 * hbar * hbar / model.J(0, 0);
    } else {
        const double alpha =
            (model.kind == ModelKind::AffineAffine) ? model.A : model.I + model.A;
        coef_d = 0.5 * hbar * hbar / alpha;
        coef_qbar = hbar * hbar * model.B / (2.0 * alpha * (alpha + 3.0 * model.B));
    }

    std::vector<int> active;       // unmasked node -> dense row
    std::vector<int> row(N * N * N, -1);
    std::vector<double> wnode(N * N * N, 0.0);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            for (int k = 0; k < N; ++k) {
                const double a = coord(i), b = coord(j), c = coord(k);
                if (std::min({std::abs(a - b), std::abs(b - c), std::abs(a - c)}) < 0.5 * h) {
                    continue;
                }
                const int u = (i * N + j) * N + k;
                row[u] = static_cast<int>(active.size());
                active.push_back(u);
                wnode[u] = pair_weight(a, b, c, measure);
            }
        }
    }

    const int m = static_cast<int>(active.size());
    Mat H = Mat::Zero(m, m);
    for (int r = 0; r < m; ++r) {
        const int u = active[r];
        const int i = u / (N * N), j = (u / N) % N, k = u % N;
        const double qa = coord(i), qb = coord(j), qc = coord(k);
        double diag = 0.0;
        const int steps[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        for (int axis = 0; axis < 3; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                double fa = qa, fb = qb, fc = qc;
                const double shift = 0.5 * dir * h;
                if (axis == 0) fa += shift;
                if (axis == 1) fb += shift;
                if (axis == 2) fc += shift;
                const double pface = pair_weight(fa, fb, fc, measure);
                diag += coef_d * pface / (wnode[u] * h * h);
                const int ni = i + dir * steps[axis][0];
                const int nj = j + dir * steps[axis][1];
                const int nk = k + dir * steps[axis][2];
                if (ni < 0 || ni >= N || nj < 0 || nj >= N || nk < 0 || nk >= N) continue;
                const int v = (ni * N + nj) * N + nk;
                if (row[v] < 0) continue;
                H(r, row[v]) +=
                    -coef_d * pface / (h * h * std::sqrt(wnode[u] * wnode[v]));
            }
        }
        if (coef_qbar != 0.0) {
            diag += -2.0 * coef_qbar / (h * h);
            for (int dir = -1; dir <= 1; dir += 2) {
                const int ni = i + dir, nj = j + dir, nk = k + dir;
                if (ni < 0 || ni >= N || nj < 0 || nj >= N || nk < 0 || nk >= N) continue;
                const int v = (ni * N + nj) * N + nk;
                if (row[v] < 0) continue;
                // weight is constant along the diagonal shift
                H(r, row[v]) += coef_qbar / (h * h);
            }
        }
        H(r, r) += diag;
    }
    return H;
}

Vec lowest_eigenvalues_3d(const ReducedOperator3D& op, int k, int max_iter, unsigned seed) {
    // Lanczos in the sqrt-weight frame, full reorthogonalization.
    const int m = op.amplitude_size();
    const int block = op.ds * op.dj;
    Vec sqrtw(m);
    for (int u = 0; u < op.nodes(); ++u) {
        const double w = op.mask[u] ? 1.0 : std::sqrt(op.node_weight[u]);
        for (int c = 0; c < block; ++c) sqrtw(u * block + c) = w;
    }
    auto apply_sym = [&](const CVec& g) {
        CVec f = g.cwiseQuotient(sqrtw.cast<std::complex<double>>());
        for (int u = 0; u < op.nodes(); ++u) {
            if (op.mask[u]) {
                for (int c = 0; c < block; ++c) f(u * block + c) = 0.0;
            }
        }
        CVec hf = op.apply(f);
        return CVec(hf.cwiseProduct(sqrtw.cast<std::complex<double>>()));
    };

    std::mt19937 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec q = CVec::Zero(m);
    for (int u = 0; u < op.nodes(); ++u) {
        if (op.mask[u]) continue;
        for (int c = 0; c < block; ++c) q(u * block + c) = std::complex<double>(nd(rng), nd(rng));
    }
    q.normalize();

    std::vector<CVec> basis;
    std::vector<double> alpha, beta;
    CVec prev = CVec::Zero(m);
    double beta_prev = 0.0;
    const int iters = std::min(max_iter, m);
    for (int it = 0; it < iters; ++it) {
        basis.push_back(q);
        CVec w = apply_sym(q);
        const double a = std::real(q.dot(w));
        alpha.push_back(a);
        w -= a * q + beta_prev * prev;
        for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
        const double bnorm = w.norm();
        if (bnorm < 1e-12) break;
        beta.push_back(bnorm);
        prev = q;
        q = w / bnorm;
        beta_prev = bnorm;
    }
    Tridiag T;
    T.diag = Eigen::Map<Vec>(alpha.data(), alpha.size());
    T.off = (alpha.size() > 1)
                ? Vec(Eigen::Map<Vec>(beta.data(), static_cast<Eigen::Index>(alpha.size()) - 1))
                : Vec();
    return lowest_eigenvalues(T, std::min<int>(k, static_cast<int>(alpha.size())));
}

}  // namespace affine
