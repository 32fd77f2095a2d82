#include "psdocalc/operator.hpp"

#include <cmath>

namespace psdocalc {

bool VectorFieldFamily::square() const {
    for (const auto& x : fields)
        if (x.rows() != x.cols())
            return false;
    return true;
}

Mat VectorFieldFamily::compose(const std::vector<int>& index) const {
    if (fields.empty())
        throw InvalidArgument("empty vector field family");
    const Eigen::Index n = fields.front().cols();
    Mat out = Mat::Identity(n, n);
    if (index.empty())
        return out;
    if (index.size() > 1 && !square())
        throw InvalidArgument("unsupported family index: composition needs square fields");
    for (auto it = index.rbegin(); it != index.rend(); ++it) {
        if (*it < 0 || std::size_t(*it) >= fields.size())
            throw InvalidArgument("unsupported family index " + std::to_string(*it));
        out = fields[std::size_t(*it)] * out;
    }
    return out;
}

Mat VectorFieldFamily::assemble(const Vec& mu) const {
    if (fields.empty())
        throw InvalidArgument("empty vector field family");
    const Eigen::Index n = fields.front().cols();
    if (mu.size() != n)
        throw InvalidArgument("measure length does not match field width");
    Mat s = Mat::Zero(n, n);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const Mat& x = fields[i];
        if (x.cols() != n || row_weights[i].size() != x.rows())
            throw InvalidArgument("vector field dimensions are inconsistent");
        s.noalias() += x.transpose() * row_weights[i].asDiagonal() * x;
    }
    return mu.cwiseInverse().asDiagonal() * s;
}

VectorFieldFamily edge_difference_fields(const MetricMeasureSpace& space) {
    const PointId n = space.size();
    VectorFieldFamily fam;
    const auto& spec = space.spec();
    if (spec.kind == SpaceKind::cycle && n >= 3) {
        Mat x = Mat::Zero(n, n);
        for (PointId i = 0; i < n; ++i) {
            x(i, (i + 1) % n) += 1;
            x(i, i) -= 1;
        }
        fam.fields.push_back(std::move(x));
        fam.row_weights.push_back(Vec::Ones(n));
        return fam;
    }
    if (spec.kind == SpaceKind::grid_torus) {
        const int w = spec.size, h = spec.size2 > 0 ? spec.size2 : spec.size;
        if (w >= 3 && h >= 3) {
            Mat x1 = Mat::Zero(n, n), x2 = Mat::Zero(n, n);
            for (int j = 0; j < h; ++j)
                for (int i = 0; i < w; ++i) {
                    const PointId id = i + PointId(j) * w;
                    x1(id, (i + 1) % w + PointId(j) * w) += 1;
                    x1(id, id) -= 1;
                    x2(id, i + PointId((j + 1) % h) * w) += 1;
                    x2(id, id) -= 1;
                }
            fam.fields.push_back(std::move(x1));
            fam.fields.push_back(std::move(x2));
            fam.row_weights.push_back(Vec::Ones(n));
            fam.row_weights.push_back(Vec::Ones(n));
            return fam;
        }
    }
    const auto& edges = space.edges();
    Mat x = Mat::Zero(Eigen::Index(edges.size()), n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        x(Eigen::Index(e), edges[e].second) = 1;
        x(Eigen::Index(e), edges[e].first) = -1;
    }
    fam.fields.push_back(std::move(x));
    fam.row_weights.push_back(Vec::Ones(Eigen::Index(edges.size())));
    return fam;
}

std::string to_string(OperatorKind k) {
    switch (k) {
    case OperatorKind::graph_laplacian: return "graph_laplacian";
    case OperatorKind::divergence_form: return "divergence_form";
    case OperatorKind::sub_laplacian: return "sub_laplacian";
    }
    return "?";
}

OperatorKind parse_operator_kind(const std::string& s) {
    if (s == "graph_laplacian") return OperatorKind::graph_laplacian;
    if (s == "divergence_form") return OperatorKind::divergence_form;
    if (s == "sub_laplacian") return OperatorKind::sub_laplacian;
    throw InvalidArgument("unknown operator kind '" + s + "'");
}

namespace {

SelfAdjointOperator from_weighted_edges(const MetricMeasureSpace& space, const std::vector<double>& a,
                                        OperatorKind kind) {
    const PointId n = space.size();
    Mat s = Mat::Zero(n, n);
    const auto& edges = space.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        s(u, u) += a[e];
        s(v, v) += a[e];
        s(u, v) -= a[e];
        s(v, u) -= a[e];
    }
    SelfAdjointOperator op;
    op.kind = kind;
    op.measure = space.measure();
    op.matrix = op.measure.cwiseInverse().asDiagonal() * s;
    return op;
}

}  // namespace

SelfAdjointOperator build_graph_laplacian(const MetricMeasureSpace& space) {
    return from_weighted_edges(space, std::vector<double>(space.edges().size(), 1.0), OperatorKind::graph_laplacian);
}

SelfAdjointOperator build_divergence_form(const MetricMeasureSpace& space, const std::vector<double>& edge_coeffs) {
    if (edge_coeffs.size() != space.edges().size())
        throw InvalidArgument("coefficient/edge mismatch: got " + std::to_string(edge_coeffs.size()) +
                              " coefficients for " + std::to_string(space.edges().size()) + " edges");
    for (double a : edge_coeffs)
        if (!(a > 0) || !std::isfinite(a))
            throw InvalidArgument("divergence-form coefficients must be positive on every edge");
    return from_weighted_edges(space, edge_coeffs, OperatorKind::divergence_form);
}

SelfAdjointOperator build_divergence_form(const MetricMeasureSpace& space, const Mat& coeffs) {
    const PointId n = space.size();
    if (coeffs.rows() != n || coeffs.cols() != n)
        throw InvalidArgument("coefficient/edge mismatch: coefficient matrix has wrong shape");
    const double scale = std::max(1.0, coeffs.cwiseAbs().maxCoeff());
    if ((coeffs - coeffs.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("divergence-form coefficients are not symmetric");
    std::vector<double> a;
    Mat seen = Mat::Zero(n, n);
    for (auto [u, v] : space.edges()) {
        a.push_back(coeffs(u, v));
        seen(u, v) = seen(v, u) = 1;
    }
    for (PointId x = 0; x < n; ++x)
        for (PointId y = 0; y < n; ++y)
            if (x != y && seen(x, y) == 0 && coeffs(x, y) != 0)
                throw InvalidArgument("coefficient/edge mismatch: nonzero coefficient off the edge set");
    return build_divergence_form(space, a);
}

SelfAdjointOperator build_sub_laplacian(const MetricMeasureSpace& space, VectorFieldFamily fields) {
    if (fields.fields.empty())
        throw InvalidArgument("sub-Laplacian needs at least one vector field");
    if (fields.row_weights.size() != fields.fields.size())
        throw InvalidArgument("vector field family is missing row weights");
    SelfAdjointOperator op;
    op.kind = OperatorKind::sub_laplacian;
    op.measure = space.measure();
    op.matrix = fields.assemble(op.measure);
    op.fields = std::move(fields);
    return op;
}

double mu_symmetry_defect(const SelfAdjointOperator& op) {
    const Mat s = op.measure.asDiagonal() * op.matrix;
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    return (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
}

double constants_defect(const SelfAdjointOperator& op) {
    return (op.matrix * Vec::Ones(op.size())).cwiseAbs().maxCoeff();
}

double SpectralData::lambda_min_positive() const {
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
        if (eigenvalues[k] > 1e-9)
            return eigenvalues[k];
    return lambda_max();
}

Vec SpectralData::coefficients(const Vec& f) const {
    if (f.size() != size())
        throw InvalidArgument("vector length does not match the space");
    return eigenvectors.transpose() * measure.cwiseProduct(f);
}

CVec SpectralData::coefficients(const CVec& f) const {
    if (f.size() != size())
        throw InvalidArgument("vector length does not match the space");
    return eigenvectors.transpose().cast<cdouble>() * (measure.cast<cdouble>().cwiseProduct(f));
}

Vec SpectralData::apply_values(const Vec& Fk, const Vec& f) const {
    return eigenvectors * Fk.cwiseProduct(coefficients(f));
}

CVec SpectralData::apply_values(const Vec& Fk, const CVec& f) const {
    return eigenvectors.cast<cdouble>() * (Fk.cast<cdouble>().cwiseProduct(coefficients(f)));
}

Mat SpectralData::apply_values_matrix(const Vec& Fk, const Mat& F) const {
    if (F.rows() != size())
        throw InvalidArgument("matrix row count does not match the space");
    return eigenvectors * (Fk.asDiagonal() * (eigenvectors.transpose() * (measure.asDiagonal() * F)));
}

Mat SpectralData::matrix_of(const Vec& Fk) const {
    return (eigenvectors * Fk.asDiagonal()) * (eigenvectors.transpose() * measure.asDiagonal());
}

Vec SpectralData::tabulate(const std::function<double(double)>& F) const {
    Vec out(size());
    for (Eigen::Index k = 0; k < size(); ++k) {
        out[k] = F(eigenvalues[k]);
        if (!std::isfinite(out[k]))
            throw NumericalError("function is not finite at eigenvalue " + std::to_string(eigenvalues[k]));
    }
    return out;
}

SpectralData eigendecompose(const SelfAdjointOperator& op, double symmetry_tol) {
    const PointId n = op.size();
    if (op.matrix.cols() != n || op.measure.size() != n)
        throw InvalidArgument("operator matrix and measure have inconsistent sizes");
    if (mu_symmetry_defect(op) > symmetry_tol)
        throw NumericalError("operator is not μ-symmetric within tolerance");
    const Vec sq = op.measure.cwiseSqrt();
    const Vec isq = sq.cwiseInverse();
    Mat a = sq.asDiagonal() * op.matrix * isq.asDiagonal();
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed");
    SpectralData sd;
    sd.measure = op.measure;
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = isq.asDiagonal() * es.eigenvectors();
    const double scale = std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < n; ++k) {
        double& lam = sd.eigenvalues[k];
        if (lam < -1e-10 * scale)
            throw NumericalError("operator is not nonnegative: eigenvalue " + std::to_string(lam));
        if (lam < 0)
            lam = 0;
        auto col = sd.eigenvectors.col(k);
        const double tol = 1e-10 * col.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(col[i]) > tol) {
                if (col[i] < 0)
                    col = -col;
                break;
            }
    }
    return sd;
}

Vec semigroup_apply(const SpectralData& sd, double t, const Vec& f) {
    if (t < 0)
        throw InvalidArgument("semigroup time must be nonnegative");
    if (t == 0)
        return f;
    return sd.apply_values(sd.tabulate([t](double lam) { return std::exp(-t * lam); }), f);
}

Mat semigroup_matrix(const SpectralData& sd, double t) {
    if (t < 0)
        throw InvalidArgument("semigroup time must be nonnegative");
    return sd.matrix_of(sd.tabulate([t](double lam) { return std::exp(-t * lam); }));
}

Mat family_operator(const SpectralData& sd, const VectorFieldFamily& fam, const std::vector<int>& index, double r) {
    if (!(r > 0))
        throw InvalidArgument("family scale must be positive");
    if (!fam.square())
        throw InvalidArgument("unsupported family index: fields are not square");
    return std::pow(r, double(index.size())) * fam.compose(index) * semigroup_matrix(sd, r * r);
}

}  // namespace psdocalc
