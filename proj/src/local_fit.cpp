#include "local_fit.hpp"

#include <Eigen/Dense>

namespace serrin::detail {

std::optional<QuadraticFit> fit_quadratic(const std::vector<FitSample>& samples, Vec2 origin, Vec2 e1,
                                          double scale, bool fix_constant) {
    const int unknowns = fix_constant ? 5 : 6;
    const int n = static_cast<int>(samples.size());
    if (n < unknowns + 1) return std::nullopt;

    const Vec2 e2 = perp(e1);
    Eigen::MatrixXd A(n, unknowns);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
        const Vec2 d = samples[r].x - origin;
        const double xi = dot(d, e1) / scale;
        const double eta = dot(d, e2) / scale;
        const double w = std::sqrt(samples[r].weight);
        int col = 0;
        if (!fix_constant) A(r, col++) = w;
        A(r, col++) = w * xi;
        A(r, col++) = w * eta;
        A(r, col++) = w * 0.5 * xi * xi;
        A(r, col++) = w * xi * eta;
        A(r, col++) = w * 0.5 * eta * eta;
        b(r) = w * samples[r].value;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < unknowns) return std::nullopt;
    const Eigen::VectorXd z = qr.solve(b);

    QuadraticFit fit;
    int col = 0;
    if (!fix_constant) fit.c = z(col++);
    fit.g1 = z(col++) / scale;
    fit.g2 = z(col++) / scale;
    fit.h11 = z(col++) / (scale * scale);
    fit.h12 = z(col++) / (scale * scale);
    fit.h22 = z(col++) / (scale * scale);
    return fit;
}

}  // namespace serrin::detail
