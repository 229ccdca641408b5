// Cyclic Jacobi diagonalization of the dense sector matrix. Shares nothing with the
// secular path beyond ArrowheadSector::dense_matrix().

#include "doubletscope/eigensolver.hpp"

#include "doubletscope/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace doubletscope {

namespace {

constexpr int max_sweeps = 100;

class SymmetricJacobi {
public:
    SymmetricJacobi(std::vector<double> a, std::size_t n) : a_(std::move(a)), v_(n * n, 0.0), n_(n)
    {
        for (std::size_t i = 0; i < n_; ++i)
            v_[i * n_ + i] = 1.0;
    }

    void run()
    {
        double frob = 0.0;
        for (double x : a_)
            frob += x * x;
        const double threshold = 1e-18 * std::sqrt(frob);

        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            bool rotated = false;
            for (std::size_t p = 0; p + 1 < n_; ++p)
                for (std::size_t q = p + 1; q < n_; ++q)
                    if (std::abs(at(p, q)) > threshold) {
                        rotate(p, q);
                        rotated = true;
                    }
            if (!rotated)
                return;
        }
        throw NumericalError("dense oracle: Jacobi sweeps did not converge");
    }

    double eigenvalue(std::size_t i) const { return a_[i * n_ + i]; }
    double vector_entry(std::size_t row, std::size_t col) const { return v_[row * n_ + col]; }

private:
    double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }

    void rotate(std::size_t p, std::size_t q)
    {
        const double apq = at(p, q);
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
            t = 0.5 / theta;
        else
            t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t r = 0; r < n_; ++r) {
            if (r == p || r == q)
                continue;
            const double g = at(r, p);
            const double h = at(r, q);
            const double rp = g - s * (h + g * tau);
            const double rq = h + s * (g - h * tau);
            at(r, p) = rp;
            at(p, r) = rp;
            at(r, q) = rq;
            at(q, r) = rq;
        }
        for (std::size_t r = 0; r < n_; ++r) {
            double& vp = v_[r * n_ + p];
            double& vq = v_[r * n_ + q];
            const double g = vp;
            const double h = vq;
            vp = g - s * (h + g * tau);
            vq = h + s * (g - h * tau);
        }
    }

    std::vector<double> a_;
    std::vector<double> v_;
    std::size_t n_;
};

} // namespace

std::vector<EigenPair> dense_oracle(const ArrowheadSector& sector)
{
    const std::size_t n = sector.dimension();
    if (n > dense_oracle_max_dimension)
        throw InvalidArgument("dense_oracle: dimension " + std::to_string(n) + " exceeds the limit of " +
                              std::to_string(dense_oracle_max_dimension));

    SymmetricJacobi jacobi(sector.dense_matrix(), n);
    jacobi.run();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return jacobi.eigenvalue(a) < jacobi.eigenvalue(b); });

    std::vector<EigenPair> pairs;
    pairs.reserve(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t col = order[rank];
        EigenPair pair;
        pair.energy = jacobi.eigenvalue(col);
        pair.sector = sector.label();
        pair.root_index = rank;
        pair.apex_amplitude = jacobi.vector_entry(0, col);
        pair.mode_amplitudes.resize(n - 1);
        for (std::size_t r = 1; r < n; ++r)
            pair.mode_amplitudes[r - 1] = jacobi.vector_entry(r, col);

        double pivot = pair.apex_amplitude;
        if (pivot == 0.0)
            for (double u : pair.mode_amplitudes)
                if (u != 0.0) {
                    pivot = u;
                    break;
                }
        if (pivot < 0.0) {
            pair.apex_amplitude = -pair.apex_amplitude;
            for (double& u : pair.mode_amplitudes)
                u = -u;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

} // namespace doubletscope
