#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace hhoea {

using Point2 = Eigen::Vector2d;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Eigen::Vector2d(const Point2&)>;
using TensorField = std::function<Eigen::Matrix2d(const Point2&)>;

template <class V>
V zero_value()
{
    if constexpr (std::is_arithmetic_v<V>)
        return V(0);
    else
        return V::Zero();
}

// Sum of terms a_i(t) g_i(x). Space parts can be projected once and recombined per time.
template <class V>
struct SeparableField {
    struct Term {
        std::function<double(double)> time;
        std::function<V(const Point2&)> space;
    };
    std::vector<Term> terms;

    bool empty() const { return terms.empty(); }
    void add(std::function<double(double)> a, std::function<V(const Point2&)> g)
    {
        terms.push_back({std::move(a), std::move(g)});
    }
    V operator()(const Point2& x, double t) const
    {
        V out = zero_value<V>();
        for (const auto& term : terms)
            out += term.time(t) * term.space(x);
        return out;
    }
    std::function<V(const Point2&)> at(double t) const
    {
        return [f = *this, t](const Point2& x) { return f(x, t); };
    }
};

using ScalarST = SeparableField<double>;
using VectorST = SeparableField<Eigen::Vector2d>;
using TensorST = SeparableField<Eigen::Matrix2d>;

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Worker count used by per-cell loops. Results never depend on it.
void set_num_threads(int n);
int num_threads();

// Runs fn(i) for i in [0, n). Each index is visited exactly once.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace hhoea
