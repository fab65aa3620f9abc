#include "pathwalk/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pathwalk {

namespace {

class EndpointObservable final : public Observable {
  public:
    EndpointObservable(std::function<double(const Eigen::VectorXd&)> reducer,
                       std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient,
                       int component, bool linear)
        : reducer_(std::move(reducer)),
          gradient_(std::move(gradient)),
          component_(component),
          linear_(linear) {}

    double value(const StatePath& path) const override {
        check_dim(path.state_dim());
        return reducer_(path.final_state());
    }

    Eigen::MatrixXd state_gradient(const StatePath& path) const override {
        check_dim(path.state_dim());
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(path.states.rows(), path.states.cols());
        g.row(g.rows() - 1) = gradient_(path.final_state()).transpose();
        return g;
    }

    bool linear() const override { return linear_; }

    void validate_state_dim(int n) const override { check_dim(n); }

    Eigen::VectorXd trace(const StatePath& path) const override {
        Eigen::VectorXd tr(path.states.rows());
        for (int i = 0; i < path.states.rows(); ++i) tr[i] = reducer_(path.state_at(i));
        return tr;
    }

  private:
    void check_dim(int n) const {
        if (component_ >= 0 && component_ >= n)
            throw std::invalid_argument("endpoint observable: component index out of range");
    }

    std::function<double(const Eigen::VectorXd&)> reducer_;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient_;
    int component_;  // -1 for a general reducer
    bool linear_;
};

class PowerMeanObservable final : public Observable {
  public:
    explicit PowerMeanObservable(double alpha) : alpha_(alpha) {
        if (alpha < 1.0)
            throw std::domain_error(
                "power_mean observable: alpha < 1 is unsupported (integrand not differentiable)");
    }

    double value(const StatePath& path) const override {
        check_dim(path.state_dim());
        const double w = path.grid.dt / path.grid.horizon;
        double acc = 0.0;
        for (int i = 1; i < path.states.rows(); ++i) {
            const double x = path.states(i, 0);
            acc += signed_power(x);
        }
        return w * acc;
    }

    Eigen::MatrixXd state_gradient(const StatePath& path) const override {
        check_dim(path.state_dim());
        const double w = path.grid.dt / path.grid.horizon;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(path.states.rows(), 1);
        for (int i = 1; i < path.states.rows(); ++i) {
            const double x = path.states(i, 0);
            // d/dx sign(x)|x|^a = a |x|^{a-1}; continuous extension 0 at
            // the origin for a > 1, slope 1 for a = 1.
            if (alpha_ == 1.0)
                g(i, 0) = w;
            else
                g(i, 0) = x == 0.0 ? 0.0 : w * alpha_ * std::pow(std::abs(x), alpha_ - 1.0);
        }
        return g;
    }

    bool linear() const override { return alpha_ == 1.0; }

    void validate_state_dim(int n) const override { check_dim(n); }

    Eigen::VectorXd trace(const StatePath& path) const override {
        Eigen::VectorXd tr(path.states.rows());
        for (int i = 0; i < path.states.rows(); ++i) tr[i] = signed_power(path.states(i, 0));
        return tr;
    }

  private:
    static void check_dim(int n) {
        if (n != 1)
            throw std::invalid_argument("power_mean observable: state dimension must be 1");
    }

    double signed_power(double x) const {
        if (alpha_ == 1.0) return x;
        return x == 0.0 ? 0.0 : (x > 0 ? 1.0 : -1.0) * std::pow(std::abs(x), alpha_);
    }

    double alpha_;
};

class LevyAreaObservable final : public Observable {
  public:
    double value(const StatePath& path) const override {
        check_dim(path.state_dim());
        double area = 0.0;
        for (int i = 0; i + 1 < path.states.rows(); ++i) {
            const double x1 = path.states(i, 0), x2 = path.states(i, 1);
            area += x1 * (path.states(i + 1, 1) - x2) - x2 * (path.states(i + 1, 0) - x1);
        }
        return 0.5 * area;
    }

    Eigen::MatrixXd state_gradient(const StatePath& path) const override {
        check_dim(path.state_dim());
        const int rows = static_cast<int>(path.states.rows());
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(rows, 2);
        // Each x_k enters summand k (left point) and summand k-1 (increment
        // endpoint); interior rows collapse to the shoelace stencil
        // dA/dx1_k = (x2_{k+1} - x2_{k-1}) / 2.
        for (int k = 1; k < rows; ++k) {
            double g1 = 0.0, g2 = 0.0;
            if (k + 1 < rows) {
                g1 += 0.5 * path.states(k + 1, 1);
                g2 -= 0.5 * path.states(k + 1, 0);
            }
            g1 -= 0.5 * path.states(k - 1, 1);
            g2 += 0.5 * path.states(k - 1, 0);
            g(k, 0) = g1;
            g(k, 1) = g2;
        }
        return g;
    }

    void validate_state_dim(int n) const override { check_dim(n); }

    Eigen::VectorXd trace(const StatePath& path) const override {
        // running partial area
        Eigen::VectorXd tr = Eigen::VectorXd::Zero(path.states.rows());
        double area = 0.0;
        for (int i = 0; i + 1 < path.states.rows(); ++i) {
            const double x1 = path.states(i, 0), x2 = path.states(i, 1);
            area += 0.5 * (x1 * (path.states(i + 1, 1) - x2) - x2 * (path.states(i + 1, 0) - x1));
            tr[i + 1] = area;
        }
        return tr;
    }

  private:
    static void check_dim(int n) {
        if (n != 2)
            throw std::invalid_argument("levy_area observable: state dimension must be 2");
    }
};

class RangeObservable final : public Observable {
  public:
    double value(const StatePath& path) const override {
        check_dim(path.state_dim());
        return path.states.col(0).maxCoeff() - path.states.col(0).minCoeff();
    }

    Eigen::MatrixXd state_gradient(const StatePath& path) const override {
        check_dim(path.state_dim());
        int imax = 0, imin = 0;
        path.states.col(0).maxCoeff(&imax);
        path.states.col(0).minCoeff(&imin);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(path.states.rows(), 1);
        g(imax, 0) += 1.0;
        g(imin, 0) -= 1.0;
        return g;
    }

    void validate_state_dim(int n) const override { check_dim(n); }

    Eigen::VectorXd trace(const StatePath& path) const override {
        Eigen::VectorXd tr(path.states.rows());
        double lo = path.states(0, 0), hi = lo;
        for (int i = 0; i < path.states.rows(); ++i) {
            lo = std::min(lo, path.states(i, 0));
            hi = std::max(hi, path.states(i, 0));
            tr[i] = hi - lo;
        }
        return tr;
    }

  private:
    static void check_dim(int n) {
        if (n != 1) throw std::invalid_argument("range observable: state dimension must be 1");
    }
};

class IntegratedMassObservable final : public Observable {
  public:
    explicit IntegratedMassObservable(const SpatialGrid& grid) : grid_(grid) {}

    double value(const StatePath& path) const override {
        check_dim(path.state_dim());
        return grid_.dx * path.states.row(path.states.rows() - 1).head(grid_.points).sum();
    }

    Eigen::MatrixXd state_gradient(const StatePath& path) const override {
        check_dim(path.state_dim());
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(path.states.rows(), path.states.cols());
        g.row(g.rows() - 1).head(grid_.points).setConstant(grid_.dx);
        return g;
    }

    bool linear() const override { return true; }

    void validate_state_dim(int n) const override { check_dim(n); }

    // Q(t) over the trajectory: the relaminarization diagnostic.
    Eigen::VectorXd trace(const StatePath& path) const override {
        Eigen::VectorXd tr(path.states.rows());
        for (int i = 0; i < path.states.rows(); ++i)
            tr[i] = grid_.dx * path.states.row(i).head(grid_.points).sum();
        return tr;
    }

  private:
    void check_dim(int n) const {
        if (n != 2 * grid_.points)
            throw std::invalid_argument(
                "turbulent_mass observable: state layout does not match the spatial grid");
    }

    SpatialGrid grid_;
};

}  // namespace

std::unique_ptr<Observable> endpoint_observable(int component) {
    if (component < 0)
        throw std::invalid_argument("endpoint observable: component must be nonnegative");
    auto reducer = [component](const Eigen::VectorXd& x) { return x[component]; };
    auto gradient = [component](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        g[component] = 1.0;
        return g;
    };
    return std::make_unique<EndpointObservable>(reducer, gradient, component, /*linear=*/true);
}

std::unique_ptr<Observable> endpoint_observable(
    std::function<double(const Eigen::VectorXd&)> reducer,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> reducer_gradient, bool linear) {
    if (!reducer || !reducer_gradient)
        throw std::invalid_argument("endpoint observable: reducer and gradient are required");
    return std::make_unique<EndpointObservable>(std::move(reducer), std::move(reducer_gradient),
                                                -1, linear);
}

std::unique_ptr<Observable> power_mean_observable(double alpha) {
    return std::make_unique<PowerMeanObservable>(alpha);
}

std::unique_ptr<Observable> levy_area_observable() {
    return std::make_unique<LevyAreaObservable>();
}

std::unique_ptr<Observable> range_observable() { return std::make_unique<RangeObservable>(); }

std::unique_ptr<Observable> integrated_mass_observable(const SpatialGrid& grid) {
    return std::make_unique<IntegratedMassObservable>(grid);
}

}  // namespace pathwalk
