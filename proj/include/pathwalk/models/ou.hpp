#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "pathwalk/model.hpp"

namespace pathwalk {

// dX = -X dt + sqrt(epsilon) dW, X_0 = 0.
class OrnsteinUhlenbeckModel final : public Model {
  public:
    explicit OrnsteinUhlenbeckModel(double epsilon) : sigma_(std::sqrt(epsilon)) {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("ou model: epsilon must be positive");
    }

    int state_dim() const override { return 1; }
    int noise_dim() const override { return 1; }
    Eigen::VectorXd initial_state() const override { return Eigen::VectorXd::Zero(1); }

    void drift(const Eigen::VectorXd& x, Eigen::VectorXd& out) const override { out = -x; }
    void drift_jacT_apply(const Eigen::VectorXd&, const Eigen::VectorXd& mu,
                          Eigen::VectorXd& out) const override {
        out = -mu;
    }
    void diffusion_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                         Eigen::VectorXd& out) const override {
        out = sigma_ * w;
    }
    void diffusion_T_apply(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                           Eigen::VectorXd& out) const override {
        out = sigma_ * u;
    }
    bool affine_flow() const override { return true; }

  private:
    double sigma_;
};

inline std::unique_ptr<Model> ou_model(double epsilon) {
    return std::make_unique<OrnsteinUhlenbeckModel>(epsilon);
}

}  // namespace pathwalk
