#pragma once

#include <memory>
#include <stdexcept>

#include "pathwalk/model.hpp"

namespace pathwalk {

// Pure noise: b = 0, sigma = identity, x_0 = 0 (n = m).
class BrownianModel final : public Model {
  public:
    explicit BrownianModel(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("brownian model: dimension must be positive");
    }

    int state_dim() const override { return n_; }
    int noise_dim() const override { return n_; }
    Eigen::VectorXd initial_state() const override { return Eigen::VectorXd::Zero(n_); }

    void drift(const Eigen::VectorXd&, Eigen::VectorXd& out) const override { out.setZero(); }
    void drift_jacT_apply(const Eigen::VectorXd&, const Eigen::VectorXd&,
                          Eigen::VectorXd& out) const override {
        out.setZero();
    }
    void diffusion_apply(const Eigen::VectorXd&, const Eigen::VectorXd& w,
                         Eigen::VectorXd& out) const override {
        out = w;
    }
    void diffusion_T_apply(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                           Eigen::VectorXd& out) const override {
        out = u;
    }
    bool affine_flow() const override { return true; }

  private:
    int n_;
};

inline std::unique_ptr<Model> brownian_model(int n) { return std::make_unique<BrownianModel>(n); }

}  // namespace pathwalk
