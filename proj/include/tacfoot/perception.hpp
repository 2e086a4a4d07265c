#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "tacfoot/sensor.hpp"

namespace tacfoot {

// Flattened (x1, y1, ..., xN, yN) pin coordinates, mm.
using FeatureVector = std::vector<double>;

// Raw camera-frame pin coordinates, exactly as observed.
FeatureVector feature_from_frame(const TapFrame& frame);

// Root-mean-square Euclidean distance over corresponding pins. Symmetric,
// zero iff identical; throws LengthMismatch on unequal lengths.
double dissimilarity(const FeatureVector& a, const FeatureVector& b);

struct ReferenceTap {
  FeatureVector feature;
  int arc_id = -1;
  int tap_index = -1;
};

struct LabeledTap {
  FeatureVector feature;
  double label_deg = 0.0;  // displacement to the edge; 0 = on the edge
};

// Result of aligning an arc's dissimilarity profile to the reference tap.
struct AlignResult {
  std::vector<LabeledTap> taps;
  std::vector<double> dissimilarities;
  int argmin_index = 0;
  double delta = 0.0;             // sub-spacing offset in [-0.5, 0.5] spacings
  double edge_angle_deg = 0.0;    // hip angle of the label-0 point
  bool boundary = false;          // minimum at an arc endpoint
};

// Labels every tap by the hip-angle offset from the dissimilarity minimum,
// refined by 3-point parabolic interpolation when the minimum is interior.
// Ties break toward smaller |hip_angle|, then smaller index. A non-empty
// candidate mask restricts where the minimum may sit (used to keep wide
// sweeps off saturated patterns); labels still cover every tap.
AlignResult align_arc(const std::vector<double>& hip_angles_deg,
                      const std::vector<FeatureVector>& features, const ReferenceTap& ref,
                      const std::vector<bool>& candidates = {});

struct ReferenceSelection {
  ReferenceTap reference;
  int index = 0;
  double mean_deflection_mm = 0.0;
};

// Picks the tap whose mean pin deflection sits at the transition midpoint
// (the foot half on the edge). override_index skips the profile search.
// Throws NoTransition when the deflection range stays under range_floor_mm.
ReferenceSelection select_reference(const std::vector<double>& hip_angles_deg,
                                    const std::vector<TapFrame>& frames, const PinLayout& layout,
                                    std::optional<int> override_index = std::nullopt,
                                    double range_floor_mm = 0.3);

struct GPConfig {
  double lengthscale = 0.0;        // 0 = 3/8 median distinct pairwise distance
  double signal_var = 0.0;         // 0 = label variance, floored at 25 deg^2
  double noise_var_floor = 0.25;   // deg^2
};

struct Prediction {
  double mean_deg = 0.0;
  double std_deg = 0.0;
};

// Squared-exponential GP regression from pin-coordinate features to edge
// displacement, zero prior mean. Immutable value semantics: fitted()/
// updated() return new models.
class GPModel {
 public:
  GPModel() = default;
  explicit GPModel(GPConfig config) : config_(config) {}

  // Builds hyperparameters and the Cholesky factor of K + sigma_n^2 I.
  // Jitter escalates to at most 1e-6 * sigma_f^2 before SingularKernel.
  GPModel fitted() const;
  GPModel updated(const std::vector<LabeledTap>& new_taps) const;

  Prediction predict(const FeatureVector& query) const;

  bool is_fitted() const { return fitted_; }
  int size() const { return static_cast<int>(train_.size()); }
  const std::vector<LabeledTap>& training_set() const { return train_; }
  const GPConfig& config() const { return config_; }

  double lengthscale() const { return lengthscale_; }
  double signal_var() const { return signal_var_; }
  double noise_var() const { return noise_var_; }
  double jitter_used() const { return jitter_used_; }

 private:
  void fit_in_place();

  GPConfig config_{};
  std::vector<LabeledTap> train_;
  double lengthscale_ = 1.0;
  double signal_var_ = 1.0;
  double noise_var_ = 0.25;
  double jitter_used_ = 0.0;
  bool fitted_ = false;
  Eigen::MatrixXd chol_lower_;
  Eigen::VectorXd alpha_;
};

// Model checkpoint: hyperparameters, training data, reference tap. JSON.
void save_checkpoint(const GPModel& model, const ReferenceTap& ref, const std::string& path);
struct Checkpoint {
  GPModel model;
  ReferenceTap reference;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tacfoot
