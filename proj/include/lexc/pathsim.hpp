#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "lexc/levy_model.hpp"
#include "lexc/rng.hpp"

namespace lexc {

struct JumpMark {
  std::size_t index;  // into Path::times / Path::values
  double size;

  bool operator==(const JumpMark&) const = default;
};

// Jump-adapted cadlag trajectory. values[i] is the value just after times[i];
// at a marked index the left limit is values[i] - size.
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<JumpMark> jumps;  // sorted by index
  double origin = 0.0;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  void clear();

  bool operator==(const Path&) const = default;
};

// Left limits at every index (equal to values except at jump marks).
std::vector<double> left_limits(const Path& path);

// Path of -X with the same grid and negated jump marks.
Path negated(const Path& path);

struct SimOptions {
  double dt = 1e-3;
  // Jumps with |size| below the cutoff are replaced by their compensator plus
  // a Gaussian of matched variance. Negative means sqrt(dt) * jump scale.
  double jump_cutoff = -1.0;
};

// One strictly stable variate in form A with unit scale (Chambers-Mallows-Stuck).
double sample_stable(double alpha, double skew, RngStream& rng);

// Incremental simulator used by the path builders and by rejection samplers.
// Each step() advances to the next grid point or exact jump time, whichever
// comes first, and appends it to the given path.
class PathStepper {
 public:
  PathStepper(const ProcessSpec& spec, const SimOptions& options, double x0, RngStream& rng,
              double horizon = std::numeric_limits<double>::infinity());

  // Starts `path` with the initial point (0, x0).
  void begin(Path& path) const;
  // Returns false (and does nothing) once the horizon has been reached.
  bool step(Path& path);
  // As step() without recording; inspect time(), value(), last_jump().
  bool advance();

  bool last_was_jump() const noexcept { return last_jump_ != 0.0; }
  double last_jump() const noexcept { return last_jump_; }

  double time() const noexcept { return t_; }
  double value() const noexcept { return x_; }
  double last_left_limit() const noexcept { return left_; }
  double effective_cutoff() const noexcept { return cutoff_; }
  double continuous_drift() const noexcept { return drift_; }
  double continuous_variance() const noexcept { return variance_; }

 private:
  double sample_jump();

  const ProcessSpec* spec_;
  RngStream* rng_;
  double dt_;
  double horizon_;
  double t_ = 0.0;
  double x_;
  double left_;
  long long k_ = 0;
  bool stable_ = false;
  double alpha_ = 2.0, skew_ = 0.0, stable_scale_ = 1.0;
  double drift_ = 0.0, variance_ = 0.0, sd_ = 0.0;
  double cutoff_ = 0.0;
  double big_rate_ = 0.0;
  double next_jump_ = std::numeric_limits<double>::infinity();
  double step_scale_ = 0.0;  // (c dt)^(1/alpha) for full stable steps
  double last_jump_ = 0.0;
};

Path simulate_path(const LevyModel& model, double horizon, double dt, double x0, RngStream& rng,
                   double jump_cutoff = -1.0);
Path simulate_stable_path(const StableParams& params, double horizon, double dt, double x0,
                          RngStream& rng);
Path simulate(const ProcessSpec& spec, double horizon, double dt, double x0, RngStream& rng);

// Smallest time at which the path (or its left limit) is strictly below `level`.
std::optional<double> first_passage_below(const Path& path, double level);

// CSV with header time,value,jump_flag,jump_size.
void write_path_csv(const Path& path, std::ostream& os);

}  // namespace lexc
