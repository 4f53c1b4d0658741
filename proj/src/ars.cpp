#include "mnstm/ars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mnstm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Segment {
  double xl, xr;  // may be +-inf at the outer ends
  double a, b;    // hull(x) = a + b x
  double log_mass = -kInf;
};

struct Line {
  double a, b;
  double at(double x) const { return a + b * x; }
};

Line through(double x0, double h0, double x1, double h1) {
  const double b = (h1 - h0) / (x1 - x0);
  return Line{h0 - b * x0, b};
}

double segment_log_mass(const Segment& s) {
  // integral of exp(a + b x) over (xl, xr)
  if (s.xl == -kInf) {
    return s.b > 0.0 ? s.a + s.b * s.xr - std::log(s.b) : kInf;
  }
  if (s.xr == kInf) {
    return s.b < 0.0 ? s.a + s.b * s.xl - std::log(-s.b) : kInf;
  }
  const double width = s.xr - s.xl;
  if (width <= 0.0) return -kInf;
  const double bw = s.b * width;
  if (std::abs(bw) < 1e-10) {
    return s.a + s.b * 0.5 * (s.xl + s.xr) + std::log(width);
  }
  if (s.b > 0.0) {
    return s.a + s.b * s.xr + std::log1p(-std::exp(-bw)) - std::log(s.b);
  }
  return s.a + s.b * s.xl + std::log1p(-std::exp(bw)) - std::log(-s.b);
}

double sample_within(const Segment& s, double u) {
  if (s.xl == -kInf) {
    return s.xr + std::log(u) / s.b;
  }
  if (s.xr == kInf) {
    return s.xl + std::log1p(-u) / s.b;
  }
  const double width = s.xr - s.xl;
  const double bw = s.b * width;
  if (std::abs(bw) < 1e-10) {
    return s.xl + u * width;
  }
  // inverse cdf of exp(b x) restricted to the segment
  const double t = std::log1p(u * std::expm1(bw));
  return s.xl + t / s.b;
}

class Envelope {
 public:
  Envelope(std::vector<double> xs, std::vector<double> hs, double lower,
           double upper, const std::string& label, double concavity_tol)
      : lower_(lower), upper_(upper), label_(label), tol_(concavity_tol) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      insert_sorted(xs[i], hs[i]);
    }
  }

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& hs() const { return h_; }

  void insert(double x, double h) { insert_sorted(x, h); }

  void check_concavity() const {
    // secant slopes must be nonincreasing
    const double scale = 1.0 + std::abs(h_.front()) + std::abs(h_.back());
    for (std::size_t i = 0; i + 2 < x_.size(); ++i) {
      const double s0 = (h_[i + 1] - h_[i]) / (x_[i + 1] - x_[i]);
      const double s1 = (h_[i + 2] - h_[i + 1]) / (x_[i + 2] - x_[i + 1]);
      if (s1 - s0 > tol_ * scale) {
        throw std::runtime_error("adaptive rejection: density is not "
                                 "log-concave (kernel " + label_ + ")");
      }
    }
  }

  // Rebuild hull segments; returns false when an unbounded tail has the
  // wrong slope (caller must extend the point set outward).
  bool rebuild() {
    segments_.clear();
    const int m = static_cast<int>(x_.size());
    if (m < 3) return false;
    auto line = [&](int i, int j) { return through(x_[i], h_[i], x_[j], h_[j]); };

    if (lower_ == -kInf && line(0, 1).b <= 0.0) return false;
    if (upper_ == kInf && line(m - 2, m - 1).b >= 0.0) return false;

    if (x_[0] > lower_) {
      const Line l = line(0, 1);
      segments_.push_back({lower_, x_[0], l.a, l.b});
    }
    for (int i = 0; i + 1 < m; ++i) {
      const bool has_left = i >= 1;
      const bool has_right = i + 2 < m;
      if (has_left && has_right) {
        const Line ll = line(i - 1, i);
        const Line rr = line(i + 1, i + 2);
        if (std::abs(ll.b - rr.b) < 1e-14) {
          segments_.push_back({x_[i], x_[i + 1], ll.at(x_[i]) < rr.at(x_[i])
                                                     ? ll.a
                                                     : rr.a,
                               ll.b});
        } else {
          const double xc = (rr.a - ll.a) / (ll.b - rr.b);
          if (xc <= x_[i]) {
            segments_.push_back({x_[i], x_[i + 1], rr.a, rr.b});
          } else if (xc >= x_[i + 1]) {
            segments_.push_back({x_[i], x_[i + 1], ll.a, ll.b});
          } else {
            segments_.push_back({x_[i], xc, ll.a, ll.b});
            segments_.push_back({xc, x_[i + 1], rr.a, rr.b});
          }
        }
      } else if (has_right) {
        const Line rr = line(i + 1, i + 2);
        segments_.push_back({x_[i], x_[i + 1], rr.a, rr.b});
      } else {
        const Line ll = line(i - 1, i);
        segments_.push_back({x_[i], x_[i + 1], ll.a, ll.b});
      }
    }
    if (x_[m - 1] < upper_) {
      const Line l = line(m - 2, m - 1);
      segments_.push_back({x_[m - 1], upper_, l.a, l.b});
    }
    // normalize in log space
    total_log_mass_ = -kInf;
    for (auto& s : segments_) {
      s.log_mass = segment_log_mass(s);
      if (!std::isfinite(s.log_mass) && s.log_mass > 0.0) {
        return false;  // divergent tail
      }
      total_log_mass_ = std::max(total_log_mass_, s.log_mass);
    }
    double acc = 0.0;
    for (const auto& s : segments_) {
      acc += std::exp(s.log_mass - total_log_mass_);
    }
    total_log_mass_ += std::log(acc);
    return std::isfinite(total_log_mass_);
  }

  double draw(Rng& rng, double* hull_value) const {
    double u = rng.uniform();
    double acc = 0.0;
    const Segment* chosen = &segments_.back();
    for (const auto& s : segments_) {
      acc += std::exp(s.log_mass - total_log_mass_);
      if (u <= acc) {
        chosen = &s;
        break;
      }
    }
    const double x = sample_within(*chosen, rng.uniform());
    *hull_value = chosen->a + chosen->b * x;
    return x;
  }

  double squeeze(double x) const {
    const int m = static_cast<int>(x_.size());
    if (x < x_[0] || x > x_[m - 1]) return -kInf;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    i = std::min(std::max(i, 0), m - 2);
    return through(x_[i], h_[i], x_[i + 1], h_[i + 1]).at(x);
  }

  double spacing() const { return x_.back() - x_.front(); }
  double leftmost() const { return x_.front(); }
  double rightmost() const { return x_.back(); }

 private:
  void insert_sorted(double x, double h) {
    if (!std::isfinite(x) || !std::isfinite(h)) return;
    const auto it = std::lower_bound(x_.begin(), x_.end(), x);
    const auto pos = it - x_.begin();
    if (it != x_.end() && std::abs(*it - x) < 1e-13 * (1.0 + std::abs(x))) {
      return;  // duplicate
    }
    x_.insert(x_.begin() + pos, x);
    h_.insert(h_.begin() + pos, h);
  }

  std::vector<double> x_;
  std::vector<double> h_;
  std::vector<Segment> segments_;
  double total_log_mass_ = -kInf;
  double lower_, upper_;
  std::string label_;
  double tol_;
};

// Unimodal maximum by golden-section over a bracket found by expansion.
double find_mode(const std::function<double(double)>& f, double lower,
                 double upper) {
  double a, b;
  if (std::isfinite(lower) && std::isfinite(upper)) {
    const double margin = 1e-7 * (upper - lower);
    a = lower + margin;
    b = upper - margin;
  } else {
    double start;
    if (std::isfinite(lower)) {
      start = lower + 1.0;
    } else if (std::isfinite(upper)) {
      start = upper - 1.0;
    } else {
      start = 0.0;
    }
    // expand around the best of a coarse walk
    double best = start;
    double best_val = f(start);
    double step = 1.0;
    for (int dir : {+1, -1}) {
      double x = start;
      double s = step * dir;
      for (int it = 0; it < 200; ++it) {
        double nx = x + s;
        if (std::isfinite(lower)) nx = std::max(nx, lower + 1e-9 * std::abs(s));
        if (std::isfinite(upper)) nx = std::min(nx, upper - 1e-9 * std::abs(s));
        const double v = f(nx);
        if (v > best_val) {
          best_val = v;
          best = nx;
          x = nx;
          s *= 2.0;
        } else {
          break;
        }
      }
    }
    a = best - std::abs(step) * 4.0;
    b = best + std::abs(step) * 4.0;
    if (std::isfinite(lower)) a = std::max(a, lower + 1e-9);
    if (std::isfinite(upper)) b = std::min(b, upper - 1e-9);
  }
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double sample_log_concave(const std::function<double(double)>& log_density,
                          double lower, double upper, Rng& rng,
                          const std::string& label, const ArsOptions& options) {
  if (!(lower < upper)) {
    throw std::invalid_argument("sample_log_concave: empty support");
  }
  const double mode = find_mode(log_density, lower, upper);

  auto clip = [&](double x) {
    if (std::isfinite(lower)) {
      const double m = 1e-8 * (1.0 + std::abs(lower));
      x = std::max(x, lower + m);
    }
    if (std::isfinite(upper)) {
      const double m = 1e-8 * (1.0 + std::abs(upper));
      x = std::min(x, upper - m);
    }
    return x;
  };

  std::vector<double> xs;
  for (const double off : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    xs.push_back(clip(mode + off));
  }
  if (std::isfinite(lower) && std::isfinite(upper)) {
    const double span = upper - lower;
    for (const double f : {0.15, 0.5, 0.85}) {
      xs.push_back(clip(lower + f * span));
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> hs;
  std::vector<double> xs_ok;
  for (const double x : xs) {
    const double h = log_density(x);
    if (std::isfinite(h)) {
      xs_ok.push_back(x);
      hs.push_back(h);
    }
  }
  if (xs_ok.size() < 3) {
    throw std::runtime_error(
        "adaptive rejection: could not initialize envelope (kernel " + label +
        ", support (" + std::to_string(lower) + ", " + std::to_string(upper) +
        "), mode " + std::to_string(mode) + ")");
  }
  Envelope env(xs_ok, hs, lower, upper, label, options.concavity_tol);
  env.check_concavity();

  // ensure decaying tails before the first rebuild
  for (int guard = 0; guard < 200 && !env.rebuild(); ++guard) {
    const double step = std::max(env.spacing(), 1.0);
    if (lower == -kInf) {
      const double x = env.leftmost() - step;
      env.insert(x, log_density(x));
    }
    if (upper == kInf) {
      const double x = env.rightmost() + step;
      env.insert(x, log_density(x));
    }
    if (lower != -kInf && upper != kInf) {
      throw std::runtime_error(
          "adaptive rejection: envelope failed on bounded support (kernel " +
          label + ")");
    }
  }

  for (int it = 0; it < options.max_rejections; ++it) {
    double hull_value = 0.0;
    const double x = env.draw(rng, &hull_value);
    const double logw = std::log(rng.uniform());
    if (logw <= env.squeeze(x) - hull_value) {
      return x;
    }
    const double h = log_density(x);
    if (h > hull_value + 1e-6 * (1.0 + std::abs(hull_value))) {
      throw std::runtime_error(
          "adaptive rejection: density exceeds the envelope; not log-concave "
          "(kernel " + label + ")");
    }
    const bool accept = logw <= h - hull_value;
    env.insert(x, h);
    env.check_concavity();
    if (!env.rebuild()) {
      throw std::runtime_error(
          "adaptive rejection: envelope rebuild failed (kernel " + label + ")");
    }
    if (accept) {
      return x;
    }
  }
  throw std::runtime_error("adaptive rejection: rejection limit reached (kernel " +
                           label + ")");
}

}  // namespace mnstm
