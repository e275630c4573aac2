#include "screlax/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "screlax/format.hpp"

namespace screlax {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kAPG:
      return "aPG";
    case Variant::kAPGs:
      return "aPGs";
    case Variant::kAPGr:
      return "aPGr";
    case Variant::kSR:
      return "SR";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "apg") return Variant::kAPG;
  if (lower == "apgs") return Variant::kAPGs;
  if (lower == "apgr") return Variant::kAPGr;
  if (lower == "sr" || lower == "s&r") return Variant::kSR;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected apg, apgs, apgr or sr)");
}

TestSelection tests_for(Variant v) {
  switch (v) {
    case Variant::kAPG:
      return {false, false};
    case Variant::kAPGs:
      return {true, false};
    case Variant::kAPGr:
      return {false, true};
    case Variant::kSR:
      return {true, true};
  }
  return {false, false};
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kGapTolerance:
      return "gap_tolerance";
    case StopReason::kFinalized:
      return "finalized";
    case StopReason::kBudget:
      return "budget";
    case StopReason::kMaxIterations:
      return "max_iterations";
  }
  return "?";
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "iter,flops,gap,card_I,card_J,radius\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << r.flops << ',' << format_real(r.gap) << ',' << r.card_I << ','
        << r.card_J << ',' << format_real(r.radius) << '\n';
  }
}

Vector smooth_gradient(const ReducedProblem& rp, double epsilon, const Vector& v) {
  return rp.A_r.transpose() * (rp.A_r * v - rp.y_r) + epsilon * rp.apply_M(v);
}

SolverState make_state(const ReducedProblem& rp, double epsilon, Vector x, double lipschitz) {
  SolverState st;
  st.grad = smooth_gradient(rp, epsilon, x);
  st.grad_prev = st.grad;
  st.x_prev = x;
  st.x = std::move(x);
  st.momentum = 1;
  st.lipschitz = lipschitz;
  return st;
}

namespace {

// Extrapolated proximal step; leaves `grad` describing the previous iterate.
void prox_step(SolverState& st, const Vector& lambda_r, FlopCounter* flops) {
  const double k = static_cast<double>(st.momentum);
  const double w = (k - 1.0) / (k + 2.0);
  const Vector v = st.x + w * (st.x - st.x_prev);
  const Vector grad_v = st.grad + w * (st.grad - st.grad_prev);
  Vector next = (v - (grad_v + lambda_r) / st.lipschitz).cwiseMax(0.0);
  st.x_prev = std::move(st.x);
  st.x = std::move(next);
  st.grad_prev = st.grad;
  ++st.momentum;
  if (flops) {
    const auto nr = static_cast<std::int64_t>(lambda_r.size());
    flops->vec(nr);  // x - x_prev
    flops->vec(nr);  // v
    flops->vec(nr);  // grad - grad_prev
    flops->vec(nr);  // grad_v
    flops->vec(nr);  // grad_v + lambda_r
    flops->vec(nr);  // v - (.)/L
    flops->elementwise(nr);  // [.]_+
  }
}

}  // namespace

void descent_step(SolverState& st, const ReducedProblem& rp, double epsilon) {
  prox_step(st, rp.lambda_r, nullptr);
  st.grad = smooth_gradient(rp, epsilon, st.x);
}

double estimate_lipschitz(const ReducedProblem& rp, double epsilon, int iters, Vector* start,
                          FlopCounter* flops) {
  if (iters < 1) throw std::invalid_argument("estimate_lipschitz needs at least one iteration");
  const Index nr = rp.dim();
  if (nr == 0) return epsilon;
  Vector v;
  if (start && start->size() == nr && start->norm() > 0.0) {
    v = start->normalized();
  } else {
    v = Vector::Ones(nr).normalized();
  }
  double rayleigh = epsilon;
  for (int it = 0; it < iters; ++it) {
    Vector w = rp.A_r.transpose() * (rp.A_r * v) + epsilon * rp.apply_M(v);
    rayleigh = v.dot(w);
    const double norm = w.norm();
    if (!(norm > 0.0)) break;
    v = w / norm;
    if (flops) {
      flops->charge(FlopKind::kPowerStep, rp.A_r.rows(), nr);
      flops->matvec(rp.B.rows(), nr);
      flops->matvec(rp.B.rows(), nr);
      flops->vec(nr);  // M v scaled and added
      flops->vec(nr);  // Rayleigh quotient
      flops->vec(nr);  // normalization
    }
  }
  if (start) *start = v;
  return 1.01 * std::max(rayleigh, epsilon);
}

namespace {

struct Certificate {
  Vector x;          // full-length feasible point
  Sphere sphere;
  double gap = 0.0;
  double magnitude = 0.0;  // size of the terms summed into `gap`, for the rounding allowance
  Vector corr_free;  // a_l^T c on the free atoms, reduced order
  std::vector<Index> excluded;  // screened atoms left out of `gap`
};

// Gap growth over its value at a step-size refresh that is treated as divergence.
constexpr double kDivergenceFactor = 10.0;

// Runs the screen & relax loop for one problem.
class Run {
 public:
  Run(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer)
      : p_(p), cfg_(cfg), observer_(observer), tests_(tests_for(cfg.variant)) {}

  SolveResult execute();

 private:
  Certificate certify_reduced(const Vector& x_r, Vector* grad);
  Certificate certify_final(const Vector& x);
  double dual_and_gap(const Vector& c, const Vector& x_free, const Vector& x_rel, const Vector& corr_free,
                      const Vector& corr_rel, double* magnitude);
  void complete_gap(Certificate& cert);
  void apply_outcome(const TestOutcome& out, double gap);
  void record(std::int64_t iteration, const Certificate& cert);

  const Problem& p_;
  const SolverConfig& cfg_;
  const IterationObserver& observer_;
  const TestSelection tests_;

  Reduction red_;
  SolverState st_;
  FlopCounter flops_;
  Matrix A_free_;
  Matrix A_rel_;
  Vector lambda_free_;
  Vector lambda_rel_;
  Vector eigvec_;
  Index estimated_dim_ = 0;  // reduced dimension at the last step-size estimate
  double safe_lipschitz_ = 0.0;  // initial, well-converged estimate
  double refresh_gap_ = 0.0;     // certified gap when the step size was last lowered
  double y_sq_ = 0.0;
  Trace trace_;
};

double Run::dual_and_gap(const Vector& c, const Vector& x_free, const Vector& x_rel,
                         const Vector& corr_free, const Vector& corr_rel, double* magnitude) {
  const auto m = static_cast<std::int64_t>(p_.rows());
  const auto nr = static_cast<std::int64_t>(x_free.size());
  const auto nj = static_cast<std::int64_t>(x_rel.size());

  // Gap of the problem restricted to x_I = 0. Screening is safe, so this
  // problem has the same minimizer and its dual the same maximizer u*; the
  // sphere built from this gap therefore contains u* as well.
  const double hinge_sq = (corr_free - lambda_free_).cwiseMax(0.0).squaredNorm() +
                          (corr_rel - lambda_rel_).cwiseMax(0.0).squaredNorm();
  flops_.elementwise(nr + nj);
  flops_.vec(nr + nj);

  const double fit = 0.5 * c.squaredNorm();
  const double penalty = lambda_free_.dot(x_free) + lambda_rel_.dot(x_rel) +
                         0.5 * p_.epsilon() * (x_free.squaredNorm() + x_rel.squaredNorm());
  const double shift = 0.5 * (p_.y() - c).squaredNorm();
  const double hinge = hinge_sq / (2.0 * p_.epsilon());
  const double primal = fit + penalty;
  const double dual = 0.5 * y_sq_ - shift - hinge;
  *magnitude = fit + std::abs(penalty) + 0.5 * y_sq_ + shift + hinge;
  flops_.vec(m);
  flops_.vec(nr + nj);
  flops_.vec(nr + nj);
  flops_.vec(m);
  flops_.vec(m);
  return primal - dual;
}

void Run::complete_gap(Certificate& cert) {
  // Full-problem gap: the screened atoms' hinge terms enter the dual only.
  const std::vector<Index> screened = std::move(cert.excluded);
  cert.excluded.clear();
  if (screened.empty()) return;
  const auto m = static_cast<std::int64_t>(p_.rows());
  double hinge_sq = 0.0;
  for (const Index l : screened) {
    const double excess = std::max(0.0, p_.A().col(l).dot(cert.sphere.center) - p_.lambda()(l));
    hinge_sq += excess * excess;
    flops_.vec(m);
  }
  flops_.elementwise(static_cast<std::int64_t>(screened.size()));
  cert.gap += hinge_sq / (2.0 * p_.epsilon());
  cert.magnitude += hinge_sq / (2.0 * p_.epsilon());
  cert.sphere.radius = gap_radius(cert.gap, cert.magnitude);
}

Certificate Run::certify_reduced(const Vector& x_r, Vector* grad) {
  const ReducedProblem& rp = red_.reduced;
  const Partition& part = red_.partition;
  const auto m = static_cast<std::int64_t>(p_.rows());
  const auto nr = static_cast<std::int64_t>(rp.dim());
  const auto nj = static_cast<std::int64_t>(rp.B.rows());

  // Iterates are sparse: only nonzero columns enter A_r x and B x.
  Vector residual = rp.y_r;
  Vector x_B = Vector::Zero(nj);
  std::int64_t nnz = 0;
  for (Index k = 0; k < nr; ++k) {
    if (x_r(k) == 0.0) continue;
    residual.noalias() -= x_r(k) * rp.A_r.col(k);
    if (nj > 0) x_B.noalias() += x_r(k) * rp.B.col(k);
    ++nnz;
  }
  flops_.elementwise(nr);
  flops_.matvec(m, nnz);
  flops_.vec(m);

  Vector x_rel = rp.b;
  if (nj > 0) {
    x_rel += x_B;
    flops_.matvec(nj, nnz);
    flops_.vec(nj);
  }
  // Clamped lift keeps the certified point feasible; c follows the clamp.
  Vector c = residual;
  bool clamped = false;
  for (Index i = 0; i < nj; ++i) {
    if (x_rel(i) < 0.0) {
      c += x_rel(i) * A_rel_.col(i);
      x_rel(i) = 0.0;
      clamped = true;
      flops_.vec(m);
    }
  }
  flops_.elementwise(nj);

  Certificate cert;
  cert.corr_free = A_free_.transpose() * c;
  const Vector corr_rel = A_rel_.transpose() * c;
  flops_.matvec(m, nr);
  flops_.matvec(m, nj);

  cert.gap = dual_and_gap(c, x_r, x_rel, cert.corr_free, corr_rel, &cert.magnitude);
  cert.excluded = part.screened;
  cert.sphere.radius = gap_radius(cert.gap, cert.magnitude);
  flops_.elementwise(1);

  if (grad) {
    // grad f(x) = -A_free^T res + eps x + B^T (eps B x - A_rel^T res), res = y_r - A_r x.
    Vector g;
    Vector rel_part;
    if (!clamped) {
      g = -cert.corr_free + p_.epsilon() * x_r;
      rel_part = p_.epsilon() * x_B - corr_rel;
    } else {
      g = -(A_free_.transpose() * residual) + p_.epsilon() * x_r;
      rel_part = p_.epsilon() * x_B - A_rel_.transpose() * residual;
      flops_.matvec(m, nr);
      flops_.matvec(m, nj);
    }
    flops_.vec(nr);
    if (nj > 0) {
      g.noalias() += rp.B.transpose() * rel_part;
      flops_.vec(nj);
      flops_.matvec(nj, nr);
    }
    *grad = std::move(g);
  }

  cert.x = Vector::Zero(p_.cols());
  for (Index k = 0; k < x_r.size(); ++k) cert.x(part.free[static_cast<std::size_t>(k)]) = x_r(k);
  for (Index i = 0; i < nj; ++i) cert.x(part.relaxed[static_cast<std::size_t>(i)]) = x_rel(i);
  cert.sphere.center = std::move(c);
  return cert;
}

Certificate Run::certify_final(const Vector& x) {
  const auto m = static_cast<std::int64_t>(p_.rows());
  const auto nj = static_cast<std::int64_t>(A_rel_.cols());
  Vector x_rel(nj);
  for (Index i = 0; i < nj; ++i) x_rel(i) = x(red_.partition.relaxed[static_cast<std::size_t>(i)]);
  Vector c = p_.y() - A_rel_ * x_rel;
  flops_.matvec(m, nj);
  flops_.vec(m);
  const Vector corr_rel = A_rel_.transpose() * c;
  flops_.matvec(m, nj);

  Certificate cert;
  cert.corr_free.resize(0);
  cert.gap = dual_and_gap(c, Vector(), x_rel, cert.corr_free, corr_rel, &cert.magnitude);
  cert.excluded = red_.partition.screened;
  cert.sphere.radius = gap_radius(cert.gap, cert.magnitude);
  cert.sphere.center = std::move(c);
  cert.x = x;
  return cert;
}

void Run::apply_outcome(const TestOutcome& out, double gap) {
  Partition& part = red_.partition;
  // Reduced coordinates before the update, keyed by original index.
  std::vector<Index> old_position(static_cast<std::size_t>(p_.cols()), -1);
  for (std::size_t k = 0; k < part.free.size(); ++k) old_position[static_cast<std::size_t>(part.free[k])] = static_cast<Index>(k);

  const bool restart = cfg_.momentum_restart;
  std::vector<TrackedPoint> tracked;
  tracked.push_back({std::move(st_.x), std::move(st_.grad)});
  if (!restart) tracked.push_back({std::move(st_.x_prev), std::move(st_.grad_prev)});
  update_partition(red_, p_, out, &flops_, tracked);

  const Index m = p_.rows();
  const Index nr = part.reduced_dim();
  const Index nj = static_cast<Index>(part.relaxed.size());
  A_free_.resize(m, nr);
  lambda_free_.resize(nr);
  Vector eig(nr);
  for (Index k = 0; k < nr; ++k) {
    const Index l = part.free[static_cast<std::size_t>(k)];
    A_free_.col(k) = p_.A().col(l);
    lambda_free_(k) = p_.lambda()(l);
    eig(k) = eigvec_(old_position[static_cast<std::size_t>(l)]);
  }
  A_rel_.resize(m, nj);
  lambda_rel_.resize(nj);
  for (Index i = 0; i < nj; ++i) {
    const Index l = part.relaxed[static_cast<std::size_t>(i)];
    A_rel_.col(i) = p_.A().col(l);
    lambda_rel_(i) = p_.lambda()(l);
  }
  eigvec_ = std::move(eig);

  st_.x = std::move(tracked[0].x);
  st_.grad = std::move(tracked[0].grad);
  if (restart) {
    st_.x_prev = st_.x;
    st_.grad_prev = st_.grad;
    st_.momentum = 1;
  } else {
    st_.x_prev = std::move(tracked[1].x);
    st_.grad_prev = std::move(tracked[1].grad);
  }
  if (nr == 0) return;
  const bool shrunk = static_cast<double>(nr) <= (1.0 - cfg_.refresh_shrink) * static_cast<double>(estimated_dim_);
  if (!shrunk) return;

  // Both updates replace the Hessian by a principal submatrix or a Schur
  // complement of one, so the previous bound stays valid and the refreshed
  // estimate can only lower it.
  const double refreshed =
      estimate_lipschitz(red_.reduced, p_.epsilon(), cfg_.refresh_power_iterations, &eigvec_, &flops_);
  if (refreshed < st_.lipschitz) {
    st_.lipschitz = refreshed;
    refresh_gap_ = gap;
  }
  estimated_dim_ = nr;
}

void Run::record(std::int64_t iteration, const Certificate& cert) {
  TraceRecord r;
  r.iteration = iteration;
  r.flops = flops_.spent();
  r.gap = cert.gap;
  r.card_I = static_cast<std::int64_t>(red_.partition.screened.size());
  r.card_J = static_cast<std::int64_t>(red_.partition.relaxed.size());
  r.radius = cert.sphere.radius;
  trace_.push_back(r);
  if (observer_) observer_(IterationView{iteration, cert.x, cert.sphere, cert.gap, red_.partition});
}

SolveResult Run::execute() {
  if (cfg_.flop_budget < 0) throw std::invalid_argument("flop budget must be >= 0");
  if (!(cfg_.gap_tolerance >= 0.0)) throw std::invalid_argument("gap tolerance must be >= 0");
  if (cfg_.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (cfg_.power_iterations < 1 || cfg_.refresh_power_iterations < 1) {
    throw std::invalid_argument("power iteration counts must be >= 1");
  }

  const Index n = p_.cols();
  red_ = init_partition(p_);
  A_free_ = p_.A();
  A_rel_.resize(p_.rows(), 0);
  lambda_free_ = p_.lambda();
  lambda_rel_.resize(0);
  estimated_dim_ = n;
  y_sq_ = p_.y().squaredNorm();
  eigvec_ = Vector::Ones(n);

  SolveResult result;
  // Step size and the certificate at x = 0 are set-up work shared by all
  // variants and are not charged.
  const double lipschitz = estimate_lipschitz(red_.reduced, p_.epsilon(), cfg_.power_iterations, &eigvec_);
  result.initial_lipschitz = lipschitz;
  safe_lipschitz_ = lipschitz;
  st_.x = Vector::Zero(n);
  st_.lipschitz = lipschitz;
  st_.momentum = 1;
  Certificate last = certify_reduced(st_.x, &st_.grad);
  st_.x_prev = st_.x;
  st_.grad_prev = st_.grad;
  flops_ = FlopCounter{};
  record(0, last);

  StopReason reason = StopReason::kMaxIterations;
  std::int64_t iteration = 0;
  if (last.gap <= cfg_.gap_tolerance) {
    reason = StopReason::kGapTolerance;
  } else {
    while (true) {
      if (flops_.spent() >= cfg_.flop_budget) {
        reason = StopReason::kBudget;
        break;
      }
      if (iteration >= cfg_.max_iterations) {
        reason = StopReason::kMaxIterations;
        break;
      }
      ++iteration;
      prox_step(st_, red_.reduced.lambda_r, &flops_);
      last = certify_reduced(st_.x, &st_.grad);
      if (st_.lipschitz < safe_lipschitz_ && !(last.gap <= kDivergenceFactor * refresh_gap_)) {
        // A few warm power steps can underestimate the curvature. Growth of
        // the gap signals a step that is too long: fall back to the initial
        // estimate and drop the momentum.
        st_.lipschitz = safe_lipschitz_;
        st_.x_prev = st_.x;
        st_.grad_prev = st_.grad;
        st_.momentum = 1;
      }

      if (last.gap <= cfg_.gap_tolerance) {
        complete_gap(last);
        if (last.gap <= cfg_.gap_tolerance) {
          record(iteration, last);
          reason = StopReason::kGapTolerance;
          break;
        }
      }

      TestOutcome out;
      if ((tests_.screening || tests_.relaxing) && std::isfinite(last.gap)) {
        const auto& free = red_.partition.free;
        out = run_tests(free, {last.corr_free.data(), static_cast<std::size_t>(last.corr_free.size())},
                        {lambda_free_.data(), static_cast<std::size_t>(lambda_free_.size())},
                        last.sphere.radius, tests_);
        const auto nr = static_cast<std::int64_t>(free.size());
        if (tests_.screening) flops_.elementwise(2 * nr);
        if (tests_.relaxing) flops_.elementwise(2 * nr);
      }
      if (!out.empty()) apply_outcome(out, last.gap);
      record(iteration, last);

      if (red_.partition.free.empty()) {
        const Vector x = finalize(red_.partition, red_.reduced, &flops_);
        last = certify_final(x);
        complete_gap(last);
        ++iteration;
        record(iteration, last);
        reason = StopReason::kFinalized;
        break;
      }
    }
  }

  if (!last.excluded.empty()) {
    // Stopped on budget or iteration cap: report the full gap of the last point.
    complete_gap(last);
    trace_.back().gap = last.gap;
    trace_.back().radius = last.sphere.radius;
  }
  result.x = std::move(last.x);
  result.gap = last.gap;
  result.trace = std::move(trace_);
  result.reason = reason;
  result.flops = flops_.spent();
  result.iterations = iteration;
  result.partition = red_.partition;
  return result;
}

}  // namespace

SolveResult solve(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer) {
  Run run(p, cfg, observer);
  return run.execute();
}

}  // namespace screlax
