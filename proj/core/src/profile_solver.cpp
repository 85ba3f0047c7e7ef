#include "vapep/profile_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <thread>

#include "user_pool.hpp"

namespace vapep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Weight kNoIncumbent = std::numeric_limits<Weight>::max();
constexpr int kMaxSolverResources = 20;

/// Non-empty subsets of R in (popcount, value) order.
std::vector<ResourceSet> nonempty_subsets(int k) {
  auto all = subsets_in_order(k);
  all.erase(all.begin());
  return all;
}

detail::UserPool make_pool(const Instance& inst) {
  const AuthCost& auth = inst.auth();
  return detail::UserPool(auth.user_classes(), [&auth](std::size_t u, ResourceSet t) { return auth.omega(u, t); });
}

std::vector<ResourceSet> slots_of(const std::vector<ResourceSet>& subsets, const std::vector<std::size_t>& counts) {
  std::vector<ResourceSet> slots;
  for (std::size_t i = 0; i < counts.size(); ++i) slots.insert(slots.end(), counts[i], subsets[i]);
  return slots;
}

UserProfile profile_from_counts(int k, std::size_t n, const std::vector<ResourceSet>& subsets,
                                const std::vector<std::size_t>& counts) {
  UserProfile usr(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    usr.set(subsets[i], counts[i]);
    assigned += counts[i];
  }
  usr.set(0, n - assigned);
  return usr;
}

/// Lower bound on w_c over every completion of a partial profile that may
/// still place up to `future` users. Each term is non-decreasing as more
/// users are committed to a subset, which lets the branching loop stop early.
Weight partial_bound(const WeightedConstraint& c, const ProfileAggregates& agg, std::int64_t future) {
  return std::visit(overloaded{
                        [&](const SodU& x) { return x.f(agg.inter(x.r1, x.r2)); },
                        [&](const CardUB& x) { return x.f(agg.degree[static_cast<std::size_t>(x.r)] - x.t); },
                        [&](const CardLB& x) {
                          return x.f(x.t - agg.degree[static_cast<std::size_t>(x.r)] - future);
                        },
                        [&](const UserCount& x) {
                          return x.shape == UserCount::Shape::linear ? checked_mul(x.coef, agg.active)
                                                                     : checked_mul(x.coef, agg.active * agg.active);
                        },
                        [](const auto&) { return Weight{0}; },
                    },
                    c);
}

struct SearchOutcome {
  Weight best = kNoIncumbent;
  std::vector<std::size_t> best_counts;
  std::uint64_t profiles = 0;
  std::uint64_t matchings = 0;
  bool found = false;
};

class ProfileSearch {
 public:
  ProfileSearch(const Instance& inst, std::size_t ell, bool node_bounds)
      : inst_(inst),
        k_(inst.k()),
        ell_(ell),
        node_bounds_(node_bounds),
        subsets_(nonempty_subsets(inst.k())),
        pool_(make_pool(inst)),
        counts_(subsets_.size(), 0),
        agg_(inst.k()) {
    min_cost_.reserve(subsets_.size());
    for (ResourceSet t : subsets_) min_cost_.push_back(pool_.min_cost(t));
    card_lb_.resize(static_cast<std::size_t>(k_));
    for (const auto& c : inst.constraints()) {
      if (std::holds_alternative<CustomConstraint>(c)) has_custom_ = true;
      if (const auto* x = std::get_if<CardLB>(&c)) {
        card_lb_[static_cast<std::size_t>(x->r)].push_back(*x);
      } else if (const auto* u = std::get_if<UserCount>(&c)) {
        user_count_.push_back(*u);
      } else {
        others_.push_back(&c);
      }
    }
    sorted_cost_.resize(subsets_.size());
    build_subset_costs(inst);
  }

  /// Lower bound on every complete profile.
  Weight root_bound() const {
    return node_bounds_ ? node_bound(static_cast<std::int64_t>(ell_), 0) : 0;
  }

  /// Explores the subtrees whose first count is one of `first_values`,
  /// keeping only profiles cheaper than `ceiling`.
  SearchOutcome run(const std::vector<std::size_t>& first_values, Weight ceiling) {
    out_ = SearchOutcome{};
    out_.best = ceiling;
    for (std::size_t v : first_values) {
      if (v > ell_) continue;
      counts_[0] = v;
      agg_.add(subsets_[0], static_cast<std::int64_t>(v));
      omega_floor_ = 0;
      for (std::size_t c = 1; c <= v; ++c) omega_floor_ = checked_add(omega_floor_, copy_cost(0, c));
      covered_ = v > 0 ? subsets_[0] : 0;
      descend(1, ell_ - v);
      agg_.add(subsets_[0], -static_cast<std::int64_t>(v));
      counts_[0] = 0;
    }
    return std::move(out_);
  }

 private:
  Weight node_bound(std::int64_t future, std::size_t level) const {
    Weight lb = omega_floor_;
    for (const auto* c : others_) lb = checked_add(lb, partial_bound(*c, agg_, future));
    const Weight rest = coverage_bound(future, level);
    return rest == kNoIncumbent ? kNoIncumbent : checked_add(lb, rest);
  }

  /// Cost of the v-th copy of subsets_[level] in the floor: copies go to
  /// distinct users, so the v-th pays at least the v-th smallest ω.
  Weight copy_cost(std::size_t level, std::size_t v) {
    if (v == 1) return min_cost_[level];
    auto& costs = sorted_cost_[level];
    if (costs.size() < v) costs = pool_.smallest_costs(subsets_[level], std::max(v, std::min<std::size_t>(2 * v, ell_)));
    return costs.at(v - 1);
  }

  Weight user_count_at(std::int64_t z) const {
    Weight w = 0;
    for (const auto& u : user_count_) {
      w = checked_add(w, u.shape == UserCount::Shape::linear ? checked_mul(u.coef, z) : checked_mul(u.coef, z * z));
    }
    return w;
  }

  /// Least step f(z + 1) - f(z) for z <= ell_.
  Weight least_step(const PenaltySpec& f) const {
    Weight step = kNoIncumbent;
    for (std::int64_t z = 0; z <= static_cast<std::int64_t>(ell_); ++z) step = std::min(step, f(z + 1) - f(z));
    return step == kNoIncumbent ? 0 : std::max<Weight>(step, 0);
  }

  /// Future users on one subset T never need to exceed copies_ (the largest
  /// need anywhere) since surplus copies can be dropped. The j-th copy goes
  /// to a distinct user, so it pays at least the j-th smallest ω(u, T) plus
  /// the least SoDU step of each pair inside T.
  void build_subset_costs(const Instance& inst) {
    copies_ = 1;
    for (int r = 0; r < k_; ++r) {
      std::int64_t need = 1;
      for (const auto& x : card_lb_[static_cast<std::size_t>(r)]) need = std::max<std::int64_t>(need, x.t);
      need_cap_ += need;
      copies_ = std::max(copies_, need);
    }
    std::vector<Weight> sod(subsets_.size(), 0);
    for (const auto& con : inst.constraints()) {
      if (const auto* x = std::get_if<SodU>(&con)) {
        const Weight step = least_step(x->f);
        const ResourceSet pair = (ResourceSet{1} << x->r1) | (ResourceSet{1} << x->r2);
        for (std::size_t j = 0; j < subsets_.size(); ++j) {
          if ((subsets_[j] & pair) == pair) sod[j] = checked_add(sod[j], step);
        }
      }
    }
    const std::size_t depth = std::min<std::size_t>(static_cast<std::size_t>(copies_), ell_);
    items_.resize(subsets_.size());
    class_start_.assign(static_cast<std::size_t>(k_) + 2, subsets_.size());
    for (std::size_t j = subsets_.size(); j-- > 0;) {
      class_start_[static_cast<std::size_t>(popcount(subsets_[j]))] = j;
      items_[j] = pool_.smallest_costs(subsets_[j], depth);
      for (auto& w : items_[j]) w = checked_add(w, sod[j]);
    }
    rows_ = std::min<std::size_t>(ell_, static_cast<std::size_t>(need_cap_)) + 1;
    class_prefix_.resize(static_cast<std::size_t>(k_) + 1);
    for (int p = 1; p <= k_; ++p) {
      class_prefix_[static_cast<std::size_t>(p)] = prefix_of(class_start_[static_cast<std::size_t>(p)],
                                                             class_start_[static_cast<std::size_t>(p) + 1]);
    }
    tables_of_level_.assign(subsets_.size(), nullptr);

    // Per-class costs for the multiplier bound, when they fit.
    const std::size_t classes = pool_.class_count();
    constexpr std::size_t kClassCostCells = std::size_t{1} << 22;
    if (!node_bounds_ || subsets_.size() * classes > kClassCostCells) return;
    class_cost_.resize(subsets_.size());
    for (std::size_t j = 0; j < subsets_.size(); ++j) {
      class_cost_[j] = pool_.class_costs(subsets_[j]);
      for (auto& w : class_cost_[j]) w = checked_add(w, sod[j]);
    }
    build_multipliers();
  }

  /// g_r(y) at degree `deg`: CardLB penalties on r after y more users.
  Weight card_penalty(int r, std::int64_t deg, std::int64_t y) const {
    Weight w = 0;
    for (const auto& c : card_lb_[static_cast<std::size_t>(r)]) w = checked_add(w, c.f(c.t - deg - y));
    return w;
  }

  /// Multipliers μ_r >= 0 on "y_r users hold r" give, for x future users,
  ///   cost >= Σ of the x least reduced user costs min_T [c_u(T) - μ(T)]
  ///           + Σ_r min_y [μ_r y + g_r(y)] + UC(a + x)
  /// with c_u(T) = ω(u, T) plus the least SoDU steps inside T, users
  /// distinct and T in range. One μ per user count m is fitted at the root
  /// by projected subgradient ascent; μ is kept as integers over kScale so
  /// the bound stays exact.
  void build_multipliers() {
    const std::size_t classes = pool_.class_count();
    const auto users = static_cast<std::int64_t>(pool_.user_count());
    const std::int64_t top = std::min<std::int64_t>({static_cast<std::int64_t>(ell_), need_cap_, users});
    if (k_ == 0 || top < 1) return;
    std::vector<std::int64_t> need0(static_cast<std::size_t>(k_), 1);
    double step0 = 1;
    for (int r = 0; r < k_; ++r) {
      for (const auto& c : card_lb_[static_cast<std::size_t>(r)]) {
        need0[static_cast<std::size_t>(r)] = std::max<std::int64_t>(need0[static_cast<std::size_t>(r)], c.t);
        step0 = std::max(step0, static_cast<double>(c.f(c.t) - c.f(c.t - 1)));
      }
    }
    std::vector<double> reduced(subsets_.size());
    std::vector<std::pair<double, std::size_t>> order(classes);
    std::vector<std::size_t> pick(classes);
    std::vector<std::pair<double, std::vector<Weight>>> fitted;
    std::vector<double> mu(static_cast<std::size_t>(k_), 0.0);
    constexpr int kIterations = 60;
    for (std::int64_t m = 1; m <= top; ++m) {
      double best_value = -std::numeric_limits<double>::infinity();
      std::vector<double> best_mu = mu;
      for (int it = 0; it < kIterations; ++it) {
        for (std::size_t j = 0; j < subsets_.size(); ++j) {
          double w = 0;
          for (int r = 0; r < k_; ++r) {
            if (contains(subsets_[j], r)) w += mu[static_cast<std::size_t>(r)];
          }
          reduced[j] = w;
        }
        for (std::size_t c = 0; c < classes; ++c) {
          double v = std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < subsets_.size(); ++j) {
            const double w = static_cast<double>(class_cost_[j][c]) - reduced[j];
            if (w < v) {
              v = w;
              pick[c] = j;
            }
          }
          order[c] = {v, c};
        }
        std::sort(order.begin(), order.end());
        std::vector<double> grad(static_cast<std::size_t>(k_), 0.0);
        double value = static_cast<double>(user_count_at(m));
        std::int64_t left = m;
        for (const auto& [v, c] : order) {
          const auto take = std::min<std::int64_t>(left, static_cast<std::int64_t>(pool_.class_size(c)));
          value += v * static_cast<double>(take);
          for (int r = 0; r < k_; ++r) {
            if (contains(subsets_[pick[c]], r)) grad[static_cast<std::size_t>(r)] -= static_cast<double>(take);
          }
          left -= take;
          if (left == 0) break;
        }
        for (int r = 0; r < k_; ++r) {
          const auto ru = static_cast<std::size_t>(r);
          double g = std::numeric_limits<double>::infinity();
          std::int64_t arg = 1;
          for (std::int64_t y = 1; y <= std::min(m, need0[ru]); ++y) {
            const double w = mu[ru] * static_cast<double>(y) + static_cast<double>(card_penalty(r, 0, y));
            if (w < g) {
              g = w;
              arg = y;
            }
          }
          value += g;
          grad[ru] += static_cast<double>(arg);
        }
        if (value > best_value) {
          best_value = value;
          best_mu = mu;
        }
        double norm = 0;
        for (double g : grad) norm += g * g;
        if (norm == 0) break;
        const double step = step0 / (1.0 + it) / std::sqrt(norm);
        for (int r = 0; r < k_; ++r) {
          const auto ru = static_cast<std::size_t>(r);
          mu[ru] = std::max(0.0, mu[ru] + step * grad[ru]);
        }
      }
      std::vector<Weight> scaled(static_cast<std::size_t>(k_));
      for (int r = 0; r < k_; ++r) {
        scaled[static_cast<std::size_t>(r)] =
            static_cast<Weight>(std::floor(best_mu[static_cast<std::size_t>(r)] * static_cast<double>(kScale)));
      }
      fitted.emplace_back(best_value, std::move(scaled));
      mu = best_mu;
    }
    // Keep the few multipliers whose user counts look most promising.
    std::stable_sort(fitted.begin(), fitted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    constexpr std::size_t kKeep = 6;
    for (auto& [value, scaled] : fitted) {
      if (multipliers_.size() == kKeep) break;
      bool seen = false;
      for (const auto& mlt : multipliers_) seen = seen || mlt.mu == scaled;
      if (!seen) multipliers_.push_back(tabulate(std::move(scaled)));
    }
  }

  struct Multiplier {
    std::vector<Weight> mu;                   // scaled by kScale
    std::vector<std::vector<Weight>> prefix;  // [level][x], scaled
  };

  /// prefix[level][x]: kScale times the x least reduced costs over distinct
  /// users, each user taking its best subset from `level` on.
  Multiplier tabulate(std::vector<Weight> scaled) const {
    const std::size_t classes = pool_.class_count();
    const std::size_t rows = std::min(ell_, pool_.user_count()) + 1;
    Multiplier out;
    out.prefix.resize(subsets_.size());
    std::vector<Weight> best(classes, kNoIncumbent);
    std::vector<std::pair<Weight, std::size_t>> order(classes);
    for (std::size_t j = subsets_.size(); j-- > 0;) {
      Weight credit = 0;
      for (int r = 0; r < k_; ++r) {
        if (contains(subsets_[j], r)) credit = checked_add(credit, scaled[static_cast<std::size_t>(r)]);
      }
      for (std::size_t c = 0; c < classes; ++c) {
        best[c] = std::min(best[c], checked_mul(class_cost_[j][c], kScale) - credit);
        order[c] = {best[c], c};
      }
      std::sort(order.begin(), order.end());
      auto& prefix = out.prefix[j];
      prefix.assign(1, 0);
      for (const auto& [v, c] : order) {
        for (std::size_t i = 0; i < pool_.class_size(c) && prefix.size() < rows; ++i) {
          prefix.push_back(checked_add(prefix.back(), v));
        }
        if (prefix.size() == rows) break;
      }
    }
    out.mu = std::move(scaled);
    return out;
  }

  /// Largest multiplier bound at this node; kNoIncumbent when no count of
  /// future users can cover every resource.
  Weight multiplier_bound(std::int64_t future, std::size_t level, std::int64_t reach) const {
    Weight result = 0;
    for (const auto& mlt : multipliers_) {
      const auto& prefix = mlt.prefix[level];
      const std::int64_t last = std::min<std::int64_t>(future, static_cast<std::int64_t>(prefix.size()) - 1);
      Weight best = kNoIncumbent;
      Weight cards = kNoIncumbent;
      for (std::int64_t x = 0; x <= last; ++x) {
        if (x <= reach) {
          cards = 0;
          for (int r = 0; r < k_ && cards != kNoIncumbent; ++r) {
            const auto ru = static_cast<std::size_t>(r);
            const std::int64_t deg = agg_.degree[ru];
            const std::int64_t lo = deg == 0 ? 1 : 0;
            const std::int64_t hi = std::min(x, need_[ru]);
            Weight g = kNoIncumbent;
            for (std::int64_t y = lo; y <= hi; ++y) {
              g = std::min(g, checked_add(checked_mul(mlt.mu[ru], y), checked_mul(card_penalty(r, deg, y), kScale)));
            }
            cards = g == kNoIncumbent ? kNoIncumbent : checked_add(cards, g);
          }
        }
        if (cards != kNoIncumbent) {
          const Weight value = checked_add(checked_add(prefix[static_cast<std::size_t>(x)], cards),
                                           checked_mul(user_count_at(agg_.active + x), kScale));
          best = std::min(best, value);
        }
        // Past reach the card part is fixed and user costs only grow.
        if (x >= reach && x < last &&
            prefix[static_cast<std::size_t>(x) + 1] >= prefix[static_cast<std::size_t>(x)]) {
          break;
        }
      }
      if (best == kNoIncumbent) return kNoIncumbent;
      // ceil(best / kScale); weights are integral.
      const Weight lb = best >= 0 ? (best + kScale - 1) / kScale : -((-best) / kScale);
      result = std::max(result, lb);
    }
    return result;
  }

  /// Prefix sums of the cheapest items over subsets [from, to), up to rows_ - 1 items.
  std::vector<Weight> prefix_of(std::size_t from, std::size_t to) const {
    std::vector<Weight> all;
    for (std::size_t j = from; j < to; ++j) all.insert(all.end(), items_[j].begin(), items_[j].end());
    const std::size_t keep = std::min(all.size(), rows_ - 1);
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end());
    std::vector<Weight> prefix(keep + 1, 0);
    for (std::size_t i = 0; i < keep; ++i) prefix[i + 1] = checked_add(prefix[i], all[i]);
    return prefix;
  }

  /// F[x][P]: least cost of x future items, taken from `level` on, whose
  /// popcounts total at least P, for x < rows_, P <= need_cap_. For large
  /// k one table per popcount class is shared, using the whole class.
  const std::vector<Weight>& cover_table(std::size_t level) const {
    if (tables_of_level_[level] != nullptr) return *tables_of_level_[level];
    const int low = popcount(subsets_[level]);
    const std::size_t key = k_ <= 10 ? level : class_start_[static_cast<std::size_t>(low)];
    auto [it, fresh] = tables_.try_emplace(key);
    if (fresh) {
      const auto cols = static_cast<std::size_t>(need_cap_) + 1;
      auto& f = it->second;
      f.assign(rows_ * cols, kNoIncumbent);
      f[0] = 0;
      std::vector<Weight> next;
      for (int p = low; p <= k_; ++p) {
        const std::vector<Weight> own =
            p == low ? prefix_of(key, class_start_[static_cast<std::size_t>(p) + 1]) : std::vector<Weight>{};
        const auto& prefix = p == low ? own : class_prefix_[static_cast<std::size_t>(p)];
        next = f;
        for (std::size_t x = 0; x < rows_; ++x) {
          for (std::size_t P = 0; P < cols; ++P) {
            const Weight base = f[x * cols + P];
            if (base == kNoIncumbent) continue;
            for (std::size_t m = 1; m < prefix.size() && x + m < rows_; ++m) {
              const std::size_t q = std::min(cols - 1, P + m * static_cast<std::size_t>(p));
              Weight& slot = next[(x + m) * cols + q];
              slot = std::min(slot, checked_add(base, prefix[m]));
            }
          }
        }
        f.swap(next);
      }
      suffix_min(f, cols);
    }
    tables_of_level_[level] = &it->second;
    return it->second;
  }

  /// "At least P": suffix minima along each row.
  static void suffix_min(std::vector<Weight>& f, std::size_t cols) {
    for (std::size_t row = 0; row < f.size() / cols; ++row) {
      for (std::size_t P = cols - 1; P-- > 0;) f[row * cols + P] = std::min(f[row * cols + P], f[row * cols + P + 1]);
    }
  }

  /// CardLB and UserCount terms plus the cost of the users still to come.
  /// With x added users on subsets from `level` on (surplus copies dropped),
  /// y_r of them holding r, and P = Σ_r y_r = Σ|T|,
  ///   cost >= F[x][P] + Σ_r g_r(y_r) + UC(a + x),
  /// where g_r sums the CardLB penalties on r, y_r <= x, and uncovered r
  /// need y_r >= 1. Beyond x = Σ_r need_r dropping a user never hurts, so
  /// larger x are skipped. This holds for every completion that only uses
  /// subsets from `level` on, including further copies of subsets_[level],
  /// so the branching loop may stop at the first pruned count.
  Weight coverage_bound(std::int64_t future, std::size_t level) const {
    const std::int64_t active = agg_.active;
    need_.resize(static_cast<std::size_t>(k_));
    std::int64_t total_need = 0;
    std::int64_t reach = 0;
    bool uncovered = false;
    for (int r = 0; r < k_; ++r) {
      const std::int64_t deg = agg_.degree[static_cast<std::size_t>(r)];
      std::int64_t need = deg == 0 ? 1 : 0;
      uncovered = uncovered || deg == 0;
      for (const auto& c : card_lb_[static_cast<std::size_t>(r)]) need = std::max<std::int64_t>(need, c.t - deg);
      need_[static_cast<std::size_t>(r)] = need;
      total_need += need;
      reach = std::max(reach, need);
    }
    if (uncovered && future < 1) return kNoIncumbent;
    if (level >= subsets_.size()) return uncovered ? kNoIncumbent : card_and_count();

    const auto& f = cover_table(level);
    const auto cols = static_cast<std::size_t>(need_cap_) + 1;
    const auto width = static_cast<std::size_t>(total_need) + 1;
    Weight best = uncovered ? kNoIncumbent : card_and_count();
    const std::int64_t last = std::min(future, total_need);
    for (std::int64_t x = 1; x <= last; ++x) {
      const Weight uc = user_count_at(active + x);
      if (uc >= best) break;
      if (x <= reach) {
        // g_[P]: least Σ_r g_r(y_r) with Σ y_r = P and lo_r <= y_r <= min(x, need_r).
        g_.assign(width, kNoIncumbent);
        g_[0] = 0;
        std::size_t span = 0;
        for (int r = 0; r < k_; ++r) {
          const std::int64_t deg = agg_.degree[static_cast<std::size_t>(r)];
          const std::int64_t lo = deg == 0 ? 1 : 0;
          const std::int64_t hi = std::min(x, need_[static_cast<std::size_t>(r)]);
          next_.assign(width, kNoIncumbent);
          for (std::int64_t y = lo; y <= hi; ++y) {
            Weight gy = 0;
            for (const auto& c : card_lb_[static_cast<std::size_t>(r)]) gy = checked_add(gy, c.f(c.t - deg - y));
            for (std::size_t P = 0; P <= span; ++P) {
              if (g_[P] == kNoIncumbent) continue;
              Weight& slot = next_[P + static_cast<std::size_t>(y)];
              slot = std::min(slot, checked_add(g_[P], gy));
            }
          }
          span += static_cast<std::size_t>(hi);
          g_.swap(next_);
        }
      }
      const Weight* row = &f[static_cast<std::size_t>(x) * cols];
      for (std::size_t P = 0; P < width; ++P) {
        if (g_[P] == kNoIncumbent || row[P] == kNoIncumbent) continue;
        best = std::min(best, checked_add(checked_add(row[P], g_[P]), uc));
      }
    }
    if (best == kNoIncumbent || multipliers_.empty()) return best;
    return std::max(best, multiplier_bound(future, level, reach));
  }

  /// CardLB and UserCount terms when no further user can be added.
  Weight card_and_count() const {
    Weight w = user_count_at(agg_.active);
    for (int r = 0; r < k_; ++r) {
      for (const auto& c : card_lb_[static_cast<std::size_t>(r)]) {
        w = checked_add(w, c.f(c.t - agg_.degree[static_cast<std::size_t>(r)]));
      }
    }
    return w;
  }

  void descend(std::size_t level, std::size_t budget) {
    const ResourceSet all = full_set(k_);
    if (level == subsets_.size() || budget == 0) {
      if (covered_ == all) leaf();
      return;
    }
    if (node_bounds_ && node_bound(static_cast<std::int64_t>(budget), level) >= out_.best) return;

    const ResourceSet t = subsets_[level];
    const ResourceSet saved_cover = covered_;
    const Weight saved_floor = omega_floor_;
    std::size_t placed = 0;
    for (std::size_t v = 0; v <= budget; ++v) {
      if (v > 0) {
        agg_.add(t, 1);
        omega_floor_ = checked_add(omega_floor_, copy_cost(level, v));
        covered_ = saved_cover | t;
        ++placed;
      }
      counts_[level] = v;
      if (node_bounds_ && v > 0 && node_bound(static_cast<std::int64_t>(budget - v), level) >= out_.best) break;
      descend(level + 1, budget - v);
    }
    agg_.add(t, -static_cast<std::int64_t>(placed));
    counts_[level] = 0;
    covered_ = saved_cover;
    omega_floor_ = saved_floor;
  }

  void leaf() {
    ++out_.profiles;
    Weight constraint_weight = 0;
    std::optional<UserProfile> usr;
    if (has_custom_) usr = profile_from_counts(k_, inst_.n(), subsets_, counts_);
    for (const auto& c : inst_.constraints()) {
      constraint_weight = checked_add(constraint_weight, eval_aggregates(c, agg_, usr ? &*usr : nullptr));
    }
    // Ω is at least the sum of per-slot minima, so this skip is exact.
    if (checked_add(constraint_weight, omega_floor_) >= out_.best) return;
    ++out_.matchings;
    const Weight total = checked_add(constraint_weight, pool_.value(slots_of(subsets_, counts_)));
    if (total < out_.best) {
      out_.found = true;
      out_.best = total;
      out_.best_counts = counts_;
    }
  }

  const Instance& inst_;
  int k_;
  std::size_t ell_;
  bool node_bounds_;
  std::vector<ResourceSet> subsets_;
  detail::UserPool pool_;
  std::vector<Weight> min_cost_;
  bool has_custom_ = false;
  std::vector<std::vector<CardLB>> card_lb_;
  std::vector<UserCount> user_count_;
  std::vector<const WeightedConstraint*> others_;
  std::int64_t need_cap_ = 0;
  std::int64_t copies_ = 1;
  std::size_t rows_ = 1;
  std::vector<std::vector<Weight>> items_;
  std::vector<std::size_t> class_start_;
  std::vector<std::vector<Weight>> class_prefix_;
  static constexpr Weight kScale = 8;
  std::vector<std::vector<Weight>> class_cost_;
  std::vector<Multiplier> multipliers_;
  mutable std::map<std::size_t, std::vector<Weight>> tables_;
  mutable std::vector<const std::vector<Weight>*> tables_of_level_;
  mutable std::vector<std::int64_t> need_;
  mutable std::vector<Weight> g_;
  mutable std::vector<Weight> next_;
  std::vector<std::vector<Weight>> sorted_cost_;

  std::vector<std::size_t> counts_;
  ProfileAggregates agg_;
  Weight omega_floor_ = 0;
  ResourceSet covered_ = 0;
  SearchOutcome out_;
};

void enumerate_rec(const std::vector<ResourceSet>& subsets, std::size_t level, std::size_t budget,
                   ResourceSet covered, ResourceSet all, bool require_complete, std::vector<std::size_t>& counts,
                   const std::function<void(const std::vector<std::size_t>&)>& emit) {
  if (level == subsets.size()) {
    if (!require_complete || covered == all) emit(counts);
    return;
  }
  if (require_complete && budget == 0 && covered != all) return;
  for (std::size_t v = 0; v <= budget; ++v) {
    counts[level] = v;
    enumerate_rec(subsets, level + 1, budget - v, v > 0 ? covered | subsets[level] : covered, all, require_complete,
                  counts, emit);
  }
  counts[level] = 0;
}

}  // namespace

BigInt count_profiles(int k, std::size_t ell) {
  if (k < 0 || k > kMaxResources) throw DomainError("count_profiles: k outside [0, 30]");
  // C(ℓ + 2^k - 1, ℓ) = Π_{i=1..ℓ} (2^k - 1 + i) / i, exact at every step.
  const BigInt parts = (BigInt(1) << k) - 1;
  BigInt out = 1;
  for (std::size_t i = 1; i <= ell; ++i) {
    out *= parts + i;
    out /= i;
  }
  return out;
}

void enumerate_profiles(int k, std::size_t ell, std::size_t n, bool require_complete,
                        const std::function<void(const UserProfile&)>& visit) {
  if (ell > n) {
    throw DomainError("enumerate_profiles: ell = " + std::to_string(ell) + " exceeds n = " + std::to_string(n));
  }
  if (k < 0 || k > kMaxSolverResources) throw GuardError("enumerate_profiles: k must not exceed 20");
  const auto subsets = nonempty_subsets(k);
  std::vector<std::size_t> counts(subsets.size(), 0);
  enumerate_rec(subsets, 0, ell, 0, full_set(k), require_complete, counts,
                [&](const std::vector<std::size_t>& c) { visit(profile_from_counts(k, n, subsets, c)); });
}

ProfileCompletion best_relation_for_profile(const Instance& inst, const UserProfile& usr) {
  if (usr.resource_count() != inst.k()) throw DomainError("profile is over a different resource universe");
  if (usr.total() != inst.n()) {
    throw DomainError("profile accounts for " + std::to_string(usr.total()) + " users, instance has " +
                      std::to_string(inst.n()));
  }
  std::vector<ResourceSet> slots;
  for (const auto& [t, c] : usr.entries()) {
    if (t != 0) slots.insert(slots.end(), c, t);
  }
  auto pool = make_pool(inst);
  ProfileCompletion out;
  out.relation = AuthorizationRelation(inst.n());
  const auto users = pool.assign(slots, &out.authorizations);
  for (std::size_t i = 0; i < slots.size(); ++i) out.relation.assign(users[i], slots[i]);
  for (const auto& c : inst.constraints()) out.constraints = checked_add(out.constraints, eval_profile(c, usr));
  out.total = checked_add(out.authorizations, out.constraints);
  return out;
}

std::size_t effective_user_cap(const Instance& inst, const ProfileSolveOptions& options) {
  if (options.user_cap) {
    if (*options.user_cap == 0) throw DomainError("user cap must be at least 1");
    return std::min(*options.user_cap, inst.n());
  }
  return wbound_suggestion(inst.constraints(), inst.k(), inst.n());
}

SolveResult solve_profile(const Instance& inst, const ProfileSolveOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (inst.k() > kMaxSolverResources) {
    throw GuardError("profile solver: k = " + std::to_string(inst.k()) + " exceeds the limit of 20 resources");
  }
  const std::size_t ell = effective_user_cap(inst, options);
  const BigInt space = count_profiles(inst.k(), ell);
  if (options.max_profiles != kUnlimitedProfiles && space > BigInt(options.max_profiles)) {
    throw GuardError("profile solver: C(" + std::to_string(ell) + " + 2^" + std::to_string(inst.k()) +
                     " - 1, " + std::to_string(ell) + ") = " + space.str() + " profiles exceeds the bound " +
                     std::to_string(options.max_profiles));
  }

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(ell + 1)));
  std::vector<std::vector<std::size_t>> slices(workers);
  for (std::size_t v = 0; v <= ell; ++v) slices[v % workers].push_back(v);

  std::vector<std::unique_ptr<ProfileSearch>> searches;
  for (unsigned w = 0; w < workers; ++w) searches.push_back(std::make_unique<ProfileSearch>(inst, ell, options.node_bounds));
  auto run_pass = [&](Weight ceiling) {
    std::vector<SearchOutcome> outcomes(workers);
    if (workers == 1) {
      outcomes[0] = searches[0]->run(slices[0], ceiling);
      return outcomes;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          outcomes[w] = searches[w]->run(slices[w], ceiling);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return outcomes;
  };

  SearchOutcome best;
  SolveMeta meta;
  meta.solver = "profile";
  meta.user_cap = ell;
  // With bounds on, search below a ceiling that starts just above the root
  // bound and doubles its gap until something lies under it. Only profiles
  // at or above the ceiling are cut, so the optimum and its tie-break are
  // those of a single unrestricted pass.
  const Weight root = searches[0]->root_bound();
  Weight ceiling = options.node_bounds && root != kNoIncumbent ? checked_add(root, 1) : kNoIncumbent;
  for (;;) {
    auto outcomes = run_pass(ceiling);
    for (auto& o : outcomes) {
      meta.profiles_enumerated += o.profiles;
      meta.matchings += o.matchings;
      if (!o.found) continue;
      if (!best.found || o.best < best.best || (o.best == best.best && o.best_counts < best.best_counts)) {
        best.found = true;
        best.best = o.best;
        best.best_counts = std::move(o.best_counts);
      }
    }
    if (best.found || ceiling == kNoIncumbent) break;
    const Weight gap = ceiling - root;
    ceiling = gap > (kNoIncumbent - ceiling) / 2 ? kNoIncumbent : ceiling + gap;
  }
  if (!best.found) {
    throw InfeasibleError("profile solver: no complete relation with at most " + std::to_string(ell) + " users");
  }

  const auto subsets = nonempty_subsets(inst.k());
  const ProfileCompletion completion =
      best_relation_for_profile(inst, profile_from_counts(inst.k(), inst.n(), subsets, best.best_counts));
  meta.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  SolveResult result(inst, completion.relation, std::move(meta));
  if (result.total_weight() != best.best) {
    throw std::logic_error("profile solver: recomputed weight " + std::to_string(result.total_weight()) +
                           " differs from search value " + std::to_string(best.best));
  }
  return result;
}

}  // namespace vapep
