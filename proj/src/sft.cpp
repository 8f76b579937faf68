#include "cocyclelab/sft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cocyclelab::sft {

namespace {

std::int64_t pos_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

int digit(char c) { return c - '0'; }
char to_digit(int s) { return static_cast<char>('0' + s); }

bool word_admissible(const SftSpace& sp, const std::string& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!sp.allowed(digit(w[i]), digit(w[i + 1]))) return false;
  return true;
}

// Boolean reachability power: entries of M^n > 0.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> bool_power(
    const Eigen::MatrixXi& m, int n) {
  const int k = static_cast<int>(m.rows());
  using BMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  BMat acc = BMat::Identity(k, k), base = (m.array() > 0).matrix();
  while (n > 0) {
    if (n & 1) {
      BMat next = BMat::Constant(k, k, false);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int l = 0; l < k; ++l)
            if (acc(i, l) && base(l, j)) { next(i, j) = true; break; }
      acc = next;
    }
    BMat sq = BMat::Constant(k, k, false);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l)
          if (base(i, l) && base(l, j)) { sq(i, j) = true; break; }
    base = sq;
    n >>= 1;
  }
  return acc;
}

}  // namespace

SftSpace::SftSpace(Eigen::MatrixXi transition, double lambda)
    : transition_(std::move(transition)), lambda_(lambda) {
  const int k = static_cast<int>(transition_.rows());
  if (k < 2 || transition_.cols() != k)
    throw SftError("transition matrix must be square with k >= 2");
  if (k > 10) throw SftError("alphabet size > 10 not supported");
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw SftError("lambda must lie in (0,1)");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (transition_(i, j) != 0 && transition_(i, j) != 1)
        throw SftError("transition entries must be 0/1");
  for (int i = 0; i < k; ++i) {
    if (transition_.row(i).sum() == 0) throw SftError("transition has a dead row");
    if (transition_.col(i).sum() == 0) throw SftError("transition has a dead column");
  }
  // Smallest N with M^N positive; (k-1)^2 + 1 bounds the exponent of any
  // primitive 0/1 matrix.
  const int cap = (k - 1) * (k - 1) + 1;
  mixing_power_ = -1;
  for (int n = 1; n <= cap; ++n) {
    if (bool_power(transition_, n).all()) {
      mixing_power_ = n;
      break;
    }
  }
  if (mixing_power_ < 0) throw SftError("transition matrix is not mixing");

  // Canonical cycle: lex-smallest first-return word over the smallest symbol
  // that admits one within mixing_power + 1 steps.
  for (int a = 0; a < k && canonical_cycle_.empty(); ++a) {
    if (allowed(a, a)) {
      canonical_cycle_ = std::string(1, to_digit(a));
      break;
    }
    std::string conn = connector(a, a);
    canonical_cycle_ = std::string(1, to_digit(a)) + conn;
  }
}

std::string SftSpace::connector(int a, int b) const {
  if (allowed(a, b)) return "";
  const int k = alphabet_size();
  for (int len = 1; len <= mixing_power_; ++len) {
    // DFS in lex order over interior words of the given length.
    std::string w(len, '0');
    std::vector<int> idx(len, -1);
    int pos = 0;
    while (pos >= 0) {
      if (pos == len) {
        if (allowed(digit(w[len - 1]), b)) return w;
        --pos;
        continue;
      }
      int prev = pos == 0 ? a : digit(w[pos - 1]);
      int s = ++idx[pos];
      if (s >= k) {
        idx[pos] = -1;
        --pos;
        continue;
      }
      if (!allowed(prev, s)) continue;
      w[pos] = to_digit(s);
      ++pos;
    }
  }
  throw SftError("no connector within mixing power (matrix not mixing?)");
}

SpacePtr make_space(Eigen::MatrixXi transition, double lambda) {
  return std::make_shared<const SftSpace>(std::move(transition), lambda);
}

SpacePtr full_shift(int k, double lambda) {
  return make_space(Eigen::MatrixXi::Ones(k, k), lambda);
}

SpacePtr golden_mean_shift(double lambda) {
  Eigen::MatrixXi m(2, 2);
  m << 1, 1, 1, 0;
  return make_space(m, lambda);
}

SftPoint::SftPoint(SpacePtr space, std::string left_period, std::string core,
                   std::int64_t core_start, std::string right_period)
    : space_(std::move(space)),
      left_(std::move(left_period)),
      core_(std::move(core)),
      right_(std::move(right_period)),
      core_start_(core_start) {
  if (!space_) throw SftError("point requires a space");
  if (left_.empty() || right_.empty()) throw SftError("periods must be nonempty");
  const auto& sp = *space_;
  auto check_word = [&](const std::string& w, const char* what) {
    for (char c : w)
      if (digit(c) < 0 || digit(c) >= sp.alphabet_size())
        throw SftError(std::string("symbol out of range in ") + what);
    if (!word_admissible(sp, w))
      throw SftError(std::string("inadmissible word in ") + what);
  };
  check_word(left_, "left period");
  check_word(core_, "core");
  check_word(right_, "right period");
  // Seams: left wrap, left->next, core/right junction, right wrap.
  if (!sp.allowed(digit(left_.back()), digit(left_.front())))
    throw SftError("left period wrap inadmissible");
  if (!sp.allowed(digit(right_.back()), digit(right_.front())))
    throw SftError("right period wrap inadmissible");
  const char after_left = core_.empty() ? right_.front() : core_.front();
  if (!sp.allowed(digit(left_.back()), digit(after_left)))
    throw SftError("left period / core seam inadmissible");
  const char before_right = core_.empty() ? left_.back() : core_.back();
  if (!sp.allowed(digit(before_right), digit(right_.front())))
    throw SftError("core / right period seam inadmissible");
}

int SftPoint::symbol_at(std::int64_t i) const {
  if (i < core_start_) {
    auto L = static_cast<std::int64_t>(left_.size());
    return digit(left_[static_cast<std::size_t>(pos_mod(i - core_start_, L))]);
  }
  if (i < core_end()) return digit(core_[static_cast<std::size_t>(i - core_start_)]);
  auto R = static_cast<std::int64_t>(right_.size());
  return digit(right_[static_cast<std::size_t>(pos_mod(i - core_end(), R))]);
}

std::string SftPoint::window(std::int64_t lo, std::int64_t hi) const {
  std::string w;
  w.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t i = lo; i <= hi; ++i) w.push_back(to_digit(symbol_at(i)));
  return w;
}

std::string SftPoint::serialize() const {
  return left_ + "|" + core_ + "@" + std::to_string(core_start_) + "|" + right_;
}

SftPoint SftPoint::parse(SpacePtr space, const std::string& text) {
  auto p1 = text.find('|');
  auto p2 = text.rfind('|');
  if (p1 == std::string::npos || p2 == p1) throw SftError("bad point literal");
  std::string mid = text.substr(p1 + 1, p2 - p1 - 1);
  auto at = mid.find('@');
  if (at == std::string::npos) throw SftError("bad point literal (missing @)");
  return SftPoint(std::move(space), text.substr(0, p1), mid.substr(0, at),
                  std::stoll(mid.substr(at + 1)), text.substr(p2 + 1));
}

SftPoint shift(const SftPoint& x, std::int64_t n) {
  SftPoint y = x;
  y.core_start_ -= n;
  return y;
}

SftPoint periodic_point(SpacePtr space, const std::string& word) {
  return SftPoint(std::move(space), word, "", 0, word);
}

namespace {

// Window beyond which two eventually periodic points agreeing everywhere
// inside must agree everywhere.
std::int64_t agreement_bound(const SftPoint& x, const SftPoint& y) {
  auto lx = static_cast<std::int64_t>(x.left_period().size());
  auto ly = static_cast<std::int64_t>(y.left_period().size());
  auto rx = static_cast<std::int64_t>(x.right_period().size());
  auto ry = static_cast<std::int64_t>(y.right_period().size());
  std::int64_t off = std::max({std::llabs(x.core_start()), std::llabs(y.core_start()),
                               std::llabs(x.core_end()), std::llabs(y.core_end())});
  return off + lx * ly + rx * ry + 1;
}

}  // namespace

double metric(const SftPoint& x, const SftPoint& y) {
  if (!(*x.space() == *y.space())) throw SftError("points from different spaces");
  const std::int64_t bound = agreement_bound(x, y);
  for (std::int64_t n = 0; n <= bound; ++n) {
    if (x.symbol_at(n) != y.symbol_at(n) || x.symbol_at(-n) != y.symbol_at(-n))
      return std::pow(x.space()->lambda(), static_cast<double>(n));
  }
  return 0.0;
}

bool same_point(const SftPoint& x, const SftPoint& y) { return metric(x, y) == 0.0; }

bool in_local_stable(const SftPoint& x, const SftPoint& y) {
  const std::int64_t bound = agreement_bound(x, y);
  for (std::int64_t i = 0; i <= bound; ++i)
    if (x.symbol_at(i) != y.symbol_at(i)) return false;
  return true;
}

bool in_local_unstable(const SftPoint& x, const SftPoint& y) {
  const std::int64_t bound = agreement_bound(x, y);
  for (std::int64_t i = 0; i <= bound; ++i)
    if (x.symbol_at(-i) != y.symbol_at(-i)) return false;
  return true;
}

SftPoint bracket(const SftPoint& x, const SftPoint& z) {
  if (!(*x.space() == *z.space())) throw SftError("points from different spaces");
  if (x.symbol_at(0) != z.symbol_at(0))
    throw SftError("bracket undefined: x_0 != z_0");
  const std::int64_t lo = std::min<std::int64_t>(0, z.core_start());
  const std::int64_t hi = std::max<std::int64_t>(0, x.core_end());
  std::string core;
  core.reserve(static_cast<std::size_t>(hi - lo));
  for (std::int64_t i = lo; i < hi; ++i)
    core.push_back(to_digit(i < 0 ? z.symbol_at(i) : x.symbol_at(i)));
  // Rotate periods so their phases line up with the new core window.
  const auto& zl = z.left_period();
  const auto& xr = x.right_period();
  auto L = static_cast<std::int64_t>(zl.size());
  auto R = static_cast<std::int64_t>(xr.size());
  std::string left(zl.size(), '0'), right(xr.size(), '0');
  for (std::int64_t j = 0; j < L; ++j)
    left[static_cast<std::size_t>(j)] =
        zl[static_cast<std::size_t>(pos_mod(j + lo - z.core_start(), L))];
  for (std::int64_t j = 0; j < R; ++j)
    right[static_cast<std::size_t>(j)] =
        xr[static_cast<std::size_t>(pos_mod(j + hi - x.core_end(), R))];
  return SftPoint(x.space(), left, core, lo, right);
}

double stable_contraction_check(const SftPoint& x, const SftPoint& y, int n) {
  if (n < 0) throw SftError("n must be >= 0");
  if (!in_local_stable(x, y)) throw SftError("y not in W^s_loc(x)");
  return metric(shift(x, n), shift(y, n));
}

std::optional<SftPoint> stable_partner(const SftPoint& x, int depth) {
  if (depth < 1) throw SftError("depth must be >= 1");
  const auto& sp = *x.space();
  const std::int64_t pos = -static_cast<std::int64_t>(depth);
  const int old = x.symbol_at(pos);
  const int succ = x.symbol_at(pos + 1);
  int b = -1;
  for (int s = 0; s < sp.alphabet_size(); ++s)
    if (s != old && sp.allowed(s, succ)) { b = s; break; }
  if (b < 0) return std::nullopt;
  const std::int64_t hi = std::max(x.core_end(), pos + 1);
  std::string core(1, static_cast<char>('0' + b));
  for (std::int64_t i = pos + 1; i < hi; ++i)
    core.push_back(static_cast<char>('0' + x.symbol_at(i)));
  const auto& xr = x.right_period();
  auto R = static_cast<std::int64_t>(xr.size());
  std::string right(xr.size(), '0');
  for (std::int64_t j = 0; j < R; ++j)
    right[static_cast<std::size_t>(j)] =
        xr[static_cast<std::size_t>(pos_mod(j + hi - x.core_end(), R))];
  const std::string& cyc = sp.canonical_cycle();
  std::string conn = sp.connector(digit(cyc.back()), b);
  return SftPoint(x.space(), cyc, conn + core,
                  pos - static_cast<std::int64_t>(conn.size()), right);
}

std::optional<SftPoint> unstable_partner(const SftPoint& x, int depth) {
  if (depth < 1) throw SftError("depth must be >= 1");
  const auto& sp = *x.space();
  const std::int64_t pos = depth;
  const int old = x.symbol_at(pos);
  const int pred = x.symbol_at(pos - 1);
  int b = -1;
  for (int s = 0; s < sp.alphabet_size(); ++s)
    if (s != old && sp.allowed(pred, s)) { b = s; break; }
  if (b < 0) return std::nullopt;
  const std::int64_t lo = std::min(x.core_start(), pos);
  std::string core;
  for (std::int64_t i = lo; i < pos; ++i)
    core.push_back(static_cast<char>('0' + x.symbol_at(i)));
  core.push_back(static_cast<char>('0' + b));
  const auto& xl = x.left_period();
  auto L = static_cast<std::int64_t>(xl.size());
  std::string left(xl.size(), '0');
  for (std::int64_t j = 0; j < L; ++j)
    left[static_cast<std::size_t>(j)] =
        xl[static_cast<std::size_t>(pos_mod(j + lo - x.core_start(), L))];
  const std::string& cyc = sp.canonical_cycle();
  std::string conn = sp.connector(b, digit(cyc.front()));
  return SftPoint(x.space(), left, core + conn, lo, cyc);
}

SftPoint closing(const SftPoint& x, int k) {
  if (k < 1) throw SftError("closing requires k >= 1");
  if (x.symbol_at(0) != x.symbol_at(k))
    throw SftError("no shadowing: d(x, f^k x) >= 1");
  return periodic_point(x.space(), x.window(0, k - 1));
}

std::vector<PeriodicOrbitPoint> periodic_points(const SpacePtr& space, int k_max,
                                                std::size_t budget) {
  if (k_max < 1) throw SftError("k_max must be >= 1");
  const auto& sp = *space;
  const int k = sp.alphabet_size();
  std::vector<PeriodicOrbitPoint> out;
  for (int len = 1; len <= k_max; ++len) {
    std::string w(static_cast<std::size_t>(len), '0');
    std::vector<int> idx(static_cast<std::size_t>(len), -1);
    int pos = 0;
    while (pos >= 0) {
      if (pos == len) {
        if (sp.allowed(digit(w[static_cast<std::size_t>(len - 1)]), digit(w[0]))) {
          // Keep only words of least period exactly len.
          bool primitive = true;
          for (int d = 1; d < len; ++d) {
            if (len % d) continue;
            bool rep = true;
            for (int i = d; i < len && rep; ++i)
              rep = w[static_cast<std::size_t>(i)] == w[static_cast<std::size_t>(i - d)];
            if (rep) { primitive = false; break; }
          }
          if (primitive) {
            if (out.size() >= budget) throw SftError("periodic enumeration budget exceeded");
            out.push_back({periodic_point(space, w), len});
          }
        }
        --pos;
        continue;
      }
      int s = ++idx[static_cast<std::size_t>(pos)];
      if (s >= k) {
        idx[static_cast<std::size_t>(pos)] = -1;
        --pos;
        continue;
      }
      if (pos > 0 && !sp.allowed(digit(w[static_cast<std::size_t>(pos - 1)]), s)) continue;
      w[static_cast<std::size_t>(pos)] = to_digit(s);
      ++pos;
    }
  }
  return out;
}

std::int64_t periodic_point_count(const SftSpace& space, int k) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> m =
      space.transition().cast<std::int64_t>();
  auto acc = m;
  for (int i = 1; i < k; ++i) acc = (acc * m).eval();
  return acc.trace();
}

std::vector<std::string> admissible_words(const SftSpace& space, int length,
                                          std::size_t budget) {
  std::vector<std::string> out;
  const int k = space.alphabet_size();
  std::string w(static_cast<std::size_t>(length), '0');
  std::vector<int> idx(static_cast<std::size_t>(length), -1);
  int pos = 0;
  while (pos >= 0) {
    if (pos == length) {
      if (out.size() >= budget) throw SftError("word enumeration budget exceeded");
      out.push_back(w);
      --pos;
      continue;
    }
    int s = ++idx[static_cast<std::size_t>(pos)];
    if (s >= k) {
      idx[static_cast<std::size_t>(pos)] = -1;
      --pos;
      continue;
    }
    if (pos > 0 && !space.allowed(digit(w[static_cast<std::size_t>(pos - 1)]), s)) continue;
    w[static_cast<std::size_t>(pos)] = to_digit(s);
    ++pos;
  }
  return out;
}

SftPoint dense_orbit_point(const SpacePtr& space, int depth_L, std::size_t budget) {
  if (depth_L < 0) throw SftError("depth must be >= 0");
  const auto& sp = *space;
  const int len = 2 * depth_L + 1;
  double count_est = std::pow(static_cast<double>(sp.alphabet_size()), len);
  if (count_est * len > static_cast<double>(budget))
    throw SftError("dense orbit budget exceeded");
  auto words = admissible_words(sp, len, budget);
  std::string core;
  for (const auto& w : words) {
    if (!core.empty()) core += sp.connector(digit(core.back()), digit(w.front()));
    core += w;
  }
  const std::string& cyc = sp.canonical_cycle();
  // Close both tails onto the canonical cycle.
  std::string pre = sp.connector(digit(cyc.back()), digit(core.front()));
  std::string post = sp.connector(digit(core.back()), digit(cyc.front()));
  core = pre + core + post;
  auto start = static_cast<std::int64_t>(pre.size());
  return SftPoint(space, cyc, core, -start, cyc);
}

MarkovMeasure parry_measure(const SpacePtr& space) {
  const auto& sp = *space;
  const int k = sp.alphabet_size();
  Eigen::MatrixXd m = sp.transition().cast<double>();
  // Power iteration with deterministic all-ones start; primitive matrices
  // converge geometrically.
  auto perron = [&](const Eigen::MatrixXd& a) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(k);
    double rho = 0;
    for (int it = 0; it < 100000; ++it) {
      Eigen::VectorXd w = a * v;
      double rho_new = w.sum() / v.sum();
      w /= w.maxCoeff();
      double delta = (w - v).cwiseAbs().maxCoeff();
      v = w;
      rho = rho_new;
      if (delta < 1e-13 * v.maxCoeff() && it > 3) break;
    }
    return std::make_pair(rho, v);
  };
  auto [rho, v] = perron(m);
  auto [rho_l, u] = perron(m.transpose());
  (void)rho_l;
  MarkovMeasure mu;
  mu.space = space;
  mu.perron_root = rho;
  mu.kernel = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (sp.transition()(i, j)) mu.kernel(i, j) = v(j) / (rho * v(i));
  Eigen::VectorXd pi = u.cwiseProduct(v);
  mu.stationary = pi / pi.sum();
  return mu;
}

double cylinder_measure(const MarkovMeasure& mu, const std::string& word) {
  if (word.empty()) return 1.0;
  double p = mu.stationary(digit(word[0]));
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    p *= mu.kernel(digit(word[i]), digit(word[i + 1]));
  return p;
}

std::vector<SftPoint> sample(const MarkovMeasure& mu, std::uint64_t rng_seed,
                             int count, int window) {
  const auto& sp = *mu.space;
  const int k = sp.alphabet_size();
  // Backward kernel for the two-sided stationary chain.
  Eigen::MatrixXd back(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      back(i, j) = mu.stationary(j) * mu.kernel(j, i) / mu.stationary(i);
  Rng rng = Rng::labeled(rng_seed, "sft.parry.sample");
  auto draw = [&](const Eigen::VectorXd& p) {
    double u = rng.uniform(), acc = 0;
    for (int i = 0; i < k; ++i) {
      acc += p(i);
      if (u < acc) return i;
    }
    return k - 1;
  };
  std::vector<SftPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    std::string w(static_cast<std::size_t>(2 * window + 1), '0');
    int mid = window;
    int s0 = draw(mu.stationary);
    w[static_cast<std::size_t>(mid)] = to_digit(s0);
    int s = s0;
    for (int i = mid + 1; i <= 2 * window; ++i) {
      s = draw(mu.kernel.row(s).transpose());
      w[static_cast<std::size_t>(i)] = to_digit(s);
    }
    s = s0;
    for (int i = mid - 1; i >= 0; --i) {
      s = draw(back.row(s).transpose());
      w[static_cast<std::size_t>(i)] = to_digit(s);
    }
    const std::string& cyc = sp.canonical_cycle();
    std::string pre = sp.connector(digit(cyc.back()), digit(w.front()));
    std::string post = sp.connector(digit(w.back()), digit(cyc.front()));
    std::string core = pre + w + post;
    auto start = -static_cast<std::int64_t>(pre.size()) - window;
    out.emplace_back(mu.space, cyc, core, start, cyc);
  }
  return out;
}

}  // namespace cocyclelab::sft
