#include "qcorr/contour.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qcorr {

namespace {

void validate_images(const std::vector<int>& images) {
  const int n = static_cast<int>(images.size());
  if (n < 1) throw std::invalid_argument("Permutation: order must be >= 1");
  std::vector<bool> seen(n + 1, false);
  for (int v : images) {
    if (v < 1 || v > n || seen[v]) {
      throw std::invalid_argument("Permutation: images are not a bijection on 1.." +
                                  std::to_string(n));
    }
    seen[v] = true;
  }
}

}  // namespace

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  validate_images(images_);
}

Permutation Permutation::identity(int n) {
  std::vector<int> images(n);
  std::iota(images.begin(), images.end(), 1);
  return Permutation(std::move(images));
}

Permutation Permutation::from_trace_string(const std::string& s) {
  std::vector<int> trace_order;
  if (s.find_first_of(" \t,") != std::string::npos) {
    std::string spaced = s;
    std::replace_if(
        spaced.begin(), spaced.end(), [](char c) { return c == ',' || c == '\t'; },
        ' ');
    std::istringstream in(spaced);
    int v = 0;
    while (in >> v) trace_order.push_back(v);
  } else {
    for (char c : s) {
      if (c < '1' || c > '9') {
        throw std::invalid_argument("Permutation: bad trace string '" + s + "'");
      }
      trace_order.push_back(c - '0');
    }
  }
  // Trace string lists sigma(n)..sigma(1); flip back to images.
  std::reverse(trace_order.begin(), trace_order.end());
  return Permutation(std::move(trace_order));
}

std::string Permutation::trace_string() const {
  const int n = order();
  std::string out;
  for (int i = n; i >= 1; --i) {
    if (n > 9 && i < n) out += ' ';
    out += std::to_string(image(i));
  }
  return out;
}

int rank(const Permutation& sigma) {
  const int n = sigma.order();
  auto at = [&](int i) { return (i == 0 || i == n + 1) ? 0 : sigma.image(i); };
  int maxima = 0;
  for (int i = 1; i <= n; ++i) {
    if (at(i - 1) < at(i) && at(i) > at(i + 1)) ++maxima;
  }
  return maxima;
}

bool is_contour_ordered(const Permutation& sigma) { return rank(sigma) == 1; }

Permutation reverse_sigma(const Permutation& sigma) {
  std::vector<int> images(sigma.images().rbegin(), sigma.images().rend());
  return Permutation(std::move(images));
}

Permutation c_transform_label(const Permutation& sigma) {
  return reverse_sigma(sigma);
}

std::uint64_t RankHistogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& [r, c] : counts) sum += c;
  return sum;
}

RankHistogram enumerate_ranks(int order) {
  if (order < 1 || order > 8) {
    throw std::invalid_argument(
        "enumerate_ranks: order must be in 1..8 (factorial growth)");
  }
  RankHistogram hist;
  hist.order = order;
  std::vector<int> images(order);
  std::iota(images.begin(), images.end(), 1);
  do {
    ++hist.counts[rank(Permutation(images))];
  } while (std::next_permutation(images.begin(), images.end()));
  return hist;
}

EtaVector::EtaVector(std::vector<EtaSign> signs) : signs_(std::move(signs)) {
  if (signs_.empty()) throw std::invalid_argument("EtaVector: order must be >= 1");
  if (signs_.back() != EtaSign::Plus) {
    throw std::invalid_argument("EtaVector: the top sign eta_n must be +");
  }
}

EtaVector EtaVector::parse(const std::string& display) {
  std::vector<EtaSign> signs;
  signs.reserve(display.size());
  // Display is top-first; storage is eta_1 first.
  for (auto it = display.rbegin(); it != display.rend(); ++it) {
    if (*it == '+') {
      signs.push_back(EtaSign::Plus);
    } else if (*it == '-') {
      signs.push_back(EtaSign::Minus);
    } else {
      throw std::invalid_argument("EtaVector: bad character in '" + display + "'");
    }
  }
  return EtaVector(std::move(signs));
}

std::string EtaVector::display() const {
  std::string out;
  out.reserve(signs_.size());
  for (auto it = signs_.rbegin(); it != signs_.rend(); ++it) {
    out += (*it == EtaSign::Plus) ? '+' : '-';
  }
  return out;
}

int EtaVector::sign_product() const {
  int p = 1;
  for (EtaSign s : signs_) p *= sign_value(s);
  return p;
}

int EtaVector::plus_count_below_top() const {
  int count = 0;
  for (std::size_t i = 0; i + 1 < signs_.size(); ++i) {
    if (signs_[i] == EtaSign::Plus) ++count;
  }
  return count;
}

std::vector<ExpansionTerm> expand_ctoc(const EtaVector& eta) {
  const int n = eta.order();
  constexpr std::complex<double> kI{0.0, 1.0};
  std::vector<ExpansionTerm> terms;
  terms.reserve(std::size_t{1} << (n - 1));
  // Bit b of the mask sends operator b+1 to the right of the operand.
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> left, right;
    std::complex<double> coeff{1.0, 0.0};
    for (int j = 1; j <= n - 1; ++j) {
      const bool go_right = (mask >> (j - 1)) & 1u;
      if (eta.sign(j) == EtaSign::Plus) {
        coeff *= 0.5;
      } else {
        coeff *= go_right ? kI : -kI;
      }
      (go_right ? right : left).push_back(j);
    }
    // Chronological reading: left picks ascending, the top, right descending.
    std::vector<int> images = left;
    images.push_back(n);
    images.insert(images.end(), right.rbegin(), right.rend());
    terms.push_back(ExpansionTerm{Permutation(std::move(images)), coeff});
  }
  return terms;
}

std::vector<double> LabelTransform::map_times(const std::vector<double>& times) const {
  if (times.size() != time_source.size()) {
    throw std::invalid_argument("LabelTransform: time vector length mismatch");
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (int src : time_source) out.push_back(-times[src - 1]);
  return out;
}

LabelTransform t_transform_label(const Permutation& sigma) {
  const int n = sigma.order();
  std::vector<int> images(n), source(n);
  for (int i = 1; i <= n; ++i) {
    images[i - 1] = n + 1 - sigma.image(n + 1 - i);
    source[i - 1] = n + 1 - i;
  }
  return LabelTransform{Permutation(std::move(images)), std::move(source)};
}

LabelTransform s_transform_label(const Permutation& sigma) {
  const int n = sigma.order();
  std::vector<int> images(n), source(n);
  for (int i = 1; i <= n; ++i) {
    images[i - 1] = n + 1 - sigma.image(i);
    source[i - 1] = n + 1 - i;
  }
  return LabelTransform{Permutation(std::move(images)), std::move(source)};
}

int predict_rank_delta(const Permutation& sigma, TransformMode /*mode*/) {
  const int n = sigma.order();
  if (n == 1) return 0;
  const bool first_forward_occupied = sigma.image(1) < sigma.image(2);
  const bool last_backward_occupied = sigma.image(n - 1) > sigma.image(n);
  return -1 + (first_forward_occupied ? 1 : 0) + (last_backward_occupied ? 1 : 0);
}

}  // namespace qcorr
