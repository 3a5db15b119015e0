#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qcorr {

/// Permutation sigma of (1..n), stored as the chronological images
/// sigma(1..n): the trace string Tr[B_{sigma(n)} ... B_{sigma(1)} rho] read
/// outward from the state, operator adjacent to rho first.
///
/// For display and serialization the operators are listed in trace-string
/// order instead, leftmost first (the superscript convention), so the
/// string "213" names Tr[B_2 B_1 B_3 rho], i.e. images (3,1,2).
class Permutation {
 public:
  /// images[i-1] = sigma(i), values a bijection on 1..n.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);

  /// Parses trace-string order: contiguous digits ("213") or
  /// whitespace-separated integers ("12 11 ...").
  static Permutation from_trace_string(const std::string& s);

  int order() const { return static_cast<int>(images_.size()); }
  int image(int i) const { return images_[i - 1]; }  // sigma(i), 1-based
  const std::vector<int>& images() const { return images_; }

  /// sigma(n) .. sigma(1): digits when n <= 9, else space-separated.
  std::string trace_string() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> images_;
};

/// Number of time contours needed to host the correlation: the count of
/// local maxima of the chronological reading 0, sigma(1), ..., sigma(n), 0
/// (the sentinels place the state at the earliest contour time). Rank 1 is
/// a contour-time-ordered correlation; rank k >= 2 is a rank-k OTOC.
int rank(const Permutation& sigma);

/// rank(sigma) == 1.
bool is_contour_ordered(const Permutation& sigma);

/// sigma~(i) = sigma(n-i+1). An involution; preserves rank.
Permutation reverse_sigma(const Permutation& sigma);

/// Label map of the particle-hole transform: the reversed string, same
/// times. Rank is unchanged.
Permutation c_transform_label(const Permutation& sigma);

struct RankHistogram {
  int order = 0;
  std::map<int, std::uint64_t> counts;  // rank -> number of permutations

  std::uint64_t total() const;
};

/// Exhaustive rank census over all n! permutations; n <= 8 (guarded).
/// counts[1] is always 2^{n-1}.
RankHistogram enumerate_ranks(int order);

enum class EtaSign : std::uint8_t { Plus, Minus };

inline int sign_value(EtaSign s) { return s == EtaSign::Plus ? +1 : -1; }

/// Signature (eta_1, ..., eta_n) selecting anti-commutator (+) or
/// commutator (-) nesting; eta_n is always +, the top channel being fixed
/// by the trace. Displayed top-first: "+-+" means eta_3=+, eta_2=-, eta_1=+
/// (the order the superoperators appear in the trace).
class EtaVector {
 public:
  explicit EtaVector(std::vector<EtaSign> signs);

  /// Parses the top-first display form over {+,-}, e.g. "+-+".
  static EtaVector parse(const std::string& display);

  int order() const { return static_cast<int>(signs_.size()); }
  EtaSign sign(int j) const { return signs_[j - 1]; }  // eta_j, 1-based
  const std::vector<EtaSign>& signs() const { return signs_; }

  std::string display() const;  // top-first, e.g. "+-+"

  /// prod_j eta_j as +-1.
  int sign_product() const;
  /// Count of + among eta_1..eta_{n-1}.
  int plus_count_below_top() const;

  bool operator==(const EtaVector&) const = default;

 private:
  std::vector<EtaSign> signs_;
};

struct ExpansionTerm {
  Permutation sigma;
  std::complex<double> coeff;
};

/// Expands the nested-superoperator correlation into the Wightman basis.
/// For j = 1..n-1 the superoperator contributes its operator either left of
/// the operand (factor -i for eta_j = -, 1/2 for +) or right of it (factor
/// +i for -, 1/2 for +); the top operator multiplies once from the left with
/// factor 1. The 2^{n-1} resulting labels are exactly the rank-1
/// permutations, each appearing once, with |coeff| = 2^{-p} where p counts
/// the + signs below the top.
std::vector<ExpansionTerm> expand_ctoc(const EtaVector& eta);

/// A canonicalized label produced by the time-reversal or chiral transform:
/// slot i of the new label carries the original operator time_source[i-1]
/// at its negated time, t'_i = -t_{time_source[i-1]}, restoring strictly
/// increasing times.
struct LabelTransform {
  Permutation sigma;
  std::vector<int> time_source;

  std::vector<double> map_times(const std::vector<double>& times) const;
  /// Relabels any per-slot payload (observable labels, parities, ...).
  template <typename T>
  std::vector<T> map_slots(const std::vector<T>& slots) const {
    std::vector<T> out;
    out.reserve(time_source.size());
    for (int src : time_source) out.push_back(slots[src - 1]);
    return out;
  }
};

/// Time reversal: sigma'(i) = n+1 - sigma(n+1-i), t'_i = -t_{n+1-i}.
/// An involution on (sigma, time sign).
LabelTransform t_transform_label(const Permutation& sigma);

/// Chiral transform: sigma'(i) = n+1 - sigma(i), t'_i = -t_{n+1-i}.
LabelTransform s_transform_label(const Permutation& sigma);

enum class TransformMode { T, S };

/// Rank change under the T or S label map, decided by occupancy of the two
/// outer contour branches. A branch is occupied when it holds an operator
/// strictly below its turning point: both occupied -> +1, exactly one -> 0,
/// neither -> -1. For n = 1 the lone operator sits on exactly one outer
/// branch, so the rank is unchanged. T and S always change rank by the same
/// amount (their labels differ, their ranks do not).
int predict_rank_delta(const Permutation& sigma, TransformMode mode);

}  // namespace qcorr
