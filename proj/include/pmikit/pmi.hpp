#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "pmikit/prob.hpp"

namespace pmikit {

// What to do with a (w, c) pair that never co-occurs. Identity checks require
// strict: an undefined PMI entry there is a usage bug, not a zero. Matrix and
// embedding construction need a total matrix and use clamp, which substitutes
// a floor (default 0, the positive-PMI truncation) for undefined entries only;
// defined entries keep their value even below the floor.
enum class SupportPolicy { strict, clamp };

// pmi(w, c) = ln p(w,c) - ln p(w) - ln p(c) - shift, where w is the window
// side and c the center side. shift = ln k turns PMI into SPMI.
class PmiView {
 public:
  explicit PmiView(const ProbabilityModel& model, double shift = 0.0,
                   SupportPolicy policy = SupportPolicy::strict, double floor = 0.0);

  const ProbabilityModel& model() const { return *model_; }
  double shift() const { return shift_; }
  SupportPolicy policy() const { return policy_; }
  double floor() const { return floor_; }

  bool defined(WordId w, WordId c) const;
  // Undefined is a value here, independent of the policy.
  std::optional<double> value(WordId w, WordId c) const;
  // Defined entries only; throws PositivityError otherwise.
  double value_or_throw(WordId w, WordId c) const;

  // PMI of word w over the given contexts, in order. strict raises on the
  // first undefined entry; clamp substitutes the floor.
  Eigen::VectorXd column(WordId w, std::span<const WordId> support) const;

  PmiView with_shift(double shift) const;
  PmiView with_policy(SupportPolicy policy, double floor = 0.0) const;

 private:
  const ProbabilityModel* model_;
  double shift_;
  SupportPolicy policy_;
  double floor_;
};

struct PmiMatrix {
  Eigen::MatrixXd values;  // values(w, c); rows window words, columns centers
  double coverage = 0.0;   // fraction of entries with a defined PMI
  double shift = 0.0;
  SupportPolicy policy = SupportPolicy::clamp;
};

// Dense n x n PMI matrix under the view's policy. n^2 doubles must fit in
// max_bytes; beyond that the fix is a smaller vocabulary (min_count), so the
// error says so.
PmiMatrix pmi_matrix(const PmiView& view, std::size_t max_bytes = std::size_t{4} << 30);

// Binary layout: magic "PMIKITMX", u32 version, u64 n, f64 shift, u8 policy,
// then row-major f64 values.
void export_pmi_matrix(const std::filesystem::path& path, const PmiMatrix& matrix);
PmiMatrix import_pmi_matrix(const std::filesystem::path& path);

// Plain table for eyeballing; refuses n > 512.
void export_pmi_matrix_csv(const std::filesystem::path& path, const PmiMatrix& matrix);

}  // namespace pmikit
