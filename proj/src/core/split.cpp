#include "loadscope/core.hpp"

namespace loadscope {

void SplitSpec::validate() const {
  if (train.empty() || val.empty() || test.empty()) {
    throw Error(Errc::InvalidArgument, "split ranges must be non-empty");
  }
  if (!(train.last < val.first && val.last < test.first)) {
    throw Error(Errc::InvalidArgument, "split ranges must be disjoint and ordered train < val < test");
  }
}

DesignMatrix DesignMatrix::subset(std::span<const std::size_t> rows) const {
  DesignMatrix out;
  out.region = region;
  out.horizon = horizon;
  out.features.names = features.names;
  out.features.values = features.values.select_rows(rows);
  out.targets = targets.select_rows(rows);
  for (std::size_t r : rows) {
    out.issue_dates.push_back(issue_dates[r]);
    if (!provenance.empty()) out.provenance.push_back(provenance[r]);
  }
  return out;
}

void DesignMatrix::assert_no_leakage() const {
  for (std::size_t r = 0; r < provenance.size(); ++r) {
    if (provenance[r].max_source_date > issue_dates[r]) {
      throw Error(Errc::Internal, "leakage: row " + issue_dates[r].to_string() + " reads data dated " +
                                      provenance[r].max_source_date.to_string());
    }
  }
}

SplitResult split_by_dates(const DesignMatrix& matrix, const SplitSpec& spec) {
  std::vector<std::size_t> train, val, test;
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    Date d = matrix.issue_dates[r];
    if (spec.train.contains(d)) {
      train.push_back(r);
    } else if (spec.val.contains(d)) {
      val.push_back(r);
    } else if (spec.test.contains(d)) {
      test.push_back(r);
    } else {
      ++dropped;
    }
  }
  if (train.empty()) throw Error(Errc::EmptyPartition, "train");
  if (val.empty()) throw Error(Errc::EmptyPartition, "val");
  if (test.empty()) throw Error(Errc::EmptyPartition, "test");
  return {matrix.subset(train), matrix.subset(val), matrix.subset(test), dropped};
}

}  // namespace loadscope
