#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "loadscope/core.hpp"
#include "loadscope/ingestion.hpp"

namespace loadscope {

inline constexpr int kMaxHorizon = 30;
inline constexpr int kHolidayDummies = 12;
inline constexpr int kBaseFeatureCount = 65;

/// Which optional feature families enter the design matrix.
struct FeatureSpec {
  bool use_economics = false;
  bool use_social = false;
  std::optional<int> social_k;  // nullopt = elbow selection
  int text_smoothing_window = 1;

  void validate() const;
  /// GBM, GBM-E, GBM-S or GBM-ES.
  std::string variant_name() const;
  static FeatureSpec from_variant(const std::string& name);
};

/// Mean temperature per (month, hour) over the training range of one city.
class Climatology {
 public:
  static Climatology fit(const HourlySeries& temperature, DateRange train);

  /// Throws Error(NoObservations) when the training range had no sample.
  double at(unsigned month, int hour) const;
  /// Like at(), but an unobserved month borrows the circularly nearest
  /// observed month for that hour (earlier month on ties). Throws
  /// Error(NoObservations) only when the hour was never observed.
  double nearest(unsigned month, int hour) const;
  bool has(unsigned month, int hour) const { return counts_[(month - 1) * 24 + static_cast<unsigned>(hour)] > 0; }

  const std::array<double, 12 * 24>& means() const { return means_; }
  const std::array<int, 12 * 24>& counts() const { return counts_; }
  static Climatology from_tables(const std::array<double, 12 * 24>& means, const std::array<int, 12 * 24>& counts) {
    Climatology c;
    c.means_ = means;
    c.counts_ = counts;
    return c;
  }

 private:
  std::array<double, 12 * 24> means_{};
  std::array<int, 12 * 24> counts_{};
};

double climatological_temperature(const AlignedPanel& panel, const std::string& city, unsigned month, int hour,
                                  DateRange train);

/// Holiday classes mapped onto the 12 dummy slots: sorted unique names from
/// the calendar, truncated to 12; unused slots stay zero.
struct HolidayClasses {
  std::vector<std::string> names;

  static HolidayClasses from_calendar(const std::vector<Holiday>& holidays);
  /// Slot index for a holiday name, or -1 when the class was truncated away.
  int slot_of(const std::string& name) const;
  std::string column_name(int slot) const;
};

/// Everything, besides the panel itself, that a feature row depends on.
/// Fitted on the training range only.
struct FeatureContext {
  std::map<std::string, Climatology> climatology;  // by region
  HolidayClasses holidays;
  std::vector<DailyFeatureSeries> centroids;       // social factors, full span

  static FeatureContext fit(const AlignedPanel& panel, DateRange train,
                            std::vector<DailyFeatureSeries> centroids = {});
};

std::vector<std::string> feature_names(const FeatureSpec& spec, const FeatureContext& context);

/// Features of one issue day; the target day is d + horizon and need not lie
/// inside the panel. Throws Error(InsufficientHistory) when day d (or the
/// smoothing window before it) is not observed.
std::vector<double> build_feature_row(const AlignedPanel& panel, const std::string& region, int horizon,
                                      const FeatureSpec& spec, const FeatureContext& context, Date issue_day,
                                      Provenance* provenance = nullptr);

/// One row per issue day d with d and d + horizon inside the panel.
DesignMatrix build_design_matrix(const AlignedPanel& panel, const std::string& region, int horizon,
                                 const FeatureSpec& spec, const FeatureContext& context);

// ---------------------------------------------------------------------------
// Ward clustering of textual feature series.

struct Merge {
  std::size_t left;   // cluster id: < n for items, n + i for merge i
  std::size_t right;
  double height;      // increase in total within-cluster sum of squares
  std::size_t size;
};

struct ClusterResult {
  std::vector<std::string> names;  // one per item (feature column)
  std::vector<Merge> merges;       // nondecreasing heights

  std::size_t items() const { return names.size(); }
  std::vector<double> heights() const;
  /// Cluster label per item after cutting at k clusters. Labels are numbered
  /// by first appearance in column order.
  std::vector<int> labels(std::size_t k) const;
};

/// Ward linkage on Euclidean distance between columns of `table`
/// (rows = days). Columns should be standardized.
ClusterResult cluster_textual_features(const NamedMatrix& table);

/// Total within-cluster sum of squares for k = 1..n clusters (index k - 1).
std::vector<double> within_cluster_profile(const std::vector<double>& heights);

/// Elbow: the k in [2, n - 1] maximizing W(k-1) - 2 W(k) + W(k+1); ties to
/// the smaller k.
int select_k_elbow(const std::vector<double>& heights);

struct Centroid {
  int cluster = 0;
  std::size_t medoid_column = 0;
  std::string medoid_name;
  std::vector<std::string> members;
  DailyFeatureSeries series;  // named "c<cluster>_<medoid>"
};

/// Medoid of each of k clusters (member minimizing summed squared distance
/// to the other members; ties to the earliest column).
std::vector<Centroid> extract_centroids(const ClusterResult& result, std::size_t k, const DailyTable& table);

/// Adjusted Rand index between two labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace loadscope
