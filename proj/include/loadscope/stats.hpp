#pragma once

#include <span>
#include <vector>

namespace loadscope::stats {

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

/// Upper-tail probabilities.
double chi_squared_sf(double x, double df);
double f_sf(double x, double df1, double df2);
/// Two-sided p-value of a t statistic.
double student_t_two_sided(double t, double df);

double mean(std::span<const double> v);
/// Population variance (1/N).
double variance(std::span<const double> v);
/// Spearman rank correlation with average ranks on ties.
double spearman(std::span<const double> a, std::span<const double> b);
/// Ranks 1..n, ties receive the average rank.
std::vector<double> average_ranks(std::span<const double> v);
double quantile(std::vector<double> v, double p);

}  // namespace loadscope::stats
