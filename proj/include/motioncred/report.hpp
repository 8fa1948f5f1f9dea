#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "motioncred/experiment.hpp"

namespace motioncred {

/// `model,activity,mask,condition,n,mean,std,bin00..bin19`
void write_probability_stats_csv(std::ostream& out, const ExperimentResult& r);
/// `activity,mask,n,accuracy_before,accuracy_after,misclassification_error,success_rate,mean_queries`
void write_attack_summary_csv(std::ostream& out, const ExperimentResult& r);
/// `activity,mask,tau,total_samples,misclassified,misclassified_above_threshold,pass_rate`,
/// per detail activity plus one `all` row per mask.
void write_gate_stats_csv(std::ostream& out, const ExperimentResult& r);

/// Writes every CSV, the threshold table and the six SVG figures into `dir`.
/// Returns the written file names.
std::vector<std::string> write_report_bundle(const std::string& dir, const ExperimentResult& r,
                                             const ExperimentConfig& cfg);

}  // namespace motioncred
