#pragma once

#include "sgdlab/sde.hpp"
#include "sgdlab/sgd.hpp"

#include <cstdint>
#include <string>

namespace sgdlab {

// Full chain paths: one row per (trajectory_id, n, x_n).
void export_trajectories_csv(const std::string& path, const Family& fam, const ChainConfig& cfg,
                             std::int64_t n_trajectories);

// A batch of point estimates: rows (label, value, std_error, n_samples).
void export_estimates_csv(const std::string& path,
                          const std::vector<std::pair<std::string, EstimateWithError>>& rows);

// SDE sample paths: one row per (path_id, t, x).
void export_em_paths_csv(const std::string& path, const Family& fam, const SdeConfig& cfg,
                         std::int64_t n_paths);

} // namespace sgdlab
