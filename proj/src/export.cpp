#include "sgdlab/export.hpp"

#include "sgdlab/csvio.hpp"

#include <json.hpp>

namespace sgdlab {

void export_trajectories_csv(const std::string& path, const Family& fam, const ChainConfig& cfg,
                             std::int64_t n_trajectories)
{
    nlohmann::json header;
    header["kind"] = "trajectories";
    header["family"] = fam.id;
    header["eta"] = cfg.eta;
    header["n_steps"] = cfg.n_steps;
    header["x0"] = cfg.x0;
    header["seed"] = cfg.seed;
    header["n_trajectories"] = n_trajectories;
    header["build"] = build_id();
    CsvWriter csv(path, header);
    csv.columns({"trajectory_id", "n", "x"});
    std::vector<double> buf;
    for (std::int64_t i = 0; i < n_trajectories; ++i) {
        run_trajectory(fam, cfg, static_cast<std::uint64_t>(i), false, &buf);
        for (std::size_t k = 0; k < buf.size(); ++k) {
            csv.cell(i);
            csv.cell(static_cast<std::int64_t>(k));
            csv.cell(buf[k]);
            csv.end_row();
        }
    }
}

void export_estimates_csv(const std::string& path,
                          const std::vector<std::pair<std::string, EstimateWithError>>& rows)
{
    nlohmann::json header;
    header["kind"] = "estimates";
    header["build"] = build_id();
    CsvWriter csv(path, header);
    csv.columns({"label", "value", "std_error", "n_samples"});
    for (const auto& [label, est] : rows) {
        csv.cell(label);
        csv.cell(est.value);
        csv.cell(est.std_error);
        csv.cell(est.n_samples);
        csv.end_row();
    }
}

void export_em_paths_csv(const std::string& path, const Family& fam, const SdeConfig& cfg,
                         std::int64_t n_paths)
{
    nlohmann::json header;
    header["kind"] = "sde_paths";
    header["family"] = fam.id;
    header["eta"] = cfg.eta;
    header["dt"] = cfg.dt;
    header["t_end"] = cfg.t_end;
    header["x0"] = cfg.x0;
    header["seed"] = cfg.seed;
    header["n_paths"] = n_paths;
    header["build"] = build_id();
    CsvWriter csv(path, header);
    csv.columns({"path_id", "t", "x"});
    std::vector<double> trace;
    for (std::int64_t p = 0; p < n_paths; ++p) {
        em_path(fam, cfg, static_cast<std::uint64_t>(p), false, nullptr, &trace);
        const double dt = cfg.t_end / static_cast<double>(trace.size() - 1);
        for (std::size_t k = 0; k < trace.size(); ++k) {
            csv.cell(p);
            csv.cell(dt * static_cast<double>(k));
            csv.cell(trace[k]);
            csv.end_row();
        }
    }
}

} // namespace sgdlab
