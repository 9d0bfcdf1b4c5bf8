#include "tauc/evaluation.hpp"
#include "tauc/io.hpp"
#include "tauc/pipeline.hpp"
#include "tauc/svg.hpp"
#include "tauc/tracker.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int cmd_simulate(const std::string& scenario_arg, const std::string& out_dir) {
    tauc::Scenario sc = fs::exists(scenario_arg)
                            ? tauc::load_scenario(scenario_arg)
                            : tauc::builtin_scenario(scenario_arg);
    tauc::PlanarSimulator sim(sc.scene, sc.spec, sc.rates, sc.intrinsics,
                              sc.patch_center_px);
    tauc::write_dataset(sim, out_dir);
    std::cerr << "wrote " << sim.frame_times().size() << " frames to " << out_dir
              << "\n";
    return 0;
}

int cmd_estimate(const std::string& dataset_dir, const std::string& out_file,
                 const tauc::RunConfig& cfg, const std::string& diagnostics_file) {
    const tauc::EstimateResult result =
        tauc::run_estimate_on_dataset(dataset_dir, cfg);

    tauc::write_trajectory_csv(out_file, result.trajectory);
    if (!diagnostics_file.empty())
        tauc::write_diagnostics_csv(diagnostics_file, result.diagnostics);

    if (result.tracker_fps > 0)
        std::fprintf(stderr, "tracker throughput: %.1f fps\n", result.tracker_fps);
    if (result.tracking_lost) {
        std::fprintf(stderr, "tracking lost at t = %.3f s; wrote partial output\n",
                     result.lost_at.seconds());
        return 3;
    }
    if (result.trajectory.points.empty()) {
        std::fprintf(stderr, "no estimates produced (no posed, gated window)\n");
        return 3;
    }
    return 0;
}

int cmd_evaluate(const std::string& estimate_file, const std::string& truth_file,
                 const std::string& errors_file, const std::string& table_file) {
    const tauc::Trajectory estimate =
        tauc::read_trajectory_csv(estimate_file, "estimate");
    const tauc::Trajectory truth =
        tauc::read_trajectory_csv(truth_file, "ground_truth");

    const tauc::AlignedPair pair = tauc::align_rigid(estimate, truth);
    const tauc::AteResult result = tauc::ate(pair);

    tauc::Trajectory truth_window;
    truth_window.points = pair.truth;
    const double duration = (pair.window.end - pair.window.start).seconds();
    const double path_m = tauc::path_length(truth_window);

    std::printf("ATE: %.2f cm\n", result.ate_cm);
    std::printf("duration: %.2f s\n", duration);
    std::printf("path length: %.2f m\n", path_m);
    if (!errors_file.empty()) tauc::write_error_csv(errors_file, result.errors_cm);
    if (!table_file.empty()) {
        // one row per evaluated sequence; builds up the summary table
        const bool fresh = !fs::exists(table_file);
        std::ofstream table(table_file, std::ios::app);
        if (!table) throw std::runtime_error("cannot open " + table_file);
        if (fresh) table << "sequence,duration_s,path_m,ate_cm\n";
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%.2f,%.2f,%.2f\n",
                      fs::path(estimate_file).stem().string().c_str(), duration,
                      path_m, result.ate_cm);
        table << row;
    }
    return 0;
}

int cmd_plot(const std::string& out_svg, const std::vector<std::string>& csvs,
             const std::string& title) {
    std::vector<tauc::PlotSeries> series;
    for (const auto& file : csvs) {
        std::ifstream probe(file);
        if (!probe) throw std::runtime_error("cannot open " + file);
        std::string header;
        std::getline(probe, header);
        probe.close();

        const std::string stem = fs::path(file).stem().string();
        if (header == "t_ns,err_cm") {
            const tauc::TimedSeries<double> err = tauc::read_error_csv(file);
            tauc::PlotSeries s;
            s.name = stem;
            for (std::size_t i = 0; i < err.size(); ++i) {
                s.x.push_back(err.time(i).seconds());
                s.y.push_back(err.value(i));
            }
            series.push_back(std::move(s));
        } else if (header == "t_ns,x,y,z") {
            const tauc::Trajectory traj = tauc::read_trajectory_csv(file, stem);
            const char* axes[3] = {" x", " y", " z"};
            for (int a = 0; a < 3; ++a) {
                tauc::PlotSeries s;
                s.name = stem + axes[a];
                for (std::size_t i = 0; i < traj.points.size(); ++i) {
                    s.x.push_back(traj.points.time(i).seconds());
                    s.y.push_back(traj.points.value(i)(a));
                }
                series.push_back(std::move(s));
            }
        } else {
            throw std::runtime_error("unrecognized CSV header in " + file);
        }
    }
    tauc::write_line_plot_svg(out_svg, title, "time (s)", "value", series);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar-patch visual-inertial depth and trajectory estimation"};
    app.require_subcommand(1);

    std::string scenario, out_dir;
    auto* sim = app.add_subcommand("simulate",
                                   "render a synthetic dataset from a scenario");
    sim->add_option("scenario", scenario,
                    "scenario file or builtin name (approach-2m, ...)")
        ->required();
    sim->add_option("out_dir", out_dir, "output dataset directory")->required();

    std::string dataset, out_traj, config_file, diagnostics_file;
    tauc::RunConfig cfg;
    bool oracle_flag = false;
    double decimate = 0;
    auto* est = app.add_subcommand("estimate", "run the estimation pipeline");
    est->add_option("dataset", dataset, "dataset directory")->required();
    est->add_option("out", out_traj, "output trajectory CSV")->required();
    est->add_option("--config", config_file, "key = value config overrides");
    est->add_option("--diagnostics", diagnostics_file, "per-window diagnostics CSV");
    est->add_flag("--oracle-foc", oracle_flag,
                  "bypass the tracker and use oracle_foc.csv");
    est->add_option("--decimate", decimate, "tracker output rate (Hz)");

    std::string est_file, truth_file, errors_file, table_file;
    auto* eval = app.add_subcommand("evaluate", "compare against ground truth");
    eval->add_option("estimate", est_file, "estimate trajectory CSV")->required();
    eval->add_option("truth", truth_file, "ground-truth trajectory CSV")->required();
    eval->add_option("--errors", errors_file, "per-sample l2 error CSV");
    eval->add_option("--append-table", table_file,
                     "append a sequence row to a summary ATE table CSV");

    std::string out_svg, plot_title = "trajectory error";
    std::vector<std::string> plot_csvs;
    auto* plot = app.add_subcommand("plot", "render CSV series to a static SVG");
    plot->add_option("out", out_svg, "output SVG file")->required();
    plot->add_option("csv", plot_csvs, "error or trajectory CSV files")->required();
    plot->add_option("--title", plot_title, "plot title");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(scenario, out_dir);
        if (est->parsed()) {
            if (!config_file.empty()) cfg = tauc::load_run_config(config_file, cfg);
            if (oracle_flag) cfg.oracle_foc = true;
            if (decimate > 0) cfg.decimate_hz = decimate;
            return cmd_estimate(dataset, out_traj, cfg, diagnostics_file);
        }
        if (eval->parsed())
            return cmd_evaluate(est_file, truth_file, errors_file, table_file);
        if (plot->parsed()) return cmd_plot(out_svg, plot_csvs, plot_title);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
