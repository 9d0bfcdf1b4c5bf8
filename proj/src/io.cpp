#include "tauc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

namespace tauc {

namespace {

/// All file output goes through a temp-then-rename so consumers never see a
/// partial file.
class AtomicFile {
  public:
    explicit AtomicFile(const std::filesystem::path& path)
        : path_(path), tmp_(path.string() + ".tmp"), out_(tmp_, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open " + tmp_.string());
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
        std::filesystem::rename(tmp_, path_);
    }

  private:
    std::filesystem::path path_, tmp_;
    std::ofstream out_;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

void expect_header(std::ifstream& in, const std::string& expected,
                   const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(in, line) || line != expected)
        throw std::runtime_error("bad header in " + path.string() +
                                 " (expected '" + expected + "')");
}

}  // namespace

void write_imu_csv(const std::filesystem::path& path,
                   const std::vector<ImuSample>& samples) {
    AtomicFile file(path);
    file.stream() << "t_ns,gx,gy,gz,ax,ay,az\n";
    for (const auto& s : samples) {
        file.stream() << s.t.ns << ',' << fmt(s.gyro.x()) << ',' << fmt(s.gyro.y())
                      << ',' << fmt(s.gyro.z()) << ',' << fmt(s.accel.x()) << ','
                      << fmt(s.accel.y()) << ',' << fmt(s.accel.z()) << '\n';
    }
    file.commit();
}

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,gx,gy,gz,ax,ay,az", path);
    std::vector<ImuSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw std::runtime_error("malformed IMU row in " + path.string());
        ImuSample s;
        s.t.ns = std::stoll(f[0]);
        s.gyro = Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3]));
        s.accel = Vec3(std::stod(f[4]), std::stod(f[5]), std::stod(f[6]));
        out.push_back(s);
    }
    return out;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
    AtomicFile file(path);
    file.stream() << "t_ns,x,y,z\n";
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const Vec3& p = traj.points.value(i);
        file.stream() << traj.points.time(i).ns << ',' << fmt(p.x()) << ','
                      << fmt(p.y()) << ',' << fmt(p.z()) << '\n';
    }
    file.commit();
}

Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const std::string& label) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,x,y,z", path);
    Trajectory traj;
    traj.label = label;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4)
            throw std::runtime_error("malformed trajectory row in " + path.string());
        traj.points.push_back(
            Timestamp{std::stoll(f[0])},
            Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3])));
    }
    return traj;
}

void write_foc_csv(const std::filesystem::path& path,
                   const TimedSeries<Vec3>& foc) {
    AtomicFile file(path);
    file.stream() << "t_ns,fx,fy,fz\n";
    for (std::size_t i = 0; i < foc.size(); ++i) {
        const Vec3& f = foc.value(i);
        file.stream() << foc.time(i).ns << ',' << fmt(f.x()) << ',' << fmt(f.y())
                      << ',' << fmt(f.z()) << '\n';
    }
    file.commit();
}

TimedSeries<Vec3> read_foc_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,fx,fy,fz", path);
    TimedSeries<Vec3> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4)
            throw std::runtime_error("malformed F row in " + path.string());
        out.push_back(Timestamp{std::stoll(f[0])},
                      Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3])));
    }
    return out;
}

void write_warp_csv(const std::filesystem::path& path,
                    const std::vector<AffineWarp>& warps) {
    AtomicFile file(path);
    file.stream() << "t_ns,w1,w2,w3,w4,w5,w6\n";
    for (const auto& w : warps) {
        file.stream() << w.t.ns;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c) file.stream() << ',' << fmt(w.w(r, c));
        file.stream() << '\n';
    }
    file.commit();
}

std::vector<AffineWarp> read_warp_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,w1,w2,w3,w4,w5,w6", path);
    std::vector<AffineWarp> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw std::runtime_error("malformed warp row in " + path.string());
        AffineWarp w;
        w.t.ns = std::stoll(f[0]);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c)
                w.w(r, c) = std::stod(f[1 + r * 3 + c]);
        out.push_back(w);
    }
    return out;
}

void write_error_csv(const std::filesystem::path& path,
                     const TimedSeries<double>& errors_cm) {
    AtomicFile file(path);
    file.stream() << "t_ns,err_cm\n";
    for (std::size_t i = 0; i < errors_cm.size(); ++i)
        file.stream() << errors_cm.time(i).ns << ',' << fmt(errors_cm.value(i))
                      << '\n';
    file.commit();
}

TimedSeries<double> read_error_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,err_cm", path);
    TimedSeries<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2)
            throw std::runtime_error("malformed error row in " + path.string());
        out.push_back(Timestamp{std::stoll(f[0])}, std::stod(f[1]));
    }
    return out;
}

void write_intrinsics(const std::filesystem::path& path,
                      const CameraIntrinsics& k) {
    AtomicFile file(path);
    file.stream() << fmt(k.fx) << ' ' << fmt(k.fy) << ' ' << fmt(k.cx) << ' '
                  << fmt(k.cy) << ' ' << k.width << ' ' << k.height << '\n';
    file.commit();
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    CameraIntrinsics k;
    in >> k.fx >> k.fy >> k.cx >> k.cy >> k.width >> k.height;
    if (!in || !k.valid())
        throw std::runtime_error("invalid intrinsics file " + path.string());
    return k;
}

void write_frame_index(const std::filesystem::path& path,
                       const FrameIndex& index) {
    AtomicFile file(path);
    file.stream() << "t_ns,filename\n";
    for (std::size_t i = 0; i < index.times.size(); ++i)
        file.stream() << index.times[i].ns << ',' << index.files[i] << '\n';
    file.commit();
}

FrameIndex read_frame_index(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    expect_header(in, "t_ns,filename", path);
    FrameIndex index;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2)
            throw std::runtime_error("malformed frame index row in " + path.string());
        index.times.push_back(Timestamp{std::stoll(f[0])});
        index.files.push_back(f[1]);
    }
    return index;
}

namespace {

std::map<std::string, std::vector<std::string>> parse_kv_file(
    const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::map<std::string, std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key].push_back(value);
    }
    return out;
}

Vec3 parse_vec3(const std::string& s, const std::string& key) {
    std::istringstream ss(s);
    Vec3 v;
    ss >> v.x() >> v.y() >> v.z();
    if (!ss) throw std::runtime_error("scenario: bad vector for " + key);
    return v;
}

void parse_accel_terms(const std::map<std::string, std::vector<std::string>>& kv,
                       const std::string& key, AxisMotion& axis) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    for (const auto& value : it->second) {
        std::istringstream ss(value);
        AccelTerm term;
        ss >> term.t0 >> term.t1 >> term.amp >> term.freq_hz >> term.phase;
        if (!ss) throw std::runtime_error("scenario: bad term for " + key);
        axis.terms.push_back(term);
    }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    const auto kv = parse_kv_file(path);
    Scenario sc;
    sc.intrinsics = {400.0, 400.0, 424.0, 240.0, 848, 480};

    auto last = [&kv](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second.back();
    };

    if (const auto* v = last("duration")) sc.spec.duration = std::stod(*v);
    if (const auto* v = last("seed"))
        sc.spec.seed = static_cast<std::uint64_t>(std::stoull(*v));
    if (const auto* v = last("gravity")) sc.spec.gravity = parse_vec3(*v, "gravity");
    if (const auto* v = last("z_margin")) sc.spec.z_margin = std::stod(*v);
    if (const auto* v = last("accel_noise")) sc.spec.accel_noise = std::stod(*v);
    if (const auto* v = last("gyro_noise")) sc.spec.gyro_noise = std::stod(*v);
    if (const auto* v = last("accel_bias"))
        sc.spec.accel_bias = parse_vec3(*v, "accel_bias");
    if (const auto* v = last("gyro_bias"))
        sc.spec.gyro_bias = parse_vec3(*v, "gyro_bias");

    if (const auto* v = last("plane_n")) sc.scene.n = parse_vec3(*v, "plane_n");
    if (const auto* v = last("texture")) {
        if (*v == "noise")
            sc.scene.texture.kind = TextureSpec::Kind::value_noise;
        else if (*v == "checker")
            sc.scene.texture.kind = TextureSpec::Kind::checker;
        else
            throw std::runtime_error("scenario: unknown texture " + *v);
    }
    if (const auto* v = last("tex_seed"))
        sc.scene.texture.seed = static_cast<std::uint64_t>(std::stoull(*v));
    if (const auto* v = last("tex_octaves")) sc.scene.texture.octaves = std::stoi(*v);
    if (const auto* v = last("tex_contrast"))
        sc.scene.texture.contrast = std::stod(*v);
    if (const auto* v = last("tex_scale")) sc.scene.texture.scale = std::stod(*v);
    if (const auto* v = last("tex_checker_m"))
        sc.scene.texture.checker_m = std::stod(*v);

    if (const auto* v = last("intrinsics")) {
        std::istringstream ss(*v);
        ss >> sc.intrinsics.fx >> sc.intrinsics.fy >> sc.intrinsics.cx >>
            sc.intrinsics.cy >> sc.intrinsics.width >> sc.intrinsics.height;
        if (!ss) throw std::runtime_error("scenario: bad intrinsics line");
    }
    if (const auto* v = last("patch_center")) {
        std::istringstream ss(*v);
        ss >> sc.patch_center_px.x() >> sc.patch_center_px.y();
        if (!ss) throw std::runtime_error("scenario: bad patch_center line");
    }

    if (const auto* v = last("frame_hz")) sc.rates.frame_hz = std::stod(*v);
    if (const auto* v = last("gyro_hz")) sc.rates.gyro_hz = std::stod(*v);
    if (const auto* v = last("accel_hz")) sc.rates.accel_hz = std::stod(*v);
    if (const auto* v = last("truth_hz")) sc.rates.truth_hz = std::stod(*v);

    if (const auto* v = last("pos0")) {
        const Vec3 p = parse_vec3(*v, "pos0");
        for (int i = 0; i < 3; ++i) sc.spec.axis[i].pos0 = p(i);
    }
    if (const auto* v = last("vel0")) {
        const Vec3 p = parse_vec3(*v, "vel0");
        for (int i = 0; i < 3; ++i) sc.spec.axis[i].vel0 = p(i);
    }
    parse_accel_terms(kv, "accel_x", sc.spec.axis[0]);
    parse_accel_terms(kv, "accel_y", sc.spec.axis[1]);
    parse_accel_terms(kv, "accel_z", sc.spec.axis[2]);

    if (const auto* v = last("rot_axis"))
        sc.spec.rotation.axis = parse_vec3(*v, "rot_axis");
    if (const auto* v = last("rot_rate0")) sc.spec.rotation.rate0 = std::stod(*v);
    if (auto it = kv.find("rot_angle"); it != kv.end()) {
        for (const auto& value : it->second) {
            std::istringstream ss(value);
            AngleTerm term;
            ss >> term.amp >> term.freq_hz >> term.phase;
            if (!ss) throw std::runtime_error("scenario: bad rot_angle line");
            sc.spec.rotation.terms.push_back(term);
        }
    }

    if (sc.patch_center_px == Vec2::Zero())
        sc.patch_center_px = Vec2(sc.intrinsics.cx, sc.intrinsics.cy);
    return sc;
}

Scenario builtin_scenario(const std::string& name) {
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    Scenario sc;
    sc.intrinsics = {400.0, 400.0, 424.0, 240.0, 848, 480};
    sc.patch_center_px = Vec2(424.0, 240.0);

    if (name == "approach-2m") {
        // constant-velocity approach toward a fronto-parallel plane, 2 m -> 1 m
        sc.scene.n = Vec3(0, 0, 0.5);
        sc.spec.duration = 4.0;
        sc.spec.axis[2].vel0 = 0.25;
        sc.spec.gravity = Vec3(0, -9.81, 0);
    } else if (name == "excite-xz-20s" || name == "excite-xz-20s-clean") {
        // two-axis sinusoidal excitation, the trajectory-estimation workout
        sc.scene.n = Vec3(0, 0, 0.4);
        sc.spec.duration = 20.0;
        sc.spec.axis[0].terms.push_back({0.0, 20.0, 5.0, 0.9, kHalfPi});
        sc.spec.axis[2].terms.push_back({0.0, 20.0, 4.5, 1.2, kHalfPi});
        sc.spec.rotation.axis = Vec3(0, 0, 1);
        sc.spec.rotation.terms.push_back({0.05, 0.3, 0.0});
        if (name == "excite-xz-20s") {
            sc.spec.accel_noise = 0.05;
            sc.spec.gyro_noise = 0.005;
        }
    } else if (name == "coast-xz") {
        // excitation bursts with a 3 s coast in between; both bursts end with
        // zero sinusoidal velocity so the coast drifts only at vel0
        sc.scene.n = Vec3(0, 0, 0.4);
        sc.spec.duration = 18.0;
        sc.spec.axis[0].terms.push_back({0.0, 6.0, 4.0, 1.0, kHalfPi});
        sc.spec.axis[0].terms.push_back({9.0, 16.0, 4.0, 1.0, kHalfPi});
        sc.spec.axis[2].terms.push_back({0.0, 6.0, 4.0, 1.5, kHalfPi});
        sc.spec.axis[2].terms.push_back({9.0, 16.0, 4.0, 1.5, kHalfPi});
        sc.spec.axis[2].vel0 = 0.05;
    } else if (name == "rotation-only") {
        sc.scene.n = Vec3(0, 0, 0.5);
        sc.spec.duration = 6.0;
        sc.spec.rotation.axis = Vec3(0.2, 0.2, 1.0).normalized();
        sc.spec.rotation.terms.push_back({0.12, 0.5, 0.0});
    } else {
        throw std::runtime_error("unknown scenario '" + name + "'");
    }
    return sc;
}

std::vector<std::string> builtin_scenario_names() {
    return {"approach-2m", "excite-xz-20s", "excite-xz-20s-clean", "coast-xz",
            "rotation-only"};
}

void write_dataset(const PlanarSimulator& sim, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "frames");
    DatasetPaths paths{dir};

    write_intrinsics(paths.intrinsics(), sim.intrinsics());
    write_imu_csv(paths.gyro(), sim.gyro_stream());
    write_imu_csv(paths.accel(), sim.accel_stream());
    write_trajectory_csv(paths.groundtruth(), sim.truth_trajectory());

    const std::vector<Timestamp> times = sim.frame_times();
    FrameIndex index;
    TimedSeries<Vec3> foc;
    std::vector<AffineWarp> warps;
    for (std::size_t i = 0; i < times.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frames/frame_%06zu.pgm", i);
        index.times.push_back(times[i]);
        index.files.emplace_back(name);
        foc.push_back(times[i], sim.foc(times[i].seconds()));
        AffineWarp w = sim.warp(times[i].seconds());
        w.t = times[i];
        warps.push_back(w);
    }
    write_frame_index(paths.frames_index(), index);
    write_foc_csv(paths.oracle_foc(), foc);
    write_warp_csv(paths.oracle_warp(), warps);

    // frames render independently; fan out across hardware threads
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < times.size(); i += n_threads) {
                const Image img = sim.render(times[i].seconds());
                save_pgm(img, (dir / index.files[i]).string());
            }
        });
    }
    for (auto& worker : workers) worker.join();
}

}  // namespace tauc
