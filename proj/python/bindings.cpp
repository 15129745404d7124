#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prohoi/box_twin.hpp"
#include "prohoi/config.hpp"
#include "prohoi/drop_monitor.hpp"
#include "prohoi/metrics.hpp"
#include "prohoi/occupancy.hpp"
#include "prohoi/pipeline.hpp"
#include "prohoi/planner.hpp"
#include "prohoi/prior_library.hpp"
#include "prohoi/sdf.hpp"

namespace py = pybind11;
using namespace prohoi;

namespace {

Rotation rotation_from_wxyz(const Eigen::Vector4d& q) {
    return Rotation::from_quaternion(Quat(q[0], q[1], q[2], q[3]));
}

Eigen::Vector4d wxyz_of(const Rotation& r) {
    const Quat& q = r.quaternion();
    return {q.w(), q.x(), q.y(), q.z()};
}

}  // namespace

PYBIND11_MODULE(_prohoi, m) {
    m.doc() = "humanoid object-interaction planning and evaluation core";

    py::class_<Pose>(m, "Pose")
        .def(py::init([](const Vec3& p, const Eigen::Vector4d& q) {
                 return Pose{p, rotation_from_wxyz(q)};
             }),
             py::arg("position") = Vec3::Zero().eval(),
             py::arg("quaternion") = Eigen::Vector4d(1, 0, 0, 0))
        .def_property(
            "position", [](const Pose& p) { return p.position; },
            [](Pose& p, const Vec3& v) { p.position = v; })
        .def_property(
            "quaternion", [](const Pose& p) { return wxyz_of(p.rotation); },
            [](Pose& p, const Eigen::Vector4d& q) { p.rotation = rotation_from_wxyz(q); })
        .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; })
        .def("inverse", &Pose::inverse)
        .def("apply", &Pose::apply)
        .def("__repr__", [](const Pose& p) {
            auto q = wxyz_of(p.rotation);
            return "Pose(position=[" + std::to_string(p.position.x()) + ", " +
                   std::to_string(p.position.y()) + ", " + std::to_string(p.position.z()) +
                   "], quaternion=[" + std::to_string(q[0]) + ", " + std::to_string(q[1]) + ", " +
                   std::to_string(q[2]) + ", " + std::to_string(q[3]) + "])";
        });

    m.def(
        "angular_distance",
        [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
            return angular_distance(rotation_from_wxyz(a), rotation_from_wxyz(b));
        },
        py::arg("q_a"), py::arg("q_b"), "geodesic distance between unit quaternions (wxyz)");
    m.def("interpolate_pose", &interpolate_pose, py::arg("a"), py::arg("b"), py::arg("s"));
    m.def(
        "encode_rot6d",
        [](const Eigen::Vector4d& q) -> Eigen::Matrix<double, 6, 1> {
            return encode_rot6d(rotation_from_wxyz(q));
        },
        py::arg("quaternion"));
    m.def(
        "decode_rot6d",
        [](const Eigen::Matrix<double, 6, 1>& v) { return wxyz_of(decode_rot6d(v)); },
        py::arg("rot6d"));
    m.def(
        "yaw_of", [](const Eigen::Vector4d& q) { return yaw_of(rotation_from_wxyz(q)); },
        py::arg("quaternion"));

    py::class_<RetrievalWeights>(m, "RetrievalWeights")
        .def(py::init<>())
        .def_readwrite("w_t", &RetrievalWeights::w_t)
        .def_readwrite("w_r", &RetrievalWeights::w_r)
        .def_readwrite("yaw_only_rotation", &RetrievalWeights::yaw_only_rotation);

    py::class_<PriorLibrary>(m, "PriorLibrary")
        .def(py::init<>())
        .def(
            "add",
            [](PriorLibrary& lib, const Pose& object_pose, const Pose& interaction_pose,
               const std::string& clip_id) {
                return lib.add({object_pose, interaction_pose, clip_id});
            },
            py::arg("object_pose"), py::arg("interaction_pose"), py::arg("clip_id") = "")
        .def("__len__", &PriorLibrary::size)
        .def(
            "retrieve",
            [](const PriorLibrary& lib, const Pose& current, const RetrievalWeights& w) {
                RetrievalResult r = lib.retrieve(current, w);
                return py::make_tuple(r.index, r.score);
            },
            py::arg("current_object_pose"), py::arg("weights") = RetrievalWeights{})
        .def("target_pose", &PriorLibrary::target_pose, py::arg("k"),
             py::arg("current_object_pose"), py::arg("root_pose"));

    py::class_<SafetyRegion>(m, "SafetyRegion")
        .def(py::init<>())
        .def_readwrite("center", &SafetyRegion::center)
        .def_readwrite("half_extents", &SafetyRegion::half_extents)
        .def("contains", &SafetyRegion::contains);

    py::class_<DropMonitor>(m, "DropMonitor")
        .def(py::init<SafetyRegion, int>(), py::arg("region"), py::arg("window_n"))
        .def(
            "update",
            [](DropMonitor& mon, double t, const Pose& root, const Pose& object_rel,
               bool contact_cmd) {
                StateFrame f;
                f.t = t;
                f.root_pose = root;
                f.object_pose_rel = object_rel;
                f.contact_cmd = contact_cmd;
                return mon.update(f) == MonitorStatus::DropAlert;
            },
            py::arg("t"), py::arg("root_pose"), py::arg("object_pose_rel"),
            py::arg("contact_cmd"))
        .def("reset", &DropMonitor::reset)
        .def_property_readonly("alerted", [](const DropMonitor& mon) {
            return mon.status() == MonitorStatus::DropAlert;
        });

    py::class_<TwinParams>(m, "TwinParams")
        .def(py::init<>())
        .def_readwrite("gravity", &TwinParams::gravity)
        .def_readwrite("restitution", &TwinParams::restitution)
        .def_readwrite("friction", &TwinParams::friction)
        .def_readwrite("box_half_extents", &TwinParams::box_half_extents)
        .def_readwrite("sim_dt", &TwinParams::sim_dt)
        .def_readwrite("max_sim_time", &TwinParams::max_sim_time);

    m.def(
        "predict_resting_pose",
        [](const Pose& init, const Vec3& linear, const Vec3& angular, const TwinParams& params) {
            RestingPrediction p = predict_resting_pose(init, {linear, angular}, params);
            return py::make_tuple(p.resting, p.settle_time);
        },
        py::arg("init"), py::arg("linear_velocity"), py::arg("angular_velocity"),
        py::arg("params") = TwinParams{});

    py::class_<SdfField>(m, "SdfField")
        .def_static("analytic_box", &SdfField::analytic_box, py::arg("half_extents"))
        .def("query", &SdfField::query, py::arg("point"));
    m.def("box_sdf", &box_sdf, py::arg("half_extents"), py::arg("point"));
    m.def("voxel_downsample", &voxel_downsample, py::arg("points"), py::arg("cell"));

    py::class_<VelocityLimits>(m, "VelocityLimits")
        .def(py::init<>())
        .def_readwrite("v_max", &VelocityLimits::v_max)
        .def_readwrite("omega_max", &VelocityLimits::omega_max);

    m.def(
        "build_sequence",
        [](const Pose& current, const Pose& target, const Pose& end,
           const std::vector<Pose>& nav, double h_stand) {
            auto frames = build_sequence(current, target, end, nav, h_stand);
            std::vector<std::pair<Pose, bool>> out;
            for (const auto& f : frames) out.emplace_back(f.pose, f.contact);
            return out;
        },
        py::arg("current"), py::arg("target"), py::arg("end"), py::arg("nav_waypoints"),
        py::arg("h_stand") = 0.75);
    m.def(
        "interpolate_trajectory",
        [](const std::vector<std::pair<Pose, bool>>& waypoints, const VelocityLimits& limits,
           double dt) {
            std::vector<TrajectoryFrame> seq;
            for (const auto& [p, c] : waypoints) seq.push_back({p, c});
            TimedTrajectory traj = interpolate_trajectory(seq, limits, dt);
            std::vector<std::tuple<double, Pose, bool>> out;
            for (std::size_t i = 0; i < traj.frames.size(); ++i)
                out.emplace_back(traj.time_of(i), traj.frames[i].pose, traj.frames[i].contact);
            return out;
        },
        py::arg("waypoints"), py::arg("limits") = VelocityLimits{}, py::arg("dt") = 0.02);

    m.def(
        "generate_ood_grid",
        [](double x_min, double x_max, double spacing, const std::vector<double>& yaw_set_deg,
           double target_radius, double target_step_deg) {
            OodGridSpec spec{x_min, x_max, spacing, yaw_set_deg, target_radius, target_step_deg};
            OodGrid grid = generate_ood_grid(spec);
            std::vector<std::pair<Pose, Vec3>> scenarios;
            for (const auto& s : grid.scenarios)
                scenarios.emplace_back(s.object_pose, s.target_position);
            return py::make_tuple(scenarios, grid.grid_points, grid.yaw_count,
                                  grid.target_count);
        },
        py::arg("x_min") = 0.4, py::arg("x_max") = 1.4, py::arg("spacing") = 0.2,
        py::arg("yaw_set_deg") = std::vector<double>{0.0, 15.0, 30.0, 45.0},
        py::arg("target_radius") = 4.0, py::arg("target_step_deg") = 10.0);

    m.def(
        "run_pipeline_json",
        [](const Pose& object_pose, const Vec3& target_position, std::uint64_t seed,
           long disturbance_frame) {
            Config cfg;
            cfg.disturbance_frame = disturbance_frame;
            Scenario s{object_pose, target_position};
            return run_pipeline(s, cfg, seed).dump();
        },
        py::arg("object_pose"), py::arg("target_position"), py::arg("seed") = 0,
        py::arg("disturbance_frame") = -1,
        "end-to-end scenario run; returns the report as a JSON string");
}
