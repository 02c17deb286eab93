#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stackpack/errors.hpp"
#include "stackpack/heightmap.hpp"
#include "stackpack/items.hpp"
#include "stackpack/mesh_io.hpp"
#include "stackpack/orientation.hpp"
#include "stackpack/pipeline.hpp"
#include "stackpack/plan_io.hpp"
#include "stackpack/raycast.hpp"
#include "stackpack/stability.hpp"
#include "stackpack/validator.hpp"

namespace py = pybind11;
using namespace stackpack;

namespace {

using VertexArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using FaceArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

TriangleMesh mesh_from_arrays(const VertexArray& vertices, const FaceArray& faces) {
  if (vertices.ndim() != 2 || vertices.shape(1) != 3) throw ValidationError("vertices must have shape (n, 3)");
  if (faces.ndim() != 2 || faces.shape(1) != 3) throw ValidationError("faces must have shape (m, 3)");
  TriangleMesh mesh;
  auto v = vertices.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i) mesh.vertices.emplace_back(v(i, 0), v(i, 1), v(i, 2));
  auto f = faces.unchecked<2>();
  for (py::ssize_t i = 0; i < f.shape(0); ++i) {
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      if (f(i, k) < 0) throw ValidationError("negative face index");
      t[k] = static_cast<std::uint32_t>(f(i, k));
    }
    mesh.triangles.push_back(t);
  }
  mesh.validate();
  return mesh;
}

py::array_t<double> vertex_array(const TriangleMesh& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.vertices.size()), py::ssize_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    for (int k = 0; k < 3; ++k) a(i, k) = m.vertices[i][k];
  }
  return out;
}

py::array_t<std::int64_t> face_array(const TriangleMesh& m) {
  py::array_t<std::int64_t> out({static_cast<py::ssize_t>(m.triangles.size()), py::ssize_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    for (int k = 0; k < 3; ++k) a(i, k) = m.triangles[i][k];
  }
  return out;
}

/// Rows indexed by j (Y), columns by i (X).
py::array_t<double> heightmap_array(const HeightMap& map) {
  py::array_t<double> out({static_cast<py::ssize_t>(map.height()), static_cast<py::ssize_t>(map.width())});
  std::copy(map.data().begin(), map.data().end(), out.mutable_data());
  return out;
}

std::vector<PackItem> as_items(const std::vector<TriangleMesh>& meshes, const std::vector<double>& masses) {
  if (!masses.empty() && masses.size() != meshes.size()) throw ValidationError("masses must match meshes");
  std::vector<PackItem> items;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    PackItem it;
    it.mesh = meshes[k];
    it.id = "item" + std::to_string(k);
    if (!masses.empty()) it.mass = masses[k];
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace

PYBIND11_MODULE(_stackpack, m) {
  m.doc() = "Top-down packing planner for irregular rigid items";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_ValueError);
  py::register_exception<NoGraspError>(m, "NoGraspError", PyExc_RuntimeError);

  py::class_<TriangleMesh>(m, "TriangleMesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("faces", &face_array)
      .def_property_readonly("volume", &solid_volume)
      .def_property_readonly("center_of_mass", &center_of_mass)
      .def_property_readonly("bounds", [](const TriangleMesh& mesh) {
        const Aabb b = mesh.bounds();
        return py::make_tuple(b.min, b.max);
      })
      .def("__repr__", [](const TriangleMesh& mesh) {
        return "<TriangleMesh vertices=" + std::to_string(mesh.vertices.size()) +
               " triangles=" + std::to_string(mesh.triangles.size()) + ">";
      });

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init([](double roll, double pitch, double yaw, const Vec3& t) {
             RigidTransform r;
             r.roll = roll;
             r.pitch = pitch;
             r.yaw = yaw;
             r.translation = t;
             return r;
           }),
           py::arg("roll") = 0.0, py::arg("pitch") = 0.0, py::arg("yaw") = 0.0,
           py::arg("translation") = Vec3::Zero())
      .def_readwrite("roll", &RigidTransform::roll)
      .def_readwrite("pitch", &RigidTransform::pitch)
      .def_readwrite("yaw", &RigidTransform::yaw)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("rotation", &RigidTransform::rotation)
      .def("apply", &RigidTransform::apply);

  py::class_<Container>(m, "Container")
      .def(py::init([](double l, double w, double h, double mu_wall) {
             Container c{l, w, h, mu_wall};
             c.validate();
             return c;
           }),
           py::arg("length"), py::arg("width"), py::arg("height"), py::arg("mu_wall") = 0.7)
      .def_readwrite("length", &Container::length)
      .def_readwrite("width", &Container::width)
      .def_readwrite("height", &Container::height)
      .def_readwrite("mu_wall", &Container::mu_wall)
      .def_property_readonly("volume", &Container::volume);

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("resolution", &SearchConfig::resolution)
      .def_readwrite("xy_step", &SearchConfig::xy_step)
      .def_readwrite("delta_r", &SearchConfig::delta_r)
      .def_readwrite("top_n", &SearchConfig::top_n)
      .def_readwrite("candidate_cap", &SearchConfig::candidate_cap)
      .def_property(
          "heuristic", [](const SearchConfig& c) { return to_string(c.heuristic); },
          [](SearchConfig& c, const std::string& h) { c.heuristic = parse_heuristic(h); })
      .def_readwrite("c", &SearchConfig::c)
      .def_readwrite("stability", &SearchConfig::stability)
      .def_readwrite("manipulation", &SearchConfig::manipulation)
      .def_readwrite("full_yaw_range", &SearchConfig::full_yaw_range)
      .def_readwrite("force_5d", &SearchConfig::force_5d)
      .def_readwrite("mu", &SearchConfig::mu)
      .def_readwrite("scale_factor", &SearchConfig::scale_factor)
      .def_readwrite("density", &SearchConfig::density)
      .def("to_json", &config_to_json)
      .def_static("from_json", &config_from_json);

  m.def("make_box", &make_box, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def(
      "generate_test_item",
      [](const std::string& kind, const std::vector<double>& params, std::uint64_t seed) {
        return generate_test_item(parse_item_kind(kind), params, seed);
      },
      py::arg("kind"), py::arg("params") = std::vector<double>{}, py::arg("seed") = 0,
      "Procedural box, lshape, bowl or wedge.");
  m.def("load_mesh", py::overload_cast<const std::filesystem::path&>(&load_mesh), py::arg("path"));
  m.def("write_obj", py::overload_cast<const std::filesystem::path&, const TriangleMesh&>(&write_obj),
        py::arg("path"), py::arg("mesh"));

  m.def(
      "stable_orientations",
      [](const TriangleMesh& mesh, std::size_t top_n) {
        py::list out;
        for (const StableOrientation& o : planar_stable_orientations(mesh, top_n).orientations) {
          out.append(py::make_tuple(o.roll, o.pitch, o.probability));
        }
        return out;
      },
      py::arg("mesh"), py::arg("top_n") = 4, "List of (roll, pitch, probability), most probable first.");

  m.def(
      "object_heightmaps",
      [](const TriangleMesh& mesh, double roll, double pitch, double yaw, double resolution) {
        const ObjectHeightmaps maps = raycast_heightmaps(mesh, rotation_from_rpy(roll, pitch, yaw), resolution);
        return py::make_tuple(heightmap_array(maps.top), heightmap_array(maps.bottom));
      },
      py::arg("mesh"), py::arg("roll") = 0.0, py::arg("pitch") = 0.0, py::arg("yaw") = 0.0,
      py::arg("resolution") = 0.002, "Top and bottom maps as (rows=Y, cols=X) arrays.");

  m.def(
      "is_stable",
      [](const std::vector<TriangleMesh>& meshes, const std::vector<RigidTransform>& poses,
         const Container& container, double mu) {
        if (meshes.size() != poses.size()) throw ValidationError("meshes and poses differ in length");
        Arrangement arr;
        for (std::size_t k = 0; k < meshes.size(); ++k) arr.emplace_back(meshes[k], poses[k]);
        StabilityOptions opt;
        opt.mu = mu;
        return std::string(to_string(is_stable(arr, container, opt).verdict));
      },
      py::arg("meshes"), py::arg("poses"), py::arg("container"), py::arg("mu") = 0.7,
      "Returns 'stable', 'unstable' or 'indeterminate'.");

  m.def(
      "pack",
      [](const std::vector<TriangleMesh>& meshes, const std::vector<Container>& containers,
         const SearchConfig& config, const std::vector<std::size_t>& sequence, const std::vector<double>& masses) {
        PackOutcome out;
        {
          py::gil_scoped_release release;
          out = run_pack(as_items(meshes, masses), containers, config, sequence);
        }
        if (out.exit_code == kExitInputError) throw ValidationError(out.message);
        return py::make_tuple(out.exit_code, plan_to_json(out.plan));
      },
      py::arg("meshes"), py::arg("containers"), py::arg("config") = SearchConfig{},
      py::arg("sequence") = std::vector<std::size_t>{}, py::arg("masses") = std::vector<double>{},
      "Returns (exit_code, plan_json); exit code 2 means no container fits.");

  m.def(
      "validate_plan",
      [](const std::string& plan_json, const std::vector<TriangleMesh>& meshes, const std::vector<double>& masses) {
        const PackingPlan plan = plan_from_json(plan_json);
        return report_to_json(validate_plan(plan, as_items(meshes, masses)));
      },
      py::arg("plan_json"), py::arg("meshes"), py::arg("masses") = std::vector<double>{},
      "Replays a plan; returns the report as JSON.");

  m.def(
      "export_scene",
      [](const std::string& plan_json, const std::vector<TriangleMesh>& meshes, const std::filesystem::path& dir) {
        std::vector<std::string> paths;
        for (const auto& p : export_scene(plan_from_json(plan_json), as_items(meshes, {}), dir)) {
          paths.push_back(p.string());
        }
        return paths;
      },
      py::arg("plan_json"), py::arg("meshes"), py::arg("dir"));
}
