#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sgicl/cli.hpp"
#include "sgicl/eval.hpp"
#include "sgicl/golden.hpp"
#include "sgicl/pipeline.hpp"
#include "sgicl/templating.hpp"

namespace py = pybind11;
using namespace sgicl;

namespace {

using DemoTuple = std::tuple<std::string, std::optional<std::string>, ClassId>;

Example make_example(std::string text1, std::optional<std::string> text2) {
  return Example{"", std::move(text1), std::move(text2), std::nullopt};
}

std::vector<Demonstration> make_demos(const std::vector<DemoTuple>& demos) {
  std::vector<Demonstration> out;
  for (const auto& [t1, t2, label] : demos) {
    out.push_back({make_example(t1, t2), label});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_sgicl, m) {
  m.doc() = "Self-generated in-context learning core";

  static PyObject* sgicl_error =
      PyErr_NewException("sgicl._sgicl.SgiclError", PyExc_RuntimeError, nullptr);
  m.add_object("SgiclError", py::handle(sgicl_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string kind(kind_name(e.kind()));
      py::object exc = py::handle(sgicl_error)(kind + ": " + e.what());
      exc.attr("kind") = kind;
      PyErr_SetObject(sgicl_error, exc.ptr());
    }
  });

  m.def("task_names", &builtin_task_names);

  m.def(
      "render_generation_prompt",
      [](const std::string& task, const std::string& text1,
         std::optional<std::string> text2, ClassId target, const std::string& mode) {
        return render_generation_prompt(builtin_task(task), make_example(text1, text2),
                                        target, parse_conditioning_mode(mode));
      },
      py::arg("task"), py::arg("text1"), py::arg("text2") = py::none(),
      py::arg("target"), py::arg("mode") = "input-and-class");

  m.def(
      "render_inference_prompt",
      [](const std::string& task, const std::vector<DemoTuple>& demos,
         const std::string& text1, std::optional<std::string> text2,
         const std::string& variant) {
        return render_inference_prompt(builtin_task(task), make_demos(demos),
                                       make_example(text1, text2),
                                       parse_variant(variant));
      },
      py::arg("task"), py::arg("demos"), py::arg("text1"),
      py::arg("text2") = py::none(), py::arg("variant") = "manual",
      "demos is a list of (text1, text2 or None, label) tuples.");

  m.def("assign_classes", &assign_classes, py::arg("k"), py::arg("num_classes"),
        py::arg("seed"));

  m.def(
      "cosine",
      [](const std::vector<double>& u, const std::vector<double>& v) {
        return cosine(u, v);
      },
      py::arg("u"), py::arg("v"));

  m.def(
      "sample_worth",
      [](const std::map<std::size_t, double>& sweep, double sgicl_accuracy,
         std::size_t k_sgicl) {
        const auto w = sample_worth(sweep, sgicl_accuracy, k_sgicl);
        return py::make_tuple(w.equivalent_gold, w.worth, w.clamped);
      },
      py::arg("sweep"), py::arg("sgicl_accuracy"), py::arg("k_sgicl"),
      "Returns (equivalent gold count, worth ratio, clamped).");

  m.def(
      "validate_templates",
      [](const std::filesystem::path& dir) {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& r : compare_golden(dir)) out.emplace_back(r.file, r.identical);
        return out;
      },
      py::arg("golden_dir"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit code, stdout, stderr).");
}
