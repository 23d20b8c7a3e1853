#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <string>

#include "patchrestore/dataset.hpp"
#include "patchrestore/degrade.hpp"
#include "patchrestore/error.hpp"
#include "patchrestore/experiment.hpp"
#include "patchrestore/features.hpp"
#include "patchrestore/image_io.hpp"
#include "patchrestore/restore.hpp"
#include "patchrestore/theory.hpp"
#include "patchrestore/weights.hpp"

namespace py = pybind11;
using namespace patchrestore;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return Image(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Image& img) {
  Array out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

std::vector<Image> to_images(const std::vector<Array>& arrays) {
  std::vector<Image> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.push_back(to_image(a));
  return out;
}

BlurKernel to_kernel(const Array& k) {
  if (k.ndim() != 2) throw DimensionError("kernel must be a 2-D array");
  return make_blur_kernel(static_cast<int>(k.shape(0)), static_cast<int>(k.shape(1)),
                          std::vector<double>(k.data(), k.data() + k.size()));
}

}  // namespace

PYBIND11_MODULE(_patchrestore, m) {
  m.doc() = "Patch-based image restoration with learned patch priors";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "PatchIndexError", PyExc_IndexError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<IndefiniteOperator>(m, "IndefiniteOperator", PyExc_RuntimeError);

  m.attr("__version__") = library_version();

  m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); }, py::arg("path"));
  m.def("save_image", [](const Array& img, const std::string& path) { save_image(to_image(img), path); },
        py::arg("image"), py::arg("path"));
  m.def("psnr", [](const Array& a, const Array& b, double peak) { return psnr(to_image(a), to_image(b), peak); },
        py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);

  py::class_<DegradationOperator>(m, "Operator")
      .def_static("identity", &DegradationOperator::identity, py::arg("width"), py::arg("height"))
      .def_static(
          "blur",
          [](const Array& kernel, int width, int height) {
            return DegradationOperator::blur(to_kernel(kernel), width, height);
          },
          py::arg("kernel"), py::arg("width"), py::arg("height"))
      .def_static("downsample", &DegradationOperator::downsample, py::arg("factor"), py::arg("antialias_sigma"),
                  py::arg("width"), py::arg("height"))
      .def_static(
          "mask",
          [](double keep_fraction, std::uint64_t seed, int width, int height) {
            return DegradationOperator::mask(random_mask(width, height, keep_fraction, seed), width, height);
          },
          py::arg("keep_fraction"), py::arg("seed"), py::arg("width"), py::arg("height"))
      .def_property_readonly("input_shape",
                             [](const DegradationOperator& op) { return py::make_tuple(op.input_height(), op.input_width()); })
      .def_property_readonly("output_shape", [](const DegradationOperator& op) {
        return py::make_tuple(op.output_height(), op.output_width());
      })
      .def("apply", [](const DegradationOperator& op, const Array& x) { return to_array(op.apply(to_image(x))); })
      .def("adjoint",
           [](const DegradationOperator& op, const Array& v) { return to_array(op.apply_adjoint(to_image(v))); })
      .def(
          "degrade",
          [](const DegradationOperator& op, const Array& x, double sigma, std::uint64_t seed) {
            return to_array(degrade(op, to_image(x), NoiseModel{sigma, seed}));
          },
          py::arg("x"), py::arg("sigma") = 0.0, py::arg("seed") = 0);

  m.def("load_kernel", [](const std::string& path) {
    const BlurKernel k = load_blur_kernel(path);
    Array out({k.height, k.width});
    std::copy(k.coeffs.begin(), k.coeffs.end(), out.mutable_data());
    return out;
  });

  m.def(
      "dct_features",
      [](const Array& patch) {
        if (patch.ndim() != 2 || patch.shape(0) != patch.shape(1)) throw DimensionError("patch must be square");
        const Patch p(static_cast<int>(patch.shape(0)), std::vector<double>(patch.data(), patch.data() + patch.size()));
        return dct_features(p);
      },
      py::arg("patch"));
  m.def(
      "nw_weights", [](const std::vector<double>& v) { return nw_weights(v).alphas; }, py::arg("similarities"));
  m.def("krr_lambda", &krr_lambda, py::arg("r"), py::arg("m"), py::arg("q"), py::arg("num_patches"), py::arg("n"));

  py::class_<PatchDataset>(m, "PatchDataset")
      .def_readonly("m", &PatchDataset::m)
      .def_readonly("clean_side", &PatchDataset::clean_side)
      .def_readonly("degraded_side", &PatchDataset::degraded_side)
      .def("save", [](const PatchDataset& d, const std::string& path) { write_patch_dataset(d, path); })
      .def_static("load", &read_patch_dataset);

  m.def(
      "sample_patches",
      [](const std::vector<Array>& images, const DegradationOperator& op_template, double noise_sigma,
         std::uint64_t noise_seed, std::size_t m_, int patch_size, std::uint64_t seed) {
        OperatorSpec spec;
        spec.kind = op_template.kind();
        spec.kernel = op_template.kernel();
        spec.factor = op_template.factor();
        spec.antialias_sigma = op_template.antialias_sigma();
        if (spec.kind == DegradationOperator::Kind::mask) {
          throw ParameterError("sample_patches: masks are drawn per image; use the experiment runner for inpainting");
        }
        const auto imgs = to_images(images);
        return sample_patch_dataset(imgs, spec, NoiseModel{noise_sigma, noise_seed}, m_, patch_size, seed);
      },
      py::arg("images"), py::arg("operator"), py::arg("noise_sigma"), py::arg("noise_seed"), py::arg("m"),
      py::arg("patch_size") = 8, py::arg("seed") = 0,
      "Sample aligned clean/degraded patch pairs; the operator fixes the degradation kind and parameters.");

  m.def(
      "restore_mse",
      [](const Array& y, const DegradationOperator& op, const PatchDataset& data, double gamma, bool krr) {
        SolverConfig cfg;
        cfg.gamma = gamma;
        cfg.estimator = krr ? EstimatorKind::kernel_ridge : EstimatorKind::nadaraya_watson;
        const Image yi = to_image(y);
        Image x;
        {
          py::gil_scoped_release release;
          x = restore_mse(yi, op, data, cfg);
        }
        return to_array(x);
      },
      py::arg("y"), py::arg("operator"), py::arg("dataset"), py::arg("gamma") = 5000.0, py::arg("krr") = false);

  m.def(
      "restore_hqs",
      [](const Array& y, const DegradationOperator& op, const PatchDataset& data, double gamma, double beta0,
         double delta, int iterations, std::uint64_t seed, py::object reference) {
        SolverConfig cfg;
        cfg.gamma = gamma;
        cfg.beta0 = beta0;
        cfg.delta = delta;
        cfg.iterations = iterations;
        cfg.seed = seed;
        const Image yi = to_image(y);
        Image ref;
        const bool has_ref = !reference.is_none();
        if (has_ref) ref = to_image(reference.cast<Array>());
        HqsResult res;
        {
          py::gil_scoped_release release;
          res = hqs_restore(yi, op, data, cfg, has_ref ? &ref : nullptr);
        }
        py::list trace;
        for (const auto& r : res.trace) {
          py::dict d;
          d["iteration"] = r.iteration;
          d["beta"] = r.beta;
          d["energy_before"] = r.energy_before;
          d["energy_after_z"] = r.energy_after_z;
          d["energy"] = r.energy;
          d["psnr"] = r.psnr;
          d["mean_gap"] = r.mean_gap;
          d["cg_iterations"] = r.cg_iterations;
          trace.append(d);
        }
        return py::make_tuple(to_array(res.x), trace);
      },
      py::arg("y"), py::arg("operator"), py::arg("dataset"), py::arg("gamma") = 3200.0, py::arg("beta0") = 3.0,
      py::arg("delta") = 2.0, py::arg("iterations") = 8, py::arg("seed") = 0, py::arg("reference") = py::none(),
      "Half-quadratic splitting restoration; returns (x, trace).");

  m.def("initial_estimate",
        [](const Array& y, const DegradationOperator& op) { return to_array(initial_estimate(to_image(y), op)); });

  m.def(
      "c_bound_denoising", [](double sigma, double diameter) { return c_bound(Denoising{sigma, diameter}); },
      py::arg("sigma"), py::arg("diameter"));
  m.def(
      "c_bound_inpainting", [](double s) { return c_bound(Inpainting{s}); }, py::arg("keep_fraction"));
  m.def(
      "c_bound_downsampling", [](int k) { return c_bound(Downsampling{k}); }, py::arg("factor"));

  m.def(
      "estimate_q",
      [](const std::vector<Array>& images, double bandwidth, int patch_size, std::size_t pairs, std::uint64_t seed,
         bool exhaustive) {
        KernelModel k;
        k.bandwidth = bandwidth;
        const auto imgs = to_images(images);
        const QEstimate q =
            exhaustive ? estimate_q_exhaustive(imgs, k, patch_size) : estimate_q(imgs, k, patch_size, pairs, seed);
        return py::make_tuple(q.q, q.standard_error);
      },
      py::arg("images"), py::arg("bandwidth"), py::arg("patch_size") = 8, py::arg("pairs") = 10000,
      py::arg("seed") = 0, py::arg("exhaustive") = false, "Returns (q, standard_error).");

  m.def(
      "correlation_map",
      [](const Array& image, double bandwidth, int patch_size, py::object row, py::object col) {
        const Image img = to_image(image);
        const PatchGrid grid(img.width(), img.height(), patch_size);
        const std::size_t ref = row.is_none() ? central_patch(grid) : grid.index(row.cast<int>(), col.cast<int>());
        KernelModel k;
        k.bandwidth = bandwidth;
        const CorrelationMap map = correlation_map(img, k, grid, ref);
        return to_array(Image(map.cols, map.rows, map.values));
      },
      py::arg("image"), py::arg("bandwidth"), py::arg("patch_size") = 8, py::arg("row") = py::none(),
      py::arg("col") = py::none());

  m.def(
      "run_config",
      [](const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides, bool write) {
        const ExperimentConfig cfg = load_config(path, overrides);
        RunReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(cfg, write);
        }
        py::list rows;
        for (const auto& r : rep.images) {
          py::dict d;
          d["image"] = r.name;
          d["psnr_degraded"] = r.psnr_degraded;
          d["psnr_restored"] = r.psnr_restored;
          rows.append(d);
        }
        return py::make_tuple(rows, rep.config_hash);
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{},
      py::arg("write_outputs") = true, "Runs a bench config; returns (rows, config_hash).");
}
