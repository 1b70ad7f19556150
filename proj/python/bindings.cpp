#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levysep/decompose.hpp"
#include "levysep/harness.hpp"
#include "levysep/metrics.hpp"
#include "levysep/report_io.hpp"
#include "levysep/sim.hpp"

namespace py = pybind11;
using namespace levysep;
using namespace pybind11::literals;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

py::dict report_dict(const ExperimentReport& r) {
  const std::size_t m = r.records.size();
  py::array_t<std::uint64_t> level(m), fine(m), rep(m), seed(m);
  Array error(static_cast<py::ssize_t>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const auto& s = r.records[k];
    level.mutable_at(k) = s.level;
    fine.mutable_at(k) = s.fineLevel;
    rep.mutable_at(k) = s.replication;
    seed.mutable_at(k) = s.seed;
    error.mutable_at(k) = s.value;
  }
  py::list summary;
  for (const auto& row : r.summary) {
    summary.append(py::dict("level"_a = row.level, "mean"_a = row.mean, "std"_a = row.std, "count"_a = row.count));
  }
  py::dict d;
  d["label"] = r.label;
  d["level"] = level;
  d["fine_level"] = fine;
  d["replication"] = rep;
  d["seed"] = seed;
  d["error"] = error;
  d["summary"] = summary;
  d["invariant_checks"] = r.invariants.checked;
  d["invariant_violations"] = r.invariants.violations;
  d["report_json"] = report_to_json(r).dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of levysep";
  m.attr("__version__") = kSoftwareVersion;

  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);

  m.def(
      "simulate",
      [](const std::string& specJson, std::size_t n, std::uint64_t seed, std::uint64_t replication) {
        const CompositeSample s = simulate_composite(composite_spec_from_json(parse(specJson)), n, seed, replication);
        py::dict d;
        d["x"] = to_array(s.x.values());
        d["w"] = to_array(s.w.values());
        d["y"] = to_array(s.y.values());
        d["dx"] = to_array(s.xIncrements.deltas());
        if (s.jumps) {
          d["jump_times"] = to_array(s.jumps->times);
          d["jump_sizes"] = to_array(s.jumps->sizes);
        }
        return d;
      },
      "spec_json"_a, "n"_a, "seed"_a, "replication"_a = 0);

  m.def(
      "gaussian_increments",
      [](std::size_t n, std::uint64_t seed, std::uint64_t stream) {
        RngStream rng(seed, stream);
        return to_array(sample_gaussian_increments(n, rng).deltas());
      },
      "n"_a, "seed"_a, "stream"_a = 0);

  m.def(
      "reorder_decompose",
      [](const Array& x, const Array& wPrime) {
        const ReorderResult r = reorder_decompose(IncrementSeq(to_vector(x)), IncrementSeq(to_vector(wPrime)));
        return py::make_tuple(to_array(r.wApprox.values()), r.permutation);
      },
      "x_increments"_a, "w_prime_increments"_a);

  m.def(
      "threshold_decompose",
      [](const Array& x, double sigma, double threshold) {
        const ThresholdResult r = threshold_decompose(IncrementSeq(to_vector(x)), sigma, threshold);
        return py::make_tuple(to_array(r.wApprox.values()), r.keptMask);
      },
      "x_increments"_a, "sigma"_a, "threshold"_a);

  m.def("default_threshold", &default_threshold, "n"_a);
  m.def("bridge_of", [](const Array& p) { return to_array(bridge_of(GridPath(to_vector(p))).values()); }, "path"_a);
  m.def(
      "sup_bridge_error",
      [](const Array& fine, const Array& approx) {
        return sup_bridge_error(GridPath(to_vector(fine)), GridPath(to_vector(approx)));
      },
      "w_fine"_a, "w_approx"_a);
  m.def(
      "fit_rate",
      [](const std::vector<double>& levels, const std::vector<double>& means) {
        if (levels.size() != means.size()) throw std::invalid_argument("levels and means differ in length");
        std::vector<LevelMean> p;
        for (std::size_t k = 0; k < levels.size(); ++k) p.push_back({levels[k], means[k]});
        const RateFit f = fit_rate(p);
        return py::dict("slope"_a = f.slope, "intercept"_a = f.intercept, "r_squared"_a = f.rSquared);
      },
      "levels"_a, "means"_a);

  m.def(
      "run_experiment",
      [](const std::string& configJson) {
        const ExperimentConfig config = config_from_json(parse(configJson));
        std::vector<ExperimentReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_experiment(config);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      "config_json"_a);
}
