// Python bindings: sparse matrices, AMG / AMGF preconditioners, PCG, the
// dense certificate and the experiment runner.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amgf/amg.hpp"
#include "amgf/certify.hpp"
#include "amgf/error.hpp"
#include "amgf/filtered_preconditioner.hpp"
#include "amgf/harness.hpp"
#include "amgf/pcg.hpp"

namespace py = pybind11;
using namespace amgf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const Array& x) { return Vector(x.data(), x.data() + x.size()); }

py::array_t<double> to_array(const Vector& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> apply(const LinearOperator& op, const Array& x) {
  if (static_cast<std::size_t>(x.size()) != op.size()) throw SizeError("operand has the wrong length");
  Vector y(op.size());
  op.apply(std::span<const double>(x.data(), op.size()), y);
  return to_array(y);
}

std::shared_ptr<SparseMatrix> from_csr(std::size_t rows, std::size_t cols,
                                       std::vector<std::size_t> indptr,
                                       std::vector<std::size_t> indices, const Array& data) {
  return std::make_shared<SparseMatrix>(rows, cols, std::move(indptr), std::move(indices),
                                        to_vector(data));
}

py::dict report_dict(const CertifyReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["n_c"] = r.n_c;
  d["omega"] = r.omega;
  d["beta"] = r.beta;
  d["lmin"] = r.lmin;
  d["lmax"] = r.lmax;
  d["kappa"] = r.kappa;
  d["kappa_base"] = r.kappa_base;
  d["bound"] = r.bound;
  d["bound_simplified"] = r.bound_simplified;
  d["precision"] = r.precision;
  d["lower_bound_holds"] = r.lower_bound_holds();
  d["upper_bound_holds"] = r.upper_bound_holds();
  return d;
}

}  // namespace

PYBIND11_MODULE(_amgf, m) {
  m.doc() = "AMG with filtering for contact problems";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<NotSpdError>(m, "NotSpdError", error.ptr());
  py::register_exception<SetupError>(m, "SetupError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<LinearOperator, std::shared_ptr<LinearOperator>>(m, "LinearOperator")
      .def_property_readonly("size", &LinearOperator::size)
      .def("apply", &apply, py::arg("x"))
      .def("__matmul__", &apply);

  py::class_<SparseMatrix, LinearOperator, std::shared_ptr<SparseMatrix>>(m, "SparseMatrix")
      .def(py::init(&from_csr), py::arg("rows"), py::arg("cols"), py::arg("indptr"),
           py::arg("indices"), py::arg("data"))
      .def_property_readonly("shape", [](const SparseMatrix& a) { return py::make_tuple(a.rows(), a.cols()); })
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def("csr", [](const SparseMatrix& a) {
        const auto p = a.row_offsets(), c = a.col_indices();
        return py::make_tuple(std::vector<std::size_t>(p.begin(), p.end()),
                              std::vector<std::size_t>(c.begin(), c.end()),
                              to_array(Vector(a.values().begin(), a.values().end())));
      })
      .def("is_symmetric", &SparseMatrix::is_symmetric, py::arg("tol") = 1e-12);

  py::class_<AmgHierarchy, LinearOperator, std::shared_ptr<AmgHierarchy>>(m, "AmgHierarchy")
      .def_property_readonly("num_levels", &AmgHierarchy::num_levels)
      .def_property_readonly("operator_complexity", &AmgHierarchy::operator_complexity);

  m.def(
      "amg_setup",
      [](std::shared_ptr<SparseMatrix> a, std::size_t block_size, std::size_t coarsest,
         std::vector<std::vector<double>> near_nullspace) {
        AmgConfig cfg;
        cfg.block_size = block_size;
        cfg.coarsest_size = coarsest;
        cfg.rank_deficiency = AmgConfig::RankDeficiency::kZeroColumns;
        auto h = AmgHierarchy::setup(a, std::move(near_nullspace), cfg);
        return std::const_pointer_cast<AmgHierarchy>(h);
      },
      py::arg("a"), py::arg("block_size") = 1, py::arg("coarsest_size") = AmgConfig{}.coarsest_size,
      py::arg("near_nullspace") = std::vector<std::vector<double>>{},
      "Smoothed-aggregation hierarchy; applying it runs one V-cycle.");

  py::class_<FilteredPreconditioner, LinearOperator, std::shared_ptr<FilteredPreconditioner>>(
      m, "FilteredPreconditioner")
      .def(py::init([](std::shared_ptr<SparseMatrix> a, std::shared_ptr<AmgHierarchy> base,
                       std::vector<std::size_t> contact) {
             return std::make_shared<FilteredPreconditioner>(a, base, ContactIndexSet{std::move(contact)});
           }),
           py::arg("a"), py::arg("base"), py::arg("contact"));

  m.def(
      "pcg",
      [](const LinearOperator& a, const LinearOperator& precond, const Array& b, double tol,
         std::size_t max_it) {
        auto [x, rep] = pcg(a, precond, std::span<const double>(b.data(), static_cast<std::size_t>(b.size())),
                            tol, max_it);
        return py::make_tuple(to_array(x), rep.iterations, rep.converged);
      },
      py::arg("a"), py::arg("m"), py::arg("b"), py::arg("tol") = 1e-10, py::arg("max_it") = 5000,
      "Preconditioned CG; returns (x, iterations, converged).");

  m.def(
      "certify_amgf",
      [](const SparseMatrix& a, const AmgHierarchy& b, std::vector<std::size_t> contact,
         std::optional<bool> quad) {
        const CertifyPrecision p = quad ? (*quad ? CertifyPrecision::kQuad : CertifyPrecision::kDouble)
                                        : certify_precision_for(a);
        return report_dict(certify_amgf(a, b, ContactIndexSet{std::move(contact)}, p));
      },
      py::arg("a"), py::arg("b"), py::arg("contact"), py::arg("quad") = py::none(),
      "Dense spectral certificate (small matrices only).");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = ExperimentConfig::from_json_text(config_json);
        const auto records = run_experiment(cfg);
        const Report rep = emit_report(records);
        py::dict d;
        d["table"] = rep.table;
        d["summary_csv"] = rep.summary_csv;
        d["iterations_csv"] = rep.iterations_csv;
        d["envelopes_hold"] = envelopes_hold(cfg, records);
        return d;
      },
      py::arg("config_json"), "Runs an experiment from a JSON config string.");
}
