#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ergo/averaging.hpp"
#include "ergo/counterexample.hpp"
#include "ergo/errors.hpp"
#include "ergo/measure_space.hpp"
#include "ergo/operators.hpp"
#include "ergo/return_times.hpp"
#include "ergo/weights.hpp"

namespace py = pybind11;
using namespace ergo;

namespace {

void bind_measure_space(py::module_& m) {
    py::class_<AtomicMeasureSpace, std::shared_ptr<AtomicMeasureSpace>>(m, "AtomicMeasureSpace")
        .def(py::init<std::vector<double>, bool>(), py::arg("weights"), py::arg("truncated") = false)
        .def_static("uniform",
                    [](std::size_t n, double w, bool truncated) {
                        return std::make_shared<AtomicMeasureSpace>(std::vector<double>(n, w), truncated);
                    },
                    py::arg("atoms"), py::arg("weight") = 1.0, py::arg("truncated") = false)
        .def("__len__", &AtomicMeasureSpace::size)
        .def_property_readonly("weights", [](const AtomicMeasureSpace& s) {
            return std::vector<double>(s.weights().begin(), s.weights().end());
        })
        .def_property_readonly("truncated", &AtomicMeasureSpace::truncated)
        .def_property_readonly("total_measure", &AtomicMeasureSpace::total_measure);

    py::class_<MeasurableFunction>(m, "MeasurableFunction")
        .def(py::init([](std::shared_ptr<AtomicMeasureSpace> s, std::vector<Complex> v) {
                 return MeasurableFunction(std::move(s), std::move(v));
             }),
             py::arg("space"), py::arg("values"))
        .def_static("constant",
                    [](std::shared_ptr<AtomicMeasureSpace> s, Complex c) {
                        return MeasurableFunction::constant(std::move(s), c);
                    })
        .def("__len__", &MeasurableFunction::size)
        .def_property_readonly("values", [](const MeasurableFunction& f) {
            return std::vector<Complex>(f.values().begin(), f.values().end());
        });

    py::class_<Rearrangement>(m, "Rearrangement")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"), py::arg("values"))
        .def_property_readonly("breakpoints", [](const Rearrangement& r) {
            return std::vector<double>(r.breakpoints().begin(), r.breakpoints().end());
        })
        .def_property_readonly("values", [](const Rearrangement& r) {
            return std::vector<double>(r.plateau_values().begin(), r.plateau_values().end());
        })
        .def_property_readonly("support_measure", &Rearrangement::support_measure)
        .def("__call__", &Rearrangement::value_at);

    py::enum_<NormKind>(m, "NormKind")
        .value("L1", NormKind::L1)
        .value("Linf", NormKind::Linf)
        .value("L1plusLinf", NormKind::L1plusLinf)
        .value("L1capLinf", NormKind::L1capLinf);

    py::class_<OrliczFunction>(m, "OrliczFunction")
        .def(py::init([](std::function<double(double)> phi, std::string name) {
                 return OrliczFunction{std::move(phi), std::move(name), 0.0};
             }),
             py::arg("phi"), py::arg("name") = "custom")
        .def_static("power", &OrliczFunction::power)
        .def("validate", &OrliczFunction::validate);

    py::class_<LorentzWeight>(m, "LorentzWeight")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("knots"), py::arg("slopes"))
        .def("__call__", &LorentzWeight::operator());

    py::class_<MajorizationResult>(m, "MajorizationResult")
        .def_readonly("holds", &MajorizationResult::holds)
        .def_readonly("at", &MajorizationResult::at)
        .def_readonly("dominated_integral", &MajorizationResult::dominated_integral)
        .def_readonly("dominating_integral", &MajorizationResult::dominating_integral)
        .def("__bool__", [](const MajorizationResult& r) { return r.holds; });

    m.def("rearrangement", &rearrangement);
    m.def("hl_integral", &hl_integral, py::arg("r"), py::arg("s"));
    m.def("majorizes",
          py::overload_cast<const MeasurableFunction&, const MeasurableFunction&, double>(&majorizes),
          py::arg("f"), py::arg("g"), py::arg("tol") = kMajorizationTolerance);
    m.def("norm", &norm);
    m.def("luxemburg_norm", &luxemburg_norm, py::arg("f"), py::arg("phi"), py::arg("tol") = 1e-12);
    m.def("lorentz_norm", &lorentz_norm);
    m.def("r_mu_tail", [](const MeasurableFunction& f, double t0) {
        const auto r = r_mu_tail(f, t0);
        return py::make_tuple(r.value, r.truncation_warning);
    });
    m.def("decompose", &decompose);
}

void bind_operators(py::module_& m) {
    py::class_<KernelOperator>(m, "KernelOperator")
        .def(py::init([](std::shared_ptr<AtomicMeasureSpace> s, const std::vector<std::vector<Complex>>& rows) {
                 return KernelOperator(std::move(s), rows);
             }),
             py::arg("space"), py::arg("matrix"))
        .def_property_readonly("matrix", [](const KernelOperator& k) {
            std::vector<std::vector<Complex>> rows;
            for (std::size_t i = 0; i < k.dim(); ++i) rows.emplace_back(k.row(i).begin(), k.row(i).end());
            return rows;
        });

    py::class_<CompositionOperator>(m, "CompositionOperator")
        .def(py::init([](std::shared_ptr<AtomicMeasureSpace> s, std::vector<std::size_t> map,
                         std::vector<Complex> mult, bool mp) {
                 return CompositionOperator(std::move(s), std::move(map), std::move(mult), mp);
             }),
             py::arg("space"), py::arg("point_map"), py::arg("multiplier"), py::arg("measure_preserving") = false)
        .def_property_readonly("point_map", [](const CompositionOperator& c) {
            return std::vector<std::size_t>(c.point_map().begin(), c.point_map().end());
        })
        .def_property_readonly("multiplier", [](const CompositionOperator& c) {
            return std::vector<Complex>(c.multiplier().begin(), c.multiplier().end());
        })
        .def_property_readonly("space", [](const CompositionOperator& c) {
            return std::const_pointer_cast<AtomicMeasureSpace>(c.space_ptr());
        });

    py::class_<DSReport>(m, "DSReport")
        .def_readonly("l1_ok", &DSReport::l1_ok)
        .def_readonly("linf_ok", &DSReport::linf_ok)
        .def_readonly("worst_column_sum", &DSReport::worst_column_sum)
        .def_readonly("worst_row_sum", &DSReport::worst_row_sum)
        .def("passes", &DSReport::passes);

    m.def("apply", py::overload_cast<const KernelOperator&, const MeasurableFunction&>(&ergo::apply));
    m.def("apply", py::overload_cast<const CompositionOperator&, const MeasurableFunction&>(&ergo::apply));
    m.def("ds_certificate", py::overload_cast<const KernelOperator&>(&ds_certificate));
    m.def("ds_certificate", py::overload_cast<const CompositionOperator&>(&ds_certificate));
    m.def("linear_modulus", &linear_modulus);
    m.def("adjoint", &adjoint);
    m.def("pairing", &pairing);
    m.def("adjoint_modulus_commutation", &adjoint_modulus_commutation);
    m.def("modulus_domination_check", [](const KernelOperator& k, const MeasurableFunction& f, std::size_t kmax) {
        const auto r = modulus_domination_check(k, f, kmax);
        return py::make_tuple(r.holds, r.min_slack);
    });
    m.def("build_counterexample_operator",
          [](std::vector<std::size_t> bp, std::size_t grid, std::size_t window) {
              return build_counterexample_operator(bp, grid, window);
          },
          py::arg("breakpoints"), py::arg("grid"), py::arg("window"));
}

void bind_weights(py::module_& m) {
    py::class_<TrigPolynomial>(m, "TrigPolynomial")
        .def(py::init([](const std::vector<std::pair<Complex, Complex>>& terms) {
            std::vector<TrigTerm> t;
            for (const auto& [z, l] : terms) t.push_back({z, l, std::nullopt});
            return TrigPolynomial(std::move(t));
        }))
        .def("__call__", &TrigPolynomial::operator())
        .def_property_readonly("terms", [](const TrigPolynomial& p) {
            std::vector<std::pair<Complex, Complex>> out;
            for (const auto& t : p.terms()) out.emplace_back(t.z, t.lambda);
            return out;
        });

    py::class_<WeightSequence>(m, "WeightSequence")
        .def_static("constant", &WeightSequence::constant)
        .def_static("periodic", &WeightSequence::periodic)
        .def_static("trig_poly", &WeightSequence::trig_poly)
        .def_static("lambda_power", &WeightSequence::lambda_power)
        .def_static("explicit_list", &WeightSequence::explicit_list, py::arg("values"),
                    py::arg("bound") = std::nullopt)
        .def_property_readonly("bound", &WeightSequence::bound)
        .def_property_readonly("normalizer", &WeightSequence::normalizer);

    m.def("eval_weight", &eval_weight);
    m.def("besicovitch_deviation", &besicovitch_deviation);
    m.def("dft_interpolant", [](const std::vector<Complex>& v) { return dft_interpolant(v); });
    m.def("validate_bound", [](const WeightSequence& w, std::uint64_t n) { return validate_bound(w, n).ok; });
}

void bind_averaging(py::module_& m) {
    py::class_<Checkpoints>(m, "Checkpoints")
        .def(py::init<std::vector<std::size_t>>())
        .def_static("geometric", &Checkpoints::geometric)
        .def_property_readonly("values", [](const Checkpoints& c) {
            return std::vector<std::size_t>(c.values().begin(), c.values().end());
        });

    py::class_<CheckpointRecord>(m, "CheckpointRecord")
        .def_readonly("n", &CheckpointRecord::n)
        .def_readonly("average", &CheckpointRecord::average)
        .def_readonly("probe_values", &CheckpointRecord::probe_values)
        .def_readonly("l1_norm", &CheckpointRecord::l1_norm)
        .def_readonly("linf_norm", &CheckpointRecord::linf_norm)
        .def_readonly("majorized", &CheckpointRecord::majorized);

    py::class_<AveragingReport>(m, "AveragingReport")
        .def_readonly("probes", &AveragingReport::probes)
        .def_readonly("records", &AveragingReport::records)
        .def_readonly("full", &AveragingReport::full)
        .def_readonly("normalizer", &AveragingReport::normalizer)
        .def_readonly("probe_oscillation", &AveragingReport::probe_oscillation);

    auto make_opts = [](std::vector<std::size_t> probes, bool full) {
        AveragingOptions o;
        o.probes = std::move(probes);
        o.retain_full = full;
        return o;
    };
    // std::variant needs default-constructible alternatives for pybind11, so
    // each operator representation gets its own overload.
    auto def_runs = [&]<class Op>(Op*) {
        m.def("cesaro",
              [make_opts](const Op& op, const MeasurableFunction& f, const Checkpoints& cps,
                          std::vector<std::size_t> probes, bool full) {
                  return cesaro(Operator{op}, f, cps, make_opts(std::move(probes), full));
              },
              py::arg("op"), py::arg("f"), py::arg("checkpoints"), py::arg("probes") = std::vector<std::size_t>{0},
              py::arg("full") = true);
        m.def("weighted",
              [make_opts](const Op& op, const MeasurableFunction& f, const WeightSequence& beta,
                          const Checkpoints& cps, std::vector<std::size_t> probes, bool full) {
                  return weighted(Operator{op}, f, beta, cps, make_opts(std::move(probes), full));
              },
              py::arg("op"), py::arg("f"), py::arg("beta"), py::arg("checkpoints"),
              py::arg("probes") = std::vector<std::size_t>{0}, py::arg("full") = true);
    };
    def_runs(static_cast<KernelOperator*>(nullptr));
    def_runs(static_cast<CompositionOperator*>(nullptr));
    m.def("oscillation",
          [](const AveragingReport& r, std::size_t probe, std::size_t first_n, std::size_t last_n) {
              return oscillation(r, probe, {first_n, last_n});
          },
          py::arg("report"), py::arg("probe"), py::arg("first_n") = 0,
          py::arg("last_n") = static_cast<std::size_t>(-1));
    m.def("majorization_trace", &majorization_trace);
}

void bind_return_times(py::module_& m) {
    py::class_<PointSystem>(m, "PointSystem")
        .def(py::init([](std::shared_ptr<AtomicMeasureSpace> s, std::vector<std::size_t> map, std::string label) {
                 return PointSystem(std::move(s), std::move(map), std::move(label));
             }),
             py::arg("space"), py::arg("map"), py::arg("label") = "")
        .def_static("rotation", &PointSystem::rotation)
        .def_property_readonly("space", [](const PointSystem& s) {
            return std::const_pointer_cast<AtomicMeasureSpace>(s.space_ptr());
        })
        .def("koopman", &PointSystem::koopman);

    m.def("character", [](std::shared_ptr<AtomicMeasureSpace> s, std::int64_t freq) {
        return character(s, freq);
    }, py::arg("space"), py::arg("frequency") = 1);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("lambdas", &SweepResult::lambdas)
        .def_readonly("probes", &SweepResult::probes)
        .def_readonly("checkpoints", &SweepResult::checkpoints)
        .def_readonly("values", &SweepResult::values)
        .def_readonly("oscillation", &SweepResult::oscillation);

    py::class_<ProductAverageReport>(m, "ProductAverageReport")
        .def_readonly("probes", &ProductAverageReport::probes)
        .def_readonly("checkpoints", &ProductAverageReport::checkpoints)
        .def_readonly("values", &ProductAverageReport::values);

    m.def("wiener_wintner_sweep",
          [](const PointSystem& sys, const MeasurableFunction& f, std::vector<std::size_t> probes,
             std::size_t grid, const Checkpoints& cps) { return wiener_wintner_sweep(sys, f, probes, grid, cps); },
          py::arg("system"), py::arg("f"), py::arg("probes"), py::arg("lambda_grid_size"), py::arg("checkpoints"));
    m.def("product_average",
          [](const PointSystem& s1, const MeasurableFunction& f, const PointSystem& s2, const MeasurableFunction& g,
             std::vector<std::pair<std::size_t, std::size_t>> probes, const Checkpoints& cps) {
              return product_average(s1, f, s2, g, probes, cps);
          });
    m.def("rotation_closed_form",
          py::overload_cast<double, Complex, double, std::size_t>(&rotation_closed_form),
          py::arg("rho"), py::arg("lam"), py::arg("omega_phase"), py::arg("n"));
}

void bind_counterexample(py::module_& m) {
    py::enum_<GridMode>(m, "GridMode").value("UnitCell", GridMode::UnitCell).value("Full", GridMode::Full);

    py::class_<StageRecord>(m, "StageRecord")
        .def_readonly("n", &StageRecord::n)
        .def_readonly("direction", &StageRecord::direction)
        .def_readonly("extremal_value", &StageRecord::extremal_value)
        .def_readonly("margin", &StageRecord::margin);

    py::class_<CounterexampleCertificate>(m, "CounterexampleCertificate")
        .def_readwrite("eps", &CounterexampleCertificate::eps)
        .def_readwrite("breakpoints", &CounterexampleCertificate::breakpoints)
        .def_readwrite("grid", &CounterexampleCertificate::grid)
        .def_readwrite("window", &CounterexampleCertificate::window)
        .def_readonly("mode", &CounterexampleCertificate::mode)
        .def_readonly("stages", &CounterexampleCertificate::stages);

    py::class_<CertificateVerification>(m, "CertificateVerification")
        .def_readonly("verified", &CertificateVerification::verified)
        .def_readonly("failed_stage", &CertificateVerification::failed_stage)
        .def_readonly("stage_margins", &CertificateVerification::stage_margins)
        .def_readonly("min_margin", &CertificateVerification::min_margin)
        .def_readonly("max_discrepancy", &CertificateVerification::max_discrepancy);

    m.def("construct_breakpoints",
          [](const Rearrangement& r, double eps, std::size_t stages, double margin, std::size_t grid,
             std::optional<std::size_t> window) {
              CounterexampleOptions o;
              o.grid = grid;
              o.window = window;
              return construct_breakpoints(r, eps, stages, margin, o);
          },
          py::arg("rearrangement"), py::arg("eps"), py::arg("stages"), py::arg("margin") = 0.0, py::arg("grid") = 1,
          py::arg("window") = std::nullopt);
    m.def("verify_certificate", &verify_certificate);
}

}  // namespace

PYBIND11_MODULE(_ergo, m) {
    m.doc() = "Ergodic averages, rearrangements and Dunford-Schwartz operators on atomic measure spaces";

    auto base = py::register_exception<Error>(m, "ErgoError");
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<BudgetError>(m, "BudgetError", base.ptr());
    py::register_exception<WindowError>(m, "WindowError", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
    py::register_exception<CapabilityError>(m, "CapabilityError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());

    bind_measure_space(m);
    bind_operators(m);
    bind_weights(m);
    bind_averaging(m);
    bind_return_times(m);
    bind_counterexample(m);
}
