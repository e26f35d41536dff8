#pragma once

// JSON model files for the command-line tool.
//
//   {
//     "model": "wave" | {"name": "perfect_gas", "gamma": 1.4, ...},
//     "chart": {"m": 1, "n": 1},          // custom models only
//     "hamiltonian": "p1_1^2/2 + u1^2/2",  // custom models only
//     "currents": [{"name": "c", "Y": ["1"], "beta": ["0", "0"]},
//                  {"name": "f", "f": "u1*p1_1"}],   // m = 1
//     "points": [{"x1": 0, "u1": 1, "p1_1": 0}],
//     "solver": {"dt": 0.01, "K": 128, "x_min": 0, "x_max": 6.28,
//                "t0": 0, "t_final": 1, "boundary": "periodic",
//                "reconstruction": "closed_form", "snapshot_every": 1,
//                "newton_tol": 1e-12, "newton_max_iter": 50, "scheme": "rk4"},
//     "initial": {"u": ["sin(x)"], "M": ["-cos(x)"]},  // fields, in x
//     "output": {"csv": "trajectory.csv", "manifest": "manifest.json",
//                "plot": "plot.dat", "plot_stride": 4}
//   }
//
// m = 1 initial data are numbers: {"u": [1.0], "p": [0.0]}. Yang-Mills
// initial data are {"A": [...], "E": [...]} expressions in x. Unknown keys
// anywhere are rejected.

#include <optional>
#include <string>
#include <vector>

#include "hdw/bracket.hpp"
#include "hdw/models.hpp"
#include "hdw/solver.hpp"

namespace hdw {

// Schema violations; reported as usage errors by the CLI.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct NamedFunction {
  std::string name;
  Expression f;
};

struct OutputPaths {
  std::string csv = "trajectory.csv";
  std::string manifest = "manifest.json";
  std::string plot;  // empty: no plot data
  int plot_stride = 1;
};

struct ModelFile {
  std::string name;  // builtin name or "custom"
  Chart chart{1, 1};
  HamiltonianSection h{Chart(1, 1), 0.0};
  std::optional<ContinuumSpec> continuum;
  std::optional<YangMillsModel> yang_mills;

  std::vector<Current> currents;          // m >= 2
  std::vector<NamedFunction> functions;   // m = 1
  std::vector<Binding> points;

  bool has_solver = false;
  bool reconstruction_given = false;
  SolverConfig solver;
  OutputPaths output;

  // Initial data: expressions in x for fields and Yang-Mills, numbers for m = 1.
  std::vector<Expression> u0, M0, A0, E0;
  std::vector<double> ode_u0, ode_p0;

  std::vector<std::string> current_names() const;
};

const std::vector<std::string>& builtin_model_names();

ModelFile parse_model_file(const std::string& json_text);
ModelFile load_model_file(const std::string& path);

// The field model used by `simulate` for an m = 2 model file.
FieldModel field_model_for(const ModelFile& mf);

}  // namespace hdw
