#include "quasix.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/error.hpp"
#include "core/exact_test.hpp"
#include "core/fiber.hpp"
#include "core/markov_basis.hpp"
#include "core/mle.hpp"
#include "core/model_matrix.hpp"
#include "core/table.hpp"

using nlohmann::json;

struct qx_table {
  quasix::StackedTable table;
};
struct qx_model {
  quasix::ModelMatrix matrix;
};
struct qx_basis {
  quasix::MarkovBasis basis;
};
struct qx_result {
  quasix::TestResult result;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
qx_status guarded(Fn&& fn) {
  try {
    fn();
    return QX_OK;
  } catch (const quasix::ParseError& e) {
    g_last_error = e.what();
    return QX_ERROR_PARSE;
  } catch (const quasix::Unsupported& e) {
    g_last_error = e.what();
    return QX_ERROR_UNSUPPORTED;
  } catch (const quasix::CapExceeded& e) {
    g_last_error = e.what();
    return QX_ERROR_CAP_EXCEEDED;
  } catch (const quasix::InvalidArgument& e) {
    g_last_error = e.what();
    return QX_ERROR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QX_ERROR_INTERNAL;
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw quasix::InvalidArgument(message);
}

quasix::BaseModel parse_base(const char* model) {
  require(model != nullptr, "model name is NULL");
  const std::string m(model);
  if (m == "independence" || m == "ind") return quasix::BaseModel::independence;
  if (m == "quasi-independence" || m == "qi") {
    return quasix::BaseModel::quasi_independence;
  }
  if (m == "quasi-symmetry" || m == "qs") {
    return quasix::BaseModel::quasi_symmetry;
  }
  throw quasix::InvalidArgument(
      "unknown model '" + m +
      "' (expected independence|quasi-independence|quasi-symmetry)");
}

quasix::Stacking parse_stack(const char* stack) {
  require(stack != nullptr, "stacking name is NULL");
  const std::string s(stack);
  if (s == "single") return quasix::Stacking::single;
  if (s == "m0") return quasix::Stacking::m0;
  if (s == "m1") return quasix::Stacking::m1;
  if (s == "m2") return quasix::Stacking::m2;
  throw quasix::InvalidArgument("unknown stacking '" + s +
                                "' (expected single|m0|m1|m2)");
}

quasix::ModelSpec spec_for_table(const quasix::StackedTable& table,
                                 const char* model, const char* stack) {
  quasix::ModelSpec spec;
  spec.base = parse_base(model);
  spec.stacking = parse_stack(stack);
  spec.size = table.size();
  spec.layers = table.layers();
  spec.validate();
  return spec;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void fill_fit_report(const quasix::G2Report& g2, const quasix::FitResult& fit,
                     qx_fit_report* out) {
  out->statistic = g2.statistic;
  out->df = g2.df;
  out->p_asymptotic = g2.p_asymptotic;
  out->boundary = g2.boundary ? 1 : 0;
  out->converged = fit.converged ? 1 : 0;
  out->iterations = fit.iterations;
}

std::optional<quasix::ModelSpec> parse_alt_spec(
    const quasix::StackedTable& table, const char* model, const char* alt) {
  require(alt != nullptr, "alternative name is NULL");
  if (std::string(alt) == "saturated") return std::nullopt;
  return spec_for_table(table, model, alt);
}

}  // namespace

extern "C" {

const char* qx_last_error(void) { return g_last_error.c_str(); }

const char* qx_status_name(qx_status status) {
  switch (status) {
    case QX_OK: return "ok";
    case QX_ERROR_INVALID: return "invalid argument";
    case QX_ERROR_PARSE: return "parse error";
    case QX_ERROR_UNSUPPORTED: return "unsupported";
    case QX_ERROR_CAP_EXCEEDED: return "cap exceeded";
    case QX_ERROR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void qx_string_free(char* text) { delete[] text; }

qx_status qx_table_read_csv(const char* path, qx_table** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    *out = new qx_table{quasix::read_csv_file(path)};
  });
}

qx_status qx_table_create(int size, int layers, const int64_t* counts,
                          qx_table** out) {
  return guarded([&] {
    require(counts != nullptr && out != nullptr, "NULL argument");
    const std::size_t n =
        static_cast<std::size_t>(size) * size * (layers > 0 ? layers : 0);
    *out = new qx_table{quasix::StackedTable(
        size, layers, std::vector<std::int64_t>(counts, counts + n))};
  });
}

qx_status qx_table_stack(const qx_table* const* tables, int count,
                         qx_table** out) {
  return guarded([&] {
    require(tables != nullptr && out != nullptr, "NULL argument");
    require(count >= 1, "at least one table required");
    std::vector<quasix::SquareTable> layers;
    for (int t = 0; t < count; ++t) {
      require(tables[t] != nullptr, "NULL table in list");
      const quasix::StackedTable& stacked = tables[t]->table;
      for (int h = 1; h <= stacked.layers(); ++h) {
        layers.push_back(stacked.layer(h));
      }
    }
    *out = new qx_table{quasix::StackedTable::from_layers(layers)};
  });
}

qx_status qx_table_layer(const qx_table* table, int layer, qx_table** out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "NULL argument");
    *out = new qx_table{
        quasix::StackedTable::from_square(table->table.layer(layer))};
  });
}

void qx_table_free(qx_table* table) { delete table; }

int qx_table_size(const qx_table* table) {
  return table ? table->table.size() : 0;
}

int qx_table_layers(const qx_table* table) {
  return table ? table->table.layers() : 0;
}

int64_t qx_table_count(const qx_table* table, int row, int col, int layer) {
  if (table == nullptr) return -1;
  try {
    return table->table.at(row, col, layer);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return -1;
  }
}

int64_t qx_table_total(const qx_table* table) {
  return table ? table->table.total() : -1;
}

int64_t qx_table_layer_total(const qx_table* table, int layer) {
  if (table == nullptr) return -1;
  try {
    return table->table.layer_total(layer);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return -1;
  }
}

qx_status qx_model_create(const char* model, const char* stack, int size,
                          int layers, qx_model** out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    quasix::ModelSpec spec;
    spec.base = parse_base(model);
    spec.stacking = parse_stack(stack);
    spec.size = size;
    spec.layers = layers;
    spec.validate();
    *out = new qx_model{quasix::build_model_matrix(spec)};
  });
}

void qx_model_free(qx_model* model) { delete model; }

int qx_model_rows(const qx_model* model) {
  return model ? model->matrix.rows() : 0;
}

int qx_model_cols(const qx_model* model) {
  return model ? model->matrix.cols() : 0;
}

int qx_model_rank(const qx_model* model) {
  return model ? model->matrix.rank() : 0;
}

int qx_model_entry(const qx_model* model, int row, int col) {
  if (model == nullptr || row < 0 || row >= model->matrix.rows() || col < 0 ||
      col >= model->matrix.cols()) {
    return 0;
  }
  return model->matrix.entry(row, col);
}

qx_status qx_model_format(const qx_model* model, char** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(quasix::format_matrix(model->matrix));
  });
}

qx_status qx_nested_df(const qx_model* null_model, const qx_model* alt_model,
                       int* out_df) {
  return guarded([&] {
    require(null_model != nullptr && alt_model != nullptr && out_df != nullptr,
            "NULL argument");
    *out_df = quasix::nested_df(null_model->matrix, alt_model->matrix);
  });
}

qx_status qx_basis_create(const char* model, const char* stack, int size,
                          int layers, qx_basis** out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    quasix::ModelSpec spec;
    spec.base = parse_base(model);
    spec.stacking = parse_stack(stack);
    spec.size = size;
    spec.layers = layers;
    spec.validate();
    *out = new qx_basis{quasix::build_markov_basis(spec)};
  });
}

void qx_basis_free(qx_basis* basis) { delete basis; }

int64_t qx_basis_count(const qx_basis* basis) {
  return basis ? static_cast<int64_t>(basis->basis.count()) : -1;
}

int qx_basis_cells(const qx_basis* basis) {
  return basis ? basis->basis.spec.cells() : 0;
}

int qx_basis_entry(const qx_basis* basis, int64_t move, int cell) {
  if (basis == nullptr || move < 0 ||
      move >= static_cast<int64_t>(basis->basis.count()) || cell < 0 ||
      cell >= basis->basis.spec.cells()) {
    return 0;
  }
  return basis->basis.moves[static_cast<std::size_t>(move)].entries[cell];
}

qx_status qx_basis_format(const qx_basis* basis, const char* format,
                          char** out) {
  return guarded([&] {
    require(basis != nullptr && format != nullptr && out != nullptr,
            "NULL argument");
    const std::string f(format);
    quasix::BasisFormat bf;
    if (f == "moves") {
      bf = quasix::BasisFormat::moves;
    } else if (f == "matrix") {
      bf = quasix::BasisFormat::matrix;
    } else {
      throw quasix::InvalidArgument("unknown basis format '" + f +
                                    "' (expected moves|matrix)");
    }
    *out = copy_string(quasix::format_basis(basis->basis, bf));
  });
}

qx_status qx_fit_gof(const qx_table* table, const char* model,
                     const char* stack, qx_fit_report* out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "NULL argument");
    const quasix::ModelSpec spec = spec_for_table(table->table, model, stack);
    const quasix::ModelMatrix matrix = quasix::build_model_matrix(spec);
    const quasix::FitResult fit = quasix::fit(matrix, table->table.counts());
    const quasix::G2Report g2 =
        quasix::g2_gof(table->table.counts(), fit, matrix);
    fill_fit_report(g2, fit, out);
  });
}

qx_status qx_fit_nested(const qx_table* table, const char* model,
                        const char* null_stack, const char* alt_stack,
                        qx_fit_report* out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "NULL argument");
    const quasix::ModelSpec null_spec =
        spec_for_table(table->table, model, null_stack);
    const quasix::ModelSpec alt_spec =
        spec_for_table(table->table, model, alt_stack);
    const quasix::ModelMatrix null_matrix = quasix::build_model_matrix(null_spec);
    const quasix::ModelMatrix alt_matrix = quasix::build_model_matrix(alt_spec);
    const int df = quasix::nested_df(null_matrix, alt_matrix);
    const quasix::FitResult null_fit =
        quasix::fit(null_matrix, table->table.counts());
    const quasix::FitResult alt_fit =
        quasix::fit(alt_matrix, table->table.counts());
    const quasix::G2Report g2 =
        quasix::g2_nested(table->table.counts(), null_fit, alt_fit, df);
    qx_fit_report report;
    fill_fit_report(g2, null_fit, &report);
    report.converged = (null_fit.converged && alt_fit.converged) ? 1 : 0;
    report.iterations = null_fit.iterations + alt_fit.iterations;
    *out = report;
  });
}

qx_status qx_fitted_values(const qx_table* table, const char* model,
                           const char* stack, double* out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "NULL argument");
    const quasix::ModelSpec spec = spec_for_table(table->table, model, stack);
    const quasix::ModelMatrix matrix = quasix::build_model_matrix(spec);
    const quasix::FitResult fit = quasix::fit(matrix, table->table.counts());
    std::copy(fit.fitted.begin(), fit.fitted.end(), out);
  });
}

qx_status qx_chi_square_sf(double x, int df, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    *out = quasix::chi_square_sf(x, df);
  });
}

void qx_walk_config_init(qx_walk_config* config) {
  if (config == nullptr) return;
  const quasix::WalkConfig defaults;
  config->burn_in = defaults.burn_in;
  config->thinning = defaults.thinning;
  config->samples = defaults.samples;
  config->seed = defaults.seed;
}

qx_status qx_exact_test(const qx_table* table, const char* model,
                        const char* null_stack, const char* alt,
                        const qx_walk_config* config, qx_result** out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "NULL argument");
    const quasix::ModelSpec null_spec =
        spec_for_table(table->table, model, null_stack);
    const std::optional<quasix::ModelSpec> alt_spec =
        parse_alt_spec(table->table, model, alt);
    quasix::WalkConfig walk;
    if (config != nullptr) {
      walk.burn_in = config->burn_in;
      walk.thinning = config->thinning;
      walk.samples = config->samples;
      walk.seed = config->seed;
    }
    const quasix::MarkovBasis basis = quasix::build_markov_basis(null_spec);
    *out = new qx_result{
        quasix::exact_pvalue(table->table, null_spec, alt_spec, basis, walk)};
  });
}

void qx_result_free(qx_result* result) { delete result; }

double qx_result_statistic(const qx_result* r) {
  return r ? r->result.statistic : 0.0;
}
int qx_result_df(const qx_result* r) { return r ? r->result.df : 0; }
double qx_result_p_exact(const qx_result* r) {
  return r ? r->result.p_exact : 0.0;
}
double qx_result_mc_se(const qx_result* r) { return r ? r->result.mc_se : 0.0; }
double qx_result_p_asymptotic(const qx_result* r) {
  return r ? r->result.p_asymptotic : 0.0;
}
double qx_result_acceptance_rate(const qx_result* r) {
  return r ? r->result.acceptance_rate : 0.0;
}
double qx_result_sampled_min(const qx_result* r) {
  return r ? r->result.sampled.min : 0.0;
}
double qx_result_sampled_median(const qx_result* r) {
  return r ? r->result.sampled.median : 0.0;
}
double qx_result_sampled_max(const qx_result* r) {
  return r ? r->result.sampled.max : 0.0;
}
int64_t qx_result_samples(const qx_result* r) {
  return r ? r->result.samples : 0;
}
uint64_t qx_result_seed(const qx_result* r) { return r ? r->result.seed : 0; }

qx_status qx_result_json(const qx_result* result, char** out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "NULL argument");
    const quasix::TestResult& r = result->result;
    json j{{"statistic", r.statistic},
           {"df", r.df},
           {"p_exact", r.p_exact},
           {"mc_se", r.mc_se},
           {"p_asymptotic", r.p_asymptotic},
           {"acceptance_rate", r.acceptance_rate},
           {"samples", r.samples},
           {"seed", r.seed},
           {"sampled",
            {{"min", r.sampled.min},
             {"median", r.sampled.median},
             {"max", r.sampled.max}}}};
    *out = copy_string(j.dump(2));
  });
}

qx_status qx_fiber_size(const qx_table* table, const char* model,
                        const char* stack, int64_t cap, int64_t* out_size) {
  return guarded([&] {
    require(table != nullptr && out_size != nullptr, "NULL argument");
    const quasix::ModelSpec spec = spec_for_table(table->table, model, stack);
    const quasix::ModelMatrix matrix = quasix::build_model_matrix(spec);
    const quasix::Fiber fiber = quasix::enumerate_fiber(
        matrix, table->table.counts(),
        cap > 0 ? cap : quasix::kDefaultNodeCap);
    *out_size = static_cast<int64_t>(fiber.size());
  });
}

qx_status qx_fiber_exact_pvalue(const qx_table* table, const char* model,
                                const char* null_stack, const char* alt,
                                int64_t cap, double* out_p) {
  return guarded([&] {
    require(table != nullptr && out_p != nullptr, "NULL argument");
    const quasix::ModelSpec null_spec =
        spec_for_table(table->table, model, null_stack);
    const std::optional<quasix::ModelSpec> alt_spec =
        parse_alt_spec(table->table, model, alt);
    const quasix::ModelMatrix null_matrix =
        quasix::build_model_matrix(null_spec);
    std::optional<quasix::ModelMatrix> alt_matrix;
    if (alt_spec.has_value()) {
      alt_matrix = quasix::build_model_matrix(*alt_spec);
    }
    const quasix::G2Evaluator evaluator(null_matrix,
                                        alt_matrix ? &*alt_matrix : nullptr);
    const quasix::Fiber fiber = quasix::enumerate_fiber(
        null_matrix, table->table.counts(),
        cap > 0 ? cap : quasix::kDefaultNodeCap);
    const double observed = evaluator(table->table.counts());
    *out_p = quasix::exact_pvalue_enumeration(
        fiber,
        [&](std::span<const std::int64_t> t) { return evaluator(t); },
        observed);
  });
}

}  // extern "C"
