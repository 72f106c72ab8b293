#pragma once

#include <optional>
#include <string>
#include <vector>

#include "peck/betamm.hpp"
#include "peck/ingest.hpp"
#include "peck/metrics.hpp"

namespace peck {

// Long-format preference table row. bin 0 is the session-level aggregate.
struct PreferenceRow {
  std::string chick_id;
  int bin = 0;
  Metric metric = Metric::interface;
  std::optional<double> value;
  double chance = 0.5;
  bool truncated = false;
};

std::vector<PreferenceRow> preference_rows(const std::vector<PreferenceSeries>& series);

// CSV columns: chick_id,bin,metric,value,chance,missing,truncated
// bin is "session" for the session-level rows; value is empty when missing.
void write_preferences_csv(const std::vector<PreferenceRow>& rows, const std::string& path);
std::vector<PreferenceRow> read_preferences_csv(const std::string& path);

// Per-bin observations of one metric, ready for model fitting (bins with
// missing values are dropped; the SV transform is applied by the caller).
ModelData model_data_from_rows(const std::vector<PreferenceRow>& rows, Metric metric);

struct QcTableRow {
  std::string chick_id;
  std::string file;
  QcReport qc;
  long rejected_rows = 0;
  int max_gap_s = 0;
  int n_interpolated = 0;
  int n_clamped = 0;
  std::string status;  // ok | excluded
  std::string reason;  // qc_failed | parse_error | ...
};

void write_qc_table_csv(const std::vector<QcTableRow>& rows, const std::string& path);

// Human-readable fit report mirroring the quantities a results section quotes:
// coefficients, the Type III Wald test, per-bin and overall estimated marginal
// means with tests against chance, AIC, and convergence diagnostics.
std::string render_fit_report(Metric metric, const ModelFit& fit, const WaldResult& wald,
                              const EmmResult& emm, long sv_n);

// Line chart of per-bin estimated means with SE bars, an offset overall
// point, and a dashed chance-level line. Self-contained SVG, no plotting
// dependency. The chance value is also embedded as a data-chance attribute.
void write_preference_figure_svg(Metric metric, const EmmResult& emm,
                                 const std::string& title, const std::string& path);

// The numeric table behind the figure.
void write_figure_data_csv(Metric metric, const EmmResult& emm, const std::string& path);

}  // namespace peck
