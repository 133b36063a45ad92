#pragma once

// CSV and JSON forms of tables, scenarios, models and reports. Doubles are
// written with 17 significant digits and read back bit-exactly; no locale is
// involved.

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bellmom/inequalities.hpp"
#include "bellmom/lhv.hpp"
#include "bellmom/scenario.hpp"
#include "bellmom/weakmeas.hpp"

namespace bellmom::io {

using Json = nlohmann::ordered_json;

std::string format_double(double v);  ///< "nan", "inf", "-inf" for non-finite values
/// Throws Parse.
double parse_double(std::string_view text);
/// Finite values as numbers, everything else as null.
Json number(double v);

std::string_view to_string(ineq::TableCheck check);
ineq::TableCheck parse_table_check(std::string_view text);

/// Header "x,y,k,l,value", one row per entry.
std::string table_to_csv(const ineq::MomentTable& t);
/// Rows may come in any order; every (x, y, k, l) must appear exactly once.
/// Throws Parse or the MomentTable validation errors.
ineq::MomentTable table_from_csv(std::string_view text,
                                 ineq::TableCheck check = ineq::TableCheck::Exact);

Json to_json(const ineq::MomentTable& t);
ineq::MomentTable table_from_json(const Json& j);

Json to_json(const BipartiteScenario& s);
/// Throws Parse, plus the scenario validation errors.
BipartiteScenario scenario_from_json(const Json& j);

Json to_json(const ineq::InequalityReport& r);
Json to_json(const lhv::LhvModel& m);

/// Header "x,y,a,a_prime,b,b_prime"; the primed columns are empty for Subtract.
void write_records_header(std::ostream& out);
void write_records_csv(std::ostream& out, int x, int y, const weak::OutcomeRecords& r);

Json to_json(const weak::WeakConfig& c);
/// Estimated moments with standard errors per pair; degenerate errors are null.
Json to_json(const weak::WeakTable& t);

/// Throws Io.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace bellmom::io
