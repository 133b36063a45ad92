#include "bellmom/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bellmom/error.hpp"

namespace bellmom::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.push_back(trim(line.substr(start, p == std::string_view::npos ? p : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::Parse, "not an integer: '" + std::string(s) + "'");
  return v;
}

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::Parse, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("field '") + key + "': " + e.what());
  }
}

Json complex_json(qcore::Complex c) { return Json::array({c.real(), c.imag()}); }

qcore::Complex complex_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::Parse, "complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_json(const qcore::ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

qcore::ComplexMatrix matrix_from(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Parse, "matrix must be a nonempty array");
  const std::size_t n = j.size();
  qcore::ComplexMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n)
      throw Error(ErrorCode::Parse, "matrix must be square");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = complex_from(j[r][c]);
  }
  return m;
}

std::vector<qcore::Observable> observables_from(const Json& j, qcore::Party party) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, "observable list must be an array");
  std::vector<qcore::Observable> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int choice = j[i].is_object() && j[i].contains("choice") ? get<int>(j[i], "choice")
                                                                    : static_cast<int>(i) + 1;
    const Json& op = j[i].is_object() ? j[i].at("matrix") : j[i];
    out.emplace_back(party, choice, matrix_from(op));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view text) {
  const auto s = trim(text);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::Parse, "not a number: '" + std::string(s) + "'");
  return v;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string_view to_string(ineq::TableCheck check) {
  switch (check) {
    case ineq::TableCheck::Exact: return "exact";
    case ineq::TableCheck::Sampled: return "sampled";
    case ineq::TableCheck::Statistical: return "statistical";
  }
  return "exact";
}

ineq::TableCheck parse_table_check(std::string_view text) {
  if (text == "exact") return ineq::TableCheck::Exact;
  if (text == "sampled") return ineq::TableCheck::Sampled;
  if (text == "statistical") return ineq::TableCheck::Statistical;
  throw Error(ErrorCode::Parse, "unknown table check '" + std::string(text) + "'");
}

std::string table_to_csv(const ineq::MomentTable& t) {
  std::string out = "x,y,k,l,value\n";
  for (int x = 1; x <= t.choices_a(); ++x)
    for (int y = 1; y <= t.choices_b(); ++y)
      for (int k = 0; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l) {
          out += std::to_string(x) + ',' + std::to_string(y) + ',' + std::to_string(k) + ',' +
                 std::to_string(l) + ',' + format_double(t(x, y, k, l)) + '\n';
        }
  return out;
}

ineq::MomentTable table_from_csv(std::string_view text, ineq::TableCheck check) {
  struct Row {
    int x, y, k, l;
    double v;
  };
  std::vector<Row> rows;
  int ma = 0, mb = 0;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (header) {
      header = false;
      if (f.size() != 5 || f[0] != "x" || f[1] != "y" || f[2] != "k" || f[3] != "l" ||
          f[4] != "value")
        throw Error(ErrorCode::Parse, "expected header x,y,k,l,value");
      continue;
    }
    if (f.size() != 5) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": 5 fields expected");
    Row r{parse_int(f[0]), parse_int(f[1]), parse_int(f[2]), parse_int(f[3]), parse_double(f[4])};
    if (r.x < 1 || r.y < 1 || r.k < 0 || r.k > 2 || r.l < 0 || r.l > 2)
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": index out of range");
    ma = std::max(ma, r.x);
    mb = std::max(mb, r.y);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, "table CSV has no rows");
  const std::size_t n = ineq::MomentTable::size_for(ma, mb);
  if (rows.size() != n)
    throw Error(ErrorCode::Parse, "expected " + std::to_string(n) + " rows, got " +
                                      std::to_string(rows.size()));
  std::vector<double> v(n);
  std::vector<char> seen(n, 0);
  for (const auto& r : rows) {
    const std::size_t i = ((static_cast<std::size_t>(r.x - 1) * mb + (r.y - 1)) * 3 + r.k) * 3 + r.l;
    if (seen[i]) throw Error(ErrorCode::Parse, "duplicate row for one (x, y, k, l)");
    seen[i] = 1;
    v[i] = r.v;
  }
  return ineq::MomentTable(ma, mb, std::move(v), check);
}

Json to_json(const ineq::MomentTable& t) {
  Json j;
  j["choices_a"] = t.choices_a();
  j["choices_b"] = t.choices_b();
  j["check"] = std::string(to_string(t.check()));
  j["entries"] = std::vector<double>(t.entries().begin(), t.entries().end());
  return j;
}

ineq::MomentTable table_from_json(const Json& j) {
  const auto check = j.contains("check") ? parse_table_check(get<std::string>(j, "check"))
                                         : ineq::TableCheck::Exact;
  return ineq::MomentTable(get<int>(j, "choices_a"), get<int>(j, "choices_b"),
                           get<std::vector<double>>(j, "entries"), check);
}

Json to_json(const BipartiteScenario& s) {
  Json j;
  Json state;
  state["dim_a"] = s.state().dim_a();
  state["dim_b"] = s.state().dim_b();
  Json amps = Json::array();
  for (const auto& c : s.state().amplitudes()) amps.push_back(complex_json(c));
  state["amplitudes"] = std::move(amps);
  j["state"] = std::move(state);
  for (const auto* side : {"obs_a", "obs_b"}) {
    const auto& obs = std::string_view(side) == "obs_a" ? s.obs_a() : s.obs_b();
    Json list = Json::array();
    for (const auto& o : obs) {
      Json e;
      e["choice"] = o.choice();
      e["matrix"] = matrix_json(o.op());
      list.push_back(std::move(e));
    }
    j[side] = std::move(list);
  }
  return j;
}

BipartiteScenario scenario_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("state")) throw Error(ErrorCode::Parse, "missing field 'state'");
  const Json& st = j.at("state");
  const auto da = get<std::size_t>(st, "dim_a");
  const auto db = get<std::size_t>(st, "dim_b");
  if (!st.contains("amplitudes") || !st.at("amplitudes").is_array())
    throw Error(ErrorCode::Parse, "missing field 'amplitudes'");
  std::vector<qcore::Complex> amps;
  for (const auto& c : st.at("amplitudes")) amps.push_back(complex_from(c));
  const bool normalize = st.value("normalize", false);
  qcore::BipartiteState state = normalize ? qcore::BipartiteState::normalized(da, db, std::move(amps))
                                          : qcore::BipartiteState(da, db, std::move(amps));
  if (!j.contains("obs_a") || !j.contains("obs_b"))
    throw Error(ErrorCode::Parse, "missing observable lists 'obs_a' / 'obs_b'");
  return BipartiteScenario(std::move(state), observables_from(j.at("obs_a"), qcore::Party::A),
                           observables_from(j.at("obs_b"), qcore::Party::B));
}

Json to_json(const ineq::InequalityReport& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["margin"] = number(r.margin);
  j["satisfied"] = r.satisfied;
  return j;
}

Json to_json(const lhv::LhvModel& m) {
  Json j;
  j["N"] = m.N;
  j["choices_b"] = m.choices_b;
  Json cells = Json::array();
  for (const auto& c : m.cells) {
    Json e;
    e["index_plus"] = c.index_plus;
    e["index_minus"] = c.index_minus;
    e["weight"] = c.weight;
    e["a_plus"] = c.a_plus;
    e["a_minus"] = c.a_minus;
    Json b = Json::array();
    for (const auto& cond : c.b) {
      Json d;
      d["kind"] = cond.kind == lhv::Conditional::Kind::Gaussian ? "gaussian" : "delta";
      d["mean"] = cond.mean;
      d["variance"] = cond.variance;
      b.push_back(std::move(d));
    }
    e["b"] = std::move(b);
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  const auto& d = m.diagnostics;
  Json diag;
  diag["dropped_cells"] = d.dropped_cells;
  diag["lost_second_moment"] = d.lost_second_moment;
  diag["weight_sum"] = d.weight_sum;
  diag["min_raw_variance"] = d.min_raw_variance;
  diag["max_cbs_excess"] = d.max_cbs_excess;
  diag["c_plus"] = d.c_plus;
  diag["c_minus"] = d.c_minus;
  diag["c_positive"] = d.c_positive;
  j["diagnostics"] = std::move(diag);
  return j;
}

void write_records_header(std::ostream& out) { out << "x,y,a,a_prime,b,b_prime\n"; }

void write_records_csv(std::ostream& out, int x, int y, const weak::OutcomeRecords& r) {
  const bool twin = r.scheme == weak::Scheme::Twin;
  std::string line;
  for (std::size_t i = 0; i < r.size(); ++i) {
    line.clear();
    line += std::to_string(x);
    line += ',';
    line += std::to_string(y);
    line += ',';
    line += format_double(r.a[i]);
    line += ',';
    if (twin) line += format_double(r.a_prime[i]);
    line += ',';
    line += format_double(r.b[i]);
    line += ',';
    if (twin) line += format_double(r.b_prime[i]);
    line += '\n';
    out << line;
  }
}

Json to_json(const weak::WeakConfig& c) {
  Json j;
  j["g"] = c.g;
  j["scheme"] = std::string(weak::to_string(c.scheme));
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["noise_variance"] = c.noise_variance();
  return j;
}

Json to_json(const weak::WeakTable& t) {
  Json j;
  j["config"] = to_json(t.config);
  j["table"] = to_json(t.table);
  Json pairs = Json::array();
  for (int x = 1; x <= t.table.choices_a(); ++x)
    for (int y = 1; y <= t.table.choices_b(); ++y) {
      const auto& p = t.pair(x, y);
      Json e;
      e["x"] = x;
      e["y"] = y;
      e["count"] = p.count;
      e["stderr_degenerate"] = p.stderr_degenerate;
      Json moments = Json::array();
      for (int k = 0; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l) {
          Json m;
          m["k"] = k;
          m["l"] = l;
          m["value"] = number(p(k, l));
          m["stderr"] = number(p.error(k, l));
          moments.push_back(std::move(m));
        }
      e["moments"] = std::move(moments);
      pairs.push_back(std::move(e));
    }
  j["pairs"] = std::move(pairs);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace bellmom::io
