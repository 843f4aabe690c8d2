#pragma once

// Subcommand dispatch for the ringmod command-line tool, kept in a header so
// the test suite can drive it in-process and assert on exit codes and
// payloads without spawning processes. Outputs are JSON by default or
// flattened CSV on request, carrying the same numbers either way; every
// payload opens with a "schema" tag. Numbers print at 17 significant digits
// so identical invocations are byte-identical across platforms. Exit codes:
// 0 success, 2 bad input (error JSON on stderr), 3 the solver ran out of
// iterations or resolution, 64 usage errors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ringmod/bounds_nd.hpp"
#include "ringmod/bracket.hpp"
#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/geometry_io.hpp"
#include "ringmod/modsolve.hpp"
#include "ringmod/qcbounds.hpp"
#include "ringmod/separation.hpp"
#include "ringmod/special2d.hpp"
#include "ringmod/testmaps.hpp"

namespace ringmod::cli {

inline constexpr const char* kSchema = "ringmod/1";

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// ---------------------------------------------------------------------------
// Output tree. A ready-made JSON writer would own its float formatting; the
// published contract is 17 significant digits, so this small ordered tree
// prints numbers itself. Non-finite numbers become null (a sibling flag
// always says why), keeping the output strict JSON.
// ---------------------------------------------------------------------------
class JValue {
public:
    static JValue object() { return JValue(Kind::object); }
    static JValue array() { return JValue(Kind::array); }
    static JValue null() { return JValue(Kind::null); }
    static JValue boolean(bool b) {
        JValue v(Kind::boolean);
        v.flag_ = b;
        return v;
    }
    static JValue number(double x) {
        if (!std::isfinite(x)) return null();
        JValue v(Kind::number);
        v.num_ = x;
        return v;
    }
    static JValue count(std::size_t n) {
        JValue v(Kind::integer);
        v.int_ = n;
        return v;
    }
    static JValue text(std::string s) {
        JValue v(Kind::text);
        v.str_ = std::move(s);
        return v;
    }
    static JValue vector(const Vec& x) {
        JValue v(Kind::array);
        for (double c : x) v.push(number(c));
        return v;
    }
    static JValue bracket(const ModulusBracket& b) {
        return object()
            .set("lo", number(b.lo))
            .set("hi", number(b.hi))
            .set("provenance", text(to_string(b.provenance)));
    }

    JValue& set(const std::string& key, JValue v) {
        fields_.emplace_back(key, std::move(v));
        return *this;
    }
    JValue& push(JValue v) {
        items_.push_back(std::move(v));
        return *this;
    }

    std::string dump() const {
        std::string out;
        write(out);
        out.push_back('\n');
        return out;
    }

    // One header line of dotted paths, one line of values.
    std::string csv() const {
        std::vector<std::pair<std::string, std::string>> cells;
        flatten("", cells);
        std::string head, row;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                head.push_back(',');
                row.push_back(',');
            }
            head += csv_cell(cells[i].first);
            row += csv_cell(cells[i].second);
        }
        return head + "\n" + row + "\n";
    }

private:
    enum class Kind { null, boolean, number, integer, text, object, array };

    explicit JValue(Kind k) : kind_(k) {}

    static std::string real_repr(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static std::string csv_cell(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q.push_back(c);
        }
        return q + "\"";
    }

    static void write_escaped(const std::string& s, std::string& out) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out += buf;
                    } else {
                        out.push_back(c);
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out) const {
        switch (kind_) {
            case Kind::null: out += "null"; return;
            case Kind::boolean: out += flag_ ? "true" : "false"; return;
            case Kind::number: out += real_repr(num_); return;
            case Kind::integer: out += std::to_string(int_); return;
            case Kind::text: write_escaped(str_, out); return;
            case Kind::array:
                out.push_back('[');
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (i) out.push_back(',');
                    items_[i].write(out);
                }
                out.push_back(']');
                return;
            case Kind::object:
                out.push_back('{');
                for (std::size_t i = 0; i < fields_.size(); ++i) {
                    if (i) out.push_back(',');
                    write_escaped(fields_[i].first, out);
                    out.push_back(':');
                    fields_[i].second.write(out);
                }
                out.push_back('}');
                return;
        }
    }

    void flatten(const std::string& prefix,
                 std::vector<std::pair<std::string, std::string>>& cells) const {
        const auto join = [&prefix](const std::string& leaf) {
            return prefix.empty() ? leaf : prefix + "." + leaf;
        };
        switch (kind_) {
            case Kind::null: cells.emplace_back(prefix, ""); return;
            case Kind::boolean: cells.emplace_back(prefix, flag_ ? "true" : "false"); return;
            case Kind::number: cells.emplace_back(prefix, real_repr(num_)); return;
            case Kind::integer: cells.emplace_back(prefix, std::to_string(int_)); return;
            case Kind::text: cells.emplace_back(prefix, str_); return;
            case Kind::array:
                for (std::size_t i = 0; i < items_.size(); ++i)
                    items_[i].flatten(join(std::to_string(i)), cells);
                return;
            case Kind::object:
                for (const auto& [key, value] : fields_) value.flatten(join(key), cells);
                return;
        }
    }

    Kind kind_ = Kind::null;
    bool flag_ = false;
    double num_ = 0.0;
    std::size_t int_ = 0;
    std::string str_;
    std::vector<std::pair<std::string, JValue>> fields_;
    std::vector<JValue> items_;
};

namespace detail_cli {

// ---------------------------------------------------------------------------
// Handlers, one per subcommand. Each returns the payload tree; errors travel
// as exceptions to the shared rim.
// ---------------------------------------------------------------------------

inline double eval_function(const std::string& fn, double arg) {
    if (fn == "mu") return mu(arg);
    if (fn == "mu_prime") return mu_prime(arg);
    if (fn == "mu_g") return mu_g(arg);
    if (fn == "mu_t") return mu_t(arg);
    if (fn == "inverse_mu") return inverse_mu(arg);
    if (fn == "elliptic_k") return elliptic_k(arg);
    if (fn == "g") return mu_t(arg) - std::log(arg);
    throw domain_error("eval: unknown function \"" + fn +
                       "\" (try mu, mu_prime, mu_g, mu_t, inverse_mu, elliptic_k, g)");
}

inline JValue run_eval(const std::string& fn, double arg) {
    return JValue::object()
        .set("schema", JValue::text(kSchema))
        .set("fn", JValue::text(fn))
        .set("arg", JValue::number(arg))
        .set("value", JValue::number(eval_function(fn, arg)));
}

inline JValue run_bounds(int n, const std::string& quantity, bool has_arg, double arg) {
    const Dimension dim(n);
    const auto need_arg = [&]() {
        if (!has_arg)
            throw domain_error("bounds: quantity \"" + quantity + "\" needs --arg");
        return arg;
    };
    ModulusBracket b = ModulusBracket::exact(0.0);
    if (quantity == "lambda") b = lambda_bracket(dim);
    else if (quantity == "a") b = a_constant(dim);
    else if (quantity == "q") b = q_constant(dim);
    else if (quantity == "omega") b = ModulusBracket::exact(omega(dim));
    else if (quantity == "gamma")
        b = gamma_tau_bracket(dim, need_arg(), CapacityFamily::gamma);
    else if (quantity == "tau") b = gamma_tau_bracket(dim, need_arg(), CapacityFamily::tau);
    else if (quantity == "phi") b = phi_bracket(dim, need_arg());
    else if (quantity == "psi") b = psi_bracket(dim, need_arg());
    else if (quantity == "re_upper")
        // the integral is only an upper bound; zero is the trivial floor
        b = ModulusBracket::analytic(0.0, re_modulus_upper(dim, need_arg()));
    else if (quantity == "lambda_estimate") {
        const double v = lambda_estimate(dim, need_arg());
        b = ModulusBracket::numeric(v, v);
    } else {
        throw domain_error("bounds: unknown quantity \"" + quantity +
                           "\" (try lambda, a, q, omega, gamma, tau, phi, psi, re_upper, "
                           "lambda_estimate)");
    }
    JValue out = JValue::object()
                     .set("schema", JValue::text(kSchema))
                     .set("n", JValue::count(static_cast<std::size_t>(n)))
                     .set("quantity", JValue::text(quantity));
    if (has_arg) out.set("arg", JValue::number(arg));
    out.set("lo", JValue::number(b.lo))
        .set("hi", JValue::number(b.hi))
        .set("provenance", JValue::text(to_string(b.provenance)));
    return out;
}

inline JValue annulus_json(const Annulus& a) {
    return JValue::object()
        .set("center", JValue::vector(a.center))
        .set("r0", JValue::number(a.r0))
        .set("r1", JValue::number(a.r1))
        .set("modulus", JValue::number(annulus_modulus(a)));
}

inline JValue run_separate(const std::string& path, const Vec& x0, double mod_lower) {
    const RingGeometry ring = ring_from_json(load_json_file(path));
    const SeparationCertificate cert = teichmuller_annulus(ring, x0, mod_lower);
    return JValue::object()
        .set("schema", JValue::text(kSchema))
        .set("annulus", annulus_json(cert.annulus))
        .set("guaranteed_modulus", JValue::number(cert.guaranteed_modulus))
        .set("input_modulus", JValue::number(cert.input_modulus))
        .set("constant_used", JValue::bracket(cert.constant_used));
}

inline JValue run_invert_annulus(const Vec& center, double r0, double r1) {
    const Annulus a(center, r0, r1);
    const double na = detail::norm(a.center);
    InversionCase which;
    if (na >= a.r1) which = InversionCase::origin_in_c1;
    else if (na <= a.r0) which = InversionCase::origin_in_c0;
    else
        throw domain_error(
            "invert-annulus: the origin lies inside the annulus itself; it must sit in one "
            "of the complementary components");
    const Annulus out = inversion_separation(a, which);
    return JValue::object()
        .set("schema", JValue::text(kSchema))
        .set("case", JValue::text(which == InversionCase::origin_in_c1 ? "origin_in_c1"
                                                                       : "origin_in_c0"))
        .set("input_modulus", JValue::number(annulus_modulus(a)))
        .set("annulus", annulus_json(out));
}

inline JValue run_uperf(const std::string& path, std::size_t radii_per_octave,
                        double c_resolution) {
    const PointSet ps = points_from_json(load_json_file(path));
    const Dimension dim(static_cast<int>(ps.points.front().size()));
    const UPGrid grid{radii_per_octave, c_resolution};
    const UPReport r = uniform_perfectness_analyze(ps.points, ps.contains_infinity, dim, grid);
    JValue out =
        JValue::object()
            .set("schema", JValue::text(kSchema))
            .set("verdict", JValue::text(r.verdict == UPVerdict::uniformly_perfect_at_resolution
                                             ? "uniformly_perfect_at_resolution"
                                             : "fails"))
            .set("c_best", JValue::number(r.c_best))
            .set("c_supremum", JValue::number(r.c_supremum))
            .set("m_bound", JValue::number(r.m_bound))
            .set("infinity_in_set", JValue::boolean(r.infinity_in_set))
            .set("point_count", JValue::count(r.point_count))
            .set("radius_count", JValue::count(r.radius_count))
            .set("min_gap", JValue::number(r.min_gap))
            .set("finite_diameter", JValue::number(r.finite_diameter))
            .set("radii_per_octave", JValue::count(r.grid.radii_per_octave))
            .set("c_resolution", JValue::number(r.grid.c_resolution));
    if (r.verdict == UPVerdict::fails)
        out.set("witness", JValue::object()
                               .set("a", JValue::vector(r.witness.a))
                               .set("r", JValue::number(r.witness.r)));
    else
        out.set("witness", JValue::null());
    return out;
}

inline void write_field_csv(const GridField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw domain_error("cannot open \"" + path + "\" for writing");
    const std::size_t dim = f.dim();
    out << (dim == 2 ? "x,y,u,state\n" : "x,y,z,u,state\n");
    char buf[40];
    for (std::size_t k = 0; k < f.shape[2]; ++k)
        for (std::size_t j = 0; j < f.shape[1]; ++j)
            for (std::size_t i = 0; i < f.shape[0]; ++i) {
                const std::size_t id = f.index(i, j, k);
                if (f.state[id] == NodeState::dead) continue;
                const Vec x = f.node_position(i, j, k);
                for (std::size_t c = 0; c < dim; ++c) {
                    std::snprintf(buf, sizeof buf, "%.17g", x[c]);
                    out << buf << ',';
                }
                std::snprintf(buf, sizeof buf, "%.17g", f.u[id]);
                out << buf << ',' << static_cast<int>(f.state[id]) << '\n';
            }
}

inline JValue run_modulus(const std::string& path, int n, double h, bool semiring,
                          const SolverOptions& opts, const std::string& field_csv) {
    ModulusEstimate est;
    if (semiring) {
        const Semiring s = semiring_from_json(load_json_file(path));
        if (s.ambient_dim() != static_cast<std::size_t>(n))
            throw domain_error("modulus: --n " + std::to_string(n) +
                               " does not match the semiring's dimension " +
                               std::to_string(s.ambient_dim()));
        est = estimate_semiring_modulus(s, h, opts);
    } else {
        const RingGeometry ring = ring_from_json(load_json_file(path));
        if (ring.dim().value() != n)
            throw domain_error("modulus: --n " + std::to_string(n) +
                               " does not match the geometry's dimension " +
                               std::to_string(ring.dim().value()));
        est = estimate_ring_modulus(ring, h, opts);
    }
    JValue out = JValue::object()
                     .set("schema", JValue::text(kSchema))
                     .set("kind", JValue::text(semiring ? "semiring" : "ring"))
                     .set("n", JValue::count(static_cast<std::size_t>(n)))
                     .set("m_gamma", JValue::number(est.m_gamma))
                     .set("mod_ring", JValue::number(est.mod_ring))
                     .set("grid_h", JValue::number(est.grid_h))
                     .set("iterations", JValue::count(static_cast<std::size_t>(est.iterations)))
                     .set("residual", JValue::number(est.residual))
                     .set("semiring_normalization",
                          JValue::boolean(est.semiring_normalization));
    if (!field_csv.empty()) {
        write_field_csv(est.field, field_csv);
        out.set("field_csv", JValue::text(field_csv));
    }
    return out;
}

inline JValue certificate_json(const HolderCertificate& cert) {
    JValue out = JValue::object()
                     .set("schema", JValue::text(kSchema))
                     .set("domain", JValue::text(cert.domain == HolderDomain::ball
                                                     ? "ball"
                                                     : "halfspace"))
                     .set("K", JValue::number(cert.params.K))
                     .set("n", JValue::count(static_cast<std::size_t>(cert.params.n.value())))
                     .set("alpha", JValue::number(cert.params.alpha))
                     .set("exponent", JValue::number(cert.exponent))
                     .set("bounded", JValue::boolean(cert.bounded))
                     .set("constant", JValue::bracket(cert.constant));
    if (cert.domain == HolderDomain::ball) {
        out.set("epsilon0", JValue::number(cert.epsilon0));
    } else {
        out.set("R", JValue::number(cert.R))
            .set("R_prime", JValue::number(cert.R_prime))
            .set("r", JValue::number(cert.r))
            .set("r_prime", JValue::bracket(cert.r_prime))
            .set("rho", JValue::number(cert.rho))
            .set("M", JValue::number(cert.M))
            .set("delta", JValue::number(cert.delta));
    }
    return out;
}

inline MoebiusMap leading_plane_rotation(std::size_t n, double angle) {
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    m[0] = std::cos(angle);
    m[1] = -std::sin(angle);
    m[n] = std::sin(angle);
    m[n + 1] = std::cos(angle);
    return MoebiusMap::rotation(std::move(m), n);
}

inline HolderCertificate make_certificate(const std::string& domain, double K, int n,
                                          double R) {
    if (domain == "ball") return holder_ball(K, Dimension(n));
    if (domain == "halfspace") return holder_halfspace(K, Dimension(n), R);
    throw domain_error("unknown domain \"" + domain + "\" (try ball, halfspace)");
}

inline JValue run_qc_verify(const std::string& map_name, const std::string& domain, double K,
                            int n, double R, std::size_t samples, std::uint64_t seed,
                            double angle) {
    const HolderCertificate cert = make_certificate(domain, K, n, R);
    TestMap map;
    if (map_name == "identity") map = TestMap();
    else if (map_name == "rotation")
        map = TestMap::moebius(leading_plane_rotation(static_cast<std::size_t>(n), angle));
    else if (map_name == "stretch") map = TestMap::radial_stretch(K);
    else
        throw domain_error("qc-verify: unknown map \"" + map_name +
                           "\" (try identity, rotation, stretch)");
    const HolderVerification v = verify_holder_empirical(map, cert, samples, seed);
    JValue out = JValue::object()
                     .set("schema", JValue::text(kSchema))
                     .set("map", JValue::text(map_name))
                     .set("domain", JValue::text(domain))
                     .set("K", JValue::number(K))
                     .set("n", JValue::count(static_cast<std::size_t>(n)));
    if (domain == "halfspace") out.set("R", JValue::number(R));
    if (map_name == "rotation") out.set("angle", JValue::number(angle));
    out.set("samples", JValue::count(v.samples))
        .set("seed", JValue::count(static_cast<std::size_t>(seed)))
        .set("exponent", JValue::number(cert.exponent))
        .set("constant_hi", JValue::number(cert.constant.hi))
        .set("max_ratio", JValue::number(v.max_ratio))
        .set("at_distance", JValue::number(v.at_distance))
        .set("pass", JValue::boolean(v.pass));
    return out;
}

struct Table {
    std::vector<double> args;
    std::vector<double> values;
};

inline Table make_table(const std::string& fn, double from, double to, int points,
                        bool log_spacing) {
    if (points < 1) throw domain_error("table: --points must be at least 1");
    if (!(to > from)) throw domain_error("table: need --to > --from");
    if (log_spacing && !(from > 0.0))
        throw domain_error("table: log spacing needs --from > 0");
    Table t;
    t.args.reserve(static_cast<std::size_t>(points));
    t.values.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double s = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double x = log_spacing ? from * std::pow(to / from, s) : from + (to - from) * s;
        t.args.push_back(x);
        t.values.push_back(eval_function(fn, x));
    }
    return t;
}

inline JValue table_json(const std::string& fn, double from, double to, int points,
                         bool log_spacing, const Table& t) {
    JValue args = JValue::array(), values = JValue::array();
    for (double a : t.args) args.push(JValue::number(a));
    for (double v : t.values) values.push(JValue::number(v));
    return JValue::object()
        .set("schema", JValue::text(kSchema))
        .set("fn", JValue::text(fn))
        .set("from", JValue::number(from))
        .set("to", JValue::number(to))
        .set("points", JValue::count(static_cast<std::size_t>(points)))
        .set("log_spacing", JValue::boolean(log_spacing))
        .set("args", std::move(args))
        .set("values", std::move(values));
}

inline std::string table_csv(const std::string& fn, const Table& t) {
    std::string out = "arg," + fn + "\n";
    char buf[40];
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", t.args[i]);
        out += buf;
        out.push_back(',');
        std::snprintf(buf, sizeof buf, "%.17g", t.values[i]);
        out += buf;
        out.push_back('\n');
    }
    return out;
}

inline std::string error_payload(const std::string& type, const std::string& message,
                                 const convergence_error* conv = nullptr) {
    JValue err = JValue::object().set("type", JValue::text(type)).set(
        "message", JValue::text(message));
    if (conv) {
        err.set("iterations", JValue::count(static_cast<std::size_t>(conv->iterations)))
            .set("residual", JValue::number(conv->residual));
    }
    return JValue::object()
        .set("schema", JValue::text(kSchema))
        .set("error", std::move(err))
        .dump();
}

} // namespace detail_cli

// Parses and runs one invocation. `args` excludes the program name.
inline CliResult cli_run(const std::vector<std::string>& args) {
    CliResult res;

    // Accepted for forward compatibility: callers may cap parallelism, and a
    // nonsense value is an input error even though the kernels run serially.
    if (const char* threads = std::getenv("RINGMOD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(threads, &end, 10);
        if (end == threads || *end != '\0' || v < 1) {
            res.err = detail_cli::error_payload(
                "domain_error", std::string("RINGMOD_THREADS must be a positive integer, got "
                                            "\"") + threads + "\"");
            res.exit_code = 2;
            return res;
        }
    }

    CLI::App app{"conformal modulus toolkit"};
    app.name("ringmod");
    app.require_subcommand(1);
    // the modulus subcommand's published flag is --h, so help must not own it
    app.set_help_flag("--help", "print help and exit");

    struct Common {
        std::string format;
        std::string out_path;
    };
    const auto add_common = [](CLI::App* cmd, Common& c, const char* default_format) {
        c.format = default_format;
        cmd->add_option("--format", c.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", c.out_path, "write the payload to this file instead of stdout");
    };

    // eval
    std::string ev_fn;
    double ev_arg = 0.0;
    Common ev_common;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a planar special function");
    eval_cmd->add_option("--fn", ev_fn, "mu | mu_prime | mu_g | mu_t | inverse_mu | elliptic_k | g")
        ->required();
    eval_cmd->add_option("--arg", ev_arg, "argument")->required();
    add_common(eval_cmd, ev_common, "json");

    // bounds
    int bd_n = 0;
    std::string bd_quantity;
    double bd_arg = 0.0;
    Common bd_common;
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "two-sided bounds for the dimensional constants");
    bounds_cmd->add_option("--n", bd_n, "ambient dimension")->required();
    bounds_cmd
        ->add_option("--quantity", bd_quantity,
                     "lambda | a | q | omega | gamma | tau | phi | psi | re_upper | "
                     "lambda_estimate")
        ->required();
    CLI::Option* bd_arg_opt = bounds_cmd->add_option("--arg", bd_arg, "argument, where needed");
    add_common(bounds_cmd, bd_common, "json");

    // separate
    std::string sp_path;
    std::vector<double> sp_x0;
    double sp_mod_lower = 0.0;
    Common sp_common;
    CLI::App* sep_cmd =
        app.add_subcommand("separate", "extract the guaranteed round annulus from a ring");
    sep_cmd->add_option("--geometry", sp_path, "ring geometry JSON file")->required();
    sep_cmd->add_option("--x0", sp_x0, "marked point on C0")->required()->expected(-1);
    sep_cmd->add_option("--mod-lower", sp_mod_lower, "certified lower bound for the modulus")
        ->required();
    add_common(sep_cmd, sp_common, "json");

    // invert-annulus
    std::vector<double> iv_center;
    double iv_r0 = 0.0, iv_r1 = 0.0;
    Common iv_common;
    CLI::App* inv_cmd =
        app.add_subcommand("invert-annulus", "separation surviving a unit-sphere inversion");
    inv_cmd->add_option("--a", iv_center, "annulus center")->required()->expected(-1);
    inv_cmd->add_option("--r0", iv_r0, "inner radius")->required();
    inv_cmd->add_option("--r1", iv_r1, "outer radius")->required();
    add_common(inv_cmd, iv_common, "json");

    // uperf
    std::string up_path;
    std::size_t up_rpo = 1;
    double up_cres = 1e-3;
    Common up_common;
    CLI::App* up_cmd =
        app.add_subcommand("uperf", "uniform perfectness analysis of a sampled set");
    up_cmd->add_option("--points", up_path, "point set JSON file")->required();
    up_cmd->add_option("--radii-per-octave", up_rpo, "radius grid refinement (default 1)");
    up_cmd->add_option("--c-resolution", up_cres, "bisection width on the reported c");
    add_common(up_cmd, up_common, "json");

    // modulus
    std::string md_path, md_field_csv;
    int md_n = 0;
    double md_h = 0.0;
    bool md_semiring = false;
    SolverOptions md_opts;
    Common md_common;
    CLI::App* mod_cmd = app.add_subcommand("modulus", "grid estimate of a ring modulus");
    mod_cmd->add_option("--geometry", md_path, "geometry JSON file (ring, or semiring with "
                                               "--semiring)")
        ->required();
    mod_cmd->add_option("--n", md_n, "ambient dimension, must match the file")->required();
    mod_cmd->add_option("--h", md_h, "grid spacing; 0 picks it from --target-nodes")
        ->required();
    mod_cmd->add_flag("--semiring", md_semiring, "read the file as a semiring");
    mod_cmd->add_option("--tol", md_opts.residual_tol, "sweep-to-sweep residual target");
    mod_cmd->add_option("--max-sweeps", md_opts.max_sweeps, "iteration budget");
    mod_cmd->add_option("--relax", md_opts.relax, "overrelaxation factor; 0 picks it");
    mod_cmd->add_option("--box-factor", md_opts.box_factor,
                        "truncation box size in chart radii; 0 picks it");
    mod_cmd->add_option("--target-nodes", md_opts.target_nodes,
                        "nodes along the longest extent when --h 0");
    mod_cmd->add_option("--field-csv", md_field_csv, "also dump the relaxed field to this CSV");
    add_common(mod_cmd, md_common, "json");

    // qc-bounds
    double qb_K = 0.0, qb_R = 1.0;
    int qb_n = 0;
    std::string qb_domain;
    Common qb_common;
    CLI::App* qb_cmd =
        app.add_subcommand("qc-bounds", "Holder continuity certificate for qc boundary maps");
    qb_cmd->add_option("--K", qb_K, "dilatation, K >= 1")->required();
    qb_cmd->add_option("--n", qb_n, "ambient dimension")->required();
    qb_cmd->add_option("--domain", qb_domain, "ball | halfspace")->required();
    qb_cmd->add_option("--R", qb_R, "half-space boundary patch radius (default 1)");
    add_common(qb_cmd, qb_common, "json");

    // qc-verify
    std::string qv_map, qv_domain = "ball";
    double qv_K = 0.0, qv_R = 1.0, qv_angle = 0.7853981633974483;
    int qv_n = 2;
    std::size_t qv_samples = 100000;
    std::uint64_t qv_seed = 0;
    Common qv_common;
    CLI::App* qv_cmd =
        app.add_subcommand("qc-verify", "sample a test map against its Holder certificate");
    qv_cmd->add_option("--map", qv_map, "identity | rotation | stretch")->required();
    qv_cmd->add_option("--K", qv_K, "certificate dilatation; also the stretch exponent")
        ->required();
    qv_cmd->add_option("--samples", qv_samples, "sample pairs (default 100000)");
    qv_cmd->add_option("--n", qv_n, "ambient dimension (default 2)");
    qv_cmd->add_option("--domain", qv_domain, "ball | halfspace (default ball)");
    qv_cmd->add_option("--R", qv_R, "half-space boundary patch radius (default 1)");
    qv_cmd->add_option("--seed", qv_seed, "sampling seed (default 0)");
    qv_cmd->add_option("--angle", qv_angle, "rotation angle in radians (default pi/4)");
    add_common(qv_cmd, qv_common, "json");

    // table
    std::string tb_fn;
    double tb_from = 0.0, tb_to = 0.0;
    int tb_points = 0;
    bool tb_log = false;
    Common tb_common;
    CLI::App* tb_cmd = app.add_subcommand("table", "tabulate a function for plotting");
    tb_cmd->add_option("--fn", tb_fn, "same names as eval")->required();
    tb_cmd->add_option("--from", tb_from, "first argument")->required();
    tb_cmd->add_option("--to", tb_to, "last argument")->required();
    tb_cmd->add_option("--points", tb_points, "row count")->required();
    tb_cmd->add_flag("--log", tb_log, "log-spaced arguments");
    add_common(tb_cmd, tb_common, "csv");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ringmod");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream out, err;
        const int code = app.exit(e, out, err);
        res.out = out.str();
        res.err = err.str();
        res.exit_code = code == 0 ? 0 : 64;
        return res;
    }

    std::string payload;
    const Common* common = nullptr;
    try {
        using namespace detail_cli;
        JValue tree = JValue::null();
        if (app.got_subcommand(eval_cmd)) {
            common = &ev_common;
            tree = run_eval(ev_fn, ev_arg);
        } else if (app.got_subcommand(bounds_cmd)) {
            common = &bd_common;
            tree = run_bounds(bd_n, bd_quantity, bd_arg_opt->count() > 0, bd_arg);
        } else if (app.got_subcommand(sep_cmd)) {
            common = &sp_common;
            tree = run_separate(sp_path, sp_x0, sp_mod_lower);
        } else if (app.got_subcommand(inv_cmd)) {
            common = &iv_common;
            tree = run_invert_annulus(iv_center, iv_r0, iv_r1);
        } else if (app.got_subcommand(up_cmd)) {
            common = &up_common;
            tree = run_uperf(up_path, up_rpo, up_cres);
        } else if (app.got_subcommand(mod_cmd)) {
            common = &md_common;
            tree = run_modulus(md_path, md_n, md_h, md_semiring, md_opts, md_field_csv);
        } else if (app.got_subcommand(qb_cmd)) {
            common = &qb_common;
            tree = certificate_json(make_certificate(qb_domain, qb_K, qb_n, qb_R));
        } else if (app.got_subcommand(qv_cmd)) {
            common = &qv_common;
            tree = run_qc_verify(qv_map, qv_domain, qv_K, qv_n, qv_R, qv_samples, qv_seed,
                                 qv_angle);
        } else {
            common = &tb_common;
            const Table t = make_table(tb_fn, tb_from, tb_to, tb_points, tb_log);
            payload = tb_common.format == "csv"
                          ? table_csv(tb_fn, t)
                          : table_json(tb_fn, tb_from, tb_to, tb_points, tb_log, t).dump();
        }
        if (payload.empty())
            payload = common->format == "csv" ? tree.csv() : tree.dump();
        if (!common->out_path.empty()) {
            std::ofstream out(common->out_path);
            if (!out) throw domain_error("cannot open \"" + common->out_path + "\" for writing");
            out << payload;
        } else {
            res.out = payload;
        }
    } catch (const insufficient_modulus_error& e) {
        res.err = detail_cli::error_payload("insufficient_modulus_error", e.what());
        res.exit_code = 2;
    } catch (const domain_error& e) {
        res.err = detail_cli::error_payload("domain_error", e.what());
        res.exit_code = 2;
    } catch (const convergence_error& e) {
        res.err = detail_cli::error_payload("convergence_error", e.what(), &e);
        res.exit_code = 3;
    } catch (const resolution_error& e) {
        res.err = detail_cli::error_payload("resolution_error", e.what());
        res.exit_code = 3;
    } catch (const std::exception& e) {
        res.err = detail_cli::error_payload("error", e.what());
        res.exit_code = 2;
    }
    return res;
}

} // namespace ringmod::cli
