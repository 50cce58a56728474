#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "tapead/detail/format.hpp"
#include "tapead/dot.hpp"
#include "tapead/forward_mode.hpp"
#include "tapead/gradcheck.hpp"
#include "tapead/parser.hpp"
#include "tapead/reverse_mode.hpp"
#include "tapead/trace.hpp"

namespace tapead::cli {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

struct Options {
    std::string expr;
    std::string at;
    std::string mode = "reverse";
    std::optional<std::string> wrt;
    bool json = false;
    bool unicode = false;
    double tolerance = 1e-5;
    std::optional<std::string> output;
};

Mode parse_mode(const std::string& m) {
    if (m == "forward") return Mode::forward;
    if (m == "reverse") return Mode::reverse;
    throw usage_error("--mode must be 'forward' or 'reverse', got '" + m + "'");
}

std::string_view mode_name(Mode m) { return m == Mode::forward ? "forward" : "reverse"; }

NodeId resolve_wrt(const Graph& g, const std::string& name) {
    if (auto id = g.find_variable(name)) {
        return *id;
    }
    throw unknown_variable("unknown variable for --wrt: '" + name + "'");
}

LoweredGraph load(const Options& o) {
    const ast::ExprPtr expr = parse(o.expr);
    return lower(*expr, parse_bindings(o.at));
}

json rows_json(const std::vector<TraceRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        a.push_back({{"name", r.name}, {"formula", r.formula}, {"value", r.value}});
    }
    return a;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const LoweredGraph lowered = load(o);
    const double y = lowered.graph.node(lowered.output).value;
    if (o.json) {
        out << json{{"value", y}}.dump() << "\n";
    } else {
        out << "y = " << detail::general(y, 6) << "\n";
    }
    return ok;
}

int cmd_grad(const Options& o, std::ostream& out) {
    const Mode mode = parse_mode(o.mode);
    LoweredGraph lowered = load(o);
    const GradientResult r = compute_gradient(lowered, mode, o.wrt);
    if (o.json) {
        json gradient = json::object();
        for (const auto& [name, g] : r.gradient) {
            gradient[name] = g;
        }
        out << json{{"value", r.value}, {"gradient", gradient}, {"mode", mode_name(mode)}}.dump() << "\n";
    } else {
        for (const auto& [name, g] : r.gradient) {
            out << "dy/d" << name << " = " << detail::general(g, 6) << "\n";
        }
    }
    return ok;
}

int cmd_trace(const Options& o, std::ostream& out) {
    const Mode mode = parse_mode(o.mode);
    LoweredGraph lowered = load(o);
    Graph& g = lowered.graph;
    const Notation notation = o.unicode ? Notation::unicode : Notation::ascii;

    Trace t;
    std::optional<std::string> wrt;
    if (mode == Mode::reverse) {
        if (o.wrt) resolve_wrt(g, *o.wrt);
        t = reverse_trace(g, lowered.output, notation);
    } else if (o.wrt || !g.variables().empty()) {
        const NodeId seed = o.wrt ? resolve_wrt(g, *o.wrt) : g.variables().front();
        wrt = g.node(seed).name;
        t = forward_trace(g, seed, notation);
    } else {
        // constant expression: nothing to seed
        t.primal = detail::primal_rows(g, notation);
    }

    if (o.json) {
        json j{{"mode", mode_name(mode)}};
        if (wrt) j["wrt"] = *wrt;
        j["primal"] = rows_json(t.primal);
        j["derivative"] = rows_json(t.derivative);
        out << j.dump() << "\n";
    } else {
        out << format_table(t);
    }
    return ok;
}

int cmd_dot(const Options& o, std::ostream& out, std::ostream& err) {
    const LoweredGraph lowered = load(o);
    const std::string dot = to_dot(lowered.graph);
    if (!o.output || *o.output == "-") {
        out << dot;
        return ok;
    }
    std::ofstream file(*o.output, std::ios::binary | std::ios::trunc);
    file << dot;
    file.close();
    if (!file) {
        err << "cannot write '" << *o.output << "'\n";
        return write_failure;
    }
    return ok;
}

int cmd_check(const Options& o, std::ostream& out) {
    if (!(o.tolerance > 0.0)) {
        throw usage_error("--tolerance must be positive");
    }
    const ast::ExprPtr expr = parse(o.expr);
    const CheckReport report = check_gradient(*expr, parse_bindings(o.at), o.tolerance);
    if (o.json) {
        json vars = json::array();
        for (const auto& v : report.variables) {
            vars.push_back({{"name", v.name}, {"ad", v.ad_value}, {"fd", v.fd_value}, {"rel_error", v.rel_error}});
        }
        out << json{{"pass", report.pass}, {"tolerance", report.tolerance}, {"variables", vars}}.dump() << "\n";
    } else {
        for (const auto& v : report.variables) {
            out << v.name << ": ad = " << detail::general(v.ad_value, 10) << ", fd = "
                << detail::general(v.fd_value, 10) << ", rel_error = " << detail::general(v.rel_error, 3) << "\n";
        }
        out << (report.pass ? "PASS" : "FAIL") << " (tolerance " << detail::general(report.tolerance, 6) << ")\n";
    }
    return report.pass ? ok : check_failed;
}

} // namespace

Bindings parse_bindings(std::string_view text) {
    Bindings b;
    text = trim(text);
    if (text.empty()) {
        return b;
    }
    for (;;) {
        const std::size_t comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw usage_error("--at expects name=value pairs, got '" + std::string(item) + "'");
        }
        const std::string_view name = trim(item.substr(0, eq));
        std::string_view number = trim(item.substr(eq + 1));
        if (!number.empty() && number.front() == '+') number.remove_prefix(1);
        double value = 0.0;
        auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
        if (name.empty() || number.empty() || ec != std::errc{} || end != number.data() + number.size()) {
            throw usage_error("invalid binding '" + std::string(item) + "'");
        }
        if (!b.emplace(std::string(name), value).second) {
            throw usage_error("variable '" + std::string(name) + "' bound twice");
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return b;
}

GradientResult compute_gradient(LoweredGraph& lowered, Mode mode, const std::optional<std::string>& wrt) {
    Graph& g = lowered.graph;
    GradientResult r;
    r.value = g.node(lowered.output).value;
    r.mode = mode;
    const std::uint64_t before = g.passes();

    if (mode == Mode::reverse) {
        if (wrt) resolve_wrt(g, *wrt);
        const NodeValues adjoints = reverse_derivatives(g, lowered.output);
        for (NodeId x : g.variables()) {
            r.gradient.emplace_back(g.node(x).name, adjoints[x]);
        }
    } else {
        std::vector<NodeId> seeds;
        if (wrt) {
            seeds.push_back(resolve_wrt(g, *wrt));
        } else {
            seeds.assign(g.variables().begin(), g.variables().end());
        }
        for (NodeId x : seeds) {
            const NodeValues tangents = forward_derivatives(g, x);
            r.gradient.emplace_back(g.node(x).name, tangents[lowered.output]);
        }
    }
    r.passes = g.passes() - before;
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scalar automatic differentiation on computational graphs", "tapead"};
    app.require_subcommand(1);

    Options o;
    auto common = [&o](CLI::App* sub) {
        sub->add_option("expr", o.expr, "expression, e.g. \"log(x1) + x1*x2 - sin(x2)\"")->required();
        sub->add_option("--at", o.at, "variable values, e.g. x1=2,x2=5");
        sub->add_flag("--json", o.json, "machine-readable output");
    };

    CLI::App* eval = app.add_subcommand("eval", "evaluate the expression");
    common(eval);

    CLI::App* grad = app.add_subcommand("grad", "gradient of the expression");
    common(grad);
    grad->add_option("--mode", o.mode, "forward or reverse (default)")->check(CLI::IsMember({"forward", "reverse"}));
    grad->add_option("--wrt", o.wrt, "single variable (forward mode)");

    CLI::App* trace = app.add_subcommand("trace", "print evaluation and derivative tables");
    common(trace);
    trace->add_option("--mode", o.mode, "forward (default) or reverse")->check(CLI::IsMember({"forward", "reverse"}));
    trace->add_option("--wrt", o.wrt, "seed variable for forward mode (default: first variable)");
    trace->add_flag("--unicode", o.unicode, "use dot/bar glyphs for tangents and adjoints");

    CLI::App* dot = app.add_subcommand("dot", "export the computational graph in Graphviz format");
    common(dot);
    dot->add_option("-o,--output", o.output, "output file (default: standard output)");

    CLI::App* check = app.add_subcommand("check", "compare reverse mode against finite differences");
    common(check);
    check->add_option("--tolerance", o.tolerance, "relative tolerance (default 1e-5)");

    std::vector<const char*> argv{"tapead"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }
    if (trace->parsed() && trace->count("--mode") == 0) {
        o.mode = "forward";
    }

    try {
        if (eval->parsed()) return cmd_eval(o, out);
        if (grad->parsed()) return cmd_grad(o, out);
        if (trace->parsed()) return cmd_trace(o, out);
        if (dot->parsed()) return cmd_dot(o, out, err);
        if (check->parsed()) return cmd_check(o, out);
    } catch (const parse_error& e) {
        err << e.what() << "\n  " << o.expr << "\n  " << std::string(e.offset(), ' ') << "^\n";
        return parse_failure;
    } catch (const unbound_variable& e) {
        err << e.what() << "\n";
        return unbound;
    } catch (const domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return domain;
    } catch (const unknown_variable& e) {
        err << e.what() << "\n";
        return unknown_wrt;
    } catch (const usage_error& e) {
        err << e.what() << "\n";
        return usage;
    }
    return usage;
}

} // namespace tapead::cli
