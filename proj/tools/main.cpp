// tsnnc: command-line front end.
//
//   tsnnc validate CONFIG
//   tsnnc analyze  CONFIG [--credit-mode M] [--shaping S] [--output F] [--dump-curves DIR]
//   tsnnc simulate CONFIG [--credit-mode M] [--sim-time-us T] [--seed N] [--phase-policy P] [--output F]
//   tsnnc compare  CONFIG [analysis and simulation flags]
//
// Exit codes: 0 success, 1 invalid input or config, 2 unstable network.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tsnnc/analysis.hpp"
#include "tsnnc/simulator.hpp"

using namespace tsnnc;
namespace fs = std::filesystem;

namespace {

enum class Format { Csv, Json, Table };

struct Options {
    std::string config;
    std::string credit_mode;  // empty: take it from the config
    std::string shaping = "full";
    std::string output = "table";
    std::string dump_dir;
    double sim_time_us = 0;  // 0: ten hyperperiods, at least 10 ms
    unsigned seed = 1;
    std::string phase_policy = "zero";
    std::size_t runs = 8;
    double be_load = 1;
    std::string trace_path;
};

Format parse_format(const std::string& s)
{
    if (s == "csv")
        return Format::Csv;
    if (s == "json")
        return Format::Json;
    if (s == "table")
        return Format::Table;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv, json or table)");
}

std::string fixed(const Rational& seconds, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, to_double(micros(seconds)));
    return buf;
}

// Plain text table with right-aligned numeric columns.
void print_table(std::ostream& out, const std::vector<std::string>& head,
                 const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> w(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        w[c] = head[c].size();
        for (const auto& r : rows)
            w[c] = std::max(w[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            std::string pad(w[c] - r[c].size(), ' ');
            out << (c ? "  " : "") << (c < 3 ? r[c] + pad : pad + r[c]);
        }
        out << '\n';
    };
    line(head);
    std::vector<std::string> rule;
    for (std::size_t c = 0; c < head.size(); ++c)
        rule.push_back(std::string(w[c], '-'));
    line(rule);
    for (const auto& r : rows)
        line(r);
}

CreditMode mode_of(const Options& o, const Network& net)
{
    return o.credit_mode.empty() ? net.config().credit_mode : parse_credit_mode(o.credit_mode);
}

SimParams sim_params(const Options& o, const Network& net)
{
    SimParams p;
    p.mode = mode_of(o, net);
    if (o.sim_time_us > 0)
        p.duration = from_micros(from_double(o.sim_time_us));
    else
        p.duration = std::max(Rational(net.hyperperiod() * 10), Rational(1, 100));
    p.seed = o.seed;
    p.runs = o.runs;
    p.be_load = from_double(o.be_load);
    parse_phase_policy(o.phase_policy, p);
    return p;
}

std::string file_name(std::string s)
{
    for (char& c : s)
        if (c == '>' || c == '/' || c == ' ')
            c = '_';
    return s;
}

void print_warnings(const std::vector<std::string>& ws)
{
    for (const std::string& w : ws)
        std::cerr << "warning: " << w << '\n';
}

int cmd_validate(const Options& o)
{
    Network net = Network::validate(load_config(o.config));
    print_warnings(net.warnings());
    std::cout << o.config << ": ok (" << net.config().nodes.size() << " nodes, " << net.ports().size()
              << " ports, " << net.flows().size() << " flows)\n";
    return 0;
}

int cmd_analyze(const Options& o)
{
    Format fmt = parse_format(o.output);
    Network net = Network::validate(load_config(o.config));
    print_warnings(net.warnings());
    AnalysisOptions opt{mode_of(o, net), parse_shaping(o.shaping), !o.dump_dir.empty()};
    DelayReport rep = analyze(net, opt);
    if (!o.dump_dir.empty()) {
        fs::create_directories(o.dump_dir);
        for (const NamedCurve& c : rep.curves) {
            std::ofstream f(fs::path(o.dump_dir) / (file_name(c.name) + ".csv"));
            dump_csv(f, c.curve);
        }
    }
    if (fmt == Format::Csv) {
        write_csv(std::cout, rep);
    } else if (fmt == Format::Json) {
        std::cout << to_json(rep).dump(2) << '\n';
    } else {
        std::vector<std::vector<std::string>> rows;
        for (const FlowDelay& f : rep.flows)
            for (const RouteDelay& r : f.routes) {
                std::string hops;
                for (std::size_t h = 0; h < r.hop_delays.size(); ++h)
                    hops += (h ? " + " : "") + fixed(r.hop_delays[h], 1);
                rows.push_back({f.id, std::to_string(f.cls + 1), r.ports.back(), hops, fixed(r.e2e)});
            }
        std::cout << "credit mode " << to_string(opt.mode) << ", shaping " << to_string(opt.shaping) << "\n\n";
        print_table(std::cout, {"flow", "class", "destination", "hops_us", "e2e_us"}, rows);
    }
    return 0;
}

int cmd_simulate(const Options& o)
{
    Format fmt = parse_format(o.output);
    Network net = Network::validate(load_config(o.config));
    print_warnings(net.warnings());
    SimParams p = sim_params(o, net);
    std::ofstream trace;
    if (!o.trace_path.empty()) {
        trace.open(o.trace_path);
        if (!trace)
            throw ValidationError({"cannot write " + o.trace_path});
        trace << "time_us,port,event,class,credit\n";
        p.trace = &trace;
    }
    SimReport rep = simulate(net, p);
    print_warnings(rep.warnings);
    if (fmt == Format::Csv) {
        write_csv(std::cout, rep);
    } else if (fmt == Format::Json) {
        std::cout << to_json(rep).dump(2) << '\n';
    } else {
        std::vector<std::vector<std::string>> rows;
        for (const SimFlowResult& f : rep.flows)
            for (const SimRoute& r : f.routes)
                rows.push_back({f.id, std::to_string(f.cls + 1), r.destination, fixed(r.max_delay),
                                std::to_string(f.frames)});
        std::cout << "credit mode " << to_string(p.mode) << ", " << rep.runs << " run(s), " << rep.events
                  << " events\n\n";
        print_table(std::cout, {"flow", "class", "destination", "sim_max_us", "frames"}, rows);
        std::cout << '\n';
        rows.clear();
        for (const SimPortClass& pc : rep.port_classes)
            if (pc.frames > 0)
                rows.push_back({pc.port_id, std::to_string(pc.cls + 1), "", std::to_string(to_double(pc.credit_min)),
                                std::to_string(to_double(pc.credit_max))});
        print_table(std::cout, {"port", "class", "", "credit_min", "credit_max"}, rows);
    }
    return 0;
}

int cmd_compare(const Options& o)
{
    Format fmt = parse_format(o.output);
    Network net = Network::validate(load_config(o.config));
    print_warnings(net.warnings());
    CreditMode mode = mode_of(o, net);
    DelayReport full = analyze(net, {mode, Shaping::Full, false});
    DelayReport none = analyze(net, {mode, Shaping::None, false});
    SimReport sim = simulate(net, sim_params(o, net));
    print_warnings(sim.warnings);

    struct Row {
        std::string flow, cls, dest;
        Rational full, none, sim;
        bool ok;
        double reduction;
    };
    std::vector<Row> rows;
    double total_reduction = 0;
    bool all_ok = true;
    for (std::size_t i = 0; i < full.flows.size(); ++i)
        for (std::size_t r = 0; r < full.flows[i].routes.size(); ++r) {
            const Rational& b = full.flows[i].routes[r].e2e;
            const Rational& n = none.flows[i].routes[r].e2e;
            const Rational& s = sim.flows[i].routes[r].max_delay;
            double red = n > 0 ? 100.0 * to_double((n - b) / n) : 0.0;
            rows.push_back({full.flows[i].id, std::to_string(full.flows[i].cls + 1),
                            full.flows[i].routes[r].ports.back(), b, n, s, s <= b, red});
            total_reduction += red;
            all_ok = all_ok && s <= b;
        }
    double avg = rows.empty() ? 0.0 : total_reduction / static_cast<double>(rows.size());

    if (fmt == Format::Json) {
        nlohmann::json doc;
        doc["credit_mode"] = to_string(mode);
        doc["average_reduction_percent"] = avg;
        doc["all_dominate"] = all_ok;
        doc["flows"] = nlohmann::json::array();
        for (const Row& r : rows)
            doc["flows"].push_back({{"flow", r.flow},
                                    {"class", std::stoi(r.cls)},
                                    {"destination", r.dest},
                                    {"bound_full_us", to_double(micros(r.full))},
                                    {"bound_none_us", to_double(micros(r.none))},
                                    {"sim_max_us", to_double(micros(r.sim))},
                                    {"verdict", r.ok ? "OK" : "VIOLATION"},
                                    {"reduction_percent", r.reduction}});
        std::cout << doc.dump(2) << '\n';
    } else if (fmt == Format::Csv) {
        std::cout << "flow,class,destination,bound_full_us,bound_none_us,sim_max_us,verdict,reduction_percent\n";
        for (const Row& r : rows) {
            char red[32];
            std::snprintf(red, sizeof red, "%.2f", r.reduction);
            std::cout << r.flow << ',' << r.cls << ',' << r.dest << ',' << fixed(r.full, 6) << ','
                      << fixed(r.none, 6) << ',' << fixed(r.sim, 6) << ',' << (r.ok ? "OK" : "VIOLATION") << ','
                      << red << '\n';
        }
    } else {
        std::vector<std::vector<std::string>> table;
        for (const Row& r : rows) {
            char red[32];
            std::snprintf(red, sizeof red, "%.1f%%", r.reduction);
            table.push_back({r.flow, r.cls, r.dest, fixed(r.full), fixed(r.none), fixed(r.sim),
                             r.ok ? "OK" : "VIOLATION", red});
        }
        std::cout << "credit mode " << to_string(mode) << ", " << sim.runs << " simulation run(s)\n\n";
        print_table(std::cout,
                    {"flow", "class", "destination", "bound_full_us", "bound_none_us", "sim_max_us", "verdict",
                     "reduction"},
                    table);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", avg);
        std::cout << "\naverage reduction from shaping: " << buf << "%\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Worst-case latency analysis and simulation of TSN networks with GCL and CBS"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "Network configuration (JSON)")->required();
    };
    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--credit-mode", o.credit_mode, "frozen or nonfrozen (default: from the config)");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--output", o.output, "csv, json or table")->default_val("table");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--sim-time-us", o.sim_time_us, "Release frames for this long (default: 10 hyperperiods)");
        sub->add_option("--seed", o.seed, "Seed for random phases")->default_val(1);
        sub->add_option("--phase-policy", o.phase_policy, "zero, random or grid:<step_us>")->default_val("zero");
        sub->add_option("--runs", o.runs, "Runs for the random phase policy, grid cap")->default_val(8);
        sub->add_option("--be-load", o.be_load, "Best-effort load as a fraction of the link rate")
            ->default_val(1.0);
    };

    CLI::App* validate = app.add_subcommand("validate", "Check a configuration");
    add_config(validate);

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Compute delay bounds");
    add_config(analyze_cmd);
    add_mode(analyze_cmd);
    analyze_cmd->add_option("--shaping", o.shaping, "full or none")->default_val("full");
    add_output(analyze_cmd);
    analyze_cmd->add_option("--dump-curves", o.dump_dir, "Write every arrival/service curve as CSV into DIR");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run the discrete-event simulator");
    add_config(simulate_cmd);
    add_mode(simulate_cmd);
    add_output(simulate_cmd);
    add_sim(simulate_cmd);
    simulate_cmd->add_option("--trace", o.trace_path, "Write an event trace CSV");

    CLI::App* compare_cmd = app.add_subcommand("compare", "Bounds with and without shaping against simulation");
    add_config(compare_cmd);
    add_mode(compare_cmd);
    add_output(compare_cmd);
    add_sim(compare_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    try {
        if (validate->parsed())
            return cmd_validate(o);
        if (analyze_cmd->parsed())
            return cmd_analyze(o);
        if (simulate_cmd->parsed())
            return cmd_simulate(o);
        return cmd_compare(o);
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration:\n";
        for (const std::string& p : e.problems())
            std::cerr << "  " << p << '\n';
        return 1;
    } catch (const UnstableError& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
