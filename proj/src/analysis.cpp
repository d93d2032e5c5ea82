#include "tsnnc/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>

#include "tsnnc/st_curves.hpp"

namespace tsnnc {

Shaping parse_shaping(const std::string& text)
{
    if (text == "full")
        return Shaping::Full;
    if (text == "none")
        return Shaping::None;
    throw std::invalid_argument("unknown shaping '" + text + "' (expected full or none)");
}

std::string to_string(Shaping shaping) { return shaping == Shaping::Full ? "full" : "none"; }

Rational FlowDelay::worst() const
{
    Rational w = 0;
    for (const RouteDelay& r : routes)
        w = std::max(w, r.e2e);
    return w;
}

const FlowDelay& DelayReport::flow(const std::string& id) const
{
    for (const FlowDelay& f : flows)
        if (f.id == id)
            return f;
    throw std::out_of_range("no flow " + id + " in report");
}

Curve avb_service_curve(const Curve& alpha_h, const Rational& rate, const Rational& idle_slope,
                        const Rational& c_max)
{
    Curve avail = sum(make_affine(0, 1), scale(alpha_h, Rational(-1) / rate));
    avail = add_constant(avail, -c_max / idle_slope);
    if (avail.rate() <= 0)
        throw UnstableError("no long-term service left for the class (frozen time rate " +
                            to_string(alpha_h.rate() / rate) + " of the link)");
    return scale(closure_up(avail), idle_slope);
}

Curve source_arrival(const AvbFlow& flow)
{
    if (flow.frame_bits == 0)
        return make_zero();
    return make_affine(flow.frame_bits, flow.frame_bits / flow.period);
}

Curve propagate_arrival(const Curve& alpha, const Rational& delay)
{
    if (delay == 0)
        return alpha;
    return deconvolve(alpha, make_burst_delay(delay));
}

Curve group_arrival(const Curve& sum_of_flows, const Rational& rate, const Rational& l_max, const Curve& sigma,
                    Shaping shaping)
{
    if (shaping == Shaping::None)
        return sum_of_flows;
    Curve link = make_affine(l_max, rate);
    Curve cbs = add_constant(sigma, l_max);
    return min_of(sum_of_flows, min_of(link, cbs));
}

Rational end_to_end(const std::vector<Rational>& hop_delays, const Rational& d_tech)
{
    Rational total = 0;
    for (const Rational& d : hop_delays)
        total += d;
    if (!hop_delays.empty())
        total += d_tech * static_cast<long>(hop_delays.size() - 1);
    return total;
}

namespace {

struct PortState {
    std::vector<CreditBounds> credit;
    std::optional<Curve> beta_st;
    std::vector<std::optional<Curve>> sigma;
};

class Analyzer {
public:
    Analyzer(const Network& net, const AnalysisOptions& opt)
        : net_(net), opt_(opt), ports_(net.ports().size()), arrival_(net.flows().size()),
          delay_(net.ports().size())
    {
    }

    DelayReport run()
    {
        DelayReport report;
        report.mode = opt_.mode;
        report.shaping = opt_.shaping;
        for (std::size_t p : net_.order())
            analyze_port(p, report);
        for (std::size_t fi = 0; fi < net_.flows().size(); ++fi) {
            const AvbFlow& f = net_.flows()[fi];
            FlowDelay fd{f.id, f.cls, {}};
            for (const auto& route : f.route_ports) {
                RouteDelay rd;
                for (std::size_t p : route) {
                    rd.ports.push_back(net_.port(p).id);
                    rd.hop_delays.push_back(*delay_[p][f.cls]);
                }
                rd.e2e = end_to_end(rd.hop_delays, net_.config().d_tech);
                fd.routes.push_back(std::move(rd));
            }
            report.flows.push_back(std::move(fd));
        }
        return report;
    }

private:
    PortState& state(std::size_t p)
    {
        PortState& s = ports_[p];
        if (s.credit.empty()) {
            s.credit = port_credit_bounds(net_, p, opt_.mode, opt_.zero_guard_bands);
            s.sigma.resize(net_.port(p).classes());
        }
        return s;
    }

    const Curve& beta_st(std::size_t p)
    {
        PortState& s = state(p);
        if (!s.beta_st)
            s.beta_st = st_strict_service_curve(net_.port(p));
        return *s.beta_st;
    }

    const Curve& sigma(std::size_t p, std::size_t cls)
    {
        PortState& s = state(p);
        if (!s.sigma[cls]) {
            const OutputPort& port = net_.port(p);
            s.sigma[cls] = cbs_shaping_curve(beta_st(p), port.rate, port.idle_slopes[cls], s.credit[cls].c_max,
                                             s.credit[cls].c_min);
        }
        return *s.sigma[cls];
    }

    // Route hop preceding port p for flow fi, if any.
    std::optional<std::size_t> previous(std::size_t fi, std::size_t p) const
    {
        for (const auto& route : net_.flows()[fi].route_ports) {
            for (std::size_t h = 0; h < route.size(); ++h)
                if (route[h] == p)
                    return h == 0 ? std::nullopt : std::optional<std::size_t>(route[h - 1]);
        }
        throw std::logic_error("flow does not cross port");
    }

    void keep(DelayReport& report, std::string name, const Curve& c)
    {
        if (opt_.keep_curves)
            report.curves.push_back(NamedCurve{std::move(name), c});
    }

    void analyze_port(std::size_t p, DelayReport& report)
    {
        const OutputPort& port = net_.port(p);
        delay_[p].assign(port.classes(), std::nullopt);
        PortState& st = state(p);
        for (std::size_t cls = 0; cls < port.classes(); ++cls) {
            // Group this class's flows by the port they come from.
            std::map<long, std::vector<std::size_t>> groups;
            for (const auto& [fi, h] : net_.flows_at(p)) {
                if (net_.flows()[fi].cls != cls)
                    continue;
                auto prev = previous(fi, p);
                long key = prev ? static_cast<long>(*prev) : -1;
                groups[key].push_back(fi);
                Curve a = prev ? propagate_arrival(arrival_[fi].at(*prev), *delay_[*prev][cls])
                               : source_arrival(net_.flows()[fi]);
                arrival_[fi][p] = a;
            }
            if (groups.empty())
                continue;

            std::string tag = port.id + ".class" + std::to_string(cls + 1);
            std::vector<Curve> parts;
            PortClassResult res;
            for (const auto& [key, members] : groups) {
                std::vector<Curve> individual;
                Rational l_max = 0;
                for (std::size_t fi : members) {
                    individual.push_back(arrival_[fi].at(p));
                    l_max = std::max(l_max, net_.flows()[fi].frame_bits);
                    res.flows.push_back(net_.flows()[fi].id);
                }
                Curve s = sum(individual);
                if (key < 0) {
                    parts.push_back(s);
                    continue;
                }
                std::size_t from = static_cast<std::size_t>(key);
                parts.push_back(group_arrival(s, net_.port(from).rate, l_max, sigma(from, cls), opt_.shaping));
            }
            Curve alpha = sum(parts);

            const CreditBounds& cb = st.credit[cls];
            bool frozen = opt_.mode == CreditMode::Frozen;
            std::vector<Rational> gbs = net_.guard_bands(p, cls);
            if (opt_.zero_guard_bands)
                gbs.assign(gbs.size(), Rational(0));
            Curve alpha_h = frozen ? gbst_arrival_curve(port, gbs) : st_arrival_curve(port);
            Curve beta;
            try {
                beta = avb_service_curve(alpha_h, port.rate, port.idle_slopes[cls], cb.c_max);
            } catch (const UnstableError& e) {
                throw UnstableError("port " + port.id + " class " + std::to_string(cls + 1) + ": " + e.what());
            }
            if (alpha.rate() >= beta.rate())
                throw UnstableError("port " + port.id + " class " + std::to_string(cls + 1) +
                                    ": arrival rate " + to_string(alpha.rate()) + " b/s not below service rate " +
                                    to_string(beta.rate()) + " b/s");

            Rational d = horizontal_deviation(alpha, beta);
            delay_[p][cls] = d;

            res.port = p;
            res.port_id = port.id;
            res.cls = cls;
            res.delay = d;
            res.credit = cb;
            res.arrival_rate = alpha.rate();
            res.service_rate = beta.rate();
            res.service = std::string("idSl*[t - ") + (frozen ? "alpha_GB+ST" : "alpha_ST") +
                          "/C - c_max/idSl]^+ (" + to_string(opt_.mode) + ")";
            report.port_classes.push_back(std::move(res));

            keep(report, tag + ".arrival", alpha);
            keep(report, tag + ".service", beta);
            keep(report, tag + ".frozen", alpha_h);
            keep(report, tag + ".shaping", sigma(p, cls));
        }
        if (opt_.keep_curves && !port.windows.empty())
            keep(report, port.id + ".beta_st", beta_st(p));
    }

    const Network& net_;
    AnalysisOptions opt_;
    std::vector<PortState> ports_;
    std::vector<std::map<std::size_t, Curve>> arrival_;
    std::vector<std::vector<std::optional<Rational>>> delay_;
};

}  // namespace

DelayReport analyze(const Network& net, const AnalysisOptions& options)
{
    return Analyzer(net, options).run();
}

namespace {

std::string us_text(const Rational& seconds)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", to_double(micros(seconds)));
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const DelayReport& report)
{
    out << "flow,class,destination,hops_us,e2e_us\n";
    for (const FlowDelay& f : report.flows) {
        for (const RouteDelay& r : f.routes) {
            out << f.id << ',' << f.cls + 1 << ',' << r.ports.back() << ',';
            for (std::size_t h = 0; h < r.hop_delays.size(); ++h)
                out << (h ? ";" : "") << us_text(r.hop_delays[h]);
            out << ',' << us_text(r.e2e) << '\n';
        }
    }
}

nlohmann::json to_json(const DelayReport& report)
{
    using nlohmann::json;
    json doc;
    doc["credit_mode"] = to_string(report.mode);
    doc["shaping"] = to_string(report.shaping);
    doc["flows"] = json::array();
    for (const FlowDelay& f : report.flows) {
        json routes = json::array();
        for (const RouteDelay& r : f.routes) {
            json hops = json::array();
            for (std::size_t h = 0; h < r.ports.size(); ++h)
                hops.push_back({{"port", r.ports[h]},
                                {"delay_us", to_double(micros(r.hop_delays[h]))},
                                {"delay_s_exact", to_string(r.hop_delays[h])}});
            routes.push_back({{"hops", hops},
                              {"e2e_us", to_double(micros(r.e2e))},
                              {"e2e_s_exact", to_string(r.e2e)}});
        }
        doc["flows"].push_back({{"id", f.id}, {"class", f.cls + 1}, {"routes", routes},
                                {"worst_e2e_us", to_double(micros(f.worst()))}});
    }
    doc["ports"] = json::array();
    for (const PortClassResult& r : report.port_classes) {
        doc["ports"].push_back({{"port", r.port_id},
                                {"class", r.cls + 1},
                                {"delay_us", to_double(micros(r.delay))},
                                {"c_min_bits", to_double(r.credit.c_min)},
                                {"c_max_bits", to_double(r.credit.c_max)},
                                {"sigma_gb_bits", to_double(r.credit.gb.sigma)},
                                {"rho_gb_bps", to_double(r.credit.gb.rho)},
                                {"arrival_rate_bps", to_double(r.arrival_rate)},
                                {"service_rate_bps", to_double(r.service_rate)},
                                {"service", r.service},
                                {"flows", r.flows}});
    }
    return doc;
}

}  // namespace tsnnc
