#include "tsnnc/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>

namespace tsnnc {

void parse_phase_policy(const std::string& text, SimParams& params)
{
    if (text == "zero" || text == "all-zero") {
        params.phases = PhasePolicy::Zero;
        return;
    }
    if (text == "random") {
        params.phases = PhasePolicy::Random;
        return;
    }
    for (const std::string prefix : {"grid:", "exhaustive-grid:"}) {
        if (text.rfind(prefix, 0) == 0) {
            Rational step = from_micros(parse_rational(text.substr(prefix.size())));
            if (step <= 0)
                throw std::invalid_argument("grid step must be positive");
            params.phases = PhasePolicy::Grid;
            params.grid_step = step;
            return;
        }
    }
    throw std::invalid_argument("unknown phase policy '" + text + "' (expected zero, random or grid:<step_us>)");
}

Rational SimFlowResult::worst() const
{
    Rational w = 0;
    for (const SimRoute& r : routes)
        w = std::max(w, r.max_delay);
    return w;
}

const SimFlowResult& SimReport::flow(const std::string& id) const
{
    for (const SimFlowResult& f : flows)
        if (f.id == id)
            return f;
    throw std::out_of_range("no flow " + id + " in simulation report");
}

const SimPortClass& SimReport::at(const std::string& port_id, std::size_t cls) const
{
    for (const SimPortClass& pc : port_classes)
        if (pc.port_id == port_id && pc.cls == cls)
            return pc;
    throw std::out_of_range("no port " + port_id + " class " + std::to_string(cls + 1) + " in simulation report");
}

namespace {

// Gate state of the AVB/BE queues: closed on [o, o + L) of every window.
class Gate {
public:
    explicit Gate(const OutputPort& port) : port_(port) {}

    bool open(const Rational& t) const
    {
        Rational pos = position(t);
        for (const StWindow& w : port_.windows)
            if (pos >= w.offset && pos < w.offset + w.length)
                return false;
        return true;
    }

    // Start of the first window at or after t.
    std::optional<Rational> next_close(const Rational& t) const
    {
        if (port_.windows.empty())
            return std::nullopt;
        Rational base = t - position(t);
        for (int k = 0; k < 2; ++k) {
            for (const StWindow& w : port_.windows) {
                Rational s = base + port_.gcl_period * k + w.offset;
                if (s >= t)
                    return s;
            }
        }
        throw std::logic_error("gate: no window start found");
    }

    // First window boundary strictly after t.
    std::optional<Rational> next_change(const Rational& t) const
    {
        if (port_.windows.empty())
            return std::nullopt;
        Rational base = t - position(t);
        for (int k = 0; k < 2; ++k) {
            for (const StWindow& w : port_.windows) {
                Rational s = base + port_.gcl_period * k + w.offset;
                if (s > t)
                    return s;
                if (s + w.length > t)
                    return Rational(s + w.length);
            }
        }
        throw std::logic_error("gate: no boundary found");
    }

    bool overlaps(const Rational& s, const Rational& e) const
    {
        const Rational& p = port_.gcl_period;
        for (Rational k = floor_of(s / p); k * p < e; k += 1)
            for (const StWindow& w : port_.windows) {
                Rational ws = k * p + w.offset;
                if (ws < e && ws + w.length > s)
                    return true;
            }
        return false;
    }

private:
    Rational position(const Rational& t) const { return t - floor_of(t / port_.gcl_period) * port_.gcl_period; }

    const OutputPort& port_;
};

struct Frame {
    Rational time;  // arrival at the port
    std::size_t flow = 0;
    std::size_t seq = 0;
    Rational bits;
};

struct Departure {
    std::size_t flow = 0;
    std::size_t seq = 0;
    Rational end;
};

class PortSim {
public:
    PortSim(const Network& net, std::size_t p, const SimParams& params, SimReport& report)
        : net_(net), port_(net.port(p)), params_(params), report_(report), gate_(port_),
          n_(port_.classes()), queue_(n_), credit_(n_, Rational(0))
    {
        for (SimPortClass& pc : report.port_classes)
            if (pc.port == p)
                stats_.push_back(&pc);
        be_bits_ = params.be_load > 0 ? net.config().be_max_frame : Rational(0);
        be_saturating_ = be_bits_ > 0 && params.be_load >= 1;
        if (be_bits_ > 0 && !be_saturating_)
            be_interval_ = be_bits_ / (params.be_load * port_.rate);
    }

    std::vector<Departure> run(const std::vector<Frame>& arrivals)
    {
        std::vector<Departure> out;
        const Rational C = port_.rate;
        bool frozen = params_.mode == CreditMode::Frozen;
        Rational t = 0;
        std::size_t next_arrival = 0;
        Rational be_next = 0;
        std::size_t be_backlog = 0;
        const std::size_t idle = static_cast<std::size_t>(-1);
        std::size_t tx = idle;  // class index, n_ for best effort
        Rational tx_end;
        Frame tx_frame;

        while (true) {
            ++report_.events;
            if (tx != idle && tx_end == t) {
                if (tx < n_) {
                    SimPortClass& st = *stats_[tx];
                    st.max_hop_delay = std::max(st.max_hop_delay, Rational(t - tx_frame.time));
                    ++st.frames;
                    out.push_back({tx_frame.flow, tx_frame.seq, t});
                    log(t, "tx_end", tx);
                }
                tx = idle;
            }
            while (next_arrival < arrivals.size() && arrivals[next_arrival].time <= t) {
                const Frame& f = arrivals[next_arrival++];
                std::size_t c = net_.flows()[f.flow].cls;
                queue_[c].push_back(f);
                log(t, "arrive", c);
            }
            if (be_interval_ > 0)
                while (be_next <= t) {
                    ++be_backlog;
                    be_next += be_interval_;
                }

            bool open = gate_.open(t);
            for (std::size_t c = 0; c < n_; ++c) {
                if (tx != c && queue_[c].empty() && credit_[c] > 0 && (open || params_.reset_when_closed)) {
                    credit_[c] = 0;
                    log(t, "reset", c);
                }
                record(c);
            }

            bool avb_left = next_arrival < arrivals.size() || tx < n_;
            for (std::size_t c = 0; c < n_ && !avb_left; ++c)
                avb_left = !queue_[c].empty();
            if (!avb_left)
                break;

            std::optional<Rational> close = gate_.next_close(t);
            auto fits = [&](const Rational& bits) { return open && (!close || t + bits / C <= *close); };
            if (tx == idle) {
                for (std::size_t c = 0; c < n_; ++c) {
                    if (!queue_[c].empty() && credit_[c] >= 0 && fits(queue_[c].front().bits)) {
                        tx = c;
                        tx_frame = queue_[c].front();
                        queue_[c].pop_front();
                        break;
                    }
                }
                if (tx == idle && (be_saturating_ || be_backlog > 0) && fits(be_bits_)) {
                    tx = n_;
                    tx_frame = Frame{t, 0, 0, be_bits_};
                    if (!be_saturating_)
                        --be_backlog;
                }
                if (tx != idle) {
                    tx_end = t + tx_frame.bits / C;
                    if (gate_.overlaps(t, tx_end))
                        ++report_.window_violations;
                    log(t, tx < n_ ? "tx_start" : "be_start", tx < n_ ? tx : 0);
                }
            }

            // Credit slopes on the open interval after t, and the next event.
            std::optional<Rational> next;
            auto candidate = [&](const Rational& x) {
                if (x > t && (!next || x < *next))
                    next = x;
            };
            if (tx != idle)
                candidate(tx_end);
            if (next_arrival < arrivals.size())
                candidate(arrivals[next_arrival].time);
            if (be_interval_ > 0)
                candidate(be_next);
            if (auto g = gate_.next_change(t))
                candidate(*g);
            std::vector<Rational> slope(n_, Rational(0));
            for (std::size_t c = 0; c < n_; ++c) {
                if (tx == c) {
                    slope[c] = port_.send_slope(c);
                } else if (!open) {
                    slope[c] = 0;
                } else if (!queue_[c].empty()) {
                    Rational gb_start = close ? Rational(*close - queue_[c].front().bits / C) : Rational(0);
                    bool in_gb = close && t >= gb_start;
                    slope[c] = in_gb && frozen ? Rational(0) : port_.idle_slopes[c];
                    if (close && !in_gb)
                        candidate(gb_start);
                } else {
                    slope[c] = credit_[c] < 0 ? port_.idle_slopes[c] : Rational(0);
                }
                if (slope[c] > 0 && credit_[c] < 0)
                    candidate(t - credit_[c] / slope[c]);
            }
            if (!next)
                throw std::logic_error("simulator: port " + port_.id + " stalled with frames queued");
            Rational dt = *next - t;
            for (std::size_t c = 0; c < n_; ++c)
                credit_[c] += slope[c] * dt;
            t = *next;
        }
        return out;
    }

private:
    void record(std::size_t c)
    {
        SimPortClass& st = *stats_[c];
        st.credit_min = std::min(st.credit_min, credit_[c]);
        st.credit_max = std::max(st.credit_max, credit_[c]);
    }

    void log(const Rational& t, const char* event, std::size_t c)
    {
        if (!params_.trace)
            return;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6f,%s,%s,%zu,%.3f\n", to_double(micros(t)), port_.id.c_str(), event,
                      c + 1, to_double(credit_[c]));
        *params_.trace << buf;
    }

    const Network& net_;
    const OutputPort& port_;
    const SimParams& params_;
    SimReport& report_;
    Gate gate_;
    std::size_t n_;
    std::vector<std::deque<Frame>> queue_;
    std::vector<Rational> credit_;
    std::vector<SimPortClass*> stats_;
    Rational be_bits_;
    bool be_saturating_ = false;
    Rational be_interval_ = 0;
};

SimReport empty_report(const Network& net, const SimParams& params)
{
    SimReport rep;
    rep.mode = params.mode;
    for (const AvbFlow& f : net.flows()) {
        SimFlowResult r{f.id, f.cls, {}, 0};
        for (const auto& route : f.route_ports)
            r.routes.push_back({net.port(route.back()).id, Rational(0)});
        rep.flows.push_back(std::move(r));
    }
    for (std::size_t p = 0; p < net.ports().size(); ++p)
        for (std::size_t c = 0; c < net.port(p).classes(); ++c)
            rep.port_classes.push_back({p, net.port(p).id, c, Rational(0), Rational(0), Rational(0), 0});
    return rep;
}

void merge(SimReport& into, const SimReport& run)
{
    into.runs += run.runs;
    into.events += run.events;
    into.window_violations += run.window_violations;
    for (std::size_t i = 0; i < into.flows.size(); ++i) {
        into.flows[i].frames += run.flows[i].frames;
        for (std::size_t r = 0; r < into.flows[i].routes.size(); ++r)
            into.flows[i].routes[r].max_delay =
                std::max(into.flows[i].routes[r].max_delay, run.flows[i].routes[r].max_delay);
    }
    for (std::size_t i = 0; i < into.port_classes.size(); ++i) {
        SimPortClass& a = into.port_classes[i];
        const SimPortClass& b = run.port_classes[i];
        a.credit_min = std::min(a.credit_min, b.credit_min);
        a.credit_max = std::max(a.credit_max, b.credit_max);
        a.max_hop_delay = std::max(a.max_hop_delay, b.max_hop_delay);
        a.frames += b.frames;
    }
    for (const std::string& w : run.warnings)
        if (std::find(into.warnings.begin(), into.warnings.end(), w) == into.warnings.end())
            into.warnings.push_back(w);
}

}  // namespace

SimReport simulate_once(const Network& net, const SimParams& params, const std::vector<Rational>& phases)
{
    const auto& flows = net.flows();
    if (phases.size() != flows.size())
        throw std::invalid_argument("simulate_once: one phase per flow required");
    if (params.duration <= 0)
        throw std::invalid_argument("simulation duration must be positive");
    SimReport rep = empty_report(net, params);
    rep.runs = 1;
    if (params.duration < net.hyperperiod())
        rep.warnings.push_back("simulation horizon " + std::to_string(to_double(micros(params.duration))) +
                               " us is shorter than the GCL hyperperiod");

    // Per flow and port: the next ports of the multicast tree and the routes ending here.
    std::vector<std::map<std::size_t, std::set<std::size_t>>> next_ports(flows.size());
    std::vector<std::map<std::size_t, std::vector<std::size_t>>> route_ends(flows.size());
    for (std::size_t fi = 0; fi < flows.size(); ++fi)
        for (std::size_t r = 0; r < flows[fi].route_ports.size(); ++r) {
            const auto& route = flows[fi].route_ports[r];
            for (std::size_t h = 0; h + 1 < route.size(); ++h)
                next_ports[fi][route[h]].insert(route[h + 1]);
            route_ends[fi][route.back()].push_back(r);
        }

    std::vector<std::vector<Frame>> arrivals(net.ports().size());
    for (std::size_t fi = 0; fi < flows.size(); ++fi) {
        const AvbFlow& f = flows[fi];
        if (f.route_ports.empty())
            continue;
        std::size_t seq = 0;
        for (Rational rel = phases[fi]; rel < params.duration; rel += f.period)
            arrivals[f.route_ports[0][0]].push_back({rel, fi, seq++, f.frame_bits});
    }

    const Rational& d_tech = net.config().d_tech;
    for (std::size_t p : net.order()) {
        std::vector<Frame>& in = arrivals[p];
        std::sort(in.begin(), in.end(), [](const Frame& a, const Frame& b) {
            if (a.time != b.time)
                return a.time < b.time;
            return a.flow != b.flow ? a.flow < b.flow : a.seq < b.seq;
        });
        for (const Departure& d : PortSim(net, p, params, rep).run(in)) {
            const AvbFlow& f = flows[d.flow];
            for (std::size_t q : next_ports[d.flow][p])
                arrivals[q].push_back({d.end + d_tech, d.flow, d.seq, f.frame_bits});
            auto ends = route_ends[d.flow].find(p);
            if (ends == route_ends[d.flow].end())
                continue;
            Rational delay = d.end - (phases[d.flow] + f.period * static_cast<long>(d.seq));
            for (std::size_t r : ends->second) {
                Rational& m = rep.flows[d.flow].routes[r].max_delay;
                m = std::max(m, delay);
                ++rep.flows[d.flow].frames;
            }
        }
        in.clear();
        in.shrink_to_fit();
    }
    return rep;
}

SimReport simulate(const Network& net, const SimParams& params)
{
    const auto& flows = net.flows();
    std::vector<std::vector<Rational>> runs;
    std::mt19937_64 eng(params.seed);
    const long resolution = 1L << 20;
    std::uniform_int_distribution<long> unit(0, resolution - 1);

    switch (params.phases) {
    case PhasePolicy::Zero:
        runs.emplace_back(flows.size(), Rational(0));
        break;
    case PhasePolicy::Random:
        for (std::size_t r = 0; r < std::max<std::size_t>(1, params.runs); ++r) {
            std::vector<Rational> ph;
            for (const AvbFlow& f : flows)
                ph.push_back(f.period * unit(eng) / resolution);
            runs.push_back(std::move(ph));
        }
        break;
    case PhasePolicy::Grid: {
        std::vector<long> points;
        double product = 1;
        for (const AvbFlow& f : flows) {
            long n = static_cast<long>(to_double(ceil_of(f.period / params.grid_step)));
            points.push_back(std::max(1L, n));
            product *= static_cast<double>(points.back());
        }
        if (product <= static_cast<double>(params.max_runs)) {
            std::vector<long> idx(flows.size(), 0);
            while (true) {
                std::vector<Rational> ph;
                for (std::size_t i = 0; i < flows.size(); ++i)
                    ph.push_back(params.grid_step * idx[i]);
                runs.push_back(std::move(ph));
                std::size_t i = 0;
                while (i < idx.size() && ++idx[i] == points[i])
                    idx[i++] = 0;
                if (i == idx.size())
                    break;
            }
        } else {
            runs.emplace_back(flows.size(), Rational(0));
            while (runs.size() < std::max<std::size_t>(1, params.max_runs)) {
                std::vector<Rational> ph;
                for (std::size_t i = 0; i < flows.size(); ++i)
                    ph.push_back(params.grid_step * std::uniform_int_distribution<long>(0, points[i] - 1)(eng));
                runs.push_back(std::move(ph));
            }
        }
        break;
    }
    }

    SimReport total = empty_report(net, params);
    for (const auto& ph : runs)
        merge(total, simulate_once(net, params, ph));
    return total;
}

void write_csv(std::ostream& out, const SimReport& report)
{
    out << "flow,class,destination,sim_max_us,frames\n";
    char buf[64];
    for (const SimFlowResult& f : report.flows)
        for (const SimRoute& r : f.routes) {
            std::snprintf(buf, sizeof buf, "%.6f", to_double(micros(r.max_delay)));
            out << f.id << ',' << f.cls + 1 << ',' << r.destination << ',' << buf << ',' << f.frames << '\n';
        }
}

nlohmann::json to_json(const SimReport& report)
{
    using nlohmann::json;
    json doc;
    doc["credit_mode"] = to_string(report.mode);
    doc["runs"] = report.runs;
    doc["events"] = report.events;
    doc["window_violations"] = report.window_violations;
    doc["warnings"] = report.warnings;
    doc["flows"] = json::array();
    for (const SimFlowResult& f : report.flows) {
        json routes = json::array();
        for (const SimRoute& r : f.routes)
            routes.push_back({{"destination", r.destination}, {"max_delay_us", to_double(micros(r.max_delay))}});
        doc["flows"].push_back({{"id", f.id},
                                {"class", f.cls + 1},
                                {"frames", f.frames},
                                {"routes", routes},
                                {"worst_us", to_double(micros(f.worst()))}});
    }
    doc["ports"] = json::array();
    for (const SimPortClass& pc : report.port_classes)
        doc["ports"].push_back({{"port", pc.port_id},
                                {"class", pc.cls + 1},
                                {"frames", pc.frames},
                                {"credit_min_bits", to_double(pc.credit_min)},
                                {"credit_max_bits", to_double(pc.credit_max)},
                                {"max_hop_delay_us", to_double(micros(pc.max_hop_delay))}});
    return doc;
}

}  // namespace tsnnc
