#include "tsnnc/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace tsnnc {

using nlohmann::json;

CreditMode parse_credit_mode(const std::string& text)
{
    if (text == "frozen")
        return CreditMode::Frozen;
    if (text == "non_frozen" || text == "non-frozen" || text == "nonfrozen")
        return CreditMode::NonFrozen;
    throw std::invalid_argument("unknown credit mode '" + text + "' (expected frozen or non_frozen)");
}

std::string to_string(CreditMode mode)
{
    return mode == CreditMode::Frozen ? "frozen" : "non_frozen";
}

namespace {

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty())
            out += "; ";
        out += s;
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems))
{
}

Rational OutputPort::gap_before(std::size_t k) const
{
    const std::size_t n = windows.size();
    const StWindow& prev = windows[(k + n - 1) % n];
    Rational end = prev.offset + prev.length;
    if (k == 0)
        return windows[0].offset + gcl_period - end;
    return windows[k].offset - end;
}

Rational OutputPort::st_total() const
{
    Rational total = 0;
    for (const StWindow& w : windows)
        total += w.length;
    return total;
}

// -- parsing ------------------------------------------------------------------

namespace {

Rational number(const json& j, const std::string& where)
{
    if (j.is_number_integer()) {
        if (j.is_number_unsigned())
            return Rational(mpz_class(std::to_string(j.get<std::uint64_t>())));
        return Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    }
    if (j.is_number_float())
        return from_double(j.get<double>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ValidationError({where + ": expected a number"});
}

const json& field(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ValidationError({where + ": missing '" + key + "'"});
    return obj.at(key);
}

std::string text(const json& obj, const char* key, const std::string& where)
{
    const json& v = field(obj, key, where);
    if (!v.is_string())
        throw ValidationError({where + ": '" + key + "' must be a string"});
    return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& where)
{
    const json& v = field(obj, key, where);
    if (!v.is_array())
        throw ValidationError({where + ": '" + key + "' must be an array"});
    return v;
}

std::vector<std::string> route_of(const json& r, const std::string& where)
{
    if (!r.is_array() || r.empty())
        throw ValidationError({where + ": route must be a non-empty array of port ids"});
    std::vector<std::string> out;
    for (const json& p : r) {
        if (!p.is_string())
            throw ValidationError({where + ": port ids must be strings"});
        out.push_back(p.get<std::string>());
    }
    return out;
}

}  // namespace

NetworkConfig parse_config(const json& doc)
{
    if (!doc.is_object())
        throw ValidationError({"config: top level must be an object"});
    NetworkConfig cfg;
    for (const json& n : array(doc, "nodes", "config")) {
        std::string id = text(n, "id", "node");
        std::string type = text(n, "type", "node " + id);
        if (type != "es" && type != "sw")
            throw ValidationError({"node " + id + ": type must be 'es' or 'sw'"});
        cfg.nodes.push_back(Node{id, type == "sw"});
    }
    for (const json& l : array(doc, "links", "config")) {
        std::string id = text(l, "id", "link");
        std::string where = "link " + id;
        cfg.links.push_back(Link{id, text(l, "from", where), text(l, "to", where),
                                 number(field(l, "rate_bps", where), where + " rate_bps")});
    }
    for (const json& p : array(doc, "ports", "config")) {
        OutputPort port;
        port.id = text(p, "id", "port");
        std::string where = "port " + port.id;
        port.link = text(p, "link", where);
        port.gcl_period = from_micros(number(field(p, "gcl_period_us", where), where + " gcl_period_us"));
        if (p.contains("st_windows")) {
            for (const json& w : array(p, "st_windows", where)) {
                if (!w.is_array() || w.size() != 2)
                    throw ValidationError({where + ": st_windows entries are [offset_us, length_us]"});
                port.windows.push_back(StWindow{from_micros(number(w[0], where + " window offset")),
                                                from_micros(number(w[1], where + " window length"))});
            }
        }
        for (const json& s : array(p, "idle_slopes_bps", where))
            port.idle_slopes.push_back(number(s, where + " idle slope"));
        cfg.ports.push_back(std::move(port));
    }
    for (const json& f : array(doc, "flows", "config")) {
        AvbFlow flow;
        flow.id = text(f, "id", "flow");
        std::string where = "flow " + flow.id;
        Rational cls = number(field(f, "class", where), where + " class");
        if (cls < 1 || cls.get_den() != 1)
            throw ValidationError({where + ": class must be a positive integer (1 = highest)"});
        flow.cls = static_cast<std::size_t>(cls.get_num().get_ui()) - 1;
        flow.frame_bits = number(field(f, "frame_bits", where), where + " frame_bits");
        flow.period = from_micros(number(field(f, "period_us", where), where + " period_us"));
        if (f.contains("route"))
            flow.routes.push_back(route_of(f.at("route"), where));
        if (f.contains("routes"))
            for (const json& r : array(f, "routes", where))
                flow.routes.push_back(route_of(r, where));
        if (flow.routes.empty())
            throw ValidationError({where + ": needs 'route' or 'routes'"});
        cfg.flows.push_back(std::move(flow));
    }
    cfg.be_max_frame = doc.contains("be_max_frame_bits") ? number(doc.at("be_max_frame_bits"), "be_max_frame_bits") : Rational(0);
    cfg.d_tech = doc.contains("d_tech_us") ? from_micros(number(doc.at("d_tech_us"), "d_tech_us")) : Rational(0);
    if (doc.contains("credit_mode")) {
        try {
            cfg.credit_mode = parse_credit_mode(doc.at("credit_mode").get<std::string>());
        } catch (const std::exception& e) {
            throw ValidationError({std::string("credit_mode: ") + e.what()});
        }
    }
    return cfg;
}

NetworkConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError({"cannot open " + path.string()});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError({path.string() + ": " + e.what()});
    }
    return parse_config(doc);
}

namespace {

json exact(const Rational& x)
{
    if (x.get_den() == 1 && x.get_num().fits_slong_p())
        return x.get_num().get_si();
    return to_string(x);
}

}  // namespace

json to_json(const NetworkConfig& cfg)
{
    json doc;
    doc["nodes"] = json::array();
    for (const Node& n : cfg.nodes)
        doc["nodes"].push_back({{"id", n.id}, {"type", n.is_switch ? "sw" : "es"}});
    doc["links"] = json::array();
    for (const Link& l : cfg.links)
        doc["links"].push_back({{"id", l.id}, {"from", l.from}, {"to", l.to}, {"rate_bps", exact(l.rate)}});
    doc["ports"] = json::array();
    for (const OutputPort& p : cfg.ports) {
        json windows = json::array();
        for (const StWindow& w : p.windows)
            windows.push_back({exact(micros(w.offset)), exact(micros(w.length))});
        json slopes = json::array();
        for (const Rational& s : p.idle_slopes)
            slopes.push_back(exact(s));
        doc["ports"].push_back({{"id", p.id},
                                {"link", p.link},
                                {"gcl_period_us", exact(micros(p.gcl_period))},
                                {"st_windows", windows},
                                {"idle_slopes_bps", slopes}});
    }
    doc["flows"] = json::array();
    for (const AvbFlow& f : cfg.flows) {
        json j{{"id", f.id},
               {"class", f.cls + 1},
               {"frame_bits", exact(f.frame_bits)},
               {"period_us", exact(micros(f.period))}};
        if (f.routes.size() == 1)
            j["route"] = f.routes[0];
        else
            j["routes"] = f.routes;
        doc["flows"].push_back(j);
    }
    doc["be_max_frame_bits"] = exact(cfg.be_max_frame);
    doc["d_tech_us"] = exact(micros(cfg.d_tech));
    doc["credit_mode"] = to_string(cfg.credit_mode);
    return doc;
}

// -- validation ---------------------------------------------------------------

std::vector<Rational> compute_guard_bands(const OutputPort& port, const Rational& l_max_le)
{
    std::vector<Rational> out;
    Rational need = l_max_le / port.rate;
    for (std::size_t k = 0; k < port.windows.size(); ++k)
        out.push_back(std::min(need, port.gap_before(k)));
    return out;
}

std::size_t Network::port_index(const std::string& id) const
{
    auto it = port_ids_.find(id);
    if (it == port_ids_.end())
        throw std::out_of_range("unknown port " + id);
    return it->second;
}

std::vector<Rational> Network::guard_bands(std::size_t p, std::size_t cls) const
{
    return compute_guard_bands(port(p), l_max_le(p, cls));
}

Rational Network::hyperperiod() const
{
    Rational h = 0;
    for (const OutputPort& p : ports())
        h = h == 0 ? p.gcl_period : lcm_of(h, p.gcl_period);
    return h == 0 ? Rational(1) : h;
}

namespace {

void check_port(const OutputPort& p, std::vector<std::string>& errs)
{
    std::string where = "port " + p.id;
    if (p.gcl_period <= 0)
        errs.push_back(where + ": gcl period must be positive");
    for (std::size_t k = 0; k < p.windows.size(); ++k) {
        const StWindow& w = p.windows[k];
        if (w.offset < 0 || w.length <= 0 || w.offset + w.length > p.gcl_period)
            errs.push_back(where + ": window " + std::to_string(k) + " not inside [0, gcl period)");
        if (k > 0 && w.offset < p.windows[k - 1].offset + p.windows[k - 1].length)
            errs.push_back(where + ": windows " + std::to_string(k - 1) + " and " + std::to_string(k) +
                           " overlap or are not sorted");
    }
    if (p.windows.size() == 1 && p.windows[0].length >= p.gcl_period)
        errs.push_back(where + ": the ST window covers the whole cycle");
    if (p.idle_slopes.empty())
        errs.push_back(where + ": at least one AVB class is required");
    Rational total = 0;
    for (std::size_t i = 0; i < p.idle_slopes.size(); ++i) {
        const Rational& s = p.idle_slopes[i];
        if (s <= 0 || s >= p.rate)
            errs.push_back(where + ": idle slope of class " + std::to_string(i + 1) + " must lie in (0, C)");
        total += s;
    }
    if (!p.idle_slopes.empty() && total >= p.rate)
        errs.push_back(where + ": overload, idle slopes sum to " + to_string(total / p.rate) + " of C");
}

}  // namespace

Network Network::validate(NetworkConfig cfg)
{
    std::vector<std::string> errs;
    Network net;

    std::map<std::string, const Node*> nodes;
    for (const Node& n : cfg.nodes)
        if (!nodes.emplace(n.id, &n).second)
            errs.push_back("duplicate node " + n.id);
    std::map<std::string, std::size_t> links;
    for (std::size_t i = 0; i < cfg.links.size(); ++i) {
        const Link& l = cfg.links[i];
        if (!links.emplace(l.id, i).second)
            errs.push_back("duplicate link " + l.id);
        if (!nodes.count(l.from) || !nodes.count(l.to))
            errs.push_back("link " + l.id + ": unknown endpoint");
        if (l.rate <= 0)
            errs.push_back("link " + l.id + ": rate must be positive");
    }
    if (!errs.empty())
        throw ValidationError(errs);

    std::set<std::size_t> used_links;
    for (std::size_t i = 0; i < cfg.ports.size(); ++i) {
        OutputPort& p = cfg.ports[i];
        if (!net.port_ids_.emplace(p.id, i).second)
            errs.push_back("duplicate port " + p.id);
        auto it = links.find(p.link);
        if (it == links.end()) {
            errs.push_back("port " + p.id + ": unknown link " + p.link);
            continue;
        }
        if (!used_links.insert(it->second).second)
            errs.push_back("port " + p.id + ": link " + p.link + " already has an output port");
        const Link& l = cfg.links[it->second];
        p.link_index = it->second;
        p.rate = l.rate;
        p.from_node = l.from;
        p.to_node = l.to;
        check_port(p, errs);
    }
    if (!errs.empty())
        throw ValidationError(errs);

    std::set<Rational> rates;
    for (const OutputPort& p : cfg.ports)
        rates.insert(p.rate);
    if (rates.size() > 1)
        net.warnings_.push_back("link rates differ between ports");

    const std::size_t np = cfg.ports.size();
    std::vector<std::set<std::size_t>> succ(np), pred(np);
    for (AvbFlow& f : cfg.flows) {
        std::string where = "flow " + f.id;
        if (f.frame_bits <= 0)
            errs.push_back(where + ": frame size must be positive");
        if (f.period <= 0)
            errs.push_back(where + ": period must be positive");
        f.route_ports.clear();
        // Position of each port in the multicast tree and the port before it.
        std::map<std::size_t, std::pair<std::size_t, long>> tree;
        for (const auto& route : f.routes) {
            std::vector<std::size_t> idx;
            bool ok = true;
            for (const std::string& id : route) {
                auto it = net.port_ids_.find(id);
                if (it == net.port_ids_.end()) {
                    errs.push_back(where + ": unknown port " + id);
                    ok = false;
                    break;
                }
                idx.push_back(it->second);
            }
            if (!ok)
                continue;
            const OutputPort& first = cfg.ports[idx.front()];
            if (nodes.at(first.from_node)->is_switch)
                errs.push_back(where + ": route must start at an end system");
            if (nodes.at(cfg.ports[idx.back()].to_node)->is_switch)
                errs.push_back(where + ": route must end at an end system");
            std::set<std::size_t> seen;
            for (std::size_t h = 0; h < idx.size(); ++h) {
                const OutputPort& p = cfg.ports[idx[h]];
                if (!seen.insert(idx[h]).second)
                    errs.push_back(where + ": route visits port " + p.id + " twice");
                if (h > 0 && cfg.ports[idx[h - 1]].to_node != p.from_node)
                    errs.push_back(where + ": ports " + cfg.ports[idx[h - 1]].id + " and " + p.id +
                                   " are not connected");
                if (h > 0 && !nodes.at(p.from_node)->is_switch)
                    errs.push_back(where + ": route relays through end system " + p.from_node);
                if (f.cls >= p.classes())
                    errs.push_back(where + ": class " + std::to_string(f.cls + 1) + " not configured at port " +
                                   p.id);
                long before = h == 0 ? -1 : static_cast<long>(idx[h - 1]);
                auto [it, fresh] = tree.emplace(idx[h], std::make_pair(h, before));
                if (!fresh && (it->second.first != h || it->second.second != before))
                    errs.push_back(where + ": routes do not form a tree at port " + p.id);
                if (h > 0) {
                    succ[idx[h - 1]].insert(idx[h]);
                    pred[idx[h]].insert(idx[h - 1]);
                }
            }
            f.route_ports.push_back(std::move(idx));
        }
    }
    if (!errs.empty())
        throw ValidationError(errs);

    // Kahn's algorithm; ties broken by port index for a stable order.
    std::vector<std::size_t> indeg(np);
    for (std::size_t p = 0; p < np; ++p)
        indeg[p] = pred[p].size();
    std::set<std::size_t> ready;
    for (std::size_t p = 0; p < np; ++p)
        if (indeg[p] == 0)
            ready.insert(p);
    while (!ready.empty()) {
        std::size_t p = *ready.begin();
        ready.erase(ready.begin());
        net.order_.push_back(p);
        for (std::size_t q : succ[p])
            if (--indeg[q] == 0)
                ready.insert(q);
    }
    if (net.order_.size() != np) {
        std::string cyc;
        for (std::size_t p = 0; p < np; ++p)
            if (indeg[p] > 0)
                cyc += (cyc.empty() ? "" : ", ") + cfg.ports[p].id;
        throw ValidationError({"cyclic dependency between ports " + cyc});
    }

    net.preds_.assign(np, {});
    for (std::size_t p = 0; p < np; ++p)
        net.preds_[p].assign(pred[p].begin(), pred[p].end());
    net.flows_at_.assign(np, {});
    net.l_cls_.assign(np, {});
    net.l_le_.assign(np, {});
    net.l_gt_.assign(np, {});
    for (std::size_t p = 0; p < np; ++p) {
        net.l_cls_[p].assign(cfg.ports[p].classes(), Rational(0));
        net.l_le_[p].assign(cfg.ports[p].classes(), Rational(0));
        net.l_gt_[p].assign(cfg.ports[p].classes(), cfg.be_max_frame);
    }
    for (std::size_t fi = 0; fi < cfg.flows.size(); ++fi) {
        const AvbFlow& f = cfg.flows[fi];
        std::set<std::size_t> ports_of_flow;
        for (const auto& route : f.route_ports) {
            for (std::size_t h = 0; h < route.size(); ++h) {
                if (ports_of_flow.insert(route[h]).second)
                    net.flows_at_[route[h]].emplace_back(fi, h);
            }
        }
        for (std::size_t p : ports_of_flow) {
            net.l_cls_[p][f.cls] = std::max(net.l_cls_[p][f.cls], f.frame_bits);
            for (std::size_t c = 0; c < cfg.ports[p].classes(); ++c) {
                Rational& slot = c >= f.cls ? net.l_le_[p][c] : net.l_gt_[p][c];
                slot = std::max(slot, f.frame_bits);
            }
        }
    }

    // Every AVB frame has to fit into some gap between ST windows.
    for (std::size_t p = 0; p < np; ++p) {
        const OutputPort& port = cfg.ports[p];
        if (port.windows.empty())
            continue;
        Rational widest = 0;
        for (std::size_t k = 0; k < port.windows.size(); ++k)
            widest = std::max(widest, port.gap_before(k));
        for (const auto& [fi, h] : net.flows_at_[p]) {
            const AvbFlow& f = cfg.flows[fi];
            if (f.frame_bits / port.rate > widest)
                errs.push_back("flow " + f.id + ": frame does not fit between the ST windows of port " + port.id);
        }
    }
    if (!errs.empty())
        throw ValidationError(errs);

    net.config_ = std::move(cfg);
    return net;
}

}  // namespace tsnnc
