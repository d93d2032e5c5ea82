#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsnnc/rational.hpp"

namespace tsnnc {

enum class CreditMode { Frozen, NonFrozen };

CreditMode parse_credit_mode(const std::string& text);
std::string to_string(CreditMode mode);

// Carries every problem found, not only the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct Node {
    std::string id;
    bool is_switch = false;
};

struct Link {
    std::string id;
    std::string from;
    std::string to;
    Rational rate;  // bits/s
};

struct StWindow {
    Rational offset;  // seconds, relative to the GCL cycle start
    Rational length;  // seconds
};

// Egress port feeding one link. Class 0 is the highest AVB priority.
struct OutputPort {
    std::string id;
    std::string link;
    Rational gcl_period;
    std::vector<StWindow> windows;
    std::vector<Rational> idle_slopes;

    // Filled by validation.
    std::size_t link_index = 0;
    Rational rate;
    std::string from_node;
    std::string to_node;

    std::size_t classes() const { return idle_slopes.size(); }
    Rational send_slope(std::size_t cls) const { return idle_slopes[cls] - rate; }
    // Idle time between the end of the previous window (cyclically) and window k.
    Rational gap_before(std::size_t k) const;
    Rational st_total() const;
};

struct AvbFlow {
    std::string id;
    std::size_t cls = 0;  // 0-based
    Rational frame_bits;
    Rational period;  // minimum inter-frame time, seconds
    // One route per destination; each is a list of port ids. Routes of a
    // multicast flow must form a tree rooted at the first port.
    std::vector<std::vector<std::string>> routes;

    // Filled by validation: the same routes as port indices.
    std::vector<std::vector<std::size_t>> route_ports;
};

struct NetworkConfig {
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<OutputPort> ports;
    std::vector<AvbFlow> flows;
    Rational be_max_frame;  // bits
    Rational d_tech;        // seconds
    CreditMode credit_mode = CreditMode::Frozen;
};

// Parses the JSON config format. Throws ValidationError on malformed input.
NetworkConfig parse_config(const nlohmann::json& doc);
NetworkConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const NetworkConfig& config);

// A config that passed validation plus the derived quantities the analysis
// and the simulator depend on.
class Network {
public:
    // Throws ValidationError listing every violated invariant.
    static Network validate(NetworkConfig config);

    const NetworkConfig& config() const { return config_; }
    const std::vector<OutputPort>& ports() const { return config_.ports; }
    const std::vector<AvbFlow>& flows() const { return config_.flows; }
    const OutputPort& port(std::size_t p) const { return config_.ports[p]; }
    std::size_t port_index(const std::string& id) const;

    // Ports in feed-forward order: every predecessor before its successors.
    const std::vector<std::size_t>& order() const { return order_; }
    // Upstream ports of port p along some route.
    const std::vector<std::size_t>& predecessors(std::size_t p) const { return preds_[p]; }
    // (flow, route-position) pairs: flow f's frames reach port p as the
    // position-th hop of some route.
    const std::vector<std::pair<std::size_t, std::size_t>>& flows_at(std::size_t p) const
    {
        return flows_at_[p];
    }

    // Largest frame of class cls crossing port p (0 when none).
    const Rational& l_max_class(std::size_t p, std::size_t cls) const { return l_cls_[p][cls]; }
    // Largest frame of classes 0..cls crossing port p (0 when none).
    const Rational& l_max_le(std::size_t p, std::size_t cls) const { return l_le_[p][cls]; }
    // Largest frame of lower classes or best effort at port p.
    const Rational& l_max_gt(std::size_t p, std::size_t cls) const { return l_gt_[p][cls]; }

    // Guard band length preceding each window of port p, as seen by class cls.
    std::vector<Rational> guard_bands(std::size_t p, std::size_t cls) const;

    // Least common multiple of all GCL periods.
    Rational hyperperiod() const;

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    NetworkConfig config_;
    std::map<std::string, std::size_t> port_ids_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> preds_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> flows_at_;
    std::vector<std::vector<Rational>> l_cls_;
    std::vector<std::vector<Rational>> l_le_;
    std::vector<std::vector<Rational>> l_gt_;
    std::vector<std::string> warnings_;
};

// min(l / C, gap) per window.
std::vector<Rational> compute_guard_bands(const OutputPort& port, const Rational& l_max_le);

}  // namespace tsnnc
