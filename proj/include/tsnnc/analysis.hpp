#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsnnc/credit.hpp"
#include "tsnnc/curve.hpp"
#include "tsnnc/network.hpp"

namespace tsnnc {

// Full applies the link and CBS shaping caps to every predecessor group;
// None sums the individual arrivals only.
enum class Shaping { Full, None };

Shaping parse_shaping(const std::string& text);
std::string to_string(Shaping shaping);

struct AnalysisOptions {
    CreditMode mode = CreditMode::Frozen;
    Shaping shaping = Shaping::Full;
    bool keep_curves = false;
    bool zero_guard_bands = false;  // pretend every guard band is empty
};

struct PortClassResult {
    std::size_t port = 0;
    std::string port_id;
    std::size_t cls = 0;
    Rational delay;
    CreditBounds credit;
    Rational arrival_rate;
    Rational service_rate;
    std::string service;  // how the service curve was built
    std::vector<std::string> flows;
};

struct RouteDelay {
    std::vector<std::string> ports;
    std::vector<Rational> hop_delays;
    Rational e2e;
};

struct FlowDelay {
    std::string id;
    std::size_t cls = 0;
    std::vector<RouteDelay> routes;

    Rational worst() const;
};

struct NamedCurve {
    std::string name;
    Curve curve;
};

struct DelayReport {
    CreditMode mode = CreditMode::Frozen;
    Shaping shaping = Shaping::Full;
    std::vector<FlowDelay> flows;
    std::vector<PortClassResult> port_classes;
    std::vector<NamedCurve> curves;  // only with keep_curves

    const FlowDelay& flow(const std::string& id) const;
};

// idSl * [t - alpha_h(t)/C - c_max/idSl]^+ (non-decreasing closure). Throws
// UnstableError when the long-term rate is not positive.
Curve avb_service_curve(const Curve& alpha_h, const Rational& rate, const Rational& idle_slope,
                        const Rational& c_max);

// affine(l, l/p).
Curve source_arrival(const AvbFlow& flow);

// alpha deconvolved by a burst-delay of length delay.
Curve propagate_arrival(const Curve& alpha, const Rational& delay);

// min(sum, C t + l_max, sigma + l_max), or just sum without shaping.
Curve group_arrival(const Curve& sum_of_flows, const Rational& rate, const Rational& l_max, const Curve& sigma,
                    Shaping shaping);

Rational end_to_end(const std::vector<Rational>& hop_delays, const Rational& d_tech);

// Per-port, per-class delay bounds in feed-forward order and the resulting
// end-to-end bounds. Throws UnstableError or ValidationError.
DelayReport analyze(const Network& net, const AnalysisOptions& options);

void write_csv(std::ostream& out, const DelayReport& report);
nlohmann::json to_json(const DelayReport& report);

}  // namespace tsnnc
