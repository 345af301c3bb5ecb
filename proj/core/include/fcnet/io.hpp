#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fcnet/net.hpp"
#include "fcnet/routing.hpp"
#include "fcnet/throughput.hpp"
#include "fcnet/timed.hpp"

namespace fcnet {

// A parsed net description file: the net plus optional routing and timing
// sections.
struct LoadedNet {
  PetriNet net;
  std::optional<RoutingSpec> routing;
  std::optional<TimingSpec> timing;

  RoutingSpec routing_or_trivial() const {
    return routing ? *routing : trivial_routing(net);
  }
};

// JSON text, UTF-8. Unknown keys are rejected everywhere, arcs must be
// [from, to] pairs (no weights), and identifiers starting with the reserved
// transform prefixes are refused. Throws Error(ParseError) or
// Error(InvalidNet).
LoadedNet parse_net_text(const std::string& text);
LoadedNet load_net_file(const std::string& path);

// Stable serialization that round-trips through parse_net_text.
std::string net_to_json_text(const PetriNet& net, const RoutingSpec* routing = nullptr,
                             const TimingSpec* timing = nullptr);

// CSV with a header row of transition ids followed by a square block of
// rows in the same order.
RoutingMatrix parse_matrix_csv(const std::string& text);
RoutingMatrix load_matrix_csv(const std::string& path);

// One row per completion: transition, n, instant.
void write_dater_csv(std::ostream& os, const PetriNet& net, const DaterLog& daters);
std::string dater_csv_text(const PetriNet& net, const DaterLog& daters);

}  // namespace fcnet
