#include <cstdio>
#include <ostream>

#include "nrc/simulator.hpp"

namespace nrc {

namespace {

// Fixed formatting so repeated runs produce byte-identical files.
void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << "t,y,ydot,u,beta\n";
  for (const auto& s : trace.samples) {
    put(os, s.t);
    os << ',';
    put(os, s.y);
    os << ',';
    put(os, s.ydot);
    os << ',';
    put(os, s.u);
    os << ',';
    put(os, s.beta);
    os << '\n';
  }
}

void write_events_csv(std::ostream& os, const SimTrace& trace) {
  os << "t,kind,sign,y,ydot\n";
  for (const auto& e : trace.events) {
    put(os, e.time);
    os << ',' << to_string(e.kind) << ',' << e.sign << ',';
    put(os, e.y);
    os << ',';
    put(os, e.ydot);
    os << '\n';
  }
}

}  // namespace nrc
