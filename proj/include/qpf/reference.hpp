#pragma once
// Plain serial implementations of the parallel grid kernels. Kept independent
// and deliberately simple; tests compare them bit for bit against the
// parallel versions and the benchmark target times the two side by side.

#include "qpf/graphs.hpp"

namespace qpf::reference {

GraphSample iterate_boundary(const QpfSystem& sys, GraphKind which, int n, int g);
GraphSample iterate_boundary_at(const QpfSystem& sys, GraphKind which, int n,
                                std::vector<double> grid);
GraphSample middle_graph(const QpfSystem& sys, int g, int n_test);

}  // namespace qpf::reference
