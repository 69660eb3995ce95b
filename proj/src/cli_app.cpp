namespace qpf {}
