#include <pybind11/pybind11.h>
PYBIND11_MODULE(_sbmlab, m) { m.doc() = "placeholder"; }
