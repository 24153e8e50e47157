#include <pybind11/pybind11.h>
PYBIND11_MODULE(_bicmlab, m) { m.doc() = "placeholder"; }
